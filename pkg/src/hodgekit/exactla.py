"""Dense linear algebra over Q(i) (exact) and complex floats (tolerant).

Every computation in this package runs in exactly one scalar mode:

* exact mode: entries are :class:`ExactGaussian`, a + b*i with arbitrary
  precision rational a, b.  All arithmetic and all rank decisions are exact.
* float mode: entries are Python/numpy complex.  Rank decisions use a
  relative tolerance (``RANK_TOL`` times the largest entry magnitude).

Subspaces are stored in reduced row echelon form, which makes equality a
row-wise comparison and keeps all set operations canonical.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 ships with the environment
    _mpq = Fraction

RANK_TOL = 1e-9
COMPARE_TOL = 1e-12


class AmbientMismatch(ValueError):
    """Operands live in different ambient dimensions or scalar modes."""


_MPQ_TYPE = type(_mpq())


def _to_mpq(x):
    if type(x) is _MPQ_TYPE:
        return x
    try:
        return _mpq(x)
    except (SystemError, TypeError):
        # Fractions assembled from gmpy2 components confuse the direct
        # converter; rebuild from plain integers
        return _mpq(int(x.numerator), int(x.denominator))


class ExactGaussian:
    """An element a + b*i of Q(i) with exact rational a, b.

    Components are stored as gmpy2 rationals for speed; they compare and
    convert interchangeably with Fraction.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if type(other) is not ExactGaussian:
            other = as_exact(other)
        return _eg(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not ExactGaussian:
            other = as_exact(other)
        return _eg(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_exact(other) - self

    def __mul__(self, other):
        if type(other) is not ExactGaussian:
            other = as_exact(other)
        if not self.im and not other.im:
            return _eg(self.re * other.re, _MPQ_ZERO)
        return _eg(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is not ExactGaussian:
            other = as_exact(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return _eg(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return as_exact(other) / self

    def __neg__(self):
        return _eg(-self.re, -self.im)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = EG_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return _eg(self.re, -self.im)

    # -- structure ----------------------------------------------------------

    def __eq__(self, other):
        try:
            other = as_exact(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i)"

    def is_real(self):
        return self.im == 0


_MPQ_ZERO = _mpq(0)
_EG_NEW = ExactGaussian.__new__


def _eg(re, im):
    """Internal constructor for components that are already gmpy2
    rationals (skips coercion)."""
    out = _EG_NEW(ExactGaussian)
    out.re = re
    out.im = im
    return out


EG_ZERO = ExactGaussian(0)
EG_ONE = ExactGaussian(1)
EG_I = ExactGaussian(0, 1)


import numbers


def as_exact(x) -> ExactGaussian:
    """Coerce ints, rationals and exact pairs into Q(i)."""
    if isinstance(x, ExactGaussian):
        return x
    if isinstance(x, (int, Fraction)) or isinstance(x, numbers.Rational):
        return ExactGaussian(x)
    if isinstance(x, tuple) and len(x) == 2:
        return ExactGaussian(_mpq(x[0]), _mpq(x[1]))
    raise TypeError(f"cannot coerce {x!r} into Q(i)")


def is_exact_scalar(x) -> bool:
    return isinstance(x, ExactGaussian) or isinstance(x, numbers.Rational)


def scalar_json(x: ExactGaussian):
    return [str(x.re), str(x.im)]


def scalar_from_json(obj) -> ExactGaussian:
    return ExactGaussian(Fraction(obj[0]), Fraction(obj[1]))


# ---------------------------------------------------------------------------
# generic matrix helpers (matrices are tuples of tuples, rows first)
# ---------------------------------------------------------------------------


def _zero(exact):
    return EG_ZERO if exact else 0j


def _one(exact):
    return EG_ONE if exact else 1 + 0j


def _conj(x):
    return x.conjugate() if isinstance(x, ExactGaussian) else complex(x).conjugate()


def _abs2(x):
    if isinstance(x, ExactGaussian):
        return x.re * x.re + x.im * x.im
    return abs(x) ** 2


def infer_exact(entries) -> bool:
    for e in entries:
        if isinstance(e, (complex, float)) or isinstance(e, np.generic):
            return False
    return True


def rational_value(x):
    """The value as a Fraction when x is exact rational, else None."""
    if isinstance(x, ExactGaussian):
        if x.im != 0:
            return None
        return Fraction(x.re)
    if isinstance(x, numbers.Rational):
        return Fraction(x)
    return None


def coerce_vector(v, exact):
    if exact:
        return tuple(as_exact(x) for x in v)
    return tuple(complex(x) for x in v)


def coerce_matrix(m, exact):
    return tuple(coerce_vector(row, exact) for row in m)


def mat_shape(m):
    return (len(m), len(m[0]) if m else 0)


def mat_identity(n, exact=True):
    z, o = _zero(exact), _one(exact)
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def mat_zero(nr, nc, exact=True):
    z = _zero(exact)
    return tuple(tuple(z for _ in range(nc)) for _ in range(nr))


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def _dot(u, v):
    acc = None
    for x, y in zip(u, v):
        t = x * y
        acc = t if acc is None else acc + t
    return acc


def mat_mul(a, b):
    n, k = mat_shape(a)
    k2, m = mat_shape(b)
    if k != k2:
        raise AmbientMismatch(f"matrix shapes {n}x{k} and {k2}x{m} incompatible")
    bt = tuple(zip(*b))
    return tuple(tuple(_dot(row, col) for col in bt) for row in a)


def mat_vec(a, v):
    return tuple(_dot(row, v) for row in a)


def vec_add(u, v):
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(c, v):
    return tuple(c * x for x in v)


def mat_conj(a):
    return tuple(tuple(_conj(x) for x in row) for row in a)


def mat_transpose(a):
    return tuple(zip(*a))


def mat_is_zero(a, tol=COMPARE_TOL):
    return all(entry_is_zero(x, tol) for row in a for x in row)


def entry_is_zero(x, tol=COMPARE_TOL):
    if isinstance(x, ExactGaussian):
        return not x
    return abs(x) <= tol


def mat_eq(a, b, tol=COMPARE_TOL):
    return mat_shape(a) == mat_shape(b) and mat_is_zero(mat_sub(a, b), tol)


def mat_real_part(a):
    out = []
    for row in a:
        r = []
        for x in row:
            r.append(ExactGaussian(x.re) if isinstance(x, ExactGaussian)
                     else complex(x.real))
        out.append(tuple(r))
    return tuple(out)


def mat_is_real(a, tol=COMPARE_TOL):
    for row in a:
        for x in row:
            if isinstance(x, ExactGaussian):
                if x.im != 0:
                    return False
            elif abs(complex(x).imag) > tol:
                return False
    return True


def mat_exp_nilpotent(a):
    """exp of a nilpotent matrix by the finite series (exact in exact mode)."""
    n, _ = mat_shape(a)
    exact = infer_exact([x for row in a for x in row])
    out = mat_identity(n, exact)
    term = mat_identity(n, exact)
    for k in range(1, n + 1):
        term = mat_mul(term, a)
        if exact:
            term = mat_scale(ExactGaussian(Fraction(1, k)), term)
        else:
            term = mat_scale(1.0 / k, term)
        if mat_is_zero(term, 0 if exact else 1e-300):
            break
        out = mat_add(out, term)
    else:
        if not mat_is_zero(term, COMPARE_TOL):
            raise ValueError("matrix is not nilpotent")
    return out


def mat_inverse(a, tol=RANK_TOL):
    n, m = mat_shape(a)
    if n != m:
        raise AmbientMismatch("inverse of a non-square matrix")
    exact = infer_exact([x for row in a for x in row])
    aug = [list(row) + list(ident_row)
           for row, ident_row in zip(a, mat_identity(n, exact))]
    rr, pivots = _rref_rows(aug, n + n, exact, tol, limit_cols=n)
    if len(pivots) != n:
        raise ValueError("singular matrix")
    return tuple(tuple(row[n:]) for row in rr)


def mat_pow(a, k):
    n, _ = mat_shape(a)
    exact = infer_exact([x for row in a for x in row])
    out = mat_identity(n, exact)
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def solve_right(a, b, tol=RANK_TOL):
    """One solution x of x A = b for row vectors, or None.

    ``a`` is a stack of row vectors, ``b`` a row vector in the same ambient.
    """
    rows = [list(r) for r in a]
    nr = len(rows)
    nc = len(b)
    exact = infer_exact(list(b) + [x for r in rows for x in r])
    if not exact:
        A = np.array(rows, dtype=complex).T
        bb = np.array(b, dtype=complex)
        x, res, rank, sv = np.linalg.lstsq(A, bb, rcond=None)
        allowed = max(tol, 1e-7) * max(1.0, np.abs(A).max(),
                                       float(np.linalg.norm(bb)))
        if np.linalg.norm(A @ x - bb) > allowed:
            return None
        return tuple(x)
    # exact Gaussian elimination on the transposed system
    aug = [[rows[i][j] for i in range(nr)] + [b[j]] for j in range(nc)]
    rr, pivots = _rref_rows(aug, nr + 1, True, 0, limit_cols=nr)
    x = [EG_ZERO] * nr
    for ridx, p in enumerate(pivots):
        x[p] = rr[ridx][nr]
    # consistency: rows with all-zero coefficients must have zero rhs
    for ridx in range(len(pivots), len(rr)):
        if rr[ridx][nr]:
            return None
    return tuple(x)


def _rref_rows(rows, ncols, exact, tol, limit_cols=None):
    """In-place reduced row echelon form.  Returns (rows, pivot column list)."""
    if limit_cols is None:
        limit_cols = ncols
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(limit_cols):
        if r >= nrows:
            break
        # pick pivot
        piv = None
        if exact:
            for i in range(r, nrows):
                if rows[i][c]:
                    piv = i
                    break
        else:
            scale = max((abs(rows[i][c]) for i in range(r, nrows)), default=0.0)
            remmax = max((abs(rows[i][j]) for i in range(r, nrows)
                          for j in range(c, ncols)), default=0.0)
            if scale > tol * max(remmax, 1.0):
                piv = max(range(r, nrows), key=lambda i: abs(rows[i][c]))
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = (EG_ONE / rows[r][c]) if exact else 1.0 / rows[r][c]
        rows[r] = [inv * x for x in rows[r]]
        for i in range(nrows):
            if i != r and not entry_is_zero(rows[i][c], 0 if exact else tol):
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    # drop zero rows
    out = []
    for row in rows:
        if not all(entry_is_zero(x, 0 if exact else tol) for x in row):
            out.append(list(row))
    # clean tiny float junk for stability of comparisons
    if not exact:
        out = [[0j if abs(x) <= tol else complex(x) for x in row] for row in out]
    return out, pivots


# ---------------------------------------------------------------------------
# Subspace
# ---------------------------------------------------------------------------


class Subspace:
    """A linear subspace of Scalar^ambient in reduced row echelon form."""

    __slots__ = ("ambient", "rows", "exact")

    def __init__(self, ambient, rows, exact, _canonical=False):
        self.ambient = ambient
        self.exact = exact
        if _canonical:
            self.rows = tuple(tuple(r) for r in rows)
        elif exact:
            rr, _ = _rref_rows([list(r) for r in rows], ambient, exact, RANK_TOL)
            self.rows = tuple(tuple(r) for r in rr)
        else:
            # orthonormal basis via SVD on row-normalized input; rank by
            # singular values relative to the (normalized) entry scale
            a = np.array([list(map(complex, r)) for r in rows],
                         dtype=complex)
            if a.size == 0:
                self.rows = ()
                return
            norms = np.linalg.norm(a, axis=1)
            keep = norms > 0
            a = a[keep] / norms[keep, None]
            if a.size == 0:
                self.rows = ()
                return
            _, sv, vh = np.linalg.svd(a)
            rank = int((sv > RANK_TOL).sum())
            self.rows = tuple(tuple(vh[i]) for i in range(rank))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def span(vectors, ambient=None, exact=None):
        vectors = list(vectors)
        if ambient is None:
            if not vectors:
                raise ValueError("cannot infer ambient dimension of empty span")
            ambient = len(vectors[0])
        if exact is None:
            exact = infer_exact([x for v in vectors for x in v])
        vecs = [coerce_vector(v, exact) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise AmbientMismatch("vector length differs from ambient")
        return Subspace(ambient, vecs, exact)

    @staticmethod
    def zero(ambient, exact=True):
        return Subspace(ambient, [], exact, _canonical=True)

    @staticmethod
    def full(ambient, exact=True):
        return Subspace(ambient, mat_identity(ambient, exact), exact,
                        _canonical=True)

    # -- basic structure ----------------------------------------------------

    @property
    def dim(self):
        return len(self.rows)

    def is_zero(self):
        return not self.rows

    def is_full(self):
        return self.dim == self.ambient

    def _check_compatible(self, other):
        if self.ambient != other.ambient or self.exact != other.exact:
            raise AmbientMismatch(
                f"subspaces in dim {self.ambient}/{other.ambient}, "
                f"exact={self.exact}/{other.exact}")

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.ambient != other.ambient or self.exact != other.exact:
            return False
        if self.exact:
            return self.rows == other.rows
        return self.dim == other.dim and self.contains(other) \
            and other.contains(self)

    def __hash__(self):
        if not self.exact:
            raise TypeError("float subspaces are not hashable")
        return hash((self.ambient, self.rows))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient})"

    # -- membership and comparison ------------------------------------------

    def contains_vector(self, v, tol=COMPARE_TOL):
        v = coerce_vector(v, self.exact)
        if self.is_zero():
            return all(entry_is_zero(x, tol) for x in v)
        if self.exact:
            return solve_right(self.rows, v) is not None
        a = np.array(self.rows, dtype=complex)
        vv = np.array(v, dtype=complex)
        coeff = a.conj() @ vv
        resid = vv - coeff @ a
        return np.linalg.norm(resid) <= max(tol, 1e-9) * max(
            1.0, np.linalg.norm(vv))

    def contains(self, other, tol=COMPARE_TOL):
        self._check_compatible(other)
        return all(self.contains_vector(r, tol) for r in other.rows)

    # -- lattice operations --------------------------------------------------

    def join(self, other):
        self._check_compatible(other)
        return Subspace(self.ambient, list(self.rows) + list(other.rows),
                        self.exact)

    def meet(self, other):
        """Intersection: Zassenhaus blocks (exact) or principal angles
        between orthonormal bases (float)."""
        self._check_compatible(other)
        n = self.ambient
        if self.exact:
            z = _zero(True)
            block = []
            for r in self.rows:
                block.append(list(r) + list(r))
            for r in other.rows:
                block.append(list(r) + [z] * n)
            rr, _ = _rref_rows(block, 2 * n, True, RANK_TOL)
            out = [row[n:] for row in rr
                   if all(entry_is_zero(x, 0) for x in row[:n])]
            return Subspace(n, out, True)
        if self.is_zero() or other.is_zero():
            return Subspace.zero(n, False)
        qa = np.array(self.rows, dtype=complex)
        qb = np.array(other.rows, dtype=complex)
        proj_b = qb.conj().T @ qb
        d = qa @ (np.eye(n) - proj_b)
        u, sv, _ = np.linalg.svd(d)
        out = []
        for idx in range(qa.shape[0]):
            sigma = sv[idx] if idx < len(sv) else 0.0
            if sigma <= 1e-8:
                v = u[:, idx].conj() @ qa
                out.append(tuple(v @ proj_b))
        return Subspace(n, out, False)

    def apply(self, matrix):
        """Canonical form of the image of this subspace under ``matrix``."""
        nr, nc = mat_shape(matrix)
        if nc != self.ambient:
            raise AmbientMismatch("matrix columns differ from ambient")
        exact = self.exact and infer_exact([x for row in matrix for x in row])
        if self.is_full() and nr == nc and not exact:
            # invertible maps fix the full space; avoids conditioning noise
            if abs(np.linalg.det(np.array(matrix, dtype=complex))) > 0:
                return Subspace.full(nr, False)
        m = coerce_matrix(matrix, exact)
        rows = [mat_vec(m, coerce_vector(r, exact)) for r in self.rows]
        return Subspace(nr, rows, exact)

    def conj(self):
        """Entrywise complex conjugate, re-canonicalized."""
        return Subspace(self.ambient,
                        [tuple(_conj(x) for x in r) for r in self.rows],
                        self.exact)

    def is_real(self, tol=COMPARE_TOL):
        return self == self.conj()

    def real_points(self):
        """A basis of the real points of a conjugation stable subspace."""
        if self.exact:
            if not self.is_real():
                raise ValueError("subspace is not conjugation stable")
            cand = []
            half = ExactGaussian(Fraction(1, 2))
            halfi = ExactGaussian(0, Fraction(-1, 2))
            for r in self.rows:
                rc = tuple(_conj(x) for x in r)
                cand.append(vec_scale(half, vec_add(r, rc)))
                cand.append(vec_scale(halfi, vec_sub(r, rc)))
            real_sub = Subspace(self.ambient, cand, True)
            if real_sub.dim != self.dim:
                raise ValueError("real points do not span")
            return real_sub
        # float: the span of real and imaginary parts, truncated to the
        # known dimension (phases and roundoff are irrelevant then)
        a = np.array(self.rows, dtype=complex)
        cand = np.vstack([a.real, a.imag])
        norms = np.linalg.norm(cand, axis=1)
        cand = cand[norms > 1e-13]
        if cand.size == 0:
            raise ValueError("real points do not span")
        cand = cand / np.linalg.norm(cand, axis=1)[:, None]
        _, sv, vh = np.linalg.svd(cand)
        take = min(self.dim, vh.shape[0])
        if take < self.dim or (take < len(sv) and sv[take - 1] <= RANK_TOL):
            raise ValueError("real points do not span")
        rows = [tuple(complex(x) for x in vh[i]) for i in range(take)]
        return Subspace(self.ambient, rows, False, _canonical=True)

    def complement_in(self, larger):
        """Rows extending this basis to a basis of ``larger`` (greedy pivots)."""
        self._check_compatible(larger)
        if not larger.contains(self):
            raise ValueError("complement_in requires containment")
        rows = [list(r) for r in self.rows]
        out = []
        cur = self
        for r in larger.rows:
            if not cur.contains_vector(r):
                out.append(r)
                cur = Subspace(self.ambient, rows + out, self.exact)
        return out

    def to_json(self):
        if not self.exact:
            raise ValueError("only exact subspaces serialize")
        return {"ambient": self.ambient,
                "basis": [[scalar_json(x) for x in r] for r in self.rows]}

    @staticmethod
    def from_json(obj):
        rows = [[scalar_from_json(x) for x in r] for r in obj["basis"]]
        return Subspace(obj["ambient"], rows, True)


def subspace_meet_join(a: Subspace, b: Subspace):
    """(intersection, sum) of two subspaces in canonical form."""
    return a.meet(b), a.join(b)


def apply_and_span(matrix, s: Subspace) -> Subspace:
    return s.apply(matrix)


def conjugate_subspace(s: Subspace) -> Subspace:
    return s.conj()


def float_rank(matrix, tol=RANK_TOL):
    """Rank with singular values below tol * max|entry| counted as zero."""
    a = np.array(matrix, dtype=complex)
    if a.size == 0:
        return 0
    scale = np.abs(a).max()
    if scale == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    return int((sv > tol * scale).sum())
