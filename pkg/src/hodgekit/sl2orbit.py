"""SL(2)-orbit data: commuting gradings, weight filtrations from torus
actions, Borel-Serre splittings, sl(2) triple completion, orbit equivalence
and the combinatorics of admissible sets of weight filtrations."""

from __future__ import annotations

from fractions import Fraction

from .exactla import (
    COMPARE_TOL,
    EG_I,
    EG_ONE,
    EG_ZERO,
    ExactGaussian,
    Subspace,
    as_exact,
    mat_add,
    mat_eq,
    mat_identity,
    mat_inverse,
    mat_is_real,
    mat_is_zero,
    mat_mul,
    mat_scale,
    mat_shape,
    mat_sub,
    mat_vec,
    mat_zero,
    solve_right,
)
from .hodgedata import Filtration, HodgeBackdrop, WeightDecomposition, \
    weight_moments
from .splitcore import GradedPoint, canonical_splitting, decompose_mhs

import numpy as np


class NonIntegralEigenvalue(ValueError):
    pass


class NotSplittable(ValueError):
    pass


class NoSolution(ValueError):
    pass


class RankMismatch(ValueError):
    pass


class NotAdmissible(ValueError):
    pass


# ---------------------------------------------------------------------------
# joint gradings
# ---------------------------------------------------------------------------


class JointGrading:
    """A finite list of (exponent tuple, real subspace) blocks summing to
    the ambient space; models commuting one parameter gradings."""

    def __init__(self, blocks, ambient, nvars):
        self.blocks = [(tuple(theta), sub) for theta, sub in blocks
                       if sub.dim > 0]
        self.ambient = ambient
        self.nvars = nvars
        total = sum(sub.dim for _, sub in self.blocks)
        if total != ambient:
            raise ValueError("grading blocks do not sum to the ambient")

    def exponents(self):
        return [theta for theta, _ in self.blocks]

    def basis_matrix(self):
        cols = []
        for _, sub in self.blocks:
            cols.extend(sub.rows)
        return tuple(zip(*cols))

    def block_of_index(self):
        out = []
        for bi, (_, sub) in enumerate(self.blocks):
            out.extend([bi] * sub.dim)
        return out

    def scale_matrix(self, scales):
        """Matrix acting on block bi by the scalar scales[bi]."""
        import numbers
        exact = all(isinstance(x, ExactGaussian)
                    or isinstance(x, numbers.Rational) for x in scales)
        B = self.basis_matrix()
        if not exact:
            B = tuple(tuple(complex(x) for x in row) for row in B)
            scales = [complex(x) for x in scales]
        else:
            scales = [as_exact(x) for x in scales]
        Binv = mat_inverse(B)
        idx = self.block_of_index()
        n = self.ambient
        diag = [[(scales[idx[i]] if i == j else
                  (EG_ZERO if exact else 0j)) for j in range(n)]
                for i in range(n)]
        return mat_mul(B, mat_mul(diag, Binv))

    def action(self, t):
        """tau(t_1, .., t_n) as a matrix; t are scalars (exact or float)."""
        import numbers
        exact = all(isinstance(x, ExactGaussian)
                    or isinstance(x, numbers.Rational) for x in t)
        tt = [as_exact(x) if exact else complex(x) for x in t]
        scales = []
        for theta, _ in self.blocks:
            acc = EG_ONE if exact else 1.0 + 0j
            for j, e in enumerate(theta[-len(tt):] if len(theta) > len(tt)
                                  else theta):
                acc = acc * _int_power(tt[j], e, exact)
            scales.append(acc)
        return self.scale_matrix(scales)

    def sub_filtration(self, coord) -> Filtration:
        """Increasing filtration by the coord-th exponent."""
        values = sorted({theta[coord] for theta, _ in self.blocks})
        n = self.ambient
        exact = all(sub.exact for _, sub in self.blocks)
        steps = {}
        acc = Subspace.zero(n, exact)
        for v in values:
            for theta, sub in self.blocks:
                if theta[coord] == v:
                    acc = acc.join(sub)
            steps[v] = acc
        return Filtration("inc", steps, n, exact)

    def restricted(self, coords):
        """Coarser grading keeping only the listed exponent coordinates."""
        merged = {}
        for theta, sub in self.blocks:
            key = tuple(theta[c] for c in coords)
            merged.setdefault(key, []).append(sub)
        blocks = []
        for key, subs in merged.items():
            acc = subs[0]
            for s in subs[1:]:
                acc = acc.join(s)
            blocks.append((key, acc))
        return JointGrading(blocks, self.ambient, len(coords))

    def __eq__(self, other):
        if not isinstance(other, JointGrading):
            return NotImplemented
        a = {theta: sub for theta, sub in self.blocks}
        b = {theta: sub for theta, sub in other.blocks}
        return a == b


def _int_power(x, e, exact):
    if e >= 0:
        return x ** e
    if exact:
        return (EG_ONE / x) ** (-e)
    return (1.0 / x) ** (-e)


def joint_grading_from_decompositions(decomps):
    """Common refinement of weight decompositions into a joint grading.

    decomps: list of WeightDecomposition (same ambient).  Raises when the
    pieces fail to intersect transversally (non commuting gradings).
    """
    ambient = decomps[0].ambient
    exact = decomps[0].exact
    blocks = [((), Subspace.full(ambient, exact))]
    for dec in decomps:
        new = []
        for theta, sub in blocks:
            for w, part in dec.parts.items():
                piece = sub.meet(part)
                if piece.dim:
                    new.append((theta + (w,), piece))
        blocks = new
    total = sum(sub.dim for _, sub in blocks)
    if total != ambient:
        raise ValueError("gradings do not commute (refinement too small)")
    return JointGrading(blocks, ambient, len(decomps))


# ---------------------------------------------------------------------------
# sl(2) triples per graded weight
# ---------------------------------------------------------------------------


class Sl2Triple:
    """Per graded weight and variable: matrices (Nm, Y, Np) on gr_w.

    Relations (lowering convention): [Y, Nm] = -2 Nm, [Y, Np] = 2 Np,
    [Nm, Np] = -Y; triples for different variables commute entrywise.
    """

    def __init__(self, backdrop: HodgeBackdrop, data):
        self.backdrop = backdrop
        self.data = {key: tuple(tuple(tuple(r) for r in m) for m in mats)
                     for key, mats in data.items()}
        self._check()

    def _check(self):
        for (w, j), (nm, y, np_) in self.data.items():
            if not mat_is_zero(mat_sub(_bracket(y, nm),
                                       mat_scale(as_exact(-2), nm))):
                raise ValueError(f"[Y, N] != -2N at weight {w}, var {j}")
            if not mat_is_zero(mat_sub(_bracket(y, np_),
                                       mat_scale(as_exact(2), np_))):
                raise ValueError(f"[Y, N+] != 2N+ at weight {w}, var {j}")
            if not mat_is_zero(mat_sub(_bracket(nm, np_),
                                       mat_scale(as_exact(-1), y))):
                raise ValueError(f"[N, N+] != -Y at weight {w}, var {j}")
        # different variables commute
        byw = {}
        for (w, j), mats in self.data.items():
            byw.setdefault(w, {})[j] = mats
        for w, per in byw.items():
            js = sorted(per)
            for a in js:
                for b in js:
                    if a >= b:
                        continue
                    for ma in per[a]:
                        for mb in per[b]:
                            if not mat_is_zero(mat_sub(mat_mul(ma, mb),
                                                       mat_mul(mb, ma))):
                                raise ValueError(
                                    f"triples {a} and {b} do not commute "
                                    f"at weight {w}")

    def variables(self):
        return sorted({j for (_, j) in self.data})

    def weight_ops(self, j):
        return {w: mats for (w, jj), mats in self.data.items() if jj == j}


def _bracket(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def integer_eigendecomposition(m, ambient, exact=True):
    """{eigenvalue: Subspace} for a semisimple integer matrix."""
    n = ambient
    out = {}
    total = 0
    for lam in range(-2 * n - 2, 2 * n + 3):
        shifted = mat_sub(m, mat_scale(as_exact(lam),
                                       mat_identity(n, exact)))
        ker = _kernel(shifted, exact)
        if ker.dim:
            out[lam] = ker
            total += ker.dim
    if total != n:
        raise NonIntegralEigenvalue(
            "matrix is not semisimple with integer eigenvalues")
    return out


def _kernel(m, exact=True):
    from .exactla import _rref_rows
    n, _ = mat_shape(m)
    rows = [list(r) for r in m]
    rr, pivots = _rref_rows(rows, n, exact, 1e-9)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [EG_ZERO if exact else 0j] * n
        v[f] = EG_ONE if exact else 1.0 + 0j
        for ridx, p in enumerate(pivots):
            v[p] = -rr[ridx][f]
        basis.append(tuple(v))
    return Subspace(n, basis, exact) if basis else Subspace.zero(n, exact)


def weight_filtrations_from_Y(triple: Sl2Triple):
    """W^(j) on each graded piece from the eigenvalues of Y_1 + .. + Y_j.

    Returns (filtrations, eigensplittings): per variable j, a dict
    w -> Filtration on gr_w and w -> {k: Subspace} eigenspaces.
    """
    b = triple.backdrop
    js = triple.variables()
    filts, splits = {}, {}
    for j in js:
        filts[j], splits[j] = {}, {}
        for w in b.weights():
            d = b.grdim(w)
            acc = mat_zero(d, d, True)
            for jj in js:
                if jj <= j and (w, jj) in triple.data:
                    acc = mat_add(acc, triple.data[(w, jj)][1])
            eig = integer_eigendecomposition(acc, d)
            steps = {}
            cur = Subspace.zero(d, True)
            parts = {}
            for lam in sorted(eig):
                cur = cur.join(eig[lam])
                steps[lam + w] = cur
                parts[lam + w] = eig[lam]
            filts[j][w] = Filtration("inc", steps, d, True)
            splits[j][w] = parts
    return filts, splits


def sl2_validity_check(triple: Sl2Triple, f0: GradedPoint):
    """Filtration compatibility of the triple at the base point, plus a
    single interior probe of positivity.

    At the origin the lowering operator must shift the filtration down by
    one, the grading operator must preserve it, and the raising operator
    must shift it up; one interior point then controls the whole orbit.
    """
    b = triple.backdrop
    reasons = []
    for (w, j), (nm, y, np_) in triple.data.items():
        gp = f0.piece(w)
        lo, hi = gp.support()
        for p in range(lo, hi + 1):
            if not gp.at(p - 1).contains(gp.at(p).apply(nm)):
                reasons.append(("transversality", w, j, p))
            if not gp.at(p).contains(gp.at(p).apply(y)):
                reasons.append(("grading", w, j, p))
            if not gp.at(p + 1).contains(gp.at(p).apply(np_)):
                reasons.append(("raising", w, j, p))
    # probe: exp(i sum N_j) f0 should be a polarized point on each piece
    from .exactla import mat_exp_nilpotent
    for w in b.weights():
        d = b.grdim(w)
        acc = mat_zero(d, d, True)
        for j in triple.variables():
            if (w, j) in triple.data:
                acc = mat_add(acc, triple.data[(w, j)][0])
        probe = f0.piece(w).apply(mat_exp_nilpotent(mat_scale(EG_I, acc)))
        sub = pure_backdrop(b, w)
        try:
            ok, why = sub.is_in_D(probe)
        except Exception as exc:  # noqa: BLE001 - reported, not raised
            ok, why = False, [str(exc)]
        if not ok:
            reasons.append(("positivity", w, why))
    return (not reasons), reasons


def pure_backdrop(b: HodgeBackdrop, w) -> HodgeBackdrop:
    """The pure backdrop carried by gr^W_w."""
    d = b.grdim(w)
    W = Filtration("inc", {w: Subspace.full(d, True)}, d, True)
    h = {(p, q): v for (p, q), v in b.hodge_numbers.items() if p + q == w}
    reps = {w: [tuple(EG_ONE if i == j else EG_ZERO for i in range(d))
                for j in range(d)]}
    return HodgeBackdrop(d, W, {w: b.pairings[w]}, h, reps,
                         name=f"{b.name}:gr{w}")


def sl2_complete(N, Y):
    """The unique Np with [Y, Np] = 2 Np and [N, Np] = -Y."""
    n, _ = mat_shape(N)
    if not mat_is_zero(mat_sub(_bracket(Y, N), mat_scale(as_exact(-2), N))):
        raise NoSolution("[Y, N] != -2N")
    # unknowns: entries of Np; two linear conditions
    rows = []
    rhs = []
    def idx(i, j):
        return i * n + j
    # [Y, X] - 2X = 0
    for i in range(n):
        for j in range(n):
            row = [EG_ZERO] * (n * n)
            for k in range(n):
                row[idx(k, j)] = row[idx(k, j)] + Y[i][k]
                row[idx(i, k)] = row[idx(i, k)] - Y[k][j]
            row[idx(i, j)] = row[idx(i, j)] - as_exact(2)
            rows.append(row)
            rhs.append(EG_ZERO)
    # [N, X] + Y = 0
    for i in range(n):
        for j in range(n):
            row = [EG_ZERO] * (n * n)
            for k in range(n):
                row[idx(k, j)] = row[idx(k, j)] + N[i][k]
                row[idx(i, k)] = row[idx(i, k)] - N[k][j]
            rows.append(row)
            rhs.append(-Y[i][j])
    sol = _solve_affine(rows, rhs)
    if sol is None:
        raise NoSolution("no sl(2) completion")
    Np = tuple(tuple(sol[idx(i, j)] for j in range(n)) for i in range(n))
    if not mat_is_zero(mat_sub(_bracket(N, Np), mat_scale(as_exact(-1), Y))):
        raise NoSolution("completion does not close the triple")
    return Np


def _solve_affine(rows, rhs):
    """One exact solution x of rows . x = rhs (dense, small)."""
    from .exactla import _rref_rows
    m = len(rows)
    k = len(rows[0])
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]
    rr, pivots = _rref_rows(aug, k + 1, True, 0, limit_cols=k)
    x = [EG_ZERO] * k
    for ridx, p in enumerate(pivots):
        x[p] = rr[ridx][k]
    for ridx in range(len(pivots), len(rr)):
        if rr[ridx][k]:
            return None
    return x


# ---------------------------------------------------------------------------
# Borel-Serre splittings
# ---------------------------------------------------------------------------


def hodge_metric_gram(b: HodgeBackdrop, w, piece: Filtration):
    """Gram matrix of <C x, conj y>_w on gr_w, in the standard basis."""
    d = b.grdim(w)
    exact = piece.exact
    hodge = {}
    for (p, q), h in b.hodge_numbers.items():
        if p + q != w or h == 0:
            continue
        sub = piece.at(p).meet(piece.at(q).conj())
        if sub.dim != h:
            raise ValueError("point is not polarized on this graded piece")
        hodge[(p, q)] = sub
    basis = []
    scalars = []
    for (p, q), sub in sorted(hodge.items()):
        ipq = (EG_I ** ((p - q) % 4)) if exact else (1j ** ((p - q) % 4))
        for r in sub.rows:
            basis.append(r)
            scalars.append(ipq)
    B = tuple(zip(*basis))
    Binv = mat_inverse(B)
    n = d
    diag = [[(scalars[i] if i == j else (EG_ZERO if exact else 0j))
             for j in range(n)] for i in range(n)]
    C = mat_mul(B, mat_mul(diag, Binv))
    gram = []
    for i in range(d):
        ei = tuple((EG_ONE if exact else 1.0 + 0j) if t == i else
                   (EG_ZERO if exact else 0j) for t in range(d))
        Cei = mat_vec(C, ei)
        row = []
        for j in range(d):
            ej = tuple((EG_ONE if exact else 1.0 + 0j) if t == j else
                       (EG_ZERO if exact else 0j) for t in range(d))
            row.append(b.pairing_value(w, Cei, ej))
        gram.append(tuple(row))
    return tuple(gram)


def borel_serre_splitting(bpure: HodgeBackdrop, wprime: Filtration,
                          F: Filtration) -> WeightDecomposition:
    """The splitting of W' orthogonal for the Hodge metric at F.

    bpure must be pure; the grading pieces V_k = W'_k cap (W'_{k-1})^perp
    are mutually orthogonal for <C_F ., conj .>, which pins the
    Cartan-involution-fixed lift.
    """
    ws = bpure.weights()
    if len(ws) != 1:
        raise NotSplittable("Borel-Serre splitting needs a pure backdrop")
    w = ws[0]
    d = bpure.rank
    # graded dims must pair up symmetrically around w
    dims = {}
    lo, hi = wprime.support()
    for k in range(lo - 1, hi + 1):
        dd = wprime.at(k).dim - wprime.at(k - 1).dim
        if dd:
            dims[k] = dd
    for k, dd in dims.items():
        if dims.get(2 * w - k, 0) != dd:
            raise NotSplittable("filtration cannot come from a one "
                                "parameter subgroup of the pairing group")
    gram = hodge_metric_gram(bpure, w, F)
    exact = F.exact
    parts = {}
    prev = Subspace.zero(d, exact)
    for k in sorted(dims):
        cur = wprime.at(k)
        if not exact:
            cur = _tofl(cur)
        # orthogonal complement of prev inside cur, w.r.t. gram
        rows = []
        for v in cur.rows:
            gv = mat_vec(gram, v)
            rows.append(gv)
        # v in cur with <v, prev> = 0: solve on coefficients
        if prev.dim == 0:
            parts[k] = cur
        else:
            conds = []
            for pvec in prev.rows:
                conds.append(tuple(_dotc(mat_vec(gram, r), pvec)
                                   for r in cur.rows))
            from .exactla import _rref_rows
            m = len(cur.rows)
            rr, pivots = _rref_rows([list(c) for c in conds], m, exact, 1e-9)
            free = [j for j in range(m) if j not in pivots]
            vecs = []
            for fidx in free:
                coef = [EG_ZERO if exact else 0j] * m
                coef[fidx] = EG_ONE if exact else 1.0 + 0j
                for ridx, p in enumerate(pivots):
                    coef[p] = -rr[ridx][fidx]
                v = None
                for c, r in zip(coef, cur.rows):
                    t = tuple(c * x for x in r)
                    v = t if v is None else tuple(a + bb for a, bb in
                                                  zip(v, t))
                vecs.append(v)
            parts[k] = Subspace.span(vecs, d, exact=exact)
        prev = cur
    dec = WeightDecomposition(parts, d, exact)
    if not dec.splits(wprime if exact else wprime):
        raise NotSplittable("orthogonalization failed to split")
    return dec


def _dotc(u, v):
    """sum u_i conj(v_i)."""
    acc = None
    for x, y in zip(u, v):
        yc = y.conjugate() if isinstance(y, ExactGaussian) \
            else complex(y).conjugate()
        t = x * yc
        acc = t if acc is None else acc + t
    return acc


def _tofl(s: Subspace) -> Subspace:
    if not s.exact:
        return s
    if s.is_zero():
        return Subspace.zero(s.ambient, False)
    return Subspace.span([[complex(x) for x in r] for r in s.rows],
                         s.ambient, exact=False)


# ---------------------------------------------------------------------------
# orbit classes
# ---------------------------------------------------------------------------


class Sl2OrbitClass:
    """(family of weight filtrations, torus gradings, base point, J).

    grading blocks carry exponent tuples (theta_0, .., theta_n): the
    weights for tau_0 (the canonical splitting of W at r) through tau_n.
    """

    def __init__(self, backdrop, weight_filtrations, grading: JointGrading,
                 r: Filtration, J):
        self.backdrop = backdrop
        self.weight_filtrations = list(weight_filtrations)
        self.grading = grading
        self.r = r
        self.J = sorted(J)
        self.n = len(self.weight_filtrations)
        if grading.nvars != self.n + 1:
            raise ValueError("grading must carry tau_0 .. tau_n")
        for j, wf in enumerate(self.weight_filtrations, start=1):
            if grading.sub_filtration(j) != wf:
                raise ValueError(f"grading does not split W^({j})")

    @property
    def rank(self):
        return len(self.J)

    def torus_action(self, t):
        """tau(t) for t in (R_{>0})^n; multiplicative in t."""
        import numbers
        if len(t) != self.n:
            raise ValueError(f"need {self.n} torus parameters")
        exact = all(isinstance(x, ExactGaussian)
                    or isinstance(x, numbers.Rational) for x in t)
        one = EG_ONE if exact else 1.0
        full = (one,) + tuple(as_exact(x) if exact else complex(x).real
                              for x in t)
        scales = []
        for theta, _ in self.grading.blocks:
            acc = one if exact else 1.0 + 0j
            for j in range(1, self.n + 1):
                acc = acc * _int_power(full[j] if exact else
                                       complex(full[j]), theta[j], exact)
            scales.append(acc)
        return self.grading.scale_matrix(scales)

    def canonical_weight_splitting(self) -> WeightDecomposition:
        """The splitting of W induced by tau_0."""
        parts = {}
        for theta, sub in self.grading.blocks:
            w = theta[0]
            parts[w] = parts.get(w, Subspace.zero(self.backdrop.rank,
                                                  sub.exact)).join(sub)
        return WeightDecomposition(parts, self.backdrop.rank)

    def key_data(self):
        return (tuple(self.weight_filtrations), self.J)


def orbit_equivalent(a: Sl2OrbitClass, b: Sl2OrbitClass) -> bool:
    """Equality of classes: same torus data and same torus orbit of r.

    Membership of b.r in the torus orbit of a.r is solved on the grading
    eigencoordinates; torus parameters are recovered as exact rational
    roots when they exist.
    """
    if a.backdrop is not b.backdrop and \
            a.backdrop.to_json() != b.backdrop.to_json():
        raise RankMismatch("different backdrops")
    if a.n != b.n or a.J != b.J:
        return False
    if a.weight_filtrations != b.weight_filtrations:
        return False
    if a.grading != b.grading:
        return False
    if a.canonical_weight_splitting().parts != \
            b.canonical_weight_splitting().parts:
        return False
    t = _torus_membership(a, b.r)
    return t is not None


def _torus_membership(cls: Sl2OrbitClass, target: Filtration):
    """Find t > 0 with tau(t) cls.r = target, or None."""
    B = cls.grading.basis_matrix()
    Binv = mat_inverse(B)
    blocks = cls.grading.blocks
    nb = len(blocks)
    bidx = cls.grading.block_of_index()
    lo_a, hi_a = cls.r.support()
    lo_b, hi_b = target.support()
    lo, hi = min(lo_a, lo_b), max(hi_a, hi_b)
    eqs = []
    for p in range(lo, hi + 1):
        src = cls.r.at(p)
        dst = target.at(p)
        if src.dim != dst.dim:
            return None
        if dst.is_full() or dst.is_zero():
            continue
        dst_coords = [mat_vec(Binv, r) for r in dst.rows]
        comp_rows = _complement_functionals(dst_coords, cls.backdrop.rank)
        for v in src.rows:
            vv = mat_vec(Binv, v)
            for L in comp_rows:
                coeff = [EG_ZERO] * nb
                for i, (li, vi) in enumerate(zip(L, vv)):
                    coeff[bidx[i]] = coeff[bidx[i]] + li * vi
                if any(c for c in coeff):
                    eqs.append(coeff)
    # solve for positive block scales mu in the kernel
    mu = _positive_kernel_ray(eqs, nb)
    if mu is None:
        return None
    # mu realizable as monomials in t: prod_j t_j^{theta_j(block)}
    expo = [[blocks[i][0][j] for j in range(1, cls.n + 1)]
            for i in range(nb)]
    return _solve_monomials(expo, mu)


def _complement_functionals(rows, n):
    """Functionals cutting out the row span (coordinates of a complement)."""
    from .exactla import _rref_rows
    rr, pivots = _rref_rows([list(r) for r in rows], n, True, 0)
    out = []
    for j in range(n):
        if j not in pivots:
            # functional: x_j - sum pivot-row coefficients
            L = [EG_ZERO] * n
            L[j] = EG_ONE
            for ridx, p in enumerate(pivots):
                L[p] = -rr[ridx][j]
            out.append(tuple(L))
    return out


def _positive_kernel_ray(eqs, nb):
    """A positive real rational vector in the kernel of eqs, or None."""
    from .exactla import _rref_rows
    if not eqs:
        return [Fraction(1)] * nb
    real_eqs = []
    for row in eqs:
        real_eqs.append([as_exact(x).re for x in row])
        if any(as_exact(x).im for x in row):
            real_eqs.append([as_exact(x).im for x in row])
    rows = [[ExactGaussian(x) for x in r] for r in real_eqs]
    rr, pivots = _rref_rows(rows, nb, True, 0)
    free = [j for j in range(nb) if j not in pivots]
    if not free:
        return None
    # try single free variables first, then the all-ones combination
    candidates = []
    for f in free:
        v = [Fraction(0)] * nb
        v[f] = Fraction(1)
        for ridx, p in enumerate(pivots):
            v[p] = -Fraction(rr[ridx][f].re)
        candidates.append(v)
    combo = [sum(c[i] for c in candidates) for i in range(nb)]
    for v in candidates + [combo]:
        if all(x > 0 for x in v):
            return v
        if all(x < 0 for x in v):
            return [-x for x in v]
    return None


def _solve_monomials(expo, values):
    """Solve prod_j t_j^{expo[i][j]} = values[i] for positive rationals.

    Gaussian elimination on the exponent matrix over Q with exact rational
    root extraction.  Returns a tuple of Fractions or None.
    """
    m = len(expo)
    nv = len(expo[0]) if m else 0
    if nv == 0:
        return () if all(v == 1 for v in values) else None
    rows = [[Fraction(e) for e in r] + [values[i]]
            for i, r in enumerate(expo)]
    t = [None] * nv
    used = []
    for col in range(nv):
        piv = None
        for i, r in enumerate(rows):
            if i in used or r[col] == 0:
                continue
            if all(r[c] == 0 for c in range(col)):
                piv = i
                break
        if piv is None:
            continue
        used.append(piv)
        # normalize pivot row so the pivot exponent is 1
        p = rows[piv][col]
        base = _frac_root(rows[piv][nv], p)
        if base is None:
            return None
        rows[piv] = [x / p for x in rows[piv][:nv]] + [base]
        for i, r in enumerate(rows):
            if i == piv or r[col] == 0:
                continue
            f = r[col]
            val = r[nv] / _frac_power(base, f)
            rows[i] = [x - f * y for x, y in
                       zip(r[:nv], rows[piv][:nv])] + [val]
    # back-substitute: rows now triangular-ish; read off single-variable rows
    assign = {}
    for r in rows:
        nz = [c for c in range(nv) if r[c] != 0]
        if len(nz) == 1:
            c = nz[0]
            base = _frac_root(r[nv], r[c])
            if base is None:
                return None
            if c in assign and assign[c] != base:
                return None
            assign[c] = base
        elif not nz and r[nv] != 1:
            return None
    for c in range(nv):
        t[c] = assign.get(c, Fraction(1))
    # verify
    for r, v in zip(expo, values):
        acc = Fraction(1)
        for c in range(nv):
            acc *= _frac_power(t[c], Fraction(r[c]))
        if acc != v:
            return None
    if any(x <= 0 for x in t):
        return None
    return tuple(t)


def _frac_power(base: Fraction, e: Fraction):
    if e.denominator == 1:
        k = e.numerator
        return base ** k if k >= 0 else (Fraction(1) / base) ** (-k)
    root = _frac_root(base, Fraction(e.denominator))
    if root is None:
        raise ValueError("irrational power")
    return _frac_power(root, Fraction(e.numerator))


def _frac_root(x: Fraction, e: Fraction):
    """Exact solution t of t**e = x over positive rationals, or None."""
    if x <= 0:
        return None
    e = Fraction(e)
    if e < 0:
        x = Fraction(1) / x
        e = -e
    k = e.numerator
    # solve t^(k/d) = x  =>  t = (x^d)^(1/k)
    x = x ** e.denominator
    num = _int_root(x.numerator, k)
    den = _int_root(x.denominator, k)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_root(v: int, k: int):
    if v < 0:
        return None
    r = round(v ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** k == v:
            return c
    return None


# ---------------------------------------------------------------------------
# admissible sets of weight filtrations on gr^W
# ---------------------------------------------------------------------------


class AdmissibleSetOnGr:
    """Per weight ordered lists Phi(w) plus a compatible subset Phi of the
    product; the composition rules are the three matching conditions of the
    graded combinatorics."""

    def __init__(self, backdrop: HodgeBackdrop, per_weight, members):
        self.backdrop = backdrop
        self.per_weight = {w: list(fs) for w, fs in per_weight.items()}
        self.members = [dict(m) for m in members]

    def size(self):
        return len(self.members)


def admissible_compose(backdrop: HodgeBackdrop, per_weight, members):
    """Validate a candidate admissible set on gr^W.

    per_weight: w -> list of increasing filtrations on gr_w (each distinct
    from the trivial weight filtration), which must be strictly ordered by
    the variance of their weights.
    members: list of dicts w -> filtration or the marker "W".

    Returns (AdmissibleSetOnGr, None) or (None, reason).
    """
    # per-weight lists strictly ordered by variance
    order = {}
    for w, fs in per_weight.items():
        var_prev = None
        trivial_var = _trivial_variance(backdrop, w)
        for f in fs:
            _, var = weight_moments(f)
            if var_prev is not None and var <= var_prev:
                return None, ("order", w,
                              "per-weight list not strictly ordered by "
                              "variance")
            if var <= trivial_var:
                return None, ("order", w, "member does not exceed the "
                                          "trivial filtration")
            var_prev = var
        order[w] = {id(f): i for i, f in enumerate(fs)}

    def level(member, w):
        """Position of the member at weight w: -1 for the trivial marker."""
        v = member.get(w, "W")
        if isinstance(v, str):
            return -1
        for i, f in enumerate(per_weight.get(w, [])):
            if f == v:
                return i
        return None

    # (1) projections cover the per-weight lists
    for w, fs in per_weight.items():
        got = set()
        for m in members:
            lev = level(m, w)
            if lev is None:
                return None, ("membership", w, "member filtration not in "
                                               "the per-weight list")
            if lev >= 0:
                got.add(lev)
        if got != set(range(len(fs))):
            return None, ("surjectivity", w,
                          f"levels {sorted(got)} do not cover the list")
    # (2) no member is trivial everywhere
    for m in members:
        if all(level(m, w) == -1 for w in per_weight):
            return None, ("nontrivial", None, "member projects to the "
                                              "trivial filtration "
                                              "everywhere")
    # (3) total comparability
    for i, mi in enumerate(members):
        for mj in members[i + 1:]:
            le = all(level(mi, w) <= level(mj, w) for w in per_weight)
            ge = all(level(mi, w) >= level(mj, w) for w in per_weight)
            if not (le or ge):
                return None, ("comparability", None,
                              "two members are incomparable")
    return AdmissibleSetOnGr(backdrop, per_weight, members), None


def _trivial_variance(b: HodgeBackdrop, w):
    return Fraction(0)
