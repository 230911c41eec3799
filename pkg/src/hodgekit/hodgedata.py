"""Backdrops, filtrations, graded quotients and classifying space membership.

A backdrop fixes once and for all the ambient lattice rank, the rational
weight filtration W, a nondegenerate pairing on each graded quotient
gr^W_w (symmetric for even w, antisymmetric for odd w) and the Hodge
numbers.  Every other computation in the package is relative to one.
"""

from __future__ import annotations

from fractions import Fraction

from .exactla import (
    COMPARE_TOL,
    EG_I,
    EG_ONE,
    EG_ZERO,
    AmbientMismatch,
    ExactGaussian,
    Subspace,
    as_exact,
    coerce_matrix,
    coerce_vector,
    entry_is_zero,
    infer_exact,
    mat_identity,
    mat_vec,
    scalar_from_json,
    scalar_json,
    solve_right,
)

import numpy as np


class NotInCheckD(ValueError):
    """Filtration fails the dimension or isotropy conditions."""


class ZeroSpace(ValueError):
    """Weight statistics of the zero space are undefined."""


class Filtration:
    """An increasing or decreasing chain of subspaces, stored by its jumps.

    The value at an index between jumps is the nearest stored step: for an
    increasing filtration the largest stored index <= k (zero below all
    steps), for a decreasing one the smallest stored index >= k (zero above
    all steps).  Exhaustive filtrations therefore store the full space at
    their extreme jump.
    """

    __slots__ = ("direction", "steps", "ambient", "exact", "_cache")

    def __init__(self, direction, steps, ambient=None, exact=None,
                 check=True):
        if direction not in ("inc", "dec"):
            raise ValueError("direction must be 'inc' or 'dec'")
        self.direction = direction
        self.steps = dict(sorted(steps.items()))
        self._cache = {}
        spaces = list(self.steps.values())
        if not spaces and ambient is None:
            raise ValueError("empty filtration needs an ambient dimension")
        self.ambient = ambient if ambient is not None else spaces[0].ambient
        self.exact = exact if exact is not None else (
            spaces[0].exact if spaces else True)
        if check:
            self._validate()

    def _validate(self):
        prev = None
        for k, sub in self.steps.items():
            if sub.ambient != self.ambient:
                raise AmbientMismatch("step ambient differs")
            if prev is not None:
                lo, hi = (prev, sub) if self.direction == "inc" else (sub, prev)
                if not hi.contains(lo):
                    raise ValueError(f"filtration not monotone at index {k}")
            prev = sub

    def at(self, k) -> Subspace:
        hit = self._cache.get(("at", k))
        if hit is not None:
            return hit
        keys = self._cache.get("keys")
        if keys is None:
            keys = list(self.steps.keys())
            self._cache["keys"] = keys
        best = None
        if self.direction == "inc":
            for j in keys:
                if j <= k:
                    best = j
                else:
                    break
        else:
            for j in reversed(keys):
                if j >= k:
                    best = j
                else:
                    break
        out = self.steps[best] if best is not None else \
            Subspace.zero(self.ambient, self.exact)
        self._cache[("at", k)] = out
        return out

    def jumps(self):
        """Indices where the filtration actually changes."""
        out = []
        prev_dim = None
        keys = list(self.steps.keys())
        it = keys if self.direction == "inc" else keys
        for k in it:
            d = self.steps[k].dim
            if d != prev_dim:
                out.append(k)
                prev_dim = d
        return out

    def support(self):
        """Index range [lo, hi] outside of which the filtration is constant."""
        keys = list(self.steps.keys())
        return (keys[0], keys[-1]) if keys else (0, 0)

    def normalized(self):
        """Drop redundant steps.

        The step kept from a run of equal values is the one the accessor
        reads: the smallest index for increasing filtrations, the largest
        for decreasing ones.
        """
        keys = list(self.steps.keys())
        out = {}
        if self.direction == "inc":
            prev = None
            for k in keys:
                if prev is None or self.steps[k] != prev:
                    out[k] = self.steps[k]
                prev = self.steps[k]
        else:
            prev = None
            for k in reversed(keys):
                if prev is None or self.steps[k] != prev:
                    out[k] = self.steps[k]
                prev = self.steps[k]
        return Filtration(self.direction, out, self.ambient, self.exact,
                          check=False)

    def __eq__(self, other):
        if not isinstance(other, Filtration):
            return NotImplemented
        if (self.direction, self.ambient) != (other.direction, other.ambient):
            return False
        lo = min(self.support()[0], other.support()[0]) - 1
        hi = max(self.support()[1], other.support()[1]) + 1
        return all(self.at(k) == other.at(k) for k in range(lo, hi + 1))

    def __repr__(self):
        dims = {k: s.dim for k, s in self.steps.items()}
        return f"Filtration({self.direction}, dims {dims})"

    def apply(self, matrix):
        # linear maps preserve the nesting, so skip revalidation
        return Filtration(self.direction,
                          {k: s.apply(matrix) for k, s in self.steps.items()},
                          None, None, check=False)

    def conj(self):
        return Filtration(self.direction,
                          {k: s.conj() for k, s in self.steps.items()},
                          self.ambient, self.exact)

    def to_float(self):
        steps = {k: Subspace.span([[complex(x) for x in r] for r in s.rows],
                                  self.ambient, exact=False)
                 if s.rows else Subspace.zero(self.ambient, False)
                 for k, s in self.steps.items()}
        return Filtration(self.direction, steps, self.ambient, False)

    def to_json(self):
        return {"direction": self.direction, "ambient": self.ambient,
                "steps": {str(k): s.to_json() for k, s in self.steps.items()}}

    @staticmethod
    def from_json(obj):
        steps = {int(k): Subspace.from_json(v)
                 for k, v in obj["steps"].items()}
        return Filtration(obj["direction"], steps, obj["ambient"])


def weight_moments(f: Filtration):
    """Mean and variance of the weights of an increasing filtration.

    mu = sum dim(gr_w) * w / dim E and sigma^2 = sum dim(gr_w)(w-mu)^2 / dim E.
    """
    if f.direction != "inc":
        raise ValueError("weight moments are for increasing filtrations")
    lo, hi = f.support()
    total = f.at(hi).dim
    if total == 0:
        raise ZeroSpace("weight moments of the zero space")
    dims = {}
    prev = 0
    for k in range(lo - 1, hi + 1):
        d = f.at(k).dim
        if d > prev:
            dims[k] = d - prev
        prev = d
    mu = sum(Fraction(d * w) for w, d in dims.items()) / total
    var = sum(d * (w - mu) ** 2 for w, d in dims.items()) / total
    return mu, var


class WeightDecomposition:
    """A direct sum decomposition H = (+)_w V_w splitting a filtration.

    This is the coordinate-free form of a splitting: the filtration it
    splits is recovered as W'_k = (+)_{w<=k} V_w.
    """

    __slots__ = ("ambient", "parts", "exact")

    def __init__(self, parts, ambient=None, exact=None):
        self.parts = {w: s for w, s in sorted(parts.items()) if s.dim > 0}
        some = next(iter(self.parts.values()), None)
        self.ambient = ambient if ambient is not None else some.ambient
        self.exact = exact if exact is not None else (
            some.exact if some else True)
        total = sum(s.dim for s in self.parts.values())
        if total != self.ambient:
            raise ValueError("parts do not sum to the ambient dimension")

    def weights(self):
        return list(self.parts.keys())

    def filtration(self) -> Filtration:
        steps = {}
        acc = Subspace.zero(self.ambient, self.exact)
        for w in self.weights():
            acc = acc.join(self.parts[w])
            steps[w] = acc
        return Filtration("inc", steps, self.ambient, self.exact)

    def basis_matrix(self):
        """Columns: the part bases in increasing weight order."""
        cols = []
        for w in self.weights():
            cols.extend(self.parts[w].rows)
        return tuple(zip(*cols))

    def projectors(self):
        """Weight -> matrix of the projection onto V_w along the others."""
        from .exactla import mat_inverse, mat_mul
        B = self.basis_matrix()
        Binv = mat_inverse(B)
        out = {}
        idx = 0
        n = self.ambient
        exact = self.exact
        for w in self.weights():
            d = self.parts[w].dim
            sel = [[(EG_ONE if exact else 1.0) if (i == j and idx <= i < idx + d)
                    else (EG_ZERO if exact else 0.0) for j in range(n)]
                   for i in range(n)]
            out[w] = mat_mul(B, mat_mul(sel, Binv))
            idx += d
        return out

    def grading_matrix(self, scales):
        """Matrix acting on V_w by the scalar scales[w]."""
        from .exactla import mat_add, mat_scale, mat_zero
        out = mat_zero(self.ambient, self.ambient, self.exact)
        for w, proj in self.projectors().items():
            out = mat_add(out, mat_scale(scales[w], proj))
        return out

    def splits(self, filt: Filtration, tol=COMPARE_TOL) -> bool:
        acc = Subspace.zero(self.ambient, self.exact)
        for w in self.weights():
            acc = acc.join(self.parts[w])
            if not (filt.at(w).contains(acc, tol)
                    and acc.contains(filt.at(w), tol)):
                return False
        return True


class HodgeBackdrop:
    """The fixed datum (H_0, W, pairings, Hodge numbers).

    graded_reps[w] lists vectors of H_0 whose classes form the chosen basis
    of gr^W_w; all graded computations are expressed in these bases so
    values match the usual basis conventions bit for bit.
    """

    def __init__(self, rank, weight_filtration, pairings, hodge_numbers,
                 graded_reps=None, name=""):
        self.rank = rank
        self.weight = weight_filtration
        self.name = name
        if self.weight.direction != "inc":
            raise ValueError("weight filtration must be increasing")
        self.hodge_numbers = {k: v for k, v in hodge_numbers.items() if v}
        if sum(self.hodge_numbers.values()) != rank:
            raise ValueError("Hodge numbers do not sum to the rank")
        for (p, q), h in self.hodge_numbers.items():
            if self.hodge_numbers.get((q, p), 0) != h:
                raise ValueError("Hodge numbers are not symmetric")
        if graded_reps is None:
            graded_reps = self._default_reps()
        self.graded_reps = {w: [coerce_vector(v, True) for v in vs]
                            for w, vs in graded_reps.items() if vs}
        self.pairings = {w: coerce_matrix(m, True)
                         for w, m in pairings.items()}
        self._gr_solvers = {}
        self._validate()

    # -- construction helpers -------------------------------------------------

    def _default_reps(self):
        reps = {}
        prev = Subspace.zero(self.rank, True)
        for w in self.weights():
            cur = self.weight.at(w)
            reps[w] = [tuple(r) for r in prev.complement_in(cur)] \
                if prev.dim else [tuple(r) for r in cur.rows]
            prev = cur
        return reps

    def _validate(self):
        for w in self.weights():
            d = self.grdim(w)
            if len(self.graded_reps.get(w, [])) != d:
                raise ValueError(f"graded reps at weight {w} have wrong size")
            hsum = sum(h for (p, q), h in self.hodge_numbers.items()
                       if p + q == w)
            if hsum != d:
                raise ValueError(f"Hodge numbers at weight {w} sum to {hsum}, "
                                 f"expected {d}")
            m = self.pairings.get(w)
            if m is None or len(m) != d:
                raise ValueError(f"missing or misshapen pairing at weight {w}")
            sign = EG_ONE if w % 2 == 0 else -EG_ONE
            for i in range(d):
                for j in range(d):
                    if m[i][j] != sign * m[j][i]:
                        raise ValueError(f"pairing at weight {w} has wrong "
                                         "symmetry")
            from .exactla import mat_inverse
            mat_inverse(m)  # raises if degenerate

    # -- weight structure ------------------------------------------------------

    def weights(self):
        out = []
        prev = 0
        for k in self.weight.jumps():
            d = self.weight.at(k).dim
            if d > prev:
                out.append(k)
                prev = d
        return out

    def grdim(self, w):
        return self.weight.at(w).dim - self.weight.at(w - 1).dim

    def _solver(self, w):
        """Row stack [reps of gr_w ; basis of W_{w-1}] used for projection."""
        if w not in self._gr_solvers:
            reps = self.graded_reps.get(w, [])
            lower = list(self.weight.at(w - 1).rows)
            self._gr_solvers[w] = (tuple(reps) + tuple(lower), len(reps))
        return self._gr_solvers[w]

    def gr_coords(self, w, v):
        """Class of v in gr^W_w, in the chosen basis.  v must lie in W_w."""
        rows, nrep = self._solver(w)
        exact = infer_exact(list(v))
        if exact:
            vv = coerce_vector(v, True)
            sol = solve_right(rows, vv)
        else:
            vv = coerce_vector(v, False)
            sol = solve_right([[complex(x) for x in r] for r in rows], vv)
        if sol is None:
            raise ValueError(f"vector is not in W_{w}")
        return tuple(sol[:nrep])

    def lift_gr(self, w, coords):
        """The chosen representative of a gr^W_w class."""
        reps = self.graded_reps.get(w, [])
        exact = infer_exact(list(coords))
        n = self.rank
        zero = EG_ZERO if exact else 0j
        out = [zero] * n
        for c, r in zip(coords, reps):
            rr = r if exact else tuple(complex(x) for x in r)
            out = [o + c * x for o, x in zip(out, rr)]
        return tuple(out)

    def graded_subspace(self, w, sub: Subspace, expected_dim=None) -> Subspace:
        """Image of a subspace of W_w in gr^W_w coordinates.

        In float mode an ``expected_dim`` (known from exact dimension
        arithmetic) overrides the tolerance based rank decision.
        """
        d = self.grdim(w)
        if sub.is_zero():
            return Subspace.zero(d, sub.exact)
        rows = [self.gr_coords(w, r) for r in sub.rows]
        if sub.exact or expected_dim is None:
            return Subspace(d, rows, sub.exact)
        if expected_dim == 0:
            return Subspace.zero(d, False)
        a = np.array(rows, dtype=complex)
        norms = np.linalg.norm(a, axis=1)
        keep = norms > 0
        if not keep.any():
            return Subspace.zero(d, False)
        a = a[keep] / norms[keep, None]
        _, sv, vh = np.linalg.svd(a)
        take = min(expected_dim, vh.shape[0])
        return Subspace(d, [tuple(vh[i]) for i in range(take)], False,
                        _canonical=True)

    def graded_piece(self, f: Filtration, w) -> Filtration:
        """Induced filtration (F^p cap W_w + W_{w-1})/W_{w-1} on gr^W_w."""
        d = self.grdim(w)
        if d == 0:
            return Filtration("dec", {}, 0, f.exact)
        key = ("gr", id(self), w)
        cached = f._cache.get(key)
        if cached is None:
            cached = self._graded_piece_inner(f, w, d)
            f._cache[key] = cached
        return cached

    def _graded_piece_inner(self, f, w, d):
        Ww = self.weight.at(w)
        Wlow = self.weight.at(w - 1)
        if not f.exact:
            Ww = _float_sub(Ww)
            Wlow = _float_sub(Wlow)
        lo, hi = f.support()
        steps = {}
        for p in range(lo, hi + 1):
            inter = f.at(p).meet(Ww)
            joined = inter.join(Wlow)
            expected = None if f.exact else joined.dim - Wlow.dim
            steps[p] = self.graded_subspace(w, joined, expected)
        return Filtration("dec", steps, d, f.exact,
                          check=False).normalized()

    def pairing_value(self, w, x, y):
        """<x, y>_w for gr^W_w coordinate vectors."""
        m = self.pairings[w]
        exact = infer_exact(list(x) + list(y))
        mm = m if exact else [[complex(e) for e in r] for r in m]
        acc = None
        for i, xi in enumerate(x):
            row = mm[i]
            for j, yj in enumerate(y):
                t = xi * row[j] * yj
                acc = t if acc is None else acc + t
        return acc

    # -- membership --------------------------------------------------------------

    def is_in_check_D(self, f: Filtration):
        """Dimension profile plus isotropy of the graded pairing.

        Returns (bool, reasons).  Reasons list each failing (p, q, w).
        """
        reasons = []
        for w in self.weights():
            gp = self.graded_piece(f, w)
            for (p, q), h in sorted(self.hodge_numbers.items()):
                if p + q != w:
                    continue
                got = gp.at(p).dim - gp.at(p + 1).dim
                if got != h:
                    reasons.append(("dimension", p, q, w, got, h))
            # extra filters beyond those listed in the Hodge numbers
            declared = sorted(p for (p, q) in self.hodge_numbers if p + q == w)
            if declared:
                if gp.at(declared[0]).dim != self.grdim(w):
                    reasons.append(("dimension", declared[0], w - declared[0],
                                    w, gp.at(declared[0]).dim, self.grdim(w)))
                if gp.at(declared[-1] + 1).dim != 0:
                    reasons.append(("dimension", declared[-1] + 1,
                                    w - declared[-1] - 1, w,
                                    gp.at(declared[-1] + 1).dim, 0))
            lo, hi = gp.support()
            iso_tol = COMPARE_TOL if f.exact else 1e-8
            for p in range(lo, hi + 2):
                q = w + 1 - p
                a, b = gp.at(p), gp.at(q)
                bad = False
                for x in a.rows:
                    for y in b.rows:
                        v = self.pairing_value(w, x, y)
                        if not entry_is_zero(v, iso_tol):
                            bad = True
                if bad:
                    reasons.append(("isotropy", p, q, w))
        return (not reasons), reasons

    def is_in_D(self, f: Filtration):
        """check_D membership plus positivity of i^{p-q} <x, conj x>_w.

        Returns (bool, reasons); raises NotInCheckD when check_D fails.
        """
        ok, reasons = self.is_in_check_D(f)
        if not ok:
            raise NotInCheckD(f"not in the flag closure: {reasons}")
        bad = []
        for w in self.weights():
            gp = self.graded_piece(f, w)
            for (p, q), h in sorted(self.hodge_numbers.items()):
                if p + q != w or h == 0:
                    continue
                hpq = hodge_piece(gp, p, q)
                if hpq.dim != h:
                    bad.append(("hodge-dim", p, q, w, hpq.dim, h))
                    continue
                if not self._positive_definite(w, p, q, hpq):
                    bad.append(("positivity", p, q, w))
        return (not bad), bad

    def _positive_definite(self, w, p, q, sub: Subspace):
        ipq = EG_I ** ((p - q) % 4) if sub.exact else 1j ** ((p - q) % 4)
        n = sub.dim
        gram = [[ipq * self.pairing_value(w, sub.rows[i],
                                          tuple(_c(x) for x in sub.rows[j]))
                 for j in range(n)] for i in range(n)]
        if sub.exact:
            # Hermitian with rational leading minors; Sylvester criterion
            for i in range(n):
                for j in range(n):
                    if gram[i][j] != gram[j][i].conjugate():
                        return False
            minor = _leading_minors_exact(gram)
            return all(m > 0 for m in minor)
        a = np.array([[complex(x) for x in row] for row in gram])
        if np.abs(a - a.conj().T).max() > 1e-8 * max(1.0, np.abs(a).max()):
            return False
        return bool(np.linalg.eigvalsh((a + a.conj().T) / 2).min()
                    > COMPARE_TOL)

    def to_json(self):
        return {
            "rank": self.rank,
            "weight_steps": [{"k": k, "basis": [[scalar_json(x) for x in r]
                                                for r in s.rows]}
                             for k, s in self.weight.steps.items()],
            "pairings": {str(w): [[scalar_json(x) for x in row] for row in m]
                         for w, m in self.pairings.items()},
            "hodge_numbers": {f"{p},{q}": h
                              for (p, q), h in self.hodge_numbers.items()},
            "graded_reps": {str(w): [[scalar_json(x) for x in v] for v in vs]
                            for w, vs in self.graded_reps.items()},
            "name": self.name,
        }

    @staticmethod
    def from_json(obj):
        rank = obj["rank"]
        steps = {}
        for st in obj["weight_steps"]:
            rows = [[scalar_from_json(x) for x in r] for r in st["basis"]]
            steps[st["k"]] = (Subspace(rank, rows, True) if rows
                              else Subspace.zero(rank, True))
        weight = Filtration("inc", steps, rank, True)
        pairings = {int(w): [[scalar_from_json(x) for x in row] for row in m]
                    for w, m in obj["pairings"].items()}
        hodge = {}
        for key, h in obj["hodge_numbers"].items():
            p, q = key.split(",")
            hodge[(int(p), int(q))] = h
        reps = {int(w): [[scalar_from_json(x) for x in v] for v in vs]
                for w, vs in obj.get("graded_reps", {}).items()} or None
        return HodgeBackdrop(rank, weight, pairings, hodge, reps,
                             obj.get("name", ""))


def _c(x):
    return x.conjugate() if isinstance(x, ExactGaussian) else complex(x).conjugate()


def _float_sub(s: Subspace) -> Subspace:
    if not s.exact:
        return s
    if s.is_zero():
        return Subspace.zero(s.ambient, False)
    return Subspace.span([[complex(x) for x in r] for r in s.rows],
                         s.ambient, exact=False)


def _leading_minors_exact(gram):
    """Leading principal minors of a Hermitian Q(i) matrix, as rationals."""
    out = []
    n = len(gram)
    for k in range(1, n + 1):
        sub = [[gram[i][j] for j in range(k)] for i in range(k)]
        det = _det_exact(sub)
        if det.im != 0:
            raise ValueError("Hermitian minor should be real")
        out.append(det.re)
    return out


def _det_exact(m):
    n = len(m)
    if n == 0:
        return EG_ONE
    m = [list(r) for r in m]
    det = EG_ONE
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][c]:
                piv = r
                break
        if piv is None:
            return EG_ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        inv = EG_ONE / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def hodge_piece(gp: Filtration, p, q) -> Subspace:
    """F^p cap conj(F^q) of a graded filtration, cached per instance."""
    key = ("hpq", p, q)
    out = gp._cache.get(key)
    if out is None:
        out = gp.at(p).meet(gp.at(q).conj())
        gp._cache[key] = out
    return out
