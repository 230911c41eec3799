"""Monodromy and relative monodromy filtrations, and validation of
nilpotent orbit generators.

The relative case builds a candidate by descending recursion over the
weight layers (peel the top layer, take monodromy filtrations of the pure
pieces, lift primitive vectors subject to power constraints) and then
verifies both axioms exactly.  Uniqueness of the relative monodromy
filtration makes verify-after-construct sound whatever the route.
"""

from __future__ import annotations

from fractions import Fraction

from .exactla import (
    EG_ONE,
    EG_ZERO,
    ExactGaussian,
    Subspace,
    mat_identity,
    mat_is_zero,
    mat_mul,
    mat_pow,
    mat_scale,
    mat_shape,
    mat_sub,
    mat_vec,
    solve_right,
)
from .hodgedata import Filtration, HodgeBackdrop, weight_moments


class NotNilpotent(ValueError):
    pass


class NotWCompatible(ValueError):
    pass


class Nonexistent:
    """Witness that no relative monodromy filtration exists."""

    def __init__(self, reason):
        self.reason = reason

    def __repr__(self):
        return f"Nonexistent({self.reason})"

    def __bool__(self):
        return False


def nilpotency_index(N):
    n, _ = mat_shape(N)
    P = mat_identity(n, _exactness(N))
    for k in range(n + 1):
        if mat_is_zero(P):
            return k
        P = mat_mul(P, N)
    raise NotNilpotent("matrix is not nilpotent")


def _exactness(N):
    return all(isinstance(x, (ExactGaussian,)) or isinstance(x, int)
               or isinstance(x, Fraction) for row in N for x in row)


def kernel_of_power(N, k) -> Subspace:
    n, _ = mat_shape(N)
    P = mat_pow(N, k)
    # kernel of P: solve P x = 0; use rref on P columns
    exact = _exactness(N)
    cols = tuple(zip(*P))
    # x in ker P  <=>  sum x_j col_j = 0; kernel = null space of P
    from .exactla import _rref_rows
    rows = [list(r) for r in P]
    rr, pivots = _rref_rows(rows, n, exact, 1e-9)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    zero = EG_ZERO if exact else 0j
    one = EG_ONE if exact else 1.0 + 0j
    for f in free:
        v = [zero] * n
        v[f] = one
        for ridx, p in enumerate(pivots):
            v[p] = -rr[ridx][f]
        basis.append(tuple(v))
    return Subspace(n, basis, exact) if basis else Subspace.zero(n, exact)


def image_of_power(N, k) -> Subspace:
    n, _ = mat_shape(N)
    exact = _exactness(N)
    if k <= 0:
        return Subspace.full(n, exact)
    P = mat_pow(N, k)
    return Subspace.full(n, exact).apply(P)


def pure_monodromy_filtration(N, w, dim=None) -> Filtration:
    """The weight filtration of a nilpotent endomorphism centered at w.

    M_k = sum_a ker(N^{a+1}) cap im(N^{max(a-(k-w), 0)}); both axioms are
    re-verified before returning.
    """
    n, _ = mat_shape(N)
    if dim is not None and dim != n:
        raise ValueError("dimension mismatch")
    idx = nilpotency_index(N)
    exact = _exactness(N)
    steps = {}
    for k in range(w - idx, w + idx + 1):
        acc = Subspace.zero(n, exact)
        for a in range(idx + 1):
            piece = kernel_of_power(N, a + 1).meet(
                image_of_power(N, max(a - (k - w), 0)))
            acc = acc.join(piece)
        steps[k] = acc
    M = Filtration("inc", steps, n, exact).normalized()
    _verify_pure(N, M, w)
    return M


def _verify_pure(N, M, w):
    lo, hi = M.support()
    for k in range(lo - 1, hi + 2):
        if not M.at(k - 2).contains(M.at(k).apply(N)):
            raise ValueError("monodromy filtration fails N M_k <= M_{k-2}")
    for k in range(0, hi - w + 2):
        dplus = M.at(w + k).dim - M.at(w + k - 1).dim
        dminus = M.at(w - k).dim - M.at(w - k - 1).dim
        if dplus != dminus:
            raise ValueError("graded dimensions are not symmetric")
        img = M.at(w + k).apply(mat_pow(N, k)).join(M.at(w - k - 1))
        if img != M.at(w - k).join(M.at(w - k - 1)):
            raise ValueError("N^k does not map gr isomorphically")


def _restriction(N, sub: Subspace):
    """Matrix of N on a subspace, in the basis given by its rows."""
    rows = sub.rows
    cols = []
    for r in rows:
        img = mat_vec(N, r)
        sol = solve_right(rows, img)
        if sol is None:
            raise NotWCompatible("operator does not preserve the subspace")
        cols.append(sol)
    return tuple(zip(*cols))


def _quotient_map(full_dim, sub: Subspace, exact):
    """Rows spanning a complement of sub, plus the projection solver."""
    comp = sub.complement_in(Subspace.full(full_dim, exact))
    solver = tuple(comp) + tuple(sub.rows)
    d = len(comp)

    def project(v):
        sol = solve_right(solver, v)
        if sol is None:
            raise ValueError("projection failed")
        return tuple(sol[:d])

    return comp, project, d


def relative_monodromy(N, W: Filtration):
    """The relative monodromy filtration M(N, W), or Nonexistent.

    The candidate is built recursively over the weight layers of W and
    then checked against both defining axioms.
    """
    n, _ = mat_shape(N)
    exact = _exactness(N)
    nilpotency_index(N)
    jumps = [w for w in _weights_of(W)]
    for w in jumps:
        if not W.at(w).contains(W.at(w).apply(N)):
            raise NotWCompatible("N does not preserve the filtration")
    cand = _relative_candidate(N, W, exact, refine=False)
    if not isinstance(cand, Nonexistent):
        witness = _verify_relative(N, W, cand)
        if witness is None:
            return cand
    # the cheap candidate failed; rebuild with the all powers refinement
    cand = _relative_candidate(N, W, exact, refine=True)
    if isinstance(cand, Nonexistent):
        return cand
    witness = _verify_relative(N, W, cand)
    if witness is not None:
        return Nonexistent(witness)
    return cand


def _weights_of(W: Filtration):
    out = []
    prev = 0
    lo, hi = W.support()
    for w in range(lo - 1, hi + 1):
        d = W.at(w).dim
        if d > prev:
            out.append(w)
        prev = d
    return out


def _relative_candidate(N, W, exact, refine=True):
    n, _ = mat_shape(N)
    weights = _weights_of(W)
    if not weights:
        return Filtration("inc", {0: Subspace.zero(n, exact)}, n, exact)
    if len(weights) == 1:
        return pure_monodromy_filtration(N, weights[0])

    b = weights[-1]
    A = W.at(b - 1)
    # recurse on the restriction to A
    NA = _restriction(N, A)
    WA = Filtration("inc",
                    {w: _subspace_in_coords(W.at(w), A) for w in weights[:-1]},
                    A.dim, exact)
    MA_small = relative_monodromy(NA, WA)
    if isinstance(MA_small, Nonexistent):
        return MA_small
    MA = _lift_filtration(MA_small, A)

    # quotient by A: pure of weight b
    comp, project, dq = _quotient_map(n, A, exact)
    NQ_cols = [project(mat_vec(N, c)) for c in comp]
    NQ = tuple(zip(*NQ_cols))
    MQ = pure_monodromy_filtration(NQ, b)
    idxQ = nilpotency_index(NQ)

    # primitive spaces of the quotient and their admissible lifts
    prims = {}
    for j in range(idxQ, -1, -1):
        kerj = kernel_of_power(NQ, j + 1).meet(MQ.at(b + j))
        lower = kernel_of_power(NQ, j + 1).meet(MQ.at(b + j - 1))
        rows = lower.complement_in(kerj)
        if rows:
            prims[j] = rows
    lifts = {}
    for j, rows in prims.items():
        # preimages x with N^{j+1} x inside the recursive filtration
        pre_rows = []
        for r in rows:
            amb = [EG_ZERO if exact else 0j] * n
            for cval, crow in zip(r, comp):
                amb = [a + cval * x for a, x in zip(amb, crow)]
            pre_rows.append(tuple(amb))
        base = Subspace(n, pre_rows + list(A.rows), exact)
        cond = _power_preimage(N, j + 1, MA.at(b - j - 2))
        lifts[j] = base.meet(cond)
        # each primitive class must actually lift
        if lifts[j].join(A).dim < len(rows) + A.dim:
            return Nonexistent(f"primitive classes at level {b}+{j} "
                               "do not admit admissible lifts")

    def assemble(L):
        steps = {}
        lo = weights[0] - n - 1
        hi = b + idxQ + 1
        for k in range(lo, hi + 1):
            acc = MA.at(k)
            for j, Lj in L.items():
                i0 = max(0, -((k - b - j) // 2) if (b + j - k) > 0 else 0)
                i0 = max(0, (b + j - k + 1) // 2)
                P = mat_pow(N, i0)
                img = Lj.apply(P)
                i = i0
                while True:
                    acc = acc.join(img)
                    i += 1
                    if img.is_zero() or i > n:
                        break
                    img = img.apply(N)
            steps[k] = acc
        return Filtration("inc", steps, n, exact).normalized()

    # all-powers refinement to a fixed point
    current = dict(lifts)
    rounds = (n + 1) if refine else 0
    for _ in range(rounds):
        M = assemble(current)
        refined = {}
        changed = False
        for j, Lj in current.items():
            newL = Lj
            P = N
            for i in range(1, nilpotency_index(N) + 1):
                cond = _power_preimage(N, i, M.at(b + j - 2 * i))
                newL = newL.meet(cond)
            if newL.dim != Lj.dim:
                changed = True
            refined[j] = newL
        current = refined
        if not changed:
            break
    for j, rows in prims.items():
        if current[j].join(A).dim < len(rows) + A.dim:
            return Nonexistent(f"admissible lifts at level {b}+{j} "
                               "collapsed during refinement")
    return assemble(current)


def _subspace_in_coords(sub: Subspace, frame: Subspace) -> Subspace:
    """Coordinates of a subspace of ``frame`` in the frame basis."""
    rows = []
    for r in sub.rows:
        sol = solve_right(frame.rows, r)
        if sol is None:
            raise ValueError("subspace does not sit inside the frame")
        rows.append(sol)
    return (Subspace(frame.dim, rows, sub.exact) if rows
            else Subspace.zero(frame.dim, sub.exact))


def _lift_filtration(filt: Filtration, frame: Subspace) -> Filtration:
    rows = frame.rows
    n = frame.ambient
    steps = {}
    for k, sub in filt.steps.items():
        lifted = []
        for r in sub.rows:
            amb = [EG_ZERO if frame.exact else 0j] * n
            for cval, crow in zip(r, rows):
                amb = [a + cval * x for a, x in zip(amb, crow)]
            lifted.append(tuple(amb))
        steps[k] = (Subspace(n, lifted, frame.exact) if lifted
                    else Subspace.zero(n, frame.exact))
    return Filtration("inc", steps, n, frame.exact)


def _power_preimage(N, k, target: Subspace) -> Subspace:
    """{x : N^k x in target}."""
    n, _ = mat_shape(N)
    exact = _exactness(N)
    P = mat_pow(N, k)
    # x with P x in target  <=>  rows of the combined kernel system
    if target.is_full():
        return Subspace.full(n, exact)
    # solve: P x = sum c_i t_i; equivalently [P | -T^t] kernel projected
    trows = list(target.rows)
    m = len(trows)
    rows = []
    for i in range(n):
        row = list(P[i]) + [-(t[i]) for t in trows]
        rows.append(row)
    # kernel of the (n) x (n+m) matrix, projected to the first n coords
    from .exactla import _rref_rows
    rr, pivots = _rref_rows([list(r) for r in rows], n + m, exact, 1e-9)
    free = [j for j in range(n + m) if j not in pivots]
    basis = []
    zero = EG_ZERO if exact else 0j
    one = EG_ONE if exact else 1.0 + 0j
    for f in free:
        v = [zero] * (n + m)
        v[f] = one
        for ridx, p in enumerate(pivots):
            v[p] = -rr[ridx][f]
        basis.append(tuple(v[:n]))
    return Subspace(n, basis, exact) if basis else Subspace.zero(n, exact)


def _verify_relative(N, W, M: Filtration):
    """None when both axioms hold, else a witness string."""
    lo, hi = M.support()
    for k in range(lo - 1, hi + 2):
        if not M.at(k - 2).contains(M.at(k).apply(N)):
            return f"N M_{k} is not inside M_{k-2}"
    for w in _weights_of(W):
        Ww, Wlow = W.at(w), W.at(w - 1)
        for k in range(0, hi - lo + 2):
            up = M.at(w + k).meet(Ww)
            dn = M.at(w - k).meet(Ww)
            up_lower = M.at(w + k - 1).meet(Ww).join(M.at(w + k).meet(Wlow))
            dn_lower = M.at(w - k - 1).meet(Ww).join(M.at(w - k).meet(Wlow))
            dim_up = up.dim - up_lower.dim
            dim_dn = dn.dim - dn_lower.dim
            if dim_up != dim_dn:
                return (f"graded dims differ at weight {w}, step {k}: "
                        f"{dim_up} vs {dim_dn}")
            img = up.apply(mat_pow(N, k)).join(dn_lower)
            if img != dn.join(dn_lower):
                return (f"N^{k} not an isomorphism on gr at weight {w}")
    return None


# ---------------------------------------------------------------------------
# nilpotent orbit validation
# ---------------------------------------------------------------------------


class NilpotentTuple:
    """Commuting nilpotents plus a filtration on a fixed backdrop."""

    def __init__(self, backdrop: HodgeBackdrop, nilpotents, F: Filtration):
        self.backdrop = backdrop
        self.nilpotents = [tuple(tuple(x) for x in N) for N in nilpotents]
        self.F = F

    @property
    def n(self):
        return len(self.nilpotents)

    def sum_n(self, upto=None, weights=None):
        from .exactla import mat_add, mat_zero
        n = self.backdrop.rank
        acc = mat_zero(n, n, True)
        for j, N in enumerate(self.nilpotents if upto is None
                              else self.nilpotents[:upto]):
            if weights is None:
                acc = mat_add(acc, N)
            else:
                acc = mat_add(acc, mat_scale(weights[j], N))
        return acc

    def to_json(self):
        from .exactla import scalar_json
        return {"N": [[[scalar_json(as_eg(x)) for x in row] for row in N]
                      for N in self.nilpotents],
                "F": self.F.to_json()}


def as_eg(x):
    from .exactla import as_exact
    return as_exact(x)


def in_lie_algebra(b: HodgeBackdrop, N) -> bool:
    """W-preservation plus infinitesimal pairing compatibility on gr."""
    for w in b.weights():
        Ww = b.weight.at(w)
        if not Ww.contains(Ww.apply(N)):
            return False
    for w in b.weights():
        d = b.grdim(w)
        reps = b.graded_reps[w]
        grN = []
        for r in reps:
            img = mat_vec(N, r)
            grN.append(b.gr_coords(w, img))
        # <gr N x, y> + <x, gr N y> = 0 on basis vectors
        for i in range(d):
            for j in range(d):
                ei = tuple(EG_ONE if t == i else EG_ZERO for t in range(d))
                ej = tuple(EG_ONE if t == j else EG_ZERO for t in range(d))
                v = b.pairing_value(w, grN[i], ej) \
                    + b.pairing_value(w, ei, grN[j])
                if v:
                    return False
    return True


def validate_nilpotent_orbit(t: NilpotentTuple, probe_y=(1000.0, 10000.0)):
    """Check the four conditions for generating a nilpotent orbit.

    Commutation, nilpotency, pairing membership and Griffiths
    transversality are exact; relative monodromy existence and
    y-independence are exact over subsets; positivity at large imaginary
    part is probed numerically at the supplied magnitudes.
    """
    b = t.backdrop
    report = {"conditions": {}, "probe_y": list(probe_y)}
    ok = True

    # (1) nilpotency and commutation
    c1 = True
    try:
        for N in t.nilpotents:
            nilpotency_index(N)
    except NotNilpotent:
        c1 = False
    for a in range(t.n):
        for c in range(a + 1, t.n):
            lhs = mat_mul(t.nilpotents[a], t.nilpotents[c])
            rhs = mat_mul(t.nilpotents[c], t.nilpotents[a])
            if not mat_is_zero(mat_sub(lhs, rhs)):
                c1 = False
    for N in t.nilpotents:
        if not in_lie_algebra(b, N):
            c1 = False
    report["conditions"]["commuting_nilpotent"] = c1
    ok = ok and c1

    # (3) Griffiths transversality
    c3 = True
    lo, hi = t.F.support()
    for N in t.nilpotents:
        for p in range(lo, hi + 1):
            if not t.F.at(p - 1).contains(t.F.at(p).apply(N)):
                c3 = False
    report["conditions"]["transversality"] = c3
    ok = ok and c3

    # (4) relative monodromy existence and y-independence over subsets
    c4 = True
    details = []
    import itertools
    for rsize in range(1, t.n + 1):
        for subset in itertools.combinations(range(t.n), rsize):
            weights_a = {j: 1 for j in subset}
            weights_b = {j: [1, 2, 3, 5, 7][i % 5] + 1
                         for i, j in enumerate(subset)}
            Na = t.sum_n(weights=[weights_a.get(j, 0) for j in range(t.n)])
            Nb = t.sum_n(weights=[weights_b.get(j, 0) for j in range(t.n)])
            Ma = relative_monodromy(Na, b.weight)
            Mb = relative_monodromy(Nb, b.weight)
            if isinstance(Ma, Nonexistent) or isinstance(Mb, Nonexistent):
                c4 = False
                details.append((subset, "nonexistent"))
            elif Ma != Mb:
                c4 = False
                details.append((subset, "depends on y"))
    report["conditions"]["relative_monodromy"] = c4
    if details:
        report["conditions"]["relative_monodromy_detail"] = details
    ok = ok and c4

    # (2) membership at large imaginary part, numerically
    c2 = True
    import numpy as np
    from .exactla import mat_exp_nilpotent
    Ff = t.F.to_float()
    for y in probe_y:
        acc = None
        for N in t.nilpotents:
            Nf = tuple(tuple(complex(x) * 1j * y for x in row) for row in N)
            acc = Nf if acc is None else tuple(
                tuple(p + q for p, q in zip(r1, r2))
                for r1, r2 in zip(acc, Nf))
        E = mat_exp_nilpotent(acc) if acc is not None else None
        probe = Ff.apply(E) if E is not None else Ff
        try:
            good, reasons = b.is_in_D(probe)
        except Exception:
            good = False
        if not good:
            c2 = False
    report["conditions"]["positivity_at_large_y"] = c2
    ok = ok and c2

    report["pass"] = ok
    return report
