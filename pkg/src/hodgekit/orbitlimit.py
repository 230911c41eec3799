"""From nilpotent orbits to SL(2)-orbit classes.

The map psi is computed by the finite chain of R-split reductions (never by
numerical limits): relative monodromy filtrations W^(j), associated R-split
structures Fhat_(j), their splittings s^(j), the commuting gradings
tau_0 .. tau_n, the weight zero components Nhat_j, the base point
r_1 = exp(i N_k) Fhat_(k) and the index set J.  Numerical limit probes ship
separately as an independent check of the convergence statements.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exactla import (
    EG_I,
    EG_ONE,
    EG_ZERO,
    ExactGaussian,
    Subspace,
    as_exact,
    mat_add,
    mat_eq,
    mat_exp_nilpotent,
    mat_identity,
    mat_inverse,
    mat_is_zero,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_vec,
    mat_zero,
)
from .hodgedata import Filtration, HodgeBackdrop, WeightDecomposition
from .relmono import NilpotentTuple, Nonexistent, relative_monodromy
from .sl2orbit import JointGrading, Sl2OrbitClass, \
    joint_grading_from_decompositions
from .splitcore import NotMHS, canonical_splitting, decompose_mhs


class ChainBreak(ValueError):
    """Some stage of the reduction chain is not a mixed Hodge structure."""

    def __init__(self, stage, reason=""):
        self.stage = stage
        super().__init__(f"chain breaks at stage {stage}: {reason}")


class NonRationalWeightFiltration(ValueError):
    pass


class NotInImage(ValueError):
    """The class does not come from any nilpotent orbit."""


class OrbitChain:
    """All data of the finite reduction chain of a nilpotent tuple."""

    def __init__(self, tup, wfilts, fhats, splittings, grading, k):
        self.tuple = tup
        self.wfilts = wfilts          # list, W^(0) .. W^(n)
        self.fhats = fhats            # dict j -> Fhat_(j)
        self.splittings = splittings  # list, s^(0) .. s^(n)
        self.grading = grading        # JointGrading with n+1 coordinates
        self.k = k

    @property
    def n(self):
        return self.tuple.n

    def r1(self) -> Filtration:
        t = self.tuple
        if self.k == self.n + 1:
            return t.F
        Nk = t.nilpotents[self.k - 1]
        return self.fhats[self.k].apply(
            mat_exp_nilpotent(mat_scale(EG_I, Nk)))


def build_chain(t: NilpotentTuple) -> OrbitChain:
    """W^(j), Fhat_(j), s^(j) and the joint grading, built top down."""
    b = t.backdrop
    n = t.n
    wfilts = [b.weight]
    for j in range(1, n + 1):
        M = relative_monodromy(t.sum_n(upto=j), b.weight)
        if isinstance(M, Nonexistent):
            raise ChainBreak(j, M.reason)
        wfilts.append(M)

    fhats = {}
    splittings = [None] * (n + 1)
    current = t.F
    for j in range(n, -1, -1):
        reps = b.graded_reps if j == 0 else None
        try:
            dec = decompose_mhs(wfilts[j], current, reps=reps)
            fhats[j] = dec.F_canonical()
            splittings[j] = dec.canonical_weight_decomposition()
        except NotMHS as exc:
            raise ChainBreak(j, str(exc)) from exc
        if j > 0:
            Nj = t.nilpotents[j - 1]
            current = fhats[j].apply(
                mat_exp_nilpotent(mat_scale(EG_I, Nj)))
    try:
        grading = joint_grading_from_decompositions(splittings)
    except ValueError as exc:
        raise ChainBreak("grading", str(exc)) from exc
    k = n + 1
    for j in range(1, n + 1):
        if not mat_is_zero(t.nilpotents[j - 1]):
            k = j
            break
    chain = OrbitChain(t, wfilts, fhats, splittings, grading, k)
    _assert_chain(chain)
    return chain


def _assert_chain(chain: OrbitChain):
    """R-splitness of every stage, re-checked from the output."""
    t = chain.tuple
    for j in range(chain.n, -1, -1):
        dec = decompose_mhs(chain.wfilts[j], chain.fhats[j])
        if not dec.delta_is_zero():
            raise ChainBreak(j, "stage is not R-split")


def hat_operators(chain: OrbitChain):
    """(Nhat_1..n, Ndelta_1..n) from the weight zero graded components.

    Nhat_j keeps the components of N_j of weight zero for the gradings
    tau_0 .. tau_{j-1}; Ndelta_j for tau_1 .. tau_{j-1}.  The commutation
    identities are asserted before returning.
    """
    t = chain.tuple
    hats, deltas = [], []
    for j in range(1, chain.n + 1):
        N = t.nilpotents[j - 1]
        hats.append(_component_keep(chain.grading, N, list(range(0, j))))
        deltas.append(_component_keep(chain.grading, N, list(range(1, j))))
        nprime = _component_keep(chain.grading, N, [j - 1])
        if not mat_eq(hats[-1], nprime):
            raise AssertionError(
                f"the two descriptions of Nhat_{j} disagree")
    for j in range(chain.n):
        for k in range(j + 1, chain.n):
            a = mat_mul(t.nilpotents[j], hats[k])
            bm = mat_mul(hats[k], t.nilpotents[j])
            if not mat_eq(a, bm):
                raise AssertionError(f"N_{j+1} and Nhat_{k+1} do not commute")
    for a in range(chain.n):
        for c in range(a + 1, chain.n):
            if not mat_eq(mat_mul(hats[a], hats[c]),
                          mat_mul(hats[c], hats[a])):
                raise AssertionError("hat operators do not commute")
            if not mat_eq(mat_mul(deltas[a], deltas[c]),
                          mat_mul(deltas[c], deltas[a])):
                raise AssertionError("delta operators do not commute")
    return hats, deltas


def _component_keep(grading: JointGrading, N, fixed_coords):
    """Sum of graded components of N whose shift vanishes on the listed
    grading coordinates."""
    B = grading.basis_matrix()
    Binv = mat_inverse(B)
    Nb = mat_mul(Binv, mat_mul(N, B))
    idx = grading.block_of_index()
    blocks = grading.blocks
    n = len(Nb)
    out = [[EG_ZERO] * n for _ in range(n)]
    for i in range(n):
        ti = blocks[idx[i]][0]
        for j in range(n):
            tj = blocks[idx[j]][0]
            if all(ti[c] == tj[c] for c in fixed_coords):
                out[i][j] = Nb[i][j]
    return mat_mul(B, mat_mul(out, Binv))


def graded_filtration(b: HodgeBackdrop, filt: Filtration, w) -> Filtration:
    """The filtration induced on gr^W_w by an increasing filtration on H."""
    d = b.grdim(w)
    Ww = b.weight.at(w)
    Wlow = b.weight.at(w - 1)
    lo, hi = filt.support()
    steps = {}
    for k in range(lo - 1, hi + 1):
        inter = filt.at(k).meet(Ww)
        steps[k] = b.graded_subspace(w, inter.join(Wlow))
    return Filtration("inc", steps, d, filt.exact).normalized()


def psi(t: NilpotentTuple) -> Sl2OrbitClass:
    """The SL(2)-orbit class of a nilpotent orbit, by the finite chain."""
    b = t.backdrop
    chain = build_chain(t)
    n = chain.n
    # all graded weight filtrations must be rational; exact mode input is
    for wf in chain.wfilts[1:]:
        if not wf.exact:
            raise NonRationalWeightFiltration(
                "float mode weight filtrations are not certified rational")
    jprime = set()
    for j in range(1, n + 1):
        for w in b.weights():
            if graded_filtration(b, chain.wfilts[j], w) != \
                    graded_filtration(b, chain.wfilts[j - 1], w):
                jprime.add(j)
                break
    J = set(jprime)
    if chain.k <= n:
        J.add(chain.k)
    return Sl2OrbitClass(b, chain.wfilts[1:], chain.grading, chain.r1(),
                         sorted(J))


def phi_normalize(t: NilpotentTuple) -> NilpotentTuple:
    """Projection onto the chain-split locus: keep N_1..N_k, replace the
    tail by its weight zero parts, move the filtration to Fhat_(n)."""
    chain = build_chain(t)
    n, k = chain.n, chain.k
    if k == n + 1:
        out = NilpotentTuple(t.backdrop, list(t.nilpotents), t.F)
    else:
        hats, deltas = hat_operators(chain)
        ns = [t.nilpotents[j] for j in range(k)] \
            + [deltas[j] for j in range(k, n)]
        out = NilpotentTuple(t.backdrop, ns, chain.fhats[n])
    _assert_phi(out, chain)
    return out


def _assert_phi(out: NilpotentTuple, chain: OrbitChain):
    c2 = build_chain(out)
    again = phi_normalize_raw(out, c2)
    for a, bb in zip(out.nilpotents, again.nilpotents):
        if not mat_eq(a, bb):
            raise AssertionError("phi is not idempotent on the operators")
    if again.F != out.F:
        raise AssertionError("phi is not idempotent on the filtration")
    # split criterion: each tail stage of the new tuple is R-split
    n, k = c2.n, c2.k
    for j in range(max(k, 1), n + 1):
        acc = mat_zero(out.backdrop.rank, out.backdrop.rank, True)
        for l in range(j + 1, n + 1):
            acc = mat_add(acc, out.nilpotents[l - 1])
        probe = out.F.apply(mat_exp_nilpotent(mat_scale(EG_I, acc)))
        dec = decompose_mhs(c2.wfilts[j], probe)
        if not dec.delta_is_zero():
            raise AssertionError(f"normalized tuple is not split at {j}")


def phi_normalize_raw(t: NilpotentTuple, chain: OrbitChain):
    n, k = chain.n, chain.k
    if k == n + 1:
        return NilpotentTuple(t.backdrop, list(t.nilpotents), t.F)
    hats, deltas = hat_operators(chain)
    ns = [t.nilpotents[j] for j in range(k)] \
        + [deltas[j] for j in range(k, n)]
    return NilpotentTuple(t.backdrop, ns, chain.fhats[n])


def recover_from_class(c: Sl2OrbitClass) -> NilpotentTuple:
    """The unique normalized preimage of psi, or NotInImage."""
    b = c.backdrop
    n = c.n
    k = min(c.J) if c.J else n + 1
    nilpotents = []
    partial_prev = mat_zero(b.rank, b.rank, True)
    try:
        for j in range(1, n + 1):
            if j < k:
                nilpotents.append(mat_zero(b.rank, b.rank, True))
                continue
            M = c.weight_filtrations[j - 1]
            dec = decompose_mhs(M, c.r)
            partial = dec.delta_H
            nilpotents.append(mat_sub(partial, partial_prev))
            partial_prev = partial
        if k == n + 1:
            F = c.r
        else:
            F = decompose_mhs(c.weight_filtrations[n - 1], c.r).F_split
    except NotMHS as exc:
        raise NotInImage(str(exc)) from exc
    out = NilpotentTuple(b, nilpotents, F)
    try:
        back = psi(out)
    except (ChainBreak, ValueError) as exc:
        raise NotInImage(f"candidate preimage is not a nilpotent orbit: "
                         f"{exc}") from exc
    if back.key_data() != c.key_data() or back.r != c.r \
            or back.grading != c.grading:
        raise NotInImage("round trip does not reproduce the class")
    return out


# ---------------------------------------------------------------------------
# numerical probes
# ---------------------------------------------------------------------------


def filtration_distance(a: Filtration, b: Filtration) -> float:
    """max over levels of the operator norm gap between projectors."""
    lo = min(a.support()[0], b.support()[0])
    hi = max(a.support()[1], b.support()[1])
    worst = 0.0
    for p in range(lo, hi + 1):
        qa = np.array(_tofl(a.at(p)).rows, dtype=complex)
        qb = np.array(_tofl(b.at(p)).rows, dtype=complex)
        n = a.ambient
        pa = qa.conj().T @ qa if qa.size else np.zeros((n, n), dtype=complex)
        pb = qb.conj().T @ qb if qb.size else np.zeros((n, n), dtype=complex)
        worst = max(worst, float(np.linalg.norm(pa - pb, 2)))
    return worst


def _tofl(s: Subspace) -> Subspace:
    if not s.exact:
        return s
    if s.is_zero():
        return Subspace.zero(s.ambient, False)
    return Subspace.span([[complex(x) for x in r] for r in s.rows],
                         s.ambient, exact=False)


def default_schedule(n, base=(1e2, 1e3, 1e4, 1e5), k=1):
    """y vectors with y_1 = .. = y_k and growing ratios."""
    out = []
    for s in base:
        y = []
        for j in range(1, n + 1):
            power = max(n - max(j, k) + 1, 1)
            y.append(s ** power)
        for j in range(0, k):
            y[j] = y[min(k, n) - 1] if k <= n else y[j]
        y = sorted(y, reverse=True)
        out.append(tuple(y))
    return out


def limit_probe(t: NilpotentTuple, y_schedule=None):
    """Evaluate the rescaled orbit along a schedule and report distances
    to the limit point and limit splitting, with an empirical rate."""
    b = t.backdrop
    cls = psi(t)
    chain = build_chain(t)
    n = t.n
    if y_schedule is None:
        y_schedule = default_schedule(n, k=min(chain.k, n) if n else 1)
    r1f = cls.r.to_float()
    s_lift = _splitting_matrix_float(b, chain.splittings[0])
    report = {"points": [], "schedule": [list(y) for y in y_schedule]}
    for y in y_schedule:
        squares = _rational_squares(cls, y) if n else None
        if squares is not None:
            point, resc, spl_lift = _exact_probe(b, t, cls, y, squares)
        else:
            ts = []
            for j in range(1, n + 1):
                nxt = y[j] if j < n else 1.0
                ts.append(float(np.sqrt(nxt / y[j - 1])))
            if n == 0:
                resc = t.F.to_float()
                spl_lift = np.array([[complex(x) for x in row] for row in
                                     canonical_splitting(b, resc).lift])
            else:
                # rescale first and exponentiate the bounded conjugated
                # operators; this is the numerically stable order
                T = cls.torus_action(ts)
                Tinv = mat_inverse(T)
                acc = None
                for j, N in enumerate(t.nilpotents):
                    M = mat_mul(Tinv, mat_mul(
                        tuple(tuple(complex(x) for x in row) for row in N),
                        T))
                    Mf = tuple(tuple(complex(x) * 1j * y[j] for x in row)
                               for row in M)
                    acc = Mf if acc is None else tuple(
                        tuple(p + q for p, q in zip(r1, r2))
                        for r1, r2 in zip(acc, Mf))
                resc = t.F.to_float().apply(Tinv).apply(
                    mat_exp_nilpotent(acc))
                # the canonical splitting is equivariant, so evaluate it
                # at the bounded rescaled point and transport back; at
                # extreme magnitudes the float splitting may be beyond
                # reach, in which case only distances are reported
                try:
                    spl_q = canonical_splitting(b, resc)
                    Tm = np.array([[complex(x) for x in row] for row in T])
                    Tg = _gr_action_matrix(b, T)
                    spl_lift = Tm @ np.array([[complex(x) for x in row]
                                              for row in spl_q.lift]) \
                        @ np.linalg.inv(Tg)
                except Exception:  # noqa: BLE001 - diagnostic only
                    spl_lift = None
        dist = filtration_distance(resc, r1f)
        sd = None if spl_lift is None else \
            float(np.abs(spl_lift - s_lift).max())
        report["points"].append({"y": list(y), "distance": dist,
                                 "splitting_gap": sd})
    ds = [p["distance"] for p in report["points"]]
    ys = [p["y"][0] for p in report["points"]]
    if len(ds) >= 2 and all(d > 0 for d in ds):
        fit = np.polyfit(np.log(ys), np.log(ds), 1)
        report["rate_exponent"] = float(-fit[0])
    else:
        report["rate_exponent"] = float("inf")
    report["monotone_tail"] = all(ds[i + 1] <= ds[i]
                                  for i in range(len(ds) - 1))
    return report


def _rational_squares(cls: Sl2OrbitClass, y):
    """Exact squared torus parameters when the action needs only them.

    Returns t_j^2 values as Fractions when every grading exponent is even
    and the schedule entries are rational; None otherwise."""
    for theta, _ in cls.grading.blocks:
        if any(e % 2 for e in theta[1:]):
            return None
    try:
        ys = [Fraction(v) for v in y]
    except (TypeError, ValueError):
        return None
    out = []
    for j in range(1, cls.n + 1):
        nxt = ys[j] if j < cls.n else Fraction(1)
        out.append(nxt / ys[j - 1])
    return out


def _exact_probe(b, t, cls, y, squares):
    """Exact probe point, rescaled point and transported splitting lift."""
    from .splitcore import canonical_splitting as _spl
    ys = [Fraction(v) for v in y]
    acc = mat_zero(b.rank, b.rank, True)
    for j, N in enumerate(t.nilpotents):
        acc = mat_add(acc, mat_scale(ExactGaussian(0, ys[j]), N))
    point = t.F.apply(mat_exp_nilpotent(acc))
    scales = []
    for theta, _ in cls.grading.blocks:
        v = Fraction(1)
        for j in range(1, cls.n + 1):
            v *= squares[j - 1] ** (theta[j] // 2)
        scales.append(as_exact(v))
    T = cls.grading.scale_matrix(scales)
    resc = point.apply(mat_inverse(T))
    spl_q = _spl(b, resc)
    Tg = _gr_action_matrix(b, T)
    Tm = np.array([[complex(x) for x in row] for row in T])
    lift = np.array([[complex(x) for x in row] for row in spl_q.lift])
    return point, resc, Tm @ lift @ np.linalg.inv(Tg)


def _gr_action_matrix(b, T):
    """The action induced on gr coordinates by a weight preserving map."""
    cols = []
    Tf = tuple(tuple(complex(x) for x in row) for row in T)
    for w in b.weights():
        for r in b.graded_reps[w]:
            img = mat_vec(Tf, tuple(complex(x) for x in r))
            cols.append(b.gr_coords(w, img))
    n = b.rank
    out = np.zeros((n, n), dtype=complex)
    off = 0
    col = 0
    for w in b.weights():
        d = b.grdim(w)
        for j in range(d):
            for i2, v in enumerate(cols[col]):
                out[off + i2, col] = complex(v)
            col += 1
        off += d
    return out


def _splitting_matrix_float(b, dec: WeightDecomposition):
    """Lift matrix of a weight decomposition on the graded representatives:
    the column over a representative r of gr_w is its V_w component."""
    lift_cols = []
    proj = dec.projectors()
    for w in b.weights():
        pw = tuple(tuple(complex(x) for x in row) for row in proj[w])
        for r in b.graded_reps[w]:
            lift_cols.append(mat_vec(pw, tuple(complex(x) for x in r)))
    return np.array(lift_cols, dtype=complex).T


def boundary_value(t: NilpotentTuple, c) -> Sl2OrbitClass:
    """The class attached to a boundary parameter c in the closed orbit
    cone: c_j = 0 coordinates group the operators, positive ones rescale
    and twist the filtration."""
    b = t.backdrop
    n = t.n
    c = [Fraction(x) for x in c]
    if len(c) != n:
        raise ValueError(f"need {n} coordinates")
    K = [j for j in range(1, n + 1) if c[j - 1] == 0]
    bs = [0] + K
    new_ns = []
    for jj in range(1, len(bs)):
        acc = mat_zero(b.rank, b.rank, True)
        for k in range(bs[jj - 1] + 1, bs[jj] + 1):
            coef = Fraction(1)
            for ell in range(k, bs[jj]):
                coef *= c[ell - 1] ** -2
            acc = mat_add(acc, mat_scale(as_exact(coef),
                                         t.nilpotents[k - 1]))
        new_ns.append(acc)
    tail = mat_zero(b.rank, b.rank, True)
    top = bs[-1] if len(bs) > 1 else 0
    for k in range(top + 1, n + 1):
        coef = Fraction(1)
        for ell in range(k, n + 1):
            coef *= c[ell - 1] ** -2
        tail = mat_add(tail, mat_scale(as_exact(coef),
                                       t.nilpotents[k - 1]))
    Fp = t.F.apply(mat_exp_nilpotent(mat_scale(EG_I, tail)))
    return psi(NilpotentTuple(b, new_ns, Fp))
