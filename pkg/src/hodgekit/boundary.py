"""Boundary coordinates and Hodge metrics.

Splittings of admissible sets of weight filtrations, the built-in distance
to boundary gauges of the example families, the coordinate map nu and its
algebraic torus-orbit limits, Hodge metric forms with boundary rescaling,
and the divergence sample of the rank 5 example.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .exactla import (
    COMPARE_TOL,
    EG_I,
    EG_ONE,
    EG_ZERO,
    ExactGaussian,
    Subspace,
    as_exact,
    mat_add,
    mat_conj,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_scale,
    mat_vec,
    mat_zero,
)
from .hodgedata import Filtration, HodgeBackdrop, WeightDecomposition
from .sl2orbit import (
    JointGrading,
    Sl2OrbitClass,
    borel_serre_splitting,
    hodge_metric_gram,
    pure_backdrop,
)
from .splitcore import (
    GradedPoint,
    LElement,
    SplittingOfW,
    canonical_splitting,
    delta_decompose,
    gr_offset,
    gr_weight_ranges,
)


class NotInDnspl(ValueError):
    pass


class IncompatiblePsi(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact square roots of rationals
# ---------------------------------------------------------------------------


class SqrtRat:
    """sqrt(q) for a nonnegative rational q, kept exact."""

    __slots__ = ("q",)

    def __init__(self, q):
        self.q = Fraction(int(q.numerator), int(q.denominator)) \
            if not isinstance(q, (int, float, str)) else Fraction(q)
        if self.q < 0:
            raise ValueError("negative radicand")

    def __mul__(self, other):
        if isinstance(other, SqrtRat):
            return SqrtRat(self.q * other.q)
        f = Fraction(other)
        return SqrtRat(self.q * f * f)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k >= 0:
            return SqrtRat(self.q ** k)
        return SqrtRat(Fraction(1) / self.q ** (-k))

    def inv(self):
        return SqrtRat(Fraction(1) / self.q)

    def __eq__(self, other):
        if isinstance(other, SqrtRat):
            return self.q == other.q
        f = Fraction(other)
        return f >= 0 and self.q == f * f

    def __float__(self):
        return math.sqrt(float(self.q))

    def sqrt_exact(self):
        """The exact rational value if the radicand is a perfect square."""
        num = math.isqrt(self.q.numerator)
        den = math.isqrt(self.q.denominator)
        if num * num == self.q.numerator and den * den == self.q.denominator:
            return Fraction(num, den)
        return None

    def __repr__(self):
        r = self.sqrt_exact()
        return str(r) if r is not None else f"sqrt({self.q})"

    def power_value(self, e):
        """sqrt(q)^e as an exact rational (e even or q square) or float."""
        if e % 2 == 0:
            return self.q ** (e // 2)
        r = self.sqrt_exact()
        if r is not None:
            return r ** e
        return float(self) ** e


# ---------------------------------------------------------------------------
# splittings of admissible sets and distances to the boundary
# ---------------------------------------------------------------------------


class BoundarySplitting:
    """Commuting gradings indexed by a set of weight filtrations.

    ``on_gr`` distinguishes gradings of gr (indexed by filtrations on gr,
    in gr coordinates) from gradings of the ambient space.
    """

    def __init__(self, backdrop: HodgeBackdrop, members, grading: JointGrading,
                 on_gr: bool):
        self.backdrop = backdrop
        self.members = list(members)
        self.grading = grading
        self.on_gr = on_gr
        if grading.nvars != len(self.members):
            raise ValueError("one grading coordinate per member")
        for i, m in enumerate(self.members):
            if grading.sub_filtration(i) != m:
                raise ValueError(f"grading does not split member {i}")
        self._check_pairing()

    def _check_pairing(self):
        b = self.backdrop
        nm = len(self.members)
        for w in b.weights():
            graded = {}
            for theta, sub in self.grading.blocks:
                if self.on_gr:
                    piece = _gr_block_piece(b, w, sub)
                else:
                    Ww = b.weight.at(w)
                    inter = sub.meet(Ww)
                    piece = b.graded_subspace(w, inter.join(b.weight.at(w - 1)))
                if piece.dim:
                    graded.setdefault(theta, []).append(piece)
            flat = [(theta, p) for theta, ps in graded.items() for p in ps]
            for t1, p1 in flat:
                for t2, p2 in flat:
                    if all(a + bq == 2 * w for a, bq in zip(t1, t2)):
                        continue
                    for x in p1.rows:
                        for y in p2.rows:
                            v = b.pairing_value(w, x, y)
                            if not _zeroish(v):
                                raise ValueError(
                                    "pairing does not see the grading as "
                                    f"isotropic at weight {w}")

    def action(self, t):
        return self.grading.action(t)

    def action_at_sqrt(self, betas, invert=False):
        """alpha(beta)^{+-1} with beta values given as SqrtRat.

        Exact when every needed power is rational (even exponents or
        perfect square radicands); returns a float matrix otherwise.
        """
        scales = []
        float_mode = False
        for theta, _ in self.grading.blocks:
            acc = Fraction(1)
            for j, e in enumerate(theta):
                ee = -e if invert else e
                val = betas[j].power_value(ee)
                if isinstance(val, float):
                    float_mode = True
                acc = acc * val if not isinstance(val, float) else \
                    float(acc) * val
            scales.append(acc)
        if float_mode or any(isinstance(s, float) for s in scales):
            return self.grading.scale_matrix([complex(float(s))
                                              for s in scales])
        return self.grading.scale_matrix([as_exact(Fraction(s))
                                          for s in scales])


def _gr_block_piece(b: HodgeBackdrop, w, sub: Subspace) -> Subspace:
    """The gr_w part of a grading block of gr (blocks split weight-wise)."""
    lo, hi = gr_weight_ranges(b)[w]
    n = sub.ambient
    exact = sub.exact
    coord_rows = []
    for idx in range(lo, hi):
        v = [EG_ZERO if exact else 0j] * n
        v[idx] = EG_ONE if exact else 1.0 + 0j
        coord_rows.append(tuple(v))
    wplane = Subspace(n, coord_rows, exact, _canonical=True)
    inter = sub.meet(wplane)
    rows = [r[lo:hi] for r in inter.rows]
    return (Subspace(hi - lo, rows, exact) if rows
            else Subspace.zero(hi - lo, exact))


def _zeroish(x, tol=COMPARE_TOL):
    if isinstance(x, ExactGaussian):
        return not x
    return abs(x) <= tol


class BoundaryDistance:
    """A positive homogeneous gauge given by coordinate functionals."""

    def __init__(self, members, fn, description=""):
        self.members = list(members)
        self.fn = fn
        self.description = description

    def __call__(self, point):
        """Returns a list of SqrtRat (exact mode) or floats."""
        return self.fn(point)


def upper_tau_of_line(line: Subspace):
    """tau with F = C(tau e + f) for a two dimensional flag line."""
    if line.dim != 1 or line.ambient != 2:
        raise ValueError("expected a line in a two dimensional space")
    a, b = line.rows[0]
    return a / b


def sym2_tau_of_line(line: Subspace):
    """omega with the line spanned by (omega^2, 2 omega, 1)."""
    if line.dim != 1 or line.ambient != 3:
        raise ValueError("expected a line in a three dimensional space")
    a, b, c = line.rows[0]
    if not _zeroish(c):
        half = ExactGaussian(Fraction(1, 2)) if isinstance(b, ExactGaussian) \
            else 0.5
        return b * half / c
    return a / b * (ExactGaussian(Fraction(1, 2))
                    if isinstance(a, ExactGaussian) else 0.5)


def imag_part(x):
    if isinstance(x, ExactGaussian):
        return x.im
    return complex(x).imag


def halfplane_distance(tau):
    """1/sqrt(Im tau) as an exact SqrtRat (or float for float input)."""
    import numbers
    y = imag_part(tau)
    if isinstance(y, numbers.Rational):
        y = Fraction(y)
        if y == 0:
            raise ValueError("point on the real boundary")
        return SqrtRat(Fraction(1) / abs(y))
    return 1.0 / math.sqrt(abs(y))


# ---------------------------------------------------------------------------
# the nu coordinate maps
# ---------------------------------------------------------------------------


def nu_map_gr(b: HodgeBackdrop, alpha: BoundarySplitting,
              beta: BoundaryDistance, F: Filtration):
    """The second flavor tuple at an interior point.

    (beta(F(gr)), rescaled graded point, twisted delta, canonical
    splitting, Borel-Serre splittings of the members).
    """
    if not alpha.on_gr:
        raise ValueError("second flavor needs a grading of gr")
    graded = GradedPoint.of(b, F)
    betas = beta(graded)
    s_prime, delta = delta_decompose(b, F)
    spl = canonical_splitting(b, F)
    resc = alpha.action_at_sqrt(betas, invert=True)
    graded_resc = {w: graded.piece(w) for w in b.weights()}
    gr_filt = graded.gr_filtration().apply(resc)
    ad_inv = mat_mul(resc, mat_mul(delta.matrix, _minv(resc)))
    twisted = LElement(b, ad_inv)
    bs = []
    for m in alpha.members:
        bs.append(_member_bs(b, m, graded))
    return {"beta": betas, "rescaled_gr": gr_filt, "twisted_delta": twisted,
            "splitting": spl, "bs": bs}


def _minv(m):
    return mat_inverse(m)


def _member_bs(b: HodgeBackdrop, member: Filtration, graded: GradedPoint):
    """Borel-Serre splitting of a gr member filtration at the graded point;
    computed per weight on the pure pieces it is nontrivial on."""
    out = {}
    for w in b.weights():
        d = b.grdim(w)
        lo, hi = gr_weight_ranges(b)[w]
        steps = {}
        for k, sub in member.steps.items():
            rows = [r[lo:hi] for r in sub.rows
                    if any(not _zeroish(x) for x in r[lo:hi])
                    or all(_zeroish(x) for x in r)]
            rows = [r[lo:hi] for r in sub.rows]
            piece = Subspace(d, rows, sub.exact)
            steps[k] = piece
        filt = Filtration("inc", steps, d, member.exact).normalized()
        jumps = filt.jumps()
        if len(jumps) <= 1:
            continue
        out[w] = borel_serre_splitting(pure_backdrop(b, w), filt,
                                       graded.piece(w))
    return out


def nu_map_full(b: HodgeBackdrop, alpha: BoundarySplitting,
                beta: BoundaryDistance, F: Filtration,
                require_nspl=False):
    """The first flavor tuple at an interior point.

    (beta(p), rescaled point, canonical splitting, Borel-Serre
    splittings).
    """
    if alpha.on_gr:
        raise ValueError("first flavor needs a grading of the ambient")
    if require_nspl:
        _, delta = delta_decompose(b, F)
        if delta.is_zero():
            raise NotInDnspl("point is split")
    betas = beta(F)
    resc = alpha.action_at_sqrt(betas, invert=True)
    rescaled = F.apply(resc)
    spl = canonical_splitting(b, F)
    graded = GradedPoint.of(b, F)
    bs = []
    for m in alpha.members:
        gr_m = _graded_member(b, m)
        bs.append(_member_bs(b, gr_m, graded))
    return {"beta": betas, "rescaled": rescaled, "splitting": spl, "bs": bs}


def _graded_member(b: HodgeBackdrop, member: Filtration) -> Filtration:
    """W'(gr^W) in gr coordinates for a filtration on the ambient space."""
    n = b.rank
    steps = {}
    lo, hi = member.support()
    for k in range(lo - 1, hi + 1):
        rows = []
        for w in b.weights():
            inter = member.at(k).meet(b.weight.at(w))
            piece = b.graded_subspace(w, inter.join(b.weight.at(w - 1)))
            from .splitcore import embed_gr_rows
            rows.extend(embed_gr_rows(b, w, piece.rows, piece.exact))
        steps[k] = Subspace(n, rows, member.exact) if rows \
            else Subspace.zero(n, member.exact)
    return Filtration("inc", steps, n, member.exact).normalized()


def nu_limit(b: HodgeBackdrop, alpha: BoundarySplitting,
             beta: BoundaryDistance, cls: Sl2OrbitClass):
    """Algebraic boundary value of nu along the torus orbit of a class.

    Computed through the unique unipotent u carrying the splitting of the
    class torus to the splitting alpha; no numerical limits are taken.
    """
    J_exponents = list(range(1, cls.n + 1))
    # the class torus on gr, restricted to its member filtrations
    if alpha.on_gr:
        tau_gr = _class_gr_grading(b, cls)
        match = _match_members(alpha, b, cls)
        u = _unipotent_transporter(alpha.grading, tau_gr, match)
        uinv = mat_inverse(u)
        r_gr = GradedPoint.of(b, cls.r).gr_filtration().apply(uinv)
        graded_u = _graded_point_from_gr(b, r_gr)
        betas = beta(graded_u)
        limit_beta = []
        for idx in range(len(alpha.members)):
            if match[idx] is not None:
                limit_beta.append(SqrtRat(0))
            else:
                limit_beta.append(betas[idx])
        resc = alpha.action_at_sqrt(
            [bv if not isinstance(bv, SqrtRat) or bv.q != 0 else SqrtRat(1)
             for bv in betas], invert=True)
        mu = r_gr.apply(resc)
        sprime, delta = delta_decompose(b, cls.r)
        spl = canonical_splitting(b, cls.r)
        ad = mat_mul(resc, mat_mul(mat_mul(uinv, mat_mul(
            delta.matrix, u)), _minv(resc)))
        w_in = any(_w_filtration_in_class(b, cls))
        ell_entry = {"matrix": ad, "at_infinity": w_in}
        bs = [_member_bs(b, m, GradedPoint.of(b, cls.r))
              for m in alpha.members]
        return {"beta": limit_beta, "rescaled_gr": mu,
                "twisted_delta": ell_entry, "splitting": spl, "bs": bs}
    raise IncompatiblePsi("ambient flavor limits are provided through the "
                          "graded flavor")


def _class_gr_grading(b: HodgeBackdrop, cls: Sl2OrbitClass) -> JointGrading:
    """The grading induced by the class torus on gr coordinates, indexed by
    the nontrivial graded members."""
    blocks = {}
    from .splitcore import embed_gr_rows
    for theta, sub in cls.grading.blocks:
        for w in b.weights():
            inter = sub.meet(b.weight.at(w))
            piece = b.graded_subspace(w, inter.join(b.weight.at(w - 1)))
            if piece.dim:
                key = theta[1:]
                rows = embed_gr_rows(b, w, piece.rows, piece.exact)
                cur = blocks.get(key)
                nsub = Subspace(b.rank, rows, piece.exact)
                blocks[key] = nsub if cur is None else cur.join(nsub)
    return JointGrading(list(blocks.items()), b.rank, cls.n)


def _w_filtration_in_class(b: HodgeBackdrop, cls: Sl2OrbitClass):
    for j, wf in enumerate(cls.weight_filtrations, start=1):
        if j in cls.J and wf == b.weight:
            yield True
        else:
            yield False


def _match_members(alpha: BoundarySplitting, b, cls: Sl2OrbitClass):
    """For each alpha member, the class variable inducing it on gr (or
    None)."""
    out = []
    for m in alpha.members:
        found = None
        for j, wf in enumerate(cls.weight_filtrations, start=1):
            if j not in cls.J:
                continue
            if _graded_member(b, wf) == m:
                found = j
                break
        out.append(found)
    return out


def _unipotent_transporter(alpha_gr: JointGrading, tau_gr: JointGrading,
                           match):
    """u with tau = Int(u) alpha on the matched coordinates and 1 - u
    strictly lowering."""
    n = alpha_gr.ambient
    exact = all(sub.exact for _, sub in alpha_gr.blocks)
    matched = [m for m in match if m is not None]
    if not matched:
        return mat_identity(n, exact)
    # projections of the tau grading summed into alpha exponent patterns
    out = mat_zero(n, n, exact)
    tau_proj = _grading_projectors(tau_gr)
    alpha_proj = _grading_projectors(alpha_gr)
    for atheta, asub in alpha_gr.blocks:
        # the tau block with the same exponents on matched coordinates
        target = None
        for ttheta, tsub in tau_gr.blocks:
            keyed = tuple(ttheta[m - 1] for m in matched)
            akeyed = tuple(atheta[i] for i, m in enumerate(match)
                           if m is not None)
            if keyed == akeyed and tsub.dim == asub.dim:
                target = ttheta
                break
        if target is None:
            raise IncompatiblePsi("gradings do not match block by block")
        out = mat_add(out, mat_mul(tau_proj[target], alpha_proj[atheta]))
    return out


def _grading_projectors(grading: JointGrading):
    B = grading.basis_matrix()
    Binv = mat_inverse(B)
    idx = grading.block_of_index()
    n = grading.ambient
    exact = all(sub.exact for _, sub in grading.blocks)
    out = {}
    for bi, (theta, _) in enumerate(grading.blocks):
        diag = [[(EG_ONE if exact else 1.0 + 0j)
                 if (i == j and idx[i] == bi) else
                 (EG_ZERO if exact else 0j) for j in range(n)]
                for i in range(n)]
        out[theta] = mat_mul(B, mat_mul(diag, Binv))
    return out


def _graded_point_from_gr(b: HodgeBackdrop, gr_filt: Filtration) -> GradedPoint:
    pieces = {}
    ranges = gr_weight_ranges(b)
    for w in b.weights():
        lo, hi = ranges[w]
        d = hi - lo
        steps = {}
        flo, fhi = gr_filt.support()
        for p in range(flo, fhi + 1):
            rows = []
            for r in gr_filt.at(p).rows:
                body = r[lo:hi]
                if any(not _zeroish(x) for x in body):
                    rows.append(body)
            inside = [r for r in gr_filt.at(p).rows
                      if all(_zeroish(x) for x in (r[:lo] + r[hi:]))]
            rows = [r[lo:hi] for r in inside]
            steps[p] = Subspace(d, rows, gr_filt.exact) if rows else \
                Subspace.zero(d, gr_filt.exact)
        pieces[w] = Filtration("dec", steps, d, gr_filt.exact).normalized()
    return GradedPoint(b, pieces)


# ---------------------------------------------------------------------------
# Hodge metric forms
# ---------------------------------------------------------------------------


class HermitianForm:
    """A sesquilinear form on coordinates, v, v' -> v G conj(v')^T."""

    def __init__(self, matrix, exact):
        self.matrix = tuple(tuple(r) for r in matrix)
        self.exact = exact

    def value(self, v, vp):
        acc = None
        for i, vi in enumerate(v):
            row = self.matrix[i]
            for j, vj in enumerate(vp):
                cj = vj.conjugate() if isinstance(vj, ExactGaussian) \
                    else complex(vj).conjugate()
                t = vi * row[j] * cj
                acc = t if acc is None else acc + t
        return acc

    def is_positive_definite(self):
        a = np.array([[complex(x) for x in row] for row in self.matrix])
        h = (a + a.conj().T) / 2
        if np.abs(a - h).max() > 1e-8 * max(1.0, np.abs(a).max()):
            return False
        return bool(np.linalg.eigvalsh(h).min() > 0)

    def restricted(self, rows):
        out = [[self.value(r1, r2) for r2 in rows] for r1 in rows]
        return HermitianForm(out, self.exact)


def hodge_form(b: HodgeBackdrop, F: Filtration, c) -> HermitianForm:
    """(v, v')_{F,c} = sum_w c^w (v_w, v'_w) on the ambient space.

    Weight components are taken along the canonical splitting of F; each
    graded piece carries its Weil operator metric.
    """
    spl = canonical_splitting(b, F)
    graded = GradedPoint.of(b, F)
    exact = F.exact and isinstance(c, (int, Fraction))
    lift = spl.lift if exact else tuple(
        tuple(complex(x) for x in row) for row in spl.lift)
    lift_inv = mat_inverse(lift)
    n = b.rank
    total = mat_zero(n, n, exact)
    ranges = gr_weight_ranges(b)
    cc = Fraction(c) if exact else complex(c)
    for w in b.weights():
        lo, hi = ranges[w]
        gram = hodge_metric_gram(b, w, graded.piece(w))
        if not exact:
            gram = tuple(tuple(complex(x) for x in row) for row in gram)
        # projection to gr_w coordinates through the splitting
        proj = [lift_inv[i] for i in range(lo, hi)]
        # form contribution: proj^T gram conj(proj)
        cw = (as_exact(cc ** w) if exact else complex(cc) ** w)
        d = hi - lo
        for i in range(n):
            for j in range(n):
                acc = None
                for a in range(d):
                    for bidx in range(d):
                        pa = proj[a][i]
                        pbj = proj[bidx][j]
                        pb = pbj.conjugate() if isinstance(
                            pbj, ExactGaussian) else complex(pbj).conjugate()
                        t = pa * gram[a][bidx] * pb
                        acc = t if acc is None else acc + t
                total = _mat_set_add(total, i, j, cw * acc)
    return HermitianForm(total, exact)


def _mat_set_add(m, i, j, v):
    rows = [list(r) for r in m]
    rows[i][j] = rows[i][j] + v
    return tuple(tuple(r) for r in rows)


def rescaled_boundary_form(b: HodgeBackdrop, alpha: BoundarySplitting,
                           beta: BoundaryDistance, m_map, F: Filtration):
    """The form prod beta^{2m} ( , )_{F, beta} restricted to the meet of
    the member filtration levels.  Exact: the rescalings involve only
    even powers of the gauges."""
    betas = beta(F if not alpha.on_gr else GradedPoint.of(b, F))
    c = Fraction(1)
    for bv in betas:
        c *= Fraction(1) / bv.q            # beta^{-2} per member
    scale = Fraction(1)
    for bv, mm in zip(betas, m_map):
        scale *= bv.q ** mm                # beta^{2m} per member
    form = hodge_form(b, F, c)
    V = _member_meet(b, alpha, m_map)
    rows = V.rows
    restricted = form.restricted(rows)
    mat = mat_scale(as_exact(scale), restricted.matrix)
    return HermitianForm(mat, restricted.exact), V


def _member_meet(b: HodgeBackdrop, alpha: BoundarySplitting, m_map):
    V = Subspace.full(b.rank, True)
    for member, mm in zip(alpha.members, m_map):
        filt = member if not alpha.on_gr else member
        V = V.meet(member.at(mm))
    return V


def boundary_form_limit(b: HodgeBackdrop, alpha: BoundarySplitting,
                        beta: BoundaryDistance, m_map, cls: Sl2OrbitClass):
    """The boundary value of the rescaled form along the torus orbit.

    Computed at the algebraic limit of the rescaled point: the value on
    V_m is the plain Hodge form of the limit point on the m weight
    component of the alpha grading."""
    tau_gr = None
    match = _match_members(alpha, b, cls)
    if any(mm is None for mm in match):
        raise IncompatiblePsi("every member must be a class filtration")
    # limit interior point: u^{-1} r rescaled; for matched gradings with
    # tau = alpha (u = 1) this is mu(r)
    if alpha.on_gr:
        raise IncompatiblePsi("use the ambient flavor for metric limits")
    u = _unipotent_transporter(alpha.grading,
                               cls.grading.restricted(
                                   list(range(1, cls.n + 1))), match)
    uinv = mat_inverse(u)
    r_u = cls.r.apply(uinv)
    betas = beta(r_u)
    resc = alpha.action_at_sqrt(betas, invert=True)
    q_pt = r_u.apply(resc)
    form = hodge_form(b, q_pt, 1)
    V = _member_meet(b, alpha, m_map)
    # m weight component of each basis vector
    proj = _grading_projectors(alpha.grading)
    target = tuple(m_map)
    comp = proj.get(target)
    if comp is None:
        raise IncompatiblePsi("no grading block with the requested weights")
    rows = [mat_vec(comp, r) for r in V.rows]
    mat = [[form.value(r1, r2) for r2 in rows] for r1 in rows]
    return HermitianForm(mat, form.exact), V


def positivity_on_quotient(form: HermitianForm, V: Subspace,
                           lower: Subspace):
    """Positive semidefinite with radical exactly the lower subspace."""
    a = np.array([[complex(x) for x in row] for row in form.matrix])
    h = (a + a.conj().T) / 2
    eig = np.linalg.eigvalsh(h)
    tol = 1e-9 * max(1.0, float(np.abs(h).max()))
    n_zero = int((np.abs(eig) <= tol).sum())
    n_neg = int((eig < -tol).sum())
    return n_neg == 0 and n_zero == lower.meet(V).dim


# ---------------------------------------------------------------------------
# the rank 5 divergence sample
# ---------------------------------------------------------------------------


def exampleV_point(b: HodgeBackdrop, a3, y, tau):
    """The interior point with splitting a-coordinates (0, 0, a3), graded
    parameters (i y, tau) and no further twist.

    a3 is the pair of coefficients sending the two weight one
    representatives into the third weight zero direction.
    """
    from .fixtures import point5
    from .splitcore import gr_basis_matrix
    lift = [list(r) for r in
            (tuple(tuple(complex(x) for x in row)
                   for row in gr_basis_matrix(b, False)))]
    # s(e4') = a3[0] e3 + e4, s(e5') = a3[1] e3 + e5
    lift[2][3] += complex(a3[0])
    lift[2][4] += complex(a3[1])
    base = point5(1j * y, tau, 0, 0, 0).to_float()
    graded = GradedPoint.of(b, base)
    s = SplittingOfW(b, tuple(tuple(r) for r in lift))
    return s.apply_graded(graded.gr_filtration())


def exampleV_divergence(b: HodgeBackdrop, u, v, c, ys, b3=(1.0, 0.0)):
    """Sample f = beta^2 (u, v)_{p, beta} along the path with third
    splitting coordinate y^{c-1/2} b3 and graded parameters (i y, i).

    Returns the samples, the bounded term, and the exponent fitted on the
    samples after removing it (halved to undo the square in the gauge).
    """
    samples = []
    for y in ys:
        a3 = (b3[0] * (y ** (c - 0.5)), b3[1] * (y ** (c - 0.5)))
        F = exampleV_point(b, a3, y, 1j)
        form = hodge_form(b, F, y)        # c = beta^{-2} = |y|
        val = form.value(tuple(complex(x) for x in u),
                         tuple(complex(x) for x in v))
        samples.append((1.0 / y) * val)   # beta^2 = 1/|y|
    # bounded part: the weight one metric of the graded classes at tau = i
    gram1 = hodge_metric_gram(b, 1, GradedPoint.of(
        b, exampleV_point(b, (0, 0), 1.0, 1j)).piece(1))
    uq = _gr1_class(b, u)
    vq = _gr1_class(b, v)
    bounded = HermitianForm(gram1, False).value(uq, vq)
    resid = [s - bounded for s in samples]
    if all(abs(r) > 0 for r in resid):
        fit = np.polyfit(np.log([float(y) for y in ys]),
                         np.log([abs(r) for r in resid]), 1)
        exponent = float(fit[0]) / 2.0
    else:
        exponent = 0.0
    return {"samples": samples, "bounded_term": bounded,
            "fitted_exponent": exponent}


def _gr1_class(b: HodgeBackdrop, vec):
    return tuple(complex(x) for x in b.gr_coords(1, [complex(t)
                                                     for t in vec]))
