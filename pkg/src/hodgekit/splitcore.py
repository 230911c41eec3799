"""Canonical splittings: bigradings, the (s', delta) decomposition, zeta,
theta twists, and the splitting chart for points of the classifying space.

The central algorithm decomposes a mixed structure (M, F) as
F = s'(exp(i delta) F(gr^M)) by peeling the unipotent correction one weight
depth at a time.  Each depth level is an exact linear solve; the result is
verified by back substitution before it is returned, so no trust is placed
in the construction route.
"""

from __future__ import annotations

from fractions import Fraction

from .exactla import (
    COMPARE_TOL,
    EG_I,
    EG_ONE,
    EG_ZERO,
    ExactGaussian,
    Subspace,
    coerce_vector,
    mat_add,
    mat_conj,
    mat_eq,
    mat_exp_nilpotent,
    mat_identity,
    mat_inverse,
    mat_is_real,
    mat_is_zero,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_vec,
    mat_zero,
    solve_right,
    vec_add,
    vec_scale,
)
from .hodgedata import Filtration, HodgeBackdrop, WeightDecomposition


class NotMHS(ValueError):
    """The pair (M, F) is not a mixed Hodge structure."""


class NotInD(ValueError):
    """The point does not lie in the classifying space."""


class UnsupportedZeta(ValueError):
    """delta has Hodge components outside {(-1,-1), (-1,-2), (-2,-1)}."""

    def __init__(self, slots):
        self.slots = sorted(slots)
        super().__init__(f"zeta not implemented for components {self.slots}")


# ---------------------------------------------------------------------------
# graded points
# ---------------------------------------------------------------------------


class GradedPoint:
    """Per weight Hodge filtrations on the graded quotients of a backdrop."""

    def __init__(self, backdrop: HodgeBackdrop, pieces):
        self.backdrop = backdrop
        self.pieces = dict(pieces)
        self.exact = all(f.exact for f in self.pieces.values())

    @staticmethod
    def of(backdrop: HodgeBackdrop, f: Filtration) -> "GradedPoint":
        return GradedPoint(backdrop, {w: backdrop.graded_piece(f, w)
                                      for w in backdrop.weights()})

    def piece(self, w) -> Filtration:
        return self.pieces[w]

    def gr_filtration(self) -> Filtration:
        """The direct sum filtration on gr-coordinates (dim = rank)."""
        b = self.backdrop
        n = b.rank
        lo = min(f.support()[0] for f in self.pieces.values())
        hi = max(f.support()[1] for f in self.pieces.values())
        steps = {}
        for p in range(lo, hi + 1):
            rows = []
            for w in b.weights():
                sub = self.pieces[w].at(p)
                rows.extend(embed_gr_rows(b, w, sub.rows, self.exact))
            steps[p] = (Subspace(n, rows, self.exact) if rows
                        else Subspace.zero(n, self.exact))
        return Filtration("dec", steps, n, self.exact,
                          check=False).normalized()

    def __eq__(self, other):
        if not isinstance(other, GradedPoint):
            return NotImplemented
        return self.pieces == other.pieces

    def hodge_subspaces(self):
        """(p, q) -> H^{p,q} inside gr coordinates (conjugation symmetric)."""
        from .hodgedata import hodge_piece
        b = self.backdrop
        out = {}
        for w in b.weights():
            gp = self.pieces[w]
            for (p, q), h in b.hodge_numbers.items():
                if p + q != w or h == 0:
                    continue
                sub = hodge_piece(gp, p, q)
                if sub.dim != h:
                    raise NotInD(f"Hodge piece ({p},{q}) has dim {sub.dim}, "
                                 f"expected {h}")
                rows = embed_gr_rows(b, w, sub.rows, self.exact)
                out[(p, q)] = Subspace(b.rank, rows, self.exact)
        return out


def embed_gr_rows(b: HodgeBackdrop, w, rows, exact=True):
    """Embed gr^W_w coordinate vectors into the concatenated gr coordinates."""
    n = b.rank
    offset = gr_offset(b, w)
    zero = EG_ZERO if exact else 0j
    out = []
    for r in rows:
        v = [zero] * n
        for i, x in enumerate(r):
            v[offset + i] = x
        out.append(tuple(v))
    return out


def gr_offset(b: HodgeBackdrop, w):
    off = 0
    for ww in b.weights():
        if ww == w:
            return off
        off += b.grdim(ww)
    raise KeyError(f"weight {w} not in backdrop")


def gr_weight_ranges(b: HodgeBackdrop):
    out = {}
    off = 0
    for w in b.weights():
        d = b.grdim(w)
        out[w] = (off, off + d)
        off += d
    return out


def gr_basis_matrix(b: HodgeBackdrop, exact=True):
    """Columns: the graded representatives, in gr coordinate order."""
    cached = getattr(b, "_gr_basis_cache", None)
    if cached is None:
        cols = []
        for w in b.weights():
            cols.extend(b.graded_reps[w])
        m = tuple(zip(*cols))
        cached = (m, tuple(tuple(complex(x) for x in row) for row in m),
                  mat_inverse(m))
        b._gr_basis_cache = cached
    return cached[0] if exact else cached[1]


def gr_basis_inverse(b: HodgeBackdrop):
    gr_basis_matrix(b, True)
    return b._gr_basis_cache[2]


# ---------------------------------------------------------------------------
# splittings and delta
# ---------------------------------------------------------------------------


class SplittingOfW:
    """A splitting of the backdrop weight filtration.

    Stored as the lift matrix gr -> H whose columns are the images of the
    chosen graded representatives (n x n, real entries).
    """

    def __init__(self, backdrop: HodgeBackdrop, lift):
        self.backdrop = backdrop
        self.lift = tuple(tuple(row) for row in lift)

    @staticmethod
    def base(backdrop: HodgeBackdrop, exact=True) -> "SplittingOfW":
        return SplittingOfW(backdrop, gr_basis_matrix(backdrop, exact))

    @property
    def exact(self):
        return all(isinstance(x, ExactGaussian) for row in self.lift
                   for x in row)

    def unipotent_matrix(self):
        """The element of the real unipotent group carrying the base
        splitting to this one."""
        g0 = gr_basis_matrix(self.backdrop, self.exact)
        return mat_mul(self.lift, mat_inverse(g0))

    def weight_decomposition(self) -> WeightDecomposition:
        b = self.backdrop
        ranges = gr_weight_ranges(b)
        cols = tuple(zip(*self.lift))
        parts = {}
        for w, (lo, hi) in ranges.items():
            parts[w] = Subspace.span([cols[i] for i in range(lo, hi)],
                                     b.rank, exact=self.exact)
        return WeightDecomposition(parts, b.rank, self.exact)

    def apply_graded(self, gr_filtration: Filtration) -> Filtration:
        """Lift a filtration on gr coordinates into the ambient space."""
        return gr_filtration.apply(self.lift)

    def column(self, w, i):
        """Image of the i-th representative of gr_w."""
        off = gr_offset(self.backdrop, w)
        return tuple(row[off + i] for row in self.lift)

    def __eq__(self, other):
        if not isinstance(other, SplittingOfW):
            return NotImplemented
        return mat_eq(self.lift, other.lift)

    def __repr__(self):
        return f"SplittingOfW({self.backdrop.name or self.backdrop.rank})"

    def to_json(self):
        from .exactla import scalar_json
        return {"lift": [[scalar_json(x) for x in row] for row in self.lift]}


class LElement:
    """An endomorphism of gr lowering the weight by at least 2.

    Stored as a real matrix in gr coordinates, with weight components
    accessible per target shift.
    """

    def __init__(self, backdrop: HodgeBackdrop, matrix):
        self.backdrop = backdrop
        self.matrix = tuple(tuple(row) for row in matrix)
        ranges = gr_weight_ranges(backdrop)
        for wsrc, (slo, shi) in ranges.items():
            for wdst, (dlo, dhi) in ranges.items():
                if wdst > wsrc - 2:
                    block = [self.matrix[i][j] for i in range(dlo, dhi)
                             for j in range(slo, shi)]
                    if any(not _is_zero_entry(x) for x in block):
                        raise ValueError(
                            f"entry raises weight: {wsrc} -> {wdst}")

    @staticmethod
    def zero(backdrop: HodgeBackdrop, exact=True) -> "LElement":
        return LElement(backdrop, mat_zero(backdrop.rank, backdrop.rank,
                                           exact))

    @property
    def exact(self):
        return all(isinstance(x, ExactGaussian) for row in self.matrix
                   for x in row)

    def is_zero(self, tol=COMPARE_TOL):
        return mat_is_zero(self.matrix, tol)

    def weight_component(self, shift):
        """The part mapping gr_w to gr_{w+shift}, as a full matrix."""
        b = self.backdrop
        ranges = gr_weight_ranges(b)
        out = [[EG_ZERO if self.exact else 0j] * b.rank
               for _ in range(b.rank)]
        for wsrc, (slo, shi) in ranges.items():
            wdst = wsrc + shift
            if wdst not in ranges:
                continue
            dlo, dhi = ranges[wdst]
            for i in range(dlo, dhi):
                for j in range(slo, shi):
                    out[i][j] = self.matrix[i][j]
        return tuple(tuple(r) for r in out)

    def __eq__(self, other):
        if not isinstance(other, LElement):
            return NotImplemented
        return mat_eq(self.matrix, other.matrix)

    def entry_gr(self, wdst, i, wsrc, j):
        """Coefficient of dst basis vector i in the image of src vector j."""
        b = self.backdrop
        return self.matrix[gr_offset(b, wdst) + i][gr_offset(b, wsrc) + j]

    def to_json(self):
        from .exactla import scalar_json
        return {"matrix": [[scalar_json(x) for x in row]
                           for row in self.matrix]}


class SplitTriple:
    """Coordinates (s, F(gr^W), delta) of a point of the classifying space."""

    def __init__(self, s: SplittingOfW, graded: GradedPoint, delta: LElement):
        self.s = s
        self.graded = graded
        self.delta = delta

    def __eq__(self, other):
        if not isinstance(other, SplitTriple):
            return NotImplemented
        return (self.s == other.s and self.graded == other.graded
                and self.delta == other.delta)

    def to_json(self):
        return {"s": self.s.to_json(), "delta": self.delta.to_json(),
                "graded": {str(w): f.to_json()
                           for w, f in self.graded.pieces.items()}}


def _is_zero_entry(x, tol=COMPARE_TOL):
    if isinstance(x, ExactGaussian):
        return not x
    return abs(x) <= tol


# ---------------------------------------------------------------------------
# Deligne bigrading for a mixed Hodge structure (M, F) on the ambient space
# ---------------------------------------------------------------------------


def deligne_bigrading(M: Filtration, F: Filtration, tol=COMPARE_TOL):
    """The canonical bigrading I^{p,q} of a mixed Hodge structure.

    I^{p,q} = F^p cap M_{p+q} cap (conj F^q cap M_{p+q}
              + sum_{j>=0} conj F^{q-j-1} cap M_{p+q-j-2}).

    Raises NotMHS when the pieces fail to split the space or to refine
    (M, F) in the required way.
    """
    n = M.ambient
    exact = F.exact
    Mlo, Mhi = M.support()
    Flo, Fhi = F.support()
    depth = Mhi - Mlo + 1
    out = {}
    for w in range(Mlo - 1, Mhi + 1):
        Mw = M.at(w)
        if not exact:
            Mw = _to_float_sub(Mw)
        dgr = M.at(w).dim - M.at(w - 1).dim
        if dgr == 0:
            continue
        for p in range(Flo - 1, Fhi + 2):
            q = w - p
            a = F.at(p).meet(Mw)
            rows = []
            corr = F.at(q).conj().meet(Mw)
            acc = corr
            for j in range(0, depth + 1):
                lower = M.at(w - j - 2)
                if not exact:
                    lower = _to_float_sub(lower)
                term = F.at(q - j - 1).conj().meet(lower)
                acc = acc.join(term)
            piece = a.meet(acc)
            if piece.dim:
                out[(p, q)] = piece
    # validation: direct sum, recovers F and M
    total = Subspace.zero(n, exact)
    dims = 0
    for sub in out.values():
        total = total.join(sub)
        dims += sub.dim
    if dims != n or total.dim != n:
        raise NotMHS(f"bigrading pieces span dim {total.dim} with total "
                     f"multiplicity {dims}, ambient {n}")
    for p in range(Flo - 1, Fhi + 2):
        target = F.at(p)
        got = Subspace.zero(n, exact)
        for (pp, qq), sub in out.items():
            if pp >= p:
                got = got.join(sub)
        if got.dim != target.dim or not target.contains(got, tol):
            raise NotMHS(f"bigrading does not rebuild F^{p}")
    for k in range(Mlo - 1, Mhi + 1):
        target = M.at(k)
        got = Subspace.zero(n, exact)
        for (pp, qq), sub in out.items():
            if pp + qq <= k:
                got = got.join(sub)
        if got.dim != target.dim or not _mutual(target, got, exact, tol):
            raise NotMHS(f"bigrading does not rebuild M_{k}")
    return out


def is_mhs(M: Filtration, F: Filtration) -> bool:
    try:
        deligne_bigrading(M, F)
        return True
    except NotMHS:
        return False


def _mutual(a, b, exact, tol):
    if exact:
        return a == b
    return a.contains(b, tol) and b.contains(a, tol)


def _to_float_sub(s: Subspace) -> Subspace:
    if not s.exact:
        return s
    if s.is_zero():
        return Subspace.zero(s.ambient, False)
    return Subspace.span([[complex(x) for x in r] for r in s.rows],
                         s.ambient, exact=False)


# ---------------------------------------------------------------------------
# the (s', delta) decomposition by depth peeling
# ---------------------------------------------------------------------------


class MixedDecomposition:
    """Result of decomposing (M, F) as s'(exp(i delta) F(gr^M)).

    Fields:
      weights        graded weights of M
      V              weight -> tuple of real lift rows (the reference grading)
      s_parts        weight -> Subspace, the s' weight decomposition of H
      U              real unipotent matrix carrying the reference grading
                     to the s' grading
      delta_H        the real operator s' delta s'^{-1} on the ambient space
      F_split        s'(F(gr^M)), the associated R-split filtration
      delta_blocks   Hodge slot (a, b) -> True flag of nonzero components
    """

    def __init__(self, weights, V, U, delta_H, F_split, slot_support,
                 abases, exact, delta0=None, F0=None, Uinv=None,
                 slot_frames=None):
        self.weights = weights
        self.V = V
        self.U = U
        self.delta_H = delta_H
        self.F_split = F_split
        self.slot_support = slot_support
        self.abases = abases
        self.exact = exact
        self.delta0 = delta0
        self.F0 = F0
        self.Uinv = Uinv
        self.slot_frames = slot_frames

    def weight_decomposition(self) -> WeightDecomposition:
        n = len(self.U)
        parts = {}
        for w, rows in self.V.items():
            lifted = [mat_vec(self.U, r) for r in rows]
            parts[w] = Subspace.span(lifted, n, exact=self.exact)
        return WeightDecomposition(parts, n, self.exact)

    def delta_is_zero(self, tol=COMPARE_TOL):
        return mat_is_zero(self.delta_H, tol)

    def delta_hodge_slots(self, tol=COMPARE_TOL):
        """Hodge bidegree components of delta, in ambient coordinates."""
        if self.slot_frames is not None:
            slots, ranges, Gb, Gbinv = self.slot_frames
        else:
            slots = sorted(self.abases.keys())
            basis = []
            ranges = {}
            for pq in slots:
                lo = len(basis)
                basis.extend(self.abases[pq])
                ranges[pq] = (lo, len(basis))
            Gb = tuple(zip(*basis))
            Gbinv = mat_inverse(Gb)
        db = mat_mul(Gbinv, mat_mul(self.delta0, Gb))
        n = len(self.U)
        zero = EG_ZERO if self.exact else 0j
        out = {}
        for (p, q) in slots:
            for (pp, qq) in slots:
                shift = (pp - p, qq - q)
                rlo, rhi = ranges[(pp, qq)]
                clo, chi = ranges[(p, q)]
                blk = [[db[i][j] for j in range(clo, chi)]
                       for i in range(rlo, rhi)]
                if all(_is_zero_entry(x, tol) for row in blk for x in row):
                    continue
                tgt = out.setdefault(shift, [[zero] * n for _ in range(n)])
                for i in range(rlo, rhi):
                    for j in range(clo, chi):
                        tgt[i][j] = db[i][j]
        final = {}
        for shift, blockmat in out.items():
            final[shift] = mat_mul(Gb, mat_mul(blockmat, Gbinv))
        return final

    def zeta_ambient(self):
        """The zeta correction transported to the ambient space.

        Only the components (-1,-1), (-1,-2), (-2,-1) of delta are
        supported; anything else raises UnsupportedZeta.
        """
        slots = self.delta_hodge_slots()
        bad = [ab for ab in slots
               if ab not in ((-1, -1), (-1, -2), (-2, -1), (-2, -2))]
        if bad:
            raise UnsupportedZeta(bad)
        # the (-2,-2) component contributes nothing: the only universal
        # candidate is a multiple of delta_{-2,-2} (brackets of (-1,-1)
        # terms vanish), and the worked reduction chains force factor 0
        n = len(self.U)
        out = mat_zero(n, n, self.exact)
        mhi = (EG_I * ExactGaussian(Fraction(-1, 2))) if self.exact else -0.5j
        phi = (EG_I * ExactGaussian(Fraction(1, 2))) if self.exact else 0.5j
        if (-1, -2) in slots:
            out = mat_add(out, mat_scale(mhi, slots[(-1, -2)]))
        if (-2, -1) in slots:
            out = mat_add(out, mat_scale(phi, slots[(-2, -1)]))
        if self.exact and not mat_is_real(out):
            raise ValueError("zeta should be a real operator")
        return out

    def canonical_map(self):
        """U exp(zeta): carries the reference grading to the canonical
        splitting lift."""
        return mat_mul(self.U, mat_exp_nilpotent(self.zeta_ambient()))

    def canonical_weight_decomposition(self) -> WeightDecomposition:
        n = len(self.U)
        m = self.canonical_map()
        parts = {}
        for w, rows in self.V.items():
            lifted = [mat_vec(m, r) for r in rows]
            parts[w] = Subspace.span(lifted, n, exact=self.exact)
        return WeightDecomposition(parts, n, self.exact)

    def F_canonical(self) -> Filtration:
        """The graded lift of F(gr^M) along the canonical splitting."""
        return self.F0.apply(self.canonical_map())


def split_weight_lifts(M: Filtration, reps=None, exact=True):
    """Real lift rows for each graded weight of M.

    ``reps`` may pin the lifts (as for backdrop weight filtrations); the
    default takes echelon complements, which is deterministic.
    """
    out = {}
    prev = None
    lo, hi = M.support()
    for w in range(lo - 1, hi + 1):
        cur = M.at(w)
        d = cur.dim - (prev.dim if prev is not None else 0)
        if d > 0:
            if reps is not None and w in reps:
                rows = [coerce_vector(v, True) for v in reps[w]]
            else:
                rows = [tuple(r) for r in cur.complement_in(cur)] \
                    if prev is None else prev_complement(prev, cur)
            out[w] = tuple(rows)
        prev = cur
    if not exact:
        out = {w: tuple(tuple(complex(x) for x in r) for r in rows)
               for w, rows in out.items()}
    return out


def prev_complement(prev: Subspace, cur: Subspace):
    return [tuple(r) for r in prev.complement_in(cur)]


def decompose_mhs(M: Filtration, F: Filtration, reps=None,
                  tol=COMPARE_TOL,
                  graded_pieces=None) -> MixedDecomposition:
    """Decompose the mixed Hodge structure (M, F).

    Produces the unique pair (s', delta) with
    F = s'(exp(i delta) F(gr^M)), delta with Hodge components in the
    strictly negative quadrant for F(gr^M).  Verified by back substitution.

    ``graded_pieces`` may supply the induced filtrations on the graded
    quotients (in the lift coordinates) when the caller already has them.
    """
    n = M.ambient
    exact = F.exact
    V = split_weight_lifts(M, reps, exact)
    weights = sorted(V.keys())
    zero = EG_ZERO if exact else 0j
    one = EG_ONE if exact else 1.0 + 0j

    # coordinates adapted to the reference grading
    cols = []
    windex = []
    for w in weights:
        for r in V[w]:
            cols.append(r)
            windex.append(w)
    G = tuple(zip(*cols))
    Ginv = mat_inverse(G)

    # graded Hodge pieces, lifted through the reference grading
    abases = {}   # (p, q) -> list of ambient basis vectors, conj paired
    Mfl = M if exact else M  # M stays exact; meets coerce below
    for w in weights:
        d = len(V[w])
        flo, fhi = F.support()
        pieces = {}
        if graded_pieces is not None and w in graded_pieces:
            src = graded_pieces[w]
            for p in range(flo - 1, fhi + 2):
                pieces[p] = src.at(p)
        else:
            Mw = M.at(w) if exact else _to_float_sub(M.at(w))
            Mlow = M.at(w - 1) if exact else _to_float_sub(M.at(w - 1))
            solver_rows = tuple(V[w]) + tuple(
                Mlow.rows if exact else _to_float_sub(M.at(w - 1)).rows)
            # induced filtration on the w graded piece, in V_w coordinates
            for p in range(flo - 1, fhi + 2):
                inter = F.at(p).meet(Mw)
                rows = []
                for r in inter.rows:
                    sol = solve_right(solver_rows, r)
                    if sol is None:
                        raise NotMHS("graded projection failed")
                    rows.append(tuple(sol[:d]))
                pieces[p] = (Subspace(d, rows, exact) if rows
                             else Subspace.zero(d, exact))
        def piece_at(p):
            return pieces[min(max(p, flo - 1), fhi + 1)]

        src_filt = graded_pieces.get(w) if graded_pieces is not None \
            else None
        covered = 0
        for p in range(fhi + 1, flo - 2, -1):
            q = w - p
            if src_filt is not None:
                from .hodgedata import hodge_piece
                hpq = hodge_piece(src_filt, p, q)
            else:
                hpq = piece_at(p).meet(_conj_sub(piece_at(q)))
            if hpq.dim == 0:
                continue
            covered += hpq.dim
            rows = []
            for r in hpq.rows:
                amb = [zero] * n
                for c, vrow in zip(r, V[w]):
                    amb = [a + c * x for a, x in zip(amb, vrow)]
                rows.append(tuple(amb))
            if p > q:
                abases[(p, q)] = rows
            elif p == q:
                real = Subspace(n, rows, exact).real_points()
                abases[(p, q)] = [tuple(r) for r in real.rows]
            else:
                src = abases.get((q, p))
                if src is None or len(src) != len(rows):
                    raise NotMHS("conjugate Hodge pieces mismatch at "
                                 f"({p},{q})")
                abases[(p, q)] = [tuple(_conj_scalar(x) for x in r)
                                  for r in src]
        if covered != d:
            raise NotMHS(f"graded piece at weight {w} is not pure "
                         f"({covered} of {d})")

    slots = sorted(abases.keys())
    global_basis = []
    slot_ranges = {}
    for pq in slots:
        lo = len(global_basis)
        global_basis.extend(abases[pq])
        slot_ranges[pq] = (lo, len(global_basis))
    Gb = tuple(zip(*global_basis))
    Gbinv = mat_inverse(Gb)

    def f0_filtration():
        flo, fhi = F.support()
        steps = {}
        for p in range(flo - 1, fhi + 2):
            rows = []
            for (pp, qq), vecs in abases.items():
                if pp >= p:
                    rows.extend(vecs)
            steps[p] = (Subspace(n, rows, exact) if rows
                        else Subspace.zero(n, exact))
        return Filtration("dec", steps, n, exact,
                          check=False).normalized()

    F0 = f0_filtration()

    U = mat_identity(n, exact)
    Uinv = mat_identity(n, exact)
    delta0 = mat_zero(n, n, exact)
    ii = EG_I if exact else 1j
    span_depth = (weights[-1] - weights[0]) if weights else 0

    for k in range(1, span_depth + 1):
        Tinv = mat_mul(mat_exp_nilpotent(mat_scale(-ii, delta0)), Uinv)
        Dp = F.apply(Tinv)
        coords_cache = {}
        cfull = [[zero] * n for _ in range(n)]
        found = False
        for (p, q) in slots:
            w = p + q
            lo, hi = slot_ranges[(p, q)]
            for bi in range(lo, hi):
                e = global_basis[bi]
                v = _solve_leading(Dp.at(p), e, Ginv, windex, w, exact,
                                   coords_cache)
                if v is None:
                    raise NotMHS("no unipotent transporter; "
                                 "input is not a mixed Hodge structure")
                r = [x - y for x, y in zip(v, e)]
                rw = _component_at_weight(r, Ginv, windex, w - k, G, zero)
                if rw is None:
                    continue
                coords = mat_vec(Gbinv, rw)
                for t, cval in enumerate(coords):
                    if not _is_zero_entry(cval, tol):
                        cfull[t][bi] = cval
                        found = True
        if not found:
            continue
        nu_b = [[zero] * n for _ in range(n)]
        de_b = [[zero] * n for _ in range(n)]
        half = ExactGaussian(Fraction(1, 2)) if exact else 0.5
        mhalf_i = (EG_I * ExactGaussian(Fraction(-1, 2))) if exact else -0.5j
        for (p, q) in slots:
            for (pp, qq) in slots:
                a, bshift = pp - p, qq - q
                if a + bshift != -k or a >= 0:
                    continue
                blk = _block(cfull, slot_ranges[(pp, qq)],
                             slot_ranges[(p, q)])
                if bshift >= 0:
                    _add_block(nu_b, blk, slot_ranges[(pp, qq)],
                               slot_ranges[(p, q)])
                    # conjugate partner (slot with indices swapped)
                    if (q, p) in slots and (qq, pp) in slots:
                        _add_block(nu_b, _conj_block(blk),
                                   slot_ranges[(qq, pp)],
                                   slot_ranges[(q, p)])
                else:
                    # both indices negative; pair with the mirrored slot
                    if (q, p) not in slots or (qq, pp) not in slots:
                        continue
                    blk_m = _block(cfull, slot_ranges[(qq, pp)],
                                   slot_ranges[(q, p)])
                    cj = _conj_block(blk_m)
                    nu_part = [[half * (x + y) for x, y in zip(r1, r2)]
                               for r1, r2 in zip(blk, cj)]
                    de_part = [[mhalf_i * (x - y) for x, y in zip(r1, r2)]
                               for r1, r2 in zip(blk, cj)]
                    _add_block(nu_b, nu_part, slot_ranges[(pp, qq)],
                               slot_ranges[(p, q)])
                    _add_block(de_b, de_part, slot_ranges[(pp, qq)],
                               slot_ranges[(p, q)])
        nu_std = mat_mul(Gb, mat_mul(nu_b, Gbinv))
        de_std = mat_mul(Gb, mat_mul(de_b, Gbinv))
        if exact and not (mat_is_real(nu_std) and mat_is_real(de_std)):
            raise NotMHS("peeled corrections are not real")
        U = mat_mul(U, mat_exp_nilpotent(nu_std))
        Uinv = mat_mul(mat_exp_nilpotent(
            mat_scale(-EG_ONE if exact else -1.0, nu_std)), Uinv)
        delta0 = mat_add(delta0, de_std)

    # verification by back substitution
    T = mat_mul(U, mat_exp_nilpotent(mat_scale(ii, delta0)))
    recon = F0.apply(T)
    vtol = 1e-7
    lo1, hi1 = F.support()
    for p in range(lo1 - 1, hi1 + 2):
        a, b = recon.at(p), F.at(p)
        if exact:
            if a.rows != b.rows:
                raise NotMHS(f"back substitution failed at level {p}")
        elif a.dim != b.dim or not (a.contains(b, vtol)
                                    and b.contains(a, vtol)):
            raise NotMHS(f"back substitution failed at level {p}")

    delta_H = mat_mul(U, mat_mul(delta0, Uinv))
    F_split = F0.apply(U)
    db = mat_mul(Gbinv, mat_mul(delta0, Gb))
    slot_support = set()
    for (p, q) in slots:
        for (pp, qq) in slots:
            blk = _block(db, slot_ranges[(pp, qq)], slot_ranges[(p, q)])
            if any(not _is_zero_entry(x, tol) for row in blk for x in row):
                slot_support.add((pp - p, qq - q))
    return MixedDecomposition(weights, V, U, delta_H, F_split, slot_support,
                              abases, exact, delta0=delta0, F0=F0,
                              Uinv=Uinv,
                              slot_frames=(slots, slot_ranges, Gb, Gbinv))


def _conj_scalar(x):
    return x.conjugate() if isinstance(x, ExactGaussian) else complex(x).conjugate()


def _conj_sub(s: Subspace) -> Subspace:
    return s.conj()


def _conj_block(blk):
    return [[_conj_scalar(x) for x in row] for row in blk]


def _block(cfull, rrange, crange):
    return [[cfull[i][j] for j in range(*crange)] for i in range(*rrange)]


def _add_block(target, blk, rrange, crange):
    for ii_, i in enumerate(range(*rrange)):
        for jj, j in enumerate(range(*crange)):
            target[i][j] = target[i][j] + blk[ii_][jj]


def _solve_leading(sub: Subspace, e, Ginv, windex, w, exact,
                   coords_cache=None):
    """A vector of ``sub`` whose weight >= w part equals that of ``e``."""
    if sub.is_zero():
        return None
    idx = [i for i, ww in enumerate(windex) if ww >= w]
    key = (id(sub), w)
    rows_hi = None if coords_cache is None else coords_cache.get(key)
    if rows_hi is None:
        rows_hi = []
        for r in sub.rows:
            coords = mat_vec(Ginv, r)
            rows_hi.append(tuple(coords[i] for i in idx))
        if coords_cache is not None:
            coords_cache[key] = rows_hi
    e_coords = mat_vec(Ginv, e)
    e_hi = tuple(e_coords[i] for i in idx)
    x = solve_right([list(r) for r in rows_hi], e_hi)
    if x is None:
        return None
    n = len(e)
    zero = EG_ZERO if exact else 0j
    out = [zero] * n
    for c, r in zip(x, sub.rows):
        out = [o + c * y for o, y in zip(out, r)]
    return tuple(out)


def _component_at_weight(r, Ginv, windex, w, G, zero):
    coords = list(mat_vec(Ginv, r))
    keep = [c if windex[i] == w else zero for i, c in enumerate(coords)]
    if all(_is_zero_entry(c) for c in keep):
        return None
    return mat_vec(G, tuple(keep))


# ---------------------------------------------------------------------------
# backdrop level operations
# ---------------------------------------------------------------------------


def delta_decompose(b: HodgeBackdrop, F: Filtration):
    """The unique (s', delta) with F = s'(exp(i delta) F(gr^W))."""
    ok, reasons = b.is_in_D(F)
    if not ok:
        raise NotInD(f"not in the classifying space: {reasons}")
    pieces = {w: b.graded_piece(F, w) for w in b.weights()} \
        if F.exact else None
    dec = decompose_mhs(b.weight, F, reps=b.graded_reps,
                        graded_pieces=pieces)
    s_prime = _splitting_from_unipotent(b, dec.U, dec.exact)
    delta = _gr_operator_from_ambient(b, dec, s_prime)
    return s_prime, delta


def _splitting_from_unipotent(b, U, exact):
    g0 = gr_basis_matrix(b, exact)
    return SplittingOfW(b, mat_mul(U, g0))


def _gr_operator_from_ambient(b, dec: MixedDecomposition, s_prime):
    """Transport delta_H back to gr coordinates through s'."""
    L = s_prime.lift
    if dec.exact and dec.Uinv is not None:
        Linv = mat_mul(gr_basis_inverse(b), dec.Uinv)
    else:
        Linv = mat_inverse(L)
    m = mat_mul(Linv, mat_mul(dec.delta_H, L))
    return LElement(b, m)


def zeta_of(b: HodgeBackdrop, graded: GradedPoint, delta: LElement):
    """The correction zeta with components only in the printed range.

    zeta_{-1,-1} = 0, zeta_{-1,-2} = -(i/2) delta_{-1,-2},
    zeta_{-2,-1} = (i/2) delta_{-2,-1}; anything else is rejected.
    """
    slots = hodge_slot_decomposition(b, graded, delta.matrix)
    bad = [ab for ab in slots
           if ab not in ((-1, -1), (-1, -2), (-2, -1), (-2, -2))]
    if bad:
        raise UnsupportedZeta(bad)
    exact = delta.exact
    mhi = (EG_I * ExactGaussian(Fraction(-1, 2))) if exact else -0.5j
    phi = (EG_I * ExactGaussian(Fraction(1, 2))) if exact else 0.5j
    n = b.rank
    out = mat_zero(n, n, exact)
    if (-1, -2) in slots:
        out = mat_add(out, mat_scale(mhi, slots[(-1, -2)]))
    if (-2, -1) in slots:
        out = mat_add(out, mat_scale(phi, slots[(-2, -1)]))
    if exact and not mat_is_real(out):
        raise ValueError("zeta should be a real operator")
    return LElement(b, out)


def hodge_slot_decomposition(b: HodgeBackdrop, graded: GradedPoint, matrix):
    """Decompose a gr endomorphism into Hodge bidegree components.

    Returns {(a, b): matrix} keeping only nonzero components.
    """
    hodge = graded.hodge_subspaces()
    slots = sorted(hodge.keys())
    basis = []
    ranges = {}
    for pq in slots:
        lo = len(basis)
        basis.extend(hodge[pq].rows)
        ranges[pq] = (lo, len(basis))
    n = b.rank
    Gb = tuple(zip(*basis))
    Gbinv = mat_inverse(Gb)
    mb = mat_mul(Gbinv, mat_mul(matrix, Gb))
    exact = graded.exact and all(isinstance(x, ExactGaussian)
                                 for row in matrix for x in row)
    out = {}
    for (p, q) in slots:
        for (pp, qq) in slots:
            shift = (pp - p, qq - q)
            rlo, rhi = ranges[(pp, qq)]
            clo, chi = ranges[(p, q)]
            blk = [[mb[i][j] for j in range(clo, chi)]
                   for i in range(rlo, rhi)]
            if all(_is_zero_entry(x) for row in blk for x in row):
                continue
            if shift not in out:
                out[shift] = [[EG_ZERO if exact else 0j] * n
                              for _ in range(n)]
            tgt = [[EG_ZERO if exact else 0j] * n for _ in range(n)]
            for i in range(rlo, rhi):
                for j in range(clo, chi):
                    tgt[i][j] = mb[i][j]
            part = mat_mul(Gb, mat_mul(tgt, Gbinv))
            out[shift] = mat_add(out[shift], part)
    return out


def _decompose_point(b: HodgeBackdrop, F: Filtration):
    ok, reasons = b.is_in_D(F)
    if not ok:
        raise NotInD(f"not in the classifying space: {reasons}")
    pieces = {w: b.graded_piece(F, w) for w in b.weights()} \
        if F.exact else None
    return decompose_mhs(b.weight, F, reps=b.graded_reps,
                         graded_pieces=pieces)


def canonical_splitting(b: HodgeBackdrop, F: Filtration) -> SplittingOfW:
    """spl_W(F) = s' exp(zeta)."""
    dec = _decompose_point(b, F)
    lift = mat_mul(dec.canonical_map(), gr_basis_matrix(b, dec.exact))
    return SplittingOfW(b, lift)


def theta_recompose(b: HodgeBackdrop, graded: GradedPoint,
                    delta: LElement) -> Filtration:
    """theta(F, delta) = exp(-zeta) exp(i delta) F on gr coordinates."""
    zeta = zeta_of(b, graded, delta)
    exact = delta.exact and graded.exact
    ii = EG_I if exact else 1j
    m = mat_mul(mat_exp_nilpotent(mat_scale(-EG_ONE if exact else -1.0,
                                            zeta.matrix)),
                mat_exp_nilpotent(mat_scale(ii, delta.matrix)))
    return graded.gr_filtration().apply(m)


def chart_decode(t: SplitTriple) -> Filtration:
    """(s, F, delta) -> s(theta(F, delta))."""
    b = t.s.backdrop
    theta = theta_recompose(b, t.graded, t.delta)
    return t.s.apply_graded(theta)


def chart_encode(b: HodgeBackdrop, F: Filtration) -> SplitTriple:
    dec = _decompose_point(b, F)
    s_prime = _splitting_from_unipotent(b, dec.U, dec.exact)
    delta = _gr_operator_from_ambient(b, dec, s_prime)
    lift = mat_mul(dec.canonical_map(), gr_basis_matrix(b, dec.exact))
    graded = GradedPoint.of(b, F)
    return SplitTriple(SplittingOfW(b, lift), graded, delta)


def assoc_rsplit(M: Filtration, F: Filtration, reps=None) -> Filtration:
    """The R-split filtration s'(F(gr^M)) attached to the MHS (M, F)."""
    dec = decompose_mhs(M, F, reps=reps)
    return dec.F_split


def is_r_split(M: Filtration, F: Filtration, reps=None) -> bool:
    return decompose_mhs(M, F, reps=reps).delta_is_zero()
