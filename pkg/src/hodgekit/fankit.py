"""Rational cones and fans: the barycentric subdivision, its constrained
variant, the orbit fan of a per weight family of filtrations, the cone of
an admissible set, and point level log modification data.

Cones are stored with both exact rational generators and an inequality
description; all arithmetic is exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


class ConeNotInFan(ValueError):
    pass


class NotAdmissibleCone(ValueError):
    pass


def _normalize_ray(v):
    """Primitive integer vector with positive leading sign."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(
            den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    return tuple(ints)


class RationalCone:
    """A sharp rational polyhedral cone with dual descriptions.

    generators: extreme rays (primitive integer vectors, sorted);
    inequalities: rows L with the cone = {x : L x >= 0 for all L} cut
    inside the linear span (equalities listed separately).
    """

    def __init__(self, dim_ambient, rays, inequalities, equalities,
                 label=None):
        self.ambient = dim_ambient
        self.rays = tuple(sorted(tuple(r) for r in rays))
        self.inequalities = tuple(tuple(r) for r in inequalities)
        self.equalities = tuple(tuple(r) for r in equalities)
        self.label = label

    @property
    def dim(self):
        if not self.rays:
            return 0
        rows = [[Fraction(x) for x in r] for r in self.rays]
        return _rank(rows)

    def contains(self, x):
        x = [Fraction(v) for v in x]
        for e in self.equalities:
            if sum(Fraction(a) * v for a, v in zip(e, x)) != 0:
                return False
        for ineq in self.inequalities:
            if sum(Fraction(a) * v for a, v in zip(ineq, x)) < 0:
                return False
        return True

    def interior_point(self):
        """A point in the relative interior (the ray sum)."""
        if not self.rays:
            return tuple(Fraction(0) for _ in range(self.ambient))
        out = [Fraction(0)] * self.ambient
        for r in self.rays:
            out = [a + b for a, b in zip(out, r)]
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, RationalCone):
            return NotImplemented
        return self.ambient == other.ambient and self.rays == other.rays

    def __hash__(self):
        return hash((self.ambient, self.rays))

    def __repr__(self):
        return f"RationalCone(dim {self.dim}, rays {self.rays})"

    def is_sharp(self):
        if not self.rays:
            return True
        # 0 must not be a positive combination; equivalently no ray has
        # its negative in the cone
        return all(not self.contains([-x for x in r]) for r in self.rays)

    def facets_rows(self):
        """The irredundant facet inequalities (those saturated by a ray
        set of rank dim - 1)."""
        d = self.dim
        out = []
        for L in self.inequalities:
            sat = [r for r in self.rays
                   if sum(Fraction(a) * v for a, v in zip(L, r)) == 0]
            if not sat and d > 0:
                continue
            rank = _rank([[Fraction(x) for x in r] for r in sat]) \
                if sat else 0
            if rank == d - 1 or d <= 1:
                out.append(L)
        return out

    def faces(self):
        """All faces, computed by saturating facet subsets."""
        seen = {}
        facets = self.facets_rows()
        m = len(facets)
        for rset in range(1 << m):
            eqs = [facets[i] for i in range(m) if rset >> i & 1]
            rays = [r for r in self.rays
                    if all(sum(Fraction(a) * v for a, v in zip(e, r)) == 0
                           for e in eqs)]
            face = cone_from_rays(self.ambient, rays)
            seen[face.rays] = face
        if () not in seen:
            seen[()] = cone_from_rays(self.ambient, [])
        return list(seen.values())

    def meet(self, other):
        ineq = list(self.inequalities) + list(other.inequalities)
        eqs = list(self.equalities) + list(other.equalities)
        return cone_from_inequalities(self.ambient, ineq, eqs)

    def is_face_of(self, other):
        if not other.contains_cone(self):
            return False
        return self in other.faces()

    def contains_cone(self, other):
        return all(self.contains(r) for r in other.rays) \
            and (other.rays or True)

    def transformed(self, matrix):
        """Image under an invertible integer matrix (columns act)."""
        rays = [_normalize_ray(_matvec(matrix, r)) for r in self.rays]
        inv = _mat_inv_frac(matrix)
        ineq = [_vecmat(L, inv) for L in self.inequalities]
        eqs = [_vecmat(L, inv) for L in self.equalities]
        return RationalCone(self.ambient, rays,
                            [_normalize_ray(L) for L in ineq],
                            [_normalize_ray(L) for L in eqs], self.label)


def _matvec(m, v):
    return tuple(sum(Fraction(m[i][j]) * Fraction(v[j])
                     for j in range(len(v))) for i in range(len(m)))


def _vecmat(v, m):
    return tuple(sum(Fraction(v[i]) * Fraction(m[i][j])
                     for i in range(len(v))) for j in range(len(m[0])))


def _rank(rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * bq for a, bq in zip(rows[i], pr)]
        rank += 1
    return rank


def _mat_inv_frac(m):
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)]
           + [Fraction(1 if i == j else 0) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        f = aug[c][c]
        aug[c] = [x / f for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                g = aug[i][c]
                aug[i] = [x - g * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def cone_from_rays(ambient, rays) -> RationalCone:
    """Cone spanned by rays, with inequalities recovered by enumeration.

    Facet normals are found among null spaces of (d-1)-subsets of rays;
    exact and ample for the small ambient dimensions used here.
    """
    rays = [_normalize_ray(r) for r in rays if any(Fraction(x) for x in r)]
    uniq = sorted(set(rays))
    if not uniq:
        eqs = [tuple(Fraction(1 if i == j else 0) for j in range(ambient))
               for i in range(ambient)]
        return RationalCone(ambient, [], [], eqs)
    # linear span and its equalities
    span_rows = [[Fraction(x) for x in r] for r in uniq]
    eqs = _null_space(span_rows, ambient)
    d = _rank(span_rows)
    ineqs = []
    for sub in itertools.combinations(uniq, max(d - 1, 0)):
        rows = [[Fraction(x) for x in r] for r in sub] + \
            [[Fraction(x) for x in e] for e in eqs]
        normals = _null_space_rows(rows, ambient)
        for nv in normals:
            vals = [sum(Fraction(a) * Fraction(x) for a, x in zip(nv, r))
                    for r in uniq]
            if all(v >= 0 for v in vals) and any(v > 0 for v in vals):
                ineqs.append(_normalize_ray(nv))
            elif all(v <= 0 for v in vals) and any(v < 0 for v in vals):
                ineqs.append(_normalize_ray([-Fraction(x) for x in nv]))
    ineqs = sorted(set(ineqs))
    cone = RationalCone(ambient, uniq, ineqs, [_normalize_ray(e)
                                               for e in eqs])
    # reduce to extreme rays: a ray is extreme iff it saturates a set of
    # inequalities of rank d-1 within the span
    extreme = []
    for r in uniq:
        sat = [L for L in ineqs
               if sum(Fraction(a) * x for a, x in zip(L, r)) == 0]
        rows = [[Fraction(x) for x in L] for L in sat] + \
            [[Fraction(x) for x in e] for e in eqs]
        if not rows:
            rank = 0
        else:
            rank = _rank(rows)
        if rank >= ambient - 1 or d == 1:
            extreme.append(r)
    if extreme and len(extreme) != len(uniq):
        cone = RationalCone(ambient, extreme, ineqs,
                            [_normalize_ray(e) for e in eqs])
    return cone


def _null_space(rows, ambient):
    return _null_space_rows([[Fraction(x) for x in r] for r in rows],
                            ambient)


def _null_space_rows(rows, ambient):
    rows = [list(r) for r in rows]
    rank = 0
    pivots = []
    for c in range(ambient):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        rows[rank] = [x / pr[c] for x in pr]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * bq for a, bq in zip(rows[i], rows[rank])]
        pivots.append(c)
        rank += 1
    out = []
    for fcol in range(ambient):
        if fcol in pivots:
            continue
        v = [Fraction(0)] * ambient
        v[fcol] = Fraction(1)
        for ridx, p in enumerate(pivots):
            v[p] = -rows[ridx][fcol]
        out.append(tuple(v))
    return out


def cone_from_inequalities(ambient, inequalities, equalities,
                           label=None) -> RationalCone:
    """Cone {x : eq x = 0, ineq x >= 0} with extreme rays enumerated from
    active inequality subsets (double description at desk scale).

    An extreme ray is cut out by the equalities plus a subset of
    inequalities whose joint null space is a line; small ambient
    dimensions keep the subset scan cheap.
    """
    ineqs = sorted({tuple(Fraction(x) for x in L) for L in inequalities})
    eqs = sorted({tuple(Fraction(x) for x in L) for L in equalities})
    rays = set()
    m = len(ineqs)
    base_rows = [list(e) for e in eqs]
    for size in range(0, min(m, ambient) + 1):
        for sub in itertools.combinations(range(m), size):
            rows = base_rows + [list(ineqs[i]) for i in sub]
            null = _null_space_rows([list(r) for r in rows] or
                                    [[Fraction(0)] * ambient], ambient)
            if len(null) != 1:
                continue
            v = null[0]
            for cand in (v, tuple(-x for x in v)):
                if all(sum(a * x for a, x in zip(L, cand)) >= 0
                       for L in ineqs) \
                        and all(sum(a * x for a, x in zip(E, cand)) == 0
                                for E in eqs):
                    if any(cand):
                        rays.add(_normalize_ray(cand))
    # keep extreme rays only
    base = cone_from_rays(ambient, sorted(rays))
    return RationalCone(ambient, base.rays,
                        [_normalize_ray(L) for L in ineqs],
                        [_normalize_ray(E) for E in eqs], label)


class FanStruct:
    """A finite set of cones closed under faces with facial intersections."""

    def __init__(self, cones, check=True):
        uniq = {}
        for c in cones:
            uniq[c.rays] = c
        self.cones = list(uniq.values())
        if check:
            ok, why = self.validate()
            if not ok:
                raise ValueError(f"not a fan: {why}")

    def validate(self):
        """Sharpness, face closure, and facial pairwise intersections.

        Intersections are checked on maximal cones; for a face closed set
        this implies the condition for every pair, since faces of a cone
        intersect in faces."""
        for c in self.cones:
            if not c.is_sharp():
                return False, f"cone {c.rays} is not sharp"
            for f in c.faces():
                if f not in self.cones:
                    return False, f"face {f.rays} of {c.rays} missing"
        maximal = self.maximal_cones()
        for i, a in enumerate(maximal):
            faces_a = {f.rays for f in a.faces()}
            for b in maximal[i + 1:]:
                inter = a.meet(b)
                if inter.rays not in faces_a or \
                        inter.rays not in {f.rays for f in b.faces()}:
                    return False, (f"intersection of {a.rays} and {b.rays} "
                                   "is not a common face")
        return True, ""

    def __contains__(self, cone):
        return any(c == cone for c in self.cones)

    def by_dim(self):
        out = {}
        for c in self.cones:
            out.setdefault(c.dim, []).append(c)
        return out

    def maximal_cones(self):
        out = []
        for c in self.cones:
            if not any(o is not c and o.contains_cone(c) and o != c
                       for o in self.cones):
                out.append(c)
        return out


# ---------------------------------------------------------------------------
# barycentric subdivisions
# ---------------------------------------------------------------------------


class SdIndex:
    """A pair (n, g): g maps the index set onto levels {0..n} hitting
    every positive level."""

    def __init__(self, n, g):
        self.n = n
        self.g = dict(g)
        image = set(self.g.values())
        if not set(range(1, n + 1)) <= image:
            raise ValueError("levels 1..n must all be hit")
        if image - set(range(0, n + 1)):
            raise ValueError("levels outside 0..n")

    def __repr__(self):
        return f"SdIndex(n={self.n}, g={self.g})"


def sd_cone(universe, n, g) -> RationalCone:
    """C(n, g) = {a >= 0 : a_l <= a_m if g(l) <= g(m); a_l = 0 if
    g(l) = 0}."""
    amb = len(universe)
    pos = {lam: i for i, lam in enumerate(universe)}
    ineqs = []
    eqs = []
    for lam in universe:
        row = [Fraction(0)] * amb
        row[pos[lam]] = Fraction(1)
        if g[lam] == 0:
            eqs.append(tuple(row))
        else:
            ineqs.append(tuple(row))
    for a in universe:
        for b in universe:
            if a != b and g[a] <= g[b]:
                row = [Fraction(0)] * amb
                row[pos[b]] += 1
                row[pos[a]] -= 1
                ineqs.append(tuple(row))
    cone = cone_from_inequalities(amb, ineqs, eqs, label=(n, tuple(
        sorted(g.items()))))
    return cone


def barycentric_sd(universe) -> FanStruct:
    """The barycentric subdivision of the positive orthant on a finite
    index set, with (n, g) labels."""
    universe = list(universe)
    cones = []
    for n in range(len(universe) + 1):
        for g in _level_functions(universe, n):
            cones.append(sd_cone(universe, n, g))
    fan = FanStruct(cones, check=False)
    return fan


def _level_functions(universe, n):
    for values in itertools.product(range(n + 1), repeat=len(universe)):
        g = dict(zip(universe, values))
        if set(range(1, n + 1)) <= set(values):
            yield g


def sd_prime(universe, chains) -> FanStruct:
    """The subdivision cones lying inside the order constraint region.

    chains: list of lists of indices ordered so that later entries must
    carry smaller coordinates (a_j <= a_{j'} when j >= j' in a chain).
    """
    cones = []
    for n in range(len(universe) + 1):
        for g in _level_functions(universe, n):
            ok = True
            for chain in chains:
                for x, y in zip(chain, chain[1:]):
                    # y comes later: must have a_y <= a_x, i.e. g(y)<=g(x)
                    if g[y] > g[x]:
                        ok = False
            if ok:
                cones.append(sd_cone(universe, n, g))
    return FanStruct(cones, check=False)


def sigma_Q(per_weight) -> FanStruct:
    """The fan attached to per weight ordered filtration lists.

    per_weight: w -> ordered list of labels (most twisted last, matching
    the variance order).  The subdivision lives in the product of the
    positive orthants, transported through the cumulative coordinate
    isomorphism c_{w,j} = sum_{k >= j} b_{w,k}.
    """
    universe = []
    chains = []
    for w in sorted(per_weight):
        chain = [(w, j) for j in range(len(per_weight[w]))]
        universe.extend(chain)
        # ordering: Q(w) is listed increasing; larger j means larger
        # filtration, whose cumulative coordinate is smaller
        chains.append(list(chain))
    inner = sd_prime(universe, chains)
    # transport through the inverse of b -> c
    amb = len(universe)
    pos = {lam: i for i, lam in enumerate(universe)}
    # c = T b with T upper triangular per weight block; cones live in c
    T = [[Fraction(0)] * amb for _ in range(amb)]
    for w in sorted(per_weight):
        labels = [(w, j) for j in range(len(per_weight[w]))]
        for j, lam in enumerate(labels):
            for k in range(j, len(labels)):
                T[pos[lam]][pos[labels[k]]] = Fraction(1)
    Tinv = _mat_inv_frac(T)
    cones = [c.transformed(Tinv) for c in inner.cones]
    for c, src in zip(cones, inner.cones):
        c.label = src.label
    return FanStruct(cones, check=False)


def sigma_of_phi(per_weight, members) -> RationalCone:
    """The cone of an admissible set in the coordinates of sigma_Q.

    members: list of dicts w -> level index (position in per_weight[w]),
    omitting weights where the member induces the trivial filtration.
    Each member contributes the indicator ray of its slots: coordinates
    vanish away from the occupied slots and agree across the slots of one
    member; the cone is the span of these rays and has dimension the
    number of members.
    """
    universe = []
    for w in sorted(per_weight):
        universe.extend((w, j) for j in range(len(per_weight[w])))
    amb = len(universe)
    pos = {lam: i for i, lam in enumerate(universe)}
    rays = []
    for m in members:
        slots = [(w, lev) for w, lev in sorted(m.items()) if lev is not None]
        if not slots:
            raise NotAdmissibleCone("member with no nontrivial weight")
        ray = [Fraction(0)] * amb
        for s in slots:
            ray[pos[s]] = Fraction(1)
        rays.append(tuple(ray))
    cone = cone_from_rays(amb, rays)
    if cone.dim != len(members):
        raise NotAdmissibleCone("member rays are not independent")
    return cone


def phi_of_cone(per_weight, cone: RationalCone):
    """Inverse of the cone assignment: the extreme rays are the member
    indicator vectors."""
    universe = []
    for w in sorted(per_weight):
        universe.extend((w, j) for j in range(len(per_weight[w])))
    pos = {lam: i for i, lam in enumerate(universe)}
    members = []
    for ray in cone.rays:
        m = {}
        for lam in universe:
            v = ray[pos[lam]]
            if v not in (0, 1):
                raise NotAdmissibleCone("cone ray is not an indicator "
                                        "vector")
            if v == 1:
                m[lam[0]] = lam[1]
        if m:
            members.append(m)
    members.sort(key=lambda m: tuple(m.get(w, -1)
                                     for w in sorted(per_weight)))
    return members


# ---------------------------------------------------------------------------
# log modification data at the level of points
# ---------------------------------------------------------------------------


def logmod_point(fan: FanStruct, degenerate, sigma: RationalCone,
                 h_rank=None):
    """Validity of a point (s, sigma, h) of the log modification.

    degenerate: indices (into the ambient coordinates) where the base
    point's monoid coordinates vanish.  Conditions: no nonzero nonnegative
    functional on sigma is supported on the degenerate set and invertible
    (sharpness at the point), and the h part is a torsor under the
    annihilator lattice of sigma restricted to the degenerate block.
    Returns a report with the degrees of freedom of h.
    """
    if sigma not in fan:
        raise ConeNotInFan(f"{sigma!r} not in the fan")
    amb = sigma.ambient
    # P(sigma)^x: functionals vanishing on sigma, restricted to the
    # degenerate coordinates
    perp = _null_space([[Fraction(x) for x in r] for r in sigma.rays]
                       or [[Fraction(0)] * amb], amb)
    if not sigma.rays:
        perp = [tuple(Fraction(1 if i == j else 0) for j in range(amb))
                for i in range(amb)]
    restr = [tuple(v[i] for i in degenerate) for v in perp]
    # condition: the restricted lattice meets the nonnegative orthant
    # only at zero
    ok1 = not _lattice_meets_positive(restr, len(degenerate))
    # the cone must be supported inside the degenerate block
    ok2 = all(all(r[i] == 0 for i in range(amb) if i not in degenerate)
              for r in sigma.rays)
    dof = _rank([[Fraction(x) for x in v] for v in restr]) if restr else 0
    return {"valid": ok1 and ok2,
            "sharp_at_point": ok1,
            "supported_on_degenerate": ok2,
            "h_degrees_of_freedom": dof}


def _lattice_meets_positive(vectors, dim):
    """Does the rational span of vectors contain a nonzero nonnegative
    vector?  Decided by scanning sign patterns of small combinations."""
    if dim == 0 or not vectors:
        return False
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = _rank([list(r) for r in rows])
    if rank == 0:
        return False
    if rank == dim:
        return True
    # Fourier-Motzkin style: solve for a nonneg combo via LP on a grid of
    # supports (dim is tiny here)
    basis = _row_basis(rows, dim)
    for support in _nonempty_subsets(range(dim)):
        # look for an element with chosen support nonneg, complement zero
        eqs = []
        for i in range(dim):
            if i not in support:
                eqs.append([b[i] for b in basis])
        sols = _null_space_rows([list(e) for e in eqs] if eqs else
                                [[Fraction(0)] * len(basis)], len(basis))
        for s in sols:
            v = [sum(Fraction(si) * b[i] for si, b in zip(s, basis))
                 for i in range(dim)]
            if all(x >= 0 for x in v) and any(x > 0 for x in v):
                return True
            if all(x <= 0 for x in v) and any(x < 0 for x in v):
                return True
    return False


def _row_basis(rows, dim):
    out = []
    cur_rank = 0
    for r in rows:
        cand = out + [r]
        if _rank([list(x) for x in cand]) > cur_rank:
            out.append(r)
            cur_rank += 1
    return out


def _nonempty_subsets(idx):
    idx = list(idx)
    for r in range(1, len(idx) + 1):
        yield from (set(c) for c in itertools.combinations(idx, r))


def enumerate_fiber(fan: FanStruct, degenerate):
    """The valid (sigma, h degrees of freedom) pairs over a base point."""
    out = []
    for c in fan.cones:
        rep = logmod_point(fan, degenerate, c)
        if rep["valid"]:
            out.append((c, rep["h_degrees_of_freedom"]))
    return out
