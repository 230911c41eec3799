from fractions import Fraction

import pytest

from hodgekit import fixtures as fx
from hodgekit.exactla import ExactGaussian, Subspace, mat_eq, \
    mat_exp_nilpotent, mat_mul, mat_scale
from hodgekit.splitcore import (
    EG_I,
    GradedPoint,
    LElement,
    NotMHS,
    SplitTriple,
    SplittingOfW,
    UnsupportedZeta,
    assoc_rsplit,
    canonical_splitting,
    chart_decode,
    chart_encode,
    decompose_mhs,
    deligne_bigrading,
    delta_decompose,
    gr_basis_matrix,
    is_mhs,
    theta_recompose,
    zeta_of,
)

from conftest import rand_frac, rand_gauss, rand_upper, random_point, seeded

I = ExactGaussian(0, 1)


# -- bigradings ---------------------------------------------------------------


def test_bigrading_pure_weight_minus_one():
    b = fx.backdrop0()
    F = fx.point0(I)
    big = deligne_bigrading(b.weight, F)
    assert big[(0, -1)] == Subspace.span([(I, ExactGaussian(1))])
    assert big[(-1, 0)] == big[(0, -1)].conj()


def test_bigrading_real_split_case():
    b = fx.backdrop1()
    s = ExactGaussian(3)
    big = deligne_bigrading(b.weight, fx.point1(s))
    assert big[(0, 0)] == Subspace.span([(s, ExactGaussian(1))])
    assert big[(-1, -1)] == Subspace.span([(1, 0)])


def test_bigrading_of_limit_structure():
    # the weight filtration of the Jordan block paired with the limit line
    from hodgekit.relmono import relative_monodromy
    b = fx.backdrop3()
    M = relative_monodromy(fx.nilp3(), b.weight)
    r1 = Filtration_of_r1()
    big = deligne_bigrading(M, r1)
    gen = (ExactGaussian(Fraction(-1, 2)), I, ExactGaussian(1))
    assert big[(0, 0)].contains_vector(gen)


def Filtration_of_r1():
    from hodgekit.hodgedata import Filtration
    gen0 = Subspace.span([(ExactGaussian(Fraction(-1, 2)), I,
                           ExactGaussian(1))])
    genm1 = gen0.join(Subspace.span([(I, ExactGaussian(1),
                                      ExactGaussian(0))]))
    return Filtration("dec", {0: gen0, -1: genm1,
                              -2: Subspace.full(3, True)}, 3, True)


def test_bigrading_rejects_non_mhs():
    b = fx.backdrop3()
    # the pure weight filtration of the backdrop with a filtration whose
    # graded pieces cannot be pure of the required weights
    from hodgekit.hodgedata import Filtration
    bad = Filtration("dec", {0: Subspace.span([(1, 0, 0), (0, 1, 0)]),
                             -2: Subspace.full(3, True)}, 3, True)
    assert not is_mhs(b.weight, bad)
    with pytest.raises(NotMHS):
        deligne_bigrading(b.weight, bad)


# -- the unique (s', delta) pair ---------------------------------------------


def test_delta_decompose_printed_values():
    b1 = fx.backdrop1()
    sp, d = delta_decompose(b1, fx.point1(ExactGaussian(2, 3)))
    assert sp.column(0, 0) == (ExactGaussian(2), ExactGaussian(1))
    assert d.entry_gr(-2, 0, 0, 0) == ExactGaussian(3)

    b3 = fx.backdrop3()
    sp3, d3 = delta_decompose(b3, fx.point3(I, ExactGaussian(1, 2),
                                            ExactGaussian(3, 4)))
    assert d3.entry_gr(-3, 0, 0, 0) == ExactGaussian(2)
    assert d3.entry_gr(-3, 1, 0, 0) == ExactGaussian(4)


def test_delta_zero_iff_split():
    b = fx.backdrop1()
    _, d = delta_decompose(b, fx.point1(ExactGaussian(5)))
    assert d.is_zero()
    _, d2 = delta_decompose(b, fx.point1(ExactGaussian(5, 1)))
    assert not d2.is_zero()


@pytest.mark.parametrize("name", ["ex0", "exI", "exII", "exIII", "exIV",
                                  "exV"])
def test_delta_decompose_back_substitutes(name):
    rng = seeded(f"backsub-{name}")
    b = fx.BACKDROPS[name]()
    for _ in range(12):
        F = random_point(name, rng)
        sp, d = delta_decompose(b, F)
        graded = GradedPoint.of(b, F)
        exp_idelta = mat_exp_nilpotent(mat_scale(EG_I, d.matrix))
        rebuilt = sp.apply_graded(
            graded.gr_filtration().apply(exp_idelta))
        assert rebuilt == F


def test_zeta_formula_exIII():
    b = fx.backdrop3()
    rng = seeded("zeta")
    for _ in range(20):
        tau = rand_upper(rng)
        d1, d2 = rand_frac(rng), rand_frac(rng)
        x, y = tau.re, tau.im
        delta = LElement(b, fx.nilpotent_from_images(3, {2: (d1, d2, 0)}))
        graded = GradedPoint.of(b, fx.point3(tau, 0, 0))
        z = zeta_of(b, graded, delta)
        v1 = (-d1 * x + d2 * (x * x + y * y)) / (2 * y)
        v2 = (-d1 + d2 * x) / (2 * y)
        assert z.entry_gr(-3, 0, 0, 0) == ExactGaussian(v1)
        assert z.entry_gr(-3, 1, 0, 0) == ExactGaussian(v2)


def test_zeta_zero_on_pure_depth_two():
    b = fx.backdrop1()
    delta = LElement(b, fx.nilpotent_from_images(2, {1: (Fraction(7), 0)}))
    graded = GradedPoint.of(b, fx.point1(0))
    assert zeta_of(b, graded, delta).is_zero()


def test_zeta_rejects_unsupported_components():
    # a backdrop whose span four drop produces (-1,-3) and (-3,-1)
    # components, which are outside the implemented range
    from hodgekit.hodgedata import Filtration, HodgeBackdrop
    W = Filtration("inc", {-4: Subspace.span([(1, 0, 0), (0, 1, 0)]),
                           0: Subspace.full(3, True)}, 3, True)
    b = HodgeBackdrop(3, W, {0: [[1]], -4: [[0, 1], [1, 0]]},
                      {(0, 0): 1, (-1, -3): 1, (-3, -1): 1})
    pieces = {
        0: Filtration("dec", {0: Subspace.span([(1,)], ambient=1)},
                      1, True),
        -4: Filtration("dec", {-1: Subspace.span([(I, ExactGaussian(1))]),
                               -3: Subspace.full(2, True)}, 2, True),
    }
    graded = GradedPoint(b, pieces)
    delta = LElement(b, fx.nilpotent_from_images(
        3, {2: (Fraction(1), Fraction(2), 0)}))
    with pytest.raises(UnsupportedZeta) as err:
        zeta_of(b, graded, delta)
    assert (-1, -3) in err.value.slots or (-3, -1) in err.value.slots


def test_canonical_splitting_printed_values():
    b3 = fx.backdrop3()
    z = ExactGaussian(Fraction(-1, 4), 5)
    y1 = Fraction(3, 2)
    E = mat_exp_nilpotent(mat_scale(ExactGaussian(0, y1), fx.nilp3()))
    s = canonical_splitting(b3, fx.point3(I, z, I).apply(E))
    col = s.column(0, 0)
    assert col[0] == ExactGaussian(z.re + Fraction(1, 2))
    assert col[1] == ExactGaussian(-z.im / (2 * (1 + y1)))

    b2 = fx.backdrop2()
    a = Fraction(4, 3)
    for y1 in (Fraction(0), Fraction(2), Fraction(17, 5)):
        E2 = mat_exp_nilpotent(mat_scale(ExactGaussian(0, y1), fx.nilp2()))
        s2 = canonical_splitting(b2, fx.point2(I, ExactGaussian(0, a))
                                 .apply(E2))
        col2 = s2.column(0, 0)
        assert col2[0] == ExactGaussian(0)
        assert col2[1] == ExactGaussian(-a / (1 + y1))


def test_canonical_splitting_exIV_inverse_formulas():
    b4 = fx.backdrop4()
    tau = I
    zs = (ExactGaussian(0, 1), ExactGaussian(0, 1), ExactGaussian(0, 1))
    t = chart_encode(b4, fx.point4(tau, *zs))
    # s5 = -Im z3 / Im tau = -1, s1 = Im z1 / Im tau = 1, rest 0
    assert t.s.column(-1, 0)[0] == ExactGaussian(1)
    assert t.s.column(-1, 1)[0] == ExactGaussian(0)
    c = t.s.column(0, 0)
    assert (c[0], c[1], c[2]) == (ExactGaussian(0), ExactGaussian(0),
                                  ExactGaussian(-1))


def test_theta_recompose():
    b3 = fx.backdrop3()
    tau = rand_upper(seeded("theta"))
    d1, d2 = Fraction(2), Fraction(-3)
    x, y = tau.re, tau.im
    delta = LElement(b3, fx.nilpotent_from_images(3, {2: (d1, d2, 0)}))
    graded = GradedPoint.of(b3, fx.point3(tau, 0, 0))
    th = theta_recompose(b3, graded, delta)
    v1 = ExactGaussian((-d1 * x + d2 * (x * x + y * y)) / (2 * y))
    v2 = ExactGaussian((-d1 + d2 * x) / (2 * y))
    gen = (-v1 + ExactGaussian(0, d1), -v2 + ExactGaussian(0, d2),
           ExactGaussian(1))
    assert th.at(0) == Subspace.span([gen])
    # delta = 0 leaves the graded filtration unchanged
    th0 = theta_recompose(b3, graded, LElement.zero(b3))
    assert th0 == graded.gr_filtration()


def test_chart_round_trip_examples():
    rng = seeded("chart")
    for name in ("exI", "exII", "exIII", "exIV", "exV"):
        b = fx.BACKDROPS[name]()
        for _ in range(10):
            F = random_point(name, rng)
            t = chart_encode(b, F)
            assert chart_decode(t) == F


def test_chart_decode_formulas_exII():
    b2 = fx.backdrop2()
    rng = seeded("chartII")
    for _ in range(10):
        tau = rand_upper(rng)
        s1, s2 = rand_frac(rng), rand_frac(rng)
        lift = [list(r) for r in gr_basis_matrix(b2)]
        lift[0][2] = ExactGaussian(s1)
        lift[1][2] = ExactGaussian(s2)
        s = SplittingOfW(b2, tuple(tuple(r) for r in lift))
        graded = GradedPoint.of(b2, fx.point2(tau, 0))
        F = chart_decode(SplitTriple(s, graded, LElement.zero(b2)))
        z = ExactGaussian(s1) - ExactGaussian(s2) * tau
        assert F == fx.point2(tau, z)


def test_chart_decode_formulas_exIV():
    b4 = fx.backdrop4()
    rng = seeded("chartIV")
    for _ in range(10):
        tau = rand_upper(rng)
        svals = [rand_frac(rng) for _ in range(5)]
        d = rand_frac(rng)
        lift = [list(r) for r in gr_basis_matrix(b4)]
        # s(e2') = s1 e1 + e2, s(e3') = s2 e1 + e3,
        # s(e4') = s3 e1 + s4 e2 + s5 e3 + e4
        lift[0][1] = ExactGaussian(svals[0])
        lift[0][2] = ExactGaussian(svals[1])
        lift[0][3] = ExactGaussian(svals[2])
        lift[1][3] = ExactGaussian(svals[3])
        lift[2][3] = ExactGaussian(svals[4])
        s = SplittingOfW(b4, tuple(tuple(r) for r in lift))
        delta = LElement(b4, fx.nilpotent_from_images(4, {3: (d, 0, 0, 0)}))
        graded = GradedPoint.of(b4, fx.point4(tau, 0, 0, 0))
        F = chart_decode(SplitTriple(s, graded, delta))
        s1, s2, s3, s4, s5 = [ExactGaussian(v) for v in svals]
        z1 = s1 * tau + s2
        z2 = s3 - s5 * (s1 * tau + s2) + ExactGaussian(0, d)
        z3 = s4 - s5 * tau
        assert F == fx.point4(tau, z1, z2, z3)


def test_assoc_rsplit():
    b1 = fx.backdrop1()
    F = fx.point1(ExactGaussian(2, 3))
    # dropping the imaginary twist leaves the real part
    assert assoc_rsplit(b1.weight, F, reps=b1.graded_reps) == \
        fx.point1(ExactGaussian(2))
    # r-split input returns itself
    F0 = fx.point1(ExactGaussian(2))
    assert assoc_rsplit(b1.weight, F0, reps=b1.graded_reps) == F0


def test_assoc_rsplit_matches_exp_of_delta():
    rng = seeded("rsplit")
    for name in ("exI", "exII", "exIII", "exIV"):
        b = fx.BACKDROPS[name]()
        for _ in range(6):
            F = random_point(name, rng)
            dec = decompose_mhs(b.weight, F, reps=b.graded_reps)
            via_exp = F.apply(mat_exp_nilpotent(
                mat_scale(-EG_I, dec.delta_H)))
            assert dec.F_split == via_exp


def test_assoc_rsplit_limit_filtration():
    # the graded split structure attached to the Jordan block limit:
    # twisting back by the block recovers the printed limit line
    from hodgekit.relmono import relative_monodromy
    b3 = fx.backdrop3()
    z = ExactGaussian(Fraction(-1, 2), 5)
    M = relative_monodromy(fx.nilp3(), b3.weight)
    Fhat = assoc_rsplit(M, fx.point3(I, z, I))
    r1 = Fhat.apply(mat_exp_nilpotent(mat_scale(EG_I, fx.nilp3())))
    gen = (ExactGaussian(Fraction(-1, 2)), I, ExactGaussian(1))
    assert r1.at(0) == Subspace.span([gen])


def test_canonical_splitting_unipotent_equivariance():
    rng = seeded("equivariance")
    cases = [("exI", fx.gamma1()), ("exII", fx.gamma2(2, -1)),
             ("exIII", fx.gamma2(-1, 3)), ("exIV", fx.gamma4(1, 0, -2, 1, 2)),
             ("exV", fx.gamma5((1, 0, -1, 2, 0, 1)))]
    for name, gamma in cases:
        b = fx.BACKDROPS[name]()
        for _ in range(4):
            F = random_point(name, rng)
            left = canonical_splitting(b, F.apply(gamma)).lift
            right = mat_mul(gamma, canonical_splitting(b, F).lift)
            assert mat_eq(left, right)
