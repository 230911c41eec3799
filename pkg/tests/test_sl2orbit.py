from fractions import Fraction

import pytest

from hodgekit import fixtures as fx
from hodgekit.exactla import ExactGaussian, Subspace, as_exact, mat_eq, \
    mat_identity, mat_mul
from hodgekit.hodgedata import Filtration, weight_moments
from hodgekit.relmono import NilpotentTuple
from hodgekit.sl2orbit import (
    NoSolution,
    Sl2Triple,
    admissible_compose,
    borel_serre_splitting,
    hodge_metric_gram,
    orbit_equivalent,
    pure_backdrop,
    sl2_complete,
    sl2_validity_check,
    weight_filtrations_from_Y,
)
from hodgekit.splitcore import GradedPoint
from hodgekit.orbitlimit import psi

from conftest import rand_upper, seeded

I = ExactGaussian(0, 1)


def _std_triple():
    N = tuple(tuple(as_exact(x) for x in r) for r in ((0, 1), (0, 0)))
    Y = tuple(tuple(as_exact(x) for x in r) for r in ((-1, 0), (0, 1)))
    Np = sl2_complete(N, Y)
    return N, Y, Np


def test_sl2_complete_standard_block():
    N, Y, Np = _std_triple()
    assert Np == ((ExactGaussian(0), ExactGaussian(0)),
                  (ExactGaussian(1), ExactGaussian(0)))


def test_sl2_complete_zero():
    z = fx.nilpotent_from_images(2, {})
    assert sl2_complete(z, z) == z


def test_sl2_complete_jordan_three():
    J3 = fx.nilpotent_from_images(3, {1: (1, 0, 0), 2: (0, 1, 0)})
    Y = tuple(tuple(as_exact(x) for x in r)
              for r in ((-2, 0, 0), (0, 0, 0), (0, 0, 2)))
    Np = sl2_complete(J3, Y)
    assert Np[1][0] == ExactGaussian(2) and Np[2][1] == ExactGaussian(2)
    assert Np[0][0] == ExactGaussian(0)


def test_sl2_complete_inconsistent():
    N = fx.nilpotent_from_images(2, {1: (1, 0)})
    Ybad = tuple(tuple(as_exact(x) for x in r) for r in ((0, 0), (0, 0)))
    with pytest.raises(NoSolution):
        sl2_complete(N, Ybad)


def test_weight_filtrations_from_Y():
    b0 = fx.backdrop0()
    N, Y, Np = _std_triple()
    tr = Sl2Triple(b0, {(-1, 1): (N, Y, Np)})
    filts, splits = weight_filtrations_from_Y(tr)
    assert filts[1][-1].at(-2) == Subspace.span([(1, 0)])
    assert filts[1][-1].at(0).is_full()
    assert splits[1][-1][-2] == Subspace.span([(1, 0)])

    # trivial triple leaves the pure weight filtration
    z = fx.nilpotent_from_images(2, {})
    tr0 = Sl2Triple(b0, {(-1, 1): (z, z, z)})
    f0, _ = weight_filtrations_from_Y(tr0)
    assert f0[1][-1].at(-1).is_full() and f0[1][-1].at(-2).is_zero()


def test_weight_filtration_exV_case3_gr():
    # the graded side of the rank 5 double block: eigenvalues on the
    # symmetric square block are -2, 0, 2 and on the curve block -1, 1
    b5 = fx.backdrop5()
    t5 = NilpotentTuple(b5, [fx.nilp5_both()],
                        fx.point5(I, I, ExactGaussian(1, 1), 0, 0))
    cls = psi(t5)
    W1 = cls.weight_filtrations[0]
    assert W1.at(0) == Subspace.span([(1, 0, 0, 0, 0), (0, 1, 0, 0, 0),
                                      (0, 0, 0, 1, 0)])
    assert W1.at(1) == W1.at(0)


def test_sl2_validity_check():
    b0 = fx.backdrop0()
    N, Y, Np = _std_triple()
    tr = Sl2Triple(b0, {(-1, 1): (N, Y, Np)})
    ok, _ = sl2_validity_check(tr, GradedPoint.of(b0, fx.point0(0)))
    assert ok
    ok_bad, reasons = sl2_validity_check(tr, GradedPoint.of(b0,
                                                            fx.point0(I)))
    assert not ok_bad and reasons
    # trivial triple is valid at any interior point
    z = fx.nilpotent_from_images(2, {})
    tr0 = Sl2Triple(b0, {(-1, 1): (z, z, z)})
    ok0, _ = sl2_validity_check(tr0, GradedPoint.of(b0, fx.point0(I)))
    assert ok0


def test_borel_serre_third_coordinate():
    b0 = fx.backdrop0()
    Wp = Filtration("inc", {-2: Subspace.span([(1, 0)]),
                            0: Subspace.full(2, True)}, 2, True)
    rng = seeded("bs")
    for _ in range(10):
        tau = rand_upper(rng)
        dec = borel_serre_splitting(b0, Wp, fx.point0(tau))
        assert dec.parts[0] == Subspace.span([(tau.re, Fraction(1))])
        assert dec.parts[-2] == Subspace.span([(1, 0)])


def test_borel_serre_on_torus_orbit_matches_class_splitting():
    # on the torus orbit the Borel-Serre splitting of the class filtration
    # is the eigenspace splitting of the associated grading
    b0 = fx.backdrop0()
    t0 = NilpotentTuple(b0, [fx.nilp0()], fx.point0(ExactGaussian(2)))
    cls = psi(t0)
    Wp = cls.weight_filtrations[0]
    for t in (Fraction(1), Fraction(1, 2), Fraction(3)):
        pt = cls.r.apply(cls.torus_action([t]))
        dec = borel_serre_splitting(b0, Wp, pt)
        for theta, sub in cls.grading.blocks:
            assert dec.parts[theta[1]] == sub


def test_borel_serre_weight_orthogonal_case():
    b0 = fx.backdrop0()
    Wp = Filtration("inc", {-2: Subspace.span([(1, 0)]),
                            0: Subspace.full(2, True)}, 2, True)
    dec = borel_serre_splitting(b0, Wp, fx.point0(I))
    assert dec.parts[0] == Subspace.span([(0, 1)])


def test_hodge_metric_gram_values():
    b0 = fx.backdrop0()
    gram = hodge_metric_gram(b0, -1, GradedPoint.of(b0, fx.point0(I))
                             .piece(-1))
    v = (I, ExactGaussian(1))
    acc = ExactGaussian(0)
    for i in range(2):
        for j in range(2):
            acc = acc + v[i] * gram[i][j] * v[j].conjugate()
    assert acc == ExactGaussian(2)


def test_orbit_equivalence_relation():
    from hodgekit.sl2orbit import Sl2OrbitClass
    b3 = fx.backdrop3()
    z = ExactGaussian(Fraction(-1, 2), 5)
    cls = psi(NilpotentTuple(b3, [fx.nilp3()], fx.point3(I, z, I)))
    # reflexive
    assert orbit_equivalent(cls, cls)
    # torus shifted base point stays in the class
    for t in (Fraction(2), Fraction(1, 3)):
        shifted = Sl2OrbitClass(cls.backdrop, cls.weight_filtrations,
                                cls.grading, cls.r.apply(
                                    cls.torus_action([t])), cls.J)
        assert orbit_equivalent(cls, shifted)
        assert orbit_equivalent(shifted, cls)
    # a class with a different interior invariant is not equivalent
    other = psi(NilpotentTuple(b3, [fx.nilp3()],
                               fx.point3(I, ExactGaussian(Fraction(1, 3), 5),
                                         I)))
    assert not orbit_equivalent(cls, other)
    # transitivity on a generated triple
    s1 = Sl2OrbitClass(cls.backdrop, cls.weight_filtrations, cls.grading,
                       cls.r.apply(cls.torus_action([Fraction(2)])), cls.J)
    s2 = Sl2OrbitClass(cls.backdrop, cls.weight_filtrations, cls.grading,
                       s1.r.apply(cls.torus_action([Fraction(3)])), cls.J)
    assert orbit_equivalent(cls, s2)


def test_orbit_equivalence_distinguishes_weight_filtrations():
    b5 = fx.backdrop5()
    t_a = NilpotentTuple(b5, [fx.nilp5_sym2()], fx.point5(I, I, 0, 0, 0))
    t_b = NilpotentTuple(b5, [fx.nilp5_curve()], fx.point5(I, I, 0, 0, 0))
    assert not orbit_equivalent(psi(t_a), psi(t_b))


def test_admissible_compose_valid_diagonal():
    b5 = fx.backdrop5()
    M = Filtration("inc", {-2: Subspace.span([(1, 0, 0)]),
                           1: Subspace.span([(1, 0, 0), (0, 1, 0)]),
                           2: Subspace.full(3, True)}, 3, True)
    Mp = Filtration("inc", {0: Subspace.span([(1, 0)]),
                            2: Subspace.full(2, True)}, 2, True)
    out, why = admissible_compose(b5, {0: [M], 1: [Mp]},
                                  [{0: M, 1: Mp}])
    assert out is not None, why
    assert out.size() == 1


def test_admissible_compose_surjectivity_failure():
    b5 = fx.backdrop5()
    M = Filtration("inc", {-2: Subspace.span([(1, 0, 0)]),
                           2: Subspace.full(3, True)}, 3, True)
    Mp = Filtration("inc", {0: Subspace.span([(1, 0)]),
                            2: Subspace.full(2, True)}, 2, True)
    out, why = admissible_compose(b5, {0: [M], 1: [Mp]}, [{0: M}])
    assert out is None and why[0] == "surjectivity"


def test_admissible_compose_comparability_failure():
    b5 = fx.backdrop5()
    M = Filtration("inc", {-2: Subspace.span([(1, 0, 0)]),
                           2: Subspace.full(3, True)}, 3, True)
    Mp = Filtration("inc", {0: Subspace.span([(1, 0)]),
                            2: Subspace.full(2, True)}, 2, True)
    out, why = admissible_compose(b5, {0: [M], 1: [Mp]},
                                  [{0: M}, {1: Mp}])
    assert out is None and why[0] == "comparability"


def test_torus_action_homomorphism():
    b3 = fx.backdrop3()
    z = ExactGaussian(Fraction(-1, 2), 5)
    cls = psi(NilpotentTuple(b3, [fx.nilp3()], fx.point3(I, z, I)))
    a, b = Fraction(2), Fraction(5, 3)
    lhs = mat_mul(cls.torus_action([a]), cls.torus_action([b]))
    rhs = cls.torus_action([a * b])
    assert mat_eq(lhs, rhs)
    assert mat_eq(cls.torus_action([Fraction(1)]), mat_identity(3))


def test_torus_action_printed_exponents():
    b0 = fx.backdrop0()
    t0 = NilpotentTuple(b0, [fx.nilp0()], fx.point0(ExactGaussian(0, 3)))
    cls = psi(t0)
    T = cls.torus_action([Fraction(1, 2)])
    # e1 scales by t^-2 = 4, e2 fixed
    assert T[0][0] == ExactGaussian(4) and T[1][1] == ExactGaussian(1)
    b3 = fx.backdrop3()
    z = ExactGaussian(Fraction(-1, 2), 5)
    cls3 = psi(NilpotentTuple(b3, [fx.nilp3()], fx.point3(I, z, I)))
    T3 = cls3.torus_action([Fraction(1, 2)])
    assert T3[0][0] == ExactGaussian(16)   # t^-4
    assert T3[1][1] == ExactGaussian(4)    # t^-2
    assert T3[2][2] == ExactGaussian(1)


def test_variance_ordering_along_classes():
    # variance per graded piece grows along the filtration family
    b5 = fx.backdrop5()
    t5 = NilpotentTuple(b5, [fx.nilp5_sym2(), fx.nilp5_both()],
                        fx.point5(I, I, 0, 0, 0))
    from hodgekit.orbitlimit import graded_filtration
    from hodgekit.relmono import relative_monodromy
    W1 = relative_monodromy(t5.nilpotents[0], b5.weight)
    W2 = relative_monodromy(fx.nilp5_both(), b5.weight)
    var = []
    for Wj in (b5.weight, W1, W2):
        tot = Fraction(0)
        for w in b5.weights():
            gf = graded_filtration(b5, Wj, w)
            _, v = weight_moments(gf)
            tot += v
        var.append(tot)
    assert var[0] <= var[1] <= var[2]
    assert var[0] < var[1]
