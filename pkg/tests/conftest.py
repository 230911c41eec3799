"""Shared builders for the test suite: random interior points per backdrop
and the boundary splitting/gauge pairs of the example families."""

import random
from fractions import Fraction

from hodgekit import fixtures as fx
from hodgekit.boundary import (
    BoundaryDistance,
    BoundarySplitting,
    halfplane_distance,
    sym2_tau_of_line,
    upper_tau_of_line,
)
from hodgekit.exactla import ExactGaussian, Subspace
from hodgekit.hodgedata import Filtration
from hodgekit.sl2orbit import JointGrading


def rand_frac(rng, lo=-4, hi=4, den=6):
    return Fraction(rng.randint(lo * den, hi * den), den)


def rand_gauss(rng, lo=-4, hi=4, den=6):
    return ExactGaussian(rand_frac(rng, lo, hi, den),
                         rand_frac(rng, lo, hi, den))


def rand_upper(rng, den=6):
    """A random point of the upper half plane with rational coordinates."""
    x = rand_frac(rng, -3, 3, den)
    y = rand_frac(rng, 0, 3, den) + Fraction(1, den)
    return ExactGaussian(x, y)


def random_point(name, rng):
    """A random interior point of the named backdrop."""
    if name == "ex0":
        return fx.point0(rand_upper(rng))
    if name == "exI":
        return fx.point1(rand_gauss(rng))
    if name == "exII":
        return fx.point2(rand_upper(rng), rand_gauss(rng))
    if name == "exIII":
        return fx.point3(rand_upper(rng), rand_gauss(rng), rand_gauss(rng))
    if name == "exIV":
        return fx.point4(rand_upper(rng), rand_gauss(rng), rand_gauss(rng),
                         rand_gauss(rng))
    if name == "exV":
        sign = rng.choice([1, -1])
        tau0 = rand_upper(rng)
        if sign < 0:
            tau0 = ExactGaussian(tau0.re, -tau0.im)
        return fx.point5(tau0, rand_upper(rng), rand_gauss(rng),
                         rand_gauss(rng), rand_gauss(rng))
    raise KeyError(name)


def family0():
    """Splitting and gauge of the pure rank 2 family (ambient flavor)."""
    b = fx.backdrop0()
    Wp = Filtration("inc", {-2: Subspace.span([(1, 0)]),
                            0: Subspace.full(2, True)}, 2, True)
    grading = JointGrading([((-2,), Subspace.span([(1, 0)])),
                            ((0,), Subspace.span([(0, 1)]))], 2, 1)
    alpha = BoundarySplitting(b, [Wp], grading, on_gr=False)

    def fn(F):
        return [halfplane_distance(upper_tau_of_line(F.at(0)))]

    return b, alpha, BoundaryDistance([Wp], fn, "height gauge")


def family0_gr():
    """Same family with the grading carried on gr coordinates."""
    b = fx.backdrop0()
    grading = JointGrading([((-2,), Subspace.span([(1, 0)])),
                            ((0,), Subspace.span([(0, 1)]))], 2, 1)
    Wp = grading.sub_filtration(0)
    alpha = BoundarySplitting(b, [Wp], grading, on_gr=True)

    def fn(graded):
        return [halfplane_distance(upper_tau_of_line(graded.piece(-1).at(0)))]

    return b, alpha, BoundaryDistance([Wp], fn)


def family3_gr():
    b = fx.backdrop3()
    grading = JointGrading([((-4,), Subspace.span([(1, 0, 0)])),
                            ((-2,), Subspace.span([(0, 1, 0)])),
                            ((0,), Subspace.span([(0, 0, 1)]))], 3, 1)
    Wp = grading.sub_filtration(0)
    alpha = BoundarySplitting(b, [Wp], grading, on_gr=True)

    def fn(graded):
        return [halfplane_distance(upper_tau_of_line(graded.piece(-3).at(-1)))]

    return b, alpha, BoundaryDistance([Wp], fn)


def family4_gr():
    b = fx.backdrop4()
    grading = JointGrading(
        [((-2,), Subspace.span([(1, 0, 0, 0), (0, 1, 0, 0)])),
         ((0,), Subspace.span([(0, 0, 1, 0), (0, 0, 0, 1)]))], 4, 1)
    Wp = grading.sub_filtration(0)
    alpha = BoundarySplitting(b, [Wp], grading, on_gr=True)

    def fn(graded):
        return [halfplane_distance(upper_tau_of_line(graded.piece(-1).at(0)))]

    return b, alpha, BoundaryDistance([Wp], fn)


def family5():
    """The ambient flavor splitting of the rank 5 family."""
    b = fx.backdrop5()
    grading = JointGrading(
        [((-2,), Subspace.span([(1, 0, 0, 0, 0)])),
         ((0,), Subspace.span([(0, 1, 0, 0, 0)])),
         ((2,), Subspace.span([(0, 0, 1, 0, 0)])),
         ((1,), Subspace.span([(0, 0, 0, 1, 0), (0, 0, 0, 0, 1)]))], 5, 1)
    Wp = grading.sub_filtration(0)
    alpha = BoundarySplitting(b, [Wp], grading, on_gr=False)

    def fn(F):
        from hodgekit.splitcore import GradedPoint
        gp = GradedPoint.of(b, F) if isinstance(F, Filtration) else F
        tau0 = sym2_tau_of_line(gp.piece(0).at(1))
        return [halfplane_distance(tau0)]

    return b, alpha, BoundaryDistance([Wp], fn)


def seeded(name):
    return random.Random(hash(name) % (2 ** 31))
