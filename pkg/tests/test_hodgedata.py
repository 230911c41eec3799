from fractions import Fraction

import pytest

from hodgekit import fixtures as fx
from hodgekit.exactla import ExactGaussian, Subspace
from hodgekit.hodgedata import (
    Filtration,
    HodgeBackdrop,
    NotInCheckD,
    ZeroSpace,
    weight_moments,
)
from hodgekit.relmono import Nonexistent, relative_monodromy

from conftest import random_point, seeded

I = ExactGaussian(0, 1)


def test_graded_piece_weight_zero_line():
    b = fx.backdrop1()
    z = ExactGaussian(5, 7)
    gp = b.graded_piece(fx.point1(z), 0)
    assert gp.at(0).is_full() and gp.at(0).dim == 1
    assert gp.at(1).is_zero()


def test_graded_piece_matches_half_plane_coordinates():
    b = fx.backdrop2()
    tau = ExactGaussian(Fraction(1, 3), 2)
    gp = b.graded_piece(fx.point2(tau, ExactGaussian(4, 5)), -1)
    assert gp.at(0) == Subspace.span([(tau, ExactGaussian(1))])


def test_graded_piece_empty_weight():
    b = fx.backdrop2()
    assert b.grdim(-5) == 0
    assert b.graded_piece(fx.point2(I, 0), -5).ambient == 0


def test_check_D_accepts_whole_parameter_space():
    b = fx.backdrop0()
    for tau in (I, ExactGaussian(2, -3), ExactGaussian(7)):
        ok, reasons = b.is_in_check_D(fx.point0(tau))
        assert ok, reasons


def test_check_D_rejects_wrong_dimension_profile():
    b = fx.backdrop0()
    bad = Filtration("dec", {0: Subspace.full(2, True),
                             -1: Subspace.full(2, True)}, 2, True)
    ok, reasons = b.is_in_check_D(bad)
    assert not ok
    assert any(r[0] == "dimension" for r in reasons)


def test_interior_membership_on_the_stated_ranges():
    b = fx.backdrop0()
    ok, _ = b.is_in_D(fx.point0(I))
    assert ok
    ok, reasons = b.is_in_D(fx.point0(ExactGaussian(0, -1)))
    assert not ok and any(r[0] == "positivity" for r in reasons)
    ok, _ = b.is_in_D(fx.point0(ExactGaussian(5)))
    assert not ok


def test_interior_membership_needs_flag_closure():
    b = fx.backdrop0()
    bad = Filtration("dec", {0: Subspace.full(2, True),
                             -1: Subspace.full(2, True)}, 2, True)
    with pytest.raises(NotInCheckD):
        b.is_in_D(bad)


@pytest.mark.parametrize("name", ["ex0", "exI", "exII", "exIII", "exIV",
                                  "exV"])
def test_random_points_lie_in_D(name):
    rng = seeded(f"membership-{name}")
    b = fx.BACKDROPS[name]()
    for _ in range(8):
        ok, reasons = b.is_in_D(random_point(name, rng))
        assert ok, reasons


def test_exV_negative_imag_tau1_fails():
    b = fx.backdrop5()
    bad = fx.point5(I, ExactGaussian(0, -1), 0, 0, 0)
    ok, _ = b.is_in_D(bad)
    assert not ok


def test_weight_moments_values():
    b2 = fx.backdrop2()
    mu, var = weight_moments(b2.weight)
    assert (mu, var) == (Fraction(-2, 3), Fraction(2, 9))
    M = relative_monodromy(fx.nilp2(), b2.weight)
    mu2, var2 = weight_moments(M)
    assert (mu2, var2) == (Fraction(-2, 3), Fraction(8, 9))
    assert var2 > var


def test_weight_moments_pure_and_zero():
    pure = Filtration("inc", {3: Subspace.full(2, True)}, 2, True)
    assert weight_moments(pure) == (Fraction(3), Fraction(0))
    with pytest.raises(ZeroSpace):
        weight_moments(Filtration("inc", {0: Subspace.zero(2, True)}, 2,
                                  True))


def test_moments_invariant_under_relative_monodromy():
    rng = seeded("moments")
    for name in ("exII", "exIII", "exIV", "exV"):
        b = fx.BACKDROPS[name]()
        N = {"exII": fx.nilp2(), "exIII": fx.nilp3(), "exIV": fx.nilp4(),
             "exV": fx.nilp5_both()}[name]
        M = relative_monodromy(N, b.weight)
        assert not isinstance(M, Nonexistent)
        mu_w, var_w = weight_moments(b.weight)
        mu_m, var_m = weight_moments(M)
        assert mu_m == mu_w
        if M != b.weight:
            assert var_m > var_w


def test_graded_piece_commutes_with_unipotent_automorphisms():
    b = fx.backdrop2()
    gamma = fx.gamma2(3, -2)
    rng = seeded("gamma")
    for _ in range(5):
        F = random_point("exII", rng)
        for w in b.weights():
            assert b.graded_piece(F.apply(gamma), w) == b.graded_piece(F, w)
    b4 = fx.backdrop4()
    gamma4 = fx.gamma4(1, -1, 2, 0, 3)
    for _ in range(3):
        F = random_point("exIV", rng)
        for w in b4.weights():
            assert b4.graded_piece(F.apply(gamma4), w) == \
                b4.graded_piece(F, w)


def test_backdrop_json_round_trip():
    for name, make in fx.BACKDROPS.items():
        b = make()
        again = HodgeBackdrop.from_json(b.to_json())
        assert again.rank == b.rank
        assert again.weight == b.weight
        assert again.hodge_numbers == b.hodge_numbers
        assert again.pairings == b.pairings


def test_sym2_pairing_matches_product_rule():
    # the rank 5 weight zero pairing is the symmetric square of the rank 2
    # antisymmetric form: <x1 x2, y1 y2> = <x1,y1><x2,y2> + <x1,y2><x2,y1>
    b5 = fx.backdrop5()
    pair5 = b5.pairings[0]
    # e1 = f1^2, e2 = f1 f2, e3 = f2^2 with <f2, f1> = 1
    def base(a, bq):
        table = {(0, 0): 0, (0, 1): -1, (1, 0): 1, (1, 1): 0}
        return Fraction(table[(a, bq)])
    prods = {0: (0, 0), 1: (0, 1), 2: (1, 1)}
    for i in range(3):
        for j in range(3):
            x1, x2 = prods[i]
            y1, y2 = prods[j]
            expected = base(x1, y1) * base(x2, y2) + \
                base(x1, y2) * base(x2, y1)
            got = pair5[i][j]
            assert got == ExactGaussian(expected), (i, j)
