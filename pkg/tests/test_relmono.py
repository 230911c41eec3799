from fractions import Fraction

import pytest

from hodgekit import fixtures as fx
from hodgekit.exactla import ExactGaussian, Subspace, mat_add, mat_mul, \
    mat_scale
from hodgekit.hodgedata import Filtration, weight_moments
from hodgekit.relmono import (
    NilpotentTuple,
    Nonexistent,
    NotNilpotent,
    pure_monodromy_filtration,
    relative_monodromy,
    validate_nilpotent_orbit,
)

from conftest import random_point, seeded

I = ExactGaussian(0, 1)


def span(vecs, n):
    return Subspace.span(vecs, ambient=n, exact=True)


def test_pure_zero_map():
    M = pure_monodromy_filtration(fx.nilpotent_from_images(3, {}), 5)
    assert M.at(5).is_full() and M.at(4).is_zero()


def test_pure_single_block():
    M = pure_monodromy_filtration(fx.nilp0(), -1)
    assert M.at(-2) == span([(1, 0)], 2)
    assert M.at(-3).is_zero() and M.at(0).is_full()
    assert M.at(-1) == M.at(-2)


def test_pure_jordan_three():
    J3 = fx.nilpotent_from_images(3, {1: (1, 0, 0), 2: (0, 1, 0)})
    M = pure_monodromy_filtration(J3, 0)
    dims = [M.at(k).dim for k in range(-3, 3)]
    assert dims == [0, 1, 1, 2, 2, 3]


def test_pure_rejects_non_nilpotent():
    with pytest.raises(NotNilpotent):
        pure_monodromy_filtration(((1, 0), (0, 1)), 0)


def test_relative_monodromy_printed_filtrations():
    b2 = fx.backdrop2()
    M2 = relative_monodromy(fx.nilp2(), b2.weight)
    assert M2.at(-2) == span([(1, 0, 0)], 3)
    assert M2.at(-1) == M2.at(-2)
    assert M2.at(0).is_full() and M2.at(-3).is_zero()

    b3 = fx.backdrop3()
    M3 = relative_monodromy(fx.nilp3(), b3.weight)
    e1 = span([(1, 0, 0)], 3)
    e12 = span([(1, 0, 0), (0, 1, 0)], 3)
    assert M3.at(-4) == e1 and M3.at(-3) == e1
    assert M3.at(-2) == e12 and M3.at(-1) == e12
    assert M3.at(0).is_full() and M3.at(-5).is_zero()

    b4 = fx.backdrop4()
    M4 = relative_monodromy(fx.nilp4(), b4.weight)
    assert M4.at(-2) == span([(1, 0, 0, 0), (0, 1, 0, 0)], 4)
    assert M4.at(-1) == M4.at(-2) and M4.at(0).is_full()

    b5 = fx.backdrop5()
    e1_5 = span([(1, 0, 0, 0, 0)], 5)
    M5a = relative_monodromy(fx.nilp5_sym2(), b5.weight)
    assert M5a.at(-2) == e1_5 and M5a.at(-1) == e1_5
    assert M5a.at(0) == span([(1, 0, 0, 0, 0), (0, 1, 0, 0, 0)], 5)
    assert M5a.at(1) == M5a.at(0).join(
        span([(0, 0, 0, 1, 0), (0, 0, 0, 0, 1)], 5))
    assert M5a.at(2).is_full()

    M5b = relative_monodromy(fx.nilp5_curve(), b5.weight)
    assert M5b.at(-1).is_zero()
    assert M5b.at(0) == span([(1, 0, 0, 0, 0), (0, 1, 0, 0, 0),
                              (0, 0, 1, 0, 0), (0, 0, 0, 1, 0)], 5)
    assert M5b.at(1) == M5b.at(0) and M5b.at(2).is_full()

    M5c = relative_monodromy(fx.nilp5_both(), b5.weight)
    assert M5c.at(-2) == e1_5 and M5c.at(-1) == e1_5
    assert M5c.at(0) == span([(1, 0, 0, 0, 0), (0, 1, 0, 0, 0),
                              (0, 0, 0, 1, 0)], 5)
    assert M5c.at(1) == M5c.at(0) and M5c.at(2).is_full()


def test_relative_zero_map_gives_weight_filtration():
    b = fx.backdrop4()
    M = relative_monodromy(fx.nilpotent_from_images(4, {}), b.weight)
    assert M == b.weight


def test_relative_agrees_with_pure_on_pure_backdrops():
    M = relative_monodromy(fx.nilp0(), fx.backdrop0().weight)
    assert M == pure_monodromy_filtration(fx.nilp0(), -1)


def test_y_independence_on_two_variable_tuples():
    b5 = fx.backdrop5()
    pairs = [(1, 1), (2, 3), (1, 7)]
    filts = []
    for y1, y2 in pairs:
        N = mat_add(mat_scale(ExactGaussian(y1), fx.nilp5_sym2()),
                    mat_scale(ExactGaussian(y2), fx.nilp5_curve()))
        filts.append(relative_monodromy(N, b5.weight))
    assert filts[0] == filts[1] == filts[2]

    b4 = fx.backdrop4()
    N1 = fx.nilpotent_from_images(4, {3: (1, 0, 0, 0)})
    for ys in pairs:
        Na = mat_add(mat_scale(ExactGaussian(ys[0]), N1),
                     mat_scale(ExactGaussian(ys[1]), fx.nilp4()))
        Nb = mat_add(N1, fx.nilp4())
        assert relative_monodromy(Na, b4.weight) == \
            relative_monodromy(Nb, b4.weight)


def test_variance_grows_on_generated_pairs():
    # random conjugates of the corpus operators against their backdrops
    rng = seeded("variance")
    cases = [("exII", fx.nilp2()), ("exIII", fx.nilp3()),
             ("exIV", fx.nilp4()), ("exV", fx.nilp5_both()),
             ("exV", fx.nilp5_sym2()), ("exV", fx.nilp5_curve())]
    count = 0
    while count < 200:
        name, N = cases[count % len(cases)]
        b = fx.BACKDROPS[name]()
        g = _random_unipotent(b, rng)
        ginv = _unipotent_inverse(g)
        Nc = mat_mul(g, mat_mul(N, ginv))
        M = relative_monodromy(Nc, b.weight)
        assert not isinstance(M, Nonexistent)
        mu_w, var_w = weight_moments(b.weight)
        mu_m, var_m = weight_moments(M)
        assert mu_m == mu_w
        if M == b.weight:
            assert var_m == var_w
        else:
            assert var_m > var_w
        count += 1


def _random_unipotent(b, rng):
    n = b.rank
    rows = [[ExactGaussian(1 if i == j else 0) for j in range(n)]
            for i in range(n)]
    weights_of = []
    for w in b.weights():
        weights_of.extend([w] * b.grdim(w))
    # strictly lower the weight: entries from higher weight columns to
    # lower weight rows, in the graded representative order
    order = []
    for w in b.weights():
        for r in b.graded_reps[w]:
            order.append((w, r))
    for i, (wi, _) in enumerate(order):
        for j, (wj, _) in enumerate(order):
            if wi < wj and rng.random() < 0.5:
                rows[i][j] = ExactGaussian(Fraction(rng.randint(-2, 2)))
    # conjugate the representative coordinates back to the standard basis
    from hodgekit.splitcore import gr_basis_matrix
    from hodgekit.exactla import mat_inverse
    G = gr_basis_matrix(b)
    return mat_mul(G, mat_mul(tuple(tuple(r) for r in rows),
                              mat_inverse(G)))


def _unipotent_inverse(g):
    from hodgekit.exactla import mat_inverse
    return mat_inverse(g)


def test_validate_orbit_corpus():
    b3 = fx.backdrop3()
    t3 = NilpotentTuple(b3, [fx.nilp3()],
                        fx.point3(I, ExactGaussian(-1, 5), I))
    rep = validate_nilpotent_orbit(t3)
    assert rep["pass"], rep

    b4 = fx.backdrop4()
    t4 = NilpotentTuple(b4, [fx.nilp4()],
                        fx.point4(I, 1, ExactGaussian(2, 2), 3))
    assert validate_nilpotent_orbit(t4)["pass"]

    b5 = fx.backdrop5()
    t5 = NilpotentTuple(b5, [fx.nilp5_sym2(), fx.nilp5_curve()],
                        fx.point5(I, I, ExactGaussian(1, 1), 0, 0))
    assert validate_nilpotent_orbit(t5)["pass"]


def test_validate_orbit_griffiths_failure():
    b3 = fx.backdrop3()
    N2 = mat_mul(fx.nilp3(), fx.nilp3())
    t = NilpotentTuple(b3, [N2], fx.point3(I, ExactGaussian(-1, 5), I))
    rep = validate_nilpotent_orbit(t)
    assert not rep["pass"]
    assert not rep["conditions"]["transversality"]


def test_validate_orbit_commutation_failure():
    b4 = fx.backdrop4()
    Na = fx.nilpotent_from_images(4, {1: (1, 0, 0, 0), 2: (0, 1, 0, 0)})
    Nb = fx.nilpotent_from_images(4, {2: (0, 1, 0, 0)})
    t = NilpotentTuple(b4, [Na, Nb], fx.point4(I, 0, 0, 0))
    rep = validate_nilpotent_orbit(t)
    assert not rep["conditions"]["commuting_nilpotent"]
