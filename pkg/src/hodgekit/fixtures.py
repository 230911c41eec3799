"""Built-in backdrops and degeneration data used across the test corpus.

Six small backdrops ship with the package.  Their nonzero graded weights are
{-1}, {0,-2}, {0,-1}, {0,-3}, {0,-1,-2} and {0,1} respectively, and each
comes with the standard complex coordinates for its classifying space
together with named one parameter degenerations.
"""

from __future__ import annotations

from fractions import Fraction

from .exactla import EG_ONE, EG_ZERO, ExactGaussian, Subspace, as_exact
from .hodgedata import Filtration, HodgeBackdrop


def _span(vectors, n):
    return Subspace.span(vectors, ambient=n, exact=True)


def _e(i, n):
    return tuple(EG_ONE if j == i else EG_ZERO for j in range(n))


def _sc(x):
    """Coerce a coordinate (int, Fraction, complex, ExactGaussian)."""
    if isinstance(x, complex):
        if float(x.real).is_integer() and float(x.imag).is_integer():
            return ExactGaussian(int(x.real), int(x.imag))
        return ExactGaussian(Fraction(x.real), Fraction(x.imag))
    return as_exact(x)


def backdrop0() -> HodgeBackdrop:
    """Rank 2, pure of weight -1; the upper half plane."""
    n = 2
    W = Filtration("inc", {-1: Subspace.full(n, True)}, n, True)
    pairings = {-1: [[0, -1], [1, 0]]}
    h = {(0, -1): 1, (-1, 0): 1}
    reps = {-1: [_e(0, n), _e(1, n)]}
    return HodgeBackdrop(n, W, pairings, h, reps, name="ex0")


def point0(tau) -> Filtration:
    tau = _sc(tau)
    n = 2
    f0 = _span([(tau, EG_ONE)], n)
    return Filtration("dec", {0: f0, -1: Subspace.full(n, True)}, n, True)


def backdrop1() -> HodgeBackdrop:
    """Rank 2, graded weights 0 and -2; extensions of Z by Z(1)."""
    n = 2
    W = Filtration("inc", {-2: _span([_e(0, n)], n),
                           0: Subspace.full(n, True)}, n, True)
    pairings = {0: [[1]], -2: [[1]]}
    h = {(0, 0): 1, (-1, -1): 1}
    reps = {-2: [_e(0, n)], 0: [_e(1, n)]}
    return HodgeBackdrop(n, W, pairings, h, reps, name="exI")


def point1(z) -> Filtration:
    z = _sc(z)
    n = 2
    f0 = _span([(z, EG_ONE)], n)
    return Filtration("dec", {0: f0, -1: Subspace.full(n, True)}, n, True)


def backdrop2() -> HodgeBackdrop:
    """Rank 3, graded weights 0 and -1; the universal elliptic curve."""
    n = 3
    W = Filtration("inc", {-1: _span([_e(0, n), _e(1, n)], n),
                           0: Subspace.full(n, True)}, n, True)
    pairings = {0: [[1]], -1: [[0, -1], [1, 0]]}
    h = {(0, 0): 1, (0, -1): 1, (-1, 0): 1}
    reps = {-1: [_e(0, n), _e(1, n)], 0: [_e(2, n)]}
    return HodgeBackdrop(n, W, pairings, h, reps, name="exII")


def point2(tau, z) -> Filtration:
    tau, z = _sc(tau), _sc(z)
    n = 3
    f0 = _span([(tau, EG_ONE, EG_ZERO), (z, EG_ZERO, EG_ONE)], n)
    return Filtration("dec", {0: f0, -1: Subspace.full(n, True)}, n, True)


def backdrop3() -> HodgeBackdrop:
    """Rank 3, graded weights 0 and -3."""
    n = 3
    W = Filtration("inc", {-3: _span([_e(0, n), _e(1, n)], n),
                           0: Subspace.full(n, True)}, n, True)
    pairings = {0: [[1]], -3: [[0, -1], [1, 0]]}
    h = {(0, 0): 1, (-1, -2): 1, (-2, -1): 1}
    reps = {-3: [_e(0, n), _e(1, n)], 0: [_e(2, n)]}
    return HodgeBackdrop(n, W, pairings, h, reps, name="exIII")


def point3(tau, z1, z2) -> Filtration:
    tau, z1, z2 = _sc(tau), _sc(z1), _sc(z2)
    n = 3
    f0 = _span([(z1, z2, EG_ONE)], n)
    fm1 = f0.join(_span([(tau, EG_ONE, EG_ZERO)], n))
    return Filtration("dec", {0: f0, -1: fm1,
                              -2: Subspace.full(n, True)}, n, True)


def backdrop4() -> HodgeBackdrop:
    """Rank 4, graded weights 0, -1, -2; the height pairing backdrop."""
    n = 4
    W = Filtration("inc", {-2: _span([_e(0, n)], n),
                           -1: _span([_e(0, n), _e(1, n), _e(2, n)], n),
                           0: Subspace.full(n, True)}, n, True)
    pairings = {0: [[1]], -1: [[0, -1], [1, 0]], -2: [[1]]}
    h = {(0, 0): 1, (0, -1): 1, (-1, 0): 1, (-1, -1): 1}
    reps = {-2: [_e(0, n)], -1: [_e(1, n), _e(2, n)], 0: [_e(3, n)]}
    return HodgeBackdrop(n, W, pairings, h, reps, name="exIV")


def point4(tau, z1, z2, z3) -> Filtration:
    tau, z1, z2, z3 = _sc(tau), _sc(z1), _sc(z2), _sc(z3)
    n = 4
    f0 = _span([(z1, tau, EG_ONE, EG_ZERO), (z2, z3, EG_ZERO, EG_ONE)], n)
    return Filtration("dec", {0: f0, -1: Subspace.full(n, True)}, n, True)


def backdrop5() -> HodgeBackdrop:
    """Rank 5, graded weights 0 and 1; a symmetric square block plus a curve."""
    n = 5
    W = Filtration("inc", {0: _span([_e(0, n), _e(1, n), _e(2, n)], n),
                           1: Subspace.full(n, True)}, n, True)
    pairings = {0: [[0, 0, 2], [0, -1, 0], [2, 0, 0]],
                1: [[0, -1], [1, 0]]}
    h = {(1, -1): 1, (0, 0): 1, (-1, 1): 1, (1, 0): 1, (0, 1): 1}
    reps = {0: [_e(0, n), _e(1, n), _e(2, n)], 1: [_e(3, n), _e(4, n)]}
    return HodgeBackdrop(n, W, pairings, h, reps, name="exV")


def point5(tau0, tau1, z1, z2, z3) -> Filtration:
    tau0, tau1 = _sc(tau0), _sc(tau1)
    z1, z2, z3 = _sc(z1), _sc(z2), _sc(z3)
    n = 5
    f1 = _span([(tau0 * tau0, 2 * tau0, EG_ONE, EG_ZERO, EG_ZERO),
                (z1, z2, EG_ZERO, tau1, EG_ONE)], n)
    f0 = f1.join(_span([(tau0, EG_ONE, EG_ZERO, EG_ZERO, EG_ZERO),
                        (z3, EG_ZERO, EG_ZERO, EG_ONE, EG_ZERO)], n))
    return Filtration("dec", {1: f1, 0: f0,
                              -1: Subspace.full(n, True)}, n, True)


BACKDROPS = {
    "ex0": backdrop0,
    "exI": backdrop1,
    "exII": backdrop2,
    "exIII": backdrop3,
    "exIV": backdrop4,
    "exV": backdrop5,
}


def matrix_from_action(n, images):
    """Matrix (columns act on e_j) from {j: image vector} over Q."""
    cols = []
    for j in range(n):
        img = images.get(j, None)
        if img is None:
            cols.append(_e(j, n))
        else:
            cols.append(tuple(as_exact(x) for x in img))
    return tuple(zip(*cols))


def nilpotent_from_images(n, images):
    """Nilpotent matrix sending e_j to images[j] (default 0)."""
    cols = []
    for j in range(n):
        img = images.get(j)
        cols.append(tuple(as_exact(x) for x in img) if img is not None
                    else tuple(EG_ZERO for _ in range(n)))
    return tuple(zip(*cols))


# one parameter degenerations named after their backdrop

def nilp0():
    """N e2 = e1 on the pure rank 2 backdrop."""
    return nilpotent_from_images(2, {1: (1, 0)})


def nilp1():
    return nilpotent_from_images(2, {1: (1, 0)})


def nilp2():
    return nilpotent_from_images(3, {1: (1, 0, 0)})


def nilp3():
    """N e3 = e2, N e2 = e1 on the weight {0,-3} backdrop."""
    return nilpotent_from_images(3, {1: (1, 0, 0), 2: (0, 1, 0)})


def nilp4():
    """N e3 = e2 on the height pairing backdrop."""
    return nilpotent_from_images(4, {2: (0, 1, 0, 0)})


def nilp5_sym2():
    """Symmetric square block: e3 -> 2 e2 -> ... on graded weight 0."""
    return nilpotent_from_images(5, {1: (1, 0, 0, 0, 0),
                                     2: (0, 2, 0, 0, 0)})


def nilp5_curve():
    """e5 -> e4 on graded weight 1."""
    return nilpotent_from_images(5, {4: (0, 0, 0, 1, 0)})


def nilp5_both():
    from .exactla import mat_add
    return mat_add(nilp5_sym2(), nilp5_curve())


def gamma1():
    """Generator of the integral unipotent group of the exI backdrop."""
    return matrix_from_action(2, {1: (1, 1)})


def gamma2(a, b):
    """(a, b) integral unipotent element of the exII/exIII backdrops."""
    return matrix_from_action(3, {2: (a, b, 1)})


def gamma4(a1, a2, a3, a4, a5):
    """Integral unipotent element of the exIV backdrop."""
    return matrix_from_action(4, {1: (a1, 1, 0, 0), 2: (a2, 0, 1, 0),
                                  3: (a3, a4, a5, 1)})


def gamma5(a):
    """Integral unipotent element of the exV backdrop, a in Z^6."""
    a1, a2, a3, a4, a5, a6 = a
    return matrix_from_action(5, {3: (a1, a2, a3, 1, 0),
                                  4: (a4, a5, a6, 0, 1)})
