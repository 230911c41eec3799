"""Theta functions, points attached to divisor pairs on an elliptic curve,
the Archimedean height pairing, and its degeneration slope.

The pairing of two disjoint degree zero divisors on C/(Z tau + Z) is read
off as the delta coordinate of an explicitly constructed point of the rank
four backdrop; along a degenerating family the delta coordinate grows
linearly in Im tau with slope governed by the second Bernoulli polynomial.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .fixtures import backdrop4, point4
from .hodgedata import Filtration


class NonconvergentTau(ValueError):
    pass


class SupportsMeet(ValueError):
    pass


class DegreeNonzero(ValueError):
    pass


class SectionsMeet(ValueError):
    pass


TAIL_EPS = 1e-16


def theta(tau: complex, z: complex, return_tail=False):
    """The triple-product style theta value
    prod_{n>=0} (1 - q^n t) * prod_{n>=1} (1 - q^n / t)
    with q = e^{2 pi i tau}, t = e^{2 pi i z}.

    Truncates once the tail factors are below TAIL_EPS relative to the
    partial product, and certifies the bound.
    """
    tau = complex(tau)
    z = complex(z)
    if tau.imag <= 0:
        raise NonconvergentTau("theta needs positive imaginary part")
    q = cmath.exp(2j * cmath.pi * tau)
    t = cmath.exp(2j * cmath.pi * z)
    if abs(t) == 0:
        raise ValueError("degenerate exponential")
    out = (1 - t)
    qn = q
    n = 1
    tail_factor = abs(t) + 1.0 / abs(t) + 1.0
    while True:
        out *= (1 - qn * t) * (1 - qn / t)
        qn *= q
        n += 1
        if abs(qn) * tail_factor < TAIL_EPS:
            break
        if n > 10000:
            raise NonconvergentTau("theta truncation did not converge")
    # certified relative tail bound: sum_{m>n} |q|^m (|t| + 1/|t|)
    tail = abs(qn) * tail_factor / (1 - abs(q)) if abs(q) < 1 else \
        float("inf")
    if return_tail:
        return out, tail * max(1.0, abs(out))
    return out


class DivisorSpec:
    """A degree zero divisor sum m_j (z_j) on C/(Z tau + Z)."""

    def __init__(self, multiplicities, points):
        self.multiplicities = [int(m) for m in multiplicities]
        self.points = [complex(p) for p in points]
        if len(self.multiplicities) != len(self.points):
            raise ValueError("multiplicities and points differ in length")
        if sum(self.multiplicities) != 0:
            raise DegreeNonzero("divisor degree must vanish")

    def total(self):
        return sum(m * z for m, z in zip(self.multiplicities, self.points))

    def shifted(self, index, lattice_vector):
        pts = list(self.points)
        pts[index] = pts[index] + lattice_vector
        return DivisorSpec(self.multiplicities, pts)


def _on_lattice(x: complex, tau: complex, tol=1e-9):
    a = x.imag / tau.imag
    b = x.real - a * tau.real
    return abs(a - round(a)) < tol and abs(b - round(b)) < tol


def check_disjoint(tau, Z: DivisorSpec, W: DivisorSpec):
    for zj in Z.points:
        for wk in W.points:
            if _on_lattice(zj - wk, tau):
                raise SupportsMeet(f"supports meet: {zj} ~ {wk}")


def height_point(tau: complex, Z: DivisorSpec, W: DivisorSpec) -> Filtration:
    """The point F(tau, w, lambda, z) of the rank four backdrop attached
    to the divisor pair.

    z and w are the weighted coordinate sums; lambda collects the
    logarithms of the theta factors, one principal branch per factor (any
    other branch moves the point by an integral unipotent element).
    """
    tau = complex(tau)
    check_disjoint(tau, Z, W)
    z = Z.total()
    w = W.total()
    lam = 0j
    for m, zj in zip(Z.multiplicities, Z.points):
        for n, wk in zip(W.multiplicities, W.points):
            val = theta(tau, zj - wk)
            lam += m * n * cmath.log(val)
    lam /= 2j * cmath.pi
    return point4(tau, w, lam, z).to_float()


def delta_coordinate(tau: complex, F: Filtration) -> float:
    """Im(lambda) - Im(z) Im(w) / Im(tau) read off the chart."""
    from .splitcore import chart_encode
    b = backdrop4()
    t = chart_encode(b, F)
    d = t.delta.entry_gr(-2, 0, 0, 0)
    return float(complex(d).real)


def height_pairing(tau: complex, Z: DivisorSpec, W: DivisorSpec) -> float:
    """The Archimedean height pairing of two disjoint degree zero
    divisors."""
    tau = complex(tau)
    check_disjoint(tau, Z, W)
    z = Z.total()
    w = W.total()
    lam = 0j
    for m, zj in zip(Z.multiplicities, Z.points):
        for n, wk in zip(W.multiplicities, W.points):
            lam += m * n * cmath.log(theta(tau, zj - wk))
    lam /= 2j * cmath.pi
    return lam.imag - z.imag * w.imag / tau.imag


def gamma_shift_matrix(m):
    """The integral unipotent element matching a lattice shift by m tau:
    e4 -> e4 - m e3, others fixed."""
    from .fixtures import matrix_from_action
    return matrix_from_action(4, {3: (0, 0, -m, 1)})


def bernoulli2(x) -> Fraction:
    """B2 on the fractional part: {x}^2 - {x} + 1/6, exact on rationals."""
    x = Fraction(x)
    frac = x - (x.numerator // x.denominator)
    return frac * frac - frac + Fraction(1, 6)


def predicted_slope(mults_z, offsets_z, mults_w, offsets_w) -> Fraction:
    """(1/2) sum m_j n_k B2({a_j - b_k})."""
    acc = Fraction(0)
    for m, a in zip(mults_z, offsets_z):
        for n, bq in zip(mults_w, offsets_w):
            acc += Fraction(m) * Fraction(n) * bernoulli2(
                Fraction(a) - Fraction(bq))
    return acc / 2


def degeneration_slope(c, z_data, w_data, y_grid, x=0.0):
    """Fit the linear in Im(tau) growth of the height along a family.

    z_data / w_data: lists of (multiplicity, a, f) with c a integral; the
    section over tau is a tau + f.  Returns the fitted slope, the exact
    Bernoulli prediction, and the largest residual of the affine fit.
    """
    mz = [m for m, _, _ in z_data]
    az = [a for _, a, _ in z_data]
    fz = [f for _, _, f in z_data]
    mw = [n for n, _, _ in w_data]
    bw = [a for _, a, _ in w_data]
    gw = [g for _, _, g in w_data]
    for a in az + bw:
        if (Fraction(a) * c).denominator != 1:
            raise ValueError("section offsets must clear the level")
    pred = predicted_slope(mz, az, mw, bw)
    values = []
    for y in y_grid:
        tau = complex(x, y)
        Z = DivisorSpec(mz, [complex(a) * tau + complex(f)
                             for a, f in zip(az, fz)])
        W = DivisorSpec(mw, [complex(a) * tau + complex(g)
                             for a, g in zip(bw, gw)])
        check_disjoint(tau, Z, W)
        values.append(height_pairing(tau, Z, W))
    ys = np.array([float(y) for y in y_grid])
    vs = np.array(values)
    fit = np.polyfit(ys, vs, 1)
    resid = vs - np.polyval(fit, ys)
    return {"fitted_slope": float(fit[0]),
            "predicted_slope": pred,
            "bounded_remainder": float(np.abs(resid).max()),
            "values": values}
