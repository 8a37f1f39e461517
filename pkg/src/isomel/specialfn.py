"""Complete elliptic integrals and the period integrals built from them.

Notation (r in (0, 1), h in (-1, 0)):

    I(r)  = int_0^pi sqrt(1 - r cos t) dt       = 2 sqrt(1+r) E(2r/(1+r))
    J(r)  = int_0^pi dt / sqrt(1 - r cos t)     = 2/sqrt(1+r) K(2r/(1+r))
    Ibar_k(h) = int_{u1}^{u2} u^k sqrt(h + 2u^2 - u^4) du,   k = 0, 2

with u1^2 = 1 - sqrt(1+h), u2^2 = 1 + sqrt(1+h).  For r = sqrt(1+h),
Ibar_0 = (h J + I)/3, Ibar_2 = ((4+3h) I + h J)/15, Ibar_0' = J/4 and
Ibar_2' = I/4.  Functions take a real argument; the ``*_array`` variants
accept numpy arrays.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError

AGM_RTOL = 2.0**-60
# 2**-60 is below double resolution; means one or two ulps apart have converged
_AGM_FLOOR = 4.0 * np.finfo(float).eps
H_EDGE = 1e-12

# below this s the correction to w ~ 4/(6 ln 2 - 2 ln s) is O(s^2 ln s), far under
# double resolution, while s^2 would underflow in the AGM
_W_TINY = 1e-100

# below this value of 1+h the closed forms lose digits to cancellation
_SERIES_SWITCH = 0.25


@dataclass(frozen=True)
class EllipticPair:
    first: float
    second: float
    kind: str  # "K-E", "I-J" or "Ibar0-Ibar2"

    def __iter__(self):
        yield self.first
        yield self.second

    @property
    def ratio(self) -> float:
        return self.second / self.first


def _agm_ke(m1):
    """K and E from the complementary parameter m1 = 1 - m (arrays allowed)."""
    m1 = np.asarray(m1, dtype=float)
    a = np.ones_like(m1)
    b = np.sqrt(m1)
    c2 = 1.0 - m1  # c_0^2 = m
    total = 0.5 * c2
    pow2 = 0.5
    for _ in range(64):
        if np.all(np.abs(a - b) <= max(AGM_RTOL, _AGM_FLOOR) * a):
            break
        an = 0.5 * (a + b)
        cn = 0.5 * (a - b)
        b = np.sqrt(a * b)
        a = an
        pow2 *= 2.0
        total = total + pow2 * cn * cn
    else:
        raise NumericError("AGM iteration did not converge")
    K = np.pi / (2.0 * a)
    E = K * (1.0 - total)
    return K, E


def elliptic_KE(m: float) -> EllipticPair:
    """Complete elliptic integrals K(m), E(m) (parameter convention m = k^2).

    At m = 1, K is returned as ``inf`` and E = 1.
    """
    if not (0.0 <= m <= 1.0) or math.isnan(m):
        raise DomainError(f"elliptic parameter m={m} outside [0, 1]")
    if m == 1.0:
        return EllipticPair(math.inf, 1.0, "K-E")
    K, E = _agm_ke(1.0 - m)
    return EllipticPair(float(K), float(E), "K-E")


def elliptic_KE_complement(m1) -> tuple:
    """K, E from 1 - m, keeping full relative accuracy as m -> 1."""
    return _agm_ke(m1)


def _ij_from_r(r, one_minus_r):
    r = np.asarray(r, dtype=float)
    m1 = one_minus_r / (1.0 + r)
    K, E = _agm_ke(m1)
    sq = np.sqrt(1.0 + r)
    return 2.0 * sq * E, 2.0 / sq * K


def eval_IJ(r: float) -> EllipticPair:
    """(I(r), J(r)) for 0 < r < 1."""
    if not (0.0 < r < 1.0):
        raise DomainError(f"r={r} outside (0, 1)")
    I, J = _ij_from_r(r, 1.0 - r)
    return EllipticPair(float(I), float(J), "I-J")


def _series_coeffs(n_terms: int):
    """Taylor coefficients of 2F1(1/4,3/4;1;z) and 2F1(-1/4,1/4;1;z)."""
    A = np.empty(n_terms)
    B = np.empty(n_terms)
    A[0] = B[0] = 1.0
    for k in range(1, n_terms):
        A[k] = A[k - 1] * (k - 0.75) * (k - 0.25) / (k * k)
        B[k] = B[k - 1] * (k - 1.25) * (k - 0.75) / (k * k)
    return A, B


_A, _B = _series_coeffs(120)
# Ibar0 = (pi/3) sum_{k>=1} (A_{k-1} - A_k + B_k) eta^k
_C0 = np.concatenate([[0.0], _A[:-1] - _A[1:] + _B[1:]]) * (np.pi / 3.0)
# Ibar2 = (pi/15) sum_{k>=1} (B_k + 3 B_{k-1} + A_{k-1} - A_k) eta^k
_C2 = np.concatenate([[0.0], _B[1:] + 3.0 * _B[:-1] + _A[:-1] - _A[1:]]) * (np.pi / 15.0)


def _barI_series(eta):
    """Power series in eta = 1 + h, convergent for eta < 1."""
    eta = np.asarray(eta, dtype=float)
    n = _C0.size
    if np.any(eta > _SERIES_SWITCH):
        raise AssertionError("series used outside its switch window")
    i0 = np.zeros_like(eta)
    i2 = np.zeros_like(eta)
    for k in range(n - 1, 0, -1):
        i0 = (i0 + _C0[k]) * eta
        i2 = (i2 + _C2[k]) * eta
    return i0, i2


def _barI_closed(h):
    h = np.asarray(h, dtype=float)
    r = np.sqrt(1.0 + h)
    one_minus_r = -h / (1.0 + r)
    I, J = _ij_from_r(r, one_minus_r)
    i0 = (h * J + I) / 3.0
    i2 = ((4.0 + 3.0 * h) * I + h * J) / 15.0
    return i0, i2


def barI_array(h):
    """Vectorized (Ibar0, Ibar2) on h in (-1, 0), no domain checks."""
    h = np.asarray(h, dtype=float)
    eta = 1.0 + h
    near = eta < _SERIES_SWITCH
    i0 = np.empty_like(h)
    i2 = np.empty_like(h)
    if np.any(near):
        s0, s2 = _barI_series(eta[near])
        i0[near], i2[near] = s0, s2
    if np.any(~near):
        c0, c2 = _barI_closed(h[~near])
        i0[~near], i2[~near] = c0, c2
    return i0, i2


def barI_derivative_array(h):
    """Vectorized (Ibar0', Ibar2') = (J/4, I/4) at r = sqrt(1+h)."""
    h = np.asarray(h, dtype=float)
    r = np.sqrt(1.0 + h)
    I, J = _ij_from_r(r, -h / (1.0 + r))
    return J / 4.0, I / 4.0


def _check_h(h: float):
    if not (-1.0 + H_EDGE <= h <= -H_EDGE):
        raise DomainError(f"h={h} outside [-1+1e-12, -1e-12]")


def eval_barI(h: float) -> EllipticPair:
    """(Ibar0(h), Ibar2(h)) for -1 < h < 0."""
    _check_h(h)
    i0, i2 = barI_array(np.array([h]))
    return EllipticPair(float(i0[0]), float(i2[0]), "Ibar0-Ibar2")


def barI_derivatives(h: float) -> tuple[float, float]:
    _check_h(h)
    d0, d2 = barI_derivative_array(np.array([h]))
    return float(d0[0]), float(d2[0])


def v_ratio(h: float) -> float:
    """v(h) = Ibar2/Ibar0; decreases from 1 (h=-1) to 4/5 (h=0)."""
    return eval_barI(h).ratio


def w_ratio(s: float) -> float:
    """w(s) = I(r)/J(r) at r = sqrt(1 - s^2); increases from 0 to 1."""
    if not (0.0 < s < 1.0):
        raise DomainError(f"s={s} outside (0, 1)")
    if s < _W_TINY:
        return w_near_zero(s)
    r = math.sqrt(1.0 - s * s)
    one_minus_r = s * s / (1.0 + r)
    I, J = _ij_from_r(r, one_minus_r)
    return float(I / J)


def w_ratio_array(s):
    s = np.asarray(s, dtype=float)
    tiny = s < _W_TINY
    st = np.where(tiny, 0.5, s)
    r = np.sqrt(1.0 - st * st)
    I, J = _ij_from_r(r, st * st / (1.0 + r))
    return np.where(tiny, 4.0 / (6.0 * math.log(2.0) - 2.0 * np.log(np.where(tiny, s, 0.5))), I / J)


def v_ratio_array(h):
    i0, i2 = barI_array(h)
    return i2 / i0


# endpoint expansions -------------------------------------------------------


def barI_near_zero(h: float) -> tuple[float, float]:
    """Leading terms of (Ibar0, Ibar2) as h -> 0-."""
    ln = math.log(-h)
    s2 = math.sqrt(2.0)
    l2 = math.log(2.0)
    i0 = 2 * s2 / 3 + h * (-ln + 1 + 6 * l2) / (4 * s2)
    i2 = 8 * s2 / 15 + h / s2 - h * h * (-2 * ln - 5 + 12 * l2) / (64 * s2)
    return i0, i2


def barI_near_minus_one(h: float) -> tuple[float, float]:
    """Leading terms of (Ibar0, Ibar2) as h -> -1+."""
    e = h + 1.0
    i0 = (math.pi / 4) * e + (3 * math.pi / 128) * e * e
    i2 = (math.pi / 4) * e - (math.pi / 128) * e * e
    return i0, i2


def v_near_minus_one(h: float) -> float:
    return 1.0 - (h + 1.0) / 8.0


def w_near_zero(s: float) -> float:
    """Leading behaviour w ~ 4 / (6 ln 2 - 2 ln s) as s -> 0+."""
    return 4.0 / (6.0 * math.log(2.0) - 2.0 * math.log(s))


def w_near_one(s: float) -> float:
    e = 1.0 - s
    return 1.0 - e / 2 - e * e / 32 - 3 * e**3 / 128


# quadrature oracles --------------------------------------------------------


def _precision():
    raw = os.environ.get("ISOMEL_PRECISION")
    if not raw:
        return None
    try:
        dps = int(raw)
    except ValueError:
        raise DomainError(f"ISOMEL_PRECISION must be an integer, got {raw!r}") from None
    if dps < 15:
        raise DomainError("ISOMEL_PRECISION must be at least 15")
    return dps


def quad_barI(h: float, k: int) -> float:
    """Direct quadrature of Ibar_k with the substitution u = u1 + (u2-u1) sin^2(phi).

    Uses mpmath at ``ISOMEL_PRECISION`` digits when that variable is set,
    otherwise scipy's adaptive Gauss-Kronrod.
    """
    if not (-1.0 < h < 0.0):
        raise DomainError(f"h={h} outside (-1, 0)")
    dps = _precision()
    if dps is not None:
        import mpmath as mp

        with mp.workdps(dps):
            hh = mp.mpf(h)
            rt = mp.sqrt(1 + hh)
            u1, u2 = mp.sqrt(1 - rt), mp.sqrt(1 + rt)
            d = u2 - u1

            def f(phi):
                u = u1 + d * mp.sin(phi) ** 2
                # h + 2u^2 - u^4 = (u-u1)(u2-u)(u+u1)(u+u2)
                root = d * mp.sin(phi) * mp.cos(phi) * mp.sqrt((u + u1) * (u + u2))
                return u**k * root * 2 * d * mp.sin(phi) * mp.cos(phi)

            return float(mp.quad(f, [0, mp.pi / 2]))
    from scipy.integrate import quad

    rt = math.sqrt(1 + h)
    u1, u2 = math.sqrt(-h / (1 + rt)), math.sqrt(1 + rt)
    d = u2 - u1

    def g(phi):
        sp_, cp = math.sin(phi), math.cos(phi)
        u = u1 + d * sp_ * sp_
        root = d * sp_ * cp * math.sqrt((u + u1) * (u + u2))
        return u**k * root * 2 * d * sp_ * cp

    val, err = quad(g, 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def quad_IJ(r: float) -> tuple[float, float]:
    """Adaptive quadrature of I(r), J(r) in the angle variable."""
    if not (0.0 < r < 1.0):
        raise DomainError(f"r={r} outside (0, 1)")
    dps = _precision()
    if dps is not None:
        import mpmath as mp

        with mp.workdps(dps):
            rr = mp.mpf(r)
            I = mp.quad(lambda t: mp.sqrt(1 - rr * mp.cos(t)), [0, mp.pi / 2, mp.pi])
            J = mp.quad(lambda t: 1 / mp.sqrt(1 - rr * mp.cos(t)), [0, mp.pi / 2, mp.pi])
            return float(I), float(J)
    from scipy.integrate import quad

    # 1 - r cos t = (1 - r) + 2 r sin^2(t/2); keeps the small value exact near t = 0
    def base(t):
        s = math.sin(0.5 * t)
        return (1.0 - r) + 2.0 * r * s * s

    I = quad(lambda t: math.sqrt(base(t)), 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=400, points=[0.0])[0]
    J = quad(lambda t: 1.0 / math.sqrt(base(t)), 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=400)[0]
    return I, J


def quad_KE(m: float) -> tuple[float, float]:
    from scipy.integrate import quad

    K = quad(lambda t: 1.0 / math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13)[0]
    E = quad(lambda t: math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13)[0]
    return K, E
