"""The four quadratic isochronous centers.

Each center is unperturbed ``x' = -y + ..., y' = x(1+y)`` with first
integral H and integrating factor R.  Melnikov integrals are computed in
*working* coordinates (X, Y) in which the oval H = h is ``X**2 = (Y -
beta)(alpha - Y) g(Y)``; only S3 differs from the original coordinates
(x = 2X, y = Y(2+Y), which turns S3 into the S1 form).  The perturbation
prefactor (eps/2, eps/2, eps, eps/8) is absorbed into the path weights
``w_P``, ``w_Q`` so that

    M(h) = sum_{+,-} int_{L_h^+-} w_P(Y) P(x, y) dY - w_Q(Y) Q(x, y) dX

with the ovals traversed along the unperturbed flow (counterclockwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class CenterSpec:
    tag: str
    h_center: float
    h_separatrix: float
    prefactor: float
    # first integral and integrating factor in original coordinates
    H: Callable
    R: Callable
    # unperturbed field in original coordinates
    field: Callable
    # section ordinates in working coordinates
    alpha: Callable[[float], float]
    beta: Callable[[float], float]
    # 1 + beta(h) without cancellation
    one_plus_beta: Callable[[float], float]
    # X^2 = (Y - beta)(alpha - Y) g(Y); returns (g, dg/dY), given U = 1 + Y
    shape: Callable
    # path weights as functions of U = 1 + Y; returns (w_P, w_Q, dw_Q/dY)
    weights: Callable
    # original coordinates from working ones: x = x_scale*X, y = ymap(Y)
    x_scale: float
    ymap: Callable
    ymap_prime: Callable
    # Melnikov level of a point in original coordinates (equals h on the oval)
    level: Callable
    # d(h) ~ displacement_sign * eps * M(h) for the level function above
    displacement_sign: int

    @property
    def domain(self) -> tuple[float, float]:
        return (min(self.h_center, self.h_separatrix), max(self.h_center, self.h_separatrix))

    def check_h(self, h: float) -> None:
        lo, hi = self.domain
        if not (lo < h < hi) or math.isnan(h):
            raise DomainError(f"h={h} outside the period annulus {self.domain} of {self.tag}")

    def section_y(self, h: float) -> tuple[float, float]:
        """(lower, upper) ordinates of the oval on x = 0 in original coordinates."""
        return float(self.ymap(self.beta(h))), float(self.ymap(self.alpha(h)))

    def level_on_section(self, y):
        return self.level(0.0, y)


def _s1_alpha(h):
    return (h + math.sqrt(h * (4 + h))) / 2


def _s1_beta(h):
    # (h - sqrt(h(4+h)))/2 without cancellation
    return -2 * h / (h + math.sqrt(h * (4 + h)))


def _s1_ubeta(h):
    return 2 / (2 + h + math.sqrt(h * (4 + h)))


def _s1_level(x, y):
    return (x * x + y * y) / (1 + y)


S1 = CenterSpec(
    tag="S1",
    h_center=0.0,
    h_separatrix=math.inf,
    prefactor=0.5,
    H=_s1_level,
    R=lambda x, y: 2 / (1 + y) ** 2,
    field=lambda x, y: (-y + 0.5 * x * x - 0.5 * y * y, x * (1 + y)),
    alpha=_s1_alpha,
    beta=_s1_beta,
    one_plus_beta=_s1_ubeta,
    shape=lambda U, h: (np.ones_like(U), np.zeros_like(U)),
    weights=lambda U: (U ** -2, U ** -2, -2 * U ** -3),
    x_scale=1.0,
    ymap=lambda Y: Y,
    ymap_prime=lambda Y: np.ones_like(Y),
    level=_s1_level,
    displacement_sign=1,
)


def _s2_alpha(h):
    return (1 - h + math.sqrt(1 - h)) / h


def _s2_beta(h):
    # (1 - h - sqrt(1-h))/h = -sqrt(1-h)/(1 + sqrt(1-h))
    s = math.sqrt(1 - h)
    return -s / (1 + s)


def _s2_level(x, y):
    return (2 * y + 1 - x * x) / (1 + y) ** 2


S2 = CenterSpec(
    tag="S2",
    h_center=1.0,
    h_separatrix=0.0,
    prefactor=0.5,
    H=_s2_level,
    R=lambda x, y: 2 / (1 + y) ** 3,
    field=lambda x, y: (-y + x * x, x * (1 + y)),
    alpha=_s2_alpha,
    beta=_s2_beta,
    one_plus_beta=lambda h: 1 / (1 + math.sqrt(1 - h)),
    shape=lambda U, h: (np.full_like(U, h), np.zeros_like(U)),
    weights=lambda U: (U ** -3, U ** -3, -3 * U ** -4),
    x_scale=1.0,
    ymap=lambda Y: Y,
    ymap_prime=lambda Y: np.ones_like(Y),
    level=_s2_level,
    # this H decreases outward, reversing the sign of its drift
    displacement_sign=-1,
)


def _s3_H(x, y):
    return (x * x + 4 * y + 8) ** 2 / (1 + y)


def _s3_level(x, y):
    # S1 level of the transformed point (x/2, sqrt(1+y) - 1)
    Y = y / (1 + np.sqrt(1 + y))
    X = 0.5 * x
    return (X * X + Y * Y) / (1 + Y)


S3 = CenterSpec(
    tag="S3",
    h_center=0.0,
    h_separatrix=math.inf,
    prefactor=1.0,
    H=_s3_H,
    R=lambda x, y: 4 * (x * x + 4 * y + 8) / (1 + y) ** 2,
    field=lambda x, y: (-y + 0.25 * x * x, x * (1 + y)),
    alpha=_s1_alpha,
    beta=_s1_beta,
    one_plus_beta=_s1_ubeta,
    shape=lambda U, h: (np.ones_like(U), np.zeros_like(U)),
    weights=lambda U: (U ** -2, U ** -3, -3 * U ** -4),
    x_scale=2.0,
    ymap=lambda Y: Y * (2 + Y),
    ymap_prime=lambda Y: 2 + 2 * Y,
    level=_s3_level,
    displacement_sign=1,
)


def _s4_ualpha(h):
    return math.sqrt((1 + math.sqrt(1 + h)) / -h)


def _s4_ubeta(h):
    # sqrt((1 - sqrt(1+h))/(-h)) = 1/sqrt(1 + sqrt(1+h))
    return 1 / math.sqrt(1 + math.sqrt(1 + h))


def _s4_shape(u, h):
    ua, ub = _s4_ualpha(h), _s4_ubeta(h)
    return (-h / 4) * (u + ua) * (u + ub), (-h / 4) * (2 * u + ua + ub)


def _s4_level(x, y):
    return (4 * x * x - 2 * (y + 1) ** 2 + 1) / (1 + y) ** 4


S4 = CenterSpec(
    tag="S4",
    h_center=-1.0,
    h_separatrix=0.0,
    prefactor=0.125,
    H=_s4_level,
    R=lambda x, y: 8 / (1 + y) ** 5,
    field=lambda x, y: (-y + 2 * x * x - 0.5 * y * y, x * (1 + y)),
    alpha=lambda h: _s4_ualpha(h) - 1,
    beta=lambda h: _s4_ubeta(h) - 1,
    one_plus_beta=_s4_ubeta,
    shape=_s4_shape,
    weights=lambda U: (U ** -5, U ** -5, -5 * U ** -6),
    x_scale=1.0,
    ymap=lambda Y: Y,
    ymap_prime=lambda Y: np.ones_like(Y),
    level=_s4_level,
    displacement_sign=1,
)

CENTERS = {c.tag: c for c in (S1, S2, S3, S4)}


def get_center(tag) -> CenterSpec:
    if isinstance(tag, CenterSpec):
        return tag
    try:
        return CENTERS[str(tag).upper()]
    except KeyError:
        raise DomainError(f"unknown center {tag!r}; expected one of S1..S4") from None
