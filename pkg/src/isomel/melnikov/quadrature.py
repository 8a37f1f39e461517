"""Direct evaluation of M(h) by quadrature over the two half-ovals.

Both evaluators integrate one monomial at a time, so a result is a vector
of contributions in the parameter order of ``PerturbationSpec.vector``
and M(h) is its dot product with the coefficients.

* ``line``: the curve integral of w_P P dY - w_Q Q dX over each half-oval.
* ``green``: the area integral of div(w_P P, w_Q Q) over each half-disc,
  integrated exactly in X and numerically in Y, plus the section term.

The oval is parametrised as Y = c - r cos(theta), X = r sin(theta) sqrt(g(Y)),
which removes the square-root endpoint singularities.  When the weights
peak sharply near the lower section point the theta-range is split into
geometrically growing panels.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..errors import DomainError, NumericError
from .centers import CenterSpec, get_center
from .perturbation import PerturbationSpec, block_size, monomials

REL_TOL = 1e-13
AGREE_TOL = 1e-8
_START_NODES = 24
_MAX_NODES = 3072


@lru_cache(maxsize=32)
def _gauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panels(center: CenterSpec, h: float) -> list[float]:
    a, b = center.alpha(h), center.beta(h)
    r = (a - b) / 2
    delta = math.sqrt(2 * (1 + b) / r)
    edges = [0.0]
    if delta < 0.25:
        e = delta
        while e < math.pi / 2:
            edges.append(e)
            e *= 2
    edges.append(math.pi)
    return edges


def _nodes(edges, n):
    x, w = _gauss(n)
    th, wt = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = (hi - lo) / 2
        th.append(lo + half * (x + 1))
        wt.append(half * w)
    return np.concatenate(th), np.concatenate(wt)


def _curve(center: CenterSpec, h: float, theta):
    """X, U = 1 + Y and their theta-derivatives along the right half-oval."""
    r = (center.alpha(h) - center.beta(h)) / 2
    s, co = np.sin(theta), np.cos(theta)
    U = center.one_plus_beta(h) + 2 * r * np.sin(theta / 2) ** 2
    dY = r * s
    g, dg = center.shape(U, h)
    sg = np.sqrt(g)
    X = r * s * sg
    dX = r * co * sg + r * s * dg * dY / (2 * sg)
    return X, U, dX, dY


def _powers(v, n):
    out = np.ones((n + 1,) + v.shape)
    for k in range(1, n + 1):
        out[k] = out[k - 1] * v
    return out


def _line_vector(center, n, h, theta, wt):
    X, U, dX, dY = _curve(center, h, theta)
    wP, wQ, _ = center.weights(U)
    xp = _powers(center.x_scale * X, n)
    yp = _powers(center.ymap(U - 1), n)
    mons = monomials(n)
    out = np.empty(4 * len(mons))
    T = len(mons)
    for k, (i, j) in enumerate(mons):
        m = xp[i] * yp[j]
        mirror = (-1) ** i
        fa = wt * wP * dY * m
        fb = wt * wQ * dX * m
        out[k] = fa.sum()
        out[T + k] = -mirror * fa.sum()
        out[2 * T + k] = -fb.sum()
        out[3 * T + k] = -mirror * fb.sum()
    return out


def _green_vector(center, n, h, theta, wt):
    X, U, _, dY = _curve(center, h, theta)
    wP, wQ, dwQ = center.weights(U)
    xs = center.x_scale
    phi = center.ymap(U - 1)
    dphi = center.ymap_prime(U - 1)
    xp = _powers(xs * X, n)
    yp = _powers(phi, n)
    mons = monomials(n)
    T = len(mons)
    out = np.empty(4 * T)
    jac = wt * dY
    for k, (i, j) in enumerate(mons):
        # int_0^X d/dX (w_P x^i y^j) dX and its mirror on [-X, 0]
        a_area_plus = wP * yp[j] * (xp[i] - (1.0 if i == 0 else 0.0))
        a_area_minus = wP * yp[j] * ((1.0 if i == 0 else 0.0) - (-1) ** i * xp[i])
        section = wP * yp[j] if i == 0 else 0.0
        out[k] = (jac * (a_area_plus + section)).sum()
        out[T + k] = (jac * (a_area_minus - section)).sum()
        # int_0^X d/dY (w_Q x^i y^j) dX, exact in X
        dy_part = dwQ * yp[j]
        if j > 0:
            dy_part = dy_part + wQ * j * yp[j - 1] * dphi
        col = xp[i] * X / (i + 1) * dy_part
        out[2 * T + k] = (jac * col).sum()
        out[3 * T + k] = (-1) ** i * (jac * col).sum()
    return out


def _converged(center, n, h, builder, method):
    edges = _panels(center, h)
    nodes = _START_NODES
    prev = builder(center, n, h, *_nodes(edges, nodes))
    while True:
        nodes *= 2
        cur = builder(center, n, h, *_nodes(edges, nodes))
        scale = np.max(np.abs(cur))
        err = np.max(np.abs(cur - prev))
        if err <= REL_TOL * max(scale, 1e-300) or err == 0:
            return cur
        if nodes * (len(edges) - 1) > _MAX_NODES:
            raise NumericError(
                f"{method} quadrature did not converge for {center.tag} at h={h}",
                h=h, center=center.tag, method=method, nodes=nodes, panels=len(edges) - 1,
                estimated_error=float(err), scale=float(scale),
            )
        prev = cur


@lru_cache(maxsize=8192)
def _monomial_vector(tag: str, n: int, h: float, method: str) -> np.ndarray:
    center = get_center(tag)
    builder = _line_vector if method == "line" else _green_vector
    vec = _converged(center, n, h, builder, method)
    vec.setflags(write=False)
    return vec


def monomial_integrals(center, n: int, h: float, method: str = "line") -> np.ndarray:
    """Contribution of each unit coefficient to M(h), in ``PerturbationSpec.vector`` order."""
    center = get_center(center)
    h = float(h)
    center.check_h(h)
    if method not in ("line", "green"):
        raise DomainError(f"unknown quadrature method {method!r}")
    if n < 0:
        raise DomainError("degree must be nonnegative")
    return _monomial_vector(center.tag, int(n), h, method)


def melnikov_quadrature(center, pert: PerturbationSpec, h: float, check: bool = True) -> float:
    """M(h) from the curve integral, cross-checked against the area form."""
    center = get_center(center)
    p = pert.vector()
    line = monomial_integrals(center, pert.n, h, "line")
    value = float(p @ line)
    if check:
        green = float(p @ monomial_integrals(center, pert.n, h, "green"))
        scale = max(abs(value), float(np.abs(p) @ np.abs(line)))
        if abs(green - value) > AGREE_TOL * scale:
            raise NumericError(
                f"curve and area forms of M disagree for {center.tag} at h={h}",
                h=h, line=value, green=green, scale=scale,
            )
    return value


def melnikov_quadrature_array(center, pert: PerturbationSpec, hs, check: bool = False) -> np.ndarray:
    return np.array([melnikov_quadrature(center, pert, float(h), check=check) for h in np.ravel(hs)])


def half_integrals(center, pert: PerturbationSpec, h: float) -> dict:
    """Split of M(h) into curve pieces and the area/section pieces of each side."""
    center = get_center(center)
    T = block_size(pert.n)
    line = monomial_integrals(center, pert.n, h, "line")
    p = pert.vector()
    plus = float(p[:T] @ line[:T] + p[2 * T:3 * T] @ line[2 * T:3 * T])
    minus = float(p[T:2 * T] @ line[T:2 * T] + p[3 * T:] @ line[3 * T:])
    return {"plus": plus, "minus": minus, "total": plus + minus}
