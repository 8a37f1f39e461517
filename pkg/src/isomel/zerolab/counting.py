"""Numeric zero counting with bracket refinement."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..errors import DomainError, NumericError
from ..melnikov import PerturbationSpec, get_center, melnikov_quadrature, monomial_integrals


@dataclass
class ZeroLocation:
    bracket: tuple[float, float]
    root: float
    residual: float
    kind: str  # "simple" or "degenerate"


@dataclass
class ZeroReport:
    count: int
    locations: list[ZeroLocation] = field(default_factory=list)
    degenerate: list[ZeroLocation] = field(default_factory=list)
    interval: tuple[float, float] | None = None
    grid_size: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def roots(self) -> list[float]:
        return [z.root for z in self.locations]

    def to_dict(self) -> dict:
        return asdict(self)


def make_grid(iv, size: int, spacing: str = "linear") -> np.ndarray:
    lo, hi = map(float, iv)
    if not lo < hi:
        raise DomainError(f"empty interval ({lo}, {hi})")
    if spacing == "linear":
        return np.linspace(lo, hi, size)
    if spacing == "log":
        if lo <= 0:
            raise DomainError("log spacing needs a positive interval")
        return np.geomspace(lo, hi, size)
    if spacing == "logit":
        # clustered at both ends: equal steps in log((x - lo)/(hi - x)) between 1e-3 of the width
        t = np.linspace(-1, 1, size)
        return lo + (hi - lo) * (1 + np.tanh(4.0 * t) / np.tanh(4.0)) / 2
    raise DomainError(f"unknown spacing {spacing!r}")


def _finite(values, grid):
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.argmax(bad))
        raise NumericError(f"non-finite function value at x={grid[k]!r}", x=float(grid[k]), value=float(values[k]))


def count_zeros(f, iv, grid_size: int = 256, tol: float = 1e-10, derivative=None, spacing: str = "linear",
                values=None, grid=None) -> ZeroReport:
    """Count sign changes of f on a grid and refine each bracket.

    A refined root is *simple* when the derivative there, scaled by the
    bracket width and the larger endpoint value, exceeds ``100 * tol``.
    Near-zero local minima of |f| without a sign change are returned as
    degenerate candidates and never counted.
    """
    if grid_size < 64:
        raise DomainError("grid_size must be at least 64")
    if tol <= 0:
        raise DomainError("tol must be positive")
    xs = make_grid(iv, grid_size, spacing) if grid is None else np.asarray(grid, dtype=float)
    ys = np.array([f(x) for x in xs], dtype=float) if values is None else np.asarray(values, dtype=float)
    _finite(ys, xs)
    report = ZeroReport(0, interval=(float(xs[0]), float(xs[-1])), grid_size=len(xs))

    def slope(r, a, b):
        if derivative is not None:
            return float(derivative(r))
        step = 1e-6 * (b - a)
        lo, hi = max(r - step, xs[0]), min(r + step, xs[-1])
        return (f(hi) - f(lo)) / (hi - lo)

    for k in range(len(xs) - 1):
        a, b = xs[k], xs[k + 1]
        fa, fb = ys[k], ys[k + 1]
        if fa == 0.0:
            if 0 < k and ys[k - 1] * (ys[k + 1]) < 0:
                report.locations.append(_classify(f, xs[k - 1], b, a, slope, max(abs(ys[k - 1]), abs(ys[k + 1])), tol))
            continue
        if fa * fb < 0:
            try:
                r = brentq(f, a, b, xtol=1e-15 * max(1.0, abs(a)), rtol=4e-16, maxiter=200)
            except (RuntimeError, ValueError):
                r = _bisect(f, a, b, fa)
            report.locations.append(_classify(f, a, b, r, slope, max(abs(fa), abs(fb)), tol))
    # near-zero minima of |f| without a sign change
    for k in range(1, len(xs) - 1):
        y = abs(ys[k])
        if y <= abs(ys[k - 1]) and y <= abs(ys[k + 1]) and ys[k - 1] * ys[k + 1] > 0 and ys[k] * ys[k - 1] >= 0:
            local = max(abs(ys[k - 1]), abs(ys[k + 1]))
            if y > 1e-6 * local:
                continue
            res = minimize_scalar(lambda x: abs(f(x)), bounds=(xs[k - 1], xs[k + 1]), method="bounded",
                                  options={"xatol": 1e-14 * max(1.0, abs(xs[k]))})
            if abs(f(res.x)) <= 1e3 * tol * local:
                report.degenerate.append(
                    ZeroLocation((float(xs[k - 1]), float(xs[k + 1])), float(res.x), float(abs(f(res.x))), "degenerate"))
    simple = [z for z in report.locations if z.kind == "simple"]
    report.degenerate += [z for z in report.locations if z.kind != "simple"]
    report.locations = simple
    report.count = len(simple)
    return report


def _bisect(f, a, b, fa):
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0 or b - a <= 4e-16 * max(1.0, abs(m)):
            return m
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _classify(f, a, b, r, slope, scale, tol):
    val = abs(f(r))
    d = abs(slope(r, a, b)) * (b - a) / scale
    kind = "simple" if d > 100 * tol else "degenerate"
    return ZeroLocation((float(a), float(b)), float(r), float(val), kind)


# default scan ranges for M(h) inside each annulus
H_MAX = 1e3
SCAN = {
    "S1": ((1e-6, H_MAX), "log"),
    "S3": ((1e-6, H_MAX), "log"),
    "S2": ((1e-6, 1 - 1e-6), "logit"),
    "S4": ((-1 + 1e-6, -1e-6), "logit"),
}


@lru_cache(maxsize=64)
def _grid_matrix(tag: str, n: int, size: int):
    iv, spacing = SCAN[tag]
    xs = make_grid(iv, size, spacing)
    G = np.array([monomial_integrals(tag, n, x) for x in xs])
    G.setflags(write=False)
    return xs, G


def melnikov_function(center, pert: PerturbationSpec):
    tag = get_center(center).tag
    return lambda h: melnikov_quadrature(tag, pert, float(h), check=False)


def melnikov_zeros(center, pert: PerturbationSpec, grid_size: int = 400, tol: float = 1e-10) -> ZeroReport:
    """Zeros of M(h) over the annulus, evaluated by quadrature.

    On the unbounded annuli of S1 and S3 the scan stops at H_MAX; the sign
    of M at H_MAX * 10**k, k = 1..3, is checked to agree with M(H_MAX) and
    the result is stored under ``notes['tail_sign_constant']``.
    """
    tag = get_center(center).tag
    xs, G = _grid_matrix(tag, pert.n, grid_size)
    p = pert.vector()
    vals = G @ p
    f = melnikov_function(tag, pert)
    if not np.any(vals):
        rep = ZeroReport(0, interval=(float(xs[0]), float(xs[-1])), grid_size=len(xs), notes={"identically_zero": True})
        return rep
    rep = count_zeros(f, (xs[0], xs[-1]), grid_size=len(xs), tol=tol, values=vals, grid=xs)
    rep.notes["center"] = tag
    if tag in ("S1", "S3"):
        tail = [f(H_MAX * 10 ** k) for k in range(4)]
        rep.notes["tail_sign_constant"] = bool(all(np.sign(t) == np.sign(tail[0]) for t in tail))
    return rep
