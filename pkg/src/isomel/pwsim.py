"""Piecewise-smooth simulation across the switching line x = 0.

The perturbed field is the unperturbed center plus eps*(P+, Q+) for x > 0
and eps*(P-, Q-) for x < 0.  An orbit starts at the lower point of the oval
on x = 0, runs through x > 0 to the upper point and returns through x < 0;
the change of the level function over that loop is the displacement d(h).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NumericError, TrajectoryError
from .melnikov import PerturbationSpec, get_center, monomials

RTOL = 1e-12
ATOL = 1e-14
EVENT_TOL = 1e-12
TRANSVERSAL_TOL = 1e-8
T_MAX = 200.0
EPS_MAX = 1e-2
CYCLE_TOL = 1e-10
# displacements below this are integration noise and carry no sign
NOISE = 1e-11
FAR = 1e6


@dataclass(frozen=True)
class PwSystem:
    center: str
    pert: PerturbationSpec
    eps: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "center", get_center(self.center).tag)
        if not math.isfinite(self.eps) or abs(self.eps) > EPS_MAX:
            raise DomainError(f"|eps| must be at most {EPS_MAX}, got {self.eps}")

    def rhs(self, side: int):
        c = get_center(self.center)
        mons = monomials(self.pert.n)
        a = self.pert.a_plus if side > 0 else self.pert.a_minus
        b = self.pert.b_plus if side > 0 else self.pert.b_minus
        terms = [(i, j, float(a[k]), float(b[k])) for k, (i, j) in enumerate(mons) if a[k] or b[k]]
        eps = self.eps
        field_ = c.field

        def f(t, z):
            x, y = z
            fx, fy = field_(x, y)
            P = Q = 0.0
            for i, j, ak, bk in terms:
                m = x**i * y**j
                P += ak * m
                Q += bk * m
            return [fx + eps * P, fy + eps * Q]

        return f


@dataclass
class SectionPoint:
    y: float
    h: float


def section_point(sys: PwSystem, h: float, upper: bool = False) -> SectionPoint:
    c = get_center(sys.center)
    c.check_h(h)
    lo, hi = c.section_y(h)
    return SectionPoint(hi if upper else lo, float(h))


def _level(c, y):
    return float(c.level_on_section(y))


def half_map(sys: PwSystem, start: SectionPoint, side: int, trajectory: list | None = None) -> SectionPoint:
    """Follow the side's field from x = 0 to the next crossing of x = 0."""
    if side not in (1, -1):
        raise DomainError("side must be +1 (x > 0) or -1 (x < 0)")
    c = get_center(sys.center)
    f = sys.rhs(side)
    x0 = [0.0, float(start.y)]
    dx = f(0.0, x0)[0]
    if abs(dx) < TRANSVERSAL_TOL:
        raise TrajectoryError(f"tangency at the start point y={start.y}", y=start.y, xdot=dx)
    if np.sign(dx) != side:
        raise TrajectoryError(f"field at y={start.y} does not enter the x{'>' if side > 0 else '<'}0 side",
                              y=start.y, xdot=dx)

    def cross(t, z):
        return z[0]

    cross.terminal = True
    cross.direction = -side

    def singular(t, z):
        # the line 1 + y = 0 bounds every period annulus
        return 1 + z[1] - 1e-6

    singular.terminal = True

    def far(t, z):
        return FAR - max(abs(z[0]), abs(z[1]))

    far.terminal = True

    sol = solve_ivp(f, (0.0, T_MAX), x0, method="DOP853", rtol=RTOL, atol=ATOL,
                    events=[cross, singular, far], dense_output=trajectory is not None)
    if sol.status == -1:
        raise NumericError(f"integration failed: {sol.message}", y=start.y)
    if sol.t_events[1].size:
        raise TrajectoryError("trajectory reached the singular line 1 + y = 0", y=start.y)
    if sol.t_events[2].size:
        raise TrajectoryError("trajectory escaped to infinity", y=start.y)
    if not sol.t_events[0].size:
        raise NumericError("no return to x = 0 within the time limit", y=start.y, t_max=T_MAX)
    xe, ye = sol.y_events[0][0]
    if abs(xe) > EVENT_TOL:
        raise NumericError("event localization failed", x=float(xe))
    dxe = f(0.0, [0.0, ye])[0]
    if abs(dxe) < TRANSVERSAL_TOL:
        raise TrajectoryError(f"sliding or tangency at the crossing y={ye}", y=float(ye), xdot=dxe)
    if trajectory is not None:
        ts = np.linspace(0.0, sol.t_events[0][0], 200)
        for t, (x, y) in zip(ts, sol.sol(ts).T):
            trajectory.append((float(t) + (trajectory[-1][0] if trajectory else 0.0), float(x), float(y),
                               float(c.H(x, y))))
    h = _level(c, ye)
    lo, hi = c.domain
    if not lo < h < hi:
        raise TrajectoryError(f"trajectory left the period annulus (level {h})", y=float(ye), h=h)
    return SectionPoint(float(ye), h)


def full_return(sys: PwSystem, h: float, trajectory: list | None = None) -> tuple[SectionPoint, SectionPoint]:
    start = section_point(sys, h)
    mid = half_map(sys, start, +1, trajectory)
    end = half_map(sys, mid, -1, trajectory)
    return mid, end


def displacement(sys: PwSystem, h: float) -> float:
    """d(h) = level(return) - level(start) over one loop started at the lower section point."""
    c = get_center(sys.center)
    start = section_point(sys, h)
    _, end = full_return(sys, h)
    return _level(c, end.y) - _level(c, start.y)


def trajectory_csv(sys: PwSystem, h: float) -> str:
    rows: list = []
    full_return(sys, h, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "y", "H"])
    for r in rows:
        w.writerow([f"{v:.17g}" for v in r])
    return buf.getvalue()


@dataclass
class Cycle:
    h: float
    residual: float
    bracket: tuple
    iterations: int
    status: str  # converged, unresolved, unresolved pair


@dataclass
class CycleReport:
    center: str
    eps: float
    cycles: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    values: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.cycles)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)


def _disp_job(args):
    sys, h = args
    return displacement(sys, h)


def find_cycles(sys: PwSystem, h_grid, jobs: int = 1, max_iter: int = 60) -> CycleReport:
    """Fixed points of the return map from sign changes of d on the grid."""
    grid = [float(h) for h in h_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            vals = list(ex.map(_disp_job, [(sys, h) for h in grid]))
    else:
        vals = [displacement(sys, h) for h in grid]
    rep = CycleReport(sys.center, sys.eps, grid=grid, values=vals)
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa * fb >= 0 or max(abs(fa), abs(fb)) < NOISE:
            continue
        cyc = _secant(sys, a, b, fa, fb, max_iter)
        (rep.cycles if cyc.status == "converged" else rep.unresolved).append(cyc)
    # cycles too close to separate at this eps
    min_gap = 5 * abs(sys.eps)
    keep = []
    for cyc in rep.cycles:
        if keep and cyc.h - keep[-1].h < min_gap:
            prev = keep.pop()
            prev.status = cyc.status = "unresolved pair"
            rep.unresolved += [prev, cyc]
            continue
        keep.append(cyc)
    rep.cycles = keep
    return rep


def _secant(sys, a, b, fa, fb, max_iter) -> Cycle:
    """Illinois-type secant iteration keeping a sign-change bracket."""
    lo, hi, flo, fhi = a, b, fa, fb
    side = 0
    for it in range(1, max_iter + 1):
        x = (lo * fhi - hi * flo) / (fhi - flo)
        fx = displacement(sys, x)
        if abs(fx) < CYCLE_TOL:
            return Cycle(x, fx, (a, b), it, "converged")
        if fx * fhi < 0:
            lo, flo = hi, fhi
            hi, fhi = x, fx
            if side == -1:
                flo /= 2
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo /= 2
            side = 1
        if abs(hi - lo) < 1e-15 * max(1.0, abs(x)):
            break
    return Cycle(x, fx, (a, b), max_iter, "unresolved")


def richardson_ratio(center, pert: PerturbationSpec, h: float, eps_values=(1e-2, 1e-3, 1e-4)) -> list:
    """d(h, eps)/eps for decreasing eps and its linear extrapolation to eps = 0."""
    ratios = [displacement(PwSystem(center, pert, e), h) / e for e in eps_values]
    e1, e2 = eps_values[-2], eps_values[-1]
    limit = (ratios[-1] * e1 - ratios[-2] * e2) / (e1 - e2)
    return ratios + [limit]
