"""Command-line front end: bounds, verification suites, evaluation, counting,
coefficient maps, simulation and table reproduction."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, IsomelError, NumericError, ParseError, PreconditionError

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

CENTER_NAMES = ("S1", "S2", "S3", "S4")

# default sampling windows for eval and simulate
WINDOWS = {
    "S1": ((0.01, 20.0), True),
    "S3": ((0.01, 20.0), True),
    "S2": ((0.01, 0.99), False),
    "S4": ((-0.99, -0.01), False),
}

SHARP_WITNESSES = (("S1", 0), ("S2", 0), ("S2", 1), ("S2", 2), ("S3", 0), ("S3", 1), ("S3", 2), ("S4", 0), ("S4", 1))


class UsageError(IsomelError, ValueError):
    """Bad command line."""


@dataclass
class RunConfig:
    command: str
    center: str | None = None
    n: list = field(default_factory=list)
    pert_path: str | None = None
    h_range: tuple | None = None
    tol: float | None = None
    eps: float = 1e-3
    grid: int | None = None
    seed: int = 0
    fmt: str = "json"
    jobs: int = 1
    suite: str | None = None
    smooth: bool = False
    witness: bool = False
    targets: list | None = None
    log_h: bool | None = None
    trajectory: float | None = None
    improved: bool = True

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise DomainError(f"tolerance must be positive, got {self.tol}")
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if self.grid is not None and self.grid < 2:
            raise DomainError(f"grid must have at least 2 points, got {self.grid}")
        if self.jobs < 1:
            raise DomainError(f"jobs must be at least 1, got {self.jobs}")


# ---------------------------------------------------------------------------
# serialization


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _plain(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON with sorted keys and floats at 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent + 1)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(_plain(v), (int, float, str, bool)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + " " * indent + "]"
    return json.dumps(str(obj))


def svg_plot(xs, ys, title: str = "", log_x: bool = False, markers=()) -> str:
    """Polyline plot in a fixed 640x400 viewport; non-finite samples break the line."""
    W, H, L, R, T, B = 640, 400, 70, 620, 30, 360
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if log_x:
        if np.any(xs <= 0):
            raise DomainError("log-h axis needs positive h")
        tx = np.log10(xs)
    else:
        tx = xs
    ok = np.isfinite(ys)
    x0, x1 = float(tx.min()), float(tx.max())
    if x1 == x0:
        x1 = x0 + 1.0
    y0, y1 = (float(ys[ok].min()), float(ys[ok].max())) if ok.any() else (-1.0, 1.0)
    y0, y1 = min(y0, 0.0), max(y1, 0.0)
    if y1 == y0:
        y0, y1 = -1.0, 1.0

    def px(v):
        return L + (R - L) * (v - x0) / (x1 - x0)

    def py(v):
        return B - (B - T) * (v - y0) / (y1 - y0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="{L}" y="{T}" width="{R - L}" height="{B - T}" fill="none" stroke="#000"/>',
        f'<line x1="{L}" y1="{py(0.0):.2f}" x2="{R}" y2="{py(0.0):.2f}" stroke="#999" stroke-dasharray="4 3"/>',
    ]
    segment = []
    for a, b, good in zip(tx, ys, ok):
        if good:
            segment.append(f"{px(a):.2f},{py(b):.2f}")
        elif segment:
            out.append(f'<polyline fill="none" stroke="#1f4e9c" points="{" ".join(segment)}"/>')
            segment = []
    if segment:
        out.append(f'<polyline fill="none" stroke="#1f4e9c" points="{" ".join(segment)}"/>')
    for m in markers:
        mx = math.log10(m) if log_x else m
        out.append(f'<circle cx="{px(mx):.2f}" cy="{py(0.0):.2f}" r="3" fill="#c0392b"/>')
    xl = "log10 h" if log_x else "h"
    out += [
        f'<text x="{L}" y="20" font-size="13">{title}</text>',
        f'<text x="{L}" y="{B + 18}" font-size="11">{x0:.4g}</text>',
        f'<text x="{R}" y="{B + 18}" font-size="11" text-anchor="end">{x1:.4g}</text>',
        f'<text x="{(L + R) // 2}" y="{B + 32}" font-size="11" text-anchor="middle">{xl}</text>',
        f'<text x="{L - 6}" y="{T + 10}" font-size="11" text-anchor="end">{y1:.4g}</text>',
        f'<text x="{L - 6}" y="{B}" font-size="11" text-anchor="end">{y0:.4g}</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, (float, np.floating)) else str(v) for v in r))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def parse_range(text: str) -> list[int]:
    """'3', '0..5' (inclusive) or '0,2,4'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad degree range {text!r}") from None


def parse_h_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(".."))
    except ValueError:
        raise UsageError(f"bad h range {text!r}, expected LO..HI") from None
    if not lo < hi:
        raise DomainError(f"empty h range {text!r}")
    return lo, hi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--center", choices=CENTER_NAMES)
    common.add_argument("--n", default=None, help="degree or range, e.g. 3 or 0..5")
    common.add_argument("--pert", metavar="FILE", help="perturbation JSON file")
    common.add_argument("--witness", action="store_true", help="use the constructed witness for --center/--n")
    common.add_argument("--targets", help="comma separated witness zeros")
    common.add_argument("--h-range", dest="h_range", help="LO..HI")
    common.add_argument("--eps", type=float, default=1e-3)
    common.add_argument("--tol", type=float)
    common.add_argument("--grid", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "svg"), default="json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--smooth", action="store_true", help="smooth perturbations")
    common.add_argument("--no-improved", dest="improved", action="store_false",
                        help="older smooth S4 bound 14n+11")
    common.add_argument("--log-h", dest="log_h", action="store_true", default=None, help="log-scaled h axis")
    common.add_argument("--linear-h", dest="log_h", action="store_false", help="linear h axis")
    common.add_argument("--trajectory", type=float, metavar="H", help="dump one orbit from level H as CSV")

    p = _Parser(prog="isomel", description="Melnikov functions of piecewise perturbed isochronous centers")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bounds", parents=[common], help="bound table rows")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=("identities", "wronskians", "fuchs", "all"))
    sub.add_parser("eval", parents=[common], help="M(h) by closed form and by quadrature")
    sub.add_parser("count", parents=[common], help="zeros of M(h)")
    sub.add_parser("map-coeffs", parents=[common], help="closed-form coefficients")
    sub.add_parser("simulate", parents=[common], help="limit cycles of the perturbed system")
    sub.add_parser("reproduce", parents=[common], help="bound, witness and Fuchsian tables")
    return p


def make_config(argv) -> RunConfig:
    a = build_parser().parse_args(argv)
    targets = None
    if a.targets:
        try:
            targets = [float(t) for t in a.targets.split(",")]
        except ValueError:
            raise UsageError(f"bad targets {a.targets!r}") from None
    return RunConfig(
        command=a.command,
        center=a.center,
        n=parse_range(a.n) if a.n is not None else [],
        pert_path=a.pert,
        h_range=parse_h_range(a.h_range) if a.h_range else None,
        tol=a.tol,
        eps=a.eps,
        grid=a.grid,
        seed=a.seed,
        fmt=a.fmt,
        jobs=a.jobs,
        suite=getattr(a, "suite", None),
        smooth=a.smooth,
        witness=a.witness,
        targets=targets,
        log_h=a.log_h,
        trajectory=a.trajectory,
        improved=a.improved,
    )


# ---------------------------------------------------------------------------
# helpers


def load_perturbation(cfg: RunConfig):
    """The perturbation and its center from --pert or --witness."""
    from .melnikov import PerturbationSpec
    from .zerolab import realize_perturbation

    if cfg.witness:
        if cfg.center is None or len(cfg.n) != 1:
            raise UsageError("--witness needs --center and a single --n")
        pert, _ = realize_perturbation(cfg.center, cfg.n[0], cfg.targets, piecewise=not cfg.smooth)
        return pert, cfg.center
    if cfg.pert_path is None:
        raise UsageError(f"{cfg.command} needs --pert FILE or --witness")
    try:
        with open(cfg.pert_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {cfg.pert_path}: {exc.strerror}") from None
    try:
        pert = PerturbationSpec.from_json(text)
    except ParseError as exc:
        raise ParseError(f"{cfg.pert_path}: {exc}") from None
    except DomainError as exc:
        raise ParseError(f"{cfg.pert_path}: {exc}") from None
    center = cfg.center or pert.center
    if center is None:
        raise UsageError("no center given on the command line or in the perturbation file")
    if pert.center is not None and cfg.center is not None and pert.center != cfg.center:
        raise UsageError(f"--center {cfg.center} disagrees with the file's center {pert.center}")
    if cfg.n and cfg.n != [pert.n]:
        raise UsageError(f"--n {cfg.n} disagrees with the file's degree {pert.n}")
    return pert, center


def sample_grid(center: str, cfg: RunConfig, default_size: int) -> tuple[np.ndarray, bool]:
    (lo, hi), log_default = WINDOWS[center]
    if cfg.h_range is not None:
        lo, hi = cfg.h_range
    log = log_default if cfg.log_h is None else cfg.log_h
    size = cfg.grid or default_size
    if log and lo <= 0:
        raise DomainError("log-h sampling needs a positive h range")
    xs = np.geomspace(lo, hi, size) if log else np.linspace(lo, hi, size)
    return xs, log


@dataclass
class Outcome:
    text: str
    code: int = EXIT_OK


# ---------------------------------------------------------------------------
# commands


def cmd_bounds(cfg: RunConfig) -> Outcome:
    from .zerolab import bound_rows, bounds_csv

    centers = [cfg.center] if cfg.center else list(CENTER_NAMES)
    ns = cfg.n or list(range(0, 11))
    rows = bound_rows(centers, ns, piecewise=not cfg.smooth, smooth_s4_improved=cfg.improved)
    if cfg.fmt == "csv":
        return Outcome(bounds_csv(rows))
    if cfg.fmt == "svg":
        raise UsageError("bounds has no svg output")
    return Outcome(dumps({"rows": [r.to_dict() for r in rows]}) + "\n")


def _check(name, ok, **detail) -> dict:
    return {"name": name, "pass": bool(ok), "detail": detail}


def suite_identities(cfg: RunConfig) -> list[dict]:
    from scipy.integrate import quad

    from .exactpoly import RationalInterval, load_poly, sturm_count
    from .melnikov import PerturbationSpec, basis_eval, closed_form_eval, coefficient_map, get_center
    from .melnikov import melnikov_quadrature
    from .melnikov.coeffmap import FIT_WINDOWS
    from .specialfn import barI_array, barI_derivative_array, eval_barI, quad_barI

    out = []
    c1 = get_center("S1")
    worst = 0.0
    for hv in (0.25, 1.0, 3.0, 10.0):
        lo, hi = c1.beta(hv), c1.alpha(hv)
        i_m3 = quad(lambda y: math.sqrt(max(hv + hv * y - y * y, 0.0)) / (1 + y) ** 3, lo, hi,
                    epsabs=0, epsrel=1e-12, limit=200)[0]
        i_0 = quad(lambda y: math.sqrt(max(hv + hv * y - y * y, 0.0)), lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
        exact = hv * (4 + hv) * math.pi / 8
        for val in (i_m3, i_0, basis_eval("S1", "I_-3", hv), basis_eval("S1", "I_0", hv)):
            worst = max(worst, abs(val / exact - 1))
    out.append(_check("I_-3 = I_0 = h(4+h)pi/8", worst < 1e-9, max_rel_error=worst))

    e0, e2 = eval_barI(-1e-8)
    err = max(abs(e0 - 2 * math.sqrt(2) / 3), abs(e2 - 8 * math.sqrt(2) / 15))
    out.append(_check("Ibar endpoint values at h=-1e-8", err < 1e-6, max_error=err))
    worst = 0.0
    for hv in np.linspace(-0.95, -0.05, 10):
        a = eval_barI(hv)
        worst = max(worst, abs(a.first / quad_barI(hv, 0) - 1), abs(a.second / quad_barI(hv, 2) - 1))
    out.append(_check("Ibar against quadrature", worst < 1e-10, max_rel_error=worst))
    hs = np.linspace(-0.99, -0.01, 50)
    i0, i2 = barI_array(hs)
    d0, d2 = barI_derivative_array(hs)
    res0 = 4 * hs * (1 + hs) * d0 - ((4 + 3 * hs) * i0 - 5 * i2)
    res2 = 4 * hs * (1 + hs) * d2 - (-hs * i0 + 5 * hs * i2)
    res = float(max(np.abs(res0).max(), np.abs(res2).max()))
    out.append(_check("Picard-Fuchs residual, analytic derivatives", res < 1e-12, max_residual=res))

    unit = RationalInterval(0, 1)
    half_line = RationalInterval(0, None)
    for name, iv, expect in (("Y72", unit, 1), ("R1", unit, 1), ("R2", unit, 1), ("Delta_printed", unit, 0),
                             ("Psi_2_5_printed", unit, 0), ("Z1", half_line, 0), ("Z2", half_line, 0),
                             ("Y9", half_line, 0)):
        cnt = sturm_count(load_poly(name), iv)
        out.append(_check(f"Sturm count of {name}", cnt == expect, count=cnt, expected=expect))

    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for tag in CENTER_NAMES:
        lo, hi = FIT_WINDOWS[tag]
        for _ in range(2):
            pert = PerturbationSpec.random(int(rng.integers(0, 3)), rng, tag)
            exp = coefficient_map(tag, pert)
            for hv in rng.uniform(lo, hi, 5):
                q = melnikov_quadrature(tag, pert, float(hv))
                worst = max(worst, abs(closed_form_eval(exp, float(hv)) - q) / max(abs(q), 1e-12))
    out.append(_check("closed form against quadrature", worst < 1e-6, max_rel_deviation=worst, seed=cfg.seed))
    return out


def suite_wronskians(cfg: RunConfig) -> list[dict]:
    import sympy as sp

    from .melnikov import basis_for
    from .melnikov.basis import Ibar2, h
    from .zerolab import wronskian_chain

    Q = sp.sqrt(h * (4 + h))
    LN = sp.log(1 + (h + Q) / 2)
    T = sp.sqrt(-h)
    out = []
    rep = wronskian_chain([h, h * (4 + h) * (2 + h), Q, Q * (2 + h) ** 2], "S3")
    out.append(_check("S3 n=1 chain", rep.signs == [1, 1, 1, -1] and rep.classification == "ECT"
                      and rep.zero_bound == 3, signs=rep.signs, classification=rep.classification))
    fs = [h, h**2, h**3, h * (4 + h) * (2 + h) ** 2, Q, Q * (2 + h) ** 2, Q * (2 + h) ** 4, (2 + h) * LN]
    rep = wronskian_chain(fs, "S3")
    crit = [p for f in rep.entries[7].factors if f.kind == "log-linear" for p in f.critical_points]
    target = (3 * math.sqrt(2) - 4) / 2
    ok = (rep.classification == "last-one-zero" and rep.zero_bound == 8 and len(crit) == 1
          and abs(crit[0] - target) < 1e-8)
    out.append(_check("S3 n=3 chain, last determinant has one zero", ok, classification=rep.classification,
                      zero_bound=rep.zero_bound, critical_points=[float(c) for c in crit]))
    fs = [sp.sqrt(1 + h), (2 + T) * sp.sqrt(1 - T), h * sp.sqrt(1 - T), 1 + h, Ibar2(h)]
    rep = wronskian_chain(fs, "S4")
    out.append(_check("S4 n=1 chain", rep.signs == [1, -1, 1, 1, 1] and rep.classification == "ECT",
                      signs=rep.signs, classification=rep.classification))
    for tag, n, bound in (("S1", 1, 4), ("S1", 2, 5), ("S2", 1, 2), ("S3", 2, 5), ("S4", 0, 1)):
        rep = wronskian_chain(basis_for(tag, n), tag)
        out.append(_check(f"{tag} n={n} basis is ECT", rep.classification == "ECT" and rep.zero_bound == bound,
                          classification=rep.classification, zero_bound=rep.zero_bound))
    return out


def suite_fuchs(cfg: RunConfig) -> list[dict]:
    from .fuchs import curve_contact_analysis, fuchsian_bound, pf_residual, s4_fuchsian_spec

    out = []
    res = max(float(np.max(np.abs(pf_residual(hv)))) for hv in np.linspace(-0.95, -0.05, 19))
    out.append(_check("Picard-Fuchs residual grid", res < 1e-6, max_residual=res))
    rep = curve_contact_analysis()
    out.append(_check("curve contact analysis", rep.verdict == "consistent", verdict=rep.verdict,
                      failed=sorted(k for k, v in rep.checks.items() if not v),
                      s_star=rep.s_upper_star, s_lower_star=rep.s_lower_star))
    for n in (6, 8, 10):
        fb = fuchsian_bound(s4_fuchsian_spec(n))
        ok = fb.lam == Fraction(3, 4) and fb.lam_star == Fraction(3, 4) and fb.zero_bound == 2 * n - 2
        out.append(_check(f"Fuchsian bound n={n}", ok, lam=fb.lam, lam_star=fb.lam_star, zero_bound=fb.zero_bound))
    return out


SUITES = {"identities": suite_identities, "wronskians": suite_wronskians, "fuchs": suite_fuchs}


def cmd_verify(cfg: RunConfig) -> Outcome:
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    report = {}
    for name in names:
        report[name] = SUITES[name](cfg)
    checks = [c for name in names for c in report[name]]
    passed = all(c["pass"] for c in checks)
    doc = {"suites": report, "passed": passed, "failures": [c["name"] for c in checks if not c["pass"]]}
    if cfg.fmt == "csv":
        rows = [(s, c["name"].replace(",", ";"), int(c["pass"])) for s in names for c in report[s]]
        text = _csv(["suite", "check", "pass"], rows)
    elif cfg.fmt == "svg":
        raise UsageError("verify has no svg output")
    else:
        text = dumps(doc) + "\n"
    return Outcome(text, EXIT_OK if passed else EXIT_MISMATCH)


def cmd_eval(cfg: RunConfig) -> Outcome:
    from .melnikov import closed_form_eval, coefficient_map, melnikov_quadrature

    pert, center = load_perturbation(cfg)
    xs, log = sample_grid(center, cfg, 50)
    exp = coefficient_map(center, pert)
    closed = np.asarray(closed_form_eval(exp, xs), dtype=float)
    quadv = np.array([melnikov_quadrature(center, pert, float(x)) for x in xs])
    diff = np.abs(closed - quadv)
    scale = float(np.abs(quadv).max())
    abs_dev = float(diff.max())
    rel_dev = abs_dev / scale if scale > 0 else abs_dev
    tol = cfg.tol if cfg.tol is not None else 1e-6
    code = EXIT_OK if rel_dev <= tol else EXIT_MISMATCH
    if cfg.fmt == "svg":
        return Outcome(svg_plot(xs, quadv, f"M(h), {center}, n={pert.n}", log), code)
    if cfg.fmt == "csv":
        return Outcome(_csv(["h", "closed_form", "quadrature"], zip(xs, closed, quadv)), code)
    doc = {
        "center": center, "n": pert.n, "h": xs, "closed_form": closed, "quadrature": quadv,
        "max_abs_deviation": abs_dev, "max_rel_deviation": rel_dev, "tolerance": tol,
    }
    return Outcome(dumps(doc) + "\n", code)


def cmd_count(cfg: RunConfig) -> Outcome:
    from .zerolab import bound_table, melnikov_zeros
    from .zerolab.counting import _grid_matrix

    pert, center = load_perturbation(cfg)
    rep = melnikov_zeros(center, pert, grid_size=cfg.grid or 400, tol=cfg.tol or 1e-10)
    bound = bound_table(center, pert.n, piecewise=not pert.is_smooth())
    within = rep.count <= bound.value
    code = EXIT_OK if within else EXIT_MISMATCH
    if cfg.fmt == "svg":
        xs, G = _grid_matrix(center, pert.n, rep.grid_size)
        log = center in ("S1", "S3") if cfg.log_h is None else cfg.log_h
        return Outcome(svg_plot(xs, G @ pert.vector(), f"M(h), {center}, n={pert.n}", log, rep.roots), code)
    if cfg.fmt == "csv":
        return Outcome(_csv(["root", "lo", "hi", "residual", "kind"],
                            [(z.root, z.bracket[0], z.bracket[1], z.residual, z.kind)
                             for z in rep.locations + rep.degenerate]), code)
    doc = {"center": center, "n": pert.n, "report": rep.to_dict(), "bound": bound.value,
           "sharp": bound.sharp, "within_bound": within}
    return Outcome(dumps(doc) + "\n", code)


def cmd_map_coeffs(cfg: RunConfig) -> Outcome:
    from .melnikov import basis_for, coefficient_map, linear_coefficient_map, param_names

    if cfg.pert_path is None and not cfg.witness:
        if cfg.center is None or len(cfg.n) != 1:
            raise UsageError("map-coeffs needs --pert FILE, or --center with a single --n")
        lm = linear_coefficient_map(cfg.center, cfg.n[0])
        tags = [f.tag for f in basis_for(cfg.center, cfg.n[0])]
        names = param_names(cfg.n[0])
        if cfg.fmt == "csv":
            return Outcome(_csv(["tag", *names], [(t, *row) for t, row in zip(tags, lm.matrix)]))
        doc = {"center": lm.center, "n": lm.n, "tags": tags, "parameters": names, "matrix": lm.matrix,
               "fit_residual": lm.fit_residual, "holdout_error": lm.holdout_error,
               "condition": lm.condition, "rank": lm.rank}
        return Outcome(dumps(doc) + "\n")
    pert, center = load_perturbation(cfg)
    exp = coefficient_map(center, pert)
    if cfg.fmt == "csv":
        return Outcome(_csv(["symbol", "tag", "coefficient"],
                            [(s, t, c) for s, (t, c) in zip(exp.symbols, exp.terms)]))
    return Outcome(dumps(exp.as_dict()) + "\n")


def cmd_simulate(cfg: RunConfig) -> Outcome:
    from .pwsim import PwSystem, find_cycles, trajectory_csv
    from .zerolab import melnikov_zeros

    pert, center = load_perturbation(cfg)
    sys_ = PwSystem(center, pert, cfg.eps)
    if cfg.trajectory is not None:
        return Outcome(trajectory_csv(sys_, cfg.trajectory))
    xs, log = sample_grid(center, cfg, 40)
    rep = find_cycles(sys_, xs, jobs=cfg.jobs)
    if cfg.fmt == "svg":
        vals = np.array(rep.values) / cfg.eps
        return Outcome(svg_plot(xs, vals, f"d(h)/eps, {center}, eps={cfg.eps:g}", log, [c.h for c in rep.cycles]))
    if cfg.fmt == "csv":
        return Outcome(_csv(["h", "displacement"], zip(rep.grid, rep.values)))
    lo, hi = float(xs[0]), float(xs[-1])
    predicted = [r for r in melnikov_zeros(center, pert).roots if lo < r < hi]
    doc = rep.to_dict()
    doc["count"] = rep.count
    doc["melnikov_zeros"] = predicted
    return Outcome(dumps(doc) + "\n")


def cmd_reproduce(cfg: RunConfig) -> Outcome:
    from .fuchs import s4_smooth_zero_bound
    from .zerolab import bound_rows, bound_table, bounds_csv, witness_count

    ns = cfg.n or list(range(0, 11))
    centers = [cfg.center] if cfg.center else list(CENTER_NAMES)
    pw = bound_rows(centers, ns, piecewise=True)
    sm = bound_rows(centers, ns, piecewise=False, smooth_s4_improved=cfg.improved)
    if cfg.fmt == "csv":
        return Outcome(bounds_csv(pw + sm))
    if cfg.fmt == "svg":
        raise UsageError("reproduce has no svg output")
    witnesses = []
    for tag, n in SHARP_WITNESSES:
        if tag not in centers or n not in ns:
            continue
        count, _ = witness_count(tag, n)
        value = bound_table(tag, n).value
        witnesses.append({"center": tag, "n": n, "zeros": count, "bound": value, "match": count == value})
    fuchs = [{"n": n, **s4_smooth_zero_bound(n)} for n in ns if n >= 6 and "S4" in centers]
    doc = {"piecewise": [r.to_dict() for r in pw], "smooth": [r.to_dict() for r in sm],
           "witnesses": witnesses, "fuchsian": fuchs}
    ok = all(w["match"] for w in witnesses)
    return Outcome(dumps(doc) + "\n", EXIT_OK if ok else EXIT_MISMATCH)


COMMANDS = {
    "bounds": cmd_bounds, "verify": cmd_verify, "eval": cmd_eval, "count": cmd_count,
    "map-coeffs": cmd_map_coeffs, "simulate": cmd_simulate, "reproduce": cmd_reproduce,
}


def run(argv=None) -> tuple[int, str, str]:
    """(exit code, stdout text, stderr text) without touching the real streams."""
    try:
        cfg = make_config(argv)
        res = COMMANDS[cfg.command](cfg)
        return res.code, res.text, ""
    except (UsageError, ParseError, DomainError, PreconditionError) as exc:
        return EXIT_INPUT, "", f"isomel: error: {exc}\n"
    except NumericError as exc:
        diag = getattr(exc, "diagnostics", {})
        extra = f" {dumps(diag)}" if diag else ""
        return EXIT_NUMERIC, "", f"isomel: numeric failure: {exc}{extra}\n"


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if any(a in ("-h", "--help") for a in argv):
        build_parser().parse_args(argv)  # argparse prints help and exits 0
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
