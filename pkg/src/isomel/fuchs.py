"""Picard-Fuchs residuals, Riccati flows, the (s, w) contact analysis and
the Chebyshev accuracy bound for two-dimensional Fuchsian systems."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, NumericError, PreconditionError
from .exactpoly import RationalInterval, RationalPoly, isolate_roots, load_poly, resultant, sturm_count
from .specialfn import barI_array, barI_derivative_array, v_ratio, w_ratio, w_ratio_array

# ---------------------------------------------------------------------------
# Picard-Fuchs residual

PF_DELTA = 1e-3


def pf_matrix(h: float) -> np.ndarray:
    return np.array([[4 + 3 * h, -5.0], [-h, 5 * h]])


def _ibar(h: float) -> np.ndarray:
    i0, i2 = barI_array(np.array([h]))
    return np.array([i0[0], i2[0]])


def pf_residual(h: float, analytic: bool = False, step: float | None = None) -> np.ndarray:
    """4h(1+h) (Ibar0', Ibar2') - A(h) (Ibar0, Ibar2).

    Derivatives come from Richardson-extrapolated central differences, or
    from the closed forms Ibar0' = J/4, Ibar2' = I/4 when ``analytic``.
    """
    h = float(h)
    if not (-1 + PF_DELTA <= h <= -PF_DELTA):
        raise DomainError(f"h={h} too close to the ends of (-1, 0)")
    if analytic:
        d0, d2 = barI_derivative_array(np.array([h]))
        d = np.array([d0[0], d2[0]])
    else:
        dist = min(h + 1, -h)
        k = min(1e-3, dist / 4) if step is None else step
        d1 = (_ibar(h + k) - _ibar(h - k)) / (2 * k)
        d2 = (_ibar(h + k / 2) - _ibar(h - k / 2)) / k
        d = (4 * d2 - d1) / 3
    return 4 * h * (1 + h) * d - pf_matrix(h) @ _ibar(h)


# ---------------------------------------------------------------------------
# Riccati systems


@dataclass(frozen=True)
class RiccatiSystem:
    name: str
    time_drift: str
    state_drift: str
    domain: tuple
    boundary: tuple  # limits of the state at the two ends

    def rhs(self, x: float, y: float) -> float:
        if self.name == "v":
            return (-x + 2 * (-2 + x) * y + 5 * y * y) / (4 * x * (1 + x))
        return (x * x - 2 * x * x * y + y * y) / (2 * x * (1 - x * x))

    def reference(self, x):
        return v_ratio(x) if self.name == "v" else w_ratio(x)


V_SYSTEM = RiccatiSystem("v", "4h(1+h)", "-h+2(-2+h)v+5v^2", (-1.0, 0.0), (1.0, 0.8))
W_SYSTEM = RiccatiSystem("w", "2s(1-s^2)", "s^2-2s^2w+w^2", (0.0, 1.0), (0.0, 1.0))


@dataclass
class FlowResult:
    x: np.ndarray
    y: np.ndarray
    system: str

    def max_deviation(self) -> float:
        ref = W_SYSTEM if self.system == "w" else V_SYSTEM
        return float(max(abs(yv - ref.reference(xv)) for xv, yv in zip(self.x, self.y)))


def riccati_flow(system: RiccatiSystem, start: float, end: float, init: float, samples: int = 200,
                 rtol: float = 1e-12, callback=None) -> FlowResult:
    """Integrate dy/dx = state_drift / time_drift from start to end."""
    lo, hi = system.domain
    for x in (start, end):
        if not lo < x < hi:
            raise DomainError(f"{x} outside the open domain {system.domain}")
    xs = np.linspace(start, end, samples)

    def f(x, y):
        if callback is not None:
            callback(x)
        return [system.rhs(x, y[0])]

    sol = solve_ivp(f, (start, end), [init], method="DOP853", t_eval=xs, rtol=rtol, atol=1e-14)
    if sol.status != 0:
        raise NumericError(f"flow failed: {sol.message}", reached=float(sol.t[-1]) if sol.t.size else start)
    return FlowResult(sol.t, sol.y[0], system.name)


def v_seed(h: float) -> float:
    """Linear expansion of v at h = -1: v = 1 - (h+1)/8."""
    return 1 - (h + 1) / 8


# ---------------------------------------------------------------------------
# curve-contact analysis in the (s, w) plane

_S = sp.Symbol("s")
_W = sp.Symbol("w")


def _sym(p: RationalPoly):
    return p.to_sympy(_S)


def _rp(expr) -> RationalPoly:
    P = sp.Poly(sp.expand(expr), _S)
    return RationalPoly([Fraction(int(c.p), int(c.q)) for c in reversed(P.all_coeffs())], "s")


def _frac_str(iv: RationalInterval):
    return [str(iv.lo), str(iv.hi)]


def _root(p: RationalPoly, iv: RationalInterval) -> float:
    return brentq(lambda x: float(p(Fraction(x))), float(iv.lo), float(iv.hi), xtol=1e-16)


def psi_polys():
    return load_poly("Y70"), load_poly("Y71"), load_poly("Y72")


def psi(s, w):
    y0, y1, y2 = psi_polys()
    return float(y0(Fraction(s))) + float(y1(Fraction(s))) * w + float(y2(Fraction(s))) * w * w


@dataclass
class ContactReport:
    s0: list
    w0: float
    s1: list
    w1: float
    s2: list
    w2: float
    s_lower_star: float  # crossing of w(s) with 2/5
    s_upper_star: float  # intersection of Gamma with C-
    w_minus_limits: dict
    checks: dict
    verdict: str
    details: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def curve_contact_analysis(scan: int = 4000) -> ContactReport:
    """Replay the contact-point argument for Psi(s, w(s)) on (0, 1)."""
    Y70, Y71, Y72 = psi_polys()
    y0, y1, y2 = _sym(Y70), _sym(Y71), _sym(Y72)
    unit = RationalInterval(0, 1)
    checks, details = {}, []

    def expect(name, ok, msg=""):
        checks[name] = bool(ok)
        if not ok:
            details.append(f"{name}: {msg}")

    # s0: the unique root of Y72
    r72 = isolate_roots(Y72, unit, Fraction(1, 2**40))
    expect("Y72 has one root", len(r72) == 1, f"found {len(r72)}")
    s0iv = r72[0]
    expect("17/50 < s0 < 7/20", Y72.sign_at(Fraction(17, 50)) * Y72.sign_at(Fraction(7, 20)) < 0)
    s0 = _root(Y72, s0iv)
    w0 = -float(Y70(Fraction(s0))) / float(Y71(Fraction(s0)))

    # discriminant
    delta = _rp(y1**2 - 4 * y0 * y2)
    expect("Delta matches printed form", delta == load_poly("Delta_printed"))
    expect("Delta > 0 on (0,1)", sturm_count(delta, unit) == 0 and delta.sign_at(Fraction(1, 2)) > 0)

    # contact function Phi = grad Psi . (sdot, wdot)
    Psi = y0 + y1 * _W + y2 * _W**2
    Phi = sp.expand(sp.diff(Psi, _S) * 2 * _S * (1 - _S**2) + sp.diff(Psi, _W) * (_S**2 - 2 * _S**2 * _W + _W**2))
    phis = [load_poly(f"phi{k}") for k in range(3)] + [-Y72]
    target = -2 * sum(_sym(p) * _W**k for k, p in enumerate(phis))
    expect("Phi matches printed form", sp.expand(Phi - target) == 0)

    # resultant in w
    psi_w = [Y70, Y71, Y72]
    phi_w = [_rp(sp.Poly(Phi, _W).coeff_monomial(_W**k)) for k in range(4)]
    R = resultant(psi_w, phi_w)
    R1, R2 = load_poly("R1"), load_poly("R2")
    pref = _rp(810000 * (1 - _S) ** 2 * _S**4 * (1 + _S) ** 10) * Y72 * R1 * R2
    expect("resultant factorization", R == pref or R == -pref, "R differs from the printed product")

    r1 = isolate_roots(R1, unit, Fraction(1, 2**40))
    r2 = isolate_roots(R2, unit, Fraction(1, 2**40))
    expect("R1 has one root", len(r1) == 1, f"found {len(r1)}")
    expect("R2 has one root", len(r2) == 1, f"found {len(r2)}")
    expect("4/25 < s1 < 17/100", R1.sign_at(Fraction(4, 25)) * R1.sign_at(Fraction(17, 100)) < 0)
    expect("12/25 < s2 < 49/100", R2.sign_at(Fraction(12, 25)) * R2.sign_at(Fraction(49, 100)) < 0)
    s1, s2 = _root(R1, r1[0]), _root(R2, r2[0])
    w1, w2 = _contact_w(s1, Phi), _contact_w(s2, Phi)

    # auxiliary line w = 2/5
    line = _rp(y0 + y1 * sp.Rational(2, 5) + y2 * sp.Rational(4, 25))
    expect("Psi(s,2/5) matches printed form", line == load_poly("Psi_2_5_printed"))
    expect("Psi(s,2/5) < 0 on (0,1)", sturm_count(line, unit) == 0 and line.sign_at(Fraction(1, 2)) < 0)
    s_low = brentq(lambda s: w_ratio(s) - 0.4, 1e-6, 1 - 1e-6, xtol=1e-15)
    expect("1/25 < s_* < 1/10", 1 / 25 < s_low < 1 / 10, f"s_* = {s_low}")

    # Gamma against C: sign changes of Psi(s, w(s))
    # w(s) tends to 0 only logarithmically, so the scan starts far below s = 1e-3
    ss = np.concatenate([np.geomspace(1e-14, 1e-2, scan // 2, endpoint=False), np.linspace(1e-2, 1 - 1e-3, scan // 2)])
    ws = w_ratio_array(ss)
    vals = np.array([psi(s, w) for s, w in zip(ss, ws)])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    expect("Psi(s,w(s)) has one sign change", idx.size == 1, f"found {idx.size}")
    s_star = float("nan")
    if idx.size:
        k = idx[0]
        s_star = brentq(lambda s: psi(s, w_ratio(s)), ss[k], ss[k + 1], xtol=1e-15)
        wm = w_minus(s_star)
        expect("intersection lies on C-", abs(wm - w_ratio(s_star)) < 1e-8, f"w- = {wm}")
    expect("s* < s_* < s1 < s2", s_star < s_low < s1 < s2)

    limits = {"0+": w_minus(1e-7), "s0": w0, "1-": w_minus(1 - 1e-7)}
    expect("w- limits 20/97 and 1/5", abs(limits["0+"] - 20 / 97) < 1e-5 and abs(limits["1-"] - 0.2) < 1e-5)
    verdict = "consistent" if all(checks.values()) else "mismatch"
    return ContactReport(_frac_str(s0iv), w0, _frac_str(r1[0]), w1, _frac_str(r2[0]), w2, s_low, s_star,
                         limits, checks, verdict, details)


def w_minus(s: float) -> float:
    """Lower branch (-Y71 - sqrt(Delta)) / (2 Y72), continued through s0."""
    y0, y1, y2 = (float(p(Fraction(s))) for p in psi_polys())
    d = math.sqrt(y1 * y1 - 4 * y0 * y2)
    # pick the form without cancellation; the rationalized one stays finite at s0
    if y1 > 0:
        return (-y1 - d) / (2 * y2)
    return 2 * y0 / (-y1 + d)


def w_plus(s: float) -> float:
    y0, y1, y2 = (float(p(Fraction(s))) for p in psi_polys())
    return (-y1 + math.sqrt(y1 * y1 - 4 * y0 * y2)) / (2 * y2)


def _contact_w(s: float, Phi) -> float:
    # common root in w of Psi(s, .) and Phi(s, .)
    y0, y1, y2 = (float(p(Fraction(s))) for p in psi_polys())
    roots = np.roots([y2, y1, y0])
    phi = sp.lambdify(_W, Phi.subs(_S, s))
    best = min(roots, key=lambda w: abs(phi(w)) if abs(w.imag) < 1e-9 else math.inf)
    return float(best.real)


# ---------------------------------------------------------------------------
# Fuchsian systems I = A(h) I'


@dataclass(frozen=True)
class FuchsianSpec:
    """A(h) = A0 + A1 h with rational entries; h0 is the point of analyticity."""

    A0: tuple
    A1: tuple
    dim_v: int
    h0: Fraction | None = None
    analytic_at_h0: bool = True


def s4_fuchsian_spec(n: int) -> FuchsianSpec:
    """The (Ibar0, Ibar2) system; g has dimension 2n - 2."""
    A0 = ((0, Fraction(4, 3)), (0, Fraction(16, 15)))
    A1 = ((Fraction(4, 3), 0), (Fraction(4, 15), Fraction(4, 5)))
    return FuchsianSpec(A0, A1, 2 * n - 2, Fraction(-1))


@dataclass
class FuchsianBound:
    eigenvalues: list
    lam: Fraction
    mu: Fraction
    lam_star: Fraction
    accuracy: int | None
    branch: str  # chebyshev or polynomial
    roots: list  # sympy numbers
    zero_bound: int

    def to_dict(self):
        d = asdict(self)
        for k in ("lam", "mu", "lam_star"):
            d[k] = str(d[k])
        d["eigenvalues"] = [str(e) for e in self.eigenvalues]
        d["roots"] = [str(r) for r in self.roots]
        return d


def fuchsian_bound(spec: FuchsianSpec) -> FuchsianBound:
    """Zero bound (dim V - 1) + accuracy on the Chebyshev space V.

    lambda is the reciprocal of the larger eigenvalue of A' and mu = 2 - lambda.
    An integer lambda switches to the polynomial branch, where V consists of
    polynomials vanishing at both singular points and dim V - 1 bounds the
    remaining zeros.
    """
    h = sp.Symbol("h")
    A0 = sp.Matrix(spec.A0).applyfunc(sp.nsimplify)
    A1 = sp.Matrix(spec.A1).applyfunc(sp.nsimplify)
    A = A0 + A1 * h
    eig = list(A1.eigenvals(multiple=True))
    if not all(e.is_real for e in eig) or len(set(eig)) != 2:
        raise PreconditionError("(H1) A' must have real distinct eigenvalues", eigenvalues=[str(e) for e in eig])
    det = sp.expand(A.det())
    roots = sp.Poly(det, h).real_roots() if sp.degree(det, h) == 2 else []
    if len(roots) != 2 or roots[0] == roots[1]:
        raise PreconditionError("(H2) det A(h) must have two real distinct roots", det=str(det))
    if sp.expand(A.trace() - sp.diff(det, h)) != 0:
        raise PreconditionError("(H2) trace A(h) must equal (det A(h))'", trace=str(A.trace()), det=str(det))
    if not spec.analytic_at_h0 or (spec.h0 is not None and sp.nsimplify(spec.h0) not in roots):
        raise PreconditionError("(H3) I(h) must be analytic near a root h0 of det A")
    if spec.dim_v < 1:
        raise DomainError("dim V must be positive")
    big = max(eig)
    if big == 0:
        raise PreconditionError("(H1) eigenvalue 0 has no exponent at infinity")
    lam = sp.Rational(1) / big
    mu = 2 - lam
    if sp.simplify(1 / mu - min(eig)) != 0:
        raise PreconditionError("(H2) exponents at infinity must satisfy lambda + mu = 2")
    if lam.is_integer:
        return FuchsianBound([Fraction(str(e)) for e in eig], Fraction(str(lam)), Fraction(str(mu)), Fraction(2),
                             None, "polynomial", list(roots), spec.dim_v - 1)
    lam_star = max(abs(lam - 1), 1 - abs(lam - 1))
    acc = 1 + int(sp.floor(lam_star))
    return FuchsianBound([Fraction(str(e)) for e in eig], Fraction(str(lam)), Fraction(str(mu)),
                         Fraction(str(lam_star)), acc, "chebyshev", list(roots),
                         spec.dim_v - 1 + acc)


def s4_smooth_zero_bound(n: int) -> dict:
    """Zeros of g on (-1, 0) and the resulting bound on M for n >= 6."""
    if n < 2:
        raise DomainError("the Fuchsian route needs n >= 2")
    fb = fuchsian_bound(s4_fuchsian_spec(n))
    g_open = fb.zero_bound - 1  # h0 = -1 is a trivial zero of g
    extra = n // 2 if n % 2 == 0 else (n - 1) // 2 + 1
    return {"g_bound": fb.zero_bound, "g_open_bound": g_open, "m_bound": g_open + extra}
