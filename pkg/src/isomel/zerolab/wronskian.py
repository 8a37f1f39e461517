"""Exact Wronskian chains on rationalizing charts.

Every center admits a rational parametrization h = h(z) on which its square
roots become rational functions of z:

* S1, S3: h = z**2/(1+z), z = alpha(h), sqrt(h(4+h)) = z(2+z)/(1+z);
* S2: h = 4z**2/(1+z**2)**2, z in (0, 1), sqrt(h) and sqrt(1-h) rational;
* S4: the conic u**2 + w**2 = 2 with u = sqrt(1-t), w = sqrt(1+t), t = sqrt(-h),
  parametrized by s = (w+1)/(u+1) in (1, 1+sqrt(2)).

Logarithms and the elliptic integrals become extra generators with rational
(resp. Picard-Fuchs) derivatives, so W_k is computed exactly as a determinant
over QQ(z, generators). Each factor of W_k is then classified:

* polynomial in z: real roots counted with Sturm sequences;
* A*Ibar0 + B*Ibar2: sign of A + B v at v = 4/5 and v = 1 (v = Ibar2/Ibar0
  runs over (4/5, 1));
* A + B*L with L a logarithm: Y = L + A/B has a rational derivative, whose
  roots split the interval into monotone pieces; Y is evaluated at the
  critical points in extended precision;
* anything else: a numeric scan, reported as not certified.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
import sympy as sp
from sympy.polys.matrices import DomainMatrix

from ..errors import DomainError
from ..exactpoly import RationalInterval, RationalPoly, isolate_roots, sturm_count
from ..melnikov import get_center
from ..melnikov.basis import BasisFunction, Ibar0, Ibar2, h as H
from ..specialfn import barI_array
from .counting import count_zeros, make_grid

z = sp.Symbol("z")
I0, I2 = sp.Symbol("I0"), sp.Symbol("I2")
_DPS = 60


@dataclass(frozen=True)
class Chart:
    name: str
    h_of_z: sp.Expr
    z_of_h: object  # float -> float
    # exact z for the natural ends of the annulus, keyed by h (None = infinity)
    ends: dict
    h_interval: tuple

    def z_float(self, hv: float) -> float:
        return float(self.z_of_h(float(hv)))

    def h_float(self, zv) -> float:
        return float(sp.lambdify(z, self.h_of_z, "mpmath")(zv))


def _kappa(hv):
    return (hv + math.sqrt(hv * (4 + hv))) / 2


def _sigma(hv):
    return math.sqrt(hv) / (1 + math.sqrt(1 - hv))


def _conic(hv):
    t = math.sqrt(-hv)
    return (math.sqrt(1 + t) + 1) / (math.sqrt(1 - t) + 1)


_u = (1 + 2 * z - z**2) / (1 + z**2)

CHARTS = {
    "kappa": Chart("kappa", z**2 / (1 + z), _kappa, {0.0: sp.Integer(0), None: None}, (0.0, math.inf)),
    "sigma": Chart("sigma", 4 * z**2 / (1 + z**2) ** 2, _sigma, {0.0: sp.Integer(0), 1.0: sp.Integer(1)}, (0.0, 1.0)),
    "conic": Chart("conic", sp.cancel(-((1 - _u**2) ** 2)), _conic, {0.0: sp.Integer(1), -1.0: 1 + sp.sqrt(2)}, (-1.0, 0.0)),
}
CENTER_CHART = {"S1": "kappa", "S3": "kappa", "S2": "sigma", "S4": "conic"}


def chart_for(center) -> Chart:
    return CHARTS[CENTER_CHART[get_center(center).tag]]


# ---------------------------------------------------------------------------
# conversion of h-expressions into chart coordinates


class _Converter:
    def __init__(self, chart: Chart):
        self.chart = chart
        self.hz = sp.cancel(chart.h_of_z)
        zs = sorted(math.inf if v is None else float(v) for v in chart.ends.values())
        lo, hi = zs[0], zs[-1]
        self.sample_z = [lo + (hi - lo) * s for s in (0.2, 0.5, 0.8)] if math.isfinite(hi) else [lo + 0.3, lo + 1.7, lo + 9]
        self.logs: dict = {}  # symbol -> rational argument in z

    def __call__(self, e):
        if e == H:
            return self.hz
        if e.is_Number:
            return e
        if isinstance(e, Ibar0):
            return I0
        if isinstance(e, Ibar2):
            return I2
        if e.is_Add:
            return sp.Add(*[self(a) for a in e.args])
        if e.is_Mul:
            return sp.Mul(*[self(a) for a in e.args])
        if e.is_Pow:
            base, ex = e.args
            b = self(base)
            if ex.is_Integer:
                return b**ex
            if ex.is_Rational and ex.q == 2:
                return self._sqrt(b) ** ex.p
            raise DomainError(f"exponent {ex} is not supported by the chart")
        if isinstance(e, sp.log):
            arg = sp.cancel(self(e.args[0]))
            if arg.free_symbols - {z}:
                raise DomainError("logarithm of a transcendental argument")
            for sym, a in self.logs.items():
                if sp.cancel(a - arg) == 0:
                    return sym
            sym = sp.Symbol(f"L{len(self.logs)}")
            self.logs[sym] = arg
            return sym
        raise DomainError(f"cannot express {e} on the {self.chart.name} chart")

    def _sqrt(self, b):
        b = sp.cancel(b)
        if b.free_symbols - {z}:
            raise DomainError("square root of a transcendental expression")
        num, den = sp.fraction(b)
        out = sp.Integer(1)
        for part, sgn in ((num, 1), (den, -1)):
            c, facs = sp.factor_list(part, z)
            if c < 0:
                raise DomainError(f"sqrt({b}) has a negative radicand on the {self.chart.name} chart")
            r = sp.sqrt(c)
            if not r.is_Rational:
                raise DomainError(f"constant {c} is not a rational square on the {self.chart.name} chart")
            piece = r
            for f, k in facs:
                if k % 2:
                    raise DomainError(f"sqrt({b}) is not rational on the {self.chart.name} chart")
                piece *= f ** (k // 2)
            out *= piece**sgn
        # fix the branch: the principal root is positive inside the chart interval
        f = sp.lambdify(z, out, "mpmath")
        g = sp.lambdify(z, b, "mpmath")
        signs = set()
        for zv in self.sample_z:
            val = f(mpmath.mpf(zv))
            if g(mpmath.mpf(zv)) < 0:
                raise DomainError("negative radicand inside the chart interval")
            signs.add(1 if val > 0 else -1)
        if len(signs) != 1:
            raise DomainError("square root changes branch inside the chart interval")
        return out if signs.pop() > 0 else -out


# ---------------------------------------------------------------------------
# reports


@dataclass
class FactorVerdict:
    expr: str
    exponent: int
    kind: str  # constant, polynomial, ibar, ibar-linear, log-linear, numeric
    zeros: int | None
    sign: int | None
    certified: bool
    critical_points: list = field(default_factory=list)
    note: str = ""


@dataclass
class WronskianEntry:
    index: int
    verdict: str
    sign: int | None
    zeros: int | None
    certified: bool
    factors: list
    expr: str

    def to_dict(self):
        return asdict(self)


@dataclass
class ChainReport:
    size: int
    entries: list
    classification: str  # ECT, last-one-zero, last-several-zeros, inconclusive
    zero_bound: int | None
    attainable: int | None
    chart: str
    interval: tuple
    _evaluators: dict = field(default_factory=dict, repr=False)

    @property
    def signs(self):
        return [e.sign for e in self.entries]

    def value(self, k: int, hv: float) -> float:
        """W_k at h, evaluated from the exact determinant."""
        return float(self._evaluators[k](hv))

    def to_dict(self):
        d = asdict(self)
        d.pop("_evaluators")
        return d


# ---------------------------------------------------------------------------
# exact root counting on the chart interval


def _to_rpoly(p) -> RationalPoly:
    P = sp.Poly(p, z)
    return RationalPoly([Fraction(int(c.p), int(c.q)) for c in reversed(P.all_coeffs())], "z")


def _outward(v, side):
    # a rational just outside the algebraic endpoint v
    x = sp.Rational(str(sp.N(v, 50)))
    eps = sp.Rational(1, 10**35)
    return Fraction(int((x - side * eps).p), int((x - side * eps).q))


class _Interval:
    """Chart interval with exact (possibly algebraic) endpoints."""

    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi  # sympy numbers or None
        self.rat = RationalInterval(
            None if lo is None else (Fraction(int(lo.p), int(lo.q)) if lo.is_Rational else _outward(lo, 1)),
            None if hi is None else (Fraction(int(hi.p), int(hi.q)) if hi.is_Rational else _outward(hi, -1)),
        )

    def clean(self, p):
        """Remove factors of p vanishing at an irrational endpoint."""
        for e in (self.lo, self.hi):
            if e is not None and not e.is_Rational:
                m = sp.minimal_polynomial(e, z)
                g = sp.gcd(p, m)
                while sp.degree(g, z) > 0:
                    p = sp.quo(p, g, z)
                    g = sp.gcd(p, m)
        return p

    def count(self, p) -> int:
        p = self.clean(sp.expand(p))
        if sp.degree(p, z) <= 0:
            return 0
        return sturm_count(_to_rpoly(p), self.rat)

    def roots(self, p) -> list:
        p = self.clean(sp.expand(p))
        if sp.degree(p, z) <= 0:
            return []
        out = []
        for iv in isolate_roots(_to_rpoly(p), self.rat, Fraction(1, 2**60)):
            out.append((iv.lo + iv.hi) / 2)
        return out

    def sample(self) -> Fraction:
        r = self.rat
        if r.lo is None and r.hi is None:
            return Fraction(0)
        if r.hi is None:
            return r.lo + 1
        if r.lo is None:
            return r.hi - 1
        return r.midpoint

    def float_bounds(self):
        return (-math.inf if self.lo is None else float(self.lo), math.inf if self.hi is None else float(self.hi))


def _chart_interval(chart: Chart, iv) -> _Interval:
    ends = []
    for hv in iv:
        key = None if hv == math.inf else float(hv)
        if key in chart.ends:
            ends.append((chart.ends[key], True))
        else:
            ends.append((chart.z_float(hv), False))
    (a, ea), (b, eb) = ends
    if a is None or (b is not None and float(a) > float(b)):
        (a, ea), (b, eb) = (b, eb), (a, ea)
    # float ends are widened outward so that no interior root is missed
    if not ea:
        a = sp.Rational(Fraction(a - 1e-12 * max(1.0, abs(a))))
    if not eb:
        b = sp.Rational(Fraction(b + 1e-12 * max(1.0, abs(b))))
    return _Interval(a, b)


# ---------------------------------------------------------------------------
# chain computation


def _as_expr(f):
    if isinstance(f, BasisFunction):
        return f.expr
    return sp.sympify(f, locals={"h": H})


def wronskian_chain(functions, center=None, iv=None, chart: Chart | None = None, grid: int = 400) -> ChainReport:
    """Signs and zeros of W_1, ..., W_m for the ordered functions.

    ``functions`` are sympy expressions in h (or BasisFunction records).
    The chart is chosen from ``center`` unless given; ``iv`` defaults to the
    whole annulus.
    """
    if chart is None:
        if center is None:
            raise DomainError("give a center or a chart")
        chart = chart_for(center)
    iv = chart.h_interval if iv is None else (float(iv[0]), float(iv[1]))
    exprs = [_as_expr(f) for f in functions]
    if not exprs:
        raise DomainError("empty function list")
    conv = _Converter(chart)
    zexprs = [sp.cancel(conv(e)) for e in exprs]
    logs = list(conv.logs)
    gens = [z] + logs + ([I0, I2] if any(e.has(I0) or e.has(I2) for e in zexprs) else [])
    K = sp.QQ.frac_field(*gens)

    hz = conv.hz
    hp = K.from_sympy(sp.cancel(sp.diff(hz, z)))
    zk = K.gens[0]
    dlog = {K.gens[1 + i]: K.from_sympy(sp.cancel(sp.diff(a, z) / a)) for i, a in enumerate(conv.logs.values())}
    if I0 in gens:
        i0, i2 = K.gens[-2], K.gens[-1]
        hk = K.from_sympy(hz)
        # d/dh of (Ibar0, Ibar2) from the Picard-Fuchs system, times dh/dz
        dI0 = ((4 + 3 * hk) * i0 - 5 * i2) / (4 * hk * (1 + hk)) * hp
        dI2 = (5 * i2 - i0) / (4 * (1 + hk)) * hp
        dI = {i0: dI0, i2: dI2}
    else:
        dI = {}
    tder = {**dlog, **dI}

    def D(e):
        out = e.diff(zk)
        for g, dg in tder.items():
            out += e.diff(g) * dg
        return out / hp

    rows = [[K.from_sympy(e) for e in zexprs]]
    m = len(zexprs)
    for _ in range(m - 1):
        rows.append([D(e) for e in rows[-1]])

    zint = _chart_interval(chart, iv)
    entries, evaluators = [], {}
    numeric_env = _NumericEnv(chart, conv.logs)
    for k in range(1, m + 1):
        M = DomainMatrix([r[:k] for r in rows[:k]], (k, k), K)
        det = K.to_sympy(M.det())
        entry = _classify(k, det, zint, numeric_env, iv, grid)
        entries.append(entry)
        evaluators[k] = numeric_env.h_function(det)
    classification, bound, attainable = _summarize(entries)
    return ChainReport(m, entries, classification, bound, attainable, chart.name, tuple(iv), evaluators)


class _NumericEnv:
    def __init__(self, chart: Chart, logs: dict):
        self.chart = chart
        self.logs = logs
        self._logf = {s: sp.lambdify(z, a, "mpmath") for s, a in logs.items()}

    def values(self, zv, hv=None):
        env = {z: zv}
        for s, f in self._logf.items():
            env[s] = mpmath.log(f(zv))
        if hv is None:
            hv = self.chart.h_float(zv)
        if -1.0 < hv < 0.0:
            i0, i2 = barI_array(np.array([float(hv)]))
            env[I0], env[I2] = mpmath.mpf(float(i0[0])), mpmath.mpf(float(i2[0]))
        return env

    def z_function(self, expr):
        syms = [z] + list(self.logs) + [I0, I2]
        f = sp.lambdify(syms, expr, "mpmath")

        def call(zv, hv=None):
            with mpmath.workdps(_DPS):
                zv = mpmath.mpf(zv) if not isinstance(zv, mpmath.mpf) else zv
                env = self.values(zv, hv)
                return f(*[env.get(s, mpmath.mpf(0)) for s in syms])

        return call

    def h_function(self, expr):
        fz = self.z_function(expr)

        def call(hv):
            with mpmath.workdps(_DPS):
                return fz(self._z_exact(hv), hv)

        return call

    def _z_exact(self, hv):
        c = self.chart.name
        hv = mpmath.mpf(hv)
        if c == "kappa":
            return (hv + mpmath.sqrt(hv * (4 + hv))) / 2
        if c == "sigma":
            return mpmath.sqrt(hv) / (1 + mpmath.sqrt(1 - hv))
        t = mpmath.sqrt(-hv)
        return (mpmath.sqrt(1 + t) + 1) / (mpmath.sqrt(1 - t) + 1)


def _sign_at(expr, zv: Fraction) -> int:
    val = sp.Rational(zv.numerator, zv.denominator)
    v = expr.subs(z, val)
    return int(sp.sign(v))


def _classify(k, det, zint: _Interval, env: _NumericEnv, iv, grid) -> WronskianEntry:
    det = sp.cancel(det)
    if det == 0:
        return WronskianEntry(k, "identically zero", 0, None, True, [], "0")
    num, den = sp.fraction(sp.factor(det))
    factors = []
    certified, total, sign, poles = True, 0, 1, 0
    c_num, f_num = sp.factor_list(sp.expand(num))
    c_den, f_den = sp.factor_list(sp.expand(den))
    sign *= int(sp.sign(c_num)) * int(sp.sign(c_den))
    for f, e in f_den:
        fv = _factor_verdict(f, e, zint, env, iv, grid)
        if fv.zeros:
            poles += fv.zeros
        certified &= fv.certified
        sign *= (fv.sign or 1) ** e
        fv.note = (fv.note + " denominator").strip()
        factors.append(fv)
    for f, e in f_num:
        fv = _factor_verdict(f, e, zint, env, iv, grid)
        factors.append(fv)
        certified &= fv.certified
        if fv.zeros is None:
            total = None
            continue
        if fv.zeros and e % 2 == 0:
            fv.note = "zero of even multiplicity"
            total = None
            continue
        if total is not None:
            total += fv.zeros
        if sign is not None and fv.sign is not None:
            sign *= fv.sign**e
    expr = str(sp.factor(det))
    if poles:
        return WronskianEntry(k, "inconclusive", None, None, False, factors, expr)
    if total is None:
        return WronskianEntry(k, "inconclusive", None, None, False, factors, expr)
    if total == 0:
        verdict = "positive" if sign > 0 else "negative"
        return WronskianEntry(k, verdict, sign, 0, certified, factors, expr)
    return WronskianEntry(k, f"has {total} simple zeros" if total > 1 else "has 1 simple zero", None, total,
                          certified, factors, expr)


def _factor_verdict(f, e, zint: _Interval, env: _NumericEnv, iv, grid) -> FactorVerdict:
    syms = f.free_symbols
    if not syms:
        return FactorVerdict(str(f), e, "constant", 0, int(sp.sign(f)), True)
    if syms == {z}:
        n = zint.count(f)
        s = _sign_at(f, zint.sample()) if n == 0 else None
        return FactorVerdict(str(f), e, "polynomial", n, s, True)
    trans = syms - {z}
    if trans <= {I0, I2}:
        if f in (I0, I2):
            return FactorVerdict(str(f), e, "ibar", 0, 1, True)
        P = sp.Poly(f, I0, I2)
        if P.is_homogeneous and P.total_degree() == 1:
            A, B = P.coeff_monomial(I0), P.coeff_monomial(I2)
            lo = sp.expand(5 * A + 4 * B)
            hi = sp.expand(A + B)
            s_lo = _sign_poly(lo, zint)
            s_hi = _sign_poly(hi, zint)
            if s_lo is not None and s_hi is not None and s_lo == s_hi and s_lo != 0:
                return FactorVerdict(str(f), e, "ibar-linear", 0, s_lo, True,
                                     note="sign of A + B v fixed for v in [4/5, 1]")
            fv = _ibar_riccati(f, A, B, e, zint, env)
            if fv is not None:
                return fv
    if len(trans) == 1 and not trans & {I0, I2}:
        L = next(iter(trans))
        P = sp.Poly(f, L)
        if P.degree() == 1:
            fv = _log_linear(f, P, L, e, zint, env)
            if fv is not None:
                return fv
    return _numeric_factor(f, e, env, iv, grid)


def _sign_poly(p, zint: _Interval):
    """Constant sign of a polynomial on the chart interval, None if it vanishes there."""
    p = sp.expand(p)
    if not p.free_symbols:
        return int(sp.sign(p)) or None
    if zint.count(p):
        return None
    return _sign_at(p, zint.sample()) or None


def _log_linear(f, P, L, e, zint: _Interval, env: _NumericEnv):
    """Monotonicity decomposition for A(z) + B(z) L."""
    B = P.coeff_monomial(L)
    A = P.coeff_monomial(1)
    if _sign_poly(B, zint) is None:
        return None
    sB = _sign_poly(B, zint)
    dL = sp.cancel(sp.diff(env.logs[L], z) / env.logs[L])
    Y = L + A / B
    dY = sp.cancel(dL + sp.diff(A / B, z))
    num, den = sp.fraction(dY)
    if den.free_symbols and zint.count(sp.factor(den)):
        return None
    crit = [Fraction(c) for c in zint.roots(num)] if num.free_symbols else []
    yf = env.z_function(Y)
    lo, hi = zint.float_bounds()
    # values at the critical points and limits towards the ends
    pts = [_end_value(yf, lo, hi, +1)] + [yf(mpmath.mpf(c.numerator) / c.denominator) for c in crit] + [
        _end_value(yf, lo, hi, -1)]
    dyf = env.z_function(dY)
    piece_sign = []
    bounds = [lo] + [float(c) for c in crit] + [hi]
    for a, b in zip(bounds[:-1], bounds[1:]):
        mid = _interior(a, b)
        piece_sign.append(1 if dyf(mid) > 0 else -1)
    zeros = 0
    for j in range(len(pts) - 1):
        a, b = pts[j], pts[j + 1]
        if a is None or b is None:
            return None
        sa = _limit_sign(a, piece_sign[j], +1)
        sb = _limit_sign(b, piece_sign[j], -1)
        if sa * sb < 0:
            zeros += 1
    sign = None
    if zeros == 0:
        sign = _limit_sign(pts[0], piece_sign[0], +1) * sB
    hcrit = [env.chart.h_float(mpmath.mpf(c.numerator) / c.denominator) for c in crit]
    return FactorVerdict(str(f), e, "log-linear", zeros, sign, True, hcrit,
                         note="monotone pieces split at the roots of the rational derivative")


def _ibar_riccati(f, A, B, e, zint: _Interval, env: _NumericEnv):
    """Transversality decomposition for Z = A/B + v with v = Ibar2/Ibar0.

    Where Z = 0 its derivative is R' + ric(h, -R), R = A/B, rational in z.
    A fixed sign there makes every zero a crossing in the same direction,
    so Z has at most one zero, and the end signs decide whether it has one.
    """
    sB = _sign_poly(B, zint)
    if sB is None:
        return None
    hz = env.chart.h_of_z
    R = sp.cancel(A / B)
    Rh = sp.diff(R, z) / sp.diff(hz, z)
    vv = -R
    ric = (-hz + 2 * (hz - 2) * vv + 5 * vv**2) / (4 * hz * (1 + hz))
    num, den = sp.fraction(sp.cancel(Rh + ric))
    sn, sd = _sign_poly(num, zint), _sign_poly(den, zint)
    if sn is None or sd is None:
        return None
    direction = sn * sd
    zf = env.z_function(sp.cancel(f / (B * I0)))
    lo, hi = zint.float_bounds()
    ends = []
    for side in (+1, -1):
        end, other = (lo, hi) if side > 0 else (hi, lo)
        width = other - end
        vals = [zf(mpmath.mpf(end) + width * mpmath.mpf(10) ** (-k)) for k in (3, 4, 5)]
        sg = {int(mpmath.sign(v)) for v in vals}
        if len(sg) != 1 or 0 in sg:
            return None
        ends.append(sg.pop())
    # ends are listed in z order; orient them along h
    dh = env.chart.h_float(_interior(lo, hi) + mpmath.mpf("1e-6")) - env.chart.h_float(_interior(lo, hi))
    s_first, s_last = (ends[0], ends[1]) if dh > 0 else (ends[1], ends[0])
    if s_first == s_last:
        zeros = 0
    elif s_first == -direction and s_last == direction:
        zeros = 1
    else:
        return None
    sign = s_first * sB if zeros == 0 else None
    return FactorVerdict(str(f), e, "ibar-riccati", zeros, sign, True,
                         note="crossing direction fixed by the Riccati equation; end signs evaluated numerically")


def _interior(a, b):
    if math.isinf(b):
        return mpmath.mpf(a) + 1 if not math.isinf(a) else mpmath.mpf(0)
    if math.isinf(a):
        return mpmath.mpf(b) - 1
    return (mpmath.mpf(a) + mpmath.mpf(b)) / 2


def _end_value(yf, lo, hi, side):
    """Limit of Y at an end: ('zero', 0) when it tends to 0, else a signed value."""
    end = lo if side > 0 else hi
    other = hi if side > 0 else lo
    with mpmath.workdps(_DPS):
        if math.isinf(end):
            base = mpmath.mpf(max(abs(other), 1)) if not math.isinf(other) else mpmath.mpf(1)
            vals = [yf(base * mpmath.mpf(10) ** k) for k in (6, 12, 18)]
        else:
            width = (mpmath.mpf(other) - mpmath.mpf(end)) if not math.isinf(other) else mpmath.mpf(1)
            vals = [yf(mpmath.mpf(end) + side * width * mpmath.mpf(10) ** (-k)) for k in (6, 12, 18)]
    a = [abs(v) for v in vals]
    if a[2] < a[1] < a[0] and a[2] < 1e-6 * a[0]:
        return 0
    if all(mpmath.sign(v) == mpmath.sign(vals[0]) for v in vals) and vals[0] != 0:
        return vals[-1]
    return None


def _limit_sign(val, slope_sign, side):
    """Sign of Y just inside a monotone piece next to an end value."""
    if val != 0:
        return 1 if val > 0 else -1
    # Y leaves 0 in the direction of its slope
    return slope_sign * side


def _numeric_factor(f, e, env: _NumericEnv, iv, grid) -> FactorVerdict:
    lo, hi = iv
    lo = max(lo, -1 + 1e-6) if lo <= -1 else lo
    hi = min(hi, 1e3) if math.isinf(hi) else hi
    lo, hi = lo + 1e-6 * max(1.0, abs(hi - lo)), hi - 1e-6 * max(1.0, abs(hi - lo))
    g = env.h_function(f)
    spacing = "log" if lo > 0 and hi / lo > 100 else "linear"
    xs = make_grid((lo, hi), grid, spacing)
    vals = np.array([float(g(x)) for x in xs])
    rep = count_zeros(lambda x: float(g(x)), (lo, hi), grid_size=len(xs), values=vals, grid=xs)
    if rep.degenerate:
        return FactorVerdict(str(f), e, "numeric", None, None, False, note="degenerate candidates on the scan")
    sign = int(np.sign(vals[0])) if rep.count == 0 else None
    return FactorVerdict(str(f), e, "numeric", rep.count, sign, False, [r for r in rep.roots],
                         note="grid scan only")


def _summarize(entries):
    m = len(entries)
    nonvanishing = [e.zeros == 0 and e.sign is not None for e in entries]
    if all(nonvanishing):
        return "ECT", m - 1, m - 1
    if all(nonvanishing[:-1]) and entries[-1].zeros:
        k = entries[-1].zeros
        if k == 1:
            return "last-one-zero", m, m
        return "last-several-zeros", None, m
    return "inconclusive", None, None
