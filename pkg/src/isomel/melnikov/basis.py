"""Closed-form bases of M(h) for each center and degree.

Each basis function carries the name of its coefficient (``alpha_0``,
``beta_1``, ...), a tag naming the function of h, and a sympy expression.
For S4 the complete elliptic integrals enter through the opaque functions
``Ibar0``/``Ibar2`` whose derivatives follow the Picard-Fuchs system, so
symbolic Wronskians stay inside the span of {Ibar0, Ibar2}.

S2 for n >= 2 uses a reduced basis: M(1) = 0 forces sum(alpha_k) = 0, and
alpha_0 is eliminated, leaving the functions h**(k/2) - 1 and
h**(k + 1/2) - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from ..errors import DomainError
from ..specialfn import barI_array
from .centers import get_center

h = sp.Symbol("h", real=True)


class Ibar0(sp.Function):
    """Elliptic integral of u**0 sqrt(h + 2u**2 - u**4) between its roots."""

    def fdiff(self, argindex=1):
        x = self.args[0]
        return ((4 + 3 * x) * Ibar0(x) - 5 * Ibar2(x)) / (4 * x * (1 + x))


class Ibar2(sp.Function):
    """Elliptic integral of u**2 sqrt(h + 2u**2 - u**4) between its roots."""

    def fdiff(self, argindex=1):
        x = self.args[0]
        return (5 * Ibar2(x) - Ibar0(x)) / (4 * (1 + x))


@dataclass(frozen=True)
class BasisFunction:
    symbol: str
    tag: str
    expr: sp.Expr


# building blocks
_sq1 = sp.sqrt(h * (4 + h))
_ln1 = sp.log(1 + (h + _sq1) / 2)
_sqs2 = sp.sqrt(1 - h)
# ln((1 + s)/(1 - s)) with (1 + s)(1 - s) = h
_J2 = 2 * sp.log(1 + _sqs2) - sp.log(h)
_t = sp.sqrt(-h)
_rt = sp.sqrt(1 + h)
# sqrt(1 - t) and 1 - t written without cancellation near h = -1
_r4 = sp.sqrt((1 + h) / (1 + _t))
_omt = (1 + h) / (1 + _t)
_J4 = sp.log((1 + _rt) / _t)
_I0 = Ibar0(h)
_I2 = Ibar2(h)


def _pw(base: str, k) -> str:
    if k == 0:
        return ""
    if k == 1:
        return base
    return f"{base}^{k}" if isinstance(k, int) and k > 0 else f"{base}^({k})"


def _mul(*parts: str) -> str:
    parts = [p for p in parts if p]
    return "*".join(parts) if parts else "1"


def _t_power(k: int):
    """(-h)**(k/2) as a sympy expression."""
    return _t ** k


def _s1(n: int):
    hp = lambda k: h ** k
    if n == 0:
        return [("alpha_0", "h*(4+h)", h * (4 + h)), ("beta_0", "sqrt(h(4+h))", _sq1)]
    m = max(n - 2, 1)
    out = [(f"alpha_{k}", _mul(_pw("h", k + 1)), hp(k + 1)) for k in range(m + 1)]
    out += [(f"beta_{k}", _mul(_pw("h", k), "sqrt(h(4+h))"), hp(k) * _sq1) for k in range(m + 1)]
    out += [(f"gamma_{k}", _mul(_pw("h", k), "ln(1+alpha)"), hp(k) * _ln1) for k in range(min(n, 3))]
    return out


def _s2(n: int):
    if n == 0:
        return [("alpha_0", "1-h", 1 - h), ("beta_0", "sqrt(1-h)", _sqs2)]
    if n == 1:
        return [("alpha_0", "1-h", 1 - h), ("beta_0", "sqrt(1-h)", _sqs2), ("beta_1", "h*sqrt(1-h)", h * _sqs2)]
    out = []
    for k in (1, 2, 3):
        out.append((f"alpha_{k}", f"h^({k}/2)-1", h ** sp.Rational(k, 2) - 1))
    for k in range(2 - n, 0):
        out.append((f"alpha_{k}", f"h^({2 * k + 1}/2)-1", h ** sp.Rational(2 * k + 1, 2) - 1))
    for k in range(2 - n, 2):
        out.append((f"beta_{k}", _mul(_pw("h", k), "sqrt(1-h)"), h ** k * _sqs2))
    out.append(("gamma_0", "J_-1", _J2))
    out.append(("gamma_1", "h*J_-1", h * _J2))
    return out


def _s3(n: int):
    z = 2 + h
    q = h * (4 + h)
    if n == 0:
        return [("alpha_0", "h*(4+h)*(2+h)", q * z), ("beta_0", "sqrt(h(4+h))", _sq1)]
    if n == 1:
        return [
            ("alpha_0", "h", h),
            ("alpha_1", "h*(4+h)*(2+h)", q * z),
            ("beta_0", "sqrt(h(4+h))", _sq1),
            ("beta_1", "(2+h)^2*sqrt(h(4+h))", z ** 2 * _sq1),
        ]
    if n == 2:
        return [
            ("alpha_0", "h", h),
            ("alpha_1", "h^2", h ** 2),
            ("alpha_2", "h^3", h ** 3),
            ("beta_0", "sqrt(h(4+h))", _sq1),
            ("beta_1", "(2+h)^2*sqrt(h(4+h))", z ** 2 * _sq1),
            ("gamma_0", "(2+h)*ln(1+alpha)", z * _ln1),
        ]
    out = [("alpha_-2", "h", h), ("alpha_-1", "h^2", h ** 2), ("alpha_0", "h^3", h ** 3)]
    out += [(f"alpha_{i}", _mul("h*(4+h)", _pw("(2+h)", 2 * i)), q * z ** (2 * i)) for i in range(1, n - 1)]
    out += [(f"beta_{i}", _mul(_pw("(2+h)", 2 * i), "sqrt(h(4+h))"), z ** (2 * i) * _sq1) for i in range(n)]
    out.append(("gamma_0", "(2+h)*ln(1+alpha)", z * _ln1))
    if n >= 5:
        out.append(("gamma_1", "(2+h)^3*ln(1+alpha)", z ** 3 * _ln1))
    return out


def _tag_t(k: int) -> str:
    return _pw("t", k) if k >= 0 else f"t^({k})"


def _s4(n: int):
    A, X = ("alpha_0", "Ibar2", _I2), ("xi_0", "Ibar0", _I0)
    G = ("gamma_0", "sqrt(1+h)", _rt)
    if n == 0:
        return [A, ("beta_0", "sqrt(1+h)", _rt)]
    if n in (1, 2):
        out = [A]
        if n == 2:
            out.append(X)
        out += [
            ("delta_0", "1+h", 1 + h),
            ("beta_0", "sqrt(1-t)*(2+t)", _r4 * (2 + _t)),
            ("beta_1", "h*sqrt(1-t)", h * _r4),
            G,
        ]
        if n == 2:
            out.append(("eta_0", "h*J_-1", h * _J4))
        return out
    if n in (3, 4):
        out = [A, X]
        if n == 4:
            out.insert(0, ("alpha_-1", "(4*Ibar0-5*Ibar2)/h", (4 * _I0 - 5 * _I2) / h))
        out += [("delta_0", "1-t", _omt), ("delta_1", "t*(1-t)", _t * _omt)]
        out += [(f"beta_{k}", _mul(_tag_t(k), "sqrt(1-t)"), _t ** k * _r4) for k in range(3)]
        out.append(G)
        if n == 3:
            out.append(("eta_0", "h*J_-1", h * _J4))
        else:
            out += [("eta_0", "J_-1", _J4), ("eta_1", "h*J_-1", h * _J4)]
        return out
    inv = _omt / _t  # (-h)**(-1/2) - 1
    head = [(f"delta_{k}", _mul(_tag_t(k), "(1/t-1)"), _t ** k * inv) for k in range(3)]
    tail = [("eta_0", "J_-1", _J4), ("eta_1", "h*J_-1", h * _J4)]
    if n == 5:
        out = [("alpha_-1", "(4*Ibar0-5*Ibar2)/h", (4 * _I0 - 5 * _I2) / h), A, X] + head
        out += [(f"beta_{k}", _mul(_tag_t(k - 1), "sqrt(1-t)"), _t ** (k - 1) * _r4) for k in range(4)]
        return out + [G] + tail
    if n % 2 == 0:
        p_one, p_ell, p_root, p_r = 5 - n, 4 - n, 4 - n, 5 - n
        d_one, d_ell, d_r = (n - 6) // 2, (n - 4) // 2, n - 3
    else:
        p_one, p_ell, p_root, p_r = 4 - n, 5 - n, 5 - n, 4 - n
        d_one, d_ell, d_r = (n - 5) // 2, (n - 5) // 2, n - 2
    out = list(head)
    out += [(f"zeta_{k}", _mul(_tag_t(p_one), "(1+h)", _pw("h", k)), _t ** p_one * (1 + h) * h ** k) for k in range(d_one + 1)]
    out += [(f"alpha_{k}", _mul(_tag_t(p_ell), _pw("h", k), "Ibar2"), _t ** p_ell * h ** k * _I2) for k in range(d_ell + 1)]
    out += [(f"xi_{k}", _mul(_tag_t(p_ell), _pw("h", k), "Ibar0"), _t ** p_ell * h ** k * _I0) for k in range(d_ell + 1)]
    out += tail
    out += [(f"gamma_{k}", _mul(_tag_t(p_root), _pw("h", k), "sqrt(1+h)"), _t ** p_root * h ** k * _rt) for k in range(d_ell + 1)]
    out += [(f"beta_{k}", _mul(_tag_t(p_r + k), "sqrt(1-t)"), _t ** (p_r + k) * _r4) for k in range(d_r + 1)]
    return out


_BUILDERS = {"S1": _s1, "S2": _s2, "S3": _s3, "S4": _s4}
MAX_N = 8


@lru_cache(maxsize=None)
def basis_for(center, n: int) -> tuple[BasisFunction, ...]:
    """Basis of the closed form of M(h) for perturbations of degree n."""
    tag = get_center(center).tag
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n!r}")
    items = _BUILDERS[tag](n)
    funcs = tuple(BasisFunction(s, t, sp.sympify(e)) for s, t, e in items)
    assert len({f.symbol for f in funcs}) == len(funcs) and len({f.tag for f in funcs}) == len(funcs)
    return funcs


def basis_metadata(center, n: int) -> dict:
    tag = get_center(center).tag
    meta = {"center": tag, "n": n, "size": len(basis_for(tag, n))}
    if tag == "S2" and n >= 2:
        meta["reduced"] = "alpha_0 eliminated using M(1)=0; alpha_k multiply h^(k/2)-1 and h^(k+1/2)-1"
    return meta


# integrals I_k (with the oval's square-root factor) and J_k (without) from
# which the propositions are assembled
def _named():
    return {
        "S1": {
            "I_-3": h * (4 + h) * sp.pi / 8,
            "I_0": h * (4 + h) * sp.pi / 8,
            "I_-2": h * sp.pi / 2,
            "I_-1": h * sp.pi / 2,
            "J_-3": _sq1 * (2 + h) / 2,
            "J_-2": _sq1,
            "J_0": _sq1,
            "J_-1": 2 * _ln1,
        },
        "S2": {
            "I_-4": (1 - h) * sp.pi / 2,
            "I_-3": (1 - h) * sp.pi / 2,
            "I_-2": (1 - sp.sqrt(h)) * sp.pi,
            "I_-1": (1 - sp.sqrt(h)) * sp.pi / sp.sqrt(h),
            "I_0": (1 - h) * sp.pi / (2 * h ** sp.Rational(3, 2)),
            "J_-4": sp.Rational(2, 3) * _sqs2 * (4 - h),
            "J_-3": 2 * _sqs2,
            "J_-2": 2 * _sqs2,
            "J_-1": _J2,
            "J_0": 2 * _sqs2 / h,
        },
        "S3": {},
        "S4": {
            "Ibar0": _I0,
            "Ibar2": _I2,
            "J_-6": sp.sqrt(2) * _r4 * (4 + 2 * _t + h) / 5,
            "J_-5": _rt,
            "J_-3": _rt,
            "J_-4": sp.sqrt(2) * _r4 * (2 + _t) / 3,
            "J_-2": sp.sqrt(2) * _r4,
            "J_-1": _J4,
            "J_0": sp.sqrt(2) * _r4 / _t,
        },
    }


@lru_cache(maxsize=None)
def tag_registry(center) -> dict:
    """Every tag understood by ``basis_eval`` for a center."""
    tag = get_center(center).tag
    reg = dict(_named()[tag])
    for n in range(MAX_N + 1):
        for f in basis_for(tag, n):
            reg.setdefault(f.tag, f.expr)
    return reg


def _ibar0(x):
    return barI_array(np.atleast_1d(np.asarray(x, dtype=float)))[0].reshape(np.shape(x))


def _ibar2(x):
    return barI_array(np.atleast_1d(np.asarray(x, dtype=float)))[1].reshape(np.shape(x))


_MODULES = [{"Ibar0": _ibar0, "Ibar2": _ibar2}, "numpy"]


def lambdify_exprs(exprs):
    """Vectorised evaluator returning an array of shape (len(exprs), len(h))."""
    f = sp.lambdify(h, list(exprs), modules=_MODULES)

    def ev(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = f(x)
        return np.array([np.broadcast_to(np.asarray(v, dtype=float), x.shape) for v in vals])

    return ev


@lru_cache(maxsize=None)
def basis_evaluator(center, n: int):
    return lambdify_exprs([f.expr for f in basis_for(center, n)])


@lru_cache(maxsize=None)
def _tag_evaluator(center, tag):
    return lambdify_exprs([tag_registry(center)[tag]])


def basis_eval(center, tag: str, hval):
    """Value of the closed-form function named ``tag`` at h (scalar or array)."""
    c = get_center(center)
    if tag not in tag_registry(c.tag):
        raise DomainError(f"unknown basis tag {tag!r} for {c.tag}")
    arr = np.atleast_1d(np.asarray(hval, dtype=float))
    lo, hi = c.domain
    if not np.all((arr > lo) & (arr < hi)):
        # endpoint values are allowed where the closed form extends continuously
        if not np.all((arr >= lo) & (arr <= hi)) or not math.isfinite(float(np.max(np.abs(arr)))):
            raise DomainError(f"h outside the closed annulus {c.domain} of {c.tag}")
    out = _tag_evaluator(c.tag, tag)(arr)[0]
    return float(out[0]) if np.ndim(hval) == 0 else out
