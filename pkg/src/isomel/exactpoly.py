"""Exact rational polynomial arithmetic.

Dense univariate polynomials over Q with Sturm sequences, real root
isolation, Sylvester resultants over Q[s], and the closed-form k-th
derivative rule for ``P(x) / (x**p * (a + sign*x)**q)``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from numbers import Rational
from typing import Iterable, Sequence

from .errors import DomainError, ParseError


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


class RationalPoly:
    """Polynomial with Fraction coefficients, constant term first."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    @classmethod
    def monomial(cls, degree: int, coeff=1, var: str = "x") -> "RationalPoly":
        return cls([0] * degree + [coeff], var)

    @classmethod
    def from_roots(cls, roots: Iterable, var: str = "x") -> "RationalPoly":
        p = cls([1], var)
        for r in roots:
            p = p * cls([-_frac(r), 1], var)
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]}, var={self.var!r})"

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        return RationalPoly([other], self.var)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RationalPoly(
            [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], self.var
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RationalPoly([], self.var)
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return RationalPoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative polynomial power")
        result = RationalPoly([1], self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        if len(rem) - 1 < dq:
            return RationalPoly([], self.var), self
        quot = [Fraction(0)] * (len(rem) - dq)
        inv = 1 / other.lc
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] * inv
            if c:
                quot[i - dq] = c
                for j, oc in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * oc
        return RationalPoly(quot, self.var), RationalPoly(rem[:dq], self.var)

    def __floordiv__(self, other):
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(self._coerce(other))[1]

    def exact_div(self, other: "RationalPoly") -> "RationalPoly":
        q, r = self.divmod(self._coerce(other))
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def derivative(self, k: int = 1) -> "RationalPoly":
        cs = list(self.coeffs)
        for _ in range(k):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return RationalPoly(cs, self.var)

    def __call__(self, x):
        """Horner evaluation; exact for rationals, float for floats."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def sign_at(self, x) -> int:
        v = self(_frac(x))
        return (v > 0) - (v < 0)

    def sign_at_infinity(self, direction: int = 1) -> int:
        if self.is_zero():
            return 0
        s = 1 if self.lc > 0 else -1
        if direction < 0 and self.degree % 2:
            s = -s
        return s

    def compose(self, inner: "RationalPoly", var: str | None = None) -> "RationalPoly":
        """Return self(inner(x)); the result carries ``var`` or inner's tag."""
        result = RationalPoly([], var or inner.var)
        for c in reversed(self.coeffs):
            result = result * inner + RationalPoly([c], result.var)
        result.var = var or inner.var
        return result

    def content(self) -> Fraction:
        """Positive rational g with self/g primitive with integer coefficients."""
        if self.is_zero():
            return Fraction(0)
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        num = 0
        for c in self.coeffs:
            num = math.gcd(num, int(c * den))
        return Fraction(num, den)

    def primitive(self) -> "RationalPoly":
        """Scale by the positive content so coefficients are coprime integers."""
        g = self.content()
        if g == 0:
            return self
        return RationalPoly([c / g for c in self.coeffs], self.var)

    def monic(self) -> "RationalPoly":
        return RationalPoly([c / self.lc for c in self.coeffs], self.var)

    def integer_coeffs(self) -> list[int]:
        """Coefficients as integers; raises if any is not integral."""
        out = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise DomainError("polynomial has non-integer coefficients")
            out.append(c.numerator)
        return out

    def to_sympy(self, symbol=None):
        import sympy as sp

        x = symbol if symbol is not None else sp.Symbol(self.var)
        return sum(
            (sp.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(self.coeffs)),
            sp.Integer(0),
        )


def poly_gcd(p: RationalPoly, q: RationalPoly) -> RationalPoly:
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def squarefree_part(p: RationalPoly) -> RationalPoly:
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p.primitive()
    return p.exact_div(g).primitive()


@dataclass(frozen=True)
class RationalInterval:
    """Open interval (lo, hi); ``None`` stands for an infinite endpoint."""

    lo: Fraction | None
    hi: Fraction | None

    def __post_init__(self):
        lo = None if self.lo is None else _frac(self.lo)
        hi = None if self.hi is None else _frac(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo is not None and hi is not None and not lo < hi:
            raise DomainError(f"empty interval ({lo}, {hi})")

    @property
    def width(self) -> Fraction | None:
        if self.lo is None or self.hi is None:
            return None
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        if self.lo is None or self.hi is None:
            raise DomainError("unbounded interval has no midpoint")
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = _frac(x) if not isinstance(x, float) else x
        return (self.lo is None or x > self.lo) and (self.hi is None or x < self.hi)

    def as_strings(self) -> tuple[str | None, str | None]:
        return (None if self.lo is None else str(self.lo), None if self.hi is None else str(self.hi))


@dataclass(frozen=True)
class FractionalPower:
    """The factor ``(a + sign*x)**exponent`` with a non-integer exponent."""

    base_shift: Fraction
    sign: int
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "base_shift", _frac(self.base_shift))
        object.__setattr__(self, "exponent", _frac(self.exponent))
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")
        if self.exponent.denominator == 1:
            raise DomainError("exponent must not be an integer")


def sturm_sequence(p: RationalPoly) -> list[RationalPoly]:
    """Sturm chain p, p', -rem(...), each scaled by a positive constant."""
    if p.is_zero():
        raise DomainError("Sturm sequence of the zero polynomial")
    seq = [p.primitive()]
    d = p.derivative()
    if d.is_zero():
        return seq
    seq.append(d.primitive())
    while True:
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append((-r).primitive())
    return seq


def _variations(signs: Sequence[int]) -> int:
    nz = [s for s in signs if s]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def _var_at(seq, x) -> int:
    if x is None:
        raise AssertionError
    return _variations([q.sign_at(x) for q in seq])


def _var_inf(seq, direction) -> int:
    return _variations([q.sign_at_infinity(direction) for q in seq])


def _deflate(p: RationalPoly, root: Fraction) -> RationalPoly:
    lin = RationalPoly([-root, 1], p.var)
    while not p.is_zero() and p.degree > 0 and p(root) == 0:
        p = p.exact_div(lin)
    return p


def sturm_count(p: RationalPoly, iv: RationalInterval) -> int:
    """Number of distinct real roots of ``p`` in the open interval ``iv``.

    Endpoints that happen to be roots are divided out exactly before the
    chain is evaluated, so the count stays exact.
    """
    if p.is_zero():
        raise DomainError("sturm_count of the zero polynomial")
    q = p
    for end in (iv.lo, iv.hi):
        if end is not None:
            q = _deflate(q, end)
    if q.degree <= 0:
        return 0
    seq = sturm_sequence(q)
    v_lo = _var_inf(seq, -1) if iv.lo is None else _var_at(seq, iv.lo)
    v_hi = _var_inf(seq, 1) if iv.hi is None else _var_at(seq, iv.hi)
    return v_lo - v_hi


def root_bound(p: RationalPoly) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    lc = abs(p.lc)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0)) + 1


def isolate_roots(
    p: RationalPoly, iv: RationalInterval, width: Fraction = Fraction(1, 2**20)
) -> list[RationalInterval]:
    """Disjoint open intervals, one per distinct root in ``iv``, each narrower than ``width``."""
    if p.is_zero():
        raise DomainError("isolate_roots of the zero polynomial")
    width = _frac(width)
    q = squarefree_part(p)
    if q.degree <= 0:
        return []
    bound = root_bound(q)
    lo = -bound if iv.lo is None else max(iv.lo, -bound)
    hi = bound if iv.hi is None else min(iv.hi, bound)
    if lo >= hi:
        return []
    lo, hi = _clean_endpoints(q, lo, hi)

    out: list[RationalInterval] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = sturm_count(q, RationalInterval(a, b))
        if n == 0:
            continue
        if n == 1:
            out.append(_refine(q, a, b, width))
            continue
        m = (a + b) / 2
        if q(m) == 0:
            eps = (b - a) / 4
            while q(m - eps) == 0 or q(m + eps) == 0 or sturm_count(q, RationalInterval(m - eps, m + eps)) != 1:
                eps /= 2
            out.append(_refine(q, m - eps, m + eps, width))
            stack.append((a, m - eps))
            stack.append((m + eps, b))
        else:
            stack.append((a, m))
            stack.append((m, b))
    out.sort(key=lambda r: r.lo)
    return out


def _clean_endpoints(q: RationalPoly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Move root-valued endpoints inward without skipping any interior root."""
    if q(lo) == 0:
        d = (hi - lo) / 4
        while q(lo + d) == 0 or sturm_count(q, RationalInterval(lo, lo + d)) != 0:
            d /= 2
        lo = lo + d
    if q(hi) == 0:
        d = (hi - lo) / 4
        while q(hi - d) == 0 or sturm_count(q, RationalInterval(hi - d, hi)) != 0:
            d /= 2
        hi = hi - d
    return lo, hi


def _refine(q: RationalPoly, a: Fraction, b: Fraction, width: Fraction) -> RationalInterval:
    """Bisect (a, b), whose endpoints are not roots, around its single simple root."""
    sa = q.sign_at(a)
    while b - a >= width:
        m = (a + b) / 2
        sm = q.sign_at(m)
        if sm == 0:
            eps = width / 4
            return RationalInterval(m - eps, m + eps)
        if sm == sa:
            a = m
        else:
            b = m
    return RationalInterval(a, b)


# ---------------------------------------------------------------------------
# resultants over Q[s]


def _is_zero_entry(e: RationalPoly) -> bool:
    return e.is_zero()


def sylvester_matrix(p: Sequence[RationalPoly], q: Sequence[RationalPoly]) -> list[list[RationalPoly]]:
    """Sylvester matrix of two polynomials in w whose coefficients lie in Q[s].

    ``p`` and ``q`` list the w-coefficients in ascending degree.  Rows hold
    coefficients from the highest degree down, the deg(q) shifted copies of
    p first, then deg(p) copies of q.
    """
    m, n = len(p) - 1, len(q) - 1
    var = p[0].var if p else "s"
    zero = RationalPoly([], var)
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(p)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(q)):
            row[i + j] = c
        rows.append(row)
    return rows


def bareiss_determinant(matrix: list[list[RationalPoly]]) -> RationalPoly:
    """Fraction-free determinant of a square matrix with entries in Q[s]."""
    a = [list(r) for r in matrix]
    n = len(a)
    if n == 0:
        return RationalPoly([1], "s")
    var = next((e.var for r in a for e in r), "s")
    sign = 1
    prev = RationalPoly([1], var)
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if not a[i][k].is_zero()), None)
        if piv is None:
            return RationalPoly([], var)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = akk * a[i][j] - aik * a[k][j]
                a[i][j] = num.exact_div(prev) if prev.degree > 0 or prev.lc != 1 else num
            a[i][k] = RationalPoly([], var)
        prev = akk
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def resultant(p: Sequence[RationalPoly], q: Sequence[RationalPoly]) -> RationalPoly:
    """Res_w(p, q) as the Sylvester determinant.

    Sign convention: for p = w - a and q = w - b the result is a - b, i.e.
    Res(p, q) = lc(p)**deg(q) * prod q(roots of p).
    """
    p = list(p)
    q = list(q)
    while p and p[-1].is_zero():
        p.pop()
    while q and q[-1].is_zero():
        q.pop()
    if len(p) < 2 or len(q) < 2:
        raise DomainError("resultant needs positive degree in w for both arguments")
    return bareiss_determinant(sylvester_matrix(p, q))


def univariate_resultant(p: RationalPoly, q: RationalPoly) -> Fraction:
    """Resultant of two univariate polynomials (constant coefficients)."""
    lift = lambda r: [RationalPoly([c], "s") for c in r.coeffs]
    res = resultant(lift(p), lift(q))
    return res.coeffs[0] if res.coeffs else Fraction(0)


def evaluate_bivariate(coeffs_in_w: Sequence[RationalPoly], s, w):
    """Evaluate sum_k c_k(s) w**k."""
    acc = 0
    for c in reversed(coeffs_in_w):
        acc = acc * w + c(s)
    return acc


# ---------------------------------------------------------------------------
# variable substitutions


def substitute_neg_square(p: RationalPoly, var: str = "t") -> RationalPoly:
    """p(h) with h = -t**2."""
    return p.compose(RationalPoly([0, 0, -1], var), var)


def substitute_shift_square(p: RationalPoly, shift=2, var: str = "h") -> RationalPoly:
    """p(z) with z = (shift + h)**2."""
    inner = RationalPoly([shift, 1], var) ** 2
    return p.compose(inner, var)


def substitute_sqrt_complement(p: RationalPoly, var: str = "r") -> tuple[RationalPoly, RationalPoly]:
    """Split p(s), s = sqrt(1 - r**2), as E(r) + sqrt(1 - r**2) * O(r)."""
    even = RationalPoly(p.coeffs[0::2], var)
    odd = RationalPoly(p.coeffs[1::2], var)
    inner = RationalPoly([1, 0, -1], var)
    return even.compose(inner, var), odd.compose(inner, var)


# ---------------------------------------------------------------------------
# derivative rule for P(x) / (x**p (a + sign*x)**q)


@dataclass(frozen=True)
class RationalPowerExpr:
    """``numerator(x) / (x**x_exponent * (a + sign*x)**shift_exponent)``."""

    numerator: RationalPoly
    x_exponent: Fraction
    shift_exponent: Fraction
    a: Fraction
    sign: int

    def evaluate(self, x: float) -> float:
        base = float(self.a) + self.sign * x
        return float(self.numerator(x)) / (x ** float(self.x_exponent) * base ** float(self.shift_exponent))

    def evaluate_exact_parts(self, x: Fraction) -> tuple[Fraction, Fraction, Fraction]:
        """(numerator value, x, a + sign*x) at a rational point."""
        return self.numerator(x), x, self.a + self.sign * x


def lemma2_derivative(
    P: RationalPoly, p, q, a, sign: int = 1, order: int | None = None, n: int | None = None
) -> RationalPowerExpr:
    """k-th derivative of P(x) / (x**p (a + sign*x)**q) with non-integer p, q and p + q integral.

    The result is N(x) / (x**(p+k) (a + sign*x)**(q+k)).  A monomial x**d of
    P contributes to x**(d+k-s), s = 0..k, the coefficient
    ``a**s * C(k,s) * prod_{m=s}^{k-1}(d-p-q-m) * prod_{m=0}^{s-1}(d-p-m)``
    times ``sign**(k-s)``.
    When ``order`` equals n + 1 - (p + q), with n = deg P unless given,
    N has degree at most n.
    """
    p, q, a = _frac(p), _frac(q), _frac(a)
    if p.denominator == 1 or q.denominator == 1:
        raise DomainError("p and q must be non-integers")
    if (p + q).denominator != 1:
        raise DomainError("p + q must be an integer")
    if a == 0:
        raise DomainError("a must be nonzero")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    nn = P.degree if n is None else n
    lemma_order = nn + 1 - int(p + q)
    k = lemma_order if order is None else int(order)
    if k < 0:
        raise DomainError(f"derivative order must be nonnegative, got {k}")
    var = P.var
    if k == 0:
        return RationalPowerExpr(P, p, q, a, sign)
    out: dict[int, Fraction] = {}
    for d, cd in enumerate(P.coeffs):
        if cd == 0:
            continue
        for s in range(k + 1):
            coef = a**s * math.comb(k, s)
            for m in range(s, k):
                coef *= d - p - q - m
            for m in range(s):
                coef *= d - p - m
            if sign < 0 and (k - s) % 2:
                coef = -coef
            deg = d + k - s
            out[deg] = out.get(deg, Fraction(0)) + cd * coef
    N = RationalPoly([out.get(i, 0) for i in range(max(out, default=-1) + 1)], var)
    if order is None or k == lemma_order:
        if N.degree > nn:
            raise AssertionError(f"numerator degree {N.degree} exceeds {nn}")
    return RationalPowerExpr(N, p + k, q + k, a, sign)


# ---------------------------------------------------------------------------
# checked-in data


def _data_path(name: str):
    return resources.files("isomel") / "data" / f"{name}.txt"


def parse_poly_text(text: str, source: str = "<string>") -> RationalPoly:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError(f"{source}: empty polynomial file")
    var = lines[0]
    if not var.isidentifier():
        raise ParseError(f"{source}: line 1: bad variable tag {var!r}")
    coeffs = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(f"{source}: line {lineno}: expected 'numerator denominator'")
        try:
            num, den = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{source}: line {lineno}: {exc}") from None
        if den == 0:
            raise ParseError(f"{source}: line {lineno}: zero denominator")
        coeffs.append(Fraction(num, den))
    return RationalPoly(coeffs, var)


def format_poly_text(p: RationalPoly) -> str:
    lines = [p.var] + [f"{c.numerator} {c.denominator}" for c in p.coeffs]
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def load_poly(name: str) -> RationalPoly:
    """Load one of the checked-in polynomials (Y70, R1, Z2, ...)."""
    path = _data_path(name)
    if not path.is_file():
        raise DomainError(f"no polynomial data named {name!r}")
    return parse_poly_text(path.read_text(), source=f"{name}.txt")


def data_checksum(name: str) -> str:
    return hashlib.sha256(_data_path(name).read_bytes()).hexdigest()


DATA_NAMES = (
    "Y70", "Y71", "Y72", "Delta_printed", "phi0", "phi1", "phi2", "R1", "R2",
    "Psi_2_5_printed", "Y7", "Y9", "Z1", "Z2",
)
