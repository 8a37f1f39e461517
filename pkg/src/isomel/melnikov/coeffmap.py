"""Closed-form expansions of M(h) and the map from perturbation coefficients.

M(h) is linear in the perturbation coefficients and, for each center and
degree, lies in the span of a fixed list of basis functions.  The map from
coefficients to basis coefficients is therefore a matrix, obtained once per
(center, n) by least squares against the quadrature vectors of every
monomial on a Chebyshev grid and validated on a second, disjoint grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from ..errors import DomainError, NumericError
from .basis import MAX_N, basis_eval, basis_evaluator, basis_for, basis_metadata, h as H, lambdify_exprs, tag_registry
from .centers import get_center
from .perturbation import PerturbationSpec, block_size
from .quadrature import monomial_integrals

FIT_TOL = 1e-8
HOLDOUT_TOL = 1e-6

# sample windows inside each period annulus; S1 and S3 use a log scale
FIT_WINDOWS = {"S1": (0.02, 20.0), "S2": (0.02, 0.98), "S3": (0.02, 20.0), "S4": (-0.98, -0.02)}


@dataclass
class MelnikovExpansion:
    """M(h) = sum of coefficient * basis function, with tags naming the functions."""

    center: str
    terms: list = field(default_factory=list)
    symbols: list = field(default_factory=list)
    n: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.center = get_center(self.center).tag
        self.terms = [(str(t), float(c)) for t, c in self.terms]
        if len({t for t, _ in self.terms}) != len(self.terms):
            raise DomainError("duplicate basis tag in expansion")

    @property
    def tags(self) -> list[str]:
        return [t for t, _ in self.terms]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms])

    def coefficient(self, name: str) -> float:
        """Coefficient by its symbol (``alpha_0``) or by its tag."""
        if name in self.symbols:
            return self.terms[self.symbols.index(name)][1]
        for t, c in self.terms:
            if t == name:
                return c
        raise DomainError(f"no coefficient {name!r} in expansion")

    def as_dict(self) -> dict:
        return {
            "center": self.center,
            "n": self.n,
            "terms": [
                {"symbol": s, "tag": t, "coefficient": c}
                for s, (t, c) in zip(self.symbols or [None] * len(self.terms), self.terms)
            ],
            "metadata": self.metadata,
        }

    def expr(self) -> sp.Expr:
        reg = tag_registry(self.center)
        return sp.Add(*[sp.Float(c, 17) * reg[t] for t, c in self.terms])

    def derivative(self, hval, order: int = 1):
        """Analytic derivative of the closed form."""
        reg = tag_registry(self.center)
        exprs = [sp.diff(reg[t], H, order) for t, _ in self.terms]
        if not exprs:
            return 0.0 if np.ndim(hval) == 0 else np.zeros(np.shape(hval))
        vals = lambdify_exprs(exprs)(hval)
        out = self.coefficients @ vals
        return float(out[0]) if np.ndim(hval) == 0 else out


def closed_form_eval(exp: MelnikovExpansion, hval):
    """Sum of coefficient * basis_eval over the terms of an expansion."""
    if not exp.terms:
        get_center(exp.center)
        return 0.0 if np.ndim(hval) == 0 else np.zeros(np.shape(hval))
    if exp.n is not None and exp.tags == [f.tag for f in basis_for(exp.center, exp.n)]:
        c = get_center(exp.center)
        arr = np.atleast_1d(np.asarray(hval, dtype=float))
        lo, hi = c.domain
        if not np.all((arr >= lo) & (arr <= hi)):
            raise DomainError(f"h outside the annulus {c.domain} of {c.tag}")
        out = exp.coefficients @ basis_evaluator(exp.center, exp.n)(arr)
    else:
        out = sum(c * np.asarray(basis_eval(exp.center, t, hval)) for t, c in exp.terms)
    return float(np.ravel(out)[0]) if np.ndim(hval) == 0 else np.asarray(out)


def fit_grid(center, size: int, offset: float = 0.5) -> np.ndarray:
    """Chebyshev points in the fit window; offset 0 gives the interleaved hold-out grid."""
    tag = get_center(center).tag
    lo, hi = FIT_WINDOWS[tag]
    k = np.arange(size)
    x = np.cos(np.pi * (k + offset) / size)
    if tag in ("S1", "S3"):
        a, b = np.log(lo), np.log(hi)
        return np.sort(np.exp((a + b) / 2 + (b - a) / 2 * x))
    return np.sort((lo + hi) / 2 + (hi - lo) / 2 * x)


def _column_error(pred, ref):
    scale = np.abs(ref).max(axis=0)
    floor = 1e-6 * max(scale.max(), 1e-300)
    return np.abs(pred - ref).max(axis=0) / np.maximum(scale, floor)


@dataclass(frozen=True)
class LinearMap:
    center: str
    n: int
    matrix: np.ndarray  # basis coefficients = matrix @ perturbation vector
    fit_residual: float
    holdout_error: float
    condition: float
    rank: int


@lru_cache(maxsize=None)
def linear_coefficient_map(center, n: int) -> LinearMap:
    """Matrix taking ``PerturbationSpec.vector()`` to basis coefficients."""
    tag = get_center(center).tag
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n!r}")
    if n > MAX_N:
        raise DomainError(f"coefficient_map supports n <= {MAX_N}, got {n}")
    funcs = basis_for(tag, n)
    m = len(funcs)
    size = 3 * m + 8
    hs = fit_grid(tag, size)
    B = basis_evaluator(tag, n)(hs).T
    G = np.array([monomial_integrals(tag, n, x) for x in hs])
    scale = np.linalg.norm(B, axis=0)
    scale[scale == 0] = 1.0
    sol, _, rank, sv = np.linalg.lstsq(B / scale, G, rcond=None)
    C = sol / scale[:, None]
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    fit_res = float(_column_error(B @ C, G).max())
    hold = fit_grid(tag, size + 1, offset=0.0)[1:-1]
    Bh = basis_evaluator(tag, n)(hold).T
    Gh = np.array([monomial_integrals(tag, n, x) for x in hold])
    hold_err = float(_column_error(Bh @ C, Gh).max())
    if fit_res > FIT_TOL or hold_err > HOLDOUT_TOL:
        raise NumericError(
            f"closed-form fit failed for {tag}, n={n}",
            center=tag, n=n, residual=fit_res, holdout=hold_err, condition=cond, rank=int(rank),
        )
    C.setflags(write=False)
    return LinearMap(tag, n, C, fit_res, hold_err, cond, int(rank))


def coefficient_map(center, pert: PerturbationSpec) -> MelnikovExpansion:
    """Closed-form expansion of M(h) for a perturbation."""
    tag = get_center(center).tag
    lmap = linear_coefficient_map(tag, pert.n)
    coefs = lmap.matrix @ pert.vector()
    funcs = basis_for(tag, pert.n)
    meta = basis_metadata(tag, pert.n)
    meta.update(fit_residual=lmap.fit_residual, holdout_error=lmap.holdout_error,
                condition=lmap.condition, rank=lmap.rank)
    return MelnikovExpansion(
        tag,
        [(f.tag, c) for f, c in zip(funcs, coefs)],
        symbols=[f.symbol for f in funcs],
        n=pert.n,
        metadata=meta,
    )


def jacobian(center, n: int, symbols, params) -> float:
    """Determinant of d(basis coefficients)/d(perturbation coefficients).

    ``symbols`` are coefficient names such as ``alpha_0``; ``params`` are
    names such as ``a+10`` or ``b-02``.  The map is linear, so the Jacobian
    is read off the fitted matrix.
    """
    from .perturbation import param_names

    lmap = linear_coefficient_map(center, n)
    names = [f.symbol for f in basis_for(center, n)]
    pnames = param_names(n)
    try:
        rows = [names.index(s) for s in symbols]
        cols = [pnames.index(p) for p in params]
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    return float(np.linalg.det(lmap.matrix[np.ix_(rows, cols)]))


def unit_perturbation(n: int, name: str) -> PerturbationSpec:
    """Perturbation with a single coefficient (e.g. ``a+10``) equal to one."""
    from .perturbation import param_names

    vec = np.zeros(4 * block_size(n))
    vec[param_names(n).index(name)] = 1.0
    return PerturbationSpec.from_vector(n, vec)
