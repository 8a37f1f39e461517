"""Constructive lower bounds: combinations vanishing at prescribed points."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import sympy as sp

from ..errors import DomainError, NumericError
from ..melnikov import PerturbationSpec, basis_for, get_center, linear_coefficient_map
from ..melnikov.perturbation import block_size
from ..melnikov.basis import BasisFunction, basis_evaluator, h as H, lambdify_exprs
from .counting import SCAN, melnikov_zeros

RANK_TOL = 1e-12


@dataclass
class Realization:
    coefficients: np.ndarray
    targets: list
    sign_changes: list  # one bool per target
    rank: int
    singular_values: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.sign_changes)

    def to_dict(self):
        d = asdict(self)
        d["coefficients"] = self.coefficients.tolist()
        return d


def _evaluator(functions):
    if callable(functions):
        return functions
    exprs = [f.expr if isinstance(f, BasisFunction) else sp.sympify(f, locals={"h": H}) for f in functions]
    fn = lambdify_exprs(exprs)

    def ev(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = fn(x)
        return np.array([np.broadcast_to(np.asarray(c, dtype=float), x.shape) for c in out])

    return ev


def cgp_realize(functions, iv, targets) -> Realization:
    """Nontrivial combination of m functions vanishing at m-1 targets.

    ``functions`` is a list of sympy expressions in h (or basis records) or
    a callable mapping an array of h to an (m, len(h)) array. The null
    vector of the (m-1) x m system is taken from the SVD; a rank below m-1
    raises NumericError with the singular values.
    """
    ev = _evaluator(functions)
    lo, hi = map(float, iv)
    targets = [float(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise DomainError("targets must be distinct")
    if any(not lo < t < hi for t in targets):
        raise DomainError("targets must lie inside the interval")
    probe = ev(np.array([0.5 * (lo + hi)]) if np.isfinite(hi) else np.array([lo + 1.0]))
    m = probe.shape[0]
    if len(targets) != m - 1:
        raise DomainError(f"{m} functions need {m - 1} targets, got {len(targets)}")
    if m == 1:
        return Realization(np.array([1.0]), [], [], 1, [1.0])
    A = ev(np.array(targets)).T  # (m-1) x m
    scale = np.max(np.abs(A), axis=0)
    scale[scale == 0] = 1.0
    U, S, Vt = np.linalg.svd(A / scale, full_matrices=True)
    rank = int(np.sum(S > RANK_TOL * S[0])) if S.size else 0
    if rank < m - 1:
        raise NumericError(f"rank defect: {m - 1 - rank} (functions dependent at the targets)",
                           singular_values=S.tolist(), rank=rank)
    c = Vt[-1] / scale
    c = c / np.max(np.abs(c))
    changes = []
    for t in sorted(targets):
        d = 1e-6 * max(1.0, abs(t))
        vals = c @ ev(np.array([t - d, t + d]))
        changes.append(bool(vals[0] * vals[1] < 0))
    return Realization(c, targets, changes, rank, S.tolist())


def default_targets(center, n: int) -> list:
    """m-1 well separated interior points inside the coefficient-fit window."""
    tag = get_center(center).tag
    m = len(basis_for(tag, n))
    k = m - 1
    if tag in ("S1", "S3"):
        return list(np.geomspace(0.05, 10.0, k)) if k > 1 else [1.0]
    if tag == "S2":
        return list(np.linspace(0.05, 0.95, k + 2)[1:-1]) if k > 1 else [0.5]
    return list(np.linspace(-0.95, -0.05, k + 2)[1:-1]) if k > 1 else [-0.5]


def realize_perturbation(center, n: int, targets=None, piecewise: bool = True) -> tuple[PerturbationSpec, Realization]:
    """Perturbation whose M(h) vanishes at m-1 targets.

    The basis combination comes from cgp_realize; the fitted linear map
    from perturbation parameters to basis coefficients is inverted by a
    least-squares pseudo-inverse. With ``piecewise=False`` the search is
    restricted to smooth perturbations, so m-1 is replaced by the dimension
    of their image minus one.
    """
    tag = get_center(center).tag
    targets = default_targets(tag, n) if targets is None else targets
    ev = basis_evaluator(tag, n)

    def evf(x):
        out = ev(np.atleast_1d(np.asarray(x, dtype=float)))
        return np.array([np.broadcast_to(np.asarray(c, dtype=float), np.shape(np.atleast_1d(x))) for c in out])

    iv = SCAN[tag][0]
    lm = linear_coefficient_map(tag, n)
    C = lm.matrix
    if piecewise:
        real = cgp_realize(evf, iv, targets)
        p = np.linalg.lstsq(C, real.coefficients, rcond=None)[0]
    else:
        # smooth perturbations share the coefficients of both half planes, so
        # the combination is sought inside the image of that subspace
        bs = block_size(n)
        Cs = np.hstack([C[:, :bs] + C[:, bs:2 * bs], C[:, 2 * bs:3 * bs] + C[:, 3 * bs:]])
        U, S, Vt = np.linalg.svd(Cs, full_matrices=False)
        r = int(np.sum(S > 1e-10 * S[0]))
        span = U[:, :r]

        def evs(x):
            return span.T @ evf(x)

        real = cgp_realize(evs, iv, targets)
        real.coefficients = span @ real.coefficients
        ps = np.linalg.lstsq(Cs, real.coefficients, rcond=None)[0]
        pa, pb = np.split(ps, 2)
        p = np.concatenate([pa, pa, pb, pb])
    resid = np.linalg.norm(lm.matrix @ p - real.coefficients) / np.linalg.norm(real.coefficients)
    if resid > 1e-8:
        raise NumericError("basis combination is not reachable by a perturbation", residual=float(resid))
    pert = PerturbationSpec.from_vector(n, p, tag)
    return pert, real


def witness_count(center, n: int, targets=None) -> tuple[int, PerturbationSpec]:
    pert, _ = realize_perturbation(center, n, targets)
    return melnikov_zeros(center, pert).count, pert
