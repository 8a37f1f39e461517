"""Piecewise polynomial perturbations P^+-, Q^+- and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import DomainError, ParseError

BLOCKS = ("a_plus", "a_minus", "b_plus", "b_minus")


@lru_cache(maxsize=None)
def monomials(n: int) -> tuple[tuple[int, int], ...]:
    """Exponent pairs (i, j) with i + j <= n, by total degree then by i."""
    return tuple((i, d - i) for d in range(n + 1) for i in range(d + 1))


def block_size(n: int) -> int:
    return (n + 1) * (n + 2) // 2


def param_names(n: int) -> list[str]:
    names = []
    for blk in BLOCKS:
        letter, side = blk.split("_")
        sign = "+" if side == "plus" else "-"
        names += [f"{letter}{sign}{i}{j}" for i, j in monomials(n)]
    return names


@dataclass
class PerturbationSpec:
    """Coefficients a^+-_ij (of P^+-) and b^+-_ij (of Q^+-) for i + j <= n.

    ``P^+`` acts on x > 0 and ``P^-`` on x < 0.  Each block is a vector in
    the order of ``monomials(n)``.
    """

    n: int
    a_plus: np.ndarray = field(default=None)
    a_minus: np.ndarray = field(default=None)
    b_plus: np.ndarray = field(default=None)
    b_minus: np.ndarray = field(default=None)
    center: str | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise DomainError(f"degree must be a nonnegative integer, got {self.n!r}")
        self.n = int(self.n)
        size = block_size(self.n)
        for blk in BLOCKS:
            v = getattr(self, blk)
            v = np.zeros(size) if v is None else np.asarray(v, dtype=float).ravel()
            if v.size != size:
                raise DomainError(f"{blk} has {v.size} entries, expected {size} for n={self.n}")
            setattr(self, blk, v.copy())

    @classmethod
    def zero(cls, n: int, center: str | None = None) -> "PerturbationSpec":
        return cls(n, center=center)

    @classmethod
    def from_terms(cls, n: int, center: str | None = None, **terms) -> "PerturbationSpec":
        """Build from keyword dicts, e.g. ``a_plus={(1, 0): 1.0}``."""
        pert = cls(n, center=center)
        for blk, entries in terms.items():
            if blk not in BLOCKS:
                raise DomainError(f"unknown block {blk!r}")
            for (i, j), value in dict(entries).items():
                pert.set(blk, i, j, value)
        return pert

    @classmethod
    def from_vector(cls, n: int, vec, center: str | None = None) -> "PerturbationSpec":
        vec = np.asarray(vec, dtype=float)
        size = block_size(n)
        if vec.size != 4 * size:
            raise DomainError(f"parameter vector has {vec.size} entries, expected {4 * size}")
        parts = [vec[k * size:(k + 1) * size] for k in range(4)]
        return cls(n, *parts, center=center)

    @classmethod
    def random(cls, n: int, rng=None, center: str | None = None, scale: float = 1.0) -> "PerturbationSpec":
        rng = np.random.default_rng(rng)
        return cls.from_vector(n, scale * rng.uniform(-1, 1, 4 * block_size(n)), center=center)

    def index(self, i: int, j: int) -> int:
        try:
            return monomials(self.n).index((i, j))
        except ValueError:
            raise DomainError(f"monomial x^{i} y^{j} not allowed for n={self.n}") from None

    def get(self, block: str, i: int, j: int) -> float:
        return float(getattr(self, block)[self.index(i, j)])

    def set(self, block: str, i: int, j: int, value: float) -> None:
        if block not in BLOCKS:
            raise DomainError(f"unknown block {block!r}")
        getattr(self, block)[self.index(i, j)] = float(value)

    def vector(self) -> np.ndarray:
        return np.concatenate([getattr(self, blk) for blk in BLOCKS])

    def is_smooth(self) -> bool:
        return np.array_equal(self.a_plus, self.a_minus) and np.array_equal(self.b_plus, self.b_minus)

    def evaluate(self, x, y):
        """(P, Q) at points, choosing the side by the sign of x."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        P = np.zeros(np.broadcast(x, y).shape)
        Q = np.zeros_like(P)
        right = x > 0
        for k, (i, j) in enumerate(monomials(self.n)):
            m = x ** i * y ** j
            P = P + m * np.where(right, self.a_plus[k], self.a_minus[k])
            Q = Q + m * np.where(right, self.b_plus[k], self.b_minus[k])
        return P, Q

    def to_dict(self) -> dict:
        out = {"n": self.n}
        if self.center is not None:
            out["center"] = self.center
        for blk in BLOCKS:
            v = getattr(self, blk)
            out[blk] = [[i, j, float(v[k])] for k, (i, j) in enumerate(monomials(self.n)) if v[k] != 0]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "PerturbationSpec":
        if not isinstance(data, dict) or "n" not in data:
            raise ParseError("perturbation document needs an integer field 'n'")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ParseError(f"field 'n' must be a nonnegative integer, got {n!r}")
        center = data.get("center")
        if center is not None and not isinstance(center, str):
            raise ParseError("field 'center' must be a string")
        unknown = set(data) - {"n", "center", *BLOCKS}
        if unknown:
            raise ParseError(f"unknown fields {sorted(unknown)}")
        pert = cls(n, center=center)
        for blk in BLOCKS:
            for entry in data.get(blk, []):
                if not (isinstance(entry, (list, tuple)) and len(entry) == 3):
                    raise ParseError(f"{blk} entries must be [i, j, value], got {entry!r}")
                i, j, value = entry
                if not all(isinstance(t, int) and not isinstance(t, bool) for t in (i, j)):
                    raise ParseError(f"exponents must be integers in {entry!r}")
                if i < 0 or j < 0 or i + j > n:
                    raise ParseError(f"monomial ({i}, {j}) exceeds degree {n}")
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ParseError(f"coefficient must be a number in {entry!r}")
                pert.set(blk, i, j, value)
        return pert

    @classmethod
    def from_json(cls, text: str) -> "PerturbationSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)
