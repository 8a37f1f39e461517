"""Upper bounds on the number of zeros of M(h), piecewise and smooth."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field

from ..errors import DomainError
from ..melnikov import get_center

H4_DISCREPANCY = (
    "for n >= 6 the closed bound 20n-10-2(1+(-1)^n) gives 20n-14 for even n, "
    "while the direct S4 zero count gives 20n-12 for even n; the closed bound is stored"
)


@dataclass(frozen=True)
class BoundEntry:
    center: str
    n: int
    piecewise: bool
    value: int
    sharp: bool
    clause: str
    notes: dict = field(default_factory=dict, compare=False, hash=False)

    def to_dict(self) -> dict:
        return asdict(self)


def _piecewise(tag: str, n: int):
    if tag == "S1":
        if n == 0:
            return 1, True, "H1(0)=1"
        if n <= 3:
            return n + 3, True, "H1(n)=n+3, n=1,2,3"
        return 2 * n, True, "H1(n)=2n, n>=4"
    if tag == "S2":
        if n <= 1:
            return n + 1, True, "H2(n)=n+1, n=0,1"
        return 2 * n + 2, True, "H2(n)=2n+2, n>=2"
    if tag == "S3":
        if n == 0:
            return 1, True, "H3(0)=1"
        if n <= 2:
            return 2 * n + 1, True, "H3(n)=2n+1, n=1,2"
        return 2 * n + 2, True, "H3(n)=2n+2, n>=3"
    if n == 0:
        return 1, True, "H4(0)=1"
    if n == 1:
        return 4, True, "H4(1)=4"
    if n == 2:
        return 7, True, "H4(2)=7"
    if n <= 5:
        return 12 * n + 4, False, "H4(n)<=12n+4, n=3,4,5"
    return 20 * n - 10 - 2 * (1 + (-1) ** n), False, "H4(n)<=20n-10-2(1+(-1)^n), n>=6"


def _smooth(tag: str, n: int, improved: bool):
    if tag == "S1":
        if n == 0:
            return 0, True, "S1 smooth: 0, n=0"
        if n <= 3:
            return 1, True, "S1 smooth: 1, n=1,2,3"
        return n - 2, True, "S1 smooth: n-2, n>=4"
    if tag == "S2":
        if n <= 1:
            return 0, True, "S2 smooth: 0, n=0,1"
        return n, True, "S2 smooth: n, n>=2"
    if tag == "S3":
        return n, True, "S3 smooth: n"
    if not improved:
        return 14 * n + 11, False, "S4 smooth: <=14n+11"
    if n <= 1:
        return n, True, "S4 smooth: n for n=0,1"
    return (5 * n - 5) // 2, False, "S4 smooth: <=[(5n-5)/2]"


def bound_table(center, n: int, piecewise: bool = True, smooth_s4_improved: bool = True) -> BoundEntry:
    """Least upper bound (or upper bound when not sharp) on the zeros of M(h)."""
    tag = get_center(center).tag
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n!r}")
    value, sharp, clause = _piecewise(tag, n) if piecewise else _smooth(tag, n, smooth_s4_improved)
    notes = {}
    if piecewise and tag == "S4" and n >= 6 and n % 2 == 0:
        notes["discrepancy"] = H4_DISCREPANCY
        notes["derived_value"] = 20 * n - 12
    return BoundEntry(tag, n, piecewise, value, sharp, clause, notes)


def bound_rows(centers=("S1", "S2", "S3", "S4"), ns=range(0, 11), piecewise: bool = True,
               smooth_s4_improved: bool = True) -> list[BoundEntry]:
    return [bound_table(c, n, piecewise, smooth_s4_improved) for c in centers for n in ns]


def bounds_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["center", "n", "piecewise", "bound", "sharp", "clause", "note"])
    for r in rows:
        w.writerow([r.center, r.n, int(r.piecewise), r.value, int(r.sharp), r.clause, r.notes.get("discrepancy", "")])
    return buf.getvalue()
