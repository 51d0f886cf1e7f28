"""Translation-canonical addressing patterns and the SLM patch catalog.

A pattern of k sites in an m x n sub-array needs its own hologram patch
only up to translation: AOD C supplies the shift. Each translation class is
represented by the member touching row 0 and column 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable

from . import _kernels
from .errors import CapacityError, CatalogMissError, DomainError

Site = tuple[int, int]


@dataclass(frozen=True, order=True)
class AddressPattern:
    """Set of (row, col) sites, stored sorted and de-duplicated."""

    sites: tuple[Site, ...]

    def __init__(self, sites: Iterable[Site]):
        s = tuple(sorted({(int(r), int(c)) for r, c in sites}))
        if not s:
            raise DomainError("an address pattern needs at least one site")
        object.__setattr__(self, "sites", s)

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    @property
    def k(self) -> int:
        return len(self.sites)

    @property
    def extent(self) -> tuple[int, int]:
        """Bounding-box (rows, cols)."""
        rows = [r for r, _ in self.sites]
        cols = [c for _, c in self.sites]
        return max(rows) - min(rows) + 1, max(cols) - min(cols) + 1

    @property
    def is_canonical(self) -> bool:
        return min(r for r, _ in self.sites) == 0 and min(c for _, c in self.sites) == 0

    def shifted(self, offset: Site) -> "AddressPattern":
        dr, dc = offset
        return AddressPattern((r + dr, c + dc) for r, c in self.sites)

    def __str__(self):
        return " ".join(f"({r},{c})" for r, c in self.sites)


def canonicalize(pattern) -> tuple[AddressPattern, Site]:
    """Translate ``pattern`` to touch row 0 and column 0; return it and the shift."""
    if not isinstance(pattern, AddressPattern):
        pattern = AddressPattern(pattern)
    r0 = min(r for r, _ in pattern.sites)
    c0 = min(c for _, c in pattern.sites)
    return pattern.shifted((-r0, -c0)), (r0, c0)


def _check_mnk(m, n, k):
    if m < 1 or n < 1:
        raise DomainError(f"sub-array must be at least 1x1, got {m}x{n}")
    if not 1 <= k <= m * n:
        raise DomainError(f"k must lie in [1, {m * n}], got {k}")


def _binom(top, k):
    return comb(top, k) if top >= 0 else 0


def partition_count(m: int, n: int, k: int) -> int:
    """Patches needed for every k-site pattern of an m x n sub-array (inclusion-exclusion)."""
    _check_mnk(m, n, k)
    return (
        _binom(m * n, k)
        - _binom((m - 1) * n, k)
        - _binom(m * (n - 1), k)
        + _binom((m - 1) * (n - 1), k)
    )


def partition_total(m: int, n: int, k_max: int) -> int:
    """Patches needed for all patterns of 1..k_max sites."""
    _check_mnk(m, n, k_max)
    return sum(partition_count(m, n, k) for k in range(1, k_max + 1))


def max_complete_k(m: int, n: int, available: int) -> int:
    """Largest k_max whose full pattern set fits into ``available`` patches."""
    k = 0
    while k < m * n and partition_total(m, n, k + 1) <= available:
        k += 1
    return k


def enumerate_canonical_patterns(m: int, n: int, k: int) -> list[AddressPattern]:
    """All k-site patterns in an m x n grid touching row 0 and column 0.

    Lexicographic by sorted site list, so indices are stable across runs.
    """
    _check_mnk(m, n, k)
    cells = [(r, c) for r in range(m) for c in range(n)]
    out = []
    for combo in combinations(cells, k):
        if any(r == 0 for r, _ in combo) and any(c == 0 for _, c in combo):
            out.append(AddressPattern(combo))
    return out


def brute_force_count(m: int, n: int, k: int) -> int:
    """Canonical pattern count by exhaustive subset search (independent of the formula)."""
    _check_mnk(m, n, k)
    return _kernels.count_anchored(m, n, k)


@dataclass
class PatchCatalog:
    """Maps canonical patterns to dense patch indices.

    ``k_max`` counts complete levels; ``n_partial`` patterns of level
    ``k_max + 1`` may follow when the catalog was filled to capacity.
    """

    sub_m: int
    sub_n: int
    k_max: int
    entries: dict[AddressPattern, int] = field(default_factory=dict)
    n_partial: int = 0

    def __len__(self):
        return len(self.entries)

    def __contains__(self, pattern):
        return pattern in self.entries

    def index_of(self, pattern) -> int:
        canon, _ = canonicalize(pattern)
        try:
            return self.entries[canon]
        except KeyError:
            raise CatalogMissError(canon) from None

    def ordered(self) -> list[AddressPattern]:
        return sorted(self.entries, key=self.entries.__getitem__)

    def to_text(self) -> str:
        lines = [f"catalog m={self.sub_m} n={self.sub_n} k_max={self.k_max} count={len(self)}"]
        if self.n_partial:
            lines[0] += f" partial={self.n_partial}"
        for p in self.ordered():
            lines.append(f"{self.entries[p]}; {p.k}; {p}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PatchCatalog":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(kv.split("=") for kv in lines[0].split()[1:])
        cat = cls(
            sub_m=int(head["m"]),
            sub_n=int(head["n"]),
            k_max=int(head["k_max"]),
            n_partial=int(head.get("partial", 0)),
        )
        for ln in lines[1:]:
            idx, k, sites = (s.strip() for s in ln.split(";"))
            pat = AddressPattern(parse_sites(sites))
            if pat.k != int(k):
                raise ValueError(f"site count mismatch in catalog line: {ln!r}")
            cat.entries[pat] = int(idx)
        if len(cat) != int(head["count"]):
            raise ValueError(f"catalog header count {head['count']} != {len(cat)} entries")
        return cat

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "PatchCatalog":
        return cls.from_text(Path(path).read_text())


_SITE_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_sites(text: str) -> list[Site]:
    """Parse ``"(r,c) (r,c) ..."``."""
    sites = [(int(a), int(b)) for a, b in _SITE_RE.findall(text)]
    if _SITE_RE.sub("", text).strip():
        raise ValueError(f"malformed site list: {text!r}")
    return sites


def build_catalog(
    m: int, n: int, k_max: int, available_partitions: int, fill: bool = False
) -> PatchCatalog:
    """Assign patch indices to every canonical pattern with 1..k_max sites.

    With ``fill=True`` leftover partitions are given to level ``k_max + 1``
    patterns in enumeration order.
    """
    if available_partitions < 1:
        raise DomainError("available_partitions must be >= 1")
    required = partition_total(m, n, k_max)
    if required > available_partitions:
        raise CapacityError(
            f"{m}x{n} sub-array with k_max={k_max} needs {required} partitions, "
            f"only {available_partitions} available",
            required=required,
            available=available_partitions,
        )
    cat = PatchCatalog(sub_m=m, sub_n=n, k_max=k_max)
    idx = 0
    for k in range(1, k_max + 1):
        for p in enumerate_canonical_patterns(m, n, k):
            cat.entries[p] = idx
            idx += 1
    if fill and k_max < m * n:
        for p in enumerate_canonical_patterns(m, n, k_max + 1):
            if idx >= available_partitions:
                break
            cat.entries[p] = idx
            idx += 1
            cat.n_partial += 1
    return cat
