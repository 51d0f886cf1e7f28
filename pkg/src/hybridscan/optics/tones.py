"""Image replication by multi-tone driving of a crossed AOD pair."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import DomainError
from ..partitions import AddressPattern


@dataclass(frozen=True)
class Tone:
    """One RF tone: the site displacement it produces and its acoustic frequency (Hz)."""

    displacement: int
    frequency: float


@dataclass(frozen=True)
class Replica:
    offset: tuple[int, int]
    frequency_shift: float
    pattern: AddressPattern


def multi_tone_replicate(
    offsets_x: Sequence[Tone], offsets_y: Sequence[Tone], base_pattern
) -> list[Replica]:
    """Every (x tone, y tone) pair diffracts one copy of the pattern.

    The copy is displaced by both tones and frequency-shifted by the sum of
    their frequencies. Order: y tones outer, x tones inner.
    """
    if not offsets_x or not offsets_y:
        raise DomainError("need at least one tone per axis")
    if not isinstance(base_pattern, AddressPattern):
        base_pattern = AddressPattern(base_pattern)
    out = []
    for ty in offsets_y:
        for tx in offsets_x:
            off = (ty.displacement, tx.displacement)
            out.append(Replica(off, tx.frequency + ty.frequency, base_pattern.shifted(off)))
    return out
