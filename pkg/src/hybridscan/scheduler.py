"""Compile gate layers into timed scanner control schedules.

Configuration 1 walks through the SLM patches of a frame, paying an SLM
frame load every ``partitions_x * partitions_y`` layers and an AOD A/B burst
settle before every layer. Configuration 2 never reloads the SLM: each layer
picks a catalog patch and AOD C moves its image, so every layer costs one
transition time.

Events live on channels: ``slm`` (frame loads), ``aod`` (settles) and
``beam<i>`` (gate windows, one channel per multi-tone replica). Events are
emitted strictly in sequence, so each channel is gap-free and ordered.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import CapacityError, DomainError, PatternNotAddressableError
from .geometry import ScannerParams, config1_report, config2_report
from .optics.tones import Tone, multi_tone_replicate
from .partitions import AddressPattern, PatchCatalog, canonicalize, parse_sites

#: RF centre frequency of each AOD C axis when none is given (Hz).
AOD_C_CENTER = 100e6


class EventKind(str, Enum):
    SLM_FRAME_LOAD = "slm_frame_load"
    AOD_SETTLE = "aod_settle"
    GATE_WINDOW = "gate_window"


@dataclass(frozen=True)
class ToneReplication:
    """Multi-tone drive: ``nx x ny`` copies spaced ``pitch`` sites apart."""

    nx: int
    ny: int
    pitch: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1 or self.pitch < 1:
            raise DomainError("tone counts and replica pitch must be >= 1")

    @property
    def count(self) -> int:
        return self.nx * self.ny


@dataclass(frozen=True)
class GateLayer:
    pattern: AddressPattern
    gate_duration: float = 0.0
    tone_replication: Optional[ToneReplication] = None
    layer_id: str = ""

    def __post_init__(self):
        if not isinstance(self.pattern, AddressPattern):
            object.__setattr__(self, "pattern", AddressPattern(self.pattern))
        if any(r < 0 or c < 0 for r, c in self.pattern):
            raise DomainError(f"negative site index in layer {self.layer_id!r}")
        if not self.gate_duration >= 0:
            raise DomainError("gate_duration must be >= 0")


@dataclass(frozen=True)
class Event:
    start: float
    duration: float
    kind: EventKind
    payload: str
    channel: str
    frequency_offset: Optional[float] = None

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class Timeline:
    events: tuple[Event, ...]
    mode: str
    n_layers: int
    n_frames: int = 0
    total_time: float = 0.0

    def __post_init__(self):
        end = max((e.end for e in self.events), default=0.0)
        if not math.isclose(end, self.total_time, rel_tol=1e-12, abs_tol=1e-18):
            raise DomainError(f"total_time {self.total_time!r} does not match last event end {end!r}")

    @property
    def average_rate(self) -> float:
        t = self.total_time
        return self.n_layers / t if t > 0 else math.inf

    def of_kind(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind is kind]

    @property
    def frequency_offsets(self) -> list[Optional[float]]:
        """Beam frequency offset of each gate window, in event order."""
        return [e.frequency_offset for e in self.of_kind(EventKind.GATE_WINDOW)]

    def channels(self) -> dict[str, list[Event]]:
        out: dict[str, list[Event]] = {}
        for e in self.events:
            out.setdefault(e.channel, []).append(e)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["start_s", "duration_s", "kind", "payload"])
        for e in self.events:
            w.writerow([f"{e.start:.9e}", f"{e.duration:.9e}", e.kind.value, e.payload])
        buf.write(f"# mode,{self.mode}\n")
        buf.write(f"# layers,{self.n_layers}\n")
        buf.write(f"# total_time_s,{self.total_time:.9e}\n")
        buf.write(f"# average_rate_per_s,{self.average_rate:.6e}\n")
        buf.write(f"# frame_count,{self.n_frames}\n")
        return buf.getvalue()


class _Builder:
    # exact running clock so long schedules do not drift from the closed form
    def __init__(self):
        self.t = Fraction(0)
        self.events: list[Event] = []

    def add(self, duration, kind, payload, channel, frequency_offset=None):
        self.parallel(duration, kind, [(payload, channel, frequency_offset)])

    def parallel(self, duration, kind, items):
        """Simultaneous events on distinct channels; time advances once."""
        start = float(self.t)
        for payload, channel, f in items:
            self.events.append(Event(start, float(duration), kind, payload, channel, f))
        self.t += Fraction(duration)


def _label(layer: GateLayer, i: int) -> str:
    return layer.layer_id or str(i)


def _check_layers(layers):
    layers = list(layers)
    if not layers:
        raise DomainError("need at least one layer")
    return layers


# -- Configuration 1 -------------------------------------------------------


def compile_config1(layers: Iterable[GateLayer], params: ScannerParams, n_q: Optional[int] = None) -> Timeline:
    """Schedule layers through the SLM patches, in arrival order.

    Every frame starts with an SLM load (the first one included); each
    layer then costs one burst settle plus its gate window. ``n_q`` is the
    array dimension used for the burst time (default: the largest a patch
    supports).
    """
    layers = _check_layers(layers)
    rep = config1_report(params, n_q=n_q)
    dim = rep.n_q
    if dim > rep.n_q_max:
        raise CapacityError(
            f"{dim}x{dim} array exceeds the {rep.n_q_max}x{rep.n_q_max} a patch can address",
            required=dim, available=rep.n_q_max,
        )
    per_frame = params.n_partitions
    b = _Builder()
    for i, layer in enumerate(layers):
        name = _label(layer, i)
        if layer.tone_replication is not None:
            raise DomainError(f"layer {name}: tone replication needs configuration 2")
        if any(r >= dim or c >= dim for r, c in layer.pattern):
            raise CapacityError(
                f"layer {name} addresses sites outside the {dim}x{dim} array",
                required=max(max(r, c) for r, c in layer.pattern) + 1, available=dim,
            )
        patch = i % per_frame
        if patch == 0:
            b.add(1.0 / params.r_slm, EventKind.SLM_FRAME_LOAD, f"frame {i // per_frame}", "slm")
        b.add(rep.burst_time, EventKind.AOD_SETTLE, f"patch {patch} layer {name}", "aod")
        b.add(layer.gate_duration, EventKind.GATE_WINDOW, f"layer {name}", "beam0")
    n_frames = -(-len(layers) // per_frame)
    return Timeline(tuple(b.events), "c1", len(layers), n_frames, float(b.t))


# -- Configuration 2 -------------------------------------------------------


def decompose_layer(pattern, sub_m: int, sub_n: Optional[int] = None) -> tuple[AddressPattern, tuple[int, int]]:
    """Canonical pattern and the offset AOD C must add to reproduce ``pattern``."""
    sub_n = sub_m if sub_n is None else sub_n
    canon, offset = canonicalize(pattern)
    rows, cols = canon.extent
    if rows > sub_m or cols > sub_n:
        raise PatternNotAddressableError(
            f"pattern spans {rows}x{cols} sites, more than the {sub_m}x{sub_n} sub-array"
        )
    return canon, offset


@dataclass(frozen=True)
class AodDrive:
    """RF drive of the two AOD C axes.

    A site at column ``x`` takes the x tone ``center_x + (x - mid) * step_x``
    and likewise in y, with ``mid`` the array centre. ``order`` is the
    diffraction order (+1 up-shifts the light, -1 down-shifts it).
    """

    step_x: float
    step_y: float
    center_x: float = AOD_C_CENTER
    center_y: float = AOD_C_CENTER
    n_q: int = 1
    order: int = 1

    @classmethod
    def for_params(cls, params: ScannerParams, n_q: int, order: int = 1, **kw) -> "AodDrive":
        """Steps from the AOD bandwidth ``tbw / t_aod`` spread over ``n_q`` sites.

        The y step is detuned by ``(2 n_q + 1) / (2 n_q)``: with equal steps
        the replicas (f1x, f2y) and (f2x, f1y) of a square tone grid would
        carry the same summed shift.
        """
        step = params.tbw / params.t_aod / n_q
        return cls(step, step * (2 * n_q + 1) / (2 * n_q), n_q=n_q, order=order, **kw)

    def tone_x(self, col: int) -> Tone:
        return Tone(col, self.center_x + (col - (self.n_q - 1) / 2) * self.step_x)

    def tone_y(self, row: int) -> Tone:
        return Tone(row, self.center_y + (row - (self.n_q - 1) / 2) * self.step_y)

    def shift(self, fx: float, fy: float) -> float:
        return self.order * (fx + fy)


def compile_config2(
    layers: Iterable[GateLayer],
    catalog: PatchCatalog,
    params: ScannerParams,
    sub_m: Optional[int] = None,
    sub_n: Optional[int] = None,
    drive: Optional[AodDrive] = None,
) -> Timeline:
    """One transition settle plus the gate window(s) per layer; no SLM loads.

    A layer with tone replication fans out into one gate window per
    replica, all starting together on their own beam channel.
    """
    layers = _check_layers(layers)
    sub_m = catalog.sub_m if sub_m is None else sub_m
    sub_n = catalog.sub_n if sub_n is None else sub_n
    rep = config2_report(params, sub_m, sub_n)
    dim = rep.n_q
    drive = drive or AodDrive.for_params(params, dim)
    b = _Builder()
    for i, layer in enumerate(layers):
        name = _label(layer, i)
        canon, (r0, c0) = decompose_layer(layer.pattern, sub_m, sub_n)
        idx = catalog.index_of(canon)
        tr = layer.tone_replication or ToneReplication(1, 1, 1)
        tx = [drive.tone_x(c0 + j * tr.pitch) for j in range(tr.nx)]
        ty = [drive.tone_y(r0 + j * tr.pitch) for j in range(tr.ny)]
        replicas = multi_tone_replicate(tx, ty, canon)
        for rp in replicas:
            if any(r >= dim or c >= dim for r, c in rp.pattern):
                raise PatternNotAddressableError(
                    f"layer {name}: replica at {rp.offset} leaves the {dim}x{dim} array"
                )
        b.add(rep.transition_time, EventKind.AOD_SETTLE, f"patch {idx} offset ({r0},{c0})", "aod")
        b.parallel(
            layer.gate_duration,
            EventKind.GATE_WINDOW,
            [
                (f"layer {name} replica ({rp.offset[0]},{rp.offset[1]})", f"beam{j}", drive.order * rp.frequency_shift)
                for j, rp in enumerate(replicas)
            ],
        )
    return Timeline(tuple(b.events), "c2", len(layers), 0, float(b.t))


# -- frequency bookkeeping -------------------------------------------------


def aom_shift(drive_frequency: float, double_pass: bool = False) -> float:
    """Optical frequency shift of an AOM; a double pass shifts twice."""
    return drive_frequency * (2 if double_pass else 1)


@dataclass(frozen=True)
class FrequencyBudget:
    """Net beam offsets after compensation, grouped per gate window start."""

    net: tuple[tuple[float, ...], ...]

    @property
    def max_abs(self) -> list[float]:
        return [max(abs(f) for f in g) for g in self.net]


def frequency_budget(timeline: Timeline, compensation: float) -> FrequencyBudget:
    """Subtract the total AOM compensation (Hz) from each beam's AOD shift.

    ``compensation`` is the optical shift, so a double-pass AOM enters as
    ``aom_shift(f, double_pass=True)``. Gate windows without a recorded
    offset are skipped.
    """
    groups: dict[float, list[float]] = {}
    for e in timeline.of_kind(EventKind.GATE_WINDOW):
        if e.frequency_offset is not None:
            groups.setdefault(e.start, []).append(e.frequency_offset - compensation)
    return FrequencyBudget(tuple(tuple(v) for _, v in sorted(groups.items())))


def two_photon_detuning(a: FrequencyBudget, b: FrequencyBudget) -> list[tuple[float, ...]]:
    """Beam-by-beam sum of two scanners' net offsets (counter-shifted pairs cancel)."""
    if [len(g) for g in a.net] != [len(g) for g in b.net]:
        raise DomainError("budgets have different beam structure")
    return [tuple(x + y for x, y in zip(ga, gb)) for ga, gb in zip(a.net, b.net)]


# -- layer files -----------------------------------------------------------

_TONES_RE = re.compile(r"^(\d+)\s*x\s*(\d+)\s*@\s*(\d+)$")


def parse_layer_line(line: str) -> GateLayer:
    """``layer <id>; sites (r,c) ...; duration <s>[; tones <nx>x<ny>@<pitch>]``."""
    fields: dict[str, str] = {}
    for part in line.split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, value = part.partition(" ")
        if key in fields:
            raise ValueError(f"duplicate field {key!r} in {line!r}")
        fields[key] = value.strip()
    unknown = set(fields) - {"layer", "sites", "duration", "tones"}
    if unknown or "layer" not in fields or "sites" not in fields:
        raise ValueError(f"malformed layer line: {line!r}")
    tones = None
    if "tones" in fields:
        m = _TONES_RE.match(fields["tones"])
        if not m:
            raise ValueError(f"malformed tones field: {fields['tones']!r}")
        tones = ToneReplication(*(int(g) for g in m.groups()))
    return GateLayer(
        AddressPattern(parse_sites(fields["sites"])),
        float(fields.get("duration", 0.0)),
        tones,
        fields["layer"],
    )


def parse_layers(text: str) -> list[GateLayer]:
    """Parse a layer document; blank lines and ``#`` comments are ignored."""
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_layer_line(line))
        except (ValueError, DomainError) as exc:
            raise ValueError(f"line {n}: {exc}") from None
    return out


def format_layers(layers: Sequence[GateLayer]) -> str:
    lines = []
    for i, layer in enumerate(layers):
        s = f"layer {_label(layer, i)}; sites {layer.pattern}; duration {layer.gate_duration!r}"
        tr = layer.tone_replication
        if tr is not None:
            s += f"; tones {tr.nx}x{tr.ny}@{tr.pitch}"
        lines.append(s)
    return "\n".join(lines) + "\n"
