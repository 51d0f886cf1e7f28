"""End-to-end hologram simulations for an SLM patch addressing a small array."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from ..errors import DomainError
from .fields import FieldGrid, Plane, Window, flattop_field, gaussian_field, lens_inverse
from .hologram import PhaseMask, gs_refine, make_hologram, patch_window
from .metrics import HologramMetrics, TargetSpec, propagate_and_measure, target_field

#: Benchmark target sets on a 4x4 array, indexed by number of targets.
#: Chosen so that no two-site difference orders of the phase-only hologram
#: land on another array site (see README).
DEFAULT_TARGET_SETS = {
    1: ((3, 3),),
    2: ((0, 0), (3, 3)),
    3: ((0, 0), (3, 1), (1, 3)),
    4: ((0, 0), (3, 1), (1, 3), (3, 3)),
}

SWEEP_COLUMNS = ("pixels_per_axis", "n_targets", "shape", "efficiency", "accuracy", "crosstalk")


@dataclass(frozen=True)
class SimulationSettings:
    """Numerical and optical settings of a patch simulation.

    The defaults are the desk-scale model; :meth:`paper_fidelity` gives the
    2**13-sample, 5-samples-per-pixel protocol.
    """

    grid_exp: int = 12
    sim_per_slm: int = 4
    bits: Optional[int] = 10
    shape: str = "gaussian"
    q_slm: float = 5.0
    q_a: float = 3.0
    array_dim: int = 4
    array_offset: float = 1.0
    slm_pixel_pitch: float = 10e-6
    wavelength: float = 459e-9
    focal_length: float = 23e-3
    flattop_side: float = 2.0

    @classmethod
    def paper_fidelity(cls, **kw) -> "SimulationSettings":
        return cls(grid_exp=13, sim_per_slm=5, **kw)

    @property
    def n(self) -> int:
        return 2**self.grid_exp

    def with_(self, **changes) -> "SimulationSettings":
        return replace(self, **changes)


@dataclass(frozen=True)
class PatchModel:
    """Everything needed to synthesise and score one hologram."""

    settings: SimulationSettings
    slm_pixels: int
    input_field: FieldGrid
    target: FieldGrid
    spec: TargetSpec

    @property
    def waist_slm(self) -> float:
        return self.slm_pixels * self.settings.slm_pixel_pitch / self.settings.q_slm

    def hologram(self) -> PhaseMask:
        s = self.settings
        return make_hologram(
            self.input_field, self.target, self.slm_pixels, s.sim_per_slm, s.bits, s.focal_length, s.wavelength
        )

    def refine(self, mask: PhaseMask, iterations: int) -> PhaseMask:
        s = self.settings
        return gs_refine(self.input_field, self.target, mask, iterations, s.focal_length, s.wavelength)

    def measure(self, mask: PhaseMask) -> HologramMetrics:
        s = self.settings
        return propagate_and_measure(self.input_field, mask, self.spec, s.focal_length, s.wavelength, self.target)


def build_patch(settings: SimulationSettings, slm_pixels: int, sites: Iterable, **spec_kw) -> PatchModel:
    """Set up incident beam, target spec and target field for a patch of ``slm_pixels``.

    The beam waist on the SLM is ``patch side / q_slm``; the addressing waist
    in the array plane is its far-field conjugate. A flattop beam is
    modelled as the back-propagated on-axis flattop, as produced by a beam
    shaper ahead of the scanner.
    """
    s = settings
    if slm_pixels < 1:
        raise DomainError("slm_pixels must be >= 1")
    n = s.n
    win = patch_window(n, slm_pixels, s.sim_per_slm)
    dx = s.slm_pixel_pitch / s.sim_per_slm
    out_pitch = s.wavelength * s.focal_length / (n * dx)
    w_slm = slm_pixels * s.slm_pixel_pitch / s.q_slm
    w_a = s.focal_length * s.wavelength / (math.pi * w_slm)
    shape = spec_kw.pop("shape", s.shape)
    spec = TargetSpec(
        sites=tuple(sites),
        waist=w_a,
        array_dim=s.array_dim,
        spacing_ratio=s.q_a,
        shape=shape,
        side=s.flattop_side * w_a if shape == "flattop" else None,
        offset=s.array_offset,
        **spec_kw,
    )
    if shape == "gaussian":
        e_in = gaussian_field(n, dx, w_slm, window=win, plane=Plane.SLM)
    else:
        ft_win = Window.centered(n, _flattop_window(spec.side, out_pitch))
        spot = flattop_field(n, out_pitch, spec.side, window=ft_win, plane=Plane.ARRAY)
        e_in = lens_inverse(spot, s.focal_length, s.wavelength, window=win).normalized()
    tgt = target_field(spec, n, out_pitch)
    return PatchModel(s, slm_pixels, e_in, tgt, spec)


def _flattop_window(side, pitch):
    size = int(math.ceil(side / pitch)) + 4
    return size + (size % 2)


def run_patch(
    settings: SimulationSettings,
    slm_pixels: int,
    sites: Iterable,
    gs_iterations: int = 0,
) -> HologramMetrics:
    model = build_patch(settings, slm_pixels, sites)
    mask = model.hologram()
    if gs_iterations:
        mask = model.refine(mask, gs_iterations)
    return model.measure(mask)


@dataclass(frozen=True)
class SweepRow:
    pixels_per_axis: int
    n_targets: int
    shape: str
    efficiency: float
    accuracy: float
    crosstalk: float


def sweep_pixels(
    pixel_counts: Sequence[int],
    target_sets: Optional[dict] = None,
    shape: Optional[str] = None,
    settings: Optional[SimulationSettings] = None,
) -> list[SweepRow]:
    """Metrics for every (pixel count, target set) combination, in input order."""
    settings = settings or SimulationSettings()
    if shape is not None:
        settings = settings.with_(shape=shape)
    target_sets = target_sets or DEFAULT_TARGET_SETS
    if not pixel_counts or not target_sets:
        raise DomainError("sweep needs at least one pixel count and one target set")
    rows = []
    for px in pixel_counts:
        for key, sites in target_sets.items():
            m = run_patch(settings, px, sites)
            rows.append(SweepRow(px, len(sites), settings.shape, m.efficiency, m.accuracy, m.crosstalk))
    return rows


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r.pixels_per_axis, r.n_targets, r.shape, f"{r.efficiency:.6f}", f"{r.accuracy:.6f}", f"{r.crosstalk:.6f}"])
    return buf.getvalue()
