"""Target arrays and hologram figures of merit (efficiency, accuracy, crosstalk)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import _kernels
from ..errors import DomainError
from ..partitions import AddressPattern
from .fields import FieldGrid, Plane, Window, flattop_profile, lens_fourier
from .hologram import PhaseMask, apply_mask

#: Radius, in target waists, of the disk whose power counts as "on site".
SITE_RADIUS = 1.5

#: Samples with target intensity below this fraction of the peak are left
#: out of the accuracy sum.
ACCURACY_FLOOR = 0.01


@dataclass(frozen=True)
class TargetSpec:
    """Targeted sites of an ``array_dim x array_dim`` qubit array.

    Site (i, j) is centred at ``y = (offset + i) * spacing`` and
    ``x = (offset + j) * spacing`` from the optical axis, where
    ``spacing = spacing_ratio * waist``. ``offset`` is in site spacings.
    """

    sites: AddressPattern
    waist: float
    array_dim: int = 4
    spacing_ratio: float = 3.0
    shape: str = "gaussian"
    side: Optional[float] = None
    offset: float = 1.0
    site_radius: float = SITE_RADIUS

    def __post_init__(self):
        if not isinstance(self.sites, AddressPattern):
            object.__setattr__(self, "sites", AddressPattern(self.sites))
        if not self.spacing_ratio > 0 or not self.waist > 0:
            raise DomainError("spacing_ratio and waist must be > 0")
        if self.shape not in ("gaussian", "flattop"):
            raise DomainError(f"unknown target shape {self.shape!r}")
        if self.shape == "flattop" and self.side is None:
            object.__setattr__(self, "side", 2.0 * self.waist)
        for r, c in self.sites:
            if not (0 <= r < self.array_dim and 0 <= c < self.array_dim):
                raise DomainError(f"site {(r, c)} outside the {self.array_dim}x{self.array_dim} array")

    @property
    def spacing(self) -> float:
        return self.spacing_ratio * self.waist

    def position(self, site) -> tuple[float, float]:
        r, c = site
        return (self.offset + r) * self.spacing, (self.offset + c) * self.spacing

    def all_sites(self):
        return [(r, c) for r in range(self.array_dim) for c in range(self.array_dim)]

    def region(self):
        """(y_range, x_range) of the array region: all sites plus half a spacing."""
        lo = (self.offset - 0.5) * self.spacing
        hi = (self.offset + self.array_dim - 0.5) * self.spacing
        return (lo, hi), (lo, hi)

    def window(self, n, pitch) -> Window:
        y, x = self.region()
        return Window.covering(n, pitch, y, x)


def target_field(spec: TargetSpec, n: int, pitch: float) -> FieldGrid:
    """Desired array-plane field: equal-power spots on the targeted sites, unit total power."""
    win = spec.window(n, pitch)
    tmp = FieldGrid(np.zeros((win.rows, win.cols), complex), pitch, Plane.ARRAY, n, win)
    y, x = tmp.coords()
    acc = np.zeros((win.rows, win.cols))
    for site in spec.sites:
        cy, cx = spec.position(site)
        if spec.shape == "gaussian":
            if spec.waist < 2 * pitch:
                raise DomainError("target waist is below two output samples")
            spot = np.outer(np.exp(-((y - cy) ** 2) / spec.waist**2), np.exp(-((x - cx) ** 2) / spec.waist**2))
        else:
            half = spec.side / 2
            # hard edges: a soft edge puts samples just above the accuracy floor
            spot = np.outer(flattop_profile(y - cy, half, pitch, False), flattop_profile(x - cx, half, pitch, False))
        acc += spot / np.sqrt(np.sum(spot**2))
    return FieldGrid(acc.astype(complex), pitch, Plane.ARRAY, n, win).normalized()


@dataclass(frozen=True)
class HologramMetrics:
    efficiency: float
    accuracy: float
    crosstalk: float
    site_efficiency: tuple[float, ...] = ()
    accuracy_samples: int = 0

    @property
    def out_of_array(self) -> float:
        """Input power reaching neither targeted nor untargeted site disks."""
        return 1.0 - self.efficiency - self.crosstalk


def site_centers(spec: TargetSpec, field: FieldGrid, sites):
    """Fractional (row, col) sample indices of site centres inside ``field``'s window."""
    w = field.window
    rows = np.array([spec.position(s)[0] / field.pitch + field.n // 2 - w.row0 for s in sites], float)
    cols = np.array([spec.position(s)[1] / field.pitch + field.n // 2 - w.col0 for s in sites], float)
    return rows, cols


def accuracy(out: FieldGrid, target: FieldGrid, spec: TargetSpec) -> tuple[float, int]:
    """Relative RMS intensity error over the targeted spots.

    Each spot is rescaled to carry the target's power; samples below
    :data:`ACCURACY_FLOOR` of the peak target intensity are skipped. Samples
    are assigned to the nearest targeted site.
    """
    if out.window != target.window:
        target = target.cropped(out.window)
    i_t = target.intensity()
    i_out = out.intensity()
    keep = i_t >= ACCURACY_FLOOR * i_t.max()
    rows, cols = site_centers(spec, out, spec.sites)
    rr = np.arange(out.window.rows)[:, None, None] - rows[None, None, :]
    cc = np.arange(out.window.cols)[None, :, None] - cols[None, None, :]
    owner = np.argmin(rr**2 + cc**2, axis=2).astype(np.int64)
    owner[~keep] = -1
    rms, count = _kernels.relative_rms(i_out, i_t, owner, len(rows))
    return float(rms), int(count)


def propagate_and_measure(
    input_field: FieldGrid,
    mask: PhaseMask,
    spec: TargetSpec,
    focal_length: float,
    wavelength: float,
    target: Optional[FieldGrid] = None,
) -> HologramMetrics:
    """Apply ``mask``, focus onto the array and score the result.

    Efficiency and crosstalk are powers inside ``site_radius``-waist disks on
    targeted and untargeted sites, as fractions of the power incident on
    the patch.
    """
    slm = apply_mask(input_field, mask)
    p_in = slm.power()
    n = slm.n
    out_pitch = wavelength * focal_length / (n * slm.pitch)
    win = spec.window(n, out_pitch)
    out = lens_fourier(slm, focal_length, wavelength, window=win)
    if target is None:
        target = target_field(spec, n, out_pitch)

    sites = spec.all_sites()
    rows, cols = site_centers(spec, out, sites)
    powers = _kernels.disk_sums(np.ascontiguousarray(out.intensity()), rows, cols, spec.site_radius * spec.waist / out_pitch)
    powers = powers / p_in
    targeted = set(spec.sites)
    site_eff = tuple(float(p) for s, p in zip(sites, powers) if s in targeted)
    crosstalk = float(sum(p for s, p in zip(sites, powers) if s not in targeted))
    eps, count = accuracy(out, target, spec)
    return HologramMetrics(
        efficiency=float(sum(site_eff)),
        accuracy=eps,
        crosstalk=crosstalk,
        site_efficiency=site_eff,
        accuracy_samples=count,
    )
