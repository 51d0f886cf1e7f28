"""Phase-hologram synthesis for one SLM patch."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .. import _kernels
from ..errors import DomainError
from .fields import FieldGrid, Window, lens_fourier, lens_inverse

TWO_PI = 2.0 * np.pi

#: Relative amplitude below which a sample's phase is taken as 0.
ZERO_AMPLITUDE = 1e-12


@dataclass(frozen=True, eq=False)
class PhaseMask:
    """SLM phases, one value per SLM pixel, in [0, 2*pi).

    ``bits=None`` marks an unquantised mask.
    """

    phases: np.ndarray
    sim_per_slm: int = 1
    bits: Optional[int] = None

    def __post_init__(self):
        p = np.asarray(self.phases, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DomainError("phase mask must be square")
        if self.sim_per_slm < 1:
            raise DomainError("sim_per_slm must be >= 1")
        object.__setattr__(self, "phases", p)

    @property
    def slm_pixels(self) -> int:
        return self.phases.shape[0]

    @property
    def size(self) -> int:
        """Side of the mask in simulation samples."""
        return self.slm_pixels * self.sim_per_slm

    def expanded(self) -> np.ndarray:
        s = self.sim_per_slm
        return np.repeat(np.repeat(self.phases, s, axis=0), s, axis=1)

    def levels(self) -> np.ndarray:
        """Integer phase levels (quantised masks only)."""
        if self.bits is None:
            raise ValueError("mask is not quantised")
        return np.rint(self.phases / (TWO_PI / 2**self.bits)).astype(np.int64)

    def __eq__(self, other):
        if not isinstance(other, PhaseMask):
            return NotImplemented
        return (
            self.sim_per_slm == other.sim_per_slm
            and self.bits == other.bits
            and np.array_equal(self.phases, other.phases)
        )


def quantize_phase(raw_phases, bits: Optional[int], sim_per_slm: int = 1) -> PhaseMask:
    """Round phases to the nearest of ``2**bits`` levels ``2*pi*j / 2**bits``."""
    raw = np.mod(np.asarray(raw_phases, dtype=float), TWO_PI)
    if bits is None:
        return PhaseMask(raw, sim_per_slm, None)
    if bits < 1:
        raise DomainError("bits must be >= 1")
    levels = 2**bits
    j = np.mod(np.rint(raw * (levels / TWO_PI)), levels)
    return PhaseMask(j * (TWO_PI / levels), sim_per_slm, bits)


def safe_angle(z) -> np.ndarray:
    """``arg(z)`` with the phase of near-zero samples set to 0."""
    z = np.asarray(z)
    amp = np.abs(z)
    peak = amp.max() if amp.size else 0.0
    ang = np.angle(z)
    ang[amp <= ZERO_AMPLITUDE * peak] = 0.0
    return ang


def patch_window(n, slm_pixels, sim_per_slm) -> Window:
    size = slm_pixels * sim_per_slm
    if size > n:
        raise DomainError(f"{slm_pixels} px x {sim_per_slm} samples exceeds the {n}-sample grid")
    return Window.centered(n, size)


def _input_on_patch(input_field: FieldGrid, win: Window) -> FieldGrid:
    return input_field if input_field.window == win else input_field.cropped(win)


def _check_pitch(input_field: FieldGrid, target_field: FieldGrid, focal_length, wavelength):
    if input_field.n != target_field.n:
        raise DomainError("input and target fields live on different grids")
    expected = wavelength * focal_length / (input_field.n * input_field.pitch)
    if abs(target_field.pitch / expected - 1) > 1e-9:
        raise DomainError(
            f"target pitch {target_field.pitch:g} is not the Fourier pitch {expected:g} of the input"
        )


def apply_mask(input_field: FieldGrid, mask: PhaseMask) -> FieldGrid:
    """Field just after the SLM patch. Light outside the patch is discarded."""
    win = patch_window(input_field.n, mask.slm_pixels, mask.sim_per_slm)
    e_in = _input_on_patch(input_field, win)
    return FieldGrid(e_in.samples * np.exp(1j * mask.expanded()), e_in.pitch, e_in.plane, e_in.n, win)


def pixel_phase(raw, sim_per_slm) -> np.ndarray:
    """Collapse a sample-resolution phase map to one phase per SLM pixel."""
    raw = np.ascontiguousarray(np.mod(raw, TWO_PI), dtype=float)
    if sim_per_slm == 1:
        return raw
    return _kernels.block_phase_mean(raw, sim_per_slm)


def make_hologram(
    input_field: FieldGrid,
    target_field: FieldGrid,
    slm_pixels: int,
    sim_per_slm: int,
    bits: Optional[int],
    focal_length: float,
    wavelength: float,
) -> PhaseMask:
    """Phase-difference hologram.

    The target is back-propagated to the SLM plane; the mask phase is its
    argument minus that of the incident field, averaged over each SLM pixel
    and quantised. No iteration.
    """
    _check_pitch(input_field, target_field, focal_length, wavelength)
    win = patch_window(input_field.n, slm_pixels, sim_per_slm)
    e_in = _input_on_patch(input_field, win)
    back = lens_inverse(target_field, focal_length, wavelength, window=win)
    raw = safe_angle(back.samples) - safe_angle(e_in.samples)
    return quantize_phase(pixel_phase(raw, sim_per_slm), bits, sim_per_slm)


def gs_refine(
    input_field: FieldGrid,
    target_field: FieldGrid,
    initial_mask: PhaseMask,
    iterations: int,
    focal_length: float,
    wavelength: float,
    callback: Optional[Callable[[int, FieldGrid], None]] = None,
) -> PhaseMask:
    """Gerchberg-Saxton refinement under the SLM pixel constraint.

    Alternates two projections:

    * array plane: inside the target's window (the qubit-array region) the
      amplitude is replaced by the target amplitude, rescaled to the power
      currently in the window; outside the window the field is left free;
    * SLM plane: incident amplitude with one phase per SLM pixel, the
      least-squares phase ``arg(sum(back * conj(E_in)))`` over each pixel.

    ``callback`` receives ``(iteration, slm_field)`` after each SLM-plane
    projection (before the first update for iteration 0).
    """
    if iterations < 0:
        raise DomainError("iterations must be >= 0")
    if iterations == 0:
        return initial_mask
    _check_pitch(input_field, target_field, focal_length, wavelength)
    s = initial_mask.sim_per_slm
    n_px = initial_mask.slm_pixels
    win = patch_window(input_field.n, n_px, s)
    e_in = _input_on_patch(input_field, win)
    target_amp = np.abs(target_field.samples)
    target_pow = float(np.sum(target_amp**2))
    phases = initial_mask.phases
    for it in range(iterations):
        slm = FieldGrid(
            e_in.samples * np.exp(1j * np.repeat(np.repeat(phases, s, 0), s, 1)),
            e_in.pitch, e_in.plane, e_in.n, win,
        )
        if callback is not None:
            callback(it, slm)
        out = lens_fourier(slm, focal_length, wavelength, window=target_field.window)
        amp = target_amp * np.sqrt(np.sum(np.abs(out.samples) ** 2) / target_pow)
        # the full-plane inverse of ``out`` is ``slm`` itself; only the window changes
        delta = replace(out, samples=amp * np.exp(1j * safe_angle(out.samples)) - out.samples)
        back = slm.samples + lens_inverse(delta, focal_length, wavelength, window=win).samples
        z = (back * np.conj(e_in.samples)).reshape(n_px, s, n_px, s).sum(axis=(1, 3))
        phases = np.mod(safe_angle(z), TWO_PI)
    return quantize_phase(phases, initial_mask.bits, s)
