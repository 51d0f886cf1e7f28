"""Closed-form performance model of the hybrid AOD + SLM scanner.

All functions return real-valued results. Conversion to a usable integer
count is a separate step (:func:`usable_count`) so the continuous formulas
can be checked exactly.

Configuration 1: AOD A selects an SLM patch, AOD B undoes the deflection,
every patch addresses the whole qubit array.
Configuration 2: patches address a small sub-array which AOD C positions
over a much larger array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .errors import DomainError

#: Added before flooring a resolvable-spot count (6.948 -> 7, 66.9 -> 67).
ROUNDING_SLACK = 0.1

#: Conservative SLM pixel budget per addressed site along one axis.
PIXELS_PER_SITE = 20


def _positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise DomainError(f"{name} must be > 0, got {v!r}")


def _non_negative(**values):
    for name, v in values.items():
        if not v >= 0:
            raise DomainError(f"{name} must be >= 0, got {v!r}")


def usable_count(value: float) -> int:
    """Integer count supported by a continuous estimate: ``floor(value + 0.1)``."""
    _non_negative(value=value)
    return int(math.floor(value + ROUNDING_SLACK))


@dataclass(frozen=True)
class ScannerParams:
    """Scanner design inputs. SI units throughout."""

    q_slm: float = 5.0
    q_a: float = 3.0
    q_aod_a: float = 52.0
    tbw: float = 575.0
    t_aod: float = 11.5e-6
    r_slm: float = 1.0e3
    wavelength: float = 459e-9
    focal_length: float = 23e-3
    slm_pixels_x: int = 1000
    slm_pixels_y: int = 1000
    partitions_x: int = 1
    partitions_y: int = 1
    q_aod_c: Optional[float] = None

    def __post_init__(self):
        _positive(
            q_slm=self.q_slm,
            q_a=self.q_a,
            q_aod_a=self.q_aod_a,
            tbw=self.tbw,
            t_aod=self.t_aod,
            r_slm=self.r_slm,
            wavelength=self.wavelength,
            focal_length=self.focal_length,
        )
        if self.q_aod_c is not None:
            _positive(q_aod_c=self.q_aod_c)
        for name in ("slm_pixels_x", "slm_pixels_y", "partitions_x", "partitions_y"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if self.partitions_x > self.slm_pixels_x or self.partitions_y > self.slm_pixels_y:
            raise DomainError("more partitions than SLM pixels along an axis")

    @property
    def patch_pixels_x(self) -> int:
        # leftover pixels when the SLM does not divide evenly are unused
        return self.slm_pixels_x // self.partitions_x

    @property
    def patch_pixels_y(self) -> int:
        return self.slm_pixels_y // self.partitions_y

    @property
    def n_partitions(self) -> int:
        return self.partitions_x * self.partitions_y

    def with_(self, **changes) -> "ScannerParams":
        return replace(self, **changes)


# -- Configuration 1 -------------------------------------------------------


def resolvable_spots(q_aod_a: float, q_slm: float, tbw: float) -> float:
    """Resolvable spots of AOD A across the SLM, ``pi * TBW / (q_aod_a * q_slm)``.

    This bounds the number of SLM partitions per axis; zero bandwidth gives 0.
    """
    _positive(q_aod_a=q_aod_a, q_slm=q_slm)
    _non_negative(tbw=tbw)
    return math.pi * tbw / (q_aod_a * q_slm)


def lens_waist(focal_length: float, wavelength: float, w_a: float) -> float:
    """Beam waist at the high-NA lens that focuses to ``w_a`` (far-field limit)."""
    _positive(focal_length=focal_length, wavelength=wavelength, w_a=w_a)
    return focal_length * wavelength / (math.pi * w_a)


def max_displacement(q_slm: float, w_lens: float, n_x: int, n_y: int) -> float:
    """Worst-case beam walk on the high-NA lens when AOD B is absent."""
    _positive(q_slm=q_slm)
    _non_negative(w_lens=w_lens)
    if n_x < 1 or n_y < 1:
        raise DomainError("partition counts must be >= 1")
    return q_slm * w_lens * math.hypot(n_x, n_y) / 2.0


def fringes_per_site(q_a: float, q_slm: float) -> float:
    """Full 2*pi fringes across a patch needed to move the focus by one site.

    Two SLM pixels per fringe at best, so at least ``2 * result`` pixels per site.
    """
    _positive(q_a=q_a, q_slm=q_slm)
    return q_a * q_slm / math.pi


def max_addressable_sites(n_pixels_axis: float, q_a: float, q_slm: float) -> float:
    """Sites addressable along one axis by a patch of ``n_pixels_axis`` pixels."""
    _positive(q_a=q_a, q_slm=q_slm)
    _non_negative(n_pixels_axis=n_pixels_axis)
    return math.pi * n_pixels_axis / (2.0 * q_a * q_slm)


def waist_at_atoms(focal_length: float, wavelength: float, q_slm: float, l_slm: float) -> float:
    """Focused waist in the qubit plane for a patch of side ``l_slm``."""
    _positive(focal_length=focal_length, wavelength=wavelength, q_slm=q_slm, l_slm=l_slm)
    return focal_length * wavelength * q_slm / (math.pi * l_slm)


def aod_b_aperture_ok(q_aod_a: float, q_a: float, n_q: int) -> bool:
    """True if an ``n_q``-site image (2-waist edge margin) fits AOD B's aperture."""
    _positive(q_aod_a=q_aod_a, q_a=q_a)
    if n_q < 1:
        raise DomainError(f"n_q must be >= 1, got {n_q!r}")
    return 4.0 + q_a * (n_q - 1) <= q_aod_a


def burst_time_c1(t_aod: float, q_a: float, n_q: int, q_aod_a: float) -> float:
    """Upper bound on the AOD A/B patch-to-patch transition time.

    Uses ``4 + q_a * n_q`` (not ``n_q - 1``); this is what the Configuration 1
    rate table was computed with.
    """
    _positive(t_aod=t_aod, q_a=q_a, n_q=n_q, q_aod_a=q_aod_a)
    return t_aod * (4.0 + q_a * n_q) / q_aod_a


def average_time_c1(partitions_x: int, partitions_y: int, r_slm: float, burst_time: float) -> float:
    """Mean time per pattern when every patch is used once per SLM frame."""
    _positive(partitions_x=partitions_x, partitions_y=partitions_y, r_slm=r_slm)
    _non_negative(burst_time=burst_time)
    return 1.0 / (partitions_x * partitions_y * r_slm) + burst_time


# -- Configuration 2 -------------------------------------------------------


def addressable_array_c2(q_aod_c: float, q_a: float, tbw: float) -> float:
    """Array dimension AOD C can sweep the sub-array across."""
    _positive(q_aod_c=q_aod_c, q_a=q_a)
    _non_negative(tbw=tbw)
    return math.pi * tbw / (q_aod_c * q_a)


class Deflector(str, Enum):
    AOD_B = "AOD_B"
    AOD_C = "AOD_C"


def transition_time_c2(
    t_aod_b: float, q_a: float, sub_m: int, q_aod_a: float, t_aod_c: float, q_aod_c: float
) -> tuple[float, Deflector]:
    """Scanner transition time in Configuration 2 and the deflector that sets it.

    The AOD B term spans the ``sub_m``-site sub-array image, i.e. uses
    ``sub_m - 1`` site spacings as in the clipping condition. Ties go to AOD C.
    """
    _positive(t_aod_b=t_aod_b, q_a=q_a, q_aod_a=q_aod_a, t_aod_c=t_aod_c, q_aod_c=q_aod_c)
    if sub_m < 1:
        raise DomainError(f"sub_m must be >= 1, got {sub_m!r}")
    t_b = t_aod_b * (4.0 + q_a * (sub_m - 1)) / q_aod_a
    t_c = 4.0 * t_aod_c / q_aod_c
    if t_c >= t_b:
        return t_c, Deflector.AOD_C
    return t_b, Deflector.AOD_B


# -- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class Config1Report:
    n_resolvable: float
    max_partitions_per_axis: int
    n_q_max: int
    n_q: int
    burst_time: float
    burst_rate: float
    average_time: float
    average_rate: float
    aperture_ok: bool


@dataclass(frozen=True)
class Config2Report:
    n_q: int
    n_q_exact: float
    transition_time: float
    transition_rate: float
    limiting_deflector: Deflector
    k_max: int = field(default=0)


def config1_report(
    params: ScannerParams, n_q: Optional[int] = None, pixels_per_site: int = PIXELS_PER_SITE
) -> Config1Report:
    """Configuration 1 figures of merit.

    ``n_q_max`` is the array dimension a patch supports at ``pixels_per_site``
    pixels per site along its smaller axis. Timing uses ``n_q`` when given,
    otherwise ``n_q_max``.
    """
    n_r = resolvable_spots(params.q_aod_a, params.q_slm, params.tbw)
    patch_px = min(params.patch_pixels_x, params.patch_pixels_y)
    n_q_max = patch_px // pixels_per_site
    if n_q is None:
        n_q = max(n_q_max, 1)
    t_burst = burst_time_c1(params.t_aod, params.q_a, n_q, params.q_aod_a)
    t_ave = average_time_c1(params.partitions_x, params.partitions_y, params.r_slm, t_burst)
    return Config1Report(
        n_resolvable=n_r,
        max_partitions_per_axis=usable_count(n_r),
        n_q_max=n_q_max,
        n_q=n_q,
        burst_time=t_burst,
        burst_rate=1.0 / t_burst,
        average_time=t_ave,
        average_rate=1.0 / t_ave,
        aperture_ok=aod_b_aperture_ok(params.q_aod_a, params.q_a, n_q),
    )


def config2_report(params: ScannerParams, sub_m: int, sub_n: Optional[int] = None) -> Config2Report:
    """Configuration 2 figures of merit for an ``sub_m x sub_n`` sub-array.

    ``k_max`` is the largest simultaneous site count whose full pattern set
    fits in the available SLM partitions (0 if not even single sites fit).
    """
    from .partitions import max_complete_k

    if params.q_aod_c is None:
        raise DomainError("q_aod_c is required for configuration 2")
    sub_n = sub_m if sub_n is None else sub_n
    n_exact = addressable_array_c2(params.q_aod_c, params.q_a, params.tbw)
    t, limiter = transition_time_c2(
        params.t_aod, params.q_a, sub_m, params.q_aod_a, params.t_aod, params.q_aod_c
    )
    return Config2Report(
        n_q=usable_count(n_exact),
        n_q_exact=n_exact,
        transition_time=t,
        transition_rate=1.0 / t,
        limiting_deflector=limiter,
        k_max=max_complete_k(sub_m, sub_n, params.n_partitions),
    )
