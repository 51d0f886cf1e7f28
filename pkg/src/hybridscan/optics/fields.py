"""Sampled scalar fields and the paraxial lens (Fourier) transform.

A :class:`FieldGrid` lives on a virtual ``n x n`` grid centred on the optical
axis; it may store only a rectangular window of that grid (everything
outside is zero). The lens transform has two routes that compute the same
centred, unitary DFT bins:

* full grid: ``numpy.fft`` on the embedded ``n x n`` array;
* windowed: an explicit DFT from the stored window to a requested output
  window, ``W_rows @ E @ W_cols.T``.

The windowed route makes 2**13 grids cheap when the field support and the
region of interest are both small (an SLM patch and a qubit array).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from ..errors import DomainError, SamplingError


class Plane(str, Enum):
    SLM = "SLM_plane"
    ARRAY = "array_plane"

    def flipped(self) -> "Plane":
        return Plane.ARRAY if self is Plane.SLM else Plane.SLM


class Window(NamedTuple):
    """Rectangular block of the virtual grid: top-left index and shape."""

    row0: int
    col0: int
    rows: int
    cols: int

    @classmethod
    def full(cls, n):
        return cls(0, 0, n, n)

    @classmethod
    def centered(cls, n, size):
        """``size x size`` block centred on index ``n // 2``."""
        if size > n:
            raise DomainError(f"window of {size} samples exceeds the {n}-sample grid")
        start = n // 2 - size // 2
        return cls(start, start, size, size)

    @classmethod
    def covering(cls, n, pitch, y_range, x_range):
        """Smallest block containing the physical box ``y_range x x_range``."""
        i0 = int(np.floor(y_range[0] / pitch)) + n // 2
        i1 = int(np.ceil(y_range[1] / pitch)) + n // 2
        j0 = int(np.floor(x_range[0] / pitch)) + n // 2
        j1 = int(np.ceil(x_range[1] / pitch)) + n // 2
        if i0 < 0 or j0 < 0 or i1 >= n or j1 >= n:
            raise DomainError("requested region lies outside the field of view")
        return cls(i0, j0, i1 - i0 + 1, j1 - j0 + 1)

    @property
    def slices(self):
        return slice(self.row0, self.row0 + self.rows), slice(self.col0, self.col0 + self.cols)


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Complex field samples on (a window of) an ``n x n`` grid.

    ``samples[i, j]`` sits at ``y = (window.row0 + i - n/2) * pitch`` and
    ``x = (window.col0 + j - n/2) * pitch``.
    """

    samples: np.ndarray
    pitch: float
    plane: Plane = Plane.SLM
    n: Optional[int] = None
    window: Optional[Window] = None

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2:
            raise DomainError("field samples must be 2-D")
        n = self.n if self.n is not None else s.shape[0]
        if n < 2 or n & (n - 1):
            raise DomainError(f"grid size must be a power of two, got {n}")
        win = self.window if self.window is not None else Window(0, 0, *s.shape)
        if (win.rows, win.cols) != s.shape:
            raise DomainError(f"window {win} does not match samples of shape {s.shape}")
        if win.row0 < 0 or win.col0 < 0 or win.row0 + win.rows > n or win.col0 + win.cols > n:
            raise DomainError(f"window {win} exceeds the {n}x{n} grid")
        if not self.pitch > 0:
            raise DomainError("pitch must be > 0")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "window", win)

    @property
    def is_full(self) -> bool:
        return self.window == Window.full(self.n)

    def coords(self):
        """Physical (y, x) coordinate vectors of the stored samples."""
        w = self.window
        y = (np.arange(w.row0, w.row0 + w.rows) - self.n // 2) * self.pitch
        x = (np.arange(w.col0, w.col0 + w.cols) - self.n // 2) * self.pitch
        return y, x

    def power(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.pitch**2)

    def intensity(self) -> np.ndarray:
        """Power per sample."""
        return np.abs(self.samples) ** 2 * self.pitch**2

    def embedded(self) -> np.ndarray:
        """Samples placed on the full ``n x n`` grid."""
        if self.is_full:
            return self.samples
        out = np.zeros((self.n, self.n), dtype=np.result_type(self.samples, np.complex64))
        out[self.window.slices] = self.samples
        return out

    def cropped(self, window: Window) -> "FieldGrid":
        """Restrict to ``window`` (zero where it leaves the stored block)."""
        out = np.zeros((window.rows, window.cols), dtype=self.samples.dtype)
        w = self.window
        r0, r1 = max(window.row0, w.row0), min(window.row0 + window.rows, w.row0 + w.rows)
        c0, c1 = max(window.col0, w.col0), min(window.col0 + window.cols, w.col0 + w.cols)
        if r0 < r1 and c0 < c1:
            out[r0 - window.row0 : r1 - window.row0, c0 - window.col0 : c1 - window.col0] = (
                self.samples[r0 - w.row0 : r1 - w.row0, c0 - w.col0 : c1 - w.col0]
            )
        return replace(self, samples=out, window=window)

    def scaled(self, factor) -> "FieldGrid":
        return replace(self, samples=self.samples * factor)

    def normalized(self) -> "FieldGrid":
        p = self.power()
        if p <= 0:
            raise DomainError("cannot normalise a zero field")
        return self.scaled(1.0 / np.sqrt(p))


def _check_center(n, pitch, center):
    half = n * pitch / 2
    if not all(-half <= c < half for c in center):
        raise DomainError(f"centre {center} lies outside the grid")


def gaussian_field(n, pitch, waist, center=(0.0, 0.0), window=None, plane=Plane.SLM) -> FieldGrid:
    """Unit-power Gaussian, amplitude ``exp(-r**2 / waist**2)``; ``center`` is (y, x)."""
    if not waist > 0:
        raise DomainError("waist must be > 0")
    if waist < 2 * pitch:
        raise SamplingError(f"waist {waist:g} is below two samples ({2 * pitch:g})")
    _check_center(n, pitch, center)
    win = window if window is not None else Window.full(n)
    tmp = FieldGrid(np.zeros((win.rows, win.cols)), pitch, plane, n, win)
    y, x = tmp.coords()
    ay = np.exp(-((y - center[0]) ** 2) / waist**2)
    ax = np.exp(-((x - center[1]) ** 2) / waist**2)
    return replace(tmp, samples=np.outer(ay, ax).astype(complex)).normalized()


def flattop_profile(u, half_side, pitch, rolloff=True):
    """1-D flattop, optionally with a one-sample raised-cosine edge."""
    a = np.abs(u)
    if not rolloff:
        return np.where(a <= half_side, 1.0, 0.0)
    lo = half_side - pitch / 2
    out = np.where(a <= lo, 1.0, 0.0)
    edge = (a > lo) & (a < lo + pitch)
    out[edge] = 0.5 * (1 + np.cos(np.pi * (a[edge] - lo) / pitch))
    return out


def flattop_field(
    n, pitch, side, center=(0.0, 0.0), window=None, plane=Plane.SLM, rolloff=True
) -> FieldGrid:
    """Unit-power square flattop of the given side; ``center`` is (y, x).

    ``rolloff`` softens the edges over one sample to limit ringing in the
    transform of the sampled square.
    """
    if side < 4 * pitch:
        raise SamplingError(f"flattop side {side:g} is below four samples")
    if side > n * pitch:
        raise DomainError("flattop side exceeds the grid")
    _check_center(n, pitch, center)
    win = window if window is not None else Window.full(n)
    tmp = FieldGrid(np.zeros((win.rows, win.cols)), pitch, plane, n, win)
    y, x = tmp.coords()
    prof = np.outer(
        flattop_profile(y - center[0], side / 2, pitch, rolloff),
        flattop_profile(x - center[1], side / 2, pitch, rolloff),
    )
    return replace(tmp, samples=prof.astype(complex)).normalized()


# -- lens transform --------------------------------------------------------


def fourier_pitch(n, pitch, focal_length, wavelength):
    """Sample pitch in the conjugate plane of a lens."""
    return wavelength * focal_length / (n * pitch)


def _dft_matrix(n, out_start, out_len, in_start, in_len, sign):
    u = np.arange(out_start, out_start + out_len, dtype=np.int64) - n // 2
    x = np.arange(in_start, in_start + in_len, dtype=np.int64) - n // 2
    # reduce mod n before scaling so large grids keep full phase precision
    prod = np.mod(np.outer(u, x), n)
    return np.exp(sign * 2j * np.pi * prod / n) / np.sqrt(n)


def windowed_dft(samples, n, window: Window, out_window: Window, inverse=False):
    """Centred unitary 2-D DFT of a windowed block, evaluated on ``out_window``."""
    sign = 1 if inverse else -1
    wr = _dft_matrix(n, out_window.row0, out_window.rows, window.row0, window.rows, sign)
    wc = _dft_matrix(n, out_window.col0, out_window.cols, window.col0, window.cols, sign)
    return wr @ samples @ wc.T


def full_dft(samples, inverse=False):
    """Centred unitary 2-D DFT of a full grid via FFT."""
    f = np.fft.ifft2 if inverse else np.fft.fft2
    return np.fft.fftshift(f(np.fft.ifftshift(samples), norm="ortho"))


def _transform(field: FieldGrid, focal_length, wavelength, window, inverse):
    out_pitch = fourier_pitch(field.n, field.pitch, focal_length, wavelength)
    gain = field.pitch / out_pitch
    if window is None:
        out = full_dft(field.embedded(), inverse) * gain
        return FieldGrid(out, out_pitch, field.plane.flipped(), field.n)
    if field.is_full:
        out = full_dft(field.samples, inverse)[window.slices] * gain
    else:
        out = windowed_dft(field.samples, field.n, field.window, window, inverse) * gain
    return FieldGrid(out, out_pitch, field.plane.flipped(), field.n, window)


def lens_fourier(field: FieldGrid, focal_length, wavelength, window: Optional[Window] = None) -> FieldGrid:
    """Propagate through a lens to its back focal plane (paraxial).

    Output pitch is ``wavelength * focal_length / (n * pitch)``. Power is
    conserved over the full output grid. With ``window`` only that block of
    the output is computed.
    """
    return _transform(field, focal_length, wavelength, window, inverse=False)


def lens_inverse(field: FieldGrid, focal_length, wavelength, window: Optional[Window] = None) -> FieldGrid:
    """Back-propagate from the focal plane to the front plane; inverse of :func:`lens_fourier`."""
    return _transform(field, focal_length, wavelength, window, inverse=True)
