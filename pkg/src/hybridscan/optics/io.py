"""Binary portable graymap (P5, 16-bit) dumps of fields and masks.

Scaling:

* phase masks: ``round(phase / (2*pi) * 65535)``, one value per SLM pixel;
* intensities: linear, ``round(I / I.max() * 65535)`` (all-zero input
  stays zero).

Samples are written row-major, big-endian, maxval 65535.
"""

from __future__ import annotations

import numpy as np

from .._io import atomic_write_bytes
from .fields import FieldGrid
from .hologram import TWO_PI, PhaseMask

MAXVAL = 65535


def _pgm_bytes(levels: np.ndarray) -> bytes:
    rows, cols = levels.shape
    header = f"P5\n{cols} {rows}\n{MAXVAL}\n".encode("ascii")
    return header + levels.astype(">u2").tobytes()


def phase_levels(mask: PhaseMask) -> np.ndarray:
    return np.rint(np.mod(mask.phases, TWO_PI) / TWO_PI * MAXVAL).astype(np.uint16)


def intensity_levels(field: FieldGrid) -> np.ndarray:
    i = np.abs(field.samples) ** 2
    peak = i.max()
    if peak <= 0:
        return np.zeros(i.shape, np.uint16)
    return np.rint(i / peak * MAXVAL).astype(np.uint16)


def write_pgm(path, data) -> None:
    """Dump a :class:`PhaseMask` or the intensity of a :class:`FieldGrid`."""
    if isinstance(data, PhaseMask):
        levels = phase_levels(data)
    elif isinstance(data, FieldGrid):
        levels = intensity_levels(data)
    else:
        raise TypeError(f"cannot dump {type(data).__name__} as a graymap")
    atomic_write_bytes(path, _pgm_bytes(levels))


def read_pgm(path) -> np.ndarray:
    """Read back a file written by :func:`write_pgm`."""
    raw = open(path, "rb").read()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5" or int(parts[2]) != MAXVAL:
        raise ValueError(f"{path}: not a 16-bit binary graymap")
    cols, rows = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=">u2").reshape(rows, cols).astype(np.uint16)
