"""Fourier-optics model of SLM phase holograms for qubit-array addressing."""

from .fields import FieldGrid, Plane, Window, flattop_field, gaussian_field, lens_fourier, lens_inverse
from .hologram import PhaseMask, apply_mask, gs_refine, make_hologram, quantize_phase
from .metrics import HologramMetrics, TargetSpec, propagate_and_measure, target_field
from .simulate import DEFAULT_TARGET_SETS, SimulationSettings, build_patch, run_patch, sweep_pixels
from .tones import Replica, Tone, multi_tone_replicate

__all__ = [
    "FieldGrid", "Plane", "Window", "flattop_field", "gaussian_field", "lens_fourier", "lens_inverse",
    "PhaseMask", "apply_mask", "gs_refine", "make_hologram", "quantize_phase",
    "HologramMetrics", "TargetSpec", "propagate_and_measure", "target_field",
    "DEFAULT_TARGET_SETS", "SimulationSettings", "build_patch", "run_patch", "sweep_pixels",
    "Replica", "Tone", "multi_tone_replicate",
]
