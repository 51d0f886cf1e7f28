"""Time the numba kernels against their numpy twins, and the two lens routes.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--csv out.csv]

Sizes match the desk-scale 64-px hologram benchmark (2^12 grid, 4 samples
per SLM pixel). Each kernel is run once before timing so numba's compile
time is excluded; it is reported separately.
"""

import argparse
import csv
import sys
import time

import numpy as np

from hybridscan import _kernels
from hybridscan.optics.fields import FieldGrid, Window, lens_fourier
from hybridscan.optics.simulate import SimulationSettings, build_patch


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(rng):
    phase = rng.uniform(0, 2 * np.pi, (256, 256))
    vals = rng.random((700, 700))
    rows = rng.uniform(50, 650, 16)
    cols = rng.uniform(50, 650, 16)
    i_t = rng.random((700, 700)) + 0.01
    i_out = rng.random((700, 700))
    owner = rng.integers(-1, 4, (700, 700)).astype(np.int64)
    return {
        "block_phase_mean 256^2/4": ("block_phase_mean", (phase, 4)),
        "disk_sums 700^2 x16 r=40": ("disk_sums", (vals, rows, cols, 40.0)),
        "relative_rms 700^2": ("relative_rms", (i_out, i_t, owner, 4)),
        "count_anchored 4x4 k=4": ("count_anchored", (4, 4, 4)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--csv", help="also write results here")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    rows = []
    if not _kernels.JIT_AVAILABLE:
        print("numba not installed; timing numpy only", file=sys.stderr)
    for label, (name, a) in kernel_cases(rng).items():
        f_np = getattr(_kernels, f"{name}_numpy")
        f_jit = getattr(_kernels, f"{name}_jit")
        t_np = best_of(lambda: f_np(*a), args.repeat)
        t0 = time.perf_counter()
        f_jit(*a)
        t_compile = time.perf_counter() - t0
        t_jit = best_of(lambda: f_jit(*a), args.repeat) if _kernels.JIT_AVAILABLE else float("nan")
        rows.append((label, t_np, t_jit, t_compile))

    # lens transform: matrix DFT on the patch window vs full-grid FFT
    model = build_patch(SimulationSettings(), 64, [(3, 3)])
    field = model.input_field
    win = model.target.window
    full = FieldGrid(field.embedded(), field.pitch, field.plane, field.n)
    s = model.settings
    t_win = best_of(lambda: lens_fourier(field, s.focal_length, s.wavelength, window=win), args.repeat)
    t_fft = best_of(lambda: lens_fourier(full, s.focal_length, s.wavelength, window=win), max(1, args.repeat // 2))
    rows.append(("lens 2^12: windowed DFT vs full FFT", t_fft, t_win, 0.0))

    print(f"{'case':40s} {'numpy/fft ms':>12s} {'numba/win ms':>12s} {'speedup':>8s} {'compile s':>9s}")
    for label, a, b, c in rows:
        print(f"{label:40s} {a * 1e3:12.3f} {b * 1e3:12.3f} {a / b:8.1f} {c:9.2f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "baseline_s", "fast_s", "first_call_s"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
