"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from hybridscan import geometry as g
from hybridscan.geometry import ScannerParams
from hybridscan.optics.fields import FieldGrid, Plane, Window, gaussian_field, lens_fourier
from hybridscan.optics.simulate import DEFAULT_TARGET_SETS, SimulationSettings, build_patch, run_patch, sweep_pixels
from hybridscan.partitions import brute_force_count, build_catalog, partition_count, partition_total
from hybridscan.scheduler import (
    EventKind,
    GateLayer,
    ToneReplication,
    compile_config1,
    compile_config2,
    frequency_budget,
)

F, LAM, T_AOD = 23e-3, 459e-9, 11.5e-6


def test_criterion_1_lens_displacement(criterion):
    rows = [(1.5e-6, 2, 2.25, 16), (3e-6, 2, 1.12, 8), (1.5e-6, 15, 2.25, 119), (3e-6, 15, 1.12, 59)]
    worst = 0.0
    got = []
    for w_a, parts, w_lens_mm, d_mm in rows:
        w_lens = g.lens_waist(F, LAM, w_a)
        d = g.max_displacement(5, w_lens, parts, parts)
        worst = max(worst, abs(w_lens * 1e3 / w_lens_mm - 1), abs(d * 1e3 / d_mm - 1))
        got.append(f"{w_lens * 1e3:.2f}/{d * 1e3:.1f}")
    criterion(1, worst <= 0.02, f"w_lens/D_max mm {', '.join(got)}; worst rel err {worst:.4f} (tol 0.02)")


def test_criterion_2_config1_rates(criterion):
    rows = [((7, 7), 52, 39, 181, 0.02), ((5, 5), 70, 22, 190, 0.10), ((2, 2), 180, 4, 198, 0.02)]
    ok = True
    got = []
    for (px, py), q, avg_k, burst_k, tol in rows:
        rep = g.config1_report(ScannerParams(partitions_x=px, partitions_y=py, q_aod_a=q, r_slm=1e3))
        b, a = rep.burst_rate / 1e3, rep.average_rate / 1e3
        ok &= abs(b / burst_k - 1) <= tol and abs(a / avg_k - 1) <= 0.05
        got.append(f"{a:.1f}/{b:.1f}")
    criterion(2, ok, f"average/burst 1e3/s {', '.join(got)} vs 39/181, 22/190, 4/198")


def test_criterion_3_partition_totals(criterion):
    cases = [(3, 3, 2, 13), (3, 3, 3, 61), (3, 3, 4, 158), (4, 4, 2, 25), (4, 4, 3, 229), (5, 5, 2, 41), (5, 5, 3, 621)]
    got = [partition_total(m, n, k) for m, n, k, _ in cases]
    criterion(3, got == [c[3] for c in cases], f"P_tot {got}")


def test_criterion_4_enumeration_oracle(criterion):
    t0 = time.perf_counter()
    mismatches = []
    count = 0
    for m in range(1, 5):
        for n in range(1, 5):
            for k in range(1, min(4, m * n) + 1):
                count += 1
                if brute_force_count(m, n, k) != partition_count(m, n, k):
                    mismatches.append((m, n, k))
    dt = time.perf_counter() - t0
    criterion(4, not mismatches and dt <= 1.0, f"{count} (m,n,k) cases, {len(mismatches)} mismatches, {dt:.3f} s")


def test_criterion_5_config2_rates(criterion):
    rows = [
        ((4, 4), 3, 90, 30, 20, 650, 0.02),
        ((8, 8), 3, 45, 15, 40, 325, 0.02),
        ((13, 13), 3, 27, 9, 67, 195, 0.02),
        ((5, 5), 4, 72, 20, 30, 416, 0.06),
        ((12, 12), 4, 30, 8, 75, 173, 0.02),
        ((12, 12), 4, 30, 3.6, 167, 78, 0.02),
    ]
    ok = True
    got = []
    for (px, py), sub, qa, qc, n_q, rate_k, tol in rows:
        rep = g.config2_report(ScannerParams(partitions_x=px, partitions_y=py, q_aod_a=qa, q_aod_c=qc), sub)
        r = rep.transition_rate / 1e3
        ok &= rep.n_q == n_q and abs(r / rate_k - 1) <= tol
        got.append(f"{rep.n_q}@{r:.1f}")
    criterion(5, ok, f"N_q@rate 1e3/s {', '.join(got)}")


@pytest.fixture(scope="module")
def desk_sweep():
    t0 = time.perf_counter()
    rows = sweep_pixels((16, 32, 48, 66, 80))
    return rows, time.perf_counter() - t0


def test_criterion_6_hologram_benchmark(criterion, desk_sweep):
    rows, dt = desk_sweep
    at66 = [r for r in rows if r.pixels_per_axis == 66 and r.n_targets <= 3]
    single80 = next(r for r in rows if r.pixels_per_axis == 80 and r.n_targets == 1)
    ok = all(0.50 <= r.efficiency <= 0.75 and r.accuracy <= 0.10 and r.crosstalk <= 0.01 for r in at66)
    ok &= 0.60 <= single80.efficiency <= 0.80 and dt < 120

    fid = SimulationSettings.paper_fidelity()
    eta66 = [run_patch(fid, 66, DEFAULT_TARGET_SETS[k]).efficiency for k in (1, 2, 3)]
    eta80 = run_patch(fid, 80, DEFAULT_TARGET_SETS[1]).efficiency
    mean66 = float(np.mean(eta66))
    ok &= abs(mean66 - 0.60) <= 0.05 and abs(eta80 - 0.70) <= 0.05

    desk = ", ".join(f"{r.efficiency:.3f}/{r.accuracy:.3f}/{r.crosstalk:.4f}" for r in at66)
    criterion(
        6, ok,
        f"desk 66px eta/eps/xt [{desk}], 80px eta {single80.efficiency:.3f}, sweep {dt:.1f} s; "
        f"fidelity 66px mean eta {mean66:.3f}, 80px eta {eta80:.3f}",
    )


def test_criterion_7_fourier_engine(criterion, rng):
    worst = 0.0
    for _ in range(100):
        n = 2 ** int(rng.integers(4, 9))
        f = FieldGrid(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), 2e-6, Plane.SLM, n)
        out = lens_fourier(f, F, LAM)
        worst = max(worst, abs(out.power() / f.power() - 1))

    n, dx, p = 512, 2e-6, 128
    win = Window.centered(n, p)
    gauss = gaussian_field(n, dx, p * dx / 5, window=win)
    _, x = gauss.coords()
    shift_err = 0.0
    for v in range(1, 11):
        ramp = np.exp(2j * np.pi * v * (x - x[0]) / (p * dx))[None, :]
        out = lens_fourier(FieldGrid(gauss.samples * ramp, dx, Plane.SLM, n, win), F, LAM)
        peak = np.unravel_index(np.argmax(np.abs(out.samples)), out.samples.shape)
        err = abs((peak[1] - n // 2) * out.pitch - v * LAM * F / (p * dx)) / out.pitch
        shift_err = max(shift_err, err + abs(peak[0] - n // 2))

    s = SimulationSettings()
    e10 = run_patch(s, 66, DEFAULT_TARGET_SETS[1]).efficiency
    eu = run_patch(s.with_(bits=None), 66, DEFAULT_TARGET_SETS[1]).efficiency
    ok = worst <= 1e-10 and shift_err <= 1.0 and abs(eu - e10) <= 0.01
    criterion(
        7, ok,
        f"Parseval worst rel {worst:.1e}; ramp shift worst {shift_err:.2f} px; "
        f"|eta(unquantized) - eta(10 bit)| {abs(eu - e10):.1e}",
    )


def test_criterion_8_scheduler_closed_form(criterion):
    p1 = ScannerParams(partitions_x=7, partitions_y=7)
    t_burst = g.burst_time_c1(T_AOD, 3, 7, 52)
    ok = True
    got = []
    for n in (1, 49, 50, 200):
        tl = compile_config1([GateLayer([(0, 0)])] * n, p1)
        exact = math.ceil(n / 49) * Fraction(1 / p1.r_slm) + n * Fraction(t_burst)
        ok &= tl.total_time == float(exact)
        got.append(f"L={n}: {tl.total_time * 1e3:.6f} ms")

    p2 = ScannerParams(partitions_x=4, partitions_y=4, q_aod_a=90, q_aod_c=30)
    layers = [GateLayer([(i % 17, i % 18), (i % 17 + 1, i % 18 + 2)]) for i in range(100)]
    tl2 = compile_config2(layers, build_catalog(3, 3, 2, 16), p2)
    ok &= abs(tl2.total_time / 154e-6 - 1) <= 0.02 and len(tl2.of_kind(EventKind.AOD_SETTLE)) == 100
    criterion(8, ok, f"{'; '.join(got)} (exact); config-2 100 layers {tl2.total_time * 1e6:.2f} us vs 154")


def test_criterion_9_multi_tone(criterion):
    p2 = ScannerParams(partitions_x=4, partitions_y=4, q_aod_a=90, q_aod_c=30)
    cat = build_catalog(3, 3, 2, 16)
    rep = compile_config2([GateLayer([(0, 0)], tone_replication=ToneReplication(2, 3, 3))], cat, p2)
    offs = rep.frequency_offsets
    single = compile_config2([GateLayer([(4, 7)])], cat, p2)
    (f,) = single.frequency_offsets
    net = frequency_budget(single, f).net
    ok = len(offs) == 6 and len(set(offs)) == 6 and net == ((0.0,),)
    criterion(9, ok, f"{len(offs)} replicas, {len(set(offs))} distinct offsets; matched single-tone net {net[0][0]}")
