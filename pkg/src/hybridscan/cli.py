"""Command-line front end.

Exit codes: 0 success, 1 computation or I/O error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from pathlib import Path

from . import geometry, scheduler
from ._io import atomic_write_text
from .config import ToolConfig, load_config, paper_config
from .errors import CapacityError, CatalogMissError, ConfigError, DomainError
from .optics.fields import lens_fourier
from .optics.hologram import apply_mask
from .optics.io import write_pgm
from .optics.simulate import DEFAULT_TARGET_SETS, SimulationSettings, build_patch, sweep_csv, sweep_pixels
from .partitions import PatchCatalog, build_catalog, max_complete_k, parse_sites, partition_total

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dims(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <rows>x<cols>, got {text!r}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(args, text: str, default_key: str | None = None, cfg: ToolConfig | None = None):
    """Write the main artifact to ``--out`` (or the config's path) atomically, else stdout."""
    out = args.out
    if out is None and cfg is not None and default_key:
        out = cfg.paths.get(default_key)
    if out is None:
        sys.stdout.write(text)
        return None
    atomic_write_text(out, text)
    return out


def _summary(written, text):
    """Summary to stdout, unless stdout already carries the artifact."""
    print(text, file=sys.stdout if written else sys.stderr)


def _settings(cfg: ToolConfig, args) -> SimulationSettings:
    s = cfg.simulation
    if getattr(args, "paper_fidelity", False):
        s = s.with_(grid_exp=13, sim_per_slm=5)
    if getattr(args, "shape", None):
        s = s.with_(shape=args.shape)
    return s


# -- commands --------------------------------------------------------------


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _k_label(sub_array, k_max, available) -> str:
    """``k_max``, with a "+" when spare partitions hold at least half the next level."""
    m, n = sub_array
    if k_max < 1 or k_max >= m * n:
        return str(k_max)
    spare = available - partition_total(m, n, k_max)
    next_level = partition_total(m, n, k_max + 1) - partition_total(m, n, k_max)
    return f"{k_max}+" if 2 * spare >= next_level else str(k_max)


def cmd_design(cfg: ToolConfig, args) -> int:
    base = cfg.scanner
    if args.mode == "c1":
        parts = []
        if cfg.displacement_rows:
            rows = []
            for r in cfg.displacement_rows:
                w_lens = geometry.lens_waist(base.focal_length, base.wavelength, r.w_a)
                d = geometry.max_displacement(base.q_slm, w_lens, *r.partitions)
                rows.append([r.name, f"{r.partitions[0]}x{r.partitions[1]}", f"{r.w_a * 1e6:.2f}", f"{w_lens * 1e3:.3f}", f"{d * 1e3:.1f}"])
            parts.append(_table(["row", "partitions", "w_a_um", "w_lens_mm", "d_max_mm"], rows))
        rows = []
        c1_rows = cfg.c1_rows or (None,)
        for r in c1_rows:
            p = r.params(base) if r else base
            rep = geometry.config1_report(p, n_q=r.n_q if r else None)
            rows.append([
                r.name if r else "scanner", f"{rep.n_q}x{rep.n_q}", f"{p.partitions_x}x{p.partitions_y}",
                f"{p.q_aod_a:g}", f"{rep.average_rate / 1e3:.1f}", f"{rep.burst_rate / 1e3:.1f}",
                f"{rep.n_resolvable:.3f}", "yes" if rep.aperture_ok else "no",
            ])
        parts.append(_table(
            ["row", "array", "partitions", "q_aod_a", "average_rate_k_per_s", "burst_rate_k_per_s", "resolvable_spots", "aperture_ok"],
            rows,
        ))
        text = "\n".join(parts)
    else:
        rows = []
        c2_rows = cfg.c2_rows
        if not c2_rows:
            if base.q_aod_c is None:
                raise ConfigError("missing key: q_aod_c")
            raise ConfigError("c2 design needs at least one [c2:<name>] row with a sub_array")
        for r in c2_rows:
            p = r.params(base)
            rep = geometry.config2_report(p, *r.sub_array)
            k_label = _k_label(r.sub_array, rep.k_max, p.n_partitions)
            rows.append([
                r.name, f"{rep.n_q}x{rep.n_q}", f"{p.partitions_x}x{p.partitions_y}",
                f"{r.sub_array[0]}x{r.sub_array[1]}", k_label, f"{p.q_aod_a:g}", f"{p.q_aod_c:g}",
                f"{rep.transition_rate / 1e3:.1f}", rep.limiting_deflector.value,
            ])
        text = _table(
            ["row", "array", "partitions", "sub_array", "k_max", "q_aod_a", "q_aod_c", "transition_rate_k_per_s", "limited_by"],
            rows,
        )
    _emit(args, text)
    return EXIT_OK


def cmd_partitions(cfg: ToolConfig, args) -> int:
    if args.m < 1 or args.n < 1 or args.k_max < 1:
        raise UsageError("m, n and k_max must be >= 1")
    if args.k_max > args.m * args.n:
        raise UsageError(f"k_max cannot exceed the {args.m * args.n} sites of the sub-array")
    total = partition_total(args.m, args.n, args.k_max)
    print(total)
    if args.out or args.catalog:
        available = args.available if args.available is not None else total
        cat = build_catalog(args.m, args.n, args.k_max, available, fill=args.fill)
        path = args.out or args.catalog
        atomic_write_text(path, cat.to_text())
        print(f"wrote {len(cat)} patterns to {path}")
    return EXIT_OK


def _parse_targets(text):
    try:
        sites = parse_sites(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not sites:
        raise UsageError("no target sites given")
    return sites


def cmd_holo(cfg: ToolConfig, args) -> int:
    s = _settings(cfg, args)
    sites = _parse_targets(args.targets) if args.targets else DEFAULT_TARGET_SETS[1]
    t0 = time.perf_counter()
    model = build_patch(s, args.pixels, sites)
    mask = model.hologram()
    if args.gs:
        mask = model.refine(mask, args.gs)
    m = model.measure(mask)
    text = _table(
        ("pixels_per_axis", "n_targets", "shape", "gs_iterations", "efficiency", "accuracy", "crosstalk"),
        [[args.pixels, len(set(sites)), s.shape, args.gs, f"{m.efficiency:.6f}", f"{m.accuracy:.6f}", f"{m.crosstalk:.6f}"]],
    )
    written = _emit(args, text, "output", cfg)
    if args.dump_mask:
        write_pgm(args.dump_mask, mask)
    if args.dump_intensity:
        out = lens_fourier(apply_mask(model.input_field, mask), s.focal_length, s.wavelength, window=model.target.window)
        write_pgm(args.dump_intensity, out)
    _summary(
        written,
        f"holo: {args.pixels} px, {len(set(sites))} target(s): eta={m.efficiency:.4f} "
        f"eps={m.accuracy:.4f} crosstalk={m.crosstalk:.5f} ({time.perf_counter() - t0:.2f} s)",
    )
    return EXIT_OK


def cmd_sweep(cfg: ToolConfig, args) -> int:
    s = _settings(cfg, args)
    t0 = time.perf_counter()
    rows = sweep_pixels(args.pixels, settings=s)
    written = _emit(args, sweep_csv(rows), "output", cfg)
    _summary(written, f"sweep: {len(rows)} rows ({s.shape}, 2^{s.grid_exp} grid) in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK


def cmd_schedule(cfg: ToolConfig, args) -> int:
    path = args.layers or cfg.paths.get("layers")
    if not path:
        raise UsageError("no layer file given")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read layers {path}: {exc.strerror}") from None
    try:
        layers = scheduler.parse_layers(text)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if args.mode == "c1":
        params = cfg.row(args.row).params(cfg.scanner) if args.row else cfg.scanner
        tl = scheduler.compile_config1(layers, params)
    else:
        if args.row:
            row = cfg.row(args.row)
            params, (sub_m, sub_n) = row.params(cfg.scanner), row.sub_array
        else:
            if args.sub_array is None:
                raise UsageError("c2 schedule needs --row or --sub-array")
            params, (sub_m, sub_n) = cfg.scanner, args.sub_array
        if params.q_aod_c is None:
            raise ConfigError("missing key: q_aod_c")
        cat_path = args.catalog or cfg.paths.get("catalog")
        if cat_path:
            catalog = PatchCatalog.load(cat_path)
        else:
            k = max_complete_k(sub_m, sub_n, params.n_partitions)
            if k < 1:
                raise CapacityError(f"{params.n_partitions} partitions cannot hold every single-site pattern")
            catalog = build_catalog(sub_m, sub_n, k, params.n_partitions, fill=True)
        tl = scheduler.compile_config2(layers, catalog, params, sub_m, sub_n)
    written = _emit(args, tl.to_csv(), "output", cfg)
    _summary(
        written,
        f"schedule ({tl.mode}): {tl.n_layers} layers, {tl.n_frames} frame loads, "
        f"total {tl.total_time * 1e6:.3f} us, {tl.average_rate / 1e3:.1f}e3 layers/s",
    )
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="scanner config file (default: bundled paper.cfg)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default: stdout)")
    common.add_argument("--mode", choices=("c1", "c2"), default=argparse.SUPPRESS, help="scanner configuration")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="reserved; all computation is deterministic")

    p = argparse.ArgumentParser(prog="hybridscan", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("design", parents=[common], help="closed-form scanner performance rows")

    sp = sub.add_parser("partitions", parents=[common], help="count (and optionally list) canonical patterns")
    sp.add_argument("m", type=int)
    sp.add_argument("n", type=int)
    sp.add_argument("k_max", type=int)
    sp.add_argument("--catalog", help="write the catalog here (same as --out)")
    sp.add_argument("--available", type=int, help="SLM partitions available (default: exactly enough)")
    sp.add_argument("--fill", action="store_true", help="fill spare partitions with k_max+1 patterns")

    sp = sub.add_parser("holo", parents=[common], help="synthesise and score one hologram")
    sp.add_argument("--pixels", type=int, default=64, help="SLM pixels per axis of the patch")
    sp.add_argument("--targets", help='sites on the 4x4 array, e.g. "(0,0) (3,3)"')
    sp.add_argument("--gs", type=int, default=0, help="Gerchberg-Saxton iterations")
    sp.add_argument("--shape", choices=("gaussian", "flattop"))
    sp.add_argument("--paper-fidelity", action="store_true", help="2^13 grid, 5 samples per SLM pixel")
    sp.add_argument("--dump-mask", help="write the phase mask as a 16-bit PGM")
    sp.add_argument("--dump-intensity", help="write the array-plane intensity as a 16-bit PGM")

    sp = sub.add_parser("sweep", parents=[common], help="metrics versus patch size and target count")
    sp.add_argument("--pixels", type=_int_list, default=[16, 32, 48, 64, 80])
    sp.add_argument("--shape", choices=("gaussian", "flattop"))
    sp.add_argument("--paper-fidelity", action="store_true", help="2^13 grid, 5 samples per SLM pixel")

    sp = sub.add_parser("schedule", parents=[common], help="compile a layer file into a timeline CSV")
    sp.add_argument("layers", nargs="?")
    sp.add_argument("--row", help="design row supplying the parameters, e.g. c2:20x20")
    sp.add_argument("--sub-array", type=_dims, help="c2 sub-array, e.g. 3x3")
    sp.add_argument("--catalog", help="patch catalog file (default: built from the row)")
    return p


_COMMANDS = {
    "design": cmd_design,
    "partitions": cmd_partitions,
    "holo": cmd_holo,
    "sweep": cmd_sweep,
    "schedule": cmd_schedule,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("config", None), ("out", None), ("mode", "c1"), ("seed", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        cfg = load_config(args.config) if args.config else paper_config()
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, UsageError) as exc:
        print(f"hybridscan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"hybridscan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, CatalogMissError, OSError, RuntimeError, ValueError) as exc:
        print(f"hybridscan: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
