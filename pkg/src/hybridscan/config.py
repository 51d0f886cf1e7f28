"""Tool configuration: ``[section]`` key-value files, SI units throughout.

Sections:

* ``[scanner]`` ScannerParams fields (partitions and ``q_aod_c`` optional);
* ``[simulation]`` hologram simulation settings (all optional);
* ``[paths]`` default input/output locations (optional);
* ``[c1:<name>]``, ``[c2:<name>]`` and ``[displacement:<name>]`` design rows
  overriding the scanner for one worked example each.

Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import ConfigError, DomainError
from .geometry import ScannerParams
from .optics.simulate import SimulationSettings

REQUIRED_SCANNER_KEYS = (
    "q_slm", "q_a", "q_aod_a", "tbw", "t_aod", "r_slm",
    "wavelength", "focal_length", "slm_pixels_x", "slm_pixels_y",
)
OPTIONAL_SCANNER_KEYS = ("partitions_x", "partitions_y", "q_aod_c")
SIMULATION_KEYS = tuple(f.name for f in dataclasses.fields(SimulationSettings))
PATH_KEYS = ("layers", "catalog", "output")

_INT_KEYS = {"slm_pixels_x", "slm_pixels_y", "partitions_x", "partitions_y", "grid_exp", "sim_per_slm", "array_dim"}


def _dims(text: str, key: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {text!r} (expected <rows>x<cols>)") from None


@dataclass(frozen=True)
class C1Row:
    name: str
    partitions: tuple[int, int]
    q_aod_a: float
    n_q: Optional[int] = None

    def params(self, base: ScannerParams) -> ScannerParams:
        px, py = self.partitions
        return base.with_(partitions_x=px, partitions_y=py, q_aod_a=self.q_aod_a)


@dataclass(frozen=True)
class C2Row:
    name: str
    partitions: tuple[int, int]
    sub_array: tuple[int, int]
    q_aod_a: float
    q_aod_c: float

    def params(self, base: ScannerParams) -> ScannerParams:
        px, py = self.partitions
        return base.with_(partitions_x=px, partitions_y=py, q_aod_a=self.q_aod_a, q_aod_c=self.q_aod_c)


@dataclass(frozen=True)
class DisplacementRow:
    name: str
    partitions: tuple[int, int]
    w_a: float


_ROW_SPECS = {
    "c1": (C1Row, {"partitions": True, "q_aod_a": True, "n_q": False}),
    "c2": (C2Row, {"partitions": True, "sub_array": True, "q_aod_a": True, "q_aod_c": True}),
    "displacement": (DisplacementRow, {"partitions": True, "w_a": True}),
}


@dataclass(frozen=True)
class ToolConfig:
    scanner: ScannerParams = field(default_factory=ScannerParams)
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    paths: dict = field(default_factory=dict)
    c1_rows: tuple = ()
    c2_rows: tuple = ()
    displacement_rows: tuple = ()

    def row(self, name: str):
        """Design row by section name, e.g. ``c2:20x20``."""
        kind, _, label = name.partition(":")
        rows = {"c1": self.c1_rows, "c2": self.c2_rows, "displacement": self.displacement_rows}.get(kind, ())
        for r in rows:
            if r.name == label:
                return r
        raise ConfigError(f"no design row named {name!r}")


def _integer(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {text!r} (expected an integer)") from None


def _number(key, text):
    if key in _INT_KEYS:
        return _integer(key, text)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {text!r}") from None


def _check_keys(section, keys, allowed):
    for k in keys:
        if k not in allowed:
            raise ConfigError(f"unknown key: [{section}] {k}")


def _parse_scanner(sec) -> ScannerParams:
    _check_keys("scanner", sec, REQUIRED_SCANNER_KEYS + OPTIONAL_SCANNER_KEYS)
    for k in REQUIRED_SCANNER_KEYS:
        if k not in sec:
            raise ConfigError(f"missing key: {k}")
    kw = {k: _number(k, v) for k, v in sec.items()}
    try:
        return ScannerParams(**kw)
    except DomainError as exc:
        raise ConfigError(f"invalid [scanner]: {exc}") from None


def _parse_simulation(sec) -> SimulationSettings:
    _check_keys("simulation", sec, SIMULATION_KEYS)
    kw = {}
    for k, v in sec.items():
        if k == "shape":
            if v not in ("gaussian", "flattop"):
                raise ConfigError(f"invalid value for shape: {v!r}")
            kw[k] = v
        elif k == "bits":
            kw[k] = None if v.lower() == "none" else _integer(k, v)
        else:
            kw[k] = _number(k, v)
    return SimulationSettings(**kw)


def _parse_row(kind, label, sec):
    cls, keys = _ROW_SPECS[kind]
    section = f"{kind}:{label}"
    _check_keys(section, sec, keys)
    kw = {}
    for k, required in keys.items():
        if k not in sec:
            if required:
                raise ConfigError(f"missing key: [{section}] {k}")
            continue
        v = sec[k]
        kw[k] = _dims(v, k) if k in ("partitions", "sub_array") else (_integer(k, v) if k == "n_q" else _number(k, v))
    return cls(name=label, **kw)


def parse_config(text: str) -> ToolConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if "scanner" not in cp:
        raise ConfigError("missing section: [scanner]")
    scanner = _parse_scanner(cp["scanner"])
    sim = _parse_simulation(cp["simulation"]) if "simulation" in cp else SimulationSettings()
    paths = {}
    if "paths" in cp:
        _check_keys("paths", cp["paths"], PATH_KEYS)
        paths = dict(cp["paths"])
    rows = {"c1": [], "c2": [], "displacement": []}
    for name in cp.sections():
        if name in ("scanner", "simulation", "paths"):
            continue
        kind, sep, label = name.partition(":")
        if not sep or kind not in rows or not label:
            raise ConfigError(f"unknown section: [{name}]")
        rows[kind].append(_parse_row(kind, label, cp[name]))
    cfg = ToolConfig(scanner, sim, paths, tuple(rows["c1"]), tuple(rows["c2"]), tuple(rows["displacement"]))
    for r in cfg.c1_rows + cfg.c2_rows:
        try:
            r.params(scanner)
        except DomainError as exc:
            raise ConfigError(f"invalid row [{'c1' if isinstance(r, C1Row) else 'c2'}:{r.name}]: {exc}") from None
    return cfg


def _fmt(v):
    if isinstance(v, tuple):
        return f"{v[0]}x{v[1]}"
    return repr(v) if isinstance(v, float) else str(v)


def serialize_config(cfg: ToolConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp["scanner"] = {
        f.name: _fmt(getattr(cfg.scanner, f.name))
        for f in dataclasses.fields(ScannerParams)
        if getattr(cfg.scanner, f.name) is not None
    }
    cp["simulation"] = {k: _fmt(getattr(cfg.simulation, k)) for k in SIMULATION_KEYS}
    if cfg.paths:
        cp["paths"] = dict(cfg.paths)
    for kind, rows in (("c1", cfg.c1_rows), ("c2", cfg.c2_rows), ("displacement", cfg.displacement_rows)):
        for r in rows:
            cp[f"{kind}:{r.name}"] = {
                f.name: _fmt(getattr(r, f.name))
                for f in dataclasses.fields(r)
                if f.name != "name" and getattr(r, f.name) is not None
            }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def load_config(path) -> ToolConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def paper_config_text() -> str:
    return resources.files("hybridscan").joinpath("data/paper.cfg").read_text()


def paper_config() -> ToolConfig:
    return parse_config(paper_config_text())
