"""Scenario configuration.

A scenario is a flat set of named values. On disk it is an INI file whose
sections only group the names::

    [geometry]
    link_length = 25
    eavesdropper_offset = 20
    sweep = 3:22:1

    [link]
    snr = 100
    functional = phase_difference

Every name is also a command-line flag (``eavesdropper_offset`` becomes
``--eavesdropper-offset``); flags override the file, the file overrides the
defaults below.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .antenna import RingAntenna
from .channel import Geometry
from .errors import ContractViolation
from .functionals import FunctionalKind
from .keygen import SelectionKind
from .sources import PhysicalSource

SECTIONS = {
    "geometry": ("link_length", "surface1_distance", "surface2_distance", "eavesdropper_offset",
                 "reflection_magnitude", "sweep"),
    "antenna": ("n_radiators", "wavelength", "radius"),
    "link": ("snr", "functional", "overlapping"),
    "run": ("trials", "seed", "workers", "runs"),
    "selection": ("method", "alpha_grid", "m_grid", "block_size"),
    "security": ("ell", "leakage_target", "ped_target", "diversity", "n_cap"),
    "table": ("rho_list", "ell_list", "source"),
    "pe_curve": ("rho_grid",),
}


@dataclass
class Scenario:
    # geometry, metres
    link_length: float = 25.0
    surface1_distance: float = 3.0
    surface2_distance: float = 3.0
    eavesdropper_offset: float = 20.0
    reflection_magnitude: float = 1.0
    sweep: str = "3:22:1"
    # antenna
    n_radiators: int = 6
    wavelength: float = 0.125
    radius: float = 0.0625
    # link
    snr: float = 100.0
    functional: str = "phase_difference"
    overlapping: bool = False
    # run control
    trials: int = 100_000
    seed: int = 20_240_917
    workers: int = 1
    runs: int = 1
    # selection
    method: int = 1
    alpha_grid: str = "0,0.05,0.1,0.15,0.2,0.25,0.3"
    m_grid: str = "7500,8000,8500,9000,9500,10000"
    block_size: int = 10_588
    # security
    ell: int = 128
    leakage_target: float = 1e-9
    ped_target: float = 1e-5
    diversity: int = 1
    n_cap: int = 2_000_000
    # key-rate tables
    rho_list: str = "0.99,0.95,0.8"
    ell_list: str = "128,256,512"
    source: str = "synthetic"
    # disagreement curve
    rho_grid: str = "0.01:0.99:0.01"

    def validate(self) -> "Scenario":
        self.geometry()
        self.antenna()
        if self.functional not in (FunctionalKind.ENVELOPE.value, FunctionalKind.PHASE_DIFFERENCE.value):
            raise ContractViolation(f"functional must be envelope or phase_difference, got {self.functional!r}")
        if not self.snr > 0:
            raise ContractViolation(f"snr must be positive, got {self.snr}")
        if self.method not in (1, 2):
            raise ContractViolation(f"method must be 1 or 2, got {self.method}")
        if self.source not in ("synthetic", "physical"):
            raise ContractViolation(f"source must be synthetic or physical, got {self.source}")
        if self.trials < 1 or self.workers < 1 or self.runs < 1:
            raise ContractViolation("trials, workers and runs must be positive")
        if not 0 <= self.seed < 2**64:
            raise ContractViolation("seed must be an unsigned 64-bit integer")
        parse_grid(self.sweep)
        return self

    def geometry(self, offset: float | None = None) -> Geometry:
        return Geometry(self.link_length, self.surface1_distance, self.surface2_distance,
                        self.eavesdropper_offset if offset is None else offset, self.reflection_magnitude)

    def antenna(self) -> RingAntenna:
        return RingAntenna(self.n_radiators, self.radius, self.wavelength)

    def physical_source(self, offset: float | None = None, snr: float | None = None) -> PhysicalSource:
        return PhysicalSource(self.geometry(offset), self.antenna(), self.snr if snr is None else snr,
                              FunctionalKind(self.functional), self.overlapping, self.workers)

    @property
    def selection_kind(self) -> SelectionKind:
        return SelectionKind.THRESHOLD_ALPHA if self.method == 1 else SelectionKind.TOP_M

    def search_grid(self) -> tuple:
        if self.method == 1:
            return tuple(parse_grid(self.alpha_grid))
        return tuple(int(round(m)) for m in parse_grid(self.m_grid))


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ContractViolation(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if not step > 0 or start > stop:
            raise ContractViolation(f"grid needs start <= stop and step > 0, got {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ContractViolation(f"cannot parse grid {text!r}") from exc
    if not vals:
        raise ContractViolation("grid is empty")
    return vals


def _convert(name: str, kind, raw):
    if kind in (bool, "bool"):
        if isinstance(raw, bool):
            return raw
        low = str(raw).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ContractViolation(f"{name}: expected a boolean, got {raw!r}")
    try:
        if kind in (int, "int"):
            return int(raw)
        if kind in (float, "float"):
            return float(raw)
    except ValueError as exc:
        raise ContractViolation(f"{name}: cannot parse {raw!r}") from exc
    return str(raw)


FIELD_TYPES = {f.name: f.type for f in fields(Scenario)}


def load_scenario(path: str | Path | None = None, overrides: dict | None = None) -> Scenario:
    values: dict = {}
    if path is not None:
        cp = configparser.ConfigParser()
        if not cp.read(path):
            raise ContractViolation(f"cannot read config file {path}")
        for section in cp.sections():
            allowed = SECTIONS.get(section)
            if allowed is None:
                raise ContractViolation(f"unknown config section [{section}]")
            for key, raw in cp.items(section):
                if key not in allowed:
                    raise ContractViolation(f"unknown key {key!r} in [{section}]")
                values[key] = _convert(key, FIELD_TYPES[key], raw)
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in FIELD_TYPES:
            raise ContractViolation(f"unknown scenario field {key!r}")
        values[key] = _convert(key, FIELD_TYPES[key], raw)
    return dataclasses.replace(Scenario(), **values).validate()


def dump_scenario(s: Scenario) -> str:
    cp = configparser.ConfigParser()
    for section, names in SECTIONS.items():
        cp[section] = {name: str(getattr(s, name)) for name in names}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
