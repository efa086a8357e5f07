"""INI configuration files and bundled presets.

Sections (all rates in units of ``omega_m`` except ``[si]``)::

    [meta]     id, description
    [system]   gamma_m, kappa_b, delta_b, G, n_th (number or "auto"), omega_m
    [pump]     delta_a, kappa_a, drive_E, g_bare   (optional; G derived if present)
    [ancilla]  mode = none | matched | explicit; g1, g2, delta_c, kappa_c
    [si]       mass, omega_m_si, mirror_arm_r, temperature
    [sweep]    axis, min, max, points, spacing, outputs, omega, hold,
               g2_ratio, tie_delta_b, scale

``n_th = auto`` derives the occupation from ``[si] temperature``.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .params import (
    AncillaCoupling,
    PumpParams,
    SystemParams,
    enhanced_coupling,
    matched_ancilla,
    validate,
)
from .units import SIContext, thermal_occupation

__all__ = ["ConfigError", "SweepPlan", "Config", "load_config", "parse_config", "list_presets", "preset_text"]

AXES = ("omega", "G", "delta_c", "g_n", "phi")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepPlan:
    axis: str
    lo: float
    hi: float
    points: int
    spacing: str = "linear"
    outputs: tuple[str, ...] = ("S",)
    omega: float = 1.0
    hold: str = "g_c"
    g2_ratio: float = 0.5
    tie_delta_b: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; choose from {', '.join(AXES)}")
        if self.points < 2:
            raise ConfigError("sweep points must be >= 2")
        if not self.lo < self.hi:
            raise ConfigError("sweep min must be < max")
        if self.spacing not in ("linear", "log"):
            raise ConfigError("spacing must be linear or log")
        if self.spacing == "log" and self.lo <= 0:
            raise ConfigError("log spacing needs min > 0")
        if self.hold not in ("g_c", "g_2"):
            raise ConfigError("hold must be g_c or g_2")


@dataclass(frozen=True)
class Config:
    params: SystemParams
    ancilla_mode: str = "none"
    ancilla: AncillaCoupling | None = None
    si: SIContext | None = None
    sweep: SweepPlan | None = None
    meta: dict = field(default_factory=dict)

    def ancilla_for(self, params: SystemParams) -> AncillaCoupling | None:
        """Ancilla for ``params``; re-matched to ``G`` when the mode is matched."""
        if self.ancilla_mode == "matched":
            return matched_ancilla(params)
        return self.ancilla


def _get_float(sec, key, default=None, required=False):
    if key not in sec:
        if required:
            raise ConfigError(f"[{sec.name}] {key} is required")
        return default
    raw = sec[key].strip()
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{sec.name}] {key} = {raw!r} is not a number") from None


def parse_config(text: str, source: str = "<string>") -> Config:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if "system" not in cp:
        raise ConfigError("missing [system] section")
    meta = dict(cp["meta"]) if "meta" in cp else {}

    si = None
    if "si" in cp:
        s = cp["si"]
        try:
            si = SIContext(
                mass=_get_float(s, "mass", required=True),
                omega_m_si=_get_float(s, "omega_m_si", required=True),
                mirror_arm_r=_get_float(s, "mirror_arm_r"),
                temperature=_get_float(s, "temperature"),
            )
        except ValueError as exc:
            raise ConfigError(f"[si] {exc}") from None

    sec = cp["system"]
    n_th_raw = sec.get("n_th", "0").strip()
    if n_th_raw == "auto":
        if si is None or si.temperature is None:
            raise ConfigError("n_th = auto needs [si] temperature")
        n_th = thermal_occupation(si)
    else:
        n_th = _get_float(sec, "n_th", 0.0)
    big_g = _get_float(sec, "G")
    if "pump" in cp:
        p = cp["pump"]
        pump = PumpParams(
            delta_a=_get_float(p, "delta_a", 0.0),
            kappa_a=_get_float(p, "kappa_a", required=True),
            drive_E=_get_float(p, "drive_E", required=True),
            g_bare=_get_float(p, "g_bare", required=True),
        )
        try:
            big_g = enhanced_coupling(pump)
        except ValueError as exc:
            raise ConfigError(f"[pump] {exc}") from None
    if big_g is None:
        raise ConfigError("[system] G is required unless [pump] is given")
    params = SystemParams(
        gamma_m=_get_float(sec, "gamma_m", required=True),
        kappa_b=_get_float(sec, "kappa_b", required=True),
        delta_b=_get_float(sec, "delta_b", required=True),
        big_g=big_g,
        n_th=n_th,
        omega_m=_get_float(sec, "omega_m", 1.0),
    )

    mode, ancilla = "none", None
    if "ancilla" in cp:
        a = cp["ancilla"]
        mode = a.get("mode", "explicit").strip()
        if mode == "matched":
            ancilla = matched_ancilla(params)
        elif mode == "explicit":
            ancilla = AncillaCoupling(
                g1=_get_float(a, "g1", required=True),
                g2=_get_float(a, "g2", required=True),
                delta_c=_get_float(a, "delta_c", required=True),
                kappa_c=_get_float(a, "kappa_c", required=True),
            )
        elif mode != "none":
            raise ConfigError(f"[ancilla] mode must be none, matched or explicit, got {mode!r}")

    report = validate(params, ancilla)
    if not report.ok:
        raise ConfigError(str(report))

    sweep = None
    if "sweep" in cp:
        w = cp["sweep"]
        scale_key = w.get("scale", "1").strip()
        scale = math.sqrt(2.0) * params.big_g if scale_key == "sqrt2G" else _get_float(w, "scale", 1.0)
        outputs = tuple(x.strip() for x in w.get("outputs", "S").split(",") if x.strip())
        try:
            sweep = SweepPlan(
                axis=w.get("axis", "omega").strip(),
                lo=_get_float(w, "min", required=True) * scale,
                hi=_get_float(w, "max", required=True) * scale,
                points=int(_get_float(w, "points", 101)),
                spacing=w.get("spacing", "linear").strip(),
                outputs=outputs,
                omega=_get_float(w, "omega", params.omega_m),
                hold=w.get("hold", "g_c").strip(),
                g2_ratio=_get_float(w, "g2_ratio", 0.5),
                tie_delta_b=w.getboolean("tie_delta_b", fallback=False),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return Config(params, mode, ancilla, si, sweep, meta)


def list_presets() -> list[str]:
    root = resources.files("optocqnc") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def preset_text(name: str) -> str:
    path = resources.files("optocqnc") / "presets" / f"{name}.ini"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return path.read_text()


def load_config(path: str | Path | None = None, preset: str | None = None) -> Config:
    if (path is None) == (preset is None):
        raise ConfigError("give exactly one of --config or --preset")
    if preset is not None:
        cfg = parse_config(preset_text(preset), f"preset:{preset}")
        meta = {"id": preset, **cfg.meta}
        return Config(cfg.params, cfg.ancilla_mode, cfg.ancilla, cfg.si, cfg.sweep, meta)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    return parse_config(text, str(path))
