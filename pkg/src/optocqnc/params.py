"""Parameter types and steady-state quantities.

Every rate, detuning and coupling is expressed in units of the mechanical
frequency. ``omega_m`` is carried explicitly in the formulas and defaults to
1, so the normalized and the unnormalized forms coincide unless a caller
deliberately rescales.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "SystemParams",
    "PumpParams",
    "AncillaCoupling",
    "HomodyneSettings",
    "NoiseModel",
    "ValidationReport",
    "validate",
    "steady_alpha",
    "enhanced_coupling",
    "matched_ancilla",
]


@dataclass(frozen=True)
class SystemParams:
    """Linearized probe-mode / mechanical-mode parameters.

    Attributes
    ----------
    gamma_m : float
        Mechanical damping rate.
    kappa_b : float
        Probe-mode decay rate.
    delta_b : float
        Probe detuning ``omega_b - omega_d`` (negative is blue detuning).
    big_g : float
        Enhanced optomechanical coupling ``G = |alpha| g``.
    n_th : float
        Thermal occupation of the mechanical bath.
    omega_m : float
        Mechanical frequency; 1 in normalized units.
    """

    gamma_m: float
    kappa_b: float
    delta_b: float
    big_g: float
    n_th: float = 0.0
    omega_m: float = 1.0

    @property
    def s_th(self) -> float:
        """Flat thermal force spectrum ``2 gamma_m n_th``."""
        return 2.0 * self.gamma_m * self.n_th

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PumpParams:
    """Driven-mode parameters; only used to derive ``G``."""

    delta_a: float
    kappa_a: float
    drive_E: float
    g_bare: float


@dataclass(frozen=True)
class AncillaCoupling:
    """Probe/ancilla coupling.

    ``g1`` is the beam-splitter (rotating-wave) strength and ``g2`` the
    down-conversion (counter-rotating) strength.
    """

    g1: float
    g2: float
    delta_c: float
    kappa_c: float

    @property
    def g_c(self) -> float:
        return self.g1 + self.g2

    @property
    def g_n(self) -> float:
        return self.g1 - self.g2

    @property
    def balanced(self) -> bool:
        return self.g1 == self.g2

    @classmethod
    def from_gc_gn(cls, g_c: float, g_n: float, delta_c: float, kappa_c: float) -> "AncillaCoupling":
        return cls(g1=0.5 * (g_c + g_n), g2=0.5 * (g_c - g_n), delta_c=delta_c, kappa_c=kappa_c)

    def with_(self, **changes) -> "AncillaCoupling":
        return replace(self, **changes)


@dataclass(frozen=True)
class HomodyneSettings:
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi}")


@dataclass(frozen=True)
class NoiseModel:
    """Flat Brownian force spectrum derived from a :class:`SystemParams`."""

    s_th: float = field(init=False)
    params: SystemParams

    def __post_init__(self):
        object.__setattr__(self, "s_th", self.params.s_th)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "valid" if self.ok else "; ".join(self.violations)


def _finite(name: str, value: float, out: list[str]) -> bool:
    if not np.isfinite(value):
        out.append(f"{name} finite violated")
        return False
    return True


def validate(params: SystemParams, ancilla: AncillaCoupling | None = None) -> ValidationReport:
    """Collect every violated invariant without raising."""
    out: list[str] = []
    for name in ("omega_m", "gamma_m", "kappa_b", "delta_b", "big_g", "n_th"):
        _finite(name, getattr(params, name), out)
    if params.omega_m <= 0:
        out.append("omega_m > 0 violated")
    if params.gamma_m <= 0:
        out.append("gamma_m > 0 violated")
    if params.kappa_b <= 0:
        out.append("kappa_b > 0 violated")
    if params.big_g < 0:
        out.append("big_g >= 0 violated")
    if params.n_th < 0:
        out.append("n_th >= 0 violated")
    if ancilla is not None:
        for name in ("g1", "g2", "delta_c", "kappa_c"):
            _finite(name, getattr(ancilla, name), out)
        if ancilla.g1 < 0:
            out.append("g1 >= 0 violated")
        if ancilla.g2 < 0:
            out.append("g2 >= 0 violated")
        if ancilla.kappa_c <= 0:
            out.append("kappa_c > 0 violated")
        if ancilla.g_c < abs(ancilla.g_n):
            out.append("g_c >= |g_n| violated")
    return ValidationReport(out)


def steady_alpha(pump: PumpParams) -> complex:
    """Steady-state amplitude of the driven mode, ``E / (i delta_a + kappa_a)``."""
    if pump.kappa_a <= 0:
        raise ValueError("kappa_a must be positive")
    return pump.drive_E / complex(pump.kappa_a, pump.delta_a)


def enhanced_coupling(pump: PumpParams) -> float:
    return abs(steady_alpha(pump)) * pump.g_bare


def matched_ancilla(params: SystemParams) -> AncillaCoupling:
    """Ancilla tuned for full backaction cancellation.

    Balanced coupling with ``g_c = sqrt(2) G``, detuning ``-omega_m`` and
    linewidth ``gamma_m / 2``.
    """
    g = params.big_g / math.sqrt(2.0)
    return AncillaCoupling(g1=g, g2=g, delta_c=-params.omega_m, kappa_c=0.5 * params.gamma_m)
