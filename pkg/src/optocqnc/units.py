"""SI conversion and hardware-to-parameter maps.

The dimensionless spectra returned by :mod:`optocqnc.spectra` are in units
of ``omega_m``. Before entering an SI formula they are multiplied by
``omega_m`` in rad/s, which makes ``hbar m omega_m S`` come out in N^2/Hz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

__all__ = [
    "HBAR",
    "K_B",
    "C_LIGHT",
    "SIContext",
    "MembraneMap",
    "TwistedMap",
    "AncillaHardware",
    "rescale_force_spectrum",
    "torque_sensitivity",
    "normal_mode_params",
    "twisted_coupling",
    "ancilla_from_hardware",
    "thermal_occupation",
]

HBAR = constants.hbar
K_B = constants.k
C_LIGHT = constants.c


@dataclass(frozen=True)
class SIContext:
    """Physical scale of one platform.

    Attributes
    ----------
    mass : float
        Oscillator mass in kg.
    omega_m_si : float
        Mechanical angular frequency in rad/s.
    mirror_arm_r : float, optional
        Lever arm in m, needed only for torque figures.
    temperature : float, optional
        Bath temperature in K, used to derive ``n_th``.
    """

    mass: float
    omega_m_si: float
    mirror_arm_r: float | None = None
    temperature: float | None = None
    hbar: float = HBAR
    k_b: float = K_B

    def __post_init__(self):
        for name in ("mass", "omega_m_si", "mirror_arm_r", "temperature", "hbar", "k_b"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")

    @property
    def prefactor(self) -> float:
        """``hbar m omega_m`` in SI units."""
        return self.hbar * self.mass * self.omega_m_si


@dataclass(frozen=True)
class MembraneMap:
    """Membrane-in-the-middle cavity: subcavity frequency, shift per length, tunnelling."""

    omega: float
    f: float
    J: float
    L: float | None = None


@dataclass(frozen=True)
class TwistedMap:
    """Birefringent twisted cavity."""

    n_o: float
    n_e: float
    L: float
    c: float = C_LIGHT

    def __post_init__(self):
        if not (self.n_o > 0 and self.n_e > 0 and self.L > 0):
            raise ValueError("n_o, n_e and L must be positive")


@dataclass(frozen=True)
class AncillaHardware:
    """Beam-splitter reflectivity ``r`` and down-conversion crystal (length ``l``, gain)."""

    r: float
    l: float
    gain: float
    L: float
    c: float = C_LIGHT

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError("reflectivity must lie in [0, 1]")
        if self.L <= 0 or self.l < 0 or self.l > self.L:
            raise ValueError("need 0 <= l <= L and L > 0")


def rescale_force_spectrum(s_dimensionless, ctx: SIContext):
    """Force spectrum in N^2/Hz, ``hbar m omega_m (S omega_m)``."""
    return ctx.prefactor * np.asarray(s_dimensionless, dtype=float) * ctx.omega_m_si


def torque_sensitivity(s_l_c, ctx: SIContext):
    """Torque figure ``r sqrt(hbar m omega_m S)`` in Nm/sqrt(Hz)."""
    if ctx.mirror_arm_r is None:
        raise ValueError("torque sensitivity needs mirror_arm_r in the SI context")
    return ctx.mirror_arm_r * np.sqrt(rescale_force_spectrum(s_l_c, ctx))


def normal_mode_params(hw: MembraneMap) -> tuple[float, float, float]:
    """``(omega_a, omega_b, g_m)`` at the membrane rest position.

    If ``f`` is None the high-reflectivity estimate ``-omega / L`` is used.
    """
    if hw.J < 0:
        raise ValueError("J must be nonnegative")
    f = hw.f
    if f is None:
        if hw.L is None:
            raise ValueError("need f or L")
        f = -hw.omega / hw.L
    return hw.omega + hw.J, hw.omega - hw.J, f


def twisted_coupling(hw: TwistedMap) -> float:
    """Optomechanical coupling of the twisted cavity in rad/s per radian."""
    return -(hw.c / (16.0 * hw.L * math.sqrt(hw.n_e * hw.n_o))) * (1.0 / hw.n_o**2 - 1.0 / hw.n_e**2)


def ancilla_from_hardware(hw: AncillaHardware) -> tuple[float, float]:
    """Beam-splitter and down-conversion rates ``(r c / L, gain l c / L)``."""
    return hw.r * hw.c / hw.L, hw.gain * hw.l * hw.c / hw.L


def thermal_occupation(ctx: SIContext) -> float:
    """Bose occupation at ``ctx.temperature``; 0 at zero temperature."""
    if ctx.temperature is None:
        raise ValueError("temperature is required")
    x = ctx.hbar * ctx.omega_m_si / (ctx.k_b * ctx.temperature)
    return 1.0 / math.expm1(x)
