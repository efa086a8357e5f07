"""Homodyne transfer functions and effective force-noise spectra.

Spectra are evaluated for the phase quadrature (local-oscillator phase 0).
:func:`transfer_functions` keeps the phase general.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import oracle
from .params import AncillaCoupling, SystemParams, matched_ancilla
from .response import (
    _check_pole,
    chi_b,
    chi_c,
    chi_m,
    chi_mech_loaded,
    optical_spring_cqnc,
)
from .stability import fixed_g2_ancilla, g_max_search

__all__ = [
    "ModeMismatchError",
    "TransferSet",
    "SpectrumResult",
    "Table1Row",
    "G2_CONVENTIONS",
    "default_grid",
    "transfer_functions",
    "noise_spectrum_free",
    "sql_optimal_g",
    "sql_spectrum",
    "noise_spectrum_cqnc",
    "noise_spectrum_matched",
    "sql_cqnc",
    "cancellation_ratio",
    "positive_damping_halfwidth",
    "table1_row",
]


class ModeMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TransferSet:
    omega: np.ndarray
    chi_f: np.ndarray
    chi_x: np.ndarray
    chi_p: np.ndarray


@dataclass
class SpectrumResult:
    """Noise spectrum on a frequency grid with its additive parts.

    For ``control_mode == "off"`` the components are ``thermal``,
    ``background``, ``backaction`` and ``shot`` and sum to ``total``. With
    the ancilla attached they are ``thermal``, ``ancilla_background`` (from
    the ancilla input noise), ``shot`` (the uncontrolled shot term) and
    ``interference_terms`` (the remainder, which vanishes under perfect
    matching and may be negative).
    """

    omega_grid: np.ndarray
    total: np.ndarray
    components: dict[str, np.ndarray]
    control_mode: str = "off"


def default_grid(points: int = 2001, lo: float = 0.5, hi: float = 1.5) -> np.ndarray:
    """Grid on ``[lo, hi]`` spaced logarithmically outward from ``omega = 1``."""
    if points < 3 or points % 2 == 0:
        raise ValueError("points must be odd and >= 3")
    half = points // 2
    below = 1.0 - np.geomspace(1e-6, 1.0 - lo, half)[::-1]
    above = 1.0 + np.geomspace(1e-6, hi - 1.0, half)
    return np.concatenate([below, [1.0], above])


def transfer_functions(omega, params: SystemParams, phi: float = 0.0) -> TransferSet:
    """Signal, amplitude-noise and phase-noise transfer to the homodyne output."""
    w = np.asarray(omega, dtype=float)
    kb, db, G = params.kappa_b, params.delta_b, params.big_g
    s = kb - 1j * w
    den = s**2 + db**2
    chi = chi_mech_loaded(w, params)
    q = db * np.sin(phi) + s * np.cos(phi)
    sq = np.sqrt(kb)
    chi_f = -2.0 * sq * G * q / den * chi
    lead = kb**2 + w**2 - db**2
    chi_x = (lead * np.sin(phi) - 2 * kb * db * np.cos(phi)) / den + 4 * kb * G**2 * s * q / den**2 * chi
    chi_p = (lead * np.cos(phi) + 2 * kb * db * np.sin(phi)) / den + 4 * kb * G**2 * db * q / den**2 * chi
    return TransferSet(w, chi_f, chi_x, chi_p)


def _shot_term(w, params: SystemParams):
    kb, db, G, wm = params.kappa_b, params.delta_b, params.big_g, params.omega_m
    D = w**2 - wm**2
    return ((db**2 - w**2 + kb**2) ** 2 + 4 * kb**2 * w**2) * (w**2 * params.gamma_m**2 + D**2) / (
        8 * G**2 * kb * wm**2 * (w**2 + kb**2)
    )


def noise_spectrum_free(omega, params: SystemParams) -> SpectrumResult:
    """Closed-form spectrum without the ancilla, split into four parts."""
    w = np.asarray(omega, dtype=float)
    chi_mech_loaded(w, params)  # pole check
    kb, db, G, wm = params.kappa_b, params.delta_b, params.big_g, params.omega_m
    if G <= 0:
        raise ZeroDivisionError("shot noise diverges at G = 0")
    D = w**2 - wm**2
    lor = w**2 + kb**2
    thermal = np.full_like(w, params.s_th)
    background = db * (db**2 - w**2 + 3 * kb**2) * D / (2 * kb * wm * lor)
    backaction = G**2 * (db**2 + 4 * kb**2) / (2 * kb * lor)
    shot = _shot_term(w, params)
    total = thermal + background + backaction + shot
    comps = {"thermal": thermal, "background": background, "backaction": backaction, "shot": shot}
    return SpectrumResult(w, total, comps, "off")


def sql_optimal_g(omega, params: SystemParams):
    """Coupling that minimizes the free spectrum at ``omega``."""
    w = np.asarray(omega, dtype=float)
    kb, db, wm = params.kappa_b, params.delta_b, params.omega_m
    D = w**2 - wm**2
    num = ((db**2 - w**2 + kb**2) ** 2 + 4 * kb**2 * w**2) * (w**2 * params.gamma_m**2 + D**2)
    return (num / (4 * db**2 * wm**2 + 16 * kb**2 * wm**2)) ** 0.25


def sql_spectrum(omega, params: SystemParams):
    """Standard quantum limit: the free spectrum at the optimal coupling."""
    w = np.asarray(omega, dtype=float)
    kb, db, wm, gm = params.kappa_b, params.delta_b, params.omega_m, params.gamma_m
    D = w**2 - wm**2
    root = np.sqrt((db**2 + 4 * kb**2) * (w**2 * gm**2 + D**2)) * np.sqrt(
        (db**2 - w**2 + kb**2) ** 2 + 4 * kb**2 * w**2
    )
    return params.s_th + (db * (db**2 - w**2 + 3 * kb**2) * D + root) / (2 * kb * wm * (w**2 + kb**2))


def _balanced_terms(w, params: SystemParams, ancilla: AncillaCoupling):
    kb, db, G = params.kappa_b, params.delta_b, params.big_g
    gc, dc, kc = ancilla.g_c, ancilla.delta_c, ancilla.kappa_c
    cb = chi_b(w, kb)
    cm = chi_m(w, params)
    sc = kc - 1j * w
    lorentz_c = 1.0 / (sc**2 + dc**2)
    cc = dc * lorentz_c
    _check_pole(1.0 / cm, w, "chi_m")
    # |chi_c (k_c - i w)|^2 / D_c^2 written without dividing by D_c
    anc1 = gc**2 * kc * np.abs(lorentz_c * sc) ** 2 / (2 * G**2 * np.abs(cm) ** 2)
    anc2 = gc**2 * kc * np.abs(cc) ** 2 / (2 * G**2 * np.abs(cm) ** 2)
    X = gc**2 * cc + 2 * G**2 * cm
    sk = np.sqrt(kb)
    inter1 = 0.5 * np.abs((sk * cb * db - sk * cb * X) / (G * cm)) ** 2
    inter2 = 0.5 * np.abs((1 - 2 * kb * cb + db**2 * cb**2 - db * cb**2 * X) / (2 * G * sk * cb * cm)) ** 2
    return anc1 + anc2, inter1 + inter2


def noise_spectrum_cqnc(omega, params: SystemParams, ancilla: AncillaCoupling, mode: str = "auto") -> SpectrumResult:
    """Force-noise spectrum with the ancilla attached.

    ``mode="balanced"`` uses the closed form and requires ``g1 == g2``;
    ``mode="imbalanced"`` (or ``"auto"`` with ``g1 != g2``) evaluates the
    state-space system directly, since no closed form is available there.
    """
    if mode not in ("auto", "balanced", "imbalanced"):
        raise ValueError(f"unknown control mode {mode!r}")
    if mode == "balanced" and not ancilla.balanced:
        raise ModeMismatchError("balanced control requires g1 == g2")
    if params.big_g <= 0:
        raise ZeroDivisionError("shot noise diverges at G = 0")
    w = np.asarray(omega, dtype=float)
    chi_mech_loaded(w, params)
    shot = _shot_term(w, params)
    thermal = np.full_like(w, params.s_th)
    if mode == "balanced" or (mode == "auto" and ancilla.balanced):
        anc, probe = _balanced_terms(w, params, ancilla)
        used = "balanced"
    else:
        system = oracle.build_system(params, ancilla)
        parts = [oracle.spectrum_parts(system, float(x)) for x in w.ravel()]
        anc = np.array([p["ancilla"] for p in parts]).reshape(w.shape)
        probe = np.array([p["probe"] for p in parts]).reshape(w.shape)
        used = "imbalanced"
    comps = {
        "thermal": thermal,
        "ancilla_background": anc,
        "interference_terms": probe - shot,
        "shot": shot,
    }
    return SpectrumResult(w, thermal + anc + probe, comps, used)


def noise_spectrum_matched(omega, params: SystemParams, ancilla: AncillaCoupling | None = None) -> SpectrumResult:
    """Spectrum once the backaction is cancelled exactly.

    Thermal, ancilla background and the uncontrolled shot term only.
    """
    ancilla = ancilla or matched_ancilla(params)
    w = np.asarray(omega, dtype=float)
    dc, kc = ancilla.delta_c, ancilla.kappa_c
    cm = chi_m(w, params)
    sc = kc - 1j * w
    lorentz_c = 1.0 / (sc**2 + dc**2)
    anc = kc * (np.abs(lorentz_c * sc) ** 2 + np.abs(cm) ** 2) / np.abs(cm) ** 2
    thermal = np.full_like(w, params.s_th)
    shot = _shot_term(w, params)
    comps = {"thermal": thermal, "ancilla_background": anc, "interference_terms": np.zeros_like(w), "shot": shot}
    return SpectrumResult(w, thermal + anc + shot, comps, "matched")


def sql_cqnc(omega, params: SystemParams, ancilla: AncillaCoupling | None = None):
    """Strong-coupling floor of the cancelled spectrum (shot term dropped)."""
    r = noise_spectrum_matched(omega, params, ancilla)
    return r.components["thermal"] + r.components["ancilla_background"]


def cancellation_ratio(params: SystemParams, ancilla: AncillaCoupling, omega: float | None = None) -> float:
    """``1 - S^c / S`` at the mechanical frequency (or at ``omega``)."""
    w = params.omega_m if omega is None else omega
    s_free = float(noise_spectrum_free(w, params).total)
    s_c = float(noise_spectrum_cqnc(w, params, ancilla).total)
    return 1.0 - s_c / s_free


def positive_damping_halfwidth(
    params: SystemParams, ancilla: AncillaCoupling, *, span: float = 0.5, points: int = 20001
) -> tuple[float, float, float]:
    """Half-width of the interval around ``omega_m`` with positive damping.

    Returns ``(halfwidth, lower_edge, upper_edge)``. The edges are located
    on a uniform scan of ``omega_m * [1 - span, 1 + span]`` and refined with
    Brent's method.

    Raises
    ------
    ValueError
        If the effective damping at ``omega_m`` itself is not positive.
    """
    wm = params.omega_m

    def geff(w):
        return optical_spring_cqnc(w, params, ancilla).gamma_eff

    if geff(wm) <= 0:
        raise ValueError("effective damping is not positive at omega_m")
    ws = wm * np.linspace(1.0 - span, 1.0 + span, points)
    g = geff(ws)
    i0 = int(np.argmin(np.abs(ws - wm)))
    lo = i0
    while lo > 0 and g[lo - 1] > 0:
        lo -= 1
    hi = i0
    while hi < len(ws) - 1 and g[hi + 1] > 0:
        hi += 1
    f = lambda x: float(geff(x))  # noqa: E731
    lower = brentq(f, ws[lo - 1], ws[lo]) if lo > 0 else ws[0]
    upper = brentq(f, ws[hi], ws[hi + 1]) if hi < len(ws) - 1 else ws[-1]
    return 0.5 * (upper - lower) / wm, lower, upper


G2_CONVENTIONS = {
    # held counter-rotating strength, in units of sqrt(2) G
    "g2_half": 0.5,
    "g2_full": 1.0,
}


@dataclass(frozen=True)
class Table1Row:
    gn_ratio: float
    convention: str
    halfwidth: float
    cancellation: float
    damping_ratio: float
    g_max: float
    extras: dict = field(default_factory=dict, compare=False)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.halfwidth, self.cancellation, self.damping_ratio, self.g_max)


def table1_row(params: SystemParams, gn_ratio: float, fixed_g2: str | float = "g2_half") -> Table1Row:
    """Working-range row for the held-``g2`` protocol.

    ``gn_ratio`` is ``g_n / (sqrt(2) G)``; ``fixed_g2`` names the held
    ``g2 / (sqrt(2) G)`` (see ``G2_CONVENTIONS``) or gives it directly. The
    ancilla detuning and linewidth are the matched ones.
    """
    if not 0.0 < gn_ratio < 1.0:
        raise ValueError("gn_ratio must lie in (0, 1)")
    if isinstance(fixed_g2, str):
        name, g2_ratio = fixed_g2, G2_CONVENTIONS[fixed_g2]
    else:
        name, g2_ratio = f"g2={fixed_g2:g}", float(fixed_g2)
    base = matched_ancilla(params)
    factory = fixed_g2_ancilla(gn_ratio, g2_ratio, base.delta_c, base.kappa_c)
    anc = factory(params.big_g)
    halfwidth, lower, upper = positive_damping_halfwidth(params, anc)
    R = cancellation_ratio(params, anc)
    damping = float(optical_spring_cqnc(params.omega_m, params, anc).gamma_eff) / params.gamma_m
    g_max = g_max_search(params, factory, g_hi=2.0)
    return Table1Row(gn_ratio, name, halfwidth, R, damping, g_max, {"lower": lower, "upper": upper})

