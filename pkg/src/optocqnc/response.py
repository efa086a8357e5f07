"""Susceptibilities, optical rigidity and normal-mode frequencies.

All functions accept a scalar or an array of probe frequencies ``omega`` and
return complex numpy values of the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .params import AncillaCoupling, SystemParams

__all__ = [
    "POLE_TOL",
    "SingularResponseError",
    "OpticalSpring",
    "chi_b",
    "chi_m",
    "chi_c",
    "chi_mech_loaded",
    "rigidity_free",
    "rigidity_cqnc",
    "rigidity_cqnc_printed",
    "spring_from_rigidity",
    "optical_spring_free",
    "optical_spring_cqnc",
    "gamma_opt_cqnc_series",
    "nms_eigenfrequencies",
    "nms_approx",
    "im_chi_peaks",
]

POLE_TOL = 1e-14


class SingularResponseError(ArithmeticError):
    """A response function was evaluated on (or within tolerance of) a pole."""

    def __init__(self, what: str, omega):
        self.omega = np.atleast_1d(omega)
        super().__init__(f"{what} is singular at omega={self.omega.tolist()}")


def _check_pole(denom, omega, what: str):
    bad = np.abs(denom) < POLE_TOL
    if np.any(bad):
        raise SingularResponseError(what, np.broadcast_to(omega, np.shape(denom))[bad])


def chi_b(omega, kappa_b: float):
    """Bare probe-mode response ``1 / (kappa_b - i omega)``."""
    return 1.0 / (kappa_b - 1j * np.asarray(omega, dtype=float))


def chi_m(omega, params: SystemParams):
    w = np.asarray(omega, dtype=float)
    wm = params.omega_m
    return wm / (wm**2 - w**2 - 1j * w * params.gamma_m)


def chi_c(omega, ancilla: AncillaCoupling):
    """Ancilla response ``delta_c / ((kappa_c - i omega)^2 + delta_c^2)``."""
    s = ancilla.kappa_c - 1j * np.asarray(omega, dtype=float)
    return ancilla.delta_c / (s**2 + ancilla.delta_c**2)


def _mech_inverse(omega, params: SystemParams):
    w = np.asarray(omega, dtype=float)
    wm = params.omega_m
    return (wm**2 - 1j * w * params.gamma_m - w**2) / wm


def rigidity_free(omega, params: SystemParams):
    s = params.kappa_b - 1j * np.asarray(omega, dtype=float)
    return -2.0 * params.big_g**2 * params.delta_b / (s**2 + params.delta_b**2)


def chi_mech_loaded(omega, params: SystemParams):
    """Mechanical susceptibility dressed by the probe mode.

    Raises
    ------
    SingularResponseError
        If the inverse susceptibility vanishes (parametric pole).
    """
    bracket = _mech_inverse(omega, params) + rigidity_free(omega, params)
    _check_pole(bracket, omega, "chi_mech_loaded")
    return 1.0 / bracket


def rigidity_cqnc(omega, params: SystemParams, ancilla: AncillaCoupling):
    """Optical rigidity with the ancilla attached.

    For ``g_n == 0`` this is the balanced closed form
    ``-2 G^2 D_b / ((k_b - i w)^2 + D_b^2 - g_c^2 D_b chi_c)``. Otherwise the
    general expression obtained by eliminating both optical modes is used::

        -2 G^2 (D_b - g_n^2 chi_c) /
        [ s_b^2 + D_b^2 - g_c^2 D_b chi_c
          + (2 g_c g_n s_b s_c + g_n^2 (g_c^2 - D_b D_c)) chi_c / D_c ]

    with ``s_b = k_b - i w`` and ``s_c = k_c - i w``. The ``chi_c / D_c``
    factor is evaluated as ``1 / (s_c^2 + D_c^2)`` so ``D_c = 0`` is regular.
    """
    w = np.asarray(omega, dtype=float)
    G2 = params.big_g**2
    db, dc = params.delta_b, ancilla.delta_c
    gc, gn = ancilla.g_c, ancilla.g_n
    sb = params.kappa_b - 1j * w
    sc = ancilla.kappa_c - 1j * w
    lorentz_c = 1.0 / (sc**2 + dc**2)
    cc = dc * lorentz_c
    if gn == 0.0:
        denom = sb**2 + db**2 - gc**2 * db * cc
        _check_pole(denom, omega, "rigidity_cqnc")
        return -2.0 * G2 * db / denom
    denom = (
        sb**2
        + db**2
        - gc**2 * db * cc
        + (2.0 * gc * gn * sb * sc + gn**2 * (gc**2 - db * dc)) * lorentz_c
    )
    _check_pole(denom, omega, "rigidity_cqnc")
    return -2.0 * G2 * (db - gn**2 * cc) / denom


def rigidity_cqnc_printed(omega, params: SystemParams, ancilla: AncillaCoupling):
    """Alternative closed form of the imbalanced rigidity.

    Kept as a diagnostic only. It agrees with :func:`rigidity_cqnc` at
    ``g_n = 0`` but its ``g_n**2`` terms carry a factor
    ``-i (k_c + i w) / (k_c - i w)`` where the exact elimination gives 1.
    """
    w = np.asarray(omega, dtype=float)
    G2 = params.big_g**2
    db, dc = params.delta_b, ancilla.delta_c
    gc, gn = ancilla.g_c, ancilla.g_n
    cb = chi_b(w, params.kappa_b)
    cc = chi_c(w, ancilla)
    cn = 1.0 / (ancilla.kappa_c - 1j * w)
    cp_inv = ancilla.kappa_c + 1j * w
    num = 2.0 * G2 * dc * cb**2 * (db + 1j * gn**2 * cp_inv * cn * cc)
    den = -dc * (1.0 + db**2 * cb**2 + gn * gc * cb * cn) + cb * cc * (
        gc**2 * db * dc * cb
        + 1j * gn**2 * (gc**2 - db * dc) * cp_inv * cn * cb
        + gn * gc * (dc**2 * cn - 1.0 / cn)
    )
    return num / den


@dataclass(frozen=True)
class OpticalSpring:
    """Frequency shift and damping extracted from a rigidity."""

    omega: np.ndarray
    delta_omega_m: np.ndarray
    gamma_opt: np.ndarray
    omega_eff_sq: np.ndarray
    gamma_eff: np.ndarray


def spring_from_rigidity(omega, sigma, params: SystemParams) -> OpticalSpring:
    """Split ``sigma = (2 w dw_m - i w gamma_opt) / omega_m`` into its parts."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("omega must be positive to extract the optical spring")
    wm = params.omega_m
    sigma = np.asarray(sigma)
    dwm = sigma.real * wm / (2.0 * w)
    gopt = -sigma.imag * wm / w
    return OpticalSpring(
        omega=w,
        delta_omega_m=dwm,
        gamma_opt=gopt,
        omega_eff_sq=wm**2 + 2.0 * w * dwm,
        gamma_eff=params.gamma_m + gopt,
    )


def optical_spring_free(omega, params: SystemParams) -> OpticalSpring:
    return spring_from_rigidity(omega, rigidity_free(omega, params), params)


def optical_spring_cqnc(omega, params: SystemParams, ancilla: AncillaCoupling) -> OpticalSpring:
    return spring_from_rigidity(omega, rigidity_cqnc(omega, params, ancilla), params)


def gamma_opt_cqnc_series(params: SystemParams, ancilla: AncillaCoupling) -> float:
    """Leading-order small-linewidth estimate ``-2 k_c + 4 k_b k_c^2 / G^2``.

    Only meaningful for the matched, balanced configuration; compare with
    :func:`optical_spring_cqnc` for the exact value.
    """
    kc = ancilla.kappa_c
    return -2.0 * kc + 4.0 * params.kappa_b * kc**2 / params.big_g**2


def _sort_pair(a: complex, b: complex) -> tuple[complex, complex]:
    return (a, b) if a.real >= b.real else (b, a)


def _right_half(z: complex) -> complex:
    return -z if z.real < 0 else z


def nms_eigenfrequencies(params: SystemParams) -> tuple[complex, complex]:
    """Normal-mode frequencies of the probe/mechanics pair (exact branch).

    Uses ``D' = delta_b - i kappa_b`` and ``W' = omega_m - i gamma_m``::

        w_pm^2 = (D'^2 + W'^2)/2 +- sqrt((D'^2 - W'^2)^2 + 8 G^2 W' D') / 2

    Principal square roots, reflected into ``Re >= 0`` and ordered by
    descending real part.
    """
    d = complex(params.delta_b, -params.kappa_b)
    m = complex(params.omega_m, -params.gamma_m)
    root = np.sqrt(complex((d**2 - m**2) ** 2 + 8.0 * params.big_g**2 * m * d))
    mean = 0.5 * (d**2 + m**2)
    plus = _right_half(complex(np.sqrt(mean + 0.5 * root)))
    minus = _right_half(complex(np.sqrt(mean - 0.5 * root)))
    return _sort_pair(plus, minus)


def nms_approx(params: SystemParams) -> tuple[complex, complex]:
    """High-Q, resolved-sideband approximation ``sqrt(w_m^2 +- sqrt(2 G^2 D_b w_m))``."""
    wm = params.omega_m
    split = np.sqrt(complex(2.0 * params.big_g**2 * params.delta_b * wm))
    plus = _right_half(complex(np.sqrt(wm**2 + split)))
    minus = _right_half(complex(np.sqrt(wm**2 - split)))
    return _sort_pair(plus, minus)


def im_chi_peaks(omega, params: SystemParams, prominence: float = 0.05) -> np.ndarray:
    """Frequencies of the local maxima of ``|Im chi_mech_loaded|``.

    Peaks smaller than ``prominence`` times the global maximum are ignored.
    ``omega`` should be a fine, increasing grid.
    """
    w = np.asarray(omega, dtype=float)
    y = np.abs(chi_mech_loaded(w, params).imag)
    idx, _ = find_peaks(y, prominence=prominence * y.max())
    return w[idx]
