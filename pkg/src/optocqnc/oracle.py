"""Direct state-space evaluation of transfer functions and noise spectra.

Independent of the closed forms in :mod:`optocqnc.spectra`: the frequency
domain Langevin system ``-i w W = A W + B u`` is inverted numerically and
the homodyne output is assembled through the input-output relation. The
Fourier convention is ``O(w) = (1/2 pi) int O(t) exp(i w t) dt``.

Inputs are kept in the annihilation/creation basis, ordered
``[b_in, b_in+, (c_in, c_in+,) F]``. The only nonzero vacuum pairing is
``<o_in(w) o_in+(w')> = delta(w + w')``; the force channel carries the flat
Brownian spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import AncillaCoupling, SystemParams
from .stability import jacobian

__all__ = [
    "ZERO_SIGNAL_TOL",
    "LinearSystem",
    "NoiseCorrelations",
    "build_system",
    "vacuum_correlations",
    "solve_frequency",
    "quadrature_coefficients",
    "spectrum_from_statespace",
    "spectrum_parts",
    "mechanical_response",
    "rigidity_from_statespace",
]

ZERO_SIGNAL_TOL = 1e-30
_SQ2 = np.sqrt(2.0)


@dataclass(frozen=True)
class LinearSystem:
    """``dW/dt = A W + B u`` with measured output ``M = C W + D u``.

    ``labels`` names the input channels; the force channel is last.
    """

    drift: np.ndarray
    input_map: np.ndarray
    output_row: np.ndarray
    feedthrough: np.ndarray
    labels: tuple[str, ...]
    params: SystemParams
    ancilla: AncillaCoupling | None = None

    @property
    def force_index(self) -> int:
        return len(self.labels) - 1


@dataclass(frozen=True)
class NoiseCorrelations:
    """``table[k, l]`` is the weight of ``delta(w + w')`` in ``<u_k(w) u_l(w')>``."""

    table: np.ndarray
    labels: tuple[str, ...]


def build_system(
    params: SystemParams,
    ancilla: AncillaCoupling | None = None,
    phi: float = 0.0,
    input_scale: float = 1.0,
) -> LinearSystem:
    """Assemble the free (4-state) or ancilla-coupled (6-state) system.

    ``input_scale`` multiplies every optical input path (both the
    ``sqrt(2 kappa)`` injection and the reflected feedthrough); it exists for
    linearity audits and is 1 for physical use.
    """
    A = jacobian(params, ancilla)
    n = A.shape[0]
    sb = np.sqrt(2.0 * params.kappa_b) * input_scale
    if ancilla is None:
        labels = ("b_in", "b_in+", "F")
        B = np.zeros((n, 3), dtype=complex)
        B[0, 0] = sb
        B[1, 1] = sb
        B[3, 2] = 1.0
    else:
        labels = ("b_in", "b_in+", "c_in", "c_in+", "F")
        sc = np.sqrt(2.0 * ancilla.kappa_c) * input_scale
        B = np.zeros((n, 5), dtype=complex)
        B[0, 0] = sb
        B[1, 1] = sb
        B[2, 2] = sc
        B[3, 3] = sc
        B[5, 4] = 1.0
    # x_b = (b + b+)/sqrt2, p_b = (b - b+)/(sqrt2 i); M = sin(phi) x_out + cos(phi) p_out
    x_row = np.array([1.0, 1.0]) / _SQ2
    p_row = np.array([1.0, -1.0]) / (_SQ2 * 1j)
    quad = np.sin(phi) * x_row + np.cos(phi) * p_row
    C = np.zeros(n, dtype=complex)
    C[:2] = np.sqrt(2.0 * params.kappa_b) * quad
    D = np.zeros(len(labels), dtype=complex)
    D[:2] = -quad * input_scale
    return LinearSystem(A, B, C, D, labels, params, ancilla)


def vacuum_correlations(system: LinearSystem) -> NoiseCorrelations:
    m = len(system.labels)
    table = np.zeros((m, m))
    table[0, 1] = 1.0
    if system.ancilla is not None:
        table[2, 3] = 1.0
    table[-1, -1] = system.params.s_th
    return NoiseCorrelations(table, system.labels)


def _resolvent(system: LinearSystem, omega: float) -> np.ndarray:
    n = system.drift.shape[0]
    K = -1j * omega * np.eye(n) - system.drift
    cond = np.linalg.cond(K)
    if not np.isfinite(cond) or cond > 1e15:
        raise np.linalg.LinAlgError(f"(-i w I - A) singular at omega={omega}: cond={cond:.3e}")
    return np.linalg.solve(K, system.input_map)


def solve_frequency(system: LinearSystem, omega: float) -> np.ndarray:
    """Transfer coefficients from every input channel to the output ``M(w)``."""
    return system.output_row @ _resolvent(system, omega) + system.feedthrough


def quadrature_coefficients(system: LinearSystem, omega: float) -> tuple[complex, complex, complex]:
    """``(chi_F, chi_x, chi_p)`` rebuilt from the operator-basis row."""
    row = solve_frequency(system, omega)
    c1, c2 = row[0], row[1]
    return row[system.force_index], (c1 + c2) / _SQ2, 1j * (c1 - c2) / _SQ2


def _force_noise_row(system: LinearSystem, omega: float) -> np.ndarray:
    row = solve_frequency(system, omega)
    chi_f = row[system.force_index]
    if abs(chi_f) < ZERO_SIGNAL_TOL:
        raise ZeroDivisionError(f"signal transfer vanishes at omega={omega}")
    # F_N = M / chi_F - F_ext: the force channel now stands for the Brownian term
    return row / chi_f


def _pair_sum(cp: np.ndarray, cm: np.ndarray, table: np.ndarray, idx) -> complex:
    total = 0.0 + 0.0j
    for k in idx:
        for l in idx:
            if table[k, l] != 0.0:
                total += cp[k] * cm[l] * table[k, l]
    return total


def spectrum_parts(system: LinearSystem, omega: float, correlations: NoiseCorrelations | None = None) -> dict[str, float]:
    """Symmetrized force-noise spectrum split by input channel group."""
    corr = correlations or vacuum_correlations(system)
    cp = _force_noise_row(system, omega)
    cm = _force_noise_row(system, -omega)
    groups = {"thermal": [system.force_index], "probe": [0, 1]}
    if system.ancilla is not None:
        groups["ancilla"] = [2, 3]
    out = {}
    for name, idx in groups.items():
        s = 0.5 * (_pair_sum(cp, cm, corr.table, idx) + _pair_sum(cm, cp, corr.table, idx))
        out[name] = s
    out["total"] = sum(out.values())
    if any(abs(v.imag) > 1e-9 * max(1.0, abs(v.real)) for v in out.values()):
        raise ArithmeticError(f"symmetrized spectrum not real at omega={omega}")
    return {k: float(v.real) for k, v in out.items()}


def spectrum_from_statespace(system: LinearSystem, omega, correlations: NoiseCorrelations | None = None):
    """``S(w) = (S_FF(w) + S_FF(-w)) / 2`` for scalar or array ``omega``."""
    w = np.asarray(omega, dtype=float)
    flat = [spectrum_parts(system, float(x), correlations)["total"] for x in w.ravel()]
    return np.asarray(flat).reshape(w.shape) if w.ndim else flat[0]


def mechanical_response(system: LinearSystem, omega: float) -> complex:
    """Displacement response ``x(w) / F(w)`` of the full coupled system."""
    T = _resolvent(system, omega)
    x_index = system.drift.shape[0] - 2
    return complex(T[x_index, system.force_index])


def rigidity_from_statespace(system: LinearSystem, omega: float) -> complex:
    """Optical rigidity implied by the coupled mechanical response."""
    p = system.params
    bare_inv = (p.omega_m**2 - 1j * omega * p.gamma_m - omega**2) / p.omega_m
    return 1.0 / mechanical_response(system, omega) - bare_inv
