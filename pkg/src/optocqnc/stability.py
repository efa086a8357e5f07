"""Routh-Hurwitz and eigenvalue stability of the linearized dynamics.

The free system uses the state ordering ``[b, b+, x, p]``; with the ancilla
attached it is ``[b, b+, c, c+, x, p]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .params import AncillaCoupling, SystemParams

__all__ = [
    "IMAG_TOL",
    "MARGIN_BAND",
    "JacobianSpec",
    "StabilityReport",
    "jacobian",
    "characteristic_coefficients",
    "coefficients_free",
    "coefficients_balanced",
    "numeric_coefficients",
    "hurwitz_matrix",
    "hurwitz_determinants",
    "binding_constraint",
    "hurwitz_stable",
    "eigen_stability",
    "alpha_bound_free",
    "g_max_free",
    "scaled_ancilla",
    "fixed_g2_ancilla",
    "fixed_gc_ancilla",
    "g_max_search",
]

IMAG_TOL = 1e-10
MARGIN_BAND = 1e-8


@dataclass(frozen=True)
class JacobianSpec:
    params: SystemParams
    ancilla: AncillaCoupling | None = None

    @property
    def dimension(self) -> int:
        return 4 if self.ancilla is None else 6

    @property
    def ordering(self) -> tuple[str, ...]:
        if self.ancilla is None:
            return ("b", "b+", "x", "p")
        return ("b", "b+", "c", "c+", "x", "p")

    @property
    def entries(self) -> np.ndarray:
        return jacobian(self.params, self.ancilla)


def jacobian(params: SystemParams, ancilla: AncillaCoupling | None = None) -> np.ndarray:
    """Drift matrix of the linearized Langevin equations (``G`` taken real)."""
    db, kb, G = params.delta_b, params.kappa_b, params.big_g
    wm, gm = params.omega_m, params.gamma_m
    if ancilla is None:
        return np.array(
            [
                [-1j * db - kb, 0, -1j * G, 0],
                [0, 1j * db - kb, 1j * G, 0],
                [0, 0, 0, wm],
                [-G, -G, -wm, -gm],
            ],
            dtype=complex,
        )
    g1, g2 = ancilla.g1, ancilla.g2
    dc, kc = ancilla.delta_c, ancilla.kappa_c
    return np.array(
        [
            [-1j * db - kb, 0, -1j * g1, -1j * g2, -1j * G, 0],
            [0, 1j * db - kb, 1j * g2, 1j * g1, 1j * G, 0],
            [-1j * g1, -1j * g2, -1j * dc - kc, 0, 0, 0],
            [1j * g2, 1j * g1, 0, 1j * dc - kc, 0, 0],
            [0, 0, 0, 0, 0, wm],
            [-G, -G, 0, 0, -wm, -gm],
        ],
        dtype=complex,
    )


def coefficients_free(params: SystemParams) -> np.ndarray:
    db, kb, G = params.delta_b, params.kappa_b, params.big_g
    wm, gm = params.omega_m, params.gamma_m
    return np.array(
        [
            1.0,
            gm + 2 * kb,
            db**2 + 2 * gm * kb + kb**2 + wm**2,
            gm * (db**2 + kb**2) + 2 * kb * wm**2,
            -2 * G**2 * db * wm + wm**2 * (db**2 + kb**2),
        ]
    )


def coefficients_balanced(params: SystemParams, ancilla: AncillaCoupling) -> np.ndarray:
    """Closed-form sextic coefficients for ``g1 == g2``."""
    db, kb, G = params.delta_b, params.kappa_b, params.big_g
    wm, gm = params.omega_m, params.gamma_m
    dc, kc, gc = ancilla.delta_c, ancilla.kappa_c, ancilla.g_c
    ks = kb + kc
    a1 = gm + 2 * ks
    a2 = wm**2 + db**2 + dc**2 + 2 * (gm * kc + gm * kb + kc * kb) + ks**2
    a3 = (
        db**2 * (gm + 2 * kc)
        + dc**2 * (gm + 2 * kb)
        + 2 * wm**2 * ks
        + gm * ks**2
        + 2 * kb * kc * (gm + kb + kc)
    )
    a4 = (
        -db * (2 * G**2 * wm + gc**2 * dc)
        + dc**2 * wm**2
        + db**2 * wm**2
        + db**2 * dc**2
        + wm**2 * (ks**2 + 2 * kb * kc)
        + db**2 * kc * (2 * gm + kc)
        + dc**2 * kb * (2 * gm + kb)
        + kb * kc * (2 * gm * kb + 2 * gm * kc + kb * kc)
    )
    a5 = (
        -db * (4 * G**2 * wm * kc + gc**2 * dc * gm)
        + gm * (db**2 + kb**2) * (dc**2 + kc**2)
        + 2 * wm**2 * (dc**2 * kb + db**2 * kc + kc * kb * ks)
    )
    a6 = -db * wm * (gc**2 * dc * wm + 2 * G**2 * (dc**2 + kc**2)) + wm**2 * (db**2 + kb**2) * (
        dc**2 + kc**2
    )
    return np.array([1.0, a1, a2, a3, a4, a5, a6])


def numeric_coefficients(matrix: np.ndarray) -> np.ndarray:
    """Coefficients of ``det(lambda I - A)`` from the eigenvalues of ``A``.

    Raises
    ------
    ValueError
        If the polynomial has an imaginary residue above ``IMAG_TOL``.
    """
    poly = np.poly(np.linalg.eigvals(matrix))
    scale = np.maximum(1.0, np.abs(poly))
    if np.any(np.abs(poly.imag) > IMAG_TOL * scale):
        raise ValueError(f"characteristic polynomial not real: max imag {np.abs(poly.imag).max():.3e}")
    return poly.real.copy()


def characteristic_coefficients(spec: JacobianSpec) -> np.ndarray:
    if spec.ancilla is None:
        return coefficients_free(spec.params)
    if spec.ancilla.balanced:
        return coefficients_balanced(spec.params, spec.ancilla)
    return numeric_coefficients(spec.entries)


def hurwitz_matrix(coefficients) -> np.ndarray:
    a = np.asarray(coefficients, dtype=float)
    n = len(a) - 1
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            k = 2 * (j + 1) - (i + 1)
            if 0 <= k <= n:
                H[i, j] = a[k]
    return H


def _det_exact(rows: list[list[Fraction]]) -> Fraction:
    m = [r[:] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def hurwitz_determinants(coefficients) -> np.ndarray:
    """Leading principal minors ``D_1 .. D_n`` of the Hurwitz matrix.

    The minors are evaluated in exact rational arithmetic on the given
    floating-point coefficients, so ``D_n == D_{n-1} a_n`` holds exactly and
    the sign of tiny minors is not at the mercy of LU rounding.
    """
    a = np.asarray(coefficients, dtype=float)
    if a[0] != 1.0:
        raise ValueError("leading coefficient must be 1")
    H = hurwitz_matrix(a)
    Hq = [[Fraction(float(x)) for x in row] for row in H]
    n = len(a) - 1
    return np.array([float(_det_exact([r[:k] for r in Hq[:k]])) for k in range(1, n + 1)])


def binding_constraint(coefficients, determinants) -> str:
    """Name of the first non-positive minor, or ``"none"``.

    When only the last minor fails, it factors as ``D_{n-1} a_n``, so the
    constant coefficient is named instead.
    """
    d = np.asarray(determinants)
    n = len(d)
    for k in range(n):
        if d[k] <= 0:
            if k == n - 1 and (n == 1 or d[n - 2] > 0):
                return f"a_{n}"
            return f"D{k + 1}"
    return "none"


def hurwitz_stable(coefficients) -> bool:
    return bool(np.all(hurwitz_determinants(coefficients) > 0))


@dataclass
class StabilityReport:
    coefficients: np.ndarray
    hurwitz_determinants: np.ndarray
    eigenvalues: np.ndarray
    stable: bool
    hurwitz_verdict: bool
    eigen_verdict: bool
    margin: float
    binding_constraint: str
    notes: list[str] = field(default_factory=list)

    @property
    def routes_agree(self) -> bool:
        return self.hurwitz_verdict == self.eigen_verdict

    def summary(self) -> str:
        lines = [
            f"stable: {self.stable} (hurwitz={self.hurwitz_verdict}, eigen={self.eigen_verdict})",
            f"max Re(lambda): {-self.margin:.6e}",
            f"binding constraint: {self.binding_constraint}",
            "coefficients: " + ", ".join(f"{c:.6e}" for c in self.coefficients),
            "hurwitz determinants: " + ", ".join(f"{d:.6e}" for d in self.hurwitz_determinants),
        ]
        lines.extend(self.notes)
        return "\n".join(lines)


def eigen_stability(spec: JacobianSpec) -> StabilityReport:
    """Eigenvalue verdict plus the Hurwitz route for the same Jacobian."""
    A = spec.entries
    try:
        eig = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK non-convergence
        raise ArithmeticError(f"eigenvalue solver failed: {exc}") from exc
    max_re = float(eig.real.max())
    coeffs = characteristic_coefficients(spec)
    dets = hurwitz_determinants(coeffs)
    hv = bool(np.all(dets > 0))
    ev = max_re < 0
    notes = []
    if hv != ev:
        notes.append(f"routes disagree; |max Re| = {abs(max_re):.3e}")
    if spec.ancilla is None:
        p = spec.params
        last_ok = p.delta_b < 0 or p.big_g**2 < (p.delta_b**2 + p.kappa_b**2) * p.omega_m / (2.0 * abs(p.delta_b))
        notes.append(f"last-coefficient bound on G: {'satisfied' if last_ok else 'violated'}")
        s = p.kappa_b - 1j * p.omega_m
        sigma = -2.0 * p.big_g**2 * p.delta_b / (s**2 + p.delta_b**2)
        notes.append(f"effective damping at omega_m: {p.gamma_m - sigma.imag:.6e}")
    return StabilityReport(
        coefficients=coeffs,
        hurwitz_determinants=dets,
        eigenvalues=eig,
        stable=ev,
        hurwitz_verdict=hv,
        eigen_verdict=ev,
        margin=-max_re,
        binding_constraint=binding_constraint(coeffs, dets),
        notes=notes,
    )


def alpha_bound_free(params: SystemParams, g_bare: float) -> float:
    """Upper bound on ``|alpha|^2`` for the free system.

    Red detuning gives ``(D_b^2 + k_b^2) w_m / (2 |D_b| g^2)``; blue detuning
    is unconditionally stable and returns ``inf``.
    """
    if params.delta_b == 0:
        raise ValueError("bound is degenerate at delta_b == 0")
    if g_bare <= 0:
        raise ValueError("g_bare must be positive")
    if params.delta_b < 0:
        return math.inf
    db = params.delta_b
    return (db**2 + params.kappa_b**2) * params.omega_m / (2.0 * abs(db) * g_bare**2)


def g_max_free(params: SystemParams) -> float:
    """Same bound expressed on ``G = |alpha| g``."""
    return math.sqrt(alpha_bound_free(params, 1.0))


AncillaFactory = Callable[[float], AncillaCoupling]


def scaled_ancilla(params: SystemParams, ancilla: AncillaCoupling) -> AncillaFactory:
    """Keep ``g1/G`` and ``g2/G`` fixed while ``G`` varies."""
    G0 = params.big_g
    if G0 <= 0:
        raise ValueError("need G > 0 to infer coupling ratios")
    r1, r2 = ancilla.g1 / G0, ancilla.g2 / G0

    def make(G: float) -> AncillaCoupling:
        return ancilla.with_(g1=r1 * G, g2=r2 * G)

    return make


def fixed_g2_ancilla(
    gn_ratio: float, g2_ratio: float, delta_c: float, kappa_c: float
) -> AncillaFactory:
    """``g2 = g2_ratio sqrt(2) G`` held, ``g1 = g2 + gn_ratio sqrt(2) G``."""

    def make(G: float) -> AncillaCoupling:
        u = math.sqrt(2.0) * G
        g2 = g2_ratio * u
        return AncillaCoupling(g1=g2 + gn_ratio * u, g2=g2, delta_c=delta_c, kappa_c=kappa_c)

    return make


def fixed_gc_ancilla(gn_ratio: float, delta_c: float, kappa_c: float) -> AncillaFactory:
    """``g_c = sqrt(2) G`` held, ``g_n = gn_ratio sqrt(2) G``."""

    def make(G: float) -> AncillaCoupling:
        u = math.sqrt(2.0) * G
        return AncillaCoupling.from_gc_gn(u, gn_ratio * u, delta_c, kappa_c)

    return make


def _stable_at(params: SystemParams, factory: AncillaFactory | None, G: float) -> bool:
    p = params.with_(big_g=G)
    spec = JacobianSpec(p, None if factory is None else factory(G))
    return hurwitz_stable(characteristic_coefficients(spec))


def g_max_search(
    params: SystemParams,
    ancilla: AncillaCoupling | AncillaFactory | None = None,
    *,
    g_hi: float = 2.0,
    tol: float = 1e-4,
    scan_points: int = 400,
) -> float:
    """Smallest ``G`` at which the Hurwitz criterion first fails.

    ``ancilla`` may be a fixed coupling (its ratios to ``params.big_g`` are
    kept as ``G`` varies), a factory ``G -> AncillaCoupling`` or ``None`` for
    the free system. A coarse scan of ``(0, g_hi]`` locates the first
    stable-to-unstable transition, which is then bisected to ``tol``.
    Returns ``inf`` if the system stays stable on the whole range.

    Raises
    ------
    ArithmeticError
        If the system is already unstable at the lower end of the scan.
    """
    if isinstance(ancilla, AncillaCoupling):
        factory: AncillaFactory | None = scaled_ancilla(params, ancilla)
    else:
        factory = ancilla
    grid = np.linspace(g_hi / scan_points, g_hi, scan_points)
    if not _stable_at(params, factory, float(grid[0])):
        raise ArithmeticError(f"unstable already at G={grid[0]:.3g}")
    lo = float(grid[0])
    hi = None
    for G in grid[1:]:
        if _stable_at(params, factory, float(G)):
            lo = float(G)
        else:
            hi = float(G)
            break
    if hi is None:
        return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _stable_at(params, factory, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
