import math

import numpy as np
import pytest

from optocqnc.units import (
    HBAR,
    K_B,
    AncillaHardware,
    MembraneMap,
    SIContext,
    TwistedMap,
    ancilla_from_hardware,
    normal_mode_params,
    rescale_force_spectrum,
    thermal_occupation,
    torque_sensitivity,
    twisted_coupling,
)

MEMBRANE = SIContext(mass=48e-15, omega_m_si=2 * math.pi * 10.56e6)
TORQUE = SIContext(mass=427e-18, omega_m_si=2 * math.pi * 4.9e6, mirror_arm_r=7.5e-6, temperature=300.0)


def test_rescale_zero_and_prefactor():
    assert rescale_force_spectrum(0.0, MEMBRANE) == 0.0
    assert MEMBRANE.prefactor == pytest.approx(3.3586224e-40, rel=1e-6)


def test_rescale_preserves_ratios():
    s = np.array([2.0246, 0.0252])
    out = rescale_force_spectrum(s, MEMBRANE)
    assert out[1] / out[0] == pytest.approx(s[1] / s[0], rel=1e-15)


def test_torque_sensitivity_scaling():
    assert torque_sensitivity(0.0, TORQUE) == 0.0
    assert torque_sensitivity(4.0, TORQUE) == pytest.approx(2 * torque_sensitivity(1.0, TORQUE), rel=1e-15)
    with pytest.raises(ValueError, match="mirror_arm_r"):
        torque_sensitivity(1.0, MEMBRANE)


def test_context_rejects_nonpositive():
    with pytest.raises(ValueError):
        SIContext(mass=0.0, omega_m_si=1.0)


def test_normal_modes():
    assert normal_mode_params(MembraneMap(omega=1e15, f=1.0, J=0.0))[:2] == (1e15, 1e15)
    a, b, g = normal_mode_params(MembraneMap(omega=1e15, f=3.0, J=1e9))
    assert a - b == pytest.approx(2e9) and g == 3.0
    assert normal_mode_params(MembraneMap(omega=1.2e15, f=None, J=0.0, L=0.01))[2] == pytest.approx(-1.2e17)


def test_twisted_coupling():
    assert twisted_coupling(TwistedMap(1.5, 1.5, 1e-3)) == 0.0
    assert twisted_coupling(TwistedMap(1.5, 1.6, 1e-3)) < 0
    # independently re-typed: -(c / (16 L sqrt(n_e n_o))) (n_o^-2 - n_e^-2)
    ref = -(299792458.0 / (16 * 1e-3 * math.sqrt(1.6 * 1.5))) * (1 / 1.5**2 - 1 / 1.6**2)
    assert twisted_coupling(TwistedMap(1.5, 1.6, 1e-3)) == pytest.approx(ref, rel=1e-14)
    assert ref == pytest.approx(-650930033.1259075, rel=1e-12)


def test_ancilla_from_hardware():
    assert ancilla_from_hardware(AncillaHardware(0.0, 0.0, 0.0, 0.01)) == (0.0, 0.0)
    g1, g2 = ancilla_from_hardware(AncillaHardware(r=1e-7, l=1e-3, gain=1e-4, L=0.01))
    assert g1 == pytest.approx(2997.92458) and g1 == pytest.approx(g2)
    with pytest.raises(ValueError):
        AncillaHardware(r=1.5, l=0.0, gain=0.0, L=1.0)


def test_thermal_occupation():
    assert thermal_occupation(TORQUE) == pytest.approx(1.2757108756e6, rel=1e-9)
    cold = SIContext(mass=1.0, omega_m_si=2 * math.pi * 4.9e6, temperature=1e-6)
    assert thermal_occupation(cold) < 1e-50
    for T in (1.0, 10.0, 300.0):
        ctx = SIContext(mass=1.0, omega_m_si=2 * math.pi * 4.9e6, temperature=T)
        x = HBAR * ctx.omega_m_si / (K_B * T)
        assert x < 0.1
        assert thermal_occupation(ctx) == pytest.approx(1 / x, rel=0.01)
