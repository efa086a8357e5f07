import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optocqnc.params import (
    AncillaCoupling,
    HomodyneSettings,
    NoiseModel,
    PumpParams,
    SystemParams,
    enhanced_coupling,
    matched_ancilla,
    steady_alpha,
    validate,
)

pos = st.floats(1e-4, 10.0)


def test_s_th_is_twice_gamma_n_th(canonical):
    assert canonical.s_th == 2 * 1.2e-3 * 10.0
    assert NoiseModel(canonical).s_th == canonical.s_th


@given(gamma=pos, n=st.floats(0, 1e6))
def test_s_th_property(gamma, n):
    p = SystemParams(gamma, 0.01, -1.0, 0.2, n)
    assert p.s_th == 2.0 * gamma * n


def test_valid_canonical_has_no_violations(canonical, matched):
    report = validate(canonical, matched)
    assert report.ok and bool(report) and report.violations == []
    assert str(report) == "valid"


def test_validate_collects_every_violation():
    p = SystemParams(gamma_m=-1.0, kappa_b=0.0, delta_b=-1.0, big_g=-0.1, n_th=-2.0)
    anc = AncillaCoupling(g1=-0.1, g2=0.2, delta_c=-1.0, kappa_c=0.0)
    report = validate(p, anc)
    for msg in (
        "gamma_m > 0 violated",
        "kappa_b > 0 violated",
        "big_g >= 0 violated",
        "n_th >= 0 violated",
        "g1 >= 0 violated",
        "kappa_c > 0 violated",
    ):
        assert msg in report.violations
    assert not report


def test_validate_flags_nonfinite():
    report = validate(SystemParams(1e-3, math.nan, -1.0, 0.2))
    assert "kappa_b finite violated" in report.violations


def test_validate_does_not_mutate(canonical):
    before = canonical
    validate(canonical)
    assert canonical == before


def test_steady_alpha_solves_linear_equation():
    pump = PumpParams(delta_a=0.3, kappa_a=0.7, drive_E=2.0, g_bare=0.01)
    a = steady_alpha(pump)
    assert abs((1j * pump.delta_a + pump.kappa_a) * a - pump.drive_E) < 1e-15
    assert abs(abs(a) ** 2 - 4.0 / (0.09 + 0.49)) < 1e-14


def test_steady_alpha_rejects_nonpositive_kappa():
    with pytest.raises(ValueError):
        steady_alpha(PumpParams(0.0, 0.0, 1.0, 1.0))


def test_enhanced_coupling():
    pump = PumpParams(delta_a=0.0, kappa_a=2.0, drive_E=10.0, g_bare=0.04)
    assert enhanced_coupling(pump) == pytest.approx(0.2, rel=1e-15)


@given(G=st.floats(0.0, 5.0), gamma=pos)
@settings(max_examples=50)
def test_matched_ancilla_invariants(G, gamma):
    p = SystemParams(gamma, 0.01, -1.0, G)
    a = matched_ancilla(p)
    assert a.g_n == 0.0
    assert a.balanced
    assert a.g_c == pytest.approx(math.sqrt(2) * G, rel=1e-15, abs=1e-300)
    assert a.delta_c == -1.0
    assert a.kappa_c == gamma / 2


def test_gc_gn_round_trip():
    a = AncillaCoupling.from_gc_gn(0.3, 0.1, -1.0, 1e-3)
    assert a.g1 == pytest.approx(0.2) and a.g2 == pytest.approx(0.1)
    assert a.g_c == pytest.approx(0.3) and a.g_n == pytest.approx(0.1)


def test_homodyne_phase_range():
    HomodyneSettings(0.0)
    with pytest.raises(ValueError):
        HomodyneSettings(2 * math.pi)
