import numpy as np
import pytest

from optocqnc import oracle
from optocqnc.params import AncillaCoupling, SystemParams
from optocqnc.spectra import noise_spectrum_cqnc, noise_spectrum_free, transfer_functions
from optocqnc.stability import jacobian


def test_drift_is_jacobian(canonical, matched):
    assert np.array_equal(oracle.build_system(canonical).drift, jacobian(canonical))
    assert np.array_equal(oracle.build_system(canonical, matched).drift, jacobian(canonical, matched))


def test_vacuum_correlation_table(canonical, matched):
    corr = oracle.vacuum_correlations(oracle.build_system(canonical, matched))
    expect = np.zeros((5, 5))
    expect[0, 1] = expect[2, 3] = 1.0
    expect[4, 4] = canonical.s_th
    assert np.array_equal(corr.table, expect)


def test_no_transduction_without_coupling(canonical):
    row = oracle.solve_frequency(oracle.build_system(canonical.with_(big_g=0.0)), 1.1)
    assert row[-1] == 0


def test_zero_signal_report(canonical):
    system = oracle.build_system(canonical.with_(big_g=0.0))
    with pytest.raises(ZeroDivisionError):
        oracle.spectrum_from_statespace(system, 1.1)


def test_force_coefficient_matches_closed_form(canonical):
    cf = oracle.solve_frequency(oracle.build_system(canonical), 1.0)[-1]
    assert cf == pytest.approx(complex(transfer_functions(1.0, canonical).chi_f), rel=1e-9)


def test_conjugate_pair_structure(canonical):
    system = oracle.build_system(canonical)
    w = 0.93
    plus = oracle.solve_frequency(system, w)
    minus = oracle.solve_frequency(system, -w)
    # b_in and b_in+ swap under conjugation combined with omega -> -omega
    assert plus[0] == pytest.approx(np.conj(minus[1]), rel=1e-12)
    assert plus[1] == pytest.approx(np.conj(minus[0]), rel=1e-12)


def test_free_spectrum_on_grid(canonical):
    w = np.linspace(0.5, 1.5, 200)
    ref = oracle.spectrum_from_statespace(oracle.build_system(canonical), w)
    assert np.allclose(noise_spectrum_free(w, canonical).total, ref, rtol=1e-9, atol=0)


def test_balanced_spectrum_on_grid(canonical, matched):
    w = np.linspace(0.5, 1.5, 200)
    ref = oracle.spectrum_from_statespace(oracle.build_system(canonical, matched), w)
    assert np.allclose(noise_spectrum_cqnc(w, canonical, matched).total, ref, rtol=1e-9, atol=0)


def test_decoupled_ancilla_equals_free_system(canonical):
    anc = AncillaCoupling(0.0, 0.0, -1.0, 6e-4)
    free = oracle.build_system(canonical)
    six = oracle.build_system(canonical, anc)
    for w in (0.6, 1.0, 1.3):
        assert oracle.spectrum_from_statespace(six, w) == pytest.approx(oracle.spectrum_from_statespace(free, w), rel=1e-12)


def test_spectrum_real_and_nonnegative(canonical):
    anc = AncillaCoupling(0.25, 0.05, -0.8, 1e-3)
    system = oracle.build_system(canonical, anc)
    for w in np.linspace(0.5, 1.5, 51):
        parts = oracle.spectrum_parts(system, float(w))
        assert parts["total"] >= 0
        assert parts["thermal"] == pytest.approx(canonical.s_th)


def test_input_scaling_audit(canonical, matched):
    base = oracle.build_system(canonical, matched)
    scaled = oracle.build_system(canonical, matched, input_scale=2.0)
    for w in (0.9, 1.0, 1.2):
        a = oracle.spectrum_parts(base, w)
        b = oracle.spectrum_parts(scaled, w)
        assert b["probe"] == pytest.approx(4 * a["probe"], rel=1e-9)
        assert b["ancilla"] == pytest.approx(4 * a["ancilla"], rel=1e-9)
        assert b["thermal"] == pytest.approx(a["thermal"], rel=1e-12)


def test_singular_resolvent_reported():
    # undamped, uncoupled oscillator probed exactly at its frequency
    p = SystemParams(gamma_m=0.0, kappa_b=0.01, delta_b=-1.0, big_g=0.0)
    with pytest.raises(np.linalg.LinAlgError, match="cond"):
        oracle.solve_frequency(oracle.build_system(p), 1.0)
