import math

import pytest

import cqt


def fig1a():
    return cqt.symmetric_model(6, 0.0, 0.1, 10.0, 4.0, 2.0)


def test_steady_state_is_edge_peaked():
    p = cqt.steady_state(fig1a())
    assert len(p) == 7
    assert math.isclose(sum(p), 1.0, rel_tol=1e-12)
    assert p[0] == pytest.approx(p[6], rel=1e-12)
    assert min(p) == p[3]


def test_single_qubit_rates_and_flux():
    m = cqt.symmetric_model(1, 0.0, 0.1, 10.0, 4.0, 2.0)
    r = cqt.rates(m)
    assert r["kappa_plus"][0] == pytest.approx(0.304070, abs=5e-7)
    c = cqt.cumulants(m, 3)
    assert c.flux == pytest.approx(0.032263, abs=1e-6)
    assert c.flux == pytest.approx(cqt.flux_direct(m), rel=1e-8)
    assert c.noise > 0 and c.c3 is not None
    assert cqt.cgf(m, 0.0) == 0.0


def test_zero_bias_and_symmetry():
    eq = cqt.symmetric_model(3, 0.2, 0.4, 10.0, 3.0, 3.0)
    assert abs(cqt.flux_direct(eq)) < 1e-12
    assert cqt.gc_deviation(fig1a(), [-0.3, 0.1, 0.2]) < 1e-9


def test_sweep_and_scaling():
    base = fig1a()
    rows = cqt.sweep(base, [2, 4], cqt.log_grid(0.01, 2.0, 5), "noise", 2)
    assert [r["N"] for r in rows] == [2] * 5 + [4] * 5
    assert all(r["ok"] for r in rows)
    opt = cqt.optimize_alpha(base, 4, "flux")
    assert opt.alpha_lo < opt.alpha_opt < opt.alpha_hi
    report = cqt.scaling(base, [2, 4, 6, 8])
    assert report["objective"] == "flux"
    assert len(report["per_n"]) == 4
    assert report["gamma"] > 1.0


def test_bath_spectrum():
    s = cqt.bath_spectrum(0.5, 10.0, 10.0)
    assert abs(s["sum_rule"] - 1.0) < 1e-4
    assert s["kms_deviation"] < 1e-3
    assert len(s["omega"]) == len(s["C"]) == len(s["C_marcus"])


def test_errors_map_to_python_exceptions():
    bad = fig1a()
    bad.system.n_qubits = 0
    with pytest.raises(ValueError):
        cqt.steady_state(bad)
    with pytest.raises(cqt.DomainError):
        cqt.optimize_alpha(fig1a(), 2, "skewness")
    with pytest.raises(cqt.NumericalError):
        cqt.cumulants(cqt.symmetric_model(10, 0.0, 8.5547, 10.0, 4.0, 2.0))
