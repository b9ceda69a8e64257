import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from adhesive_friction import analytics
from adhesive_friction.analytics import (DegenerateFitError, ExperimentSeries, JkrParams, SchemaError,
                                         extended_amontons, fit_series, fit_tau0_mu, jkr_area_to_load,
                                         jkr_load_band, jkr_normal_load, read_experiment_csv,
                                         write_experiment_csv, write_jkr_csv)
from adhesive_friction.laws import DomainError

SPHERE = JkrParams(youngs_modulus=1.6e6, radius=9.42e-3, work_of_adhesion=27e-3)


def test_hertz_limit():
    p = JkrParams(1.6e6, 9.42e-3, 0.0)
    a = 2e-4
    assert jkr_normal_load(a, p) == pytest.approx(4 * p.e_star * a**3 / (3 * p.radius), rel=1e-15)
    assert p.e_star == pytest.approx(1.6e6 / 0.75)


def test_pull_off_force_numeric_oracle():
    res = minimize_scalar(lambda a: jkr_normal_load(a, SPHERE), bounds=(1e-7, 1e-3), method="bounded",
                          options={"xatol": 1e-14})
    assert res.fun == pytest.approx(-1.5 * math.pi * SPHERE.radius * SPHERE.work_of_adhesion, rel=1e-8)
    assert res.x == pytest.approx(analytics.jkr_pull_off_radius(SPHERE), rel=1e-5)
    assert abs(analytics.jkr_pull_off_force(SPHERE)) == pytest.approx(1.198e-3, rel=1e-3)


def test_load_increases_beyond_pull_off_radius():
    a = np.linspace(analytics.jkr_pull_off_radius(SPHERE), 1e-3, 500)
    assert np.all(np.diff(jkr_normal_load(a, SPHERE)) > 0)


def test_area_conversion():
    a = np.array([1e-5, 1e-4, 3e-4])
    assert np.array_equal(jkr_area_to_load(math.pi * a**2, SPHERE), jkr_normal_load(a, SPHERE))
    small = jkr_area_to_load(1e-16, SPHERE)
    assert small < 0 and abs(small) < 1e-8
    with pytest.raises(DomainError):
        jkr_area_to_load(0.0, SPHERE)
    with pytest.raises(DomainError):
        jkr_normal_load(-1.0, SPHERE)


def test_small_areas_are_tensile():
    # loads estimated from small initial areas are adhesive (negative)
    assert jkr_area_to_load(0.05e-6, SPHERE) < 0
    assert jkr_area_to_load(0.46e-6, SPHERE) > jkr_area_to_load(0.05e-6, SPHERE)


def test_uncertainty_band_brackets_nominal():
    A = np.array([0.05e-6, 0.2e-6, 0.46e-6])
    lo, hi = jkr_load_band(A, SPHERE)
    nominal = jkr_area_to_load(A, SPHERE)
    assert np.all(lo <= nominal) and np.all(nominal <= hi) and np.all(hi > lo)


def test_extended_amontons():
    assert extended_amontons(0.0, 0.46e-6, 0.43e6, 0.0) == pytest.approx(0.198, abs=5e-4)
    assert extended_amontons(2.0, 0.0, 0.43e6, 0.3) == pytest.approx(0.6)
    assert extended_amontons(2.0, 1.0, 0.0, 0.3) == pytest.approx(0.6)
    with pytest.raises(DomainError):
        extended_amontons(1.0, -1.0, 1.0, 1.0)


def test_fit_recovers_noiseless_parameters():
    rng = np.random.default_rng(0)
    A = rng.uniform(0.1e-6, 0.5e-6, 20)
    Fn = rng.uniform(-1e-3, 5e-3, 20)
    Ft = extended_amontons(Fn, A, 0.43e6, 0.7)
    fit = fit_tau0_mu(A, Fn, Ft)
    assert fit.tau0 == pytest.approx(0.43e6, rel=1e-10)
    assert fit.mu == pytest.approx(0.7, rel=1e-10)
    assert fit.residual < 1e-12


def test_fit_with_noise():
    rng = np.random.default_rng(42)
    A = rng.uniform(0.1e-6, 0.5e-6, 200)
    Fn = rng.uniform(-1e-3, 0.2, 200)
    Ft = extended_amontons(Fn, A, 0.43e6, 0.7)
    Ft = Ft * (1 + 0.01 * rng.standard_normal(len(Ft)))
    fit = fit_tau0_mu(A, Fn, Ft)
    assert fit.tau0 == pytest.approx(0.43e6, rel=0.05)
    assert fit.mu == pytest.approx(0.7, rel=0.05)


def test_fixed_mu_is_ratio_average():
    A = np.full(5, 0.3e-6)
    Ft = np.array([0.12, 0.13, 0.125, 0.128, 0.131])
    fit = fit_tau0_mu(A, np.zeros(5), Ft, fix_mu=0.0)
    assert fit.tau0 == pytest.approx(np.mean(Ft / A), rel=1e-14)


def test_degenerate_fits():
    with pytest.raises(DegenerateFitError):
        fit_tau0_mu(np.full(4, 1.0), np.full(4, 2.0), np.ones(4))
    with pytest.raises(DegenerateFitError):
        fit_tau0_mu([1.0], [1.0], [1.0])


def make_series():
    t = np.linspace(0, 10, 11)
    A = np.linspace(0.46e-6, 0.30e-6, 11)
    return ExperimentSeries(t, 0.43e6 * A, A, {"initial_area_mm2": "0.46", "tau0_pa": "430000",
                                               "velocity_um_s": "20"}, "run1")


def test_experiment_csv_round_trip(tmp_path):
    s = make_series()
    p = tmp_path / "run1.csv"
    write_experiment_csv(p, s)
    text = p.read_text()
    assert text.startswith("# initial_area_mm2 = 0.46\n")
    assert "t_seconds,F_t_newton,A_mm2" in text
    back = read_experiment_csv(p)
    assert np.allclose(back.time, s.time) and np.allclose(back.F_t, s.F_t) and np.allclose(back.area, s.area)
    assert back.initial_area == pytest.approx(0.46e-6)
    assert back.tau0 == 430000.0
    assert np.allclose(back.ratio, 0.43e6)


def test_experiment_schema_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,force,area\n0,1,1\n")
    with pytest.raises(SchemaError):
        read_experiment_csv(p)
    p.write_text("t_seconds,F_t_newton,A_mm2\n1,1,1\n0,1,1\n")
    with pytest.raises(SchemaError):
        read_experiment_csv(p)
    p.write_text("t_seconds,F_t_newton,A_mm2\n0,1,-1\n")
    with pytest.raises(SchemaError):
        read_experiment_csv(p)


def test_fit_series_ratio_estimate():
    fit = fit_series([make_series()])
    assert fit.tau0 == pytest.approx(0.43e6, rel=1e-12)


def test_jkr_csv(tmp_path):
    p = tmp_path / "jkr.csv"
    write_jkr_csv(p, [1e-4, 2e-4], SPHERE)
    lines = p.read_text().splitlines()
    assert lines[0] == "a_m,A_m2,F_n_newton"
    a, A, F = map(float, lines[2].split(","))
    assert A == pytest.approx(math.pi * 4e-8) and F == pytest.approx(jkr_normal_load(2e-4, SPHERE))


def test_invalid_jkr_params():
    with pytest.raises(DomainError):
        JkrParams(-1.0, 1.0, 1.0)
