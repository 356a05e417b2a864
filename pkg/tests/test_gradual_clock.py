import math

import numpy as np
import pytest
from scipy.integrate import quad

from toa_lab.common import DomainError
from toa_lab.gradual_clock import (
    GradualConfig,
    accuracy_tradeoff_curve,
    c_scaling_fit,
    clock_error_term,
    closed_form_terms,
    integrate_trajectory,
    travel_time,
    write_rows,
)


def test_decoupled_particle_is_free():
    cfg = GradualConfig(1, 2, 0.0, 1, -50)
    r = integrate_trajectory(cfg)
    assert r.arrival_time == pytest.approx(49 / 2, rel=1e-12)
    # int V dt along the free path: -x_A^2 int ds/(v s^2).
    assert r.drift_before_arrival == pytest.approx(-(1 - 1 / 50) / 2, rel=1e-10)


def test_closed_forms_match_quadrature_of_velocity():
    cfg = GradualConfig(1.7, 3.0, 4.0, 0.8, -20)

    def speed(s):
        return math.sqrt(2 * (cfg.E + cfg.p_y * cfg.x_A**2 / s**2) / cfg.m)

    t = quad(lambda s: 1 / speed(s), cfg.x_A, 20, epsabs=0, epsrel=1e-13)[0]
    c = quad(lambda s: -(cfg.x_A**2) / s**2 / speed(s), cfg.x_A, 20, epsabs=0, epsrel=1e-13)[0]
    assert travel_time(cfg) == pytest.approx(t, rel=1e-11)
    assert clock_error_term(cfg) == pytest.approx(c, rel=1e-11)


def test_weak_clock_travel_time_approaches_free_flight():
    cfg = GradualConfig(1, 2, 0.02, 1, -50)
    r = integrate_trajectory(cfg)
    free = (50 - 1) / math.sqrt(2 * 2)
    assert r.terms.A == pytest.approx(free, rel=0.01)
    assert r.arrival_time == pytest.approx(r.terms.A, rel=1e-6)


def test_weak_clock_drift_limit_is_not_zero():
    cfg = GradualConfig(1, 2, 1e-12, 1, -50)
    limit = -1 * math.sqrt(1 / 4) * (1 - 1 / 50)
    assert clock_error_term(cfg) == pytest.approx(limit, rel=1e-5)


@pytest.mark.parametrize("seed", range(5))
def test_decomposition_identity(seed):
    rng = np.random.default_rng(seed)
    cfg = GradualConfig(
        rng.uniform(0.5, 2), rng.uniform(0.5, 5), 10 ** rng.uniform(-2, 4), rng.uniform(0.5, 2), -rng.uniform(20, 200)
    )
    r = integrate_trajectory(cfg)
    assert r.relative_residual < 1e-9
    assert r.energy_drift < 1e-9
    assert r.arrival_time == pytest.approx(r.terms.A, rel=1e-9)
    assert r.drift_before_arrival == pytest.approx(r.terms.C, rel=1e-8)


def test_terms_require_late_end_time():
    cfg = GradualConfig(1, 2, 1, 1, -50, t_f=1.0)
    with pytest.raises(DomainError):
        closed_form_terms(cfg)


def test_config_validation():
    with pytest.raises(DomainError):
        GradualConfig(1, 2, 1, 1, -5)
    with pytest.raises(DomainError):
        GradualConfig(1, 2, -1, 1, -50)
    cfg = GradualConfig.from_epsilon(0.5, 1, 1, 0.1, -200)
    assert cfg.x_A == pytest.approx(10)


def test_c_term_scaling():
    amp, ratios = c_scaling_fit(np.logspace(2, 6, 9))
    assert np.all(np.abs(ratios - 1) < 0.1)


def test_tradeoff_curve():
    E = 2.0
    rows = accuracy_tradeoff_curve([E], [x / E for x in (1e4, 1e2, 1, 0.1, 1e-2)])
    err = [r["rel_error"] for r in rows]
    assert err[0] < 1e-2
    assert err[1] < 0.05
    assert err[-1] > 0.5
    assert all(a < b for a, b in zip(err, err[1:]))


def test_rows_csv(tmp_path):
    rows = accuracy_tradeoff_curve([1.0], [1.0])
    path = write_rows(rows, tmp_path / "g.csv")
    assert path.read_text().splitlines()[0] == "E,p_y,A,B,C,numeric_y,residual,rel_error"
