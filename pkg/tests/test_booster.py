import json
import math

import numpy as np
import pytest
import sympy as sp

from toa_lab.booster import (
    EvanescentInputError,
    booster_channel,
    closed_form_reflection,
    gaussian_envelope,
    packet_distortion,
    transmission_curve,
    transmission_slope,
    tune,
    write_curve,
)
from toa_lab.common import DomainError


def test_tune_worked_example():
    b = tune(1, 1, 2, 3)
    assert b.q == pytest.approx(6)
    assert b.alpha == pytest.approx(math.sqrt(20))
    assert (b.V1, b.W, b.V2) == pytest.approx((37, 10, 3))
    assert b.identity_error < 1e-12
    assert b.tuning_error < 1e-12


def test_tune_rejects_no_boost():
    with pytest.raises(DomainError):
        tune(1, 2, 2, 1)
    with pytest.raises(DomainError):
        tune(1, 2, 1, 1)


def test_no_boost_limit():
    b = tune(1, 1.0, 1.0 + 1e-9, 1e-9)
    assert b.alpha == pytest.approx(1.0, abs=1e-6)
    assert b.q == pytest.approx(0, abs=1e-8)
    assert b.V2 == pytest.approx(0, abs=1e-8)


def test_linear_solve_matches_symbolic_matching():
    k, kp, lam, q, a = sp.symbols("k kp lam q a", positive=True)
    L, R, D = sp.symbols("L R D")
    sol = sp.solve(
        [1 + L - R, -lam * R - sp.I * k * (1 - L) - a * D, sp.I * kp * D - q * D - a * R],
        [L, R, D],
        dict=True,
    )[0]
    b = tune(1, 1.3, 2.1, 0.7)
    kin = 1.1
    vals = {
        k: kin,
        kp: math.sqrt(kin**2 + b.V2),
        lam: math.sqrt(b.W - kin**2),
        q: math.sqrt(b.V1 - kin**2),
        a: b.alpha,
    }
    c = booster_channel(b, kin)
    assert complex(sol[L].subs(vals)) == pytest.approx(c.L_up, abs=1e-12)
    assert complex(sol[D].subs(vals)) == pytest.approx(c.R_down, abs=1e-12)


def test_closed_form_reflection_agrees_at_design_point():
    rng = np.random.default_rng(3)
    for _ in range(10):
        k = rng.uniform(0.5, 3)
        b = tune(1, k, k * rng.uniform(1.1, 4), rng.uniform(0.2, 5))
        c = booster_channel(b, b.k)
        assert abs(closed_form_reflection(b) - c.L_up) < 1e-10
        assert abs(c.R_down - b.alpha / (1j * b.k_prime - b.q) * (1 + c.L_up)) < 1e-10


def test_tuned_full_transmission_random_sets():
    rng = np.random.default_rng(0)
    for _ in range(20):
        k = rng.uniform(0.2, 5)
        b = tune(rng.uniform(0.5, 2), k, k * rng.uniform(1.05, 10), rng.uniform(0.1, 10))
        c = booster_channel(b, b.k)
        assert abs(c.J_Rdown - 1) < 1e-10
        assert c.J_Lup < 1e-10


def test_flux_conserved_across_sweep():
    b = tune(1, 1, 2, 3)
    rows = transmission_curve(b, np.linspace(0.05, 3.1, 100))
    assert np.max(rows[:, 3]) < 1e-10


def test_decoupled_booster_reflects_everything():
    b = tune(1, 1, 2, 3)
    c = booster_channel(b, 1.0, alpha=0.0)
    assert c.R_down == 0
    assert c.J_Lup == pytest.approx(1.0, abs=1e-14)


def test_design_point_is_transmission_maximum():
    b = tune(1, 1, 2, 3)
    ks = np.linspace(0.9, 1.1, 41)
    J = transmission_curve(b, ks)[:, 1]
    assert np.all(J <= J[20] + 1e-12)
    # A maximum has zero slope; the first-order response is quadratic.
    assert abs(transmission_slope(b, 1e-4)) < 1e-6


def test_outside_window_raises():
    b = tune(1, 1, 2, 3)
    with pytest.raises(EvanescentInputError):
        booster_channel(b, 4.0)
    with pytest.raises(EvanescentInputError):
        packet_distortion(b, gaussian_envelope(1, 0.5), (-1, 3))


def test_distortion_narrow_wide_and_delta():
    b = tune(1, 1, 2, 3)
    narrow = packet_distortion(b, gaussian_envelope(1, 0.01), (0.94, 1.06))
    assert narrow.metric < 0.02
    # A weakly confining design makes the band dependence visible.
    soft = tune(1, 1, 3, 0.5)
    wide = packet_distortion(soft, gaussian_envelope(1, 0.5), (0.05, 1.1))
    assert wide.metric > 0.1
    spike = packet_distortion(b, gaussian_envelope(1, 1e-7), (1 - 6e-7, 1 + 6e-7))
    assert spike.metric < 1e-8


def test_io(tmp_path):
    b = tune(1, 1, 2, 3)
    path = write_curve(transmission_curve(b, [0.5, 1.0]), tmp_path / "c.csv")
    assert path.read_text().splitlines()[0] == "k_in,J_Rdown,J_Lup,flux_error"
    assert json.loads(b.to_json())["V1"] == pytest.approx(37)
