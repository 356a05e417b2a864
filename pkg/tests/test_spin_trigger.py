import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toa_lab.clock_model import detection_probability
from toa_lab.common import DomainError
from toa_lab.spin_trigger import (
    limit_amplitude,
    multi_trigger,
    sweep,
    trigger_clock_channel,
    trigger_detection_probability,
    trigger_only_flip,
    write_sweep,
)


def brute_force(alpha, E_k, p, m):
    """Solve the four matching conditions as a dense linear system."""
    ku, kd = math.sqrt(2 * m * E_k), math.sqrt(2 * m * (E_k + p))
    # Unknowns: L_up, L_down, R_up, R_down.
    A = np.array(
        [
            [1, 0, -1, 0],
            [0, 1, 0, -1],
            [1j * ku, 0, 1j * ku - m * alpha, -m * alpha],
            [0, 1j * kd, -m * alpha, 1j * kd - m * alpha],
        ],
        dtype=complex,
    )
    b = np.array([-1, 0, 1j * ku, 0], dtype=complex)
    return np.linalg.solve(A, b)


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0, 1e3), E=st.floats(1e-3, 50), p=st.floats(0, 100), m=st.floats(0.2, 5))
def test_amplitudes_solve_matching_conditions(alpha, E, p, m):
    c = trigger_clock_channel(alpha, E, p, m)
    ref = brute_force(alpha, E, p, m)
    got = np.array([c.L_up, c.L_down, c.R_up, c.R_down])
    assert np.max(np.abs(got - ref)) < 1e-9
    assert c.flux_error < 1e-10
    assert c.continuity_error < 1e-12


@pytest.mark.parametrize("p", [0.0, 0.3, 4.0, 1e3])
def test_infinite_barrier_limit(p):
    E = 1.5
    c = trigger_clock_channel(None, E, p)
    assert abs(c.R_down) == pytest.approx(float(limit_amplitude(E, p)), abs=1e-4)
    # Both outgoing up-channel pieces cancel the clock-stopped amplitude.
    assert c.R_up == pytest.approx(-c.R_down, abs=1e-4)
    tighter = trigger_clock_channel(10 * c.alpha, E, p)
    assert abs(tighter.R_down - c.R_down) < 1e-5


def test_infinite_barrier_at_zero_clock_momentum():
    c = trigger_clock_channel(None, 2.0, 0.0)
    assert abs(c.R_down) == pytest.approx(0.5, abs=1e-4)
    assert abs(c.R_up) == pytest.approx(0.5, abs=1e-4)
    assert c.stopped_flux == pytest.approx(0.5, abs=1e-4)


def test_strong_clock_reflects_particle_back():
    c = trigger_clock_channel(None, 1.0, 1e6)
    assert abs(c.L_down) < 2e-3
    assert abs(c.L_up) == pytest.approx(1.0, abs=2e-3)


def test_detection_tail_halves_when_clock_momentum_quadruples():
    a = trigger_detection_probability(1.0, 1e4)
    b = trigger_detection_probability(1.0, 4e4)
    assert a / b == pytest.approx(2.0, rel=0.05)


def test_detection_is_half_the_direct_clock_in_the_limit():
    for E, p in [(1.0, 0.0), (0.5, 3.0), (2.0, 500.0)]:
        assert trigger_detection_probability(E, p) == pytest.approx(0.5 * detection_probability(E, p), rel=1e-5)


def test_decoupled_trigger_never_stops_clock():
    assert trigger_detection_probability(1.0, 2.0, alpha=0.0) == 0.0


def test_multi_trigger_exact():
    assert multi_trigger(1).flip_probability == Fraction(1, 2)
    assert multi_trigger(3).flip_probability == Fraction(7, 8)
    assert multi_trigger(10).flip_probability == Fraction(1023, 1024)
    values = [multi_trigger(n).flip_probability for n in range(1, 11)]
    assert all(a < b for a, b in zip(values, values[1:]))
    for bad in (0, -2, 1.5):
        with pytest.raises(DomainError):
            multi_trigger(bad)


def test_trigger_alone_flips_half_the_time():
    r = trigger_only_flip()
    assert r.probability == pytest.approx(0.5, abs=1e-6)
    assert r.on_weight + r.off_weight == pytest.approx(1.0, abs=1e-6)


def test_reflected_only_input():
    x = np.linspace(-10, 0, 2001)
    psi = np.exp(-(x + 5) ** 2)
    psi /= math.sqrt(np.trapezoid(psi**2, x))
    r = trigger_only_flip(psi_R=psi, x=x)
    assert np.allclose(r.off_state, psi / 2)
    assert r.off_weight == pytest.approx(0.25)
    assert r.on_weight + r.off_weight == pytest.approx(0.5)


def test_sweep_csv(tmp_path):
    rows = sweep([0.0, 1.0], [1.0], [0.0, 2.0])
    path = write_sweep(rows, tmp_path / "s.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "alpha,E_k,p,det_prob,flux_error"
    assert len(lines) == 5
