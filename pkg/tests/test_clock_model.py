import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toa_lab.clock_model import (
    PrematureReadoutError,
    UnresolvablePeaksError,
    accurate_gamma,
    appendix_density,
    channel,
    detection_probability,
    detection_weight,
    late_time,
    peak_windows,
    phase_peaks,
    readout_distribution,
    step_mode,
    two_peak_experiment,
)
from toa_lab.common import BimodalPacketSpec, DomainError, PacketSpec, QuadratureGrid

INACCURATE = PacketSpec(m=1, k0=5, dx=2, x0=30, p0=0.4, dy=5)


@settings(max_examples=300, deadline=None)
@given(
    k=st.floats(1e-3, 50),
    p=st.floats(0, 500),
    m=st.floats(0.1, 10),
)
def test_channel_flux_and_matching(k, p, m):
    c = channel(k, p, m)
    assert c.flux_error < 1e-12
    # Continuity of the wave and its derivative at the step.
    assert abs(1 + c.A_R - c.A_T) < 1e-12
    assert abs(k * (1 - c.A_R) - c.q * c.A_T) < 1e-10 * max(1, c.q)


def test_channel_rejects_degenerate_input():
    with pytest.raises(DomainError):
        channel(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        channel(1.0, -1.0, 1.0)


def test_step_mode_solves_schrodinger_equation():
    m, k, p = 1.3, 1.7, 0.9
    mode = step_mode(m)
    h = 1e-3
    for x in (-2.0, 1.5):
        xs = np.array([x - h, x, x + h])
        phi = mode(np.array([k]), p, xs, 0.0)[0]
        lap = (phi[0] - 2 * phi[1] + phi[2]) / h**2
        pot = p if x < 0 else 0.0
        omega = k**2 / (2 * m) + p
        assert abs(-lap / (2 * m) + pot * phi[1] - omega * phi[1]) < 1e-5
    # Continuous across the origin.
    left = mode(np.array([k]), p, np.array([-1e-9]), 0.0)[0, 0]
    right = mode(np.array([k]), p, np.array([0.0]), 0.0)[0, 0]
    assert abs(left - right) < 1e-8


def test_detection_probability_limits():
    assert detection_probability(2.0, 0.0) == pytest.approx(1.0)
    E, p = 1.0, 1e8
    assert detection_probability(E, p) == pytest.approx(4 * math.sqrt(E / p), rel=1e-3)
    k, pp, m = 1.2, 3.4, 2.0
    c = channel(k, pp, m)
    assert detection_probability(k**2 / (2 * m), pp) == pytest.approx((c.q / k) * abs(c.A_T) ** 2)


def test_readout_matches_inaccurate_limit_gaussian():
    h = readout_distribution(INACCURATE)
    assert len(h.density) == 400
    model = appendix_density(INACCURATE, h.centers)
    model /= model.sum()
    tv = 0.5 * np.abs(h.normalized() * h.width - model).sum()
    assert tv < 0.01
    assert h.peak() == pytest.approx(6.0, abs=0.05)


def test_binned_mass_equals_detection_weight():
    h = readout_distribution(INACCURATE)
    assert h.binned_mass == pytest.approx(h.detection_weight, abs=1e-4)


def test_quadrature_readout_agrees_with_explicit_grid():
    t = 40.0
    window = (-10.0, 22.0)
    a = readout_distribution(INACCURATE, t=t, bins=12, window=window)
    b = readout_distribution(INACCURATE, t=t, bins=12, window=window, method="grid")
    assert np.max(np.abs(a.density - b.density)) < 1e-4 * a.density.max()


def test_readout_converges_in_node_count():
    s = PacketSpec(m=1, k0=2, dx=1, x0=10, p0=2000, dy=1e-3)
    a = readout_distribution(s, n_q=64, q_pieces=2)
    b = readout_distribution(s, n_q=128, q_pieces=4)
    assert np.max(np.abs(a.density - b.density)) < 1e-6 * b.density.max()


def test_premature_readout_is_refused():
    with pytest.raises(PrematureReadoutError):
        readout_distribution(INACCURATE, t=3.0)
    assert INACCURATE.pending_mass(late_time(INACCURATE)) < 1e-4


def test_accurate_limit_width_and_weight():
    widths, weights = [], []
    for dy in (1e-3, 2.5e-4):
        s = PacketSpec(m=1, k0=2, dx=1, x0=10, p0=2 / dy, dy=dy)
        h = readout_distribution(s)
        widths.append(h.moments()[1])
        weights.append(h.detection_weight)
    assert widths[0] == pytest.approx(widths[1], rel=0.01)
    assert weights[0] / weights[1] == pytest.approx(2.0, rel=0.05)


def test_accurate_gamma_readings_agree_when_mass_equals_speed():
    s = PacketSpec(m=2, k0=2, dx=1.5, x0=10, p0=1, dy=1)
    assert accurate_gamma(s, 3.0, "printed") == pytest.approx(accurate_gamma(s, 3.0))


def test_detection_weight_single_node_is_detection_probability():
    s = PacketSpec(m=1, k0=3, dx=1, x0=5, p0=2, dy=1)
    g = QuadratureGrid.build(s, n_k=256, n_p=256)
    # Narrow both envelopes: averaged weight approaches the point value.
    narrow = PacketSpec(m=1, k0=3, dx=200, x0=5, p0=2, dy=200)
    w = detection_weight(narrow, QuadratureGrid.build(narrow))
    assert w == pytest.approx(detection_probability(4.5, 2.0), rel=1e-3)
    assert 0 < detection_weight(s, g) < 1


def test_two_peak_ratio_follows_detection_probability():
    base = BimodalPacketSpec(m=1, k1=1, k2=4, dx=10, x0=400, p0=0, dy=1)
    far, near = two_peak_experiment(base, [50.0, 0.15])
    assert far["ratio"] == pytest.approx(1.0, rel=0.02)
    assert near["ratio"] == pytest.approx(near["predicted"], rel=0.03)


def test_overlapping_peaks_are_refused():
    b = BimodalPacketSpec(m=1, k1=1.0, k2=1.05, dx=1, x0=10, p0=1, dy=1)
    with pytest.raises(UnresolvablePeaksError):
        peak_windows(b)


def test_phase_peaks_reduce_to_arrival_time():
    s = PacketSpec(m=1, k0=3, dx=1, x0=9, p0=5, dy=1)
    pk = phase_peaks(s, t=20.0)
    assert pk.y_peak == pytest.approx(pk.arrival)
    assert pk.x_peak == pytest.approx(pk.q0 * (20.0 - 3.0))


def test_histogram_files(tmp_path):
    h = readout_distribution(INACCURATE, bins=50)
    csv_path, side = h.write(tmp_path / "rho.csv")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "y_center,density"
    assert len(lines) == 51
    meta = json.loads(side.read_text())
    assert meta["detection_weight"] == pytest.approx(h.detection_weight)
    assert meta["spec"]["k0"] == 5
