import math

import numpy as np
import pytest
from scipy.special import gamma

from toa_lab.clock_model import detection_weight
from toa_lab.common import DomainError, QuadratureGrid
from toa_lab.toa_operator import (
    InfraredError,
    MomentumGrid,
    apply_toa,
    arrival_profile,
    conjugacy_residual,
    damped_overlap,
    damped_overlap_exact,
    eigenfunction,
    overlap,
    position_tail,
    position_wavefunction,
    projector_commutator,
    truncated_eigenstate,
)


def gauss(k):
    return np.exp(-((k - 5) ** 2))


def test_eigenfunction_modulus_is_time_independent():
    k = np.linspace(-5, 5, 1001)
    for T in (0.3, -2.0, 17.0):
        assert np.max(np.abs(np.abs(eigenfunction(k, T)) - np.abs(eigenfunction(k, 0.0)))) < 1e-12
    assert np.all(eigenfunction(k[k < 0], 1.0) == 0)
    assert np.all(eigenfunction(k[k > 0], 1.0, sign=-1) == 0)


def test_toa_eigenvalue_equation():
    grid = MomentumGrid(0.5, 30, 4096)
    k = grid.k
    T = 1.3
    # Taper so the spectral derivative sees a periodic function.
    taper = np.exp(-((k - 8) ** 2) / 2)
    psi = eigenfunction(k, T) * taper
    lhs = apply_toa(psi, grid)
    # T acting on (eigenfunction * taper) = T * psi + extra term from the taper derivative.
    extra = -1j * eigenfunction(k, T) * (-(k - 8)) * taper / k
    assert np.max(np.abs(lhs - (T * psi + extra))) < 1e-8


def test_damped_overlap_quadrature_matches_closed_form():
    for dT in (0.5, 1.0, 3.0):
        for eta in (0.04, 0.01):
            assert damped_overlap(dT, 0.0, 1.3, eta) == pytest.approx(damped_overlap_exact(dT, 0.0, 1.3, eta), rel=1e-10)


@pytest.mark.parametrize("dT", [0.5, 1.0, 2.0])
def test_overlap_off_diagonal(dT):
    r = overlap(dT + 3.0, 3.0)
    assert r.value.imag == pytest.approx(-1 / (math.pi * dT), rel=0.02)


def test_overlap_hermitian_symmetry_and_modulus():
    a, b = overlap(2.0, 1.0), overlap(1.0, 2.0)
    assert b.value == pytest.approx(a.value.conjugate(), rel=1e-10)
    rng = np.random.default_rng(1)
    for _ in range(10):
        T, d = rng.uniform(-5, 5), rng.uniform(0.5, 3) * rng.choice([-1, 1])
        assert abs(overlap(T + d, T).value) == pytest.approx(abs(overlap(d, 0.0).value), rel=1e-9)


def test_overlap_rejects_diagonal_and_bad_damping():
    with pytest.raises(DomainError):
        overlap(1.0, 1.0)
    with pytest.raises(DomainError):
        overlap(1.0, 0.0, damping_sequence=(0.01, 0.02, 0.04))


def test_fourier_synthesis_against_gamma_closed_form():
    # With exp(-k/K) instead of the Gaussian cutoff the transform is Gamma(3/2)/(1/K - i x)^{3/2}.
    from toa_lab.common import gauss_legendre_panels

    K, x = 5.0, 40.0
    edges = np.linspace(0, math.sqrt(60 * K), 2001)
    s, w = gauss_legendre_panels(list(zip(edges[:-1], edges[1:])), 16)
    num = w @ (2 * s**2 * np.exp(1j * s**2 * x - s**2 / K))
    assert num == pytest.approx(gamma(1.5) / (1 / K - 1j * x) ** 1.5, rel=1e-9)


def test_position_tail_exponent_mass_independent():
    a = position_tail(m=1.0)
    b = position_tail(m=2.0)
    assert a.slope == pytest.approx(-1.5, abs=0.05)
    assert b.slope == pytest.approx(a.slope, abs=1e-6)


def test_away_from_arrival_instant_origin_density_is_finite():
    at = abs(position_wavefunction(0.0, T=0.0, t=0.0, cutoff=10))[0]
    later = abs(position_wavefunction(0.0, T=0.0, t=2.0, cutoff=10))[0]
    sharper = abs(position_wavefunction(0.0, T=0.0, t=0.0, cutoff=40))[0]
    # At the arrival instant the origin value grows with the cutoff; away from it it does not.
    assert sharper > 3 * at
    assert later == pytest.approx(abs(position_wavefunction(0.0, T=0.0, t=2.0, cutoff=40))[0], rel=1e-3)


def test_conjugacy_residuals():
    base = conjugacy_residual(gauss)
    value, sign = base.best
    assert value < 1e-3 and sign == "-i"
    shifted = conjugacy_residual(lambda k: np.exp(-((k - 10) ** 2)))
    assert shifted.best[0] < max(2 * value, 1e-6)
    touching = conjugacy_residual(lambda k: np.exp(-((k - 1) ** 2)))
    assert touching.best[0] > 10 * value


def test_projector_commutator_converges():
    prev = None
    for eps in (0.1, 0.05, 0.025):
        r = projector_commutator(gauss, eps)
        assert abs(r.lhs.real) < 1e-8
        if prev is not None and abs(r.lhs - prev) / abs(r.lhs) < 0.01:
            break
        prev = r.lhs
    assert r.relative_gap < 0.05


def test_projector_commutator_vanishes_for_odd_state():
    odd = lambda k: (k - 5) * np.exp(-((k - 5) ** 2))  # noqa: E731
    vals = [abs(projector_commutator(odd, e).lhs) for e in (0.2, 0.1, 0.05)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-3 * abs(projector_commutator(gauss, 0.05).lhs)


def test_projector_commutator_infrared_guard():
    with pytest.raises(InfraredError):
        projector_commutator(lambda k: np.exp(-((k - 0.5) ** 2)), 0.1, k_min=0.3)


def test_truncated_eigenstate_norm_and_arrival():
    st = truncated_eigenstate(0.0, 1.0, 1.0, 10.0)
    k = np.linspace(1, 10, 200001)
    assert np.trapezoid(np.abs(st.g(k)) ** 2, k) == pytest.approx(1.0, abs=1e-9)
    assert st.norm_g2 == 1.0
    T = 4.0
    st = truncated_eigenstate(T, 1.0, 1.0, 10.0)
    t = np.linspace(2, 6, 401)
    assert t[np.argmax(arrival_profile(st, t))] == pytest.approx(T, abs=0.02)
    with pytest.raises(DomainError):
        truncated_eigenstate(0.0, 1.0, 2.0, 2.0)


def test_truncated_eigenstate_stops_clock_less_as_clock_sharpens():
    weights = []
    for dy in np.geomspace(1e-3, 1e-4, 4):
        st = truncated_eigenstate(0.0, 1.0, 1.0, 4.0, p0=2 / dy, dy=dy)
        weights.append(detection_weight(st, QuadratureGrid.build(st)))
    assert all(a > b for a, b in zip(weights, weights[1:]))
    assert weights[-1] < 0.1
