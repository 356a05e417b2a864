"""Numerical study of the free time-of-arrival operator at x = 0.

In momentum space ``T = -m p^{-1/2} x p^{-1/2}`` with ``x = i d/dk``.  Its
eigenfunctions ``<k|T,+-> = theta(+-k) sqrt(|k|/2 pi m) exp(i T k^2/2m)`` are
not orthogonal, are not localized at the origin, and a band-limited piece of
one cannot stop a fast clock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .common import DomainError, EnvelopePacket, ToaLabError, gauss_legendre_panels


class RegularizationError(ToaLabError):
    pass


class InfraredError(ToaLabError):
    pass


def eigenfunction(k, T: float, m: float = 1.0, sign: int = 1):
    """``<k|T, sign>``; zero off the chosen branch."""
    k = np.asarray(k, dtype=float)
    on = (k * sign) > 0
    return np.where(on, np.sqrt(np.abs(k) / (2 * math.pi * m)), 0.0) * np.exp(1j * T * k**2 / (2 * m))


# ---------------------------------------------------------------- overlap


@dataclass(frozen=True)
class OverlapResult:
    T: float
    T_prime: float
    value: complex
    predicted: complex
    dampings: tuple[float, ...]
    samples: tuple[complex, ...]
    spread: float

    @property
    def relative_error(self) -> float:
        return abs(self.value.imag - self.predicted.imag) / abs(self.predicted.imag)


def damped_overlap(T: float, T_prime: float, m: float, eta: float, nodes_per_panel: int = 32) -> complex:
    """Both branches of ``<T|T'>`` with a factor ``exp(-eta k^2)``, by quadrature in k."""
    dT = T - T_prime
    k_max = math.sqrt(40.0 / eta)
    # Local phase rate |dT| k/m: keep about 4 oscillations per panel.
    oscillations = abs(dT) * k_max**2 / (2 * m) / (2 * math.pi)
    panels = max(8, int(math.ceil(oscillations / 4)))
    edges = np.linspace(0.0, k_max, panels + 1)
    k, w = gauss_legendre_panels(list(zip(edges[:-1], edges[1:])), nodes_per_panel)
    integrand = k / (2 * math.pi * m) * np.exp(-1j * dT * k**2 / (2 * m) - eta * k**2)
    return complex(2 * (w @ integrand))


def overlap(
    T: float,
    T_prime: float,
    m: float = 1.0,
    damping_sequence: Sequence[float] = (0.04, 0.02, 0.01),
    tol: float = 0.01,
) -> OverlapResult:
    """Off-diagonal overlap of two eigenfunctions, extrapolated to zero damping.

    A quadratic through the damped values is evaluated at zero damping; a
    linear fit through the two smallest dampings must agree to ``tol``.
    """
    if T == T_prime:
        raise DomainError("the diagonal part is a delta function; use T != T'")
    etas = np.asarray(damping_sequence, dtype=float)
    if len(etas) < 3 or np.any(np.diff(etas) >= 0):
        raise DomainError("need at least three decreasing damping scales")
    vals = np.array([damped_overlap(T, T_prime, m, e) for e in etas])
    quad_fit = np.polyfit(etas, vals, 2)
    lin_fit = np.polyfit(etas[-2:], vals[-2:], 1)
    value = complex(np.polyval(quad_fit, 0.0))
    spread = abs(np.polyval(lin_fit, 0.0) - value) / abs(value)
    if spread > tol:
        raise RegularizationError(
            f"extrapolation unstable: linear and quadratic limits differ by {spread:.2%}; "
            f"samples {vals.tolist()}"
        )
    predicted = -1j / (math.pi * (T - T_prime))
    return OverlapResult(T, T_prime, value, predicted, tuple(etas), tuple(vals), float(spread))


def damped_overlap_exact(T: float, T_prime: float, m: float, eta: float) -> complex:
    """Closed form of :func:`damped_overlap`."""
    return 2.0 / (4 * math.pi * m * eta + 2j * math.pi * (T - T_prime))


# ---------------------------------------------------------------- position tail


def position_wavefunction(x, T: float = 0.0, m: float = 1.0, t: float | None = None, cutoff: float = 10.0):
    """``<x|T,+>`` evolved to time t (default t = T), with a soft cutoff ``exp(-(k/cutoff)^2)``.

    Uses ``k = s^2`` so the ``sqrt(k)`` edge at k = 0 becomes smooth.
    """
    t = T if t is None else t
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s_max = math.sqrt(cutoff * 6.0)
    out = np.empty(len(x), dtype=complex)
    for i, xx in enumerate(x):
        rate = abs(xx) * s_max**2 + abs(T - t) * s_max**4 / (2 * m)
        panels = max(16, int(math.ceil(rate / (2 * math.pi) / 4)))
        edges = np.linspace(0.0, s_max, panels + 1)
        s, w = gauss_legendre_panels(list(zip(edges[:-1], edges[1:])), 32)
        k = s**2
        f = 2 * s * np.sqrt(k / (2 * math.pi * m)) * np.exp(1j * k * xx + 1j * k**2 * (T - t) / (2 * m) - (k / cutoff) ** 2)
        out[i] = (w @ f) / math.sqrt(2 * math.pi)
    return out


@dataclass(frozen=True)
class TailFit:
    slope: float
    r_squared: float
    x: np.ndarray
    amplitude: np.ndarray


def position_tail(
    T: float = 0.0,
    m: float = 1.0,
    x_range: tuple[float, float] = (10.0, 1000.0),
    points: int = 25,
    cutoff: float = 10.0,
) -> TailFit:
    """Log-log slope of ``|<x|T>|`` at the arrival instant."""
    lo, hi = x_range
    if lo <= 0 or hi / lo < 100:
        raise DomainError("x_range must be positive and span at least two decades")
    x = np.geomspace(lo, hi, points)
    amp = np.abs(position_wavefunction(x, T, m, cutoff=cutoff))
    lx, la = np.log(x), np.log(amp)
    slope, icpt = np.polyfit(lx, la, 1)
    resid = la - (slope * lx + icpt)
    r2 = 1 - resid.var() / la.var()
    if r2 < 0.99:
        raise ToaLabError(f"power-law fit poor (R^2 = {r2:.4f}); widen the cutoff or the range")
    return TailFit(float(slope), float(r2), x, amp)


# ---------------------------------------------------------------- operator on a grid


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform k grid on ``[k_min, k_max)`` suitable for spectral differentiation."""

    k_min: float
    k_max: float
    n: int

    @property
    def k(self) -> np.ndarray:
        return self.k_min + (self.k_max - self.k_min) * np.arange(self.n) / self.n

    @property
    def dk(self) -> float:
        return (self.k_max - self.k_min) / self.n

    def derivative(self, f: np.ndarray) -> np.ndarray:
        freq = 2 * math.pi * np.fft.fftfreq(self.n, d=self.dk)
        return np.fft.ifft(1j * freq * np.fft.fft(f))


def apply_toa(psi: np.ndarray, grid: MomentumGrid, m: float = 1.0) -> np.ndarray:
    """``T psi = -m k^{-1/2} (i d/dk) (k^{-1/2} psi)``."""
    k = grid.k
    if k[0] <= 0:
        raise InfraredError("grid must exclude k <= 0")
    return -1j * m * grid.derivative(psi / np.sqrt(k)) / np.sqrt(k)


@dataclass(frozen=True)
class ConjugacyResult:
    residual_minus: float  # for [T, H] = -i
    residual_plus: float  # for [T, H] = +i

    @property
    def best(self) -> tuple[float, str]:
        if self.residual_minus <= self.residual_plus:
            return self.residual_minus, "-i"
        return self.residual_plus, "+i"


def conjugacy_residual(
    psi_fn: Callable[[np.ndarray], np.ndarray],
    k_min: float = 0.05,
    k_max: float = 20.0,
    n: int = 4096,
    m: float = 1.0,
) -> ConjugacyResult:
    """``||([T, H] -+ i) psi|| / ||psi||`` with H = k^2/2m on a uniform grid.

    The projector removing p = 0 acts trivially because the grid excludes it.
    """
    grid = MomentumGrid(k_min, k_max, n)
    k = grid.k
    psi = np.asarray(psi_fn(k), dtype=complex)
    h = k**2 / (2 * m)
    comm = apply_toa(h * psi, grid, m) - h * apply_toa(psi, grid, m)
    norm = np.linalg.norm(psi)
    return ConjugacyResult(
        float(np.linalg.norm(comm + 1j * psi) / norm),
        float(np.linalg.norm(comm - 1j * psi) / norm),
    )


# ---------------------------------------------------------------- projector commutator


@dataclass(frozen=True)
class CommutatorResult:
    epsilon: float
    lhs: complex
    rhs: complex

    @property
    def relative_gap(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.rhs) if self.rhs else math.inf


def window_kernel(k: np.ndarray, epsilon: float) -> np.ndarray:
    """``<k|P_eps|k'>`` for the window ``(1/eps) 1{|x| < eps/2}``."""
    d = k[:, None] - k[None, :]
    return (1 / (2 * math.pi)) * np.sinc(d * epsilon / (2 * math.pi))


def projector_commutator(
    psi_fn: Callable[[np.ndarray], np.ndarray],
    epsilon: float,
    k_min: float = 0.05,
    k_max: float = 20.0,
    n: int = 2048,
    m: float = 1.0,
    ir_tol: float = 1e-3,
) -> CommutatorResult:
    """Both sides of ``<psi|[T, P_0]|psi> = (i/sqrt(2 pi)) Re{psi(x=0) int dk psi*(k) m/k^2}``.

    The left side is the matrix element of the commutator with the window
    projector, evaluated as two separate products on the k grid; on the
    right, ``psi(x=0)`` is replaced by its average over the same window.
    """
    grid = MomentumGrid(k_min, k_max, n)
    k, dk = grid.k, grid.dk
    psi = np.asarray(psi_fn(k), dtype=complex)
    total = np.sum(np.abs(psi) ** 2) * dk
    # Weight below the grid is judged from an extension of the state to (0, k_min).
    below = np.linspace(0, k_min, 201)[1:]
    low = np.trapezoid(np.abs(np.asarray(psi_fn(below))) ** 2, below)
    if low / total > ir_tol:
        raise InfraredError(f"{low / total:.2e} of the weight lies below k_min={k_min}")
    t_psi = apply_toa(psi, grid, m)
    K = window_kernel(k, epsilon) * dk * dk
    a = np.conj(t_psi) @ K @ psi  # <T psi | P psi>
    b = np.conj(psi) @ K @ t_psi  # <P psi | T psi>
    lhs = complex(a - b)
    smeared = np.sum(psi * np.sinc(k * epsilon / (2 * math.pi))) * dk / math.sqrt(2 * math.pi)
    integral = np.sum(np.conj(psi) * m / k**2) * dk
    rhs = complex(1j / math.sqrt(2 * math.pi) * (smeared * integral).real)
    return CommutatorResult(epsilon, lhs, rhs)


# ---------------------------------------------------------------- truncated eigenstates


def truncated_eigenstate(T: float, m: float, k_min: float, k_max: float, p0: float = 0.0, dy: float = 1.0) -> EnvelopePacket:
    """Unit-norm restriction of ``<k|T,+>`` to ``[k_min, k_max]``, packaged for the clock model."""
    if not 0 < k_min < k_max:
        raise DomainError("need 0 < k_min < k_max")
    norm2 = (k_max**2 - k_min**2) / (4 * math.pi * m)
    scale = 1 / math.sqrt(norm2)

    def envelope(k):
        return scale * eigenfunction(k, T, m)

    return EnvelopePacket(m=m, envelope=envelope, support=((k_min, k_max),), p0=p0, dy=dy, norm=1.0)


def arrival_profile(state: EnvelopePacket, t_values: Sequence[float], nodes: int = 2048) -> np.ndarray:
    """Density of the freely evolving state at x = 0 as a function of time."""
    (lo, hi), = state.support
    k, w = gauss_legendre_panels([(lo, hi)], nodes)
    g = w * state.g(k) / math.sqrt(2 * math.pi)
    t = np.asarray(t_values, dtype=float)
    amp = np.exp(-1j * np.outer(t, k**2) / (2 * state.m)) @ g
    return np.abs(amp) ** 2
