"""Spin trigger: a delta barrier that only the ``+x`` spin component sees.

The particle spin starts in ``|up_z>``.  Alone, the trigger flips the spin
with probability 1/2; coupled to a clock that runs while the spin is up,
it acts as a two-channel scatterer whose clock-stopped channel carries
wavenumber ``k_down = sqrt(2m(E_k + p))``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from .common import DomainError

# Delta strength treated as infinite, relative to max(k)/m.
INFINITE_ALPHA = 1e6


@dataclass(frozen=True)
class TriggerChannel:
    """Scattering amplitudes for incidence in the clock-running (up) channel.

    ``L_*`` are reflected amplitudes (x < 0), ``R_*`` transmitted (x > 0).
    """

    alpha: float
    p: float
    E: float
    m: float
    k_up: float
    k_down: float
    L_up: complex
    L_down: complex
    R_up: complex
    R_down: complex

    @property
    def flux_error(self) -> float:
        r = self.k_down / self.k_up
        total = abs(self.L_up) ** 2 + abs(self.R_up) ** 2 + r * (abs(self.L_down) ** 2 + abs(self.R_down) ** 2)
        return abs(total - 1.0)

    @property
    def continuity_error(self) -> float:
        return max(abs(self.L_down - self.R_down), abs(self.L_up - (self.R_up - 1)))

    @property
    def stopped_flux(self) -> float:
        """Fraction of the incident flux that leaves with the clock stopped."""
        return (self.k_down / self.k_up) * (abs(self.R_down) ** 2 + abs(self.L_down) ** 2)


def infinite_alpha(E_k: float, p: float, m: float) -> float:
    k_down = math.sqrt(2 * m * (E_k + p))
    return INFINITE_ALPHA * k_down / m


def trigger_clock_channel(alpha: float | None, E_k: float, p: float, m: float = 1.0) -> TriggerChannel:
    """Exact two-channel amplitudes; ``alpha=None`` means the infinite-barrier limit.

    Continuity of both components plus the derivative jump
    ``psi'(0+) - psi'(0-) = m alpha (psi_up + psi_down)`` give
    ``R_down = 1 / (2i k_down/(m alpha) - 1 - k_down/k_up)`` and
    ``R_up = 1 + (k_down/k_up) R_down``.
    """
    if E_k <= 0 or p < 0 or m <= 0:
        raise DomainError("need E_k > 0, p >= 0, m > 0")
    k_up = math.sqrt(2 * m * E_k)
    k_down = math.sqrt(2 * m * (E_k + p))
    if alpha is None:
        alpha = INFINITE_ALPHA * k_down / m
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    ratio = k_down / k_up
    if alpha == 0:
        r_down = 0j
    else:
        r_down = 1.0 / (2j * k_down / (m * alpha) - 1.0 - ratio)
    r_up = 1.0 + ratio * r_down
    return TriggerChannel(alpha, p, E_k + p, m, k_up, k_down, r_up - 1.0, r_down, r_up, r_down)


def limit_amplitude(E_k, p):
    """Magnitude of both clock-stopped amplitudes as the barrier becomes impenetrable."""
    E_k = np.asarray(E_k, dtype=float)
    return np.sqrt(E_k) / (np.sqrt(E_k) + np.sqrt(E_k + p))


def trigger_detection_probability(E_k: float, p: float, m: float = 1.0, alpha: float | None = None) -> float:
    return trigger_clock_channel(alpha, E_k, p, m).stopped_flux


# ------------------------------------------------------------ trigger alone


@dataclass
class FlipResult:
    probability: float
    on_weight: float
    off_weight: float
    on_state: np.ndarray
    off_state: np.ndarray
    x: np.ndarray


def trigger_only_flip(psi_R=None, psi_T=None, x=None) -> FlipResult:
    """Spin-flip weight after an impenetrable trigger.

    The ``+x`` spin part is reflected into ``psi_R`` and the ``-x`` part
    passes freely as ``psi_T``; in the z basis the state is
    ``(psi_R + psi_T)/2 |up> + (psi_R - psi_T)/2 |down>``.  Without arguments
    a late-time Gaussian packet is used, for which the flip probability is 1/2.
    """
    if psi_R is None and psi_T is None:
        x, psi_R, psi_T = _default_scattered_pair()
    if x is None:
        raise DomainError("x grid required with explicit wavefunctions")
    x = np.asarray(x, dtype=float)
    psi_R = np.zeros(len(x), complex) if psi_R is None else np.asarray(psi_R, complex)
    psi_T = np.zeros(len(x), complex) if psi_T is None else np.asarray(psi_T, complex)
    on, off = (psi_R + psi_T) / 2, (psi_R - psi_T) / 2
    w_on = float(np.trapezoid(np.abs(on) ** 2, x))
    w_off = float(np.trapezoid(np.abs(off) ** 2, x))
    return FlipResult(w_off / (w_on + w_off), w_on, w_off, on, off, x)


def _default_scattered_pair(k0=3.0, dx=1.0, x0=10.0, m=1.0, t=20.0, n=30001):
    """Free packet and its hard-wall mirror image after the packet has passed x=0."""
    x = np.linspace(-150, 150, n)

    def free(xx):
        s = 1 + 1j * t / (2 * m * dx**2)
        z = xx + x0 - k0 * t / m
        return (2 * math.pi * dx**2) ** -0.25 / np.sqrt(s) * np.exp(
            -(z**2) / (4 * dx**2 * s) + 1j * k0 * (xx + x0) - 1j * k0**2 * t / (2 * m)
        )

    psi_T = np.where(x > 0, free(x), 0)
    psi_R = np.where(x < 0, -free(-x), 0)
    return x, psi_R, psi_T


# ------------------------------------------------------------ many triggers


@dataclass(frozen=True)
class MultiTrigger:
    N: int
    flip_probability: Fraction


def multi_trigger(N: int) -> MultiTrigger:
    """Probability that at least one of N independent triggers flipped."""
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    return MultiTrigger(int(N), 1 - Fraction(1, 2**N))


def sweep(alphas: Iterable[float], energies: Iterable[float], momenta: Iterable[float], m: float = 1.0):
    """Rows ``(alpha, E_k, p, det_prob, flux_error)`` over a parameter grid."""
    rows = []
    for a in alphas:
        for e in energies:
            for p in momenta:
                c = trigger_clock_channel(a, e, p, m)
                rows.append((a, e, p, c.stopped_flux, c.flux_error))
    return rows


def write_sweep(rows, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "E_k", "p", "det_prob", "flux_error"])
        w.writerows([[repr(float(v)) for v in r] for r in rows])
    return path
