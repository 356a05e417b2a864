"""Spin-flip energy booster built from localized, time-independent potentials.

The spin-up wave arrives from the left.  A flip term ``alpha sigma_x delta(x)``
couples it to the spin-down channel, which is confined on x < 0 and gains
kinetic energy ``V2`` on x > 0, while the spin-up wave is evanescent on x > 0.

All potentials and ``alpha`` are in reduced units (multiplied by 2m), so the
channel wavenumbers obey ``k^2 = V1 - q^2 = W - lam^2 = k'^2 - V2`` and the
derivative jump at the origin is ``alpha`` times the other component.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .common import DomainError, ToaLabError, gauss_legendre_panels

RESIDUAL_TOL = 1e-12


class EvanescentInputError(DomainError):
    pass


@dataclass(frozen=True)
class BoosterParams:
    m: float
    k: float
    k_prime: float
    lam: float
    q: float
    alpha: float
    V1: float
    V2: float
    W: float

    @property
    def identity_error(self) -> float:
        k2 = self.k**2
        return max(
            abs(self.V1 - self.q**2 - k2),
            abs(self.W - self.lam**2 - k2),
            abs(self.k_prime**2 - self.V2 - k2),
        )

    @property
    def tuning_error(self) -> float:
        """Zero when the design wavenumber is fully transmitted.

        Full transmission needs ``alpha^2 = k k' + q lam`` together with
        ``q = lam k'/k``.
        """
        return max(
            abs(self.alpha**2 - (self.k * self.k_prime + self.q * self.lam)),
            abs(self.q - self.lam * self.k_prime / self.k),
        )

    def window(self) -> tuple[float, float]:
        """Incident wavenumbers for which both side channels stay evanescent."""
        return 0.0, math.sqrt(min(self.V1, self.W))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def tune(m: float, k: float, k_prime: float, lam: float) -> BoosterParams:
    """Potentials and flip strength that transmit wavenumber k with certainty."""
    if not (k > 0 and lam > 0 and m > 0):
        raise DomainError("need k > 0, lam > 0, m > 0")
    if k_prime <= k:
        raise DomainError(f"boost requires k' > k (got k'={k_prime}, k={k})")
    q = lam * k_prime / k
    alpha = math.sqrt(k * k_prime + q * lam)
    return BoosterParams(m, k, k_prime, lam, q, alpha, k * k + q * q, k_prime**2 - k * k, k * k + lam * lam)


@dataclass(frozen=True)
class BoosterChannel:
    k_in: float
    k_prime: float
    L_up: complex
    L_down: complex
    R_up: complex
    R_down: complex
    residual: float

    @property
    def J_Lup(self) -> float:
        return abs(self.L_up) ** 2

    @property
    def J_Rdown(self) -> float:
        return (self.k_prime / self.k_in) * abs(self.R_down) ** 2

    @property
    def flux_error(self) -> float:
        return abs(self.J_Lup + self.J_Rdown - 1.0)


def booster_channel(params: BoosterParams, k_in: float, alpha: float | None = None) -> BoosterChannel:
    """Scattering amplitudes at incident wavenumber ``k_in``.

    Channel wavenumbers follow from the fixed potentials; the four matching
    conditions are solved as a dense linear system.
    """
    lo, hi = params.window()
    if not (lo < k_in < hi):
        raise EvanescentInputError(f"k_in={k_in} outside the propagating window ({lo}, {hi})")
    a = params.alpha if alpha is None else alpha
    q = math.sqrt(params.V1 - k_in**2)
    lam = math.sqrt(params.W - k_in**2)
    kp = math.sqrt(k_in**2 + params.V2)
    ik = 1j * k_in
    # Unknowns: L_up, R_up, L_down, R_down.
    A = np.array(
        [
            [1, -1, 0, 0],
            [0, 0, 1, -1],
            [ik, -lam, 0, -a],
            [0, -a, -q, 1j * kp],
        ],
        dtype=complex,
    )
    b = np.array([-1, 0, ik, 0], dtype=complex)
    sol = np.linalg.solve(A, b)
    residual = float(np.max(np.abs(A @ sol - b)))
    if residual > RESIDUAL_TOL * max(1.0, np.abs(A).max()):
        raise ToaLabError(f"matching solve residual {residual:.2e}")
    L_up, R_up, L_down, R_down = sol
    return BoosterChannel(k_in, kp, L_up, L_down, R_up, R_down, residual)


def closed_form_reflection(params: BoosterParams) -> complex:
    """Reflected amplitude at the design wavenumber from the closed-form expression."""
    k, kp, q, lam, a = params.k, params.k_prime, params.q, params.lam, params.alpha
    num = kp * k + q * lam + 1j * (k * q - kp * lam) - a**2
    den = kp * k - q * lam + 1j * (kp * lam + k * q) + a**2
    return num / den


def transmission_slope(params: BoosterParams, delta: float = 1e-3) -> float:
    """Centered finite difference of J_Rdown in k_in at the design point."""
    h = delta * params.k
    up = booster_channel(params, params.k + h).J_Rdown
    down = booster_channel(params, params.k - h).J_Rdown
    return (up - down) / (2 * h)


def transmission_curve(params: BoosterParams, k_values: Sequence[float]) -> np.ndarray:
    """Rows ``(k_in, J_Rdown, J_Lup, flux_error)``."""
    rows = []
    for k in k_values:
        c = booster_channel(params, float(k))
        rows.append((k, c.J_Rdown, c.J_Lup, c.flux_error))
    return np.array(rows)


def write_curve(rows, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k_in", "J_Rdown", "J_Lup", "flux_error"])
        w.writerows([[repr(float(v)) for v in r] for r in rows])
    return path


# ---------------------------------------------------------------- packets


@dataclass
class Distortion:
    k: np.ndarray
    weights: np.ndarray
    J: np.ndarray
    incident: np.ndarray
    transmitted: np.ndarray
    metric: float
    boosted_fraction: float


def gaussian_envelope(k_center: float, width: float) -> Callable:
    """Amplitude whose squared modulus has standard deviation ``width``."""
    return lambda k: np.exp(-((np.asarray(k) - k_center) ** 2) / (4 * width**2))


def packet_distortion(
    params: BoosterParams,
    envelope: Callable,
    support: tuple[float, float],
    nodes: int = 256,
) -> Distortion:
    """How much the boosted spectrum differs in shape from the incident one.

    The metric is the L1 distance between the normalized incident spectrum
    ``|g|^2`` and the normalized transmitted spectrum ``J_Rdown(k)|g|^2``.
    """
    lo, hi = support
    w_lo, w_hi = params.window()
    if lo <= w_lo or hi >= w_hi or hi <= lo:
        raise EvanescentInputError(
            f"support [{lo}, {hi}] leaves the propagating window ({w_lo}, {w_hi})"
        )
    k, w = gauss_legendre_panels([(lo, hi)], nodes)
    J = np.array([booster_channel(params, float(kk)).J_Rdown for kk in k])
    inc = np.abs(envelope(k)) ** 2
    out = J * inc
    total_in = float(w @ inc)
    total_out = float(w @ out)
    metric = float(w @ np.abs(inc / total_in - out / total_out))
    return Distortion(k, w, J, inc / total_in, out / total_out, metric, total_out / total_in)
