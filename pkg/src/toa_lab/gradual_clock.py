"""Classical particle that switches a clock on gradually.

``H = p_x^2/2m + p_y V(x)`` with ``V = -x_A^2/x^2`` for ``x <= -x_A`` and
``V = -1`` beyond.  The particle comes in from the left, so the clock rate
``dy/dt = V`` ramps smoothly from 0 to -1 as it approaches the arrival point
``x = -x_A``.  Closed-form pieces of the clock displacement are compared with
direct integration of Hamilton's equations.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.integrate import solve_ivp

from .common import DomainError, ToaLabError

RTOL = 1e-12


@dataclass(frozen=True)
class GradualConfig:
    """``x_i`` is the (negative) start position; ``E`` the conserved energy."""

    m: float
    E: float
    p_y: float
    x_A: float
    x_i: float
    t_f: float | None = None

    def __post_init__(self):
        if self.m <= 0 or self.E <= 0 or self.x_A <= 0:
            raise DomainError("need m, E, x_A > 0")
        if self.p_y < 0:
            raise DomainError("p_y must be non-negative")
        if not self.x_i < 0 or abs(self.x_i) < 10 * self.x_A:
            raise DomainError("start on the approach side with |x_i| >= 10 x_A")

    @classmethod
    def from_epsilon(cls, m, E, p_y, epsilon, x_i, t_f=None):
        return cls(m, E, p_y, 1.0 / (epsilon * math.sqrt(2 * m)), x_i, t_f)

    def potential(self, x: float) -> float:
        return -self.x_A**2 / x**2 if x <= -self.x_A else -1.0

    @property
    def initial_momentum(self) -> float:
        return math.sqrt(2 * self.m * (self.E - self.p_y * self.potential(self.x_i)))

    @property
    def free_flight_time(self) -> float:
        return (abs(self.x_i) - self.x_A) * math.sqrt(self.m / (2 * self.E))

    def end_time(self) -> float:
        """Given t_f, or twice the travel time."""
        return self.t_f if self.t_f is not None else 2 * travel_time(self) + 1.0


def potential_profile(x, x_A: float):
    """Vectorized ``V(x)``: ``-x_A^2/x^2`` up to the arrival point, -1 beyond."""
    x = np.asarray(x, dtype=float)
    inside = x <= -x_A
    return np.where(inside, -(x_A**2) / np.where(inside, x, -x_A) ** 2, -1.0)


def travel_time(cfg: GradualConfig) -> float:
    """Time to go from x_i to the arrival point in the potential ``p_y V``."""
    c = cfg.p_y * cfg.x_A**2 / cfg.E
    return math.sqrt(cfg.m / (2 * cfg.E)) * (math.sqrt(cfg.x_i**2 + c) - math.sqrt(cfg.x_A**2 + c))


def clock_error_term(cfg: GradualConfig) -> float:
    """Clock displacement accumulated before arrival, ``int V dt`` up to t_0."""
    m, E, p, xa, xi = cfg.m, cfg.E, cfg.p_y, cfg.x_A, abs(cfg.x_i)
    if p == 0:
        # Free-flight value of the same integral.
        return -xa * math.sqrt(m / (2 * E)) * (1 - xa / xi)
    bracket = math.log((1 + math.sqrt(1 + E / p)) / (1 + math.sqrt(1 + E * xi**2 / (p * xa**2)))) + math.log(xi / xa)
    return -xa * m / math.sqrt(2 * m * p) * bracket


@dataclass(frozen=True)
class Terms:
    A: float  # travel time to the arrival point
    B: float  # total elapsed time t_f - t_i
    C: float  # clock drift before arrival

    @property
    def displacement(self) -> float:
        """Clock displacement ``y(t_f) - y(t_i) = A - B + C`` (the clock runs backwards after arrival)."""
        return self.A - self.B + self.C


def closed_form_terms(cfg: GradualConfig) -> Terms:
    t_f = cfg.end_time()
    A = travel_time(cfg)
    if t_f < A:
        raise DomainError(f"t_f={t_f} ends before arrival at t={A}")
    return Terms(A, t_f, clock_error_term(cfg))


@dataclass(frozen=True)
class TrajectoryResult:
    numeric_y: float
    arrival_time: float
    drift_before_arrival: float
    terms: Terms
    energy_drift: float

    @property
    def residual(self) -> float:
        return self.numeric_y - self.terms.displacement

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / max(abs(self.numeric_y), 1e-300)


def integrate_trajectory(cfg: GradualConfig, rtol: float = RTOL) -> TrajectoryResult:
    """Integrate Hamilton's equations up to the arrival point, then the flat region exactly."""
    m, p_y, xa = cfg.m, cfg.p_y, cfg.x_A
    t_f = cfg.end_time()

    def rhs(t, s):
        x, px, _ = s
        return [px / m, -p_y * 2 * xa**2 / x**3, -(xa**2) / x**2]

    def arrive(t, s):
        return s[0] + xa

    arrive.terminal = True
    arrive.direction = 1

    # Generous bound on the travel time; the event stops the run.
    horizon = 10 * cfg.free_flight_time + 10.0
    sol = solve_ivp(
        rhs,
        (0.0, horizon),
        [cfg.x_i, cfg.initial_momentum, 0.0],
        method="DOP853",
        rtol=rtol,
        atol=rtol * 1e-3,
        events=arrive,
        dense_output=False,
    )
    if sol.status != 1 or not len(sol.t_events[0]):
        raise ToaLabError(f"particle did not reach the arrival point: {sol.message}")
    t0 = float(sol.t_events[0][0])
    x0, px0, y0 = sol.y_events[0][0]
    kinetic = px0**2 / (2 * m)
    # Relative to the largest term: kinetic and potential nearly cancel when p_y >> E.
    drift = abs(kinetic - p_y * xa**2 / x0**2 - cfg.E) / max(cfg.E, kinetic)
    if t_f < t0:
        raise DomainError(f"t_f={t_f} ends before arrival at t={t0}")
    y_f = y0 - (t_f - t0)
    terms = Terms(travel_time(cfg), t_f, clock_error_term(cfg))
    return TrajectoryResult(float(y_f), t0, float(y0), terms, float(drift))


# ---------------------------------------------------------------- sweeps


def accuracy_tradeoff_curve(
    E_values: Iterable[float],
    dt_values: Iterable[float],
    m: float = 1.0,
    x_A: float = 1.0,
    distance_ratio: float = 10.0,
) -> list[dict]:
    """Relative error of the measured travel time against the free time of arrival.

    The clock accuracy ``dt`` sets ``p_y = 1/dt``.  The measured quantity is
    the time to reach the arrival point in the potential ``p_y V``, taken
    from the integrated trajectory.
    """
    rows = []
    for E in E_values:
        for dt in dt_values:
            cfg = GradualConfig(m, E, 1.0 / dt, x_A, -distance_ratio * x_A)
            r = integrate_trajectory(cfg)
            free = cfg.free_flight_time
            rows.append(
                {
                    "E": E,
                    "p_y": cfg.p_y,
                    "E_dt": E * dt,
                    "A": r.terms.A,
                    "B": r.terms.B,
                    "C": r.terms.C,
                    "numeric_y": r.numeric_y,
                    "residual": r.residual,
                    "rel_error": abs(r.arrival_time - free) / free,
                }
            )
    return rows


def c_scaling_fit(p_values: Iterable[float], E: float = 2.0, m: float = 1.0, x_A: float = 1.0, x_i: float = -1e5):
    """Best single amplitude for ``|C| ~ a x_A log(p_y)/sqrt(2 m p_y)`` and the per-point ratios."""
    p = np.asarray(list(p_values), dtype=float)
    C = np.array([abs(clock_error_term(GradualConfig(m, E, pp, x_A, x_i))) for pp in p])
    model = x_A * np.log(p) / np.sqrt(2 * m * p)
    amp = float(np.exp(np.mean(np.log(C / model))))
    return amp, C / (amp * model)


COLUMNS = ["E", "p_y", "A", "B", "C", "numeric_y", "residual", "rel_error"]


def write_rows(rows, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([repr(float(r[c])) for c in COLUMNS])
    return path
