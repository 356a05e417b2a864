"""Particle coupled directly to a clock: ``H = P_x^2/2m + theta(-x) P_y``.

For a fixed clock momentum ``p`` the particle sees a step of height ``p``
on x < 0, so the clock stops (and the particle speeds up to ``q``) when it
crosses the origin.  This module holds the exact eigenmodes, the detection
probability, and the clock readout distribution of Gaussian packets.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .common import (
    BimodalPacketSpec,
    DomainError,
    Packet,
    PacketSpec,
    PrematureReadoutError,
    QuadratureGrid,
    ResolutionError,
    ToaLabError,
    gauss_legendre_panels,
    synthesize,
)

PENDING_TOL = 1e-3


@dataclass(frozen=True)
class ClockChannel:
    k: float
    p: float
    m: float
    q: float
    A_T: complex
    A_R: complex

    @property
    def omega(self) -> float:
        return self.k**2 / (2 * self.m) + self.p

    @property
    def flux_error(self) -> float:
        return abs(abs(self.A_R) ** 2 + (self.q / self.k) * abs(self.A_T) ** 2 - 1.0)


def channel(k: float, p: float, m: float) -> ClockChannel:
    """Transmission and reflection amplitudes of the step seen at clock momentum p."""
    if k == 0:
        raise DomainError("k = 0 is a degenerate channel (no incident flux)")
    if p < 0 or m <= 0:
        raise DomainError("need p >= 0 and m > 0")
    q = math.sqrt(k * k + 2 * m * p)
    return ClockChannel(k, p, m, q, complex(2 * k / (k + q)), complex((k - q) / (k + q)))


def transmission(k, p, m):
    """Vectorized ``(q, A_T, A_R)`` for arrays of k and p."""
    q = np.sqrt(k**2 + 2 * m * p)
    return q, 2 * k / (k + q), (k - q) / (k + q)


def detection_probability(E_k, p, m: float = 1.0):
    """Probability that the particle crosses the step, i.e. stops the clock.

    Equal to ``(q/k)|A_T|^2`` and independent of the mass once written in
    terms of energies.
    """
    E_k = np.asarray(E_k, dtype=float)
    p = np.asarray(p, dtype=float)
    se, sp = np.sqrt(E_k), np.sqrt(E_k + p)
    out = (sp / se) * (2 * se / (se + sp)) ** 2
    return out if out.ndim else float(out)


def step_mode(m: float):
    """Eigenmode of the step model without its ``exp(i p y)`` factor."""

    def mode(k, p, x, t):
        k = np.asarray(k)[:, None]
        x = np.asarray(x)[None, :]
        q, a_t, a_r = transmission(k, p, m)
        left = np.exp(1j * k * x) + a_r * np.exp(-1j * k * x)
        right = a_t * np.exp(1j * q * x)
        omega = k**2 / (2 * m) + p
        return np.where(x < 0, left, right) * np.exp(-1j * omega * t)

    return mode


def transmitted_mode(m: float):
    """Only the transmitted branch ``A_T exp(i q x)``; used on x > 0."""

    def mode(k, p, x, t):
        k = np.asarray(k)[:, None]
        x = np.asarray(x)[None, :]
        q, a_t, _ = transmission(k, p, m)
        return a_t * np.exp(1j * (q * x - q**2 * t / (2 * m)))

    return mode


# ---------------------------------------------------------------- readout


@dataclass
class ClockHistogram:
    """Clock-pointer density conditioned on the particle being at x > 0."""

    edges: np.ndarray
    density: np.ndarray
    detection_weight: float
    t: float
    spec: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def binned_mass(self) -> float:
        return float(np.sum(self.density) * self.width)

    def normalized(self) -> np.ndarray:
        return self.density / self.binned_mass

    def moments(self) -> tuple[float, float]:
        w = self.normalized() * self.width
        mean = float(np.sum(w * self.centers))
        return mean, float(math.sqrt(np.sum(w * (self.centers - mean) ** 2)))

    def peak(self) -> float:
        """Location of the density maximum, refined by a parabola through 3 bins."""
        i = int(np.argmax(self.density))
        y = self.centers
        if 0 < i < len(y) - 1:
            a, b, c = self.density[i - 1: i + 2]
            denom = a - 2 * b + c
            if denom != 0:
                return float(y[i] + 0.5 * self.width * (a - c) / denom)
        return float(y[i])

    def write(self, path: str | Path) -> tuple[Path, Path]:
        """CSV (y_center, density) plus a JSON sidecar."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y_center", "density"])
            for yc, d in zip(self.centers, self.density):
                w.writerow([repr(float(yc)), repr(float(d))])
        side = path.with_suffix(".json")
        side.write_text(
            json.dumps(
                {
                    "detection_weight": self.detection_weight,
                    "t": self.t,
                    "spec": self.spec,
                    "grid": self.meta,
                },
                indent=2,
                sort_keys=True,
                default=float,
            )
        )
        return path, side


def appendix_gamma(spec: PacketSpec, y):
    """Variance of the readout in the inaccurate limit, as a function of y."""
    y = np.asarray(y, dtype=float)
    return spec.dy**2 + (spec.m * spec.dx / spec.k0) ** 2 + (y / (2 * spec.k0 * spec.dx)) ** 2


def appendix_density(spec: PacketSpec, y):
    """Normalized Gaussian readout density of the inaccurate limit."""
    g = appendix_gamma(spec, y)
    tc = spec.m * spec.x0 / spec.k0
    return np.exp(-((y - tc) ** 2) / (2 * g)) / np.sqrt(2 * np.pi * g)


def accurate_gamma(spec: PacketSpec, y, reading: str = "dimensional"):
    """Kinematic readout variance of the accurate limit.

    ``reading="printed"`` uses ``dx^2 + (y/2 k0 dx)^2`` literally;
    ``"dimensional"`` uses ``(m dx/k0)^2`` for the first term, the form that
    matches the inaccurate-limit expression without its ``dy^2`` term.
    """
    y = np.asarray(y, dtype=float)
    first = spec.dx**2 if reading == "printed" else (spec.m * spec.dx / spec.k0) ** 2
    return first + (y / (2 * spec.k0 * spec.dx)) ** 2


def late_time(spec: PacketSpec | BimodalPacketSpec) -> float:
    """Default readout time.

    Arrival plus five kinematic and five clock widths, pushed later if
    needed until the incident mass left on x < 0 is below a tenth of
    the readout tolerance.
    """
    if isinstance(spec, BimodalPacketSpec):
        return max(late_time(spec.component(1)), late_time(spec.component(2)))
    t = spec.m * spec.x0 / spec.k0 + 5 * spec.m * spec.dx / spec.k0 + 5 * spec.dy
    target = 0.1 * PENDING_TOL
    if spec.pending_mass(t) <= target:
        return t
    hi = 2 * t
    while spec.pending_mass(hi) > target:
        if hi > 1e6 * t:
            raise DomainError("incident packet never leaves x < 0 (too much k < 0 weight)")
        hi *= 2
    return float(brentq(lambda s: spec.pending_mass(s) - target, t, hi, xtol=1e-6 * hi))


def pending_mass(spec: Packet, t: float) -> float | None:
    """Incident probability still on x < 0 at time t (None if unknown)."""
    if isinstance(spec, PacketSpec):
        return spec.pending_mass(t)
    if isinstance(spec, BimodalPacketSpec):
        return spec.w1 * spec.component(1).pending_mass(t) + spec.w2 * spec.component(2).pending_mass(t)
    return None


def _require_late(spec: Packet, t: float) -> None:
    left = pending_mass(spec, t)
    if left is not None and left > PENDING_TOL:
        raise PrematureReadoutError(
            f"incident mass {left:.2e} still on x < 0 at t={t}; read the clock later"
        )


def detection_weight(spec: Packet, grid: QuadratureGrid | None = None) -> float:
    """Late-time probability on x > 0: detection probability averaged over |f g|^2."""
    grid = grid or QuadratureGrid.build(spec)
    k, p = grid.k_nodes[:, None], grid.p_nodes[None, :]
    pos = k > 0
    q, a_t, _ = transmission(np.where(pos, k, 1.0), p, spec.m)
    flux = np.where(pos, (q / np.where(pos, k, 1.0)) * np.abs(a_t) ** 2, 0.0)
    wk = grid.k_weights * np.abs(spec.g(grid.k_nodes)) ** 2
    wp = grid.p_weights * np.abs(spec.f(grid.p_nodes)) ** 2
    return float(4 * math.pi**2 * spec.N**2 * (wk @ flux @ wp))


def default_window(spec: Packet, half_widths: float = 6.0) -> tuple[float, float]:
    if isinstance(spec, PacketSpec):
        tc = spec.m * spec.x0 / spec.k0
        r = half_widths * math.sqrt(float(appendix_gamma(spec, tc)))
        return tc - r, tc + r
    if isinstance(spec, BimodalPacketSpec):
        lo1, hi1 = default_window(spec.component(1), half_widths)
        lo2, hi2 = default_window(spec.component(2), half_widths)
        return min(lo1, lo2), max(hi1, hi2)
    raise DomainError("no default y-window for this packet; pass window=")


def _q_panels(spec: Packet, radius: float, pieces: int) -> list[tuple[float, float]]:
    p_lo, p_hi = spec.p_interval(radius)
    out = []
    for lo, hi in spec.k_intervals(radius):
        lo = max(lo, 0.0)
        a = math.sqrt(lo**2 + 2 * spec.m * p_lo)
        b = math.sqrt(hi**2 + 2 * spec.m * p_hi)
        out.append((a, b))
    merged: list[list[float]] = []
    for a, b in sorted(out):
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    panels = []
    for a, b in merged:
        edges = np.linspace(a, b, pieces + 1)
        panels += list(zip(edges[:-1], edges[1:]))
    return panels


def _readout_plancherel(spec, y, radius, n_q, n_inner, q_pieces):
    """rho(y) as t -> infinity by integrating |psi|^2 over x in closed form.

    Writing the transmitted wave as ``N int dq exp(i q x - i q^2 t/2m) Phi(q, y)``
    (possible because the eigenfrequency equals q^2/2m), Plancherel gives
    ``rho(y) = 2 pi N^2 int dq |Phi(q, y)|^2`` with
    ``Phi = (q/m) exp(i q^2 y/2m) int dk f(p) g(k) A_T exp(-i k^2 y/2m)`` at
    ``p = (q^2 - k^2)/2m``.  The leading phase drops out of the modulus, so
    the k nodes can be shared by all q and the whole sum is one matrix product.
    """
    m = spec.m
    p_lo, p_hi = spec.p_interval(radius)
    k_ints = [(max(lo, 0.0), hi) for lo, hi in spec.k_intervals(radius)]
    qn, qw = gauss_legendre_panels(_q_panels(spec, radius, q_pieces), n_q)
    x0 = getattr(spec, "x0", 0.0)
    y_ext = (float(np.min(y)), float(np.max(y)))
    phi = np.zeros((len(y), len(qn)), dtype=complex)
    used = 0
    for lo, hi in k_ints:
        if hi <= lo:
            continue
        width = hi - lo
        # Resolve the phase k x0 - k^2 y/2m and the clock band, whose
        # width in k is sigma_p m / k at fixed q.
        freq = max(abs(x0 - k * yy / m) for k in (lo, hi) for yy in y_ext)
        band = spec.sigma_p * m / hi
        n = max(n_inner, int(math.ceil(freq * width + 16 * width / band)) + 64)
        panels = int(math.ceil(n / 16))
        edges = np.linspace(lo, hi, panels + 1)
        k, wk = gauss_legendre_panels(list(zip(edges[:-1], edges[1:])), 16)
        used += len(k)
        kk, qq = k[:, None], qn[None, :]
        p = (qq**2 - kk**2) / (2 * m)
        inside = (p >= p_lo) & (p <= p_hi)
        amp = np.where(inside, spec.f(np.where(inside, p, p_lo)), 0.0)
        amp = amp * (wk * spec.g(k))[:, None] * (qq / m) * (2 * kk / (kk + qq))
        phi += np.exp(-0.5j * np.outer(y, k**2) / m) @ amp
    rho = np.abs(phi) ** 2 @ qw
    return 2 * math.pi * spec.N**2 * rho, used


def _readout_grid(spec, y, t, grid):
    """rho(y) at finite t by synthesizing psi on an x > 0 grid.

    The discrete k and p sums are quasi-periodic in x and y, so the grid is
    refined until their alias period exceeds the region actually sampled.
    """
    m = spec.m
    k_hi = grid.k_nodes.max()
    k_lo = max(grid.k_nodes.min(), 1e-12)
    p_hi, p_lo = grid.p_nodes.max(), grid.p_nodes.min()
    q_hi = math.sqrt(k_hi**2 + 2 * m * p_hi)
    q_lo = math.sqrt(k_lo**2 + 2 * m * p_lo)
    x0 = getattr(spec, "x0", 0.0)
    dx = getattr(spec, "dx", 0.0)
    # Farthest reach of the fastest component since it could first cross.
    spread = dx * math.sqrt(1 + (t / (2 * m * dx**2)) ** 2) if dx else 0.0
    t_in = max(m * (x0 - 6 * dx) / k_hi, 0.0)
    x_max = q_hi * max(t - t_in, 0.0) / m + 6 * spread
    h = math.pi / (2 * (q_hi - q_lo) + 1e-300)
    n_x = int(math.ceil(x_max / h)) + 1
    x = np.linspace(0.0, x_max, n_x)

    # Ranges of the phase derivative in k and in p over the sampled region.
    x_extent = x_max + x0 + k_hi * t / m + 12 * dx
    y_extent = abs(t - float(np.min(y))) + abs(t - float(np.max(y))) + m * x_max / q_lo
    n_k = max(grid.n_k, int(math.ceil(0.4 * (k_hi - k_lo) * x_extent)))
    n_p = max(grid.n_p, int(math.ceil(0.4 * (p_hi - p_lo) * y_extent)))
    fine = QuadratureGrid.build(spec, n_k=n_k, n_p=n_p, radius=grid.radius)

    rho = np.empty(len(y))
    for s in range(0, len(y), 32):
        psi = synthesize(spec, transmitted_mode(m), fine, x, y[s: s + 32], t, check=False)
        rho[s: s + 32] = np.trapezoid(np.abs(psi) ** 2, x, axis=1)
    return rho, {"n_x": n_x, "x_max": x_max, "grid_n_k": fine.n_k, "grid_n_p": fine.n_p}


def readout_distribution(
    spec: Packet,
    t: float | None = None,
    grid: QuadratureGrid | None = None,
    bins: int = 400,
    window: tuple[float, float] | None = None,
    method: str = "plancherel",
    n_q: int = 128,
    n_inner: int = 128,
    q_pieces: int = 2,
) -> ClockHistogram:
    """Clock readout density rho(y) on x > 0 after the particle has passed.

    ``method="plancherel"`` evaluates the t -> infinity limit with the x
    integral done analytically; ``method="grid"`` synthesizes psi at time t
    on an explicit x grid (slower, used as a cross-check).
    """
    if t is None:
        t = late_time(spec)
    _require_late(spec, t)
    grid = grid or QuadratureGrid.build(spec)
    grid.check(spec)
    lo, hi = window or default_window(spec)
    edges = np.linspace(lo, hi, bins + 1)
    y = 0.5 * (edges[1:] + edges[:-1])
    meta = {"method": method, "n_k": grid.n_k, "n_p": grid.n_p, "radius": grid.radius, "bins": bins}
    if method == "plancherel":
        rho, used = _readout_plancherel(spec, y, grid.radius, n_q, n_inner, q_pieces)
        meta.update(n_q=n_q, n_inner=used)
    elif method == "grid":
        rho, extra = _readout_grid(spec, y, t, grid)
        meta.update(extra)
    else:
        raise DomainError(f"unknown method {method!r}")
    weight = detection_weight(spec, grid)
    meta["negative_p_mass"] = spec.negative_p_mass
    left = pending_mass(spec, t)
    if left is not None:
        meta["pending_mass"] = left
    return ClockHistogram(edges, rho, weight, t, _spec_dict(spec), meta)


def _spec_dict(spec) -> dict:
    try:
        return {k: v for k, v in asdict(spec).items() if isinstance(v, (int, float, str))}
    except TypeError:
        return {"type": type(spec).__name__}


def region_mass(spec: Packet, grid: QuadratureGrid, t: float, x: np.ndarray, mode=None) -> float:
    """Probability on the span of ``x`` at time t, summed over all clock readings.

    The y integral is done exactly (Parseval in p), the x integral by the
    trapezoid rule on the supplied grid.
    """
    mode = mode or step_mode(spec.m)
    a_k = grid.k_weights * spec.g(grid.k_nodes)
    dens = np.zeros(len(x))
    for p, wp in zip(grid.p_nodes, grid.p_weights):
        chi = a_k @ mode(grid.k_nodes, float(p), x, t)
        dens += wp * abs(spec.f(p)) ** 2 * np.abs(chi) ** 2
    return float(2 * math.pi * spec.N**2 * np.trapezoid(dens, x))


# ---------------------------------------------------------------- peaks


@dataclass(frozen=True)
class PhasePeaks:
    x_peak: float
    y_peak: float
    arrival: float
    q0: float


def phase_peaks(spec: PacketSpec, t: float) -> PhasePeaks:
    """Stationary-phase location of the transmitted packet in (x, y)."""
    q0 = math.sqrt(spec.k0**2 + 2 * spec.m * spec.p0)
    x_peak = -(q0 / spec.k0) * spec.x0 + q0 * t / spec.m
    y_peak = t - spec.m * x_peak / q0
    return PhasePeaks(x_peak, y_peak, spec.m * spec.x0 / spec.k0, q0)


# ---------------------------------------------------------------- two peaks


class UnresolvablePeaksError(ToaLabError):
    pass


def peak_width(spec: PacketSpec) -> float:
    tc = spec.m * spec.x0 / spec.k0
    return math.sqrt(float(appendix_gamma(spec, tc)))


def peak_windows(spec: BimodalPacketSpec, half_widths: float = 3.0):
    """Integration windows around each classical arrival, split at the midpoint if they touch."""
    t1, t2 = spec.times
    s1, s2 = peak_width(spec.component(1)), peak_width(spec.component(2))
    if abs(t1 - t2) <= 3 * max(s1, s2):
        raise UnresolvablePeaksError(
            f"arrivals {t1:.3g} and {t2:.3g} closer than three widths ({max(s1, s2):.3g})"
        )
    w1 = [t1 - half_widths * s1, t1 + half_widths * s1]
    w2 = [t2 - half_widths * s2, t2 + half_widths * s2]
    # t2 < t1 because k2 > k1.
    if w2[1] > w1[0]:
        mid = 0.5 * (t1 + t2)
        w2[1] = w1[0] = mid
    return tuple(w1), tuple(w2)


def window_mass(hist: ClockHistogram, lo: float, hi: float) -> float:
    c = hist.centers
    sel = (c >= lo) & (c < hi)
    return float(np.sum(hist.density[sel]) * hist.width)


def clock_for_accuracy(dy: float, ratio: float = 2.0) -> tuple[float, float]:
    """Clock (p0, dy) with mean momentum ``ratio / dy``."""
    return ratio / dy, dy


def two_peak_experiment(
    spec: BimodalPacketSpec,
    dy_sweep: Iterable[float],
    p0_ratio: float = 2.0,
    bins: int = 800,
    n_q: int = 128,
    n_inner: int = 256,
) -> list[dict]:
    """Peak-weight ratio of a two-speed packet as the clock accuracy varies.

    For each ``dy`` the clock mean momentum is ``p0_ratio / dy``.  The
    returned rows hold the measured mass ratio near t1 vs t2 and the
    prediction from the detection probability at the mean clock momentum.
    """
    rows = []
    for dy in dy_sweep:
        p0 = p0_ratio / dy
        s = BimodalPacketSpec(spec.m, spec.k1, spec.k2, spec.dx, spec.x0, p0, dy, spec.w1, spec.w2)
        (a1, b1), (a2, b2) = peak_windows(s)
        lo = min(a1, a2) - 3 * peak_width(s.component(2))
        hi = max(b1, b2) + 3 * peak_width(s.component(1))
        hist = readout_distribution(s, bins=bins, window=(lo, hi), n_q=n_q, n_inner=n_inner)
        m1, m2 = window_mass(hist, a1, b1), window_mass(hist, a2, b2)
        E1, E2 = s.component(1).E0, s.component(2).E0
        d1, d2 = detection_probability(E1, p0), detection_probability(E2, p0)
        pred = (s.w1 * d1) / (s.w2 * d2) if s.w2 > 0 else math.inf
        rows.append(
            {
                "dy": dy,
                "p0": p0,
                "mass1": m1,
                "mass2": m2,
                "ratio": m1 / m2 if m2 > 0 else math.inf,
                "predicted": pred,
                "weight_ratio": s.w1 / s.w2 if s.w2 > 0 else math.inf,
            }
        )
    return rows
