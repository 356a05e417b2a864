"""Packets, quadrature grids and the eigenmode synthesis engine.

Units are natural with hbar = 1, so time and inverse energy share units.
A joint particle/clock state is written as a double integral over the
particle wavenumber ``k`` and the clock momentum ``p``::

    psi(x, y, t) = N * int dk int_0^inf dp f(p) g(k) phi_kp(x, y, t)

Every model supplies its own eigenmodes ``phi_kp``; the clock dependence is
always ``exp(i p y)`` so mode functions only return the ``(x, t)`` part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

__all__ = [
    "ToaLabError",
    "ResolutionError",
    "DomainError",
    "PrematureReadoutError",
    "Packet",
    "PacketSpec",
    "BimodalPacketSpec",
    "EnvelopePacket",
    "QuadratureGrid",
    "normalization",
    "classical_toa",
    "synthesize",
    "free_mode",
    "free_packet_closed_form",
    "gauss_legendre_panels",
]


class ToaLabError(Exception):
    """Base class for errors raised by this package."""


class ResolutionError(ToaLabError):
    """A quadrature or grid does not resolve the integrand."""

    def __init__(self, message: str, axis: str | None = None):
        super().__init__(message)
        self.axis = axis


class DomainError(ToaLabError, ValueError):
    """Arguments outside the domain of an operation."""


class PrematureReadoutError(ToaLabError):
    """The clock is read before the particle has left the x < 0 region."""


# Truncation radius of every envelope in units of its amplitude standard deviation.
DEFAULT_RADIUS = 6.0
DEFAULT_NODES = 128


def gauss_legendre_panels(
    panels: Sequence[tuple[float, float]], n_per_panel: int
) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on a union of intervals."""
    t, w = np.polynomial.legendre.leggauss(n_per_panel)
    nodes, weights = [], []
    for lo, hi in panels:
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (t + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _merge(intervals: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


class Packet:
    """Interface shared by all particle/clock initial states.

    Subclasses provide the particle envelope ``g(k)``, the clock envelope
    ``f(p)`` and the intervals where each is supported.
    """

    m: float
    p0: float
    dy: float

    def g(self, k):
        raise NotImplementedError

    def k_intervals(self, radius: float = DEFAULT_RADIUS) -> list[tuple[float, float]]:
        raise NotImplementedError

    @property
    def norm_g2(self) -> float:
        """Exact value of int |g(k)|^2 dk."""
        raise NotImplementedError

    def f(self, p):
        p = np.asarray(p, dtype=float)
        return np.exp(-self.dy**2 * (p - self.p0) ** 2)

    @property
    def sigma_p(self) -> float:
        """Standard deviation of the clock amplitude envelope f."""
        return 1.0 / (math.sqrt(2.0) * self.dy)

    def p_interval(self, radius: float = DEFAULT_RADIUS) -> tuple[float, float]:
        lo = max(0.0, self.p0 - radius * self.sigma_p)
        return lo, self.p0 + radius * self.sigma_p

    @property
    def norm_f2(self) -> float:
        """int |f|^2 over the full line (the p < 0 tail is not renormalized away)."""
        return math.sqrt(math.pi / 2.0) / self.dy

    @property
    def negative_p_mass(self) -> float:
        """Fraction of |f|^2 lying on p < 0, discarded by the p > 0 restriction."""
        return 0.5 * math.erfc(math.sqrt(2.0) * self.dy * self.p0)

    @property
    def N(self) -> float:
        return 1.0 / (2.0 * math.pi * math.sqrt(self.norm_f2 * self.norm_g2))


@dataclass(frozen=True)
class PacketSpec(Packet):
    """Gaussian particle packet centred at ``-x0`` and Gaussian clock.

    ``g(k) = exp(-dx^2 (k - k0)^2 + i k x0)`` and
    ``f(p) = exp(-dy^2 (p - p0)^2)``; ``dy`` is the clock accuracy.
    """

    m: float
    k0: float
    dx: float
    x0: float
    p0: float
    dy: float

    def __post_init__(self):
        for name in ("m", "dx", "dy", "x0"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def sigma_k(self) -> float:
        return 1.0 / (math.sqrt(2.0) * self.dx)

    @property
    def E0(self) -> float:
        return self.k0**2 / (2.0 * self.m)

    def g(self, k):
        k = np.asarray(k, dtype=float)
        return np.exp(-self.dx**2 * (k - self.k0) ** 2 + 1j * k * self.x0)

    def k_intervals(self, radius: float = DEFAULT_RADIUS):
        r = radius * self.sigma_k
        return [(self.k0 - r, self.k0 + r)]

    @property
    def norm_g2(self) -> float:
        return math.sqrt(math.pi / 2.0) / self.dx

    @property
    def right_mass(self) -> float:
        """Initial probability on x > 0 (position density has std dx)."""
        return 0.5 * math.erfc(self.x0 / (math.sqrt(2.0) * self.dx))

    def pending_mass(self, t: float) -> float:
        """Mass of the freely evolved incident packet still on x < 0 at time t."""
        centre = -self.x0 + self.k0 * t / self.m
        width = self.dx * math.sqrt(1.0 + (t / (2.0 * self.m * self.dx**2)) ** 2)
        return 0.5 * math.erfc(centre / (math.sqrt(2.0) * width))

    def with_(self, **changes) -> "PacketSpec":
        data = {k: getattr(self, k) for k in ("m", "k0", "dx", "x0", "p0", "dy")}
        data.update(changes)
        return PacketSpec(**data)


@dataclass(frozen=True)
class BimodalPacketSpec(Packet):
    """Superposition ``sqrt(w1) g1 + sqrt(w2) g2`` of two Gaussian packets.

    Both components share ``m, dx, x0`` and the clock; each ``g_i`` has the
    same amplitude normalization as :class:`PacketSpec`.
    """

    m: float
    k1: float
    k2: float
    dx: float
    x0: float
    p0: float
    dy: float
    w1: float = 0.5
    w2: float = 0.5

    def __post_init__(self):
        if not (self.w1 >= 0 and self.w2 >= 0 and abs(self.w1 + self.w2 - 1.0) < 1e-12):
            raise DomainError("weights must be non-negative and sum to one")
        if not self.k2 > self.k1 > 0:
            raise DomainError("need k2 > k1 > 0")
        for name in ("m", "dx", "dy", "x0"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    def component(self, i: int) -> PacketSpec:
        k = self.k1 if i == 1 else self.k2
        return PacketSpec(self.m, k, self.dx, self.x0, self.p0, self.dy)

    @property
    def sigma_k(self) -> float:
        return 1.0 / (math.sqrt(2.0) * self.dx)

    def g(self, k):
        return math.sqrt(self.w1) * self.component(1).g(k) + math.sqrt(self.w2) * self.component(2).g(k)

    def k_intervals(self, radius: float = DEFAULT_RADIUS):
        parts = []
        for i, w in ((1, self.w1), (2, self.w2)):
            if w > 0:
                parts += self.component(i).k_intervals(radius)
        return _merge(parts)

    @property
    def norm_g2(self) -> float:
        overlap = math.exp(-self.dx**2 * (self.k1 - self.k2) ** 2 / 2.0)
        return (math.sqrt(math.pi / 2.0) / self.dx) * (
            self.w1 + self.w2 + 2.0 * math.sqrt(self.w1 * self.w2) * overlap
        )

    @property
    def times(self) -> tuple[float, float]:
        return self.m * self.x0 / self.k1, self.m * self.x0 / self.k2


@dataclass(frozen=True)
class EnvelopePacket(Packet):
    """Arbitrary particle envelope ``g`` on finite support, Gaussian clock.

    ``norm_g2`` is computed by quadrature when not supplied.
    """

    m: float
    envelope: Callable[[np.ndarray], np.ndarray]
    support: tuple[tuple[float, float], ...]
    p0: float
    dy: float
    norm: float | None = None
    panels_per_interval: int = 8

    def g(self, k):
        k = np.asarray(k, dtype=float)
        out = np.zeros(k.shape, dtype=complex)
        inside = np.zeros(k.shape, dtype=bool)
        for lo, hi in self.support:
            inside |= (k >= lo) & (k <= hi)
        out[inside] = self.envelope(k[inside])
        return out

    def k_intervals(self, radius: float = DEFAULT_RADIUS):
        # Hard-edged support: split into equal panels for the adaptive fallback.
        out = []
        for lo, hi in self.support:
            edges = np.linspace(lo, hi, self.panels_per_interval + 1)
            out += list(zip(edges[:-1], edges[1:]))
        return out

    @property
    def norm_g2(self) -> float:
        if self.norm is not None:
            return self.norm
        k, w = gauss_legendre_panels(self.k_intervals(), 64)
        return float(np.sum(w * np.abs(self.g(k)) ** 2))


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Legendre nodes for the k and p integrals.

    Nodes cover each envelope out to ``radius`` amplitude standard
    deviations; the p axis is additionally cut at p = 0.
    """

    k_nodes: np.ndarray
    k_weights: np.ndarray
    p_nodes: np.ndarray
    p_weights: np.ndarray
    radius: float = DEFAULT_RADIUS
    n_k: int = DEFAULT_NODES
    n_p: int = DEFAULT_NODES
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(
        cls,
        packet: Packet,
        n_k: int = DEFAULT_NODES,
        n_p: int = DEFAULT_NODES,
        radius: float = DEFAULT_RADIUS,
    ) -> "QuadratureGrid":
        intervals = packet.k_intervals(radius)
        per_panel = max(4, int(math.ceil(n_k / len(intervals))))
        k, wk = gauss_legendre_panels(intervals, per_panel)
        p, wp = gauss_legendre_panels([packet.p_interval(radius)], n_p)
        return cls(k, wk, p, wp, radius, len(k), len(p), {"k_intervals": intervals})

    @classmethod
    def single(cls, k: float, p: float) -> "QuadratureGrid":
        """One-point quadrature (unit weights)."""
        return cls(np.array([k]), np.array([1.0]), np.array([p]), np.array([1.0]), 0.0, 1, 1)

    def trimmed(self, fraction: float = 0.1) -> "QuadratureGrid":
        """Copy with the outermost ``fraction`` of nodes on each axis dropped."""

        def cut(x, w):
            n = int(round(len(x) * fraction / 2))
            order = np.argsort(x)
            keep = np.sort(order[n: len(x) - n]) if n else order
            return x[keep], w[keep]

        k, wk = cut(self.k_nodes, self.k_weights)
        p, wp = cut(self.p_nodes, self.p_weights)
        return QuadratureGrid(k, wk, p, wp, self.radius, len(k), len(p), dict(self.meta))

    def check(self, packet: Packet, tol: float = 1e-3) -> None:
        """Raise :class:`ResolutionError` if an envelope is cut off while still large."""
        gk = np.abs(packet.g(self.k_nodes))
        peak = gk.max()
        if peak == 0:
            raise ResolutionError("particle envelope vanishes on every k node", axis="k")
        for lo, hi in packet.k_intervals(self.radius):
            edge = np.abs(packet.g(np.array([lo, hi]) + np.array([1e-12, -1e-12])))
            if isinstance(packet, (PacketSpec, BimodalPacketSpec)) and edge.max() > tol * peak:
                raise ResolutionError(
                    f"k envelope is {edge.max() / peak:.2e} of peak at the truncation edge", axis="k"
                )
        fp = packet.f(self.p_nodes)
        lo, hi = self.p_nodes.min(), self.p_nodes.max()
        top = packet.f(np.array([packet.p_interval(self.radius)[1]]))[0]
        if top > tol * fp.max() or hi < packet.p0:
            raise ResolutionError(f"p envelope not covered (nodes span [{lo}, {hi}])", axis="p")


def normalization(spec: Packet) -> float:
    """Normalization constant N; equals sqrt(dx dy / (2 pi^3)) for Gaussians."""
    return spec.N


def classical_toa(spec: PacketSpec) -> float:
    """Classical arrival time m x0 / k0 at x = 0 of a packet starting at -x0."""
    if spec.k0 <= 0:
        raise DomainError("k0 <= 0: a packet moving left never arrives from the left")
    return spec.m * spec.x0 / spec.k0


Mode = Callable[[np.ndarray, float, np.ndarray, float], np.ndarray]


def free_mode(m: float) -> Mode:
    """Plane wave exp(i k x - i omega t) with omega = k^2/2m + p."""

    def mode(k, p, x, t):
        k = np.asarray(k)[:, None]
        x = np.asarray(x)[None, :]
        omega = k**2 / (2.0 * m) + p
        return np.exp(1j * (k * x - omega * t))

    return mode


def synthesize(packet: Packet, mode: Mode, grid: QuadratureGrid, x, y, t: float, check: bool = True):
    """Double-quadrature value of psi(x, y, t).

    ``mode(k_nodes, p, x, t)`` must return an array of shape ``(n_k, n_x)``
    holding the eigenmode without its ``exp(i p y)`` factor.  The result has
    shape ``(len(y), len(x))``.  Nodes are reduced in a fixed order.
    """
    if check:
        grid.check(packet)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a_k = grid.k_weights * packet.g(grid.k_nodes)
    chi = np.empty((len(grid.p_nodes), len(x)), dtype=complex)
    for i, p in enumerate(grid.p_nodes):
        chi[i] = a_k @ mode(grid.k_nodes, float(p), x, t)
    c_p = grid.p_weights * packet.f(grid.p_nodes)
    phase = np.exp(1j * np.outer(y, grid.p_nodes)) * c_p[None, :]
    return packet.N * (phase @ chi)


def free_packet_closed_form(spec: PacketSpec, x, y, t: float):
    """Exact free evolution of the Gaussian packet with the p > 0 clock cut.

    Returns an array of shape ``(len(y), len(x))``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a = spec.dx**2 + 1j * t / (2.0 * spec.m)
    b = 2.0 * spec.dx**2 * spec.k0 + 1j * (x + spec.x0)
    c = -(spec.dx**2) * spec.k0**2
    gx = np.sqrt(np.pi / a) * np.exp(b**2 / (4.0 * a) + c)
    s = y - t
    # int_0^inf f(p) exp(i p s) dp = (sqrt(pi)/2dy) e^{i p0 s - s^2/4dy^2} erfc(z),
    # z = -dy p0 - i s/2dy; erfc(z) = 2 - erfcx(-z) e^{-z^2} keeps everything bounded.
    z = -spec.dy * spec.p0 - 1j * s / (2.0 * spec.dy)
    fy = (np.sqrt(np.pi) / (2.0 * spec.dy)) * (
        2.0 * np.exp(1j * spec.p0 * s - s**2 / (4.0 * spec.dy**2))
        - special.erfcx(-z) * np.exp(-(spec.dy * spec.p0) ** 2)
    )
    return spec.N * np.outer(fy, gx)
