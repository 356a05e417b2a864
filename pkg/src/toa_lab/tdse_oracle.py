"""Brute-force wave-equation validator for the clock models.

The clock momentum p is conserved in every model, so the particle-clock
wavefunction splits into independent 1D problems, one per p node.  Each
channel is evolved on a uniform x grid with an implicit mid-point
(Crank-Nicolson) step built on the fourth-order Numerov/Mehrstellen
discretization

    i B dpsi/dt = K psi,   K = -D2/2m + (B V + V B)/2 - i (B W + W B)/2,

where ``B = tridiag(1, 10, 1)/12`` and ``D2 = tridiag(1, -2, 1)/h^2``.  With
W = 0 the B-weighted norm ``h psi^H B psi`` is conserved exactly; W is a
polynomial absorbing ramp in the outer part of the grid and the probability
it removes is booked per step, so field norm plus absorbed stays at one.

Each channel is stepped relative to the reference frequency ``E_ref + p``
(the phase is multiplied back afterwards).  Every channel then has the same
set of eigenfrequencies, so the time-stepping error is a phase depending on
the particle momentum only and does not distort the clock reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .clock_model import ClockHistogram, _spec_dict, default_window
from .common import (
    BimodalPacketSpec,
    DomainError,
    Packet,
    PacketSpec,
    QuadratureGrid,
    ResolutionError,
    ToaLabError,
    gauss_legendre_panels,
)
from .gradual_clock import potential_profile

KINDS = ("step_clock", "spin_trigger_clock", "gradual")
LEDGER_TOL = 1e-8
# Steps between ledger checks.
CHUNK = 400


@dataclass(frozen=True)
class GridConfig:
    """Uniform x grid, time step, absorbing layers and clock-momentum nodes.

    Nodes sit at half-integer multiples of ``h`` so the clock step at x = 0
    falls midway between two nodes; every node then sees a one-sided value
    of the potential.
    """

    x_lo: float
    n_x: int
    h: float
    dt: float
    m: float = 1.0
    cap_fraction: float = 0.15
    cap_strength: float = 1.0
    p_nodes: np.ndarray = field(default_factory=lambda: np.zeros(1))
    p_weights: np.ndarray = field(default_factory=lambda: np.ones(1))

    def __post_init__(self):
        if self.h <= 0 or self.dt <= 0 or self.n_x < 16:
            raise DomainError("need h > 0, dt > 0 and at least 16 grid points")
        if not 0 <= self.cap_fraction < 0.5:
            raise DomainError("cap_fraction must lie in [0, 0.5)")

    @classmethod
    def span(cls, x_lo: float, x_hi: float, h: float, dt: float, **kw) -> "GridConfig":
        """Grid covering ``[x_lo, x_hi]`` with x = 0 midway between two nodes."""
        n_left = int(math.ceil(-x_lo / h - 0.5))
        n_right = int(math.ceil(x_hi / h - 0.5))
        return cls(-(n_left + 0.5) * h, n_left + n_right + 2, h, dt, **kw)

    @classmethod
    def for_packet(
        cls,
        packet: PacketSpec | BimodalPacketSpec,
        t_final: float,
        n_p: int = 64,
        points_per_wavelength: float = 24.0,
        dt: float = 5e-3,
        p_max: float | None = None,
        left_room: float = 0.0,
        radius: float = 6.0,
        x_right: float | None = None,
    ) -> "GridConfig":
        """Size the grid so the transmitted packet stays clear of the right absorber until ``t_final``.

        ``p_max`` overrides the largest potential drop (defaults to the top
        of the clock band); ``left_room`` adds space on the approach side;
        ``x_right`` fixes the start of the right absorber instead.
        """
        m = packet.m
        quad = QuadratureGrid.build(packet, n_p=n_p, radius=radius)
        k_hi = max(hi for _, hi in packet.k_intervals(radius))
        k_lo = max(min(lo for lo, _ in packet.k_intervals(radius)), 1e-3)
        drop = float(quad.p_nodes.max()) if p_max is None else p_max
        q_hi = math.sqrt(k_hi**2 + 2 * m * drop)
        h = 2 * math.pi / (q_hi * points_per_wavelength)
        width = math.sqrt(2.0) * packet.dx
        spread = width * math.sqrt(1 + (t_final / (2 * m * packet.dx**2)) ** 2)
        lo = -(packet.x0 + 8 * width) - left_room
        t_in = max(m * (packet.x0 - 8 * width) / k_hi, 0.0)
        hi = max(q_hi * max(t_final - t_in, 0.0) / m + 8 * spread, 8 * width)
        if x_right is not None:
            hi = x_right
        pad = (hi - lo) * cls.cap_fraction / (1 - 2 * cls.cap_fraction)
        # Absorber strong enough to stop the slowest component over the layer.
        strength = 40 * k_lo / (m * pad) + q_hi**2 / (2 * m)
        return cls.span(
            lo - pad,
            hi + pad,
            h,
            dt,
            m=m,
            cap_strength=strength,
            p_nodes=quad.p_nodes,
            p_weights=quad.p_weights,
        )

    @property
    def x(self) -> np.ndarray:
        return self.x_lo + self.h * np.arange(self.n_x)

    @property
    def x_hi(self) -> float:
        return self.x_lo + self.h * (self.n_x - 1)

    @property
    def cap_width(self) -> float:
        return self.cap_fraction * (self.x_hi - self.x_lo)

    def absorber(self) -> np.ndarray:
        """Cubic ramp ``W(x)`` in the outer ``cap_fraction`` of each end."""
        x, w = self.x, self.cap_width
        if w == 0:
            return np.zeros_like(x)
        left = np.clip((self.x_lo + w - x) / w, 0, None)
        right = np.clip((x - (self.x_hi - w)) / w, 0, None)
        return self.cap_strength * (left**3 + right**3)

    def check_resolution(self, q_max: float) -> None:
        ppw = 2 * math.pi / (q_max * self.h)
        if ppw < 16:
            raise ResolutionError(f"{ppw:.1f} points per shortest wavelength (need 16)", axis="x")

    def with_p(self, p_nodes: Sequence[float], p_weights: Sequence[float] | None = None) -> "GridConfig":
        p = np.atleast_1d(np.asarray(p_nodes, dtype=float))
        w = np.ones_like(p) if p_weights is None else np.atleast_1d(np.asarray(p_weights, dtype=float))
        return GridConfig(self.x_lo, self.n_x, self.h, self.dt, self.m, self.cap_fraction, self.cap_strength, p, w)


@dataclass
class GridState:
    """Channel fields at time ``t``.

    ``fields`` has shape (channels, components, n_x) and holds the physical
    channel wavefunctions, whose initial value is ``int g(k) e^{ikx} dk``.
    ``absorbed`` (channels, 2) and ``norm`` are fractions of each channel's
    initial B-weighted norm ``initial_norm``; ``initial_mass`` is the plain
    ``int |chi|^2 dx`` at t = 0.
    """

    kind: str
    grid: GridConfig
    p_nodes: np.ndarray
    p_weights: np.ndarray
    fields: np.ndarray
    t: float
    norm: np.ndarray
    absorbed: np.ndarray
    initial_norm: np.ndarray
    initial_mass: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def ledger_error(self) -> float:
        return float(np.max(np.abs(self.norm + self.absorbed.sum(axis=1) - 1.0)))

    def mass(self, lo: float = -np.inf, hi: float = np.inf, component: int | None = None) -> np.ndarray:
        """Probability on ``lo <= x < hi`` per channel in the conserved B-weighted norm.

        Rows of ``h psi^H B psi`` are split by node, so the masses of adjacent
        regions add up to ``norm``.
        """
        x = self.grid.x
        sel = (x >= lo) & (x < hi)
        f = self.fields if component is None else self.fields[:, component: component + 1]
        bf = (10 / 12) * f
        bf[..., 1:] += f[..., :-1] / 12
        bf[..., :-1] += f[..., 1:] / 12
        rows = np.real(np.conj(f) * bf)[..., sel]
        return rows.sum(axis=(1, 2)) * self.grid.h / self.initial_norm


# ------------------------------------------------------------- kernels


@numba.njit(cache=True)
def _factor(diag, off):
    """Thomas factorization of a complex symmetric tridiagonal matrix."""
    n = diag.shape[0]
    cp = np.empty(n, dtype=np.complex128)
    inv = np.empty(n, dtype=np.complex128)
    inv[0] = 1.0 / diag[0]
    cp[0] = off[0] * inv[0]
    for j in range(1, n):
        inv[j] = 1.0 / (diag[j] - off[j - 1] * cp[j - 1])
        cp[j] = off[j] * inv[j] if j < n - 1 else 0.0
    return cp, inv


@numba.njit(parallel=True, cache=True)
def _run_scalar(psi, V, W, h, m, tau, n_steps, split, absorbed):
    """Advance every channel ``n_steps`` implicit mid-point steps in place."""
    n_c, n = psi.shape
    b0, b1 = 10.0 / 12.0, 1.0 / 12.0
    kin_d, kin_o = 1.0 / (m * h * h), -0.5 / (m * h * h)
    for c in numba.prange(n_c):
        kd = np.empty(n, dtype=np.complex128)
        ko = np.empty(n, dtype=np.complex128)
        wd = np.empty(n)
        wo = np.empty(n)
        for j in range(n):
            kd[j] = kin_d + b0 * V[c, j] - 1j * b0 * W[j]
            wd[j] = b0 * W[j]
            if j < n - 1:
                vm = 0.5 * (V[c, j] + V[c, j + 1])
                wm = 0.5 * (W[j] + W[j + 1])
                ko[j] = kin_o + b1 * vm - 1j * b1 * wm
                wo[j] = b1 * wm
            else:
                ko[j] = 0.0
                wo[j] = 0.0
        ld = b0 + 1j * tau * kd
        lo = b1 + 1j * tau * ko
        rd = b0 - 1j * tau * kd
        ro = b1 - 1j * tau * ko
        cp, inv = _factor(ld, lo)
        # Only nodes inside the absorbers contribute to the loss.
        a_lo, a_hi = 0, n
        while a_lo < n and W[a_lo] > 0:
            a_lo += 1
        while a_hi > 0 and W[a_hi - 1] > 0:
            a_hi -= 1
        row = psi[c].copy()
        new = np.empty(n, dtype=np.complex128)
        for _ in range(n_steps):
            # Right-hand side fused with the forward sweep.
            prev = 0j
            for j in range(n):
                acc = rd[j] * row[j]
                if j > 0:
                    acc += ro[j - 1] * row[j - 1] - lo[j - 1] * prev
                if j < n - 1:
                    acc += ro[j] * row[j + 1]
                prev = acc * inv[j]
                new[j] = prev
            for j in range(n - 2, -1, -1):
                new[j] -= cp[j] * new[j + 1]
            # Exact per-step loss: tau h s^H W_B s with s = old + new.
            left = 0.0
            right = 0.0
            for part in range(2):
                j0, j1 = (0, min(a_lo + 1, n)) if part == 0 else (max(a_hi - 1, a_lo + 1), n)
                for j in range(j0, j1):
                    s = row[j] + new[j]
                    ws = wd[j] * s
                    if j > 0:
                        ws += wo[j - 1] * (row[j - 1] + new[j - 1])
                    if j < n - 1:
                        ws += wo[j] * (row[j + 1] + new[j + 1])
                    val = (s.real * ws.real + s.imag * ws.imag) * tau * h
                    if j < split:
                        left += val
                    else:
                        right += val
            absorbed[c, 0] += left
            absorbed[c, 1] += right
            row[:] = new
        psi[c] = row


def _b_norm(psi: np.ndarray, h: float) -> np.ndarray:
    """``h psi^H B psi`` along the last axis, summed over components."""
    a = np.abs(psi) ** 2
    cross = np.real(np.conj(psi[..., :-1]) * psi[..., 1:])
    val = (10 / 12) * a.sum(axis=-1) + (2 / 12) * cross.sum(axis=-1)
    return h * (val.sum(axis=-1) if val.ndim > 1 else val)


def _tridiag(n: int, d: float, o: float) -> sparse.csc_matrix:
    return sparse.diags([np.full(n - 1, o), np.full(n, d), np.full(n - 1, o)], [-1, 0, 1], format="csc")


def _run_two_component(psi, V, W, h, m, tau, n_steps, split, absorbed):
    """Two coupled components per channel; V has shape (channels, 2, 2, n_x)."""
    n = psi.shape[-1]
    B = _tridiag(n, 10 / 12, 1 / 12)
    T = _tridiag(n, 1 / (m * h * h), -0.5 / (m * h * h))
    Wd = sparse.diags(W)
    WB = 0.5 * (B @ Wd + Wd @ B)
    eye2 = sparse.identity(2, format="csc")
    Bb = sparse.kron(B, eye2, format="csc")
    WBb = sparse.kron(WB, eye2, format="csc")
    left_rows = np.repeat(np.arange(n) < split, 2)
    for c in range(psi.shape[0]):
        # Interleave the components: index 2 j + a.
        blocks = [[sparse.diags(V[c, a, b]) for b in range(2)] for a in range(2)]
        Vb = sparse.bmat(blocks, format="csc")
        perm = np.arange(2 * n).reshape(2, n).T.ravel()
        Vb = Vb[perm][:, perm]
        K = sparse.kron(T, eye2) + 0.5 * (Bb @ Vb + Vb @ Bb) - 1j * WBb
        lu = splu((Bb + 1j * tau * K).tocsc())
        rhs = (Bb - 1j * tau * K).tocsr()
        row = psi[c].T.ravel().astype(complex)
        for _ in range(n_steps):
            new = lu.solve(rhs @ row)
            s = row + new
            val = np.real(np.conj(s) * (WBb @ s)) * tau * h
            absorbed[c, 0] += val[left_rows].sum()
            absorbed[c, 1] += val[~left_rows].sum()
            row = new
        psi[c] = row.reshape(n, 2).T


# ---------------------------------------------------------- potentials


def reference_energy(packet: Packet, n: int = 256) -> float:
    """Mean kinetic energy of the particle envelope."""
    k, w = gauss_legendre_panels(packet.k_intervals(), max(8, n // len(packet.k_intervals())))
    wg = w * np.abs(packet.g(k)) ** 2
    return float(wg @ (k**2) / (2 * packet.m) / wg.sum())


def smeared_delta(x: np.ndarray, h: float, width_cells: float = 3.0) -> np.ndarray:
    """Unit-area Gaussian of width ``width_cells * h`` standing in for delta(x)."""
    s = width_cells * h
    return np.exp(-0.5 * (x / s) ** 2) / (math.sqrt(2 * math.pi) * s)


def _channel_potential(kind: str, p: float, x: np.ndarray, h: float, e_ref: float, params: dict):
    """Shifted potential and the frequency that was taken out of it."""
    if kind == "step_clock":
        # p theta(-x) minus the constant p.
        V = -p * (x > 0) - e_ref
        return V, p + e_ref
    if kind == "gradual":
        x_A = params["x_A"]
        V = p * potential_profile(x, x_A) - e_ref
        return V, e_ref
    if kind == "spin_trigger_clock":
        # Components (up = clock running, down = clock stopped); alpha delta(x) |+x><+x|.
        alpha = params["alpha"]
        d = 0.5 * alpha * smeared_delta(x, h, params.get("width_cells", 3.0))
        V = np.empty((2, 2, len(x)))
        V[0, 0] = d - e_ref
        V[1, 1] = d - p - e_ref
        V[0, 1] = V[1, 0] = d
        return V, p + e_ref
    raise DomainError(f"unknown potential kind {kind!r}; expected one of {KINDS}")


def initial_field(packet: Packet, x: np.ndarray) -> np.ndarray:
    """``int g(k) e^{ikx} dk`` on the grid."""
    x = np.asarray(x, dtype=float)
    if isinstance(packet, PacketSpec):
        u = x + packet.x0
        return (math.sqrt(math.pi) / packet.dx) * np.exp(1j * packet.k0 * u - u**2 / (4 * packet.dx**2))
    if isinstance(packet, BimodalPacketSpec):
        out = np.zeros(len(x), dtype=complex)
        for i, w in ((1, packet.w1), (2, packet.w2)):
            if w > 0:
                out += math.sqrt(w) * initial_field(packet.component(i), x)
        return out
    intervals = packet.k_intervals()
    width = max(hi - lo for lo, hi in intervals)
    reach = float(np.max(np.abs(x))) + abs(getattr(packet, "x0", 0.0))
    per = max(32, int(math.ceil(width * reach / 2)) + 32)
    panels = []
    for lo, hi in intervals:
        cuts = np.linspace(lo, hi, int(math.ceil(per / 16)) + 1)
        panels += list(zip(cuts[:-1], cuts[1:]))
    k, w = gauss_legendre_panels(panels, 16)
    out = np.empty(len(x), dtype=complex)
    amp = w * packet.g(k)
    for s in range(0, len(x), 2048):
        out[s: s + 2048] = np.exp(1j * np.outer(x[s: s + 2048], k)) @ amp
    return out


# ---------------------------------------------------------- evolution


def evolve_channels(
    kind: str,
    packet: Packet,
    grid: GridConfig,
    t_final: float,
    params: dict | None = None,
    component: int = 0,
) -> GridState:
    """Evolve one 1D problem per p node of ``grid`` from t = 0 to ``t_final``.

    ``component`` selects the initially occupied spin component for the
    two-component model (0 = clock running).
    """
    params = dict(params or {})
    if kind not in KINDS:
        raise DomainError(f"unknown potential kind {kind!r}; expected one of {KINDS}")
    if t_final < 0:
        raise DomainError("t_final must be non-negative")
    x, h, m = grid.x, grid.h, grid.m
    p_nodes = np.asarray(grid.p_nodes, dtype=float)
    k_hi = max(hi for _, hi in packet.k_intervals())
    grid.check_resolution(math.sqrt(k_hi**2 + 2 * m * max(float(np.max(p_nodes)), 0.0)))
    e_ref = reference_energy(packet)
    two = kind == "spin_trigger_clock"
    n_c = 2 if two else 1

    chi0 = initial_field(packet, x)
    chi0[:2] = chi0[-2:] = 0.0
    scale = math.sqrt(float(_b_norm(chi0, h)))
    mass0 = float(np.sum(np.abs(chi0) ** 2) * h)

    pots, rates = [], []
    for p in p_nodes:
        V, rate = _channel_potential(kind, float(p), x, h, e_ref, params)
        pots.append(V)
        rates.append(rate)
    psi = np.zeros((len(p_nodes), n_c, len(x)), dtype=complex)
    psi[:, component] = chi0 / scale
    absorbed = np.zeros((len(p_nodes), 2))
    W = grid.absorber()
    split = int(np.searchsorted(x, 0.0))
    n_steps = int(round(t_final / grid.dt))
    tau = 0.5 * grid.dt
    done = 0
    while done < n_steps:
        chunk = min(CHUNK, n_steps - done)
        if two:
            _run_two_component(psi, np.array(pots), W, h, m, tau, chunk, split, absorbed)
        else:
            flat = np.ascontiguousarray(psi[:, 0])
            _run_scalar(flat, np.array(pots), W, h, m, tau, chunk, split, absorbed)
            psi[:, 0] = flat
        done += chunk
        norm = _b_norm(psi, h)
        err = np.max(np.abs(norm + absorbed.sum(axis=1) - 1.0))
        if not np.isfinite(err) or err > LEDGER_TOL:
            raise ToaLabError(
                f"norm ledger off by {err:.2e} after step {done} (t={done * grid.dt:.4g}); reduce dt or h"
            )
    t = n_steps * grid.dt
    phase = np.exp(-1j * np.asarray(rates) * t)
    fields = psi * (scale * phase)[:, None, None]
    return GridState(
        kind,
        grid,
        p_nodes.copy(),
        np.asarray(grid.p_weights, dtype=float).copy(),
        fields,
        t,
        _b_norm(psi, h),
        absorbed,
        np.full(len(p_nodes), scale**2),
        np.full(len(p_nodes), mass0),
        params,
    )


def evolve_channel(
    p: float,
    kind: str,
    params: dict | None,
    packet: Packet,
    grid: GridConfig,
    t_final: float,
) -> GridState:
    """Single clock-momentum channel (unit quadrature weight)."""
    return evolve_channels(kind, packet, grid.with_p([p]), t_final, params)


def flux_fractions(state: GridState, boundary: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """(reflected, transmitted) probability per channel.

    B-weighted field mass on each side of ``boundary`` plus what the
    absorber on that side has removed; the two add up to one.
    """
    left = state.mass(hi=boundary) + state.absorbed[:, 0]
    right = state.mass(lo=boundary) + state.absorbed[:, 1]
    return left, right


# ---------------------------------------------------------- readout


def _merge_states(channels) -> GridState:
    if isinstance(channels, GridState):
        return channels
    channels = list(channels)
    if not channels:
        raise DomainError("no channels given")
    t = channels[0].t
    for c in channels[1:]:
        if abs(c.t - t) > 1e-12 * max(1.0, abs(t)):
            raise DomainError(f"channel time mismatch: {c.t} vs {t}")
        if c.grid.n_x != channels[0].grid.n_x or c.grid.x_lo != channels[0].grid.x_lo:
            raise DomainError("channels live on different x grids")
    first = channels[0]
    return GridState(
        first.kind,
        first.grid,
        np.concatenate([c.p_nodes for c in channels]),
        np.concatenate([c.p_weights for c in channels]),
        np.concatenate([c.fields for c in channels]),
        t,
        np.concatenate([c.norm for c in channels]),
        np.concatenate([c.absorbed for c in channels]),
        np.concatenate([c.initial_norm for c in channels]),
        np.concatenate([c.initial_mass for c in channels]),
        first.params,
    )


def reconstruct_readout(
    channels,
    packet: Packet,
    bins: int = 400,
    window: tuple[float, float] | None = None,
    component: int | None = None,
) -> ClockHistogram:
    """Clock density on x > 0 from evolved channels, bin for bin with clock_model.

    ``psi(x, y) = N sum_p w_p f(p) e^{ipy} chi_p(x)`` is synthesized at the
    bin centres and ``|psi|^2`` is summed over the x > 0 grid points.
    """
    state = _merge_states(channels)
    lo, hi = window or default_window(packet)
    edges = np.linspace(lo, hi, bins + 1)
    y = 0.5 * (edges[1:] + edges[:-1])
    x = state.grid.x
    right = x > 0
    f = state.fields if component is None else state.fields[:, component: component + 1]
    c = packet.N * state.p_weights * packet.f(state.p_nodes)
    phase = np.exp(1j * np.outer(y, state.p_nodes)) * c[None, :]
    rho = np.zeros(len(y))
    for a in range(f.shape[1]):
        chi = f[:, a][:, right]
        for s in range(0, len(y), 64):
            psi = phase[s: s + 64] @ chi
            rho[s: s + 64] += np.sum(np.abs(psi) ** 2, axis=1) * state.grid.h
    # Probability on x > 0 averaged over the retained clock momenta.
    w = state.p_weights * np.abs(packet.f(state.p_nodes)) ** 2
    on_right = np.sum(np.abs(f[:, :, right]) ** 2, axis=(1, 2)) * state.grid.h / state.initial_mass
    weight = float(w @ on_right / w.sum())
    meta = {
        "method": "tdse",
        "kind": state.kind,
        "n_x": state.grid.n_x,
        "h": state.grid.h,
        "dt": state.grid.dt,
        "n_p": len(state.p_nodes),
        "bins": bins,
        "ledger_error": state.ledger_error,
        "absorbed_right": float(np.max(state.absorbed[:, 1])),
    }
    return ClockHistogram(edges, rho, weight, state.t, _spec_dict(packet), meta)


def l2_distance(a: ClockHistogram, b: ClockHistogram) -> float:
    """Relative L2 distance ``||rho_a - rho_b|| / ||rho_b||`` on a shared binning."""
    if a.density.shape != b.density.shape or not np.allclose(a.edges, b.edges):
        raise DomainError("histograms use different bins")
    return float(np.linalg.norm(a.density - b.density) / np.linalg.norm(b.density))


# ---------------------------------------------------------- WKB probe


@dataclass(frozen=True)
class ReflectionResult:
    reflected: float
    transmitted: float
    ledger_error: float
    x_A: float


def reflection_probe(
    p_y: float,
    epsilon: float | None = None,
    packet: PacketSpec | None = None,
    sharp: bool = False,
    points_per_wavelength: float = 48.0,
    dt: float = 1e-2,
) -> ReflectionResult:
    """Late-time reflected probability off ``p_y V(x)`` (``sharp=True``: a step of equal height).

    The gradual profile has ``x_A = 1/(epsilon sqrt(2m))``; the particle
    comes in from the left and the reflected part is everything that ends up
    back on the approach side of the arrival point.  The transmitted wave is
    left to the right absorber.
    """
    packet = packet or PacketSpec(1.0, 1.0, 8.0, 1.0, 0.0, 1.0)
    m = packet.m
    if sharp:
        x_A = 0.0
    else:
        if epsilon is None or epsilon <= 0:
            raise DomainError("epsilon must be positive for the gradual profile")
        x_A = 1.0 / (epsilon * math.sqrt(2 * m))
    width = math.sqrt(2.0) * packet.dx
    spec = packet.with_(x0=x_A + 8 * width + 10.0)
    k_lo = min(lo for lo, _ in spec.k_intervals())
    if k_lo <= 0:
        raise DomainError("packet has k <= 0 components within the truncation radius")
    # The slowest component has cleared the arrival point by this time.
    t_final = m * (spec.x0 + 8 * width + 10.0) / k_lo
    grid = GridConfig.for_packet(
        spec, t_final, n_p=1, points_per_wavelength=points_per_wavelength, dt=dt, p_max=p_y, x_right=20.0
    ).with_p([p_y])
    kind = "step_clock" if sharp else "gradual"
    state = evolve_channels(kind, spec, grid, t_final, {"x_A": x_A})
    r, t = flux_fractions(state, boundary=-x_A)
    return ReflectionResult(float(r[0]), float(t[0]), state.ledger_error, x_A)
