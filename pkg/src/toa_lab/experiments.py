"""Named experiments: parameter schema, regime checks and runners.

Each experiment takes a flat ``key -> value`` dict (defaults filled in),
returns tabular data with a fixed column order plus a list of built-in
checks.  The acceptance criteria are the built-in checks run at the
default parameters.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import booster, clock_model, gradual_clock, spin_trigger, tdse_oracle, toa_operator
from .common import BimodalPacketSpec, PacketSpec, classical_toa, gauss_legendre_panels


class ConfigError(ValueError):
    """Invalid experiment configuration; ``problems`` maps key -> message."""

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        super().__init__("; ".join(f"{k}: {v}" for k, v in self.problems.items()))


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    target: str
    passed: bool

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.value:.6g} (target {self.target})"


@dataclass
class Outcome:
    columns: list[str]
    rows: list[tuple]
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    defaults: dict
    runner: Callable[[dict], Outcome]
    regime: Callable[[dict], tuple[dict, list[str]]] | None = None


def floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _coerce(key: str, value, default):
    if isinstance(default, bool):
        if isinstance(value, str):
            if value.lower() in ("1", "true", "yes"):
                return True
            if value.lower() in ("0", "false", "no"):
                return False
            raise ValueError("expected a boolean")
        return bool(value)
    if isinstance(default, int):
        f = float(value)
        if f != int(f):
            raise ValueError("expected an integer")
        return int(f)
    if isinstance(default, float):
        return float(value)
    if isinstance(default, str) and "," in default:
        vals = floats(value)
        if not vals:
            raise ValueError("expected a comma-separated list of numbers")
        return ",".join(repr(v) for v in vals)
    return str(value)


def resolve(exp: Experiment, given: dict) -> dict:
    """Defaults overlaid with ``given``; unknown keys and bad values raise :class:`ConfigError`."""
    problems = {k: "unknown key" for k in given if k not in exp.defaults}
    out = dict(exp.defaults)
    for k, v in given.items():
        if k in problems:
            continue
        try:
            out[k] = _coerce(k, v, exp.defaults[k])
        except (TypeError, ValueError) as err:
            problems[k] = f"bad value {v!r} ({err})"
    if problems:
        raise ConfigError(problems)
    return out


def validate(exp: Experiment, params: dict) -> list[str]:
    """Schema plus physical-regime checks; returns warnings, raises on errors."""
    problems: dict[str, str] = {}
    for key in ("m", "dx", "dy", "x0", "k0", "k1", "k2", "E", "x_A"):
        if key in params and not params[key] > 0:
            problems[key] = "must be positive"
    for key, value in params.items():
        if key.startswith("dy") and isinstance(value, str) and "," in exp.defaults.get(key, ""):
            if any(v <= 0 for v in floats(value)):
                problems[key] = "all values must be positive"
    warnings: list[str] = []
    if exp.regime is not None and not problems:
        extra, more = exp.regime(params)
        problems.update(extra)
        warnings += more
    if "x0" in params and "dx" in params and not problems and params["x0"] < 3 * params["dx"]:
        warnings.append(f"x0={params['x0']} < 3 dx: packet not localized on the left")
    if problems:
        raise ConfigError(problems)
    return warnings


def _packet(p: dict) -> PacketSpec:
    return PacketSpec(p["m"], p["k0"], p["dx"], p["x0"], p["p0"], p["dy"])


def _clock_regime(p: dict):
    problems, warnings = {}, []
    if p["p0"] * p["dy"] < 1:
        problems["p0"] = f"p0 dy = {p['p0'] * p['dy']:.3g} < 1: clock momentum band reaches far below 0"
    if p["k0"] <= 0:
        problems["k0"] = "packet must move towards the clock"
    return problems, warnings


def _check(name, value, ok, target) -> Check:
    return Check(name, float(value), target, bool(ok))


# ------------------------------------------------------------------ runners


def run_flux_suite(p: dict) -> Outcome:
    n = p["points_per_axis"]
    rows, checks = [], []
    total = 0
    ks = np.geomspace(1e-2, 1e2, n)
    ps = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, n - 1)])
    ms = floats(p["masses"])
    errs = [clock_model.channel(k, pp, m).flux_error for k in ks for pp in ps for m in ms]
    rows.append(("clock", len(errs), max(errs)))
    alphas = np.concatenate([[0.0], np.geomspace(1e-2, 1e4, n // 2 - 1)])
    Es = np.geomspace(1e-2, 1e2, n // 2)
    terr = [
        spin_trigger.trigger_clock_channel(a, e, pp, m).flux_error
        for a in alphas
        for e in Es
        for pp in ps[:: max(1, n // 10)]
        for m in ms
    ]
    rows.append(("trigger", len(terr), max(terr)))
    rng = np.random.default_rng(p["seed"])
    berr = []
    for _ in range(p["booster_designs"]):
        k = rng.uniform(0.3, 3)
        b = booster.tune(rng.uniform(0.5, 2), k, k * rng.uniform(1.1, 5), rng.uniform(0.2, 5))
        lo, hi = b.window()
        for kin in np.linspace(lo, hi, 52)[1:-1]:
            berr.append(booster.booster_channel(b, float(kin)).flux_error)
    rows.append(("booster", len(berr), max(berr)))
    for name, count, worst in rows:
        total += count
        checks.append(_check(f"{name} flux identity", worst, worst < 1e-10, "< 1e-10"))
    checks.append(_check("points evaluated", total, total >= 8000, ">= 8000"))
    return Outcome(["channel_type", "points", "max_flux_error"], rows, checks)


def run_detection_sweep(p: dict) -> Outcome:
    E = p["k0"] ** 2 / (2 * p["m"])
    e_dy = np.geomspace(p["e_dy_min"], p["e_dy_max"], p["points"])
    rows = []
    for ed in e_dy:
        dy = ed / E
        spec = PacketSpec(p["m"], p["k0"], p["dx"], p["x0"], p["p0_dy"] / dy, dy)
        w = clock_model.detection_weight(spec)
        rows.append((float(ed), dy, spec.p0, w, float(clock_model.detection_probability(E, spec.p0, p["m"]))))
    fit = np.geomspace(p["fit_lo"], p["fit_hi"], 6)
    wf = []
    for ed in fit:
        dy = ed / E
        wf.append(clock_model.detection_weight(PacketSpec(p["m"], p["k0"], p["dx"], p["x0"], p["p0_dy"] / dy, dy)))
    slope = float(np.polyfit(np.log(fit), np.log(wf), 1)[0])
    high = [r[3] for r in rows if r[0] >= 10]
    checks = [
        _check(f"log-log slope over E dy in [{p['fit_lo']:g}, {p['fit_hi']:g}]", slope, abs(slope - 0.5) <= 0.05, "0.5 +- 0.05"),
        _check("min detection weight for E dy >= 10", min(high) if high else float("nan"), bool(high) and min(high) > 0.8, "> 0.8"),
    ]
    return Outcome(["E_dy", "dy", "p0", "detection_weight", "point_probability"], rows, checks, [f"fitted slope {slope:.4f}"])


def run_clock_readout(p: dict) -> Outcome:
    spec = _packet(p)
    h = clock_model.readout_distribution(spec, bins=p["bins"], n_q=p["n_q"])
    model = clock_model.appendix_density(spec, h.centers)
    model = model / model.sum()
    tv = 0.5 * float(np.abs(h.normalized() * h.width - model).sum())
    tc = classical_toa(spec)
    peak = h.peak()
    rows = list(zip(h.centers.tolist(), h.density.tolist(), (model / h.width).tolist()))
    checks = [
        _check("total variation vs inaccurate-limit Gaussian", tv, tv < 0.05, "< 0.05"),
        _check("peak offset from m x0/k0 (relative)", abs(peak - tc) / tc, abs(peak - tc) / tc < 0.02, "< 0.02"),
    ]
    return Outcome(["y_center", "density", "model_density"], rows, checks, [f"peak {peak:.5f}, t_c {tc:.5f}, weight {h.detection_weight:.6f}"])


def run_accurate_limit(p: dict) -> Outcome:
    rows = []
    for dy in floats(p["dy_values"]):
        spec = PacketSpec(p["m"], p["k0"], p["dx"], p["x0"], p["p0_dy"] / dy, dy)
        h = clock_model.readout_distribution(spec)
        mean, sd = h.moments()
        rows.append((dy, spec.p0, h.detection_weight, sd, mean))
    w = [r[2] for r in rows]
    widths = [r[3] for r in rows]
    # Detection ~ sqrt(E/p0): quadrupling p0 halves it.
    ratio = w[0] / w[-1]
    spread = max(widths) / min(widths) - 1
    checks = [
        _check("weight ratio over a 4x p0 change", ratio, abs(ratio / 2 - 1) <= 0.05, "2 +- 5%"),
        _check("relative spread of histogram widths", spread, spread <= 0.05, "<= 5%"),
    ]
    return Outcome(["dy", "p0", "detection_weight", "width", "mean"], rows, checks)


def run_two_peak(p: dict) -> Outcome:
    spec = BimodalPacketSpec(p["m"], p["k1"], p["k2"], p["dx"], p["x0"], 0.0, 1.0, p["w1"], 1 - p["w1"])
    res = clock_model.two_peak_experiment(spec, [p["dy_far"], p["dy_window"]], p0_ratio=p["p0_dy"])
    cols = ["dy", "p0", "mass1", "mass2", "ratio", "predicted", "weight_ratio"]
    rows = [tuple(r[c] for c in cols) for r in res]
    far, near = res
    checks = [
        _check("window ratio vs predicted (relative)", abs(near["ratio"] / near["predicted"] - 1), abs(near["ratio"] / near["predicted"] - 1) <= 0.1, "<= 10%"),
        _check("equal-contribution ratio vs w1/w2 (relative)", abs(far["ratio"] / far["weight_ratio"] - 1), abs(far["ratio"] / far["weight_ratio"] - 1) <= 0.1, "<= 10%"),
    ]
    return Outcome(cols, rows, checks)


def _two_peak_regime(p: dict):
    problems, warnings = {}, []
    lo, hi = 2 * p["m"] / p["k2"] ** 2, 2 * p["m"] / p["k1"] ** 2
    if not lo < p["dy_window"] < hi:
        problems["dy_window"] = f"must lie in the suppression window ({lo:g}, {hi:g})"
    if p["dy_far"] < 10 * hi:
        warnings.append(f"dy_far={p['dy_far']} is not >> 2m/k1^2 = {hi:g}")
    if not 0 < p["w1"] < 1:
        problems["w1"] = "must lie in (0, 1)"
    if not p["k2"] > p["k1"]:
        problems["k2"] = "need k2 > k1"
    return problems, warnings


def run_trigger_sweep(p: dict) -> Outcome:
    rows = spin_trigger.sweep(floats(p["alphas"]), floats(p["energies"]), floats(p["momenta"]), p["m"])
    worst = 0.0
    for e in floats(p["energies"]):
        for pp in floats(p["momenta"]):
            c = spin_trigger.trigger_clock_channel(None, e, pp, p["m"])
            target = float(spin_trigger.limit_amplitude(e, pp))
            worst = max(worst, abs(abs(c.R_down) - target), abs(abs(c.L_down) - target))
    E = p["tail_E"]
    tail = [
        spin_trigger.trigger_detection_probability(E, pp, p["m"]) / spin_trigger.trigger_detection_probability(E, 4 * pp, p["m"])
        for pp in floats(p["tail_p"])
    ]
    checks = [
        _check("alpha -> infinity amplitude error", worst, worst < 1e-4, "< 1e-4"),
        _check("tail halving ratio (worst relative miss)", max(abs(t / 2 - 1) for t in tail), all(abs(t / 2 - 1) <= 0.05 for t in tail), "2 +- 5%"),
    ]
    cols = ["alpha", "E_k", "p", "det_prob", "flux_error"]
    return Outcome(cols, [tuple(r) for r in rows], checks)


def run_multi_trigger(p: dict) -> Outcome:
    rows, ok = [], True
    for N in range(1, p["n_max"] + 1):
        r = spin_trigger.multi_trigger(N)
        exact = 1 - 1 / 2**N
        ok &= r.flip_probability == 1 - Fraction(1, 2**N)
        rows.append((N, str(r.flip_probability), float(r.flip_probability), exact))
    checks = [_check("exact 1 - 2^-N for every N", float(ok), ok, "exact")]
    return Outcome(["N", "probability_exact", "probability", "one_minus_two_pow_minus_N"], rows, checks)


def run_booster_curve(p: dict) -> Outcome:
    b = booster.tune(p["m"], p["k"], p["k_prime"], p["lam"])
    lo, hi = b.window()
    ks = np.linspace(lo, hi, p["points"] + 2)[1:-1]
    curve = booster.transmission_curve(b, ks)
    rng = np.random.default_rng(p["seed"])
    worst_t, worst_r = 0.0, 0.0
    for _ in range(p["random_sets"]):
        k = rng.uniform(0.2, 5)
        bb = booster.tune(rng.uniform(0.5, 2), k, k * rng.uniform(1.05, 10), rng.uniform(0.1, 10))
        c = booster.booster_channel(bb, bb.k)
        worst_t = max(worst_t, abs(c.J_Rdown - 1))
        worst_r = max(worst_r, abs(c.J_Lup))
    slope = booster.transmission_slope(b, p["slope_delta"])
    predicted = 2 / b.k
    dk = p["narrow_fraction"] * b.k
    narrow = booster.packet_distortion(b, booster.gaussian_envelope(b.k, dk), (b.k - 6 * dk, b.k + 6 * dk))
    checks = [
        _check(f"tuned |J_Rdown - 1| over {p['random_sets']} designs", worst_t, worst_t < 1e-10, "< 1e-10"),
        _check(f"tuned |J_Lup| over {p['random_sets']} designs", worst_r, worst_r < 1e-10, "< 1e-10"),
        _check("|dJ/dk| relative to 2/k", abs(slope) / predicted, abs(abs(slope) / predicted - 1) <= 0.1, "1 +- 10%"),
        _check("narrow-packet distortion", narrow.metric, narrow.metric < 0.02, "< 0.02"),
    ]
    notes = [f"design alpha {b.alpha:.6g}, measured slope {slope:.3e}, first-order prediction {predicted:.6g}"]
    return Outcome(["k_in", "J_Rdown", "J_Lup", "flux_error"], [tuple(r) for r in curve], checks, notes)


def _booster_regime(p: dict):
    problems = {}
    if not p["k_prime"] > p["k"] > 0:
        problems["k_prime"] = "boost needs k' > k > 0"
    if not p["lam"] > 0:
        problems["lam"] = "must be positive"
    return problems, []


def run_gradual_tradeoff(p: dict) -> Outcome:
    m = p["m"]
    tradeoff = gradual_clock.accuracy_tradeoff_curve([p["E"]], [x / p["E"] for x in floats(p["E_dt_values"])], m=m, x_A=p["x_A"])
    rows = [tuple(r[c] for c in gradual_clock.COLUMNS) for r in tradeoff]
    rng = np.random.default_rng(p["seed"])
    worst = 0.0
    for _ in range(p["configs"]):
        cfg = gradual_clock.GradualConfig(
            rng.uniform(0.5, 2), rng.uniform(0.5, 5), 10 ** rng.uniform(-2, 4), rng.uniform(0.5, 2), -rng.uniform(20, 200)
        )
        worst = max(worst, gradual_clock.integrate_trajectory(cfg).relative_residual)
    # Travel time approaches the free value as p_y/E -> 0.
    x_i = -p["distance_ratio"] * p["x_A"]
    free = (abs(x_i) - p["x_A"]) / math.sqrt(2 * m * p["E"])
    excess = 0.0
    for r in np.geomspace(1e-3, 1e-1, 9):
        cfg = gradual_clock.GradualConfig(m, p["E"], r * p["E"], p["x_A"], x_i)
        dev = abs(gradual_clock.travel_time(cfg) / m - free) / free
        excess = max(excess, dev / (2 * r))
    _, ratios = gradual_clock.c_scaling_fit(np.logspace(2, 6, 9))
    c_miss = float(np.max(np.abs(ratios - 1)))
    checks = [
        _check(f"decomposition residual over {p['configs']} configs", worst, worst < 1e-6, "< 1e-6 relative"),
        _check("travel-time deviation / (2 p_y/E)", excess, excess <= 1, "<= 1"),
        _check("C-term scaling fit worst miss", c_miss, c_miss <= 0.1, "<= 10%"),
    ]
    if p["wkb_probe"]:
        r = tdse_oracle.reflection_probe(p["probe_p_y"], p["probe_epsilon"])
        checks.append(_check(f"WKB reflected flux (eps={p['probe_epsilon']:g})", r.reflected, r.reflected < 1e-4, "< 1e-4"))
    return Outcome(list(gradual_clock.COLUMNS), rows, checks)


def run_toa_overlap(p: dict) -> Outcome:
    rows, worst = [], 0.0
    for d in floats(p["separations"]):
        r = toa_operator.overlap(p["T_ref"] + d, p["T_ref"], m=p["m"])
        pred = -1 / (math.pi * d)
        err = abs(r.value.imag / pred - 1)
        worst = max(worst, err)
        rows.append((d, r.value.real, r.value.imag, pred, err))
    checks = [_check("imaginary part vs -1/(pi dT), worst relative error", worst, worst <= 0.02, "<= 2%")]
    return Outcome(["dT", "real", "imag", "predicted_imag", "rel_error"], rows, checks)


def run_toa_tail(p: dict) -> Outcome:
    fit = toa_operator.position_tail(p["T"], p["m"], (p["x_min"], p["x_max"]), p["points"], p["cutoff"])
    rows = list(zip(fit.x.tolist(), fit.amplitude.tolist()))
    checks = [_check("log-log tail exponent", fit.slope, abs(fit.slope + 1.5) <= 0.05, "-1.5 +- 0.05")]
    return Outcome(["x", "abs_psi_squared"], rows, checks, [f"R^2 {fit.r_squared:.8f}"])


def run_toa_commutator(p: dict) -> Outcome:
    k0, dx = p["k0"], p["dx"]

    def psi(k):
        return np.exp(-(dx**2) * (k - k0) ** 2)

    rows, results = [], []
    for eps in floats(p["epsilons"]):
        r = toa_operator.projector_commutator(psi, eps, m=p["m"])
        results.append(r)
        rows.append((eps, r.lhs.real, r.lhs.imag, r.rhs.imag, r.relative_gap))
    change = abs(results[-1].lhs - results[-2].lhs) / abs(results[-1].lhs)
    gap = results[-1].relative_gap
    base = toa_operator.conjugacy_residual(psi, m=p["m"])
    touching = toa_operator.conjugacy_residual(lambda k: np.exp(-(dx**2) * (k - p["touching_k0"]) ** 2), m=p["m"])
    checks = [
        _check("lhs/rhs relative gap at smallest eps", gap, gap <= 0.05, "<= 5%"),
        _check("lhs change between the two smallest eps", change, change <= 0.05, "<= 5% (converging)"),
        _check("conjugacy residual, state away from k=0", base.best[0], base.best[0] < 1e-3, "< 1e-3"),
        _check("conjugacy residual ratio, state touching k=0", touching.best[0] / base.best[0], touching.best[0] >= 10 * base.best[0], ">= 10"),
    ]
    notes = [f"best sign {base.best[1]}"]
    return Outcome(["epsilon", "lhs_real", "lhs_imag", "rhs_imag", "relative_gap"], rows, checks, notes)


def run_eigenstate_trigger(p: dict) -> Outcome:
    dys = np.geomspace(p["dy_max"], p["dy_min"], p["points"])
    E_band = p["k_max"] ** 2 / (2 * p["m"])
    rows = []
    for dy in dys:
        st = toa_operator.truncated_eigenstate(p["T"], p["m"], p["k_min"], p["k_max"], p0=p["p0_dy"] / dy, dy=dy)
        rows.append((float(dy), E_band * dy, clock_model.detection_weight(st)))
    w = [r[2] for r in rows]
    mono = all(a > b for a, b in zip(w, w[1:]))
    checks = [
        _check("detection weight strictly decreasing as dy shrinks", float(mono), mono, "monotone"),
        _check("detection weight at smallest dy", w[-1], w[-1] < 0.1, "< 0.1"),
        _check("E_band dy at smallest dy", rows[-1][1], rows[-1][1] < 0.1, "< 0.1"),
    ]
    return Outcome(["dy", "E_band_dy", "detection_weight"], rows, checks)


def run_oracle_crosscheck(p: dict) -> Outcome:
    spec = _packet(p)
    grid = tdse_oracle.GridConfig.for_packet(
        spec, p["t_final"], n_p=p["n_p"], points_per_wavelength=p["points_per_wavelength"], dt=p["dt"]
    )
    state = tdse_oracle.evolve_channels("step_clock", spec, grid, p["t_final"])
    ours = tdse_oracle.reconstruct_readout(state, spec, bins=p["bins"])
    ref = clock_model.readout_distribution(spec, bins=p["bins"])
    l2 = tdse_oracle.l2_distance(ours, ref)
    rows = list(zip(ref.centers.tolist(), ours.density.tolist(), ref.density.tolist()))
    # Single channel: near-monochromatic packet against the closed-form amplitudes.
    mono = PacketSpec(p["m"], p["flux_k0"], p["flux_dx"], p["flux_x0"], 0.0, 1.0)
    g1 = tdse_oracle.GridConfig.for_packet(mono, p["flux_t"], n_p=1, p_max=p["flux_p"], dt=1e-2)
    st1 = tdse_oracle.evolve_channel(p["flux_p"], "step_clock", {}, mono, g1, p["flux_t"])
    r, t = tdse_oracle.flux_fractions(st1)
    k, w = gauss_legendre_panels(mono.k_intervals(), 200)
    wg = w * np.abs(mono.g(k)) ** 2
    R = float(wg @ np.array([abs(clock_model.channel(kk, p["flux_p"], p["m"]).A_R) ** 2 for kk in k]) / wg.sum())
    checks = [
        _check("relative L2 distance of readout densities", l2, l2 < 1e-3, "< 1e-3"),
        _check("single-channel reflected flux error", abs(r[0] - R), abs(r[0] - R) < 1e-3, "< 1e-3"),
        _check("single-channel transmitted flux error", abs(t[0] - (1 - R)), abs(t[0] - (1 - R)) < 1e-3, "< 1e-3"),
        _check("norm ledger error", max(state.ledger_error, st1.ledger_error), max(state.ledger_error, st1.ledger_error) < 1e-8, "< 1e-8"),
    ]
    notes = [f"grid n_x {grid.n_x}, h {grid.h:.4g}, dt {grid.dt:g}, channels {len(grid.p_nodes)}"]
    return Outcome(["y_center", "tdse_density", "quadrature_density"], rows, checks, notes)


CLOCK = {"m": 1.0, "k0": 5.0, "dx": 2.0, "x0": 30.0, "p0": 0.4, "dy": 5.0}

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment(
            "flux-suite",
            "Flux identities of the clock, trigger and booster channels over dense grids",
            {"points_per_axis": 40, "masses": "0.5,1.0,2.0", "booster_designs": 40, "seed": 0},
            run_flux_suite,
        ),
        Experiment(
            "detection-sweep",
            "Detection weight against E_k dy with p0 dy fixed",
            {"m": 1.0, "k0": 2.0, "dx": 1.0, "x0": 10.0, "p0_dy": 2.0, "e_dy_min": 1e-4, "e_dy_max": 1e3,
             "points": 29, "fit_lo": 1e-4, "fit_hi": 1e-3},
            run_detection_sweep,
        ),
        Experiment(
            "clock-readout",
            "Clock readout histogram against the inaccurate-limit Gaussian",
            {**CLOCK, "bins": 400, "n_q": 128},
            run_clock_readout,
            _clock_regime,
        ),
        Experiment(
            "accurate-limit",
            "Detection weight and histogram width for a fine clock",
            {"m": 1.0, "k0": 2.0, "dx": 1.0, "x0": 10.0, "p0_dy": 2.0, "dy_values": "1e-3,5e-4,2.5e-4"},
            run_accurate_limit,
        ),
        Experiment(
            "two-peak",
            "Peak weights of a two-momentum packet inside and far outside the suppression window",
            {"m": 1.0, "k1": 1.0, "k2": 4.0, "dx": 10.0, "x0": 400.0, "w1": 0.5, "p0_dy": 2.0,
             "dy_window": 0.15, "dy_far": 50.0},
            run_two_peak,
            _two_peak_regime,
        ),
        Experiment(
            "trigger-sweep",
            "Spin-trigger clock amplitudes and detection probability",
            {"m": 1.0, "alphas": "0.1,1.0,10.0,100.0", "energies": "0.5,1.0,2.0,4.0", "momenta": "0.0,1.0,3.0,10.0",
             "tail_E": 1.0, "tail_p": "1e4,1e5"},
            run_trigger_sweep,
        ),
        Experiment(
            "multi-trigger",
            "Flip probability of N independent triggers",
            {"n_max": 10},
            run_multi_trigger,
        ),
        Experiment(
            "booster-curve",
            "Booster transmission around the tuned wavenumber",
            {"m": 1.0, "k": 1.0, "k_prime": 2.0, "lam": 3.0, "points": 200, "random_sets": 20, "seed": 0,
             "slope_delta": 1e-3, "narrow_fraction": 0.01},
            run_booster_curve,
            _booster_regime,
        ),
        Experiment(
            "gradual-tradeoff",
            "Gradual clock: accuracy against interference, decomposition and WKB reflection",
            {"m": 1.0, "E": 2.0, "x_A": 1.0, "distance_ratio": 10.0, "E_dt_values": "1e4,1e2,1.0,0.1,1e-2",
             "configs": 20, "seed": 0, "wkb_probe": True, "probe_p_y": 2.0, "probe_epsilon": 0.05},
            run_gradual_tradeoff,
        ),
        Experiment(
            "toa-overlap",
            "Overlap of arrival-time eigenstates",
            {"m": 1.0, "T_ref": 3.0, "separations": "0.5,1.0,2.0"},
            run_toa_overlap,
        ),
        Experiment(
            "toa-tail",
            "Position-space tail of an arrival-time eigenstate at its arrival instant",
            {"m": 1.0, "T": 0.0, "x_min": 10.0, "x_max": 1000.0, "points": 25, "cutoff": 10.0},
            run_toa_tail,
        ),
        Experiment(
            "toa-commutator",
            "Commutator with the arrival-point projector and conjugacy to the Hamiltonian",
            {"m": 1.0, "k0": 5.0, "dx": 1.0, "epsilons": "0.2,0.1,0.05", "touching_k0": 1.0},
            run_toa_commutator,
        ),
        Experiment(
            "eigenstate-trigger",
            "Detection weight of a band-limited arrival-time eigenstate as the clock sharpens",
            {"m": 1.0, "T": 0.0, "k_min": 1.0, "k_max": 4.0, "p0_dy": 2.0, "dy_max": 1e-3, "dy_min": 1e-4, "points": 4},
            run_eigenstate_trigger,
        ),
        Experiment(
            "oracle-crosscheck",
            "Wave-equation oracle against the quadrature readout and closed-form fluxes",
            {**CLOCK, "bins": 400, "n_p": 64, "points_per_wavelength": 24.0, "dt": 5e-3, "t_final": 12.0,
             "flux_k0": 5.0, "flux_dx": 10.0, "flux_x0": 80.0, "flux_p": 12.5, "flux_t": 30.0},
            run_oracle_crosscheck,
            _clock_regime,
        ),
    ]
}

# Acceptance criterion -> experiments whose built-in checks decide it.
CRITERIA: dict[int, tuple[str, ...]] = {
    1: ("flux-suite",),
    2: ("detection-sweep",),
    3: ("clock-readout",),
    4: ("accurate-limit",),
    5: ("oracle-crosscheck",),
    6: ("two-peak",),
    7: ("multi-trigger", "trigger-sweep"),
    8: ("booster-curve",),
    9: ("gradual-tradeoff",),
    10: ("toa-overlap", "toa-tail", "toa-commutator"),
    11: ("eigenstate-trigger",),
}

# Runtime limits in seconds.
RUNTIME_LIMITS = {1: 10, 2: 300, 3: 120, 4: 300, 5: 600, 6: 600, 7: 60, 8: 60, 9: 600, 10: 300, 11: 600}


def run(name: str, given: dict | None = None) -> tuple[dict, Outcome]:
    exp = EXPERIMENTS[name]
    params = resolve(exp, given or {})
    validate(exp, params)
    return params, exp.runner(params)
