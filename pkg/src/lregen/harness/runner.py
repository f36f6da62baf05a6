"""Scenario execution: simulate, write the CSV trace, summarize."""
from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .. import drem, metrics, regen
from ..estimator import error_oracle
from ..signals import NoiseSource, get_signal, noise_amplitude_for_snr
from .config import FORCINGS, ScenarioConfig

TRACE_COLUMNS = (
    "t", "Delta", "y", "y_noisy", "Phi11", "Phi12", "Phi21", "Phi22", "xi1", "xi2", "z",
    "Y1", "Y2", "theta_hat_old", "theta_hat_new", "tildeV", "rho", "r", "frobenius",
    "int_abs_alpha_delta", "int_tildeV",
)
COUNTEREXAMPLE_COLUMNS = ("t", "tildeV", "alpha_delta", "z")
OUTPUT_DIR_ENV = "LREGEN_OUTPUT_DIR"
SIG_DIGITS = 9


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, "runs")


def format_csv(trace: dict, columns=TRACE_COLUMNS) -> str:
    """Header line, then one line per record, values as ``%.9g``, LF separators."""
    lines = [",".join(columns)]
    data = [np.asarray(trace[c], dtype=float) for c in columns]
    if data and data[0].size:
        row = ",".join([f"%.{SIG_DIGITS}g"] * len(columns))
        lines.extend(row % tuple(r) for r in zip(*(d.tolist() for d in data)))
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> dict:
    header, _, body = text.partition("\n")
    columns = header.split(",")
    values = np.array(body.replace("\n", ",").split(",")[:-1] if body else [], dtype=float)
    values = values.reshape(-1, len(columns))
    return {c: values[:, i].copy() for i, c in enumerate(columns)}


def emit_csv(trace: dict, path, columns=TRACE_COLUMNS) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_csv(trace, columns))


def read_csv(path) -> dict:
    with open(path) as fh:
        return parse_csv(fh.read())


# --- building the trace ----------------------------------------------------

def _noise_for(config: ScenarioConfig, y_clean) -> NoiseSource:
    if config.noise_snr_db is None:
        return NoiseSource()
    n = int(round(config.horizon / config.dt))
    y = np.asarray(y_clean(np.arange(n + 1) * config.dt), dtype=float)
    active = y[y != 0.0]
    power = float(np.mean(active ** 2)) if active.size else 0.0
    return NoiseSource(amplitude=noise_amplitude_for_snr(power, config.noise_snr_db),
                       sample_period=config.noise_period, seed=config.seed)


class _Sampled:
    """A signal known on the half-step grid, looked up by nearest index.

    ``left`` holds left limits; side -1 reads them, everything else reads
    ``values``.
    """

    sided = True

    def __init__(self, values, left, h):
        self.values = np.asarray(values, dtype=float)
        self.left = np.asarray(left, dtype=float)
        self.h = h

    def __call__(self, t, side=0):
        idx = np.rint(np.asarray(t, dtype=float) / (0.5 * self.h)).astype(np.int64)
        out = (self.left if side < 0 else self.values)[idx]
        return float(out) if np.ndim(t) == 0 else out


def synthetic_psi(t, q):
    return np.array([np.sin((1 + j // 2) * t + (j % 2) * np.pi / 2) for j in range(q)])


def drem_front_end(settings, horizon, h):
    """Run the extension + mixing stage on the half-step grid.

    Returns sampled (Delta, y_i) for the configured component, with left
    limits kept separately so steps never straddle a delay switching on.
    """
    q = len(settings.theta)
    theta = np.asarray(settings.theta, dtype=float)
    op = drem.make_operator(settings.kind, settings.params)
    n = int(round(horizon / h))
    ts = np.arange(2 * n + 1) * (0.5 * h)
    psi = synthetic_psi(ts, q)
    w = theta @ psi
    out = np.empty((4, ts.size))
    for j, t in enumerate(ts):
        ext = drem.extend(op, drem.VectorLreSample(t=float(t), w=float(w[j]), psi=psi[:, j]), 0.5 * h)
        for row, e in ((0, ext), (2, op.left_limit())):
            mixed = drem.mix(e)
            out[row, j] = mixed.Delta
            out[row + 1, j] = mixed.y[settings.component]
    return _Sampled(out[0], out[2], h), _Sampled(out[1], out[3], h)


def build_problem(config: ScenarioConfig) -> regen.CoupledProblem:
    policy = regen.ExcitationPolicy(beta=config.beta, alpha=config.alpha)
    if config.drem is not None:
        delta, y_clean = drem_front_end(config.drem, config.horizon, config.dt)
        theta = config.theta.constant(config.drem.theta[config.drem.component])
    else:
        delta = get_signal(config.delta)
        theta = config.theta
        y_clean = lambda t: delta(t) * theta(t)
    return regen.CoupledProblem(delta=delta, theta=theta, policy=policy, gamma=config.gamma,
                                noise=_noise_for(config, y_clean),
                                y_clean=y_clean if config.drem is not None else None)


def trace_from_trajectory(traj: regen.Trajectory) -> dict:
    x = traj.x
    col = {name: x[:, i] for i, name in enumerate(regen.STATE_NAMES)}
    rho, r, _ = metrics.polar_trace(col["Phi11"], col["Phi21"], traj.t[1] - traj.t[0] if traj.t.size > 1 else 1.0)
    trace = {
        "t": traj.t, "Delta": traj.Delta, "y": traj.y, "y_noisy": traj.y_noisy,
        "Y1": traj.Y1, "Y2": traj.Y2, "tildeV": traj.tildeV, "rho": rho, "r": r,
        "frobenius": np.sqrt(np.sum(x[:, :4] ** 2, axis=1)),
    }
    trace.update(col)
    return {c: np.asarray(trace[c], dtype=float) for c in TRACE_COLUMNS}


# --- summary ---------------------------------------------------------------

@dataclass
class ScenarioSummary:
    name: str
    kind: str
    numbers: dict
    excitation: dict = field(default_factory=dict)
    invariants: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    runtime_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(inv["passed"] for inv in self.invariants)

    def to_json(self) -> str:
        d = asdict(self)
        d["passed"] = self.passed
        return json.dumps(d, indent=2, sort_keys=True)


def _at(trace, t_query):
    t = trace["t"]
    return int(np.argmin(np.abs(t - t_query)))


def summarize_trace(trace: dict, config: ScenarioConfig) -> tuple:
    """Numbers and excitation reports derived from the (rounded) trace alone."""
    t = trace["t"]
    dt = config.dt
    if config.kind == "counterexample":
        z = trace["z"]
        numbers = {"z_final": float(z[-1]), "sup_abs_z": float(np.max(np.abs(z))),
                   "z_at_100": float(z[_at(trace, 100.0)]) if t[-1] >= 100.0 else float("nan")}
        return numbers, {}
    theta = config.theta if config.drem is None else config.theta.constant(config.drem.theta[config.drem.component])
    theta_end = float(theta(t[-1]))
    err_old = np.abs(trace["theta_hat_old"] - theta(t))
    err_new = np.abs(trace["theta_hat_new"] - theta(t))
    energy = float(metrics.total_energy(trace["Delta"], dt))
    numbers = {
        "theta_final": theta_end,
        "final_error_old": float(err_old[-1]),
        "final_error_new": float(err_new[-1]),
        "oracle_error_old": float(error_oracle(abs(trace["theta_hat_old"][0] - theta(0.0)), config.gamma, energy)),
        "tildeV_final": float(trace["tildeV"][-1]),
        "int_abs_alpha_delta_final": float(trace["int_abs_alpha_delta"][-1]),
        "max_frobenius": float(np.max(trace["frobenius"])),
        "max_abs_z": float(np.max(np.abs(trace["z"]))),
    }
    T = min(10.0, float(t[-1]))
    excitation = {
        "Delta": metrics.excitation_report(trace["Delta"], dt, T=T).as_dict(),
        "Phi21": metrics.excitation_report(trace["Phi21"], dt, T=T).as_dict(),
    }
    if not theta.is_constant:
        # alertness: errors a fixed time after the last jump
        jump = theta.pieces[-1][0]
        probe = min(jump + 10.0, float(t[-1]))
        i = _at(trace, probe)
        numbers["probe_time"] = float(t[i])
        numbers["probe_error_old"] = float(err_old[i])
        numbers["probe_error_new"] = float(err_new[i])
    tail = t >= t[-1] - 5.0
    numbers["mean_error_new_last5s"] = float(np.mean(err_new[tail]))
    return numbers, excitation


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    trace: dict
    summary: ScenarioSummary
    csv_path: Optional[str] = None
    trajectory: Optional[regen.Trajectory] = None


def _run_counterexample(config: ScenarioConfig):
    forcing = FORCINGS[config.forcing]
    decay = lambda t: np.exp(-np.asarray(t, dtype=float))
    t, z = metrics.counterexample_z(decay, forcing, float(config.theta(0.0)), config.horizon, config.dt)
    trace = {"t": t, "tildeV": decay(t), "alpha_delta": forcing(t), "z": z}
    return trace, []


def run_scenario(config: ScenarioConfig, write_csv: bool = True, fast: bool = True) -> ScenarioResult:
    """Simulate ``config``, optionally write its CSV, and summarize.

    Summary numbers come from the trace after 9-digit rounding, so they can
    be recomputed from the CSV. Invariant verdicts use full precision.
    """
    start = time.perf_counter()
    traj = None
    extras = {}
    if config.kind == "counterexample":
        raw, invariants = _run_counterexample(config)
        columns = COUNTEREXAMPLE_COLUMNS
    else:
        problem = build_problem(config)
        traj = regen.simulate(problem, config.horizon, config.dt, fast=fast)
        noise_free = not problem.noise.active
        theta_max = problem.theta.max_abs if noise_free else None
        invariants = [asdict(r) for r in regen.check_invariants(traj, theta_max=theta_max)]
        raw = trace_from_trajectory(traj)
        columns = TRACE_COLUMNS
        alpha_delta = problem.policy.alpha.alpha0(traj.t) - problem.policy.alpha.gain * traj.y_noisy * traj["z"]
        alpha_delta = alpha_delta * traj.Delta
        cor = metrics.corollary1_check(traj.tildeV, alpha_delta)
        extras["corollary1"] = {"verdict": cor.verdict, "alpha_delta_tail": cor.alpha_delta_tail,
                                "tildeV_final": cor.tildeV_final}
        _, _, resid = metrics.polar_trace(traj["Phi11"], traj["Phi21"], config.dt, alpha_delta, config.beta)
        extras["polar_mean_abs_residual"] = float(np.mean(np.abs(resid)))
        extras["terminal_radius_gap"] = float(raw["r"][-1] ** 2 - 2 * config.beta)
        if not noise_free:
            clean = regen.simulate(regen.CoupledProblem(delta=problem.delta, theta=problem.theta,
                                                        policy=problem.policy, gamma=problem.gamma,
                                                        y_clean=problem.y_clean),
                                   config.horizon, config.dt, fast=fast)
            extras["noise_amplitude"] = problem.noise.amplitude
            extras["max_abs_Y2_noise_deviation"] = float(np.max(np.abs(traj.Y2 - clean.Y2)))
    text = format_csv(raw, columns)
    trace = parse_csv(text)
    numbers, excitation = summarize_trace(trace, config)
    csv_path = None
    if write_csv:
        csv_path = config.out or os.path.join(default_output_dir(), f"{config.name}.csv")
        os.makedirs(os.path.dirname(os.path.abspath(csv_path)), exist_ok=True)
        with open(csv_path, "w", newline="\n") as fh:
            fh.write(text)
    summary = ScenarioSummary(name=config.name, kind=config.kind, numbers=numbers,
                              excitation=excitation, invariants=invariants, extras=extras,
                              runtime_s=time.perf_counter() - start)
    return ScenarioResult(config=config, trace=trace, summary=summary, csv_path=csv_path, trajectory=traj)
