"""Generation of a new scalar LRE from a weakly exciting one.

From measurements ``y = Delta * theta`` the generator runs

    dPhi/dt = A(t) Phi,             Phi(0) = I
    dxi/dt  = A(t) xi + (-u1 z, 0),  xi(0) = 0
    dz/dt   = u2 y + u3 z,           z(0)  = 0

with ``A = [[0, u1], [u2 Delta, u3]]``. For constant theta the measurable
signal ``Y2 = z - xi2`` satisfies ``Y2 = Phi21 * theta`` for any bounded
u1, u2, u3. Pumping-and-damping picks ``u1 = -alpha Delta``, ``u2 = alpha``
and ``u3 = -(0.5 (Phi11^2 + Phi21^2) - beta)``, which keeps the first column
of Phi outside the disk of radius sqrt(2 beta) and makes Phi21 exciting.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels, ode
from .estimator import estimator_rhs
from .signals import (AlphaPolicy, ConstantAlpha, FeedbackAlpha, NoiseSource, ThetaProfile, at,
                      eval_alpha)

STATE_NAMES = (
    "Phi11", "Phi12", "Phi21", "Phi22", "xi1", "xi2", "z",
    "theta_hat_old", "theta_hat_new", "int_abs_alpha_delta", "int_tildeV",
)
(P11, P12, P21, P22, XI1, XI2, Z,
 TH_OLD, TH_NEW, ACC_AD, ACC_V) = range(len(STATE_NAMES))
assert STATE_NAMES.index("int_tildeV") == _kernels.ACC_V

# generator-only layout: the coupled layout without the two estimators
GEN_INDEX = (P11, P12, P21, P22, XI1, XI2, Z, ACC_AD, ACC_V)


class ConfigurationError(ValueError):
    pass


def tilde_v(phi11, phi21, beta):
    """Energy excess of the first column of Phi over the level 2*beta."""
    return 0.5 * (phi11 * phi11 + phi21 * phi21) - beta


@dataclass(frozen=True)
class ExcitationPolicy:
    """How u1, u2, u3 are chosen.

    Without ``u`` the pumping-and-damping law is used; with ``u`` (three
    callables of time) the inputs are arbitrary and beta/alpha are ignored.
    """

    beta: float = 0.4
    alpha: AlphaPolicy = ConstantAlpha(1.0)
    u: Optional[tuple] = None

    def __post_init__(self):
        if not 0.0 < self.beta < 0.5:
            raise ConfigurationError(f"beta must lie in (0, 1/2), got {self.beta}")
        if self.u is not None and len(self.u) != 3:
            raise ConfigurationError("arbitrary mode needs exactly three input signals")

    @property
    def pumping_damping(self) -> bool:
        return self.u is None


def compute_u(policy: ExcitationPolicy, t, Delta, phi11, phi21, y=0.0, z=0.0):
    if not policy.pumping_damping:
        return tuple(at(u, t) for u in policy.u)
    alpha = eval_alpha(policy.alpha, t, y, z)
    return -alpha * Delta, alpha, -tilde_v(phi11, phi21, policy.beta)


@dataclass
class GeneratorState:
    Phi: np.ndarray = field(default_factory=lambda: np.eye(2))
    xi: np.ndarray = field(default_factory=lambda: np.zeros(2))
    z: float = 0.0
    acc_alpha_delta: float = 0.0
    acc_tildeV: float = 0.0

    def vector(self) -> np.ndarray:
        return np.array([self.Phi[0, 0], self.Phi[0, 1], self.Phi[1, 0], self.Phi[1, 1],
                         self.xi[0], self.xi[1], self.z, self.acc_alpha_delta, self.acc_tildeV])

    @classmethod
    def from_vector(cls, v) -> "GeneratorState":
        v = np.asarray(v, dtype=float)
        return cls(Phi=np.array([[v[0], v[1]], [v[2], v[3]]]), xi=np.array(v[4:6]),
                   z=float(v[6]), acc_alpha_delta=float(v[7]), acc_tildeV=float(v[8]))


def _as_vector(state) -> np.ndarray:
    return state.vector() if isinstance(state, GeneratorState) else np.asarray(state, dtype=float)


def generator_rhs(state, t, y, Delta, policy: ExcitationPolicy) -> np.ndarray:
    """Time derivative of the 9-entry generator vector (see ``GeneratorState.vector``).

    Works elementwise, so trailing batch axes in ``state`` are allowed.
    """
    s = _as_vector(state)
    p11, p12, p21, p22, xi1, xi2, z = s[:7]
    u1, u2, u3 = compute_u(policy, t, Delta, p11, p21, y, z)
    g = u2 * Delta
    rates = [
        u1 * p21,
        u1 * p22,
        g * p11 + u3 * p21,
        g * p12 + u3 * p22,
        u1 * xi2 - u1 * z,
        g * xi1 + u3 * xi2,
        u2 * y + u3 * z,
        np.abs(u1) * np.ones_like(p11),
        -u3 * np.ones_like(p11),
    ]
    out = np.array(rates, dtype=float)
    if not np.all(np.isfinite(out)):
        raise ode.IntegrationError(float(t), int(np.argwhere(~np.isfinite(out))[0][0]), float("nan"))
    return out


def run_perturbed(state, t, y_noisy, Delta, policy: ExcitationPolicy) -> np.ndarray:
    """Generator derivative driven by a perturbed output ``Delta*theta + delta``.

    Phi does not see the perturbation; only z (and through it xi) does. A
    feedback alpha would let the noise into A(t), so it is rejected here.
    """
    if isinstance(policy.alpha, FeedbackAlpha) and policy.pumping_damping:
        raise ConfigurationError("feedback alpha depends on y and is not allowed with perturbed outputs")
    return generator_rhs(state, t, y_noisy, Delta, policy)


@dataclass(frozen=True)
class NewLreSample:
    t: float
    Y2: float
    Phi21: float
    Y1: float


def new_lre_output(state, y, Delta, t: float = float("nan")) -> NewLreSample:
    s = _as_vector(state)
    return NewLreSample(t=t, Y2=s[6] - s[5], Phi21=s[2], Y1=y - Delta * s[4])


# --- coupled generator + estimators ---------------------------------------

@dataclass
class CoupledProblem:
    """Everything needed to simulate the generator and both estimators.

    ``delta`` is the regressor as a function of time; ``y_clean`` defaults
    to ``delta(t) * theta(t)``. Measured output is ``y_clean + noise``.
    With ``estimators=False`` both estimates stay frozen, which avoids the
    stiffness of the new estimator when arbitrary inputs make Phi21 large.
    """

    delta: Callable
    theta: ThetaProfile = ThetaProfile.constant(-5.0)
    policy: ExcitationPolicy = ExcitationPolicy()
    gamma: float = 2.0
    noise: NoiseSource = field(default_factory=NoiseSource)
    y_clean: Optional[Callable] = None
    estimators: bool = True

    def __post_init__(self):
        if not self.gamma > 0:
            raise ConfigurationError("adaptation gain gamma must be positive")
        if self.noise.active and self.policy.pumping_damping and isinstance(self.policy.alpha, FeedbackAlpha):
            raise ConfigurationError("feedback alpha depends on y and is not allowed with noise")

    def outputs(self, t, side=None):
        """(Delta, clean y, measured y) at time(s) t, optionally one-sided."""
        D = at(self.delta, t, side)
        y = at(self.y_clean, t, side) if self.y_clean is not None else D * at(self.theta, t, side)
        return D, y, y + at(self.noise, t, side)

    def rhs(self, t, x):
        D, _, y = self.outputs(t)
        gen = generator_rhs(x[list(GEN_INDEX)], t, y, D, self.policy)
        dx = np.empty_like(x, dtype=float)
        dx[list(GEN_INDEX)] = gen
        gamma = self.gamma if self.estimators else 0.0
        dx[TH_OLD] = estimator_rhs(x[TH_OLD], gamma, D, y)
        dx[TH_NEW] = estimator_rhs(x[TH_NEW], gamma, x[P21], x[Z] - x[XI2])
        return dx

    def system(self) -> ode.OdeSystem:
        return ode.OdeSystem(len(STATE_NAMES), self.rhs)


def initial_state(theta_hat0: float = 0.0) -> np.ndarray:
    x = np.zeros(len(STATE_NAMES))
    x[P11] = x[P22] = 1.0
    x[TH_OLD] = x[TH_NEW] = theta_hat0
    return x


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    Delta: np.ndarray
    y: np.ndarray
    y_noisy: np.ndarray
    beta: float

    def __getitem__(self, name: str) -> np.ndarray:
        return self.x[:, STATE_NAMES.index(name)]

    @property
    def Y2(self):
        return self.x[:, Z] - self.x[:, XI2]

    @property
    def Y1(self):
        return self.y_noisy - self.Delta * self.x[:, XI1]

    @property
    def tildeV(self):
        return tilde_v(self.x[:, P11], self.x[:, P21], self.beta)


def simulate(problem: CoupledProblem, horizon: float, h: float = 1e-3,
             fast: bool = True, x0: Optional[np.ndarray] = None) -> Trajectory:
    """Integrate the 11-state system on ``[0, horizon]`` with RK4.

    ``fast`` runs the compiled loop on inputs sampled per step (start,
    midpoint, end, with one-sided limits at the ends); otherwise
    ``ode.integrate`` calls ``problem.rhs`` directly. Both see the same
    input values.
    """
    config = ode.IntegratorConfig(step=h)
    n = config.n_steps(0.0, horizon)
    x0 = initial_state() if x0 is None else np.asarray(x0, dtype=float)
    t = np.arange(n + 1) * h
    if fast:
        D, y = _stage_samples(lambda ts, side: problem.outputs(ts, side)[::2], n, h)
        zeros = np.zeros((n, 3))
        pol = problem.policy
        if pol.pumping_damping:
            (a0,) = _stage_samples(lambda ts, side: (pol.alpha.alpha0(ts),), n, h)
            us = (zeros, zeros, zeros)
            k = float(pol.alpha.gain)
        else:
            a0, k = zeros, 0.0
            us = _stage_samples(lambda ts, side: tuple(at(u, ts, side) for u in pol.u), n, h)
        gamma = problem.gamma if problem.estimators else 0.0
        x, fault = _kernels.coupled_rk4(x0, h, n, D, y, a0, k, pol.beta, gamma,
                                        pol.pumping_damping, *us)
        if fault >= 0:
            bad = _first_nonfinite(problem, x[-1], (fault - 1) * h, h)
            raise ode.IntegrationError((fault - 1) * h, bad, float("nan"))
    else:
        rows = []
        ode.integrate(problem.system(), x0, 0.0, n * h, config, lambda _t, xs: rows.append(xs))
        x = np.array(rows)
    D, y, y_noisy = (np.broadcast_to(np.asarray(a, dtype=float), t.shape).copy() for a in problem.outputs(t))
    return Trajectory(t=t, x=x, Delta=D, y=y, y_noisy=y_noisy, beta=problem.policy.beta)


def _stage_samples(fn, n, h):
    """Evaluate ``fn(times, side)`` at step starts, midpoints and ends.

    ``fn`` returns a tuple of arrays; each comes back with shape (n, 3).
    """
    k = np.arange(n)
    cols = [fn(k * h, +1), fn((k + 0.5) * h, 0), fn((k + 1) * h, -1)]
    return tuple(np.stack([np.broadcast_to(np.asarray(c[i], dtype=float), (n,)) for c in cols], axis=1)
                 for i in range(len(cols[0])))


def _first_nonfinite(problem, x, t, h) -> int:
    try:
        ode.step(problem.system(), t, x, h)
    except ode.IntegrationError as exc:
        return exc.component
    return -1


# --- invariant suite -------------------------------------------------------

@dataclass(frozen=True)
class InvariantResult:
    name: str
    passed: bool
    worst: float
    detail: str = ""


def check_invariants(traj: Trajectory, theta_max: Optional[float] = None,
                     pumping_damping: bool = True) -> list:
    """Run the generator invariants along a trajectory.

    ``theta_max`` enables the z bound ``|z| <= max|theta| * int|alpha Delta|``,
    which only holds for noise-free outputs. Liouville's identity is checked
    in every mode; the rest need pumping-and-damping inputs.
    """
    x = traj.x
    beta = traj.beta
    results = []
    det = x[:, P11] * x[:, P22] - x[:, P12] * x[:, P21]
    expected = np.exp(-x[:, ACC_V])
    rel = np.max(np.abs(det - expected) / expected)
    results.append(InvariantResult("liouville", bool(rel <= 1e-5), float(rel),
                                   "max |det Phi - exp(int u3)| / exp(int u3)"))
    if not pumping_damping:
        return results
    V = traj.tildeV
    results.append(InvariantResult("tildeV_nonnegative", bool(V.min() >= -1e-9), float(V.min())))
    rise = float(np.max(np.diff(V), initial=0.0))
    results.append(InvariantResult("tildeV_nonincreasing", bool(rise <= 1e-9), rise))
    r2 = x[:, P11] ** 2 + x[:, P21] ** 2
    lo, hi = float(r2.min()), float(r2.max())
    results.append(InvariantResult("radius_band", bool(lo >= 2 * beta - 1e-7 and hi <= 1 + 1e-7),
                                   max(2 * beta - lo, hi - 1.0), "r^2 in [2 beta, 1]"))
    w = 0.5 * (x[:, P12] ** 2 + x[:, P22] ** 2)
    rise = float(np.max(np.diff(w), initial=0.0))
    results.append(InvariantResult("second_column_nonincreasing", bool(rise <= 1e-9), rise))
    if theta_max is not None:
        excess = float(np.max(np.abs(x[:, Z]) - theta_max * x[:, ACC_AD]))
        results.append(InvariantResult("z_bound", bool(excess <= 1e-6), excess,
                                       "max(|z| - |theta| int|alpha Delta|)"))
    return results
