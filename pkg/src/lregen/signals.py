"""Time signals: regressors, tuning signals, parameter profiles and noise.

Every signal accepts a float or a numpy array of times and is evaluated
elementwise. Piecewise signals take a ``side`` argument: 0 gives the point
value (a breakpoint belongs to the earlier piece), -1 the left limit and +1
the right limit. Integrators use the limits at step endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

# Breakpoints are compared with this slack so grid times like 5000*0.001
# land on the intended side.
GRID_EPS = 1e-9

ArrayLike = Union[float, np.ndarray]


def side_of(t, side=None) -> int:
    return side if side is not None else getattr(t, "side", 0)


def at(fn, t, side=None):
    """Evaluate ``fn`` at ``t``, passing the side along if ``fn`` understands it."""
    if getattr(fn, "sided", False):
        return fn(t, side=side_of(t, side))
    return fn(t)


@dataclass(frozen=True)
class Signal:
    eval: Callable[..., ArrayLike]
    bound: float
    description: str = ""
    sided: bool = False

    def __call__(self, t, side=None):
        if self.sided:
            return self.eval(t, side=side_of(t, side))
        return self.eval(t)


def _scalar_or_array(t, value):
    return float(value) if np.ndim(t) == 0 else value


def delta1(t):
    """Exponentially vanishing regressor, 0.5 exp(-t)."""
    return 0.5 * np.exp(-np.asarray(t, dtype=float)) if np.ndim(t) else 0.5 * math.exp(-t)


def _on_first_piece(t, breakpoint, side):
    if side > 0:
        return t < breakpoint - GRID_EPS
    return t <= breakpoint + GRID_EPS


def delta2(t, side=0):
    """Step regressor: 0.5 on [0, 5], zero afterwards."""
    t = np.asarray(t, dtype=float)
    return _scalar_or_array(t, np.where(_on_first_piece(t, 5.0, side), 0.5, 0.0))


def delta3(t):
    """Slowly vanishing regressor 1/(2t+1); square integrable, not integrable."""
    return 1.0 / (2.0 * np.asarray(t, dtype=float) + 1.0) if np.ndim(t) else 1.0 / (2.0 * t + 1.0)


def delta4(t, side=0):
    """sin(pi t / 10) on [0, 12], zero afterwards."""
    t = np.asarray(t, dtype=float)
    return _scalar_or_array(t, np.where(_on_first_piece(t, 12.0, side), np.sin(np.pi * t / 10.0), 0.0))


DELTAS = {
    "delta1": Signal(delta1, 0.5, "0.5*exp(-t)"),
    "delta2": Signal(delta2, 0.5, "0.5 on [0,5], 0 after", sided=True),
    "delta3": Signal(delta3, 1.0, "1/(2t+1)"),
    "delta4": Signal(delta4, 1.0, "sin(pi t/10) on [0,12], 0 after", sided=True),
}


def get_signal(key: str) -> Signal:
    if key.startswith("custom:"):
        raise NotImplementedError("custom signal expressions are reserved but not supported")
    try:
        return DELTAS[key]
    except KeyError:
        raise KeyError(f"unknown signal {key!r}; expected one of {sorted(DELTAS)}") from None


def constant(c: float) -> Signal:
    return Signal(lambda t: _scalar_or_array(t, np.full(np.shape(t), float(c))), abs(c), f"{c}")


def exponential(scale: float, rate: float) -> Signal:
    """scale * exp(-rate t); bounded by |scale| for rate >= 0."""
    if rate < 0:
        raise ValueError("rate must be nonnegative for a bounded signal")
    return Signal(lambda t: scale * np.exp(-rate * np.asarray(t, dtype=float))
                  if np.ndim(t) else scale * math.exp(-rate * t),
                  abs(scale), f"{scale}*exp(-{rate}t)")


# --- tuning signal alpha ---------------------------------------------------

@dataclass(frozen=True)
class ConstantAlpha:
    value: float = 1.0

    def alpha0(self, t):
        return _scalar_or_array(t, np.full(np.shape(t), float(self.value)))

    gain = 0.0


@dataclass(frozen=True)
class ExponentialAlpha:
    scale: float = 1.0
    rate: float = 0.1

    def alpha0(self, t):
        return exponential(self.scale, self.rate)(t)

    gain = 0.0


@dataclass(frozen=True)
class FeedbackAlpha:
    """alpha(t) = alpha0(t) - k y(t) z(t); the correction adds damping to z."""

    alpha0_scale: float = 1.0
    alpha0_rate: float = 0.1
    k: float = 0.1

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("feedback gain k must be nonnegative")

    def alpha0(self, t):
        return exponential(self.alpha0_scale, self.alpha0_rate)(t)

    @property
    def gain(self) -> float:
        return self.k


AlphaPolicy = Union[ConstantAlpha, ExponentialAlpha, FeedbackAlpha]


def eval_alpha(policy: AlphaPolicy, t: float, y: float = 0.0, z: float = 0.0) -> float:
    return policy.alpha0(t) - policy.gain * y * z


def parse_alpha(text: str) -> AlphaPolicy:
    """Parse ``1``, ``const:1``, ``exp:<scale>,<rate>`` or ``feedback:<scale>,<rate>,<k>``."""
    kind, _, args = text.strip().partition(":")
    if not args:
        return ConstantAlpha(float(kind))
    values = [float(v) for v in args.split(",")]
    if kind == "const" and len(values) == 1:
        return ConstantAlpha(*values)
    if kind == "exp" and len(values) == 2:
        return ExponentialAlpha(*values)
    if kind == "feedback" and len(values) == 3:
        return FeedbackAlpha(*values)
    raise ValueError(f"cannot parse alpha policy {text!r}")


def format_alpha(policy: AlphaPolicy) -> str:
    if isinstance(policy, ConstantAlpha):
        return f"const:{policy.value!r}"
    if isinstance(policy, ExponentialAlpha):
        return f"exp:{policy.scale!r},{policy.rate!r}"
    return f"feedback:{policy.alpha0_scale!r},{policy.alpha0_rate!r},{policy.k!r}"


# --- true parameter profile ------------------------------------------------

@dataclass(frozen=True)
class ThetaProfile:
    pieces: tuple = ((0.0, -5.0),)
    sided = True

    def __post_init__(self):
        starts = [s for s, _ in self.pieces]
        if not starts or starts[0] != 0.0:
            raise ValueError("theta profile must start at t = 0")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("theta profile start times must be strictly increasing")

    @classmethod
    def constant(cls, value: float) -> "ThetaProfile":
        return cls(((0.0, float(value)),))

    @property
    def is_constant(self) -> bool:
        return len(self.pieces) == 1

    @property
    def max_abs(self) -> float:
        return max(abs(v) for _, v in self.pieces)

    def __call__(self, t, side=None):
        starts = np.array([s for s, _ in self.pieces])
        values = np.array([v for _, v in self.pieces])
        ta = np.asarray(t, dtype=float)
        if side_of(t, side) > 0:
            idx = np.searchsorted(starts, ta + GRID_EPS, side="right") - 1
        else:
            idx = np.searchsorted(starts, ta - GRID_EPS, side="left") - 1
        return _scalar_or_array(t, values[np.clip(idx, 0, None)])

    def __str__(self):
        return ",".join(f"{v!r}@{s!r}" for s, v in self.pieces)

    @classmethod
    def parse(cls, text: str) -> "ThetaProfile":
        """``-5`` or ``-5@0,-4@10`` (value@start)."""
        pieces = []
        for item in text.split(","):
            value, _, start = item.strip().partition("@")
            pieces.append((float(start) if start else 0.0, float(value)))
        return cls(tuple(pieces))


# --- measurement noise -----------------------------------------------------

def noise_amplitude_for_snr(signal_power: float, snr_db: float) -> float:
    """Amplitude ``a`` of uniform noise on [-a, a] giving the requested SNR."""
    if signal_power < 0:
        raise ValueError("signal power must be nonnegative")
    if math.isinf(snr_db):
        return 0.0
    return math.sqrt(3.0 * signal_power / 10.0 ** (snr_db / 10.0))


@dataclass
class NoiseSource:
    """Uniform sample-and-hold noise; ``amplitude = 0`` means no noise.

    Sample k holds on [k P, (k+1) P). Samples come from a Philox
    counter-based generator, so equal (seed, period, amplitude) give
    bit-identical sequences.
    """

    sided = True

    amplitude: float = 0.0
    sample_period: float = 0.01
    seed: int = 0
    _samples: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False, compare=False)

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("noise amplitude must be nonnegative")
        if not self.sample_period > 0:
            raise ValueError("sample period must be positive")

    @property
    def active(self) -> bool:
        return self.amplitude > 0

    def samples(self, n: int) -> np.ndarray:
        if n > self._samples.size:
            rng = np.random.Generator(np.random.Philox(self.seed))
            self._samples = rng.uniform(-self.amplitude, self.amplitude, max(n, 2 * self._samples.size))
        return self._samples[:n]

    def __call__(self, t, side=None):
        if not self.active:
            return _scalar_or_array(t, np.zeros(np.shape(t)))
        eps = -GRID_EPS if side_of(t, side) < 0 else GRID_EPS
        idx = np.floor(np.asarray(t, dtype=float) / self.sample_period + eps).astype(np.int64)
        idx = np.clip(idx, 0, None)
        seq = self.samples(int(np.max(idx)) + 1)
        return _scalar_or_array(t, seq[idx])
