"""Fixed-step explicit integration of non-autonomous ODEs.

States are numpy arrays whose leading axis is the state dimension; any
trailing axes are carried along untouched, which lets one call advance a
batch of independent trajectories.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Rhs = Callable[[float, np.ndarray], np.ndarray]


class IntegrationError(ArithmeticError):
    """Raised when the right-hand side produces a non-finite value."""

    def __init__(self, t: float, component: int, value: float):
        self.t = t
        self.component = component
        self.value = value
        super().__init__(
            f"non-finite derivative at t={t:.9g}: component {component} = {value!r}"
        )


class StageTime(float):
    """A stage time that remembers which side of a grid point it belongs to.

    RK4 evaluates its first stage at the left end of the step and its last
    stage at the right end. Tagging them lets piecewise inputs with
    breakpoints on the grid return the one-sided limit from inside the step
    (``side=+1``: right limit, ``side=-1``: left limit). To anything else it
    is an ordinary float.
    """

    def __new__(cls, value, side):
        obj = super().__new__(cls, value)
        obj.side = side
        return obj


class Method(enum.Enum):
    RK4 = "rk4"
    EULER = "euler"


@dataclass(frozen=True)
class OdeSystem:
    dimension: int
    rhs: Rhs

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 1e-3
    method: Method = Method.RK4

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")

    def n_steps(self, t0: float, t_end: float) -> int:
        """Number of steps covering [t0, t_end], horizon rounded to the grid."""
        if t_end < t0:
            raise ValueError("t_end must not precede t0")
        return int(round((t_end - t0) / self.step))


def _eval(system: OdeSystem, t: float, x: np.ndarray) -> np.ndarray:
    dx = np.asarray(system.rhs(t, x), dtype=float)
    if dx.shape[:1] != (system.dimension,):
        raise ValueError(
            f"rhs returned leading dimension {dx.shape[:1]}, expected {system.dimension}"
        )
    if not np.all(np.isfinite(dx)):
        bad = np.argwhere(~np.isfinite(dx))[0]
        raise IntegrationError(float(t), int(bad[0]), float(dx[tuple(bad)]))
    return dx


def step(system: OdeSystem, t: float, x: np.ndarray, h: float,
         method: Method = Method.RK4) -> np.ndarray:
    """Advance ``x`` from ``t`` to ``t + h`` with one explicit step."""
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    if x.shape[:1] != (system.dimension,):
        raise ValueError(f"state has leading dimension {x.shape[:1]}, expected {system.dimension}")
    t_start = StageTime(t, +1)
    if method is Method.EULER:
        return x + h * _eval(system, t_start, x)
    half = 0.5 * h
    k1 = _eval(system, t_start, x)
    k2 = _eval(system, t + half, x + half * k1)
    k3 = _eval(system, t + half, x + half * k2)
    k4 = _eval(system, StageTime(t + h, -1), x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(system: OdeSystem, x0: np.ndarray, t0: float, t_end: float,
              config: IntegratorConfig = IntegratorConfig(),
              observer: Optional[Callable[[float, np.ndarray], None]] = None) -> np.ndarray:
    """Integrate from ``t0`` to ``t_end`` on a uniform grid.

    The observer sees every grid point, both endpoints included. Grid times
    are computed as ``t0 + k*h`` so that breakpoints placed on the grid are
    hit without drift.
    """
    n = config.n_steps(t0, t_end)
    h = config.step
    x = np.array(x0, dtype=float)
    if observer is not None:
        observer(t0, x)
    for k in range(n):
        t = t0 + k * h
        x = step(system, t, x, h, config.method)
        if observer is not None:
            observer(t0 + (k + 1) * h, x)
    return x
