"""Gradient estimator for a scalar LRE ``output = regressor * theta``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class GradientEstimator:
    theta_hat: float = 0.0
    gamma: float = 2.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("adaptation gain must be positive")

    def rate(self, regressor, output):
        return estimator_rhs(self.theta_hat, self.gamma, regressor, output)


def estimator_rhs(theta_hat, gamma, regressor, output):
    """d theta_hat / dt = -gamma * regressor * (regressor * theta_hat - output)."""
    return -gamma * regressor * (regressor * theta_hat - output)


def error_oracle(theta0_err, gamma, energy):
    """Closed-form error with a noise-free regressor of cumulative energy ``energy``.

    The error obeys d(err)/dt = -gamma Delta^2 err, so
    err(t) = err(0) exp(-gamma int_0^t Delta^2).
    """
    if np.any(np.asarray(energy) < 0):
        raise ValueError("energy must be nonnegative")
    if np.ndim(energy) == 0:
        return theta0_err * math.exp(-gamma * energy)
    return theta0_err * np.exp(-gamma * np.asarray(energy))
