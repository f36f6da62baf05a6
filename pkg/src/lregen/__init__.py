"""New exciting regressors for scalar linear regression equations.

Weakly exciting scalar LREs ``y = Delta * theta`` (typically produced by
dynamic regressor extension and mixing) are turned into new LREs
``Y2 = Phi21 * theta`` whose regressor keeps its excitation, so a plain
gradient estimator converges where it would otherwise stall.
"""
from . import drem, estimator, metrics, ode, regen, signals

__version__ = "0.1.0"
__all__ = ["drem", "estimator", "metrics", "ode", "regen", "signals"]
