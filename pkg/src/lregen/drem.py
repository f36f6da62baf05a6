"""Dynamic regressor extension and mixing.

A vector LRE ``w = psi @ theta`` is passed through a bank of q stable
linear operators to get a square system ``W = Psi @ theta``; multiplying
by ``adj(Psi)`` gives q decoupled scalar LREs ``y_i = det(Psi) theta_i``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import ode

MAX_DIM = 4


@dataclass(frozen=True)
class VectorLreSample:
    t: float
    w: float
    psi: np.ndarray


@dataclass(frozen=True)
class ExtendedLre:
    W: np.ndarray
    Psi: np.ndarray


@dataclass(frozen=True)
class MixedScalarLre:
    y: np.ndarray
    Delta: float


def _det(m: np.ndarray) -> float:
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    if n == 2:
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    # Laplace expansion along the first row
    total = 0.0
    for j in range(n):
        minor = np.delete(m[1:], j, axis=1)
        total += (-1) ** j * m[0, j] * _det(minor)
    return float(total)


def determinant(m) -> float:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not 1 <= m.shape[0] <= MAX_DIM:
        raise ValueError(f"expected a square matrix of size 1..{MAX_DIM}, got shape {m.shape}")
    return _det(m)


def adjugate(m) -> np.ndarray:
    """Transpose of the cofactor matrix, by explicit cofactors (no pivoting)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not 1 <= m.shape[0] <= MAX_DIM:
        raise ValueError(f"expected a square matrix of size 1..{MAX_DIM}, got shape {m.shape}")
    n = m.shape[0]
    if n == 1:
        return np.ones((1, 1))
    cof = np.empty_like(m)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            cof[i, j] = (-1) ** (i + j) * _det(minor)
    return cof.T


def mix(ext: ExtendedLre) -> MixedScalarLre:
    Psi = np.atleast_2d(np.asarray(ext.Psi, dtype=float))
    return MixedScalarLre(y=adjugate(Psi) @ np.asarray(ext.W, dtype=float), Delta=determinant(Psi))


class ExtensionOperator:
    """Stateful q-channel operator turning (w, psi) into (W, Psi)."""

    q: int

    def extend(self, sample: VectorLreSample, h: float) -> ExtendedLre:
        raise NotImplementedError

    def left_limit(self) -> ExtendedLre:
        """Output just before the latest sample time (differs only at jumps)."""
        raise NotImplementedError


class FilterBank(ExtensionOperator):
    """Channel i is the low-pass ``p_i / (s + p_i)`` (unit DC gain).

    Between samples the input is interpolated linearly and the filter state
    advanced with one RK4 step; the same linear map acts on w and on every
    entry of psi, so ``W = Psi @ theta`` is preserved exactly.
    """

    def __init__(self, poles: Sequence[float]):
        poles = np.asarray(poles, dtype=float)
        if poles.ndim != 1 or not 1 <= poles.size <= MAX_DIM:
            raise ValueError(f"need 1..{MAX_DIM} poles")
        if np.any(poles <= 0):
            raise ValueError("filter poles must be strictly positive")
        self.poles = poles
        self.q = poles.size
        self.reset()

    def reset(self):
        self._state = np.zeros((self.q, self.q + 1))
        self._prev = None
        self._t = None

    def extend(self, sample: VectorLreSample, h: float) -> ExtendedLre:
        u = np.concatenate(([sample.w], np.asarray(sample.psi, dtype=float)))
        if u.size != self.q + 1:
            raise ValueError(f"psi must have {self.q} entries")
        if self._prev is not None:
            u0, t0, p = self._prev, self._t, self.poles[:, None]

            def rhs(t, x):
                frac = (t - t0) / h
                inp = (1.0 - frac) * u0 + frac * u
                return (-p * x.reshape(self.q, -1) + p * inp).ravel()

            system = ode.OdeSystem(self._state.size, rhs)
            self._state = ode.step(system, t0, self._state.ravel(), h).reshape(self.q, -1)
        self._prev, self._t = u, sample.t
        return self.left_limit()

    def left_limit(self) -> ExtendedLre:
        # filter outputs are continuous
        return ExtendedLre(W=self._state[:, 0].copy(), Psi=self._state[:, 1:].copy())


class DelayBank(ExtensionOperator):
    """Row i of Psi is psi(t - d_i), zero before t = d_i. Delays must be on the grid."""

    def __init__(self, delays: Sequence[float]):
        delays = np.asarray(delays, dtype=float)
        if delays.ndim != 1 or not 1 <= delays.size <= MAX_DIM:
            raise ValueError(f"need 1..{MAX_DIM} delays")
        if delays[0] != 0.0 or np.any(delays < 0):
            raise ValueError("delays must be nonnegative with the first equal to 0")
        if np.unique(delays).size != delays.size:
            raise ValueError("delays must be distinct")
        self.delays = delays
        self.q = delays.size
        self.reset()

    def reset(self):
        self._buffer = None
        self._lags = None
        self._h = None
        self._count = 0

    def _init(self, h: float):
        lags = self.delays / h
        if not np.allclose(lags, np.round(lags), atol=1e-6):
            raise ValueError(f"delays {self.delays} are not multiples of the step {h}")
        self._lags = np.round(lags).astype(int)
        self._buffer = deque(maxlen=int(self._lags.max()) + 1)
        self._h = h

    def extend(self, sample: VectorLreSample, h: float) -> ExtendedLre:
        if self._buffer is None:
            self._init(h)
        elif not np.isclose(h, self._h):
            raise ValueError("step changed between calls")
        psi = np.asarray(sample.psi, dtype=float)
        if psi.size != self.q:
            raise ValueError(f"psi must have {self.q} entries")
        self._buffer.appendleft((sample.w, psi))
        self._count += 1
        return self._output(lambda lag: lag < self._count)

    def left_limit(self) -> ExtendedLre:
        # a row whose delay elapses exactly now was still zero-padded just before
        return self._output(lambda lag: lag < self._count - 1 or (lag == 0 and self._count > 0))

    def _output(self, filled) -> ExtendedLre:
        W = np.zeros(self.q)
        Psi = np.zeros((self.q, self.q))
        for i, lag in enumerate(self._lags):
            if filled(lag):
                W[i], Psi[i] = self._buffer[lag]
        return ExtendedLre(W=W, Psi=Psi)


def make_operator(kind: str, params: Sequence[float]) -> ExtensionOperator:
    if kind == "filter":
        op = FilterBank(params)
    elif kind == "delay":
        op = DelayBank(params)
    else:
        raise ValueError(f"unknown extension kind {kind!r}; expected 'filter' or 'delay'")
    return op


def extend(op: ExtensionOperator, sample: VectorLreSample, h: float) -> ExtendedLre:
    return op.extend(sample, h)
