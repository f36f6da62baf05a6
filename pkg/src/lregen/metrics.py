"""Excitation diagnostics and proof-side checks on sampled trajectories.

All integrals use the trapezoidal rule on a uniform grid with spacing ``dt``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import _kernels, ode


def cumulative_energy(samples, dt: float) -> np.ndarray:
    s = np.asarray(samples, dtype=float)
    return cumulative_trapezoid(s * s, dx=dt, initial=0.0)


def total_energy(samples, dt: float) -> float:
    return float(cumulative_energy(samples, dt)[-1])


def l1_mass(samples, dt: float) -> float:
    return float(cumulative_trapezoid(np.abs(np.asarray(samples, dtype=float)), dx=dt, initial=0.0)[-1])


def window_energies(samples, T: float, dt: float) -> np.ndarray:
    """Energy of every length-T window starting on the grid and fitting in the record."""
    s = np.asarray(samples, dtype=float)
    horizon = (s.size - 1) * dt
    if not T > 0:
        raise ValueError("window length must be positive")
    m = int(round(T / dt))
    if T > horizon + 0.5 * dt or m > s.size - 1:
        raise ValueError(f"window {T} longer than horizon {horizon}")
    c = cumulative_energy(s, dt)
    return c[m:] - c[:-m] if m < c.size else c[-1:] - c[:1]


def windowed_energy(samples, T: float, dt: float) -> float:
    """Minimum over window starts of the energy in [t, t + T]."""
    return float(np.min(window_energies(samples, T, dt)))


@dataclass(frozen=True)
class ExcitationReport:
    ie_satisfied: bool
    ie_t_c: float
    ie_delta: float
    pe_window: float
    pe_window_energy: float
    total_energy: float
    l1_mass: float

    def as_dict(self):
        return asdict(self)


def excitation_report(samples, dt: float, t_c: float = 5.0, T: float = 10.0,
                      ie_threshold: float = 1e-3) -> ExcitationReport:
    """``ie_delta`` is the energy on [0, t_c]; IE holds when it reaches ``ie_threshold``."""
    s = np.asarray(samples, dtype=float)
    c = cumulative_energy(s, dt)
    k = min(int(round(t_c / dt)), s.size - 1)
    ie_delta = float(c[k])
    T_eff = min(T, (s.size - 1) * dt)
    return ExcitationReport(
        ie_satisfied=ie_delta >= ie_threshold,
        ie_t_c=t_c,
        ie_delta=ie_delta,
        pe_window=T_eff,
        pe_window_energy=windowed_energy(s, T_eff, dt),
        total_energy=float(c[-1]),
        l1_mass=l1_mass(s, dt),
    )


# --- polar coordinates of the first column of Phi -------------------------

class DegenerateOrigin(ValueError):
    pass


@dataclass(frozen=True)
class PolarDiagnostics:
    rho: float
    r: float
    rho_rate_residual: float = float("nan")


def _unwrap_to(rho, prev):
    return rho + 2 * math.pi * round((prev - rho) / (2 * math.pi))


def polar(phi11: float, phi21: float, prev_rho: float = 0.0) -> PolarDiagnostics:
    """Angle and radius of (phi11, phi21), continued onto the branch nearest ``prev_rho``."""
    r = math.hypot(phi11, phi21)
    if r < 1e-12:
        raise DegenerateOrigin("first column of Phi at the origin; angle undefined")
    return PolarDiagnostics(rho=_unwrap_to(math.atan2(phi21, phi11), prev_rho), r=r)


def rho_rate(alpha_delta, r, rho, beta):
    """Angular rate of the first column of Phi under pumping-and-damping.

    Differentiating atan2(Phi21, Phi11) along the flow gives
    alpha*Delta - Vtilde * sin(rho) cos(rho), with Vtilde = r^2/2 - beta.
    """
    return alpha_delta - (0.5 * r * r - beta) * np.sin(rho) * np.cos(rho)


def polar_trace(phi11, phi21, dt: float, alpha_delta=None, beta: float = 0.4):
    """Unwrapped angle, radius and (if ``alpha_delta`` given) rate residual.

    The residual compares a central difference of rho (one-sided at the ends)
    with ``rho_rate``.
    """
    phi11 = np.asarray(phi11, dtype=float)
    phi21 = np.asarray(phi21, dtype=float)
    r = np.hypot(phi11, phi21)
    if np.any(r < 1e-12):
        raise DegenerateOrigin("first column of Phi at the origin; angle undefined")
    rho = np.unwrap(np.arctan2(phi21, phi11))
    if alpha_delta is None:
        return rho, r, None
    measured = np.gradient(rho, dt)
    return rho, r, measured - rho_rate(np.asarray(alpha_delta, dtype=float), r, rho, beta)


# --- corollary: alpha*Delta -> 0 forces Vtilde -> 0 ------------------------

@dataclass(frozen=True)
class Corollary1Report:
    alpha_delta_tail: float
    tildeV_final: float
    alpha_delta_vanishes: bool
    tildeV_vanishes: bool

    @property
    def consistent(self) -> bool:
        return self.alpha_delta_vanishes and self.tildeV_vanishes

    @property
    def verdict(self) -> str:
        if not self.alpha_delta_vanishes:
            return "NOT_APPLICABLE"
        return "CONSISTENT" if self.tildeV_vanishes else "INCONCLUSIVE"


def corollary1_check(tildeV, alpha_delta, pumping_damping: bool = True,
                     alpha_delta_tol: float = 1e-6, tildeV_tol: float = 1e-3,
                     tail_fraction: float = 0.1) -> Corollary1Report:
    """Check that a vanishing alpha*Delta co-occurs with Vtilde -> 0 at the horizon.

    The tail is the last ``tail_fraction`` of the record.
    """
    if not pumping_damping:
        raise ValueError("corollary check needs a pumping-and-damping trajectory")
    v = np.asarray(tildeV, dtype=float)
    ad = np.abs(np.asarray(alpha_delta, dtype=float))
    tail = ad[int((1 - tail_fraction) * ad.size):]
    tail_max = float(tail.max()) if tail.size else float(ad[-1])
    return Corollary1Report(
        alpha_delta_tail=tail_max,
        tildeV_final=float(v[-1]),
        alpha_delta_vanishes=tail_max < alpha_delta_tol,
        tildeV_vanishes=float(v[-1]) < tildeV_tol,
    )


# --- counterexamples for the L1 condition ----------------------------------

def counterexample_z(tilde_v_forced: Callable, alpha_delta_forced: Callable, theta: float,
                     horizon: float, h: float = 1e-3):
    """Integrate dz/dt = -Vtilde(t) z + alpha*Delta(t) theta with prescribed signals.

    Returns grid times and the z trajectory, z(0) = 0.
    """
    n = ode.IntegratorConfig(step=h).n_steps(0.0, horizon)
    ts = np.arange(2 * n + 1) * (0.5 * h)
    decay = np.broadcast_to(np.asarray(tilde_v_forced(ts), dtype=float), ts.shape).copy()
    forcing = theta * np.broadcast_to(np.asarray(alpha_delta_forced(ts), dtype=float), ts.shape)
    z = _kernels.scalar_linear_rk4(0.0, h, n, decay, np.ascontiguousarray(forcing))
    return ts[::2], z


def frobenius(Phi) -> float:
    return float(np.sqrt(np.sum(np.square(np.asarray(Phi, dtype=float)))))
