"""Compiled RK4 loops for long runs.

Inputs for step i come as row i of an (n, 3) array holding the value at
the start of the step (right limit), the midpoint, and the end of the step
(left limit), so the loops never call back into Python. They mirror the right-hand sides in
``regen`` and ``metrics``; the test suite checks both routes agree.
"""
import numpy as np
from numba import njit

# coupled state layout
P11, P12, P21, P22, XI1, XI2, Z, TH_OLD, TH_NEW, ACC_AD, ACC_V = range(11)
N_STATE = 11


@njit(cache=True)
def _coupled_rhs(x, D, y, a0, k, beta, gamma, pd, v1, v2, v3, out):
    if pd:
        alpha = a0 - k * y * x[Z]
        u1 = -alpha * D
        u2 = alpha
        u3 = -(0.5 * (x[P11] * x[P11] + x[P21] * x[P21]) - beta)
    else:
        u1 = v1
        u2 = v2
        u3 = v3
    g = u2 * D
    out[P11] = u1 * x[P21]
    out[P12] = u1 * x[P22]
    out[P21] = g * x[P11] + u3 * x[P21]
    out[P22] = g * x[P12] + u3 * x[P22]
    out[XI1] = u1 * x[XI2] - u1 * x[Z]
    out[XI2] = g * x[XI1] + u3 * x[XI2]
    out[Z] = u2 * y + u3 * x[Z]
    out[TH_OLD] = gamma * D * (y - D * x[TH_OLD])
    out[TH_NEW] = gamma * x[P21] * ((x[Z] - x[XI2]) - x[P21] * x[TH_NEW])
    out[ACC_AD] = abs(u1)
    out[ACC_V] = -u3


@njit(cache=True)
def coupled_rk4(x0, h, n, delta, y, alpha0, k, beta, gamma, pd, u1, u2, u3):
    """Return (trajectory, fault step); fault is -1 unless the state went non-finite."""
    dim = x0.shape[0]
    traj = np.empty((n + 1, dim))
    traj[0] = x0
    x = x0.copy()
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    tmp = np.empty(dim)
    half = 0.5 * h
    for i in range(n):
        _coupled_rhs(x, delta[i, 0], y[i, 0], alpha0[i, 0], k, beta, gamma, pd,
                     u1[i, 0], u2[i, 0], u3[i, 0], k1)
        for m in range(dim):
            tmp[m] = x[m] + half * k1[m]
        _coupled_rhs(tmp, delta[i, 1], y[i, 1], alpha0[i, 1], k, beta, gamma, pd,
                     u1[i, 1], u2[i, 1], u3[i, 1], k2)
        for m in range(dim):
            tmp[m] = x[m] + half * k2[m]
        _coupled_rhs(tmp, delta[i, 1], y[i, 1], alpha0[i, 1], k, beta, gamma, pd,
                     u1[i, 1], u2[i, 1], u3[i, 1], k3)
        for m in range(dim):
            tmp[m] = x[m] + h * k3[m]
        _coupled_rhs(tmp, delta[i, 2], y[i, 2], alpha0[i, 2], k, beta, gamma, pd,
                     u1[i, 2], u2[i, 2], u3[i, 2], k4)
        for m in range(dim):
            x[m] = x[m] + (h / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m])
            if not np.isfinite(x[m]):
                return traj[: i + 1], i + 1
        traj[i + 1] = x
    return traj, -1


@njit(cache=True)
def scalar_linear_rk4(z0, h, n, decay, forcing):
    """RK4 for dz/dt = -decay(t) z + forcing(t); inputs on the half-step grid."""
    z = np.empty(n + 1)
    z[0] = z0
    x = z0
    half = 0.5 * h
    for i in range(n):
        j = 2 * i
        k1 = -decay[j] * x + forcing[j]
        k2 = -decay[j + 1] * (x + half * k1) + forcing[j + 1]
        k3 = -decay[j + 1] * (x + half * k2) + forcing[j + 1]
        k4 = -decay[j + 2] * (x + h * k3) + forcing[j + 2]
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        z[i + 1] = x
    return z
