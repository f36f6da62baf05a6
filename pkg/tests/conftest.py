import numpy as np
import pytest

from lregen import regen, signals
from lregen.harness import get_scenario, run_scenario

_cache = {}


def scenario_result(name, **overrides):
    key = (name, tuple(sorted(overrides.items())))
    if key not in _cache:
        _cache[key] = run_scenario(get_scenario(name).override(**overrides), write_csv=False)
    return _cache[key]


@pytest.fixture
def scenario():
    return scenario_result


def piecewise_constant(values, period):
    """Sample-and-hold signal over ``values``, one-sided at the switching times."""
    values = np.asarray(values, dtype=float)

    def f(t, side=0):
        eps = -1e-9 if side < 0 else 1e-9
        idx = np.clip(np.floor(np.asarray(t, dtype=float) / period + eps).astype(int), 0, len(values) - 1)
        out = values[idx]
        return float(out) if np.ndim(t) == 0 else out

    return signals.Signal(f, float(np.max(np.abs(values))), "piecewise constant", sided=True)


def random_u_problem(rng, horizon=20.0, period=0.5, bound=2.0):
    """A generator run with random bounded piecewise-constant inputs, theta and Delta."""
    n = int(round(horizon / period)) + 1
    us = tuple(piecewise_constant(rng.uniform(-bound, bound, n), period) for _ in range(3))
    theta = float(rng.uniform(-10.0, 10.0))
    key = str(rng.choice(sorted(signals.DELTAS)))
    problem = regen.CoupledProblem(delta=signals.get_signal(key), theta=signals.ThetaProfile.constant(theta),
                                   policy=regen.ExcitationPolicy(u=us), estimators=False)
    return problem, theta, key


ACCEPTANCE = {}


def record_criterion(criterion, passed, detail):
    """Remember one acceptance verdict for the end-of-run summary."""
    ACCEPTANCE[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE, key=lambda c: int(c[1:])):
        passed, detail = ACCEPTANCE[criterion]
        terminalreporter.write_line(f"{criterion} {'PASS' if passed else 'FAIL'}: {detail}")
