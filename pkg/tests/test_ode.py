import math

import numpy as np
import pytest

from lregen import ode

decay = ode.OdeSystem(1, lambda t, x: -x)


def test_zero_rhs_step():
    sys0 = ode.OdeSystem(1, lambda t, x: np.zeros_like(x))
    assert ode.step(sys0, 0.0, np.array([3.0]), 0.1)[0] == 3.0


@pytest.mark.parametrize("method", list(ode.Method))
def test_constant_rhs_step(method):
    sys1 = ode.OdeSystem(1, lambda t, x: np.ones_like(x))
    assert ode.step(sys1, 0.0, np.array([0.0]), 0.1, method)[0] == pytest.approx(0.1, abs=1e-15)


def test_rk4_step_matches_taylor_polynomial():
    h = 0.1
    # RK4 on x' = -x reproduces the degree-4 Taylor polynomial of exp(-h)
    taylor = 1 - h + h**2 / 2 - h**3 / 6 + h**4 / 24
    x1 = ode.step(decay, 0.0, np.array([1.0]), h)[0]
    assert x1 == pytest.approx(taylor, abs=1e-15)
    assert x1 == pytest.approx(0.9048375, abs=1e-7)
    assert abs(x1 - math.exp(-h)) < 1e-7


def test_integrate_zero_rhs_counts_observer_calls():
    calls = []
    sys0 = ode.OdeSystem(1, lambda t, x: np.zeros_like(x))
    xf = ode.integrate(sys0, [5.0], 0.0, 1.0, ode.IntegratorConfig(0.01), lambda t, x: calls.append(t))
    assert xf[0] == 5.0
    assert len(calls) == 101
    assert calls[0] == 0.0 and calls[-1] == pytest.approx(1.0)


def test_integrate_exponential_decay():
    xf = ode.integrate(decay, [1.0], 0.0, 1.0, ode.IntegratorConfig(1e-3))
    assert abs(xf[0] - math.exp(-1)) < 1e-9


def test_empty_interval():
    calls = []
    xf = ode.integrate(decay, [2.0], 3.0, 3.0, observer=lambda t, x: calls.append(t))
    assert xf[0] == 2.0 and calls == [3.0]


def test_order_of_convergence():
    errors = [abs(ode.integrate(decay, [1.0], 0.0, 1.0, ode.IntegratorConfig(h))[0] - math.exp(-1))
              for h in (0.1, 0.05)]
    assert errors[0] / errors[1] >= 14


def test_linearity_for_lti_rhs():
    A = np.array([[0.0, 1.0], [-2.0, -0.3]])
    lti = ode.OdeSystem(2, lambda t, x: A @ x)
    x, y = np.array([1.0, -2.0]), np.array([0.5, 3.0])
    a, b = 1.7, -0.4
    lhs = ode.step(lti, 0.0, a * x + b * y, 0.05)
    rhs = a * ode.step(lti, 0.0, x, 0.05) + b * ode.step(lti, 0.0, y, 0.05)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-14)


def test_batched_state():
    xs = np.array([[1.0, 2.0, -3.0]])
    out = ode.step(decay, 0.0, xs, 0.1)
    np.testing.assert_allclose(out, xs * ode.step(decay, 0.0, np.array([1.0]), 0.1)[0])


def test_nonfinite_rhs_reports_time_and_component():
    bad = ode.OdeSystem(2, lambda t, x: np.array([0.0, np.inf if t > 0.25 else 0.0]))
    with pytest.raises(ode.IntegrationError) as info:
        ode.integrate(bad, [0.0, 0.0], 0.0, 1.0, ode.IntegratorConfig(0.1))
    assert info.value.component == 1
    # last stage of the step starting at 0.2
    assert info.value.t == pytest.approx(0.3)


def test_rejects_bad_step_and_dimension():
    with pytest.raises(ValueError):
        ode.IntegratorConfig(step=0.0)
    with pytest.raises(ValueError):
        ode.step(decay, 0.0, np.array([1.0]), -0.1)
    with pytest.raises(ValueError):
        ode.step(ode.OdeSystem(1, lambda t, x: np.zeros(2)), 0.0, np.array([1.0]), 0.1)
