import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lregen import drem


def brute_det(m):
    """Leibniz formula over permutations, independent of the cofactor code."""
    n = m.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(n)):
        sign = (-1) ** sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total += sign * np.prod([m[i, perm[i]] for i in range(n)])
    return total


def test_mix_scalar():
    out = drem.mix(drem.ExtendedLre(W=np.array([6.0]), Psi=np.array([[3.0]])))
    assert out.Delta == 3.0
    np.testing.assert_array_equal(out.y, [6.0])


def test_mix_two_by_two_hand_computed():
    Psi = np.array([[2.0, 1.0], [1.0, 1.0]])
    W = Psi @ np.array([5.0, -3.0])
    np.testing.assert_array_equal(W, [7.0, 2.0])
    np.testing.assert_array_equal(drem.adjugate(Psi), [[1.0, -1.0], [-1.0, 2.0]])
    out = drem.mix(drem.ExtendedLre(W=W, Psi=Psi))
    assert out.Delta == 1.0
    np.testing.assert_allclose(out.y, [5.0, -3.0], atol=1e-15)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_determinant_matches_leibniz(q):
    rng = np.random.default_rng(q)
    for _ in range(20):
        m = rng.normal(size=(q, q))
        assert drem.determinant(m) == pytest.approx(brute_det(m), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda q: arrays(float, (q, q), elements=st.floats(-10, 10))))
def test_adjugate_identity(m):
    adj = drem.adjugate(m)
    det = drem.determinant(m)
    scale = max(1.0, np.max(np.abs(m))) ** m.shape[0]
    np.testing.assert_allclose(adj @ m, det * np.eye(m.shape[0]), atol=1e-10 * scale)
    np.testing.assert_allclose(m @ adj, det * np.eye(m.shape[0]), atol=1e-10 * scale)


def test_mixing_exactness_singular_psi():
    Psi = np.array([[1.0, 2.0], [2.0, 4.0]])
    theta = np.array([3.0, -1.0])
    out = drem.mix(drem.ExtendedLre(W=Psi @ theta, Psi=Psi))
    assert out.Delta == 0.0
    np.testing.assert_array_equal(out.y, [0.0, 0.0])


def test_rejects_unsupported_size():
    with pytest.raises(ValueError):
        drem.adjugate(np.eye(5))
    with pytest.raises(ValueError):
        drem.determinant(np.ones((2, 3)))


def test_zero_delay_is_identity():
    op = drem.DelayBank([0.0])
    rng = np.random.default_rng(0)
    for k in range(50):
        w, psi = rng.normal(), rng.normal(size=1)
        ext = op.extend(drem.VectorLreSample(k * 0.01, w, psi), 0.01)
        assert ext.W[0] == w and ext.Psi[0, 0] == psi[0]


def test_delay_bank_trig_pair():
    h = 1e-3
    d = 1571 * h
    theta = np.array([1.0, 2.0])
    op = drem.make_operator("delay", [0.0, d])
    for k in range(3001):
        t = k * h
        psi = np.array([math.sin(t), math.cos(t)])
        ext = op.extend(drem.VectorLreSample(t, psi @ theta, psi), h)
        if t < d - h / 2:
            np.testing.assert_array_equal(ext.Psi[1], [0.0, 0.0])
    expected = np.array([[math.sin(t), math.cos(t)], [math.sin(t - d), math.cos(t - d)]])
    np.testing.assert_allclose(ext.Psi, expected, atol=1e-12)
    np.testing.assert_allclose(ext.W, ext.Psi @ theta, atol=1e-12)
    mixed = drem.mix(ext)
    assert mixed.Delta == pytest.approx(math.sin(d), abs=1e-12)
    np.testing.assert_allclose(mixed.y, mixed.Delta * theta, atol=1e-12)


def test_delay_bank_validation():
    with pytest.raises(ValueError):
        drem.DelayBank([0.5, 1.0])
    with pytest.raises(ValueError):
        drem.DelayBank([0.0, 0.0])
    op = drem.DelayBank([0.0, 0.0015])
    with pytest.raises(ValueError, match="multiples"):
        op.extend(drem.VectorLreSample(0.0, 0.0, np.zeros(2)), 1e-3)


def test_filter_bank_dc_gain_and_consistency():
    h = 1e-2
    theta = np.array([2.0, -1.0])
    op = drem.make_operator("filter", [1.0, 3.0])
    for k in range(2001):
        t = k * h
        psi = np.array([1.5, 1.5 + math.sin(t)])
        ext = op.extend(drem.VectorLreSample(t, psi @ theta, psi), h)
    # first column sees the constant 1.5 through unit-DC-gain low-passes
    np.testing.assert_allclose(ext.Psi[:, 0], [1.5, 1.5], atol=1e-6)
    np.testing.assert_allclose(ext.W, ext.Psi @ theta, atol=1e-12)


def test_filter_bank_rejects_unstable_pole():
    with pytest.raises(ValueError):
        drem.FilterBank([1.0, -0.5])
    with pytest.raises(ValueError):
        drem.make_operator("kalman", [1.0])
