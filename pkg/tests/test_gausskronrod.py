import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lifshitz.gausskronrod import (GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, integrate,
                                   integrate_batch)


def test_rule_constants():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, rel=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, rel=1e-15)
    np.testing.assert_allclose(NODES, -NODES[::-1], atol=0)
    gauss_nodes = NODES[GAUSS_WEIGHTS > 0]
    np.testing.assert_allclose(np.sort(gauss_nodes), np.polynomial.legendre.leggauss(7)[0],
                               rtol=0, atol=1e-15)


@pytest.mark.parametrize("k", range(0, 23))
def test_kronrod_exact_for_low_degree(k):
    exact = (1 - (-1) ** (k + 1)) / (k + 1)
    assert KRONROD_WEIGHTS @ NODES**k == pytest.approx(exact, abs=1e-14)


def test_exponential():
    r = integrate(np.exp, 0.0, 1.0, rel_tol=1e-12)
    assert r.converged
    assert r.value == pytest.approx(math.e - 1, rel=1e-14)
    assert r.error <= 1e-12 * r.value


def test_endpoint_singularity_open_rule():
    r = integrate(lambda t: 1 / np.sqrt(t), 0.0, 1.0, rel_tol=1e-8, limit=500)
    assert r.value == pytest.approx(2.0, rel=1e-7)


def test_breakpoints_used():
    f = lambda t: np.abs(t - 0.3)
    r = integrate(f, 0.0, 1.0, rel_tol=1e-13, breakpoints=[0.3])
    assert r.value == pytest.approx(0.045 + 0.245, rel=1e-14)
    assert r.evaluations == 30


def test_limit_flags_nonconvergence():
    r = integrate(lambda t: np.sin(1 / t), 1e-6, 1.0, rel_tol=1e-14, limit=5)
    assert not r.converged and r.segments == 5


def test_l1_norm_for_cancellation():
    f = lambda t: np.sin(2 * math.pi * t)
    by_value = integrate(f, 0.0, 1.0, rel_tol=1e-10, limit=50)
    by_l1 = integrate(f, 0.0, 1.0, rel_tol=1e-10, limit=50, relative_to="l1")
    assert by_l1.converged and abs(by_l1.value) < 1e-12
    assert by_l1.evaluations <= by_value.evaluations


def test_node_errors_propagate():
    r0 = integrate(lambda t: t * t, 0.0, 1.0)
    r1 = integrate(lambda t: (t * t, np.full_like(t, 1e-3)), 0.0, 1.0, limit=1)
    assert r1.value == r0.value
    assert r1.error == pytest.approx(r0.error + 1e-3, rel=1e-12)


@pytest.mark.parametrize("a, b", [(1.0, 0.0), (0.0, math.inf), (math.nan, 1.0)])
def test_invalid_interval(a, b):
    with pytest.raises(ValueError):
        integrate(np.exp, a, b)


def test_invalid_norm():
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, 1.0, relative_to="max")


def test_deterministic():
    f = lambda t: np.exp(-50 * (t - 0.37) ** 2) + np.sin(13 * t)
    a = integrate(f, 0.0, 2.0, rel_tol=1e-12)
    b = integrate(f, 0.0, 2.0, rel_tol=1e-12)
    assert a == b


def test_batch_matches_scalar():
    params = np.array([0.5, 1.0, 3.0, 10.0])

    def f(rows, t):
        return np.exp(-params[rows][:, None] * t)

    res = integrate_batch(f, 0.0, 2.0, params.size, rel_tol=1e-12)
    assert res.converged.all()
    exact = (1 - np.exp(-2 * params)) / params
    np.testing.assert_allclose(res.values, exact, rtol=1e-12)
    for i, p in enumerate(params):
        single = integrate(lambda t: np.exp(-p * t), 0.0, 2.0, rel_tol=1e-12, relative_to="l1")
        assert res.values[i] == pytest.approx(single.value, rel=1e-13)


def test_batch_rows_refine_independently():
    widths = np.array([1.0, 1e-3])

    def f(rows, t):
        return np.exp(-((t - 0.5) / widths[rows][:, None]) ** 2)

    res = integrate_batch(f, 0.0, 1.0, 2, rel_tol=1e-10, limit=200)
    assert res.converged.all()
    np.testing.assert_allclose(res.values, np.sqrt(np.pi) * widths * np.array(
        [math.erf(0.5), math.erf(500.0)]), rtol=1e-9)


def test_batch_limit():
    res = integrate_batch(lambda rows, t: np.sin(1 / t[:, :]), 1e-6, 1.0, 1, rel_tol=1e-14, limit=3)
    assert not res.converged[0]


@settings(max_examples=200)
@given(st.floats(0.1, 20.0), st.floats(-3.0, 3.0), st.floats(0.0, 2.0), st.floats(0.1, 3.0))
def test_agrees_with_quadpack(freq, shift, a, width):
    f = lambda t: np.cos(freq * t + shift) * np.exp(-t)
    b = a + width
    ours = integrate(f, a, b, rel_tol=1e-10, abs_tol=1e-14, relative_to="l1")
    ref = quad(lambda t: math.cos(freq * t + shift) * math.exp(-t), a, b, epsabs=1e-14,
               epsrel=1e-12)[0]
    assert ours.converged
    assert abs(ours.value - ref) <= max(ours.error, 1e-13)
