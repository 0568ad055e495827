import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lifshitz import Drude, Lorentz, ModelDomainError, Tabulated, kk_to_imaginary_axis, load_table
from lifshitz.kramers_kronig import IllConditionedTableError, kk_breakdown

import oracles

ELECTRIC = Lorentz(0.04, 0.1, 0.005)


@pytest.fixture(scope="module")
def lorentz_table():
    w = np.union1d(np.logspace(-6, 5, 4000), np.linspace(0.05, 0.15, 20001))
    return Tabulated(w, oracles.lorentz_absorption(w, 0.04, 0.1, 0.005))


def test_transparent_table_gives_one():
    t = Tabulated(np.linspace(0.1, 10, 50), np.zeros(50))
    np.testing.assert_array_equal(kk_to_imaginary_axis(t, [0.01, 1.0, 100.0]), 1.0)


def test_lorentz_single_point(lorentz_table):
    v = kk_to_imaginary_axis(lorentz_table, 0.1)
    assert isinstance(v, float)
    assert v == pytest.approx(ELECTRIC(0.1), rel=1e-4)


def test_lorentz_full_range(lorentz_table):
    x = np.logspace(-3, 2, 200)
    got = kk_to_imaginary_axis(lorentz_table, x)
    np.testing.assert_allclose(got, ELECTRIC(x), rtol=1e-4)


def test_narrow_resonance_sum_rule():
    s, w0, g = 0.04, 0.1, 1e-5
    w = np.union1d(np.logspace(-4, 3, 2000), w0 + np.linspace(-200 * g, 200 * g, 40001))
    t = Tabulated(w, oracles.lorentz_absorption(w, s, w0, g))
    x = np.array([0.01, 0.1, 1.0])
    np.testing.assert_allclose(t(x), 1 + s**2 / (x**2 + w0**2), rtol=1e-3)


def test_drude_tail_recovers_metal():
    wp, g = 0.96, 0.004
    w = np.logspace(-1, 4, 6000)          # starts well above the damping rate
    t = Tabulated(w, oracles.drude_absorption(w, wp, g))
    assert t.resolved_low_tail == "drude"
    x = np.array([0.01, 0.1, 1.0])
    exact = Drude(wp, g)(x)
    np.testing.assert_allclose(t(x), exact, rtol=1e-4)
    # the truncated table alone misses most of the low-frequency weight
    zero = Tabulated(w, oracles.drude_absorption(w, wp, g), low_tail="zero")
    assert abs(zero(0.01) / exact[0] - 1) > 0.5


def test_auto_tail_is_zero_for_insulators(lorentz_table):
    assert lorentz_table.resolved_low_tail == "zero"
    assert not lorentz_table.uses_drude_tail


def test_explicit_drude_tail_rejected_for_insulator():
    w = np.linspace(0.01, 1, 100)
    with pytest.raises(ValueError):
        Tabulated(w, oracles.lorentz_absorption(w, 0.04, 0.1, 0.005), low_tail="drude")


def test_ill_conditioned_table_reported():
    # two close samples: almost all of the weight comes from the power-law extrapolation
    w = np.array([5.0, 5.1])
    t = Tabulated(w, np.array([1e-3, 1e-3]))
    with pytest.raises(IllConditionedTableError):
        kk_to_imaginary_axis(t, 0.1)
    assert kk_to_imaginary_axis(t, 0.1, strict=False) > 1.0
    assert kk_breakdown(t, 0.1).tail_fraction[0] > 0.5


def test_breakdown_adds_up(lorentz_table):
    b = kk_breakdown(lorentz_table, [0.05, 0.5])
    np.testing.assert_allclose(b.response, 1 + b.body + b.low_tail + b.high_tail)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_domain(lorentz_table, x):
    with pytest.raises(ModelDomainError):
        kk_to_imaginary_axis(lorentz_table, x)


@pytest.mark.parametrize("omega, im, match", [
    ([0.1, 0.1, 0.3], [0, 0, 0], "increasing"),
    ([0.3, 0.2, 0.4], [0, 0, 0], "increasing"),
    ([0.0, 0.2], [0, 0], "> 0"),
    ([0.1, 0.2], [0.1, -0.1], "passive"),
    ([0.1, 0.2], [0.1, math.nan], "non-finite"),
    ([], [], "non-empty"),
])
def test_table_invariants(omega, im, match):
    with pytest.raises(ValueError, match=match):
        Tabulated(np.array(omega, dtype=float), np.array(im, dtype=float))


def test_invalid_policies():
    with pytest.raises(ValueError):
        Tabulated(np.array([0.1, 0.2]), np.array([0.0, 0.0]), low_tail="cubic")
    with pytest.raises(ValueError):
        Tabulated(np.array([0.1, 0.2]), np.array([0.0, 0.0]), high_tail="exp")


def test_arrays_are_frozen():
    t = Tabulated(np.array([0.1, 0.2]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        t.omega[0] = 5.0


def test_load_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# omega, im\n0.1, 0.0\n0.2, 0.5  \n# trailing comment\n0.4, 0.1\n")
    t = load_table(p)
    np.testing.assert_array_equal(t.omega, [0.1, 0.2, 0.4])
    np.testing.assert_array_equal(t.im_response, [0.0, 0.5, 0.1])
    assert t.source == str(p)


def test_load_rejects_unsorted(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("0.1, 0.0\n0.3, 0.5\n0.2, 0.1\n")
    with pytest.raises(ValueError, match="increasing"):
        load_table(p)


def test_load_rejects_wrong_columns(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("0.1, 0.0, 1\n0.3, 0.5, 2\n")
    with pytest.raises(ValueError, match="2 columns"):
        load_table(p)


def test_equality_compares_contents():
    a = Tabulated(np.array([0.1, 0.2]), np.array([0.0, 1.0]))
    b = Tabulated(np.array([0.1, 0.2]), np.array([0.0, 1.0]))
    c = Tabulated(np.array([0.1, 0.2]), np.array([0.0, 2.0]))
    assert a == b and a != c


tables = st.integers(2, 30).flatmap(lambda n: st.tuples(
    st.lists(st.floats(1e-3, 1e3), min_size=n, max_size=n, unique=True),
    st.lists(st.floats(0.0, 1e2), min_size=n, max_size=n)))


@settings(max_examples=300)
@given(tables, st.floats(1e-3, 1e3), st.sampled_from(["auto", "zero"]),
       st.sampled_from(["power-law", "zero"]))
def test_response_at_least_one_and_monotone(table, x, low, high):
    w, im = table
    t = Tabulated(np.sort(w), np.array(im), low_tail=low, high_tail=high)
    v = kk_to_imaginary_axis(t, [x, 2 * x], strict=False)
    assert v[0] >= 1.0 and v[1] >= 1.0
    assert v[0] >= v[1] * (1 - 1e-12)
