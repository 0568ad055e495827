import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import c

from lifshitz import (Composite, Drude, FrequencyScale, IdealConductor, IdealPermeable, Lorentz,
                      ModelDomainError, Srr, Vacuum, eval_composite, eval_drude, eval_lorentz,
                      eval_srr)
from lifshitz.dispersion import has_drude_term

import oracles

GOLD = Drude(0.96, 0.004)
ELECTRIC = Lorentz(0.04, 0.1, 0.005)
MAGNETIC = Lorentz(0.1, 0.1, 0.005)
BACKGROUND = Drude(1.0, 0.006)


class TestFrequencyScale:
    def test_lambda_times_omega_is_2pi_c(self):
        s = FrequencyScale(1.37e16)
        assert s.lambda_ref * s.omega_ref == pytest.approx(2 * math.pi * c, rel=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            FrequencyScale(bad)


class TestDrude:
    def test_at_plasma_frequency_undamped(self):
        assert eval_drude(Drude(0.96, 0.0), 0.96) == pytest.approx(2.0, rel=1e-15)

    def test_hand_value(self):
        assert eval_drude(GOLD, 1.0) == pytest.approx(1 + 0.9216 / 1.004, rel=1e-15)
        assert eval_drude(GOLD, 1.0) == pytest.approx(1.917929, abs=1e-6)

    def test_transparent_at_high_frequency(self):
        assert eval_drude(GOLD, 1e9) == pytest.approx(1.0, abs=1e-17)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_domain(self, x):
        with pytest.raises(ModelDomainError):
            eval_drude(GOLD, x)

    def test_array_domain(self):
        with pytest.raises(ModelDomainError):
            eval_drude(GOLD, np.array([1.0, 0.0]))

    @pytest.mark.parametrize("kwargs", [dict(plasma_freq=0.0), dict(plasma_freq=-1.0),
                                        dict(plasma_freq=1.0, damping=-0.1),
                                        dict(plasma_freq=math.nan)])
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(ValueError):
            Drude(**kwargs)

    def test_call_matches_eval(self):
        assert GOLD(0.3) == eval_drude(GOLD, 0.3)


class TestLorentz:
    def test_static_limit(self):
        assert eval_lorentz(MAGNETIC, 0.0) == pytest.approx(2.0, rel=1e-15)

    def test_high_frequency(self):
        assert eval_lorentz(MAGNETIC, 1e9) == pytest.approx(1.0, abs=1e-17)

    def test_hand_value(self):
        assert eval_lorentz(ELECTRIC, 0.1) == pytest.approx(1 + 0.0016 / 0.0205, rel=1e-15)
        assert eval_lorentz(ELECTRIC, 0.1) == pytest.approx(1.078048, abs=1e-6)

    def test_negative_x_rejected(self):
        with pytest.raises(ModelDomainError):
            eval_lorentz(ELECTRIC, -0.1)

    @pytest.mark.parametrize("args", [(-0.1, 0.1), (0.1, 0.0), (0.1, -1.0), (0.1, 0.1, -0.01)])
    def test_invalid_parameters(self, args):
        with pytest.raises(ValueError):
            Lorentz(*args)

    def test_zero_strength_is_vacuum(self):
        assert eval_lorentz(Lorentz(0.0, 0.1), 0.3) == 1.0


class TestComposite:
    def test_reduces_to_lorentz(self):
        p = Composite(0.0, BACKGROUND, ELECTRIC)
        assert eval_composite(p, 0.1) == eval_lorentz(ELECTRIC, 0.1)

    def test_f0_allows_zero_frequency(self):
        p = Composite(0.0, BACKGROUND, ELECTRIC)
        assert eval_composite(p, 0.0) == eval_lorentz(ELECTRIC, 0.0)

    def test_f1_hand_value(self):
        p = Composite(1.0, BACKGROUND, ELECTRIC)
        assert eval_composite(p, 1.0) == pytest.approx(1 + 1 / 1.006, rel=1e-15)
        assert eval_composite(p, 1.0) == pytest.approx(1.994035, abs=1e-6)

    def test_symbolic_oracle(self):
        p = Composite(1e-4, BACKGROUND, ELECTRIC)
        assert eval_composite(p, 0.01) == pytest.approx(oracles.COMPOSITE_F1EM4_X0P01, rel=1e-14)

    def test_domain_with_metal(self):
        with pytest.raises(ModelDomainError):
            eval_composite(Composite(1e-4, BACKGROUND, ELECTRIC), 0.0)

    @pytest.mark.parametrize("f", [-0.1, 1.1, math.nan])
    def test_filling_factor_range(self, f):
        with pytest.raises(ValueError):
            Composite(f, BACKGROUND, ELECTRIC)

    def test_reduction_identities_random(self):
        rng = np.random.default_rng(1)
        x = 10 ** rng.uniform(-4, 3, 1000)
        lor = Composite(0.0, BACKGROUND, ELECTRIC)
        dru = Composite(1.0, BACKGROUND, ELECTRIC)
        np.testing.assert_array_equal(eval_composite(lor, x), eval_lorentz(ELECTRIC, x))
        np.testing.assert_array_equal(eval_composite(dru, x), eval_drude(BACKGROUND, x))


class TestSrr:
    P = Srr(0.25, 0.1, 0.005)

    def test_static(self):
        assert eval_srr(self.P, 0.0) == 1.0

    def test_high_frequency(self):
        assert eval_srr(self.P, 1e16) == pytest.approx(0.75, abs=1e-15)

    def test_hand_value(self):
        assert eval_srr(self.P, 0.1) == pytest.approx(1 - 0.0025 / 0.0205, rel=1e-15)
        assert eval_srr(self.P, 0.1) == pytest.approx(0.878048, abs=1e-6)

    @pytest.mark.parametrize("cf", [0.0, 1.0, -0.2, 1.5])
    def test_geometry_factor_range(self, cf):
        with pytest.raises(ValueError):
            Srr(cf, 0.1, 0.005)


class TestIdealAndVacuum:
    def test_vacuum(self):
        np.testing.assert_array_equal(Vacuum()(np.array([0.1, 1.0])), [1.0, 1.0])

    @pytest.mark.parametrize("model", [IdealConductor(), IdealPermeable()])
    def test_ideal_not_evaluable(self, model):
        with pytest.raises(TypeError):
            model(1.0)

    def test_drude_term_detection(self):
        assert has_drude_term(GOLD)
        assert has_drude_term(Composite(1e-4, BACKGROUND, ELECTRIC))
        assert not has_drude_term(Composite(0.0, BACKGROUND, ELECTRIC))
        assert not has_drude_term(MAGNETIC)
        assert not has_drude_term(Vacuum())


# -- properties ---------------------------------------------------------------

pos = st.floats(1e-3, 10.0)
damp = st.floats(0.0, 1.0)
xs = st.floats(1e-4, 1e3)

models = st.one_of(
    st.builds(Drude, pos, damp),
    st.builds(Lorentz, st.floats(1e-3, 10.0), pos, damp),
    st.builds(Composite, st.floats(0.0, 1.0), st.builds(Drude, pos, damp),
              st.builds(Lorentz, st.floats(1e-3, 10.0), pos, damp)),
    st.builds(Srr, st.floats(1e-3, 0.999), pos, damp),
)


def _ordered(a, b):
    lo, hi = sorted((a, b))
    return lo, hi * (1 + 1e-9) + 1e-9


@settings(max_examples=1500)
@given(models, xs, xs)
def test_monotone_non_increasing(model, a, b):
    lo, hi = _ordered(a, b)
    assert model(lo) >= model(hi)


@settings(max_examples=1500)
@given(models, xs)
def test_passivity_bounds(model, x):
    v = model(x)
    if isinstance(model, Srr):
        assert 1 - model.geometry_factor < v <= 1
    else:
        assert v >= 1
        if isinstance(model, (Drude, Lorentz)):
            assert v > 1 or v == pytest.approx(1, abs=1e-12)


@settings(max_examples=1000)
@given(st.floats(1e-3, 10.0), pos, damp, st.floats(0.0, 1e2))
def test_lorentz_upper_bound(s, w0, g, x):
    v = eval_lorentz(Lorentz(s, w0, g), x)
    assert 1 <= v <= 1 + (s / w0) ** 2 * (1 + 1e-15)


def test_strict_monotonicity_on_grid():
    x = np.logspace(-3, 2, 2000)
    for model in (GOLD, ELECTRIC, MAGNETIC, Srr(0.25, 0.1, 0.005),
                  Composite(1e-4, BACKGROUND, ELECTRIC)):
        assert np.all(np.diff(model(x)) < 0)


def test_concurrent_evaluation_is_consistent():
    x = np.logspace(-3, 2, 5000)
    model = Composite(1e-4, BACKGROUND, ELECTRIC)
    expected = model(x)
    results = [None] * 8

    def work(i):
        results[i] = model(x)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        np.testing.assert_array_equal(r, expected)


def test_against_independent_formulas():
    x = np.logspace(-3, 2, 300)
    np.testing.assert_allclose(GOLD(x), oracles.drude(x, 0.96, 0.004), rtol=1e-14)
    np.testing.assert_allclose(ELECTRIC(x), oracles.lorentz(x, 0.04, 0.1, 0.005), rtol=1e-14)
    np.testing.assert_allclose(Srr(0.25, 0.1, 0.005)(x), oracles.srr(x, 0.25, 0.1, 0.005), rtol=1e-14)
    np.testing.assert_allclose(Composite(0.3, BACKGROUND, ELECTRIC)(x),
                               oracles.composite(x, 0.3, 1.0, 0.006, 0.04, 0.1, 0.005), rtol=1e-14)
