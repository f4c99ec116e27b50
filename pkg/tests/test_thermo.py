import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bipartite_mf.errors import DomainError, RegimeError
from bipartite_mf.model import ModelParams, entropy, f_value, reduced_f_value
from bipartite_mf.roots import solve_t_check, solve_x_hat, solve_x_tilde
from bipartite_mf.thermo import (
    LN2,
    compare_maxima,
    dense_grid_maximum,
    field_selection,
    limit_pressure,
)

from conftest import reduced, symmetric_params


def random_params(rng, with_field=True):
    j = rng.uniform(-2.0, 2.0, size=3)
    h = rng.uniform(-0.5, 0.5, size=2) if with_field else np.zeros(2)
    return ModelParams(*j, *h, alpha1=rng.uniform(0.1, 0.9), beta=rng.uniform(0.1, 3.0))


class TestLimitPressure:
    def test_infinite_temperature(self):
        res = limit_pressure(ModelParams(1.0, -3.0, 2.0, 0.5, -0.4, alpha1=0.3, beta=0.0))
        assert res.pressure == LN2
        assert res.f_max == 0.0
        assert not res.degenerate_ground_state

    @pytest.mark.parametrize("t", [1.0, 1.1, 2.0, 5.0])
    def test_paramagnetic_phase(self, t):
        res = limit_pressure(symmetric_params(t, -0.6))
        assert res.pressure - LN2 == pytest.approx(0.0, abs=1e-12)
        assert [tuple(m) for m in res.argmax] == [(0.0, 0.0)]

    @pytest.mark.parametrize("t, b", [(0.9, -0.8), (0.5, -0.3), (0.25, -0.3), (0.05, -0.5)])
    def test_ordered_phase(self, t, b):
        r = reduced(t, b)
        x = solve_x_tilde(t).root
        res = limit_pressure(r.to_model_params())
        assert res.pressure == pytest.approx(LN2 + reduced_f_value(r, (x, -x)), abs=1e-13)
        assert res.degenerate_ground_state
        got = sorted(tuple(m) for m in res.argmax)
        np.testing.assert_allclose(got, [(-x, x), (x, -x)], atol=1e-12)

    def test_matches_dense_grid_on_random_sample(self):
        rng = np.random.default_rng(7)
        for _ in range(15):
            p = random_params(rng)
            f_grid, _ = dense_grid_maximum(p)
            assert limit_pressure(p).f_max == pytest.approx(f_grid, abs=1e-9)

    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1), st.floats(-1, 1),
           st.floats(0.1, 0.9), st.floats(0.0, 3.0))
    def test_at_least_ln2(self, j11, j12, j22, h1, h2, alpha, beta):
        res = limit_pressure(ModelParams(j11, j12, j22, h1, h2, alpha, beta))
        assert res.pressure >= LN2 - 1e-15
        assert res.pressure == LN2 + res.f_max

    def test_argmax_invariants(self):
        p = ModelParams(1.0, -0.7, 0.4, 0.2, 0.1, alpha1=0.4, beta=3.0)
        res = limit_pressure(p)
        assert res.argmax
        for m in res.argmax:
            assert f_value(p, tuple(m)) >= res.f_max - 1e-10
        assert res.degenerate_ground_state == (len(res.argmax) >= 2)
        assert set(res.to_dict()) == {"pressure", "f_max", "argmax", "degenerate_ground_state"}


class TestDenseGrid:
    def test_finds_the_anti_diagonal_maximum(self):
        r = reduced(0.5, -0.8)
        x = solve_x_tilde(0.5).root
        f_grid, loc = dense_grid_maximum(r.to_model_params())
        assert f_grid == pytest.approx(reduced_f_value(r, (x, -x)), abs=1e-12)
        assert abs(abs(loc[0]) - x) < 1e-6


class TestCompareMaxima:
    def test_nine_point_example(self):
        (m_t, p_t), (m_h, p_h) = compare_maxima(reduced(0.25, -0.3))
        x, y = solve_x_tilde(0.25).root, solve_x_hat(0.25, -0.3).root
        assert tuple(m_t) == (x, -x) and tuple(m_h) == (y, y)
        assert p_t == pytest.approx(0.5 * x * x - 0.25 * entropy(x), rel=1e-14)
        assert p_h == pytest.approx(0.5 * 0.4 * y * y - 0.25 * entropy(y), rel=1e-14)
        assert p_t > p_h

    def test_values_are_t_times_f(self):
        r = reduced(0.2, -0.3)
        (m_t, p_t), (m_h, p_h) = compare_maxima(r)
        assert p_t == pytest.approx(r.t * reduced_f_value(r, tuple(m_t)), abs=1e-14)
        assert p_h == pytest.approx(r.t * reduced_f_value(r, tuple(m_h)), abs=1e-14)

    @pytest.mark.parametrize("t, b", [(0.3, -0.3), (0.5, -0.8), (0.25, 0.3), (0.2, -0.6)])
    def test_outside_regime(self, t, b):
        with pytest.raises(RegimeError):
            compare_maxima(reduced(t, b))

    def test_small_t_limits(self):
        (_, p_t), (_, p_h) = compare_maxima(reduced(1e-4, -0.3))
        assert p_t == pytest.approx(0.5, abs=1e-3)
        assert p_h == pytest.approx((2 * 0.7 - 1) / 2, abs=1e-3)

    def test_decreasing_along_anti_diagonal_branch(self):
        tc = solve_t_check(-0.3).root
        vals = [compare_maxima(reduced(t, -0.3))[0][1] for t in np.linspace(0.01, tc * 0.999, 25)]
        assert np.all(np.diff(vals) < 0)


class TestFieldSelection:
    base = staticmethod(lambda: symmetric_params(0.5, -0.8))

    def test_anti_diagonal_field(self):
        rep = field_selection(self.base(), (1.0, -1.0))
        assert rep.field == (1e-4, -1e-4)
        assert rep.selected.mu1 > 0 > rep.selected.mu2
        assert rep.dot_product > 0
        assert rep.stable_under_halving

    def test_selection_follows_the_field(self):
        a = field_selection(self.base(), (0.3, 1.0), 1e-3)
        b = field_selection(self.base(), (-0.3, -1.0), 1e-3)
        np.testing.assert_allclose(a.selected.as_array(), -b.selected.as_array(), atol=1e-12)
        assert a.dot_product > 0 and b.dot_product > 0

    def test_equal_components_tie(self):
        rep = field_selection(self.base(), (1.0, 1.0))
        assert rep.selected == "tie"
        assert rep.gap < 1e-10
        assert rep.dot_product == 0.0

    def test_bad_scale(self):
        with pytest.raises(DomainError):
            field_selection(self.base(), (1.0, 0.0), 0.0)
        with pytest.raises(DomainError):
            field_selection(self.base(), (0.0, 0.0))

    def test_needs_degenerate_ground_state(self):
        with pytest.raises(RegimeError):
            field_selection(symmetric_params(1.5, -0.8), (1.0, -1.0))
        with pytest.raises(RegimeError):
            field_selection(symmetric_params(0.5, -0.8, h1=0.1), (1.0, -1.0))

    def test_zero_field_is_degenerate(self):
        assert limit_pressure(self.base()).degenerate_ground_state

    def test_report_dict(self):
        rec = field_selection(self.base(), (1.0, 1.0)).to_dict()
        assert rec["selected"] == "tie"
        assert math.isfinite(rec["gap"])
