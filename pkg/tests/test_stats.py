import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from yarnvision import reference, stats
from yarnvision.errors import ParameterError


def test_linfit_exact_line():
    f = stats.linfit([1, 2, 3], [3, 5, 7])
    assert (f.m, f.b, f.r2) == (pytest.approx(2), pytest.approx(1), 1.0)
    assert stats.linfit([1, 2], [4, 4]).r2 == 1.0
    with pytest.raises(ParameterError):
        stats.linfit([1, 1], [1, 2])


@pytest.mark.parametrize("a, b, x", [(0.5, 0.5, 0.3), (2, 3, 0.7), (10, 1.5, 0.99), (50, 50, 0.5), (1, 12, 0.01)])
def test_betainc_against_scipy(a, b, x):
    from scipy.special import betainc
    assert stats.betainc_reg(a, b, x) == pytest.approx(betainc(a, b, x), abs=1e-10)


@given(st.floats(0.01, 60), st.integers(1, 10), st.integers(2, 60))
def test_f_sf_against_scipy(f, d1, d2):
    assert stats.f_sf(f, d1, d2) == pytest.approx(sps.f.sf(f, d1, d2), abs=1e-8)


@given(st.floats(-20, 20), st.integers(1, 60))
def test_t_sf_against_scipy(t, df):
    assert stats.t_sf_two_sided(t, df) == pytest.approx(2 * sps.t.sf(abs(t), df), abs=1e-8)


def test_anova_against_scipy(rng):
    groups = [rng.normal(m, 1.0, 6) for m in (0, 0.5, 2.0)]
    t = stats.one_way_anova(groups)
    ref = sps.f_oneway(*groups)
    assert t.F == pytest.approx(ref.statistic, rel=1e-10)
    assert t.p_value == pytest.approx(ref.pvalue, abs=1e-9)
    assert t.r_squared == pytest.approx(t.ss_between / t.ss_total)


def test_anova_zero_error_is_infinite():
    t = stats.one_way_anova([[1, 1], [2, 2]])
    assert math.isinf(t.F) and t.p_value == 0.0
    assert t.to_dict()["F"] == stats.INFINITE
    assert stats.one_way_anova([[1, 1], [1, 1]]).F == 0.0


def test_anova_guards():
    with pytest.raises(ParameterError):
        stats.one_way_anova([[1, 2]])
    with pytest.raises(ParameterError):
        stats.one_way_anova([[1], [2, 3]])


def test_published_pairwise_table():
    means, mse = [38.01, 41.91, 23.86], 22.106
    pairs = {(p.i, p.j): p for p in stats.pairwise_from_means(means, [5, 5, 5], mse, 12)}
    rows = reference.load_table("packing_pairwise")
    names = ["Ring", "Compact", "Vortex"]
    for r in rows:
        p = pairs[(names.index(r["i"]), names.index(r["j"]))]
        assert p.diff == pytest.approx(r["mean_diff"], abs=0.01)
        assert p.se == pytest.approx(r["se"], abs=0.001)
        assert round(p.p_value, 3) == pytest.approx(r["sig"], abs=0.0015)


def test_pairwise_mean_diff_uses_anova_error():
    g = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]
    p = stats.pairwise_mean_diff(g)
    assert p[0].diff == -3.0
    assert p[0].se == pytest.approx(math.sqrt(1.0 * 2 / 3))
