from fractions import Fraction

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hyperbolike import RatFun, series_expand
from hyperbolike.estimators import GrowthSeriesModel, OppositeSeries, RecurrenceFitter


def test_growth_model_on_free_group(f2):
    m = GrowthSeriesModel(delta=0, explore_radius=8).fit(f2)
    assert m.sphere_ == RatFun([1, 1], [1, -3]) and m.delta_ == 0
    assert m.predict(4) == 108 and m.predict([0, 1, 2]) == [1, 4, 12]
    assert m.transform(3) == [(0, 1, 1), (1, 4, 5), (2, 12, 17), (3, 36, 53)]
    assert float(m.growth_.lam) == 3


def test_growth_model_params_and_checks(cycle6):
    m = GrowthSeriesModel(explore_radius=4)
    assert clone(m).get_params()["explore_radius"] == 4
    with pytest.raises(NotFittedError):
        m.predict(1)
    with pytest.raises(TypeError):
        GrowthSeriesModel(explore_radius=4.5).fit(cycle6)
    with pytest.raises(ValueError):
        GrowthSeriesModel(delta=-1).fit(cycle6)
    with pytest.raises(TypeError):
        m.fit("not an oracle")


def test_recurrence_fitter():
    seq = [1] + [4 * 3 ** (n - 1) for n in range(1, 14)]
    r = RecurrenceFitter(max_order=4).fit(seq)
    assert r.ratfun_ == RatFun([1, 1], [1, -3]) and r.n_seen_ == 14
    assert r.predict(15)[15] == 4 * 3 ** 14
    with pytest.raises(TypeError):
        RecurrenceFitter(max_order=2).fit([1.0] * 10)
    with pytest.raises(ValueError):
        RecurrenceFitter(max_order=2).fit([1, 1, 2, 6, 24, 120, 720, 5040, 40320])


def test_opposite_series_modes():
    f = RatFun([2], [1, -3]) + RatFun([1], [1, 3])
    coeffs = series_expand(f, 199)
    emp = OppositeSeries(K=5).fit(coeffs)
    ana = OppositeSeries(K=5, method="analytic").fit(coeffs)
    direct = OppositeSeries(K=5, method="analytic").fit(f)
    assert emp.omega_.N == ana.omega_.N == direct.omega_.N == 2
    assert ana.transform(7) == direct.transform(7) == direct.transform([1])[0]
    assert direct.transform(0)[1] == Fraction(1, 9)
    assert abs(emp.transform(0)[1] - 1 / 9) < 1e-9
    with pytest.raises(NotFittedError):
        OppositeSeries().transform(0)
