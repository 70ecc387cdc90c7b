import csv
import io
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperbolike import AutomatonParams, FiniteGraph, RatFun, build_automaton, build_ball, series_expand
from hyperbolike.backends import FreeProductOracle
from hyperbolike.series import (growth_json, growth_rate_check, omega_agree, omega_analytic, omega_empirical,
                                opposite_poly, saito_hypothesis_check, series_csv, sphere_and_ball_series,
                                subgraph_counts, subgraph_series)
from hyperbolike.tournament import IntegrityError, TRUNCATED


def test_saito_check():
    assert saito_hypothesis_check([1] * 10) == (True, 1, 1)
    assert saito_hypothesis_check([1, 4, 12, 36, 108]) == (True, Fraction(1, 4), Fraction(1, 3))
    assert saito_hypothesis_check([1, 0, 2]) == (False, None, None)


def test_opposite_poly():
    a = [Fraction(x) for x in (1, 4, 12, 36)]
    assert opposite_poly(a, 2, 3) == [1, Fraction(1, 3), Fraction(1, 12), 0]


def test_omega_empirical_constant_sequence():
    res = omega_empirical([1] * 120, K=5)
    assert res.N == 1 and res.distinct == 1
    assert res.limits == [[1.0] * 6]
    with pytest.raises(ValueError):
        omega_empirical([1] * 50)
    with pytest.raises(ValueError):
        omega_empirical([1, 0] * 60)


def test_omega_geometric():
    f = RatFun([1], [1, -3])
    res = omega_analytic(f, K=6)
    assert res.N == 1 and res.limits == [[Fraction(1, 3 ** k) for k in range(7)]]
    emp = omega_empirical(series_expand(f, 119), K=6)
    assert omega_agree(res, emp, 1e-9)


def test_omega_alternating_constants():
    f = RatFun([2], [1, -3]) + RatFun([1], [1, 3])
    coeffs = series_expand(f, 159)
    assert coeffs[4] == 3 * 81 and coeffs[5] == 243
    ana = omega_analytic(f, K=8)
    emp = omega_empirical(coeffs, K=8)
    assert ana.N == emp.N == 2 and ana.distinct == 2
    # C_even = 3, C_odd = 1: X_n coefficient k=1 is C_{n-1}/(3 C_n)
    assert ana.limits[0][1] == Fraction(1, 9) and ana.limits[1][1] == 1
    assert omega_agree(ana, emp, 1e-9)
    assert not omega_agree(ana, omega_analytic(RatFun([1], [1, -3]), K=8), 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(-5, 5), st.integers(2, 4))
def test_analytic_matches_empirical(c1, c2, lam):
    # c1 lam^n + c2 (-lam)^n + 1 stays positive when c1 > |c2|
    if c1 <= abs(c2):
        c1 = abs(c2) + 1
    f = RatFun([c1], [1, -lam]) + RatFun([c2], [1, lam]) + RatFun([1], [1, -1])
    K = 6
    ana = omega_analytic(f, K=K)
    emp = omega_empirical(series_expand(f, 199), K=K)
    assert ana.N == (1 if c2 == 0 else 2)
    assert omega_agree(ana, emp, 1e-9)


def test_omega_ball_series_of_free_group():
    ball = RatFun([1, 1], [1, -3]) / RatFun([1, -1])
    res = omega_analytic(ball, K=4)
    assert res.N == 1
    assert res.limits[0][:2] == [1, Fraction(1, 3)]
    js = res.to_json()
    assert js["N"] == 1 and js["method"] == "Analytic" and js["limits"][0][1] == "1/3"


def test_growth_check_flags():
    rep = growth_rate_check(RatFun([1], [1, -2, 1]), list(range(1, 30)))
    assert not rep.simple and any("not simple" in f for f in rep.flags)
    sphere = RatFun([1, 1], [1, -3])
    balls = [2 * 3 ** n - 1 for n in range(12)]
    rep = growth_rate_check(sphere, balls)
    assert rep.simple and float(rep.lam) == 3 and not rep.flags
    lo, hi = rep.ratio_window
    assert 1 <= lo <= hi <= 2
    # n 3^n growth against a lambda = 3 sphere widens the late window
    rep = growth_rate_check(sphere, [(n + 1) * 3 ** n for n in range(12)])
    assert rep.polynomial_factor_suspected


def test_sphere_series_of_two_point_line():
    line = FreeProductOracle([2, 2])
    rep = build_automaton(line, AutomatonParams(0, 6))
    sphere, ball = sphere_and_ball_series(rep.automaton, rep.bfs_spheres)
    assert sphere == RatFun([1, 1], [1, -1])
    assert ball == sphere / RatFun([1, -1])
    with pytest.raises(IntegrityError):
        sphere_and_ball_series(rep.automaton, [1, 2, 3])


def test_truncated_automaton_has_no_series(t237):
    rep = build_automaton(t237, AutomatonParams(2, 12))
    assert rep.automaton.closure == TRUNCATED
    with pytest.raises(IntegrityError, match="provisional"):
        sphere_and_ball_series(rep.automaton)


def test_edge_series_of_free_group(f2):
    ball = build_ball(f2, 8)
    edge = FiniteGraph.path(2)
    counts, fitted = subgraph_series(edge, ball, RatFun([1, 1], [1, -3]))
    assert counts == [4 * 3 ** n - 4 for n in range(9)]
    assert fitted == RatFun([0, 8], [1, -3]) / RatFun([1, -1])
    assert subgraph_counts(edge, build_ball(f2, 3)) == counts[:4]
    with pytest.raises(ValueError):
        subgraph_series(FiniteGraph.path(5), build_ball(f2, 3))


def test_output_formats():
    sphere = RatFun([1, 1], [1, -3])
    ball = sphere / RatFun([1, -1])
    growth = growth_rate_check(sphere, [2 * 3 ** n - 1 for n in range(10)])
    obj = json.loads(growth_json(sphere, ball, growth, omega_analytic(ball, K=3)))
    assert obj["lambda"]["simple"] and obj["lambda"]["minimal_poly_factor"] == ["-3", "1"]
    assert RatFun.from_json(obj["sphere"]) == sphere
    assert obj["omega"]["N"] == 1
    rows = list(csv.reader(io.StringIO(series_csv([1, 4, 12], [1, 5, 17], [0, 0, Fraction(1, 2)]))))
    assert rows[0] == ["n", "sphere", "ball", "dead_end_density"]
    assert rows[3] == ["2", "12", "17", "1/2"]
