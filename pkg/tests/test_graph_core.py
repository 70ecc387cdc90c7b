import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperbolike import ExplicitOracle, FiniteGraph, ball_automorphism_count, build_ball, dead_end_census, estimate_delta
from hyperbolike.graph_core import (BallConstructionError, TooLargeError, dead_ends_by_definition, parse_graph_text,
                                    read_graph_file)


def test_sphere_sizes(f2, cycle6, quasitree):
    assert build_ball(f2, 2).sphere_sizes == [1, 4, 12]
    assert build_ball(cycle6, 3).sphere_sizes == [1, 2, 2, 1]
    assert build_ball(quasitree, 1).sphere_sizes == [1, 8]
    assert build_ball(f2, 0).sphere_sizes == [1]


@pytest.mark.parametrize("name,R", [("f2", 5), ("genus2", 3), ("t237", 9), ("quasitree", 4), ("cycle6", 3)])
def test_ball_invariants(request, name, R):
    ball = build_ball(request.getfixturevalue(name), R)
    assert ball.level.count(0) == 1 and ball.keys[0] == ball.base
    for v, nbrs in enumerate(ball.adjacency):
        assert v not in nbrs
        for u in nbrs:
            assert v in ball.adjacency[u]
            assert abs(ball.level[u] - ball.level[v]) <= 1
        assert set(ball.parents[v]) == {u for u in nbrs if ball.level[u] == ball.level[v] - 1}
        if ball.level[v] > 0:
            assert ball.parents[v]
    # indices run level by level with sorted keys
    assert list(ball.level) == sorted(ball.level)
    for n in range(R + 1):
        lo, hi = (ball.size(n - 1) if n else 0), ball.size(n)
        assert list(ball.keys[lo:hi]) == sorted(ball.keys[lo:hi])


def test_larger_radius_keeps_inner_levels(t237):
    small, big = build_ball(t237, 6), build_ball(t237, 9)
    m = small.size(6)
    assert big.keys[:m] == small.keys and big.level[:m] == small.level


def test_oracle_failure_names_the_vertex():
    class Broken:
        base = "x"
        transitive = True

        def neighbors(self, v):
            if v == "y":
                raise KeyError("boom")
            return ["y"] if v == "x" else []

    with pytest.raises(BallConstructionError, match="'y'"):
        build_ball(Broken(), 2)


def test_interior_degree_check():
    class Star:
        base = "c"
        transitive = True

        def neighbors(self, v):
            return ["a", "b", "d"] if v == "c" else ["c"]

    with pytest.raises(BallConstructionError, match="interior degrees"):
        build_ball(Star(), 2)
    Star.transitive = False
    assert build_ball(Star(), 2).sphere_sizes == [1, 3, 0]


def test_free_group_has_no_dead_ends(f2):
    report = dead_end_census(build_ball(f2, 10))
    assert report.max_reliable_level == 9
    assert all(lv.dead_ends == 0 and lv.density == 0 for lv in report.levels)


def test_cycle_antipode_is_a_dead_end(cycle6):
    ball = build_ball(cycle6, 3)
    report = dead_end_census(ball, max_level=3)
    assert [lv.dead_ends for lv in report.levels] == [0, 0, 0, 1]
    assert report.levels[3].density == Fraction(1)
    assert report.witnesses[3] == ("v3",)
    with pytest.raises(ValueError):
        dead_end_census(ball, max_level=4)


def test_triangle_dead_ends(t237):
    report = dead_end_census(build_ball(t237, 11))
    assert len(report.levels) == 11
    assert report.levels[10].density > 0
    assert [lv.dead_ends for lv in report.levels[:7]] == [0] * 7
    for lv in report.levels:
        assert 0 <= lv.density <= 1 and lv.dead_ends <= lv.sphere


@st.composite
def connected_graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    edges |= {(min(u, v), max(u, v)) for u, v in extra if u != v}
    return FiniteGraph.from_edges(n, sorted(edges))


@settings(max_examples=150, deadline=None)
@given(connected_graphs())
def test_local_dead_end_criterion_matches_definition(g):
    names = [f"v{i}" for i in range(len(g))]
    oracle = ExplicitOracle(FiniteGraph(g.adjacency, names=names), 0)
    R = max(g.distances_from(0))
    ball = build_ball(oracle, R)
    report = dead_end_census(ball, max_level=R)
    local = sorted(w for ws in report.witnesses for w in ws)
    assert local == sorted(names[v] for v in dead_ends_by_definition(g, 0))


def test_estimate_delta_on_tree_and_cycle(f2, cycle6):
    assert estimate_delta(build_ball(f2, 3), 10 ** 6) == 0
    d = estimate_delta(build_ball(cycle6, 3), 10 ** 6)
    assert d > 0 and isinstance(d, Fraction)
    assert estimate_delta(build_ball(cycle6, 3), 0) == 0
    with pytest.raises(ValueError):
        estimate_delta(build_ball(f2, 1), 10)


def test_estimate_delta_triangle_baseline(t237):
    # exhaustive over all triples of the radius-8 ball
    assert estimate_delta(build_ball(t237, 8), 10 ** 7) == 3


def test_estimate_delta_is_monotone_in_budget(t237):
    ball = build_ball(t237, 8)
    values = [estimate_delta(ball, b, seed=5) for b in (10, 100, 1000, 10000, 200000)]
    assert values == sorted(values)


def test_automorphism_counts(f2, cycle6):
    ball = build_ball(f2, 2)
    assert ball_automorphism_count(ball, 1) == 24
    assert ball_automorphism_count(ball, 2) == 31104 == 24 * 6 ** 4
    # root stabilizer of a tree ball: permute the 4 root branches, then 3 children at every inner vertex
    assert ball_automorphism_count(build_ball(f2, 3)) == 24 * 6 ** 16
    assert ball_automorphism_count(build_ball(cycle6, 3)) == 12
    with pytest.raises(TooLargeError):
        ball_automorphism_count(build_ball(f2, 7), cap=2000)


def test_graph_parser():
    g, base = parse_graph_text("format graph v1\n# c\nbase a\nedge a b\nedge b a\nedge b c  # tail\n")
    assert base == 0 and g.names == ["a", "b", "c"] and g.adjacency == [[1], [0, 2], [1]]
    with pytest.raises(ValueError, match="line 2"):
        parse_graph_text("edge a b\nedge a a\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_graph_text("vertex a\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_graph_text("anchor a\n", allow_anchor=False)
    with pytest.raises(ValueError):
        parse_graph_text("# nothing\n")


def test_graph_file_errors_name_the_file(tmp_path):
    p = tmp_path / "g.graph"
    p.write_text("edge x\n")
    with pytest.raises(ValueError, match="g.graph: line 1"):
        read_graph_file(p)


def test_random_relabeling_keeps_sphere_sizes(cycle6):
    rng = random.Random(0)
    names = [f"v{i}" for i in range(6)]
    perm = names[:]
    rng.shuffle(perm)
    text = "".join(f"edge {perm[i]} {perm[(i + 1) % 6]}\n" for i in range(6))
    g, _ = parse_graph_text(f"base {perm[0]}\n" + text)
    assert build_ball(ExplicitOracle(g, 0), 3).sphere_sizes == build_ball(cycle6, 3).sphere_sizes
