from fractions import Fraction

import pytest

from hyperbolike import (AutomatonParams, FreeProductOracle, TournamentAutomaton, TypeCollision, build_automaton,
                         build_ball, fit_automaton, initial_tournament, parent_count, predict_sphere_counts, transition)
from hyperbolike.tournament import CLOSED, IntegrityError, TRUNCATED, _DictSpace, _FrameSpace, local_ball


def test_params_radius():
    assert [AutomatonParams(d, 8).r for d in (0, 1, 2)] == [2, 3, 5]
    with pytest.raises(ValueError):
        AutomatonParams(-1, 8)


def test_initial_tournament(f2, cycle6):
    p = AutomatonParams(0, 8)
    t = initial_tournament(build_ball(f2, 3), p)
    assert t.values[""] == 0
    assert sorted(t.values.values()) == [0] + [1] * 4 + [2] * 12
    t6 = initial_tournament(build_ball(cycle6, 3), p)
    assert sorted(t6.values.values()) == [0, 1, 1, 2, 2]
    with pytest.raises(ValueError):
        initial_tournament(build_ball(f2, 1), p)


def test_free_group_transition_by_hand(f2):
    p = AutomatonParams(0, 8)
    t0 = initial_tournament(build_ball(f2, 2), p)
    t1 = transition(t0, "a", local_ball(f2, "", 3 * p.r + 1))
    t2 = transition(t1, "ab", local_ball(f2, "a", 3 * p.r + 1))
    # on a tree the tournament is the exact relative distance
    assert t2.values == {z: len(z) - 2 for z in f2.ball_keys("ab", 2)}
    assert t2.values[""] == -2 and t2.values["aa"] == 0 and t2.values["aB"] == 0
    assert t2.values["abb"] == 1 and t2.values["abbb"] == 2
    assert parent_count(t1, "ab", local_ball(f2, "a", 7)) == 1


def test_transition_refuses_small_fragments(f2):
    p = AutomatonParams(0, 8)
    t0 = initial_tournament(build_ball(f2, 2), p)
    with pytest.raises(ValueError, match="3r\\+1"):
        transition(t0, "a", local_ball(f2, "", 5))
    with pytest.raises(ValueError, match="not a neighbor"):
        transition(t0, "ab", local_ball(f2, "", 7))
    with pytest.raises(ValueError, match="centered"):
        transition(t0, "a", local_ball(f2, "a", 7))


def _space(oracle, r):
    return _FrameSpace(oracle, r, 3) if oracle.has_frames else _DictSpace(oracle, r, 3)


def _engine_tournaments(oracle, r, depth):
    """Every (vertex, tournament, parent count) the expansion engine reaches."""
    space = _space(oracle, r)
    y0, F0 = space.initial()
    level = [(y0, F0)]
    out = {y0: [(space.values(y0, F0), None)]}
    for _ in range(depth):
        nxt = {}
        for y, F in level:
            for yc, Fc, pc in space.expand(y, F):
                nxt[(yc, space.fkey(Fc))] = (yc, Fc)
                out.setdefault(yc, []).append((space.values(yc, Fc), pc))
        level = list(nxt.values())
    return out


@pytest.mark.parametrize("name,delta,depth", [("f2", 0, 3), ("cycle6", 0, 3), ("cycle6", 1, 3)])
def test_reference_transition_matches_engine(request, name, delta, depth):
    o = request.getfixturevalue(name)
    p = AutomatonParams(delta, 8)
    r = p.r
    engine = _engine_tournaments(o, r, depth)
    t0 = initial_tournament(local_ball(o, o.base, r), p)
    frontier = [t0]
    for n in range(depth):
        nxt = []
        for t in frontier:
            local = local_ball(o, t.center, 3 * r + 1)
            for child in o.neighbors(t.center):
                if min(f + o.distance(z, child) for z, f in t.values.items()) != 1:
                    continue
                tc = transition(t, child, local)
                pc = parent_count(t, child, local)
                assert (tc.values, pc) in engine[child]
                nxt.append(tc)
        frontier = nxt
    assert frontier


def _geodesics(ball, v):
    """All geodesics from the base to v as vertex-index lists."""
    if ball.level[v] == 0:
        return [[v]]
    return [g + [v] for p in ball.parents[v] for g in _geodesics(ball, p)]


def _fellow_travel(ball, dist, g, h, T):
    return all(dist[g[len(g) - 1 - i]][h[len(h) - 1 - i]] <= T for i in range(min(len(g), len(h))))


@pytest.mark.parametrize("name,delta", [("f2", 0), ("cycle6", 1)])
def test_competitors_are_certified(request, name, delta):
    o = request.getfixturevalue(name)
    r = AutomatonParams(delta, 8).r
    T = 2 * delta + 1
    ball = build_ball(o, 6)
    dist = {}
    engine = _engine_tournaments(o, r, 4)
    checked = 0
    for y, items in engine.items():
        vy = ball.index(y)
        gy = _geodesics(ball, vy)
        for z in o.ball_keys(y, T):
            vz = ball.index(z)
            if ball.level[vz] > ball.level[vy]:
                continue
            for v in {u for g in gy for u in g} | {u for g in _geodesics(ball, vz) for u in g}:
                if v not in dist:
                    dist[v] = {u: o.distance(ball.keys[v], ball.keys[u]) for u in range(ball.size(5))}
            if any(all(_fellow_travel(ball, dist, gz, g, T) for g in gy) for gz in _geodesics(ball, vz)):
                for F, _ in items:
                    assert ball.level[vz] == ball.level[vy] + F[z]
                    checked += 1
    assert checked > 0


def test_free_group_automaton(f2):
    rep = build_automaton(f2, AutomatonParams(0, 8), build_ball(f2, 8))
    a = rep.automaton
    assert rep.ok and a.closure == CLOSED
    assert a.n_states == 3 and a.weights() == {Fraction(1)}
    assert predict_sphere_counts(a, 5) == [1, 4, 12, 36, 108, 324]
    assert rep.predicted[:9] == rep.bfs_spheres


def test_free_group_with_translation_types_has_more_states(f2):
    class TranslationOnly(FreeProductOracle):
        def frame_canonical(self, r, values):
            return b"T" + bytes(int(v) + 128 for v in values)

    rep = build_automaton(TranslationOnly(["inf", "inf"]), AutomatonParams(0, 8))
    assert rep.automaton.closure == CLOSED
    assert rep.automaton.n_states > 3
    assert predict_sphere_counts(rep.automaton, 6) == [1, 4, 12, 36, 108, 324, 972]


def test_surface_group_has_bigons(genus2):
    ball = build_ball(genus2, 5)
    assert any(len(ball.parents[v]) == 2 for v in range(len(ball)) if ball.level[v] == 4)
    rep = build_automaton(genus2, AutomatonParams(0, 7, exhaustive_radius=4), ball)
    assert rep.ok
    assert Fraction(1, 2) in rep.automaton.weights()
    assert all(w.numerator == 1 for w in rep.automaton.weights())


def test_cycle_automaton(cycle6):
    rep = build_automaton(cycle6, AutomatonParams(0, 4), build_ball(cycle6, 3))
    assert rep.automaton.closure == CLOSED
    assert rep.predicted == [1, 2, 2, 1, 0]
    assert not rep.violations


def test_short_exploration_is_truncated(t237):
    rep = build_automaton(t237, AutomatonParams(2, 12))
    assert rep.automaton.closure == TRUNCATED
    with pytest.raises(ValueError):
        build_automaton(t237, AutomatonParams(2, 6))


def test_too_small_delta_is_rejected_and_escalated(t237):
    ball = build_ball(t237, 12)
    for d in (0, 1):
        try:
            rep = build_automaton(t237, AutomatonParams(d, 20), ball)
        except TypeCollision as exc:
            assert exc.witness
        else:
            assert not rep.ok
    rep = fit_automaton(t237, 20, validation_radius=12)
    assert rep.ok and rep.automaton.delta == 2 and rep.automaton.n_states == 126


def test_quasitree_automaton(quasitree):
    rep = build_automaton(quasitree, AutomatonParams(0, 9, exhaustive_radius=4), build_ball(quasitree, 6))
    assert rep.ok
    assert rep.automaton.n_states == 17
    assert predict_sphere_counts(rep.automaton, 8) == [1] + [8 * 4 ** (n - 1) for n in range(1, 9)]


def test_non_integer_prediction_is_an_integrity_error():
    a = TournamentAutomaton([b"x", b"y"], [(0, 1, Fraction(1, 2), 1), (1, 1, Fraction(1), 1)], CLOSED, 0, 2)
    with pytest.raises(IntegrityError):
        predict_sphere_counts(a, 2)
    assert predict_sphere_counts(a, 2, strict=False) == [1, Fraction(1, 2), Fraction(1, 2)]


def test_automaton_text_and_dot(f2):
    a = build_automaton(f2, AutomatonParams(0, 8)).automaton
    back = TournamentAutomaton.from_text(a.to_text())
    assert back.states == a.states and back.edges == a.edges and back.closure == a.closure
    assert back.representatives == a.representatives and back.base_state == a.base_state
    assert a.to_text().startswith("format aut v1")
    dot = a.to_dot()
    assert dot.startswith("digraph") and dot.count("->") == len(a.edges)
    with pytest.raises(ValueError):
        TournamentAutomaton.from_text("format aut v1\nedge 0\n")


def test_build_is_deterministic(genus2):
    p = AutomatonParams(0, 6, exhaustive_radius=3)
    assert build_automaton(genus2, p).automaton.to_text() == build_automaton(genus2, p).automaton.to_text()
