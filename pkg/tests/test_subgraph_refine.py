import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from hyperbolike import FiniteGraph, build_ball, count_induced_embeddings, enumerate_copies_by_depth
from hyperbolike.refine import automorphism_count, canonical_form, find_isomorphism


def star(k):
    return FiniteGraph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def brute_embeddings(Y, Z, anchor_image=None):
    ey = {frozenset((u, v)) for u in range(len(Y)) for v in Y.adjacency[u]}
    ez = {frozenset((u, v)) for u in range(len(Z)) for v in Z.adjacency[u]}
    count = 0
    for phi in itertools.permutations(range(len(Z)), len(Y)):
        if anchor_image is not None and phi[Y.anchor] != anchor_image:
            continue
        if all((frozenset((phi[u], phi[v])) in ez) == (frozenset((u, v)) in ey)
               for u, v in itertools.combinations(range(len(Y)), 2)):
            count += 1
    return count


def test_small_embedding_counts():
    triangle = FiniteGraph.cycle(3)
    assert count_induced_embeddings(FiniteGraph.path(2), triangle) == 6
    assert count_induced_embeddings(FiniteGraph.path(3), triangle) == 0
    assert count_induced_embeddings(FiniteGraph.path(3), star(4)) == 12


def test_copies_by_depth(f2):
    ball = build_ball(f2, 3)
    assert enumerate_copies_by_depth(FiniteGraph.path(1, anchor=0), ball, 2) == {0: 1}
    assert enumerate_copies_by_depth(FiniteGraph.path(2, anchor=0), ball, 2) == {1: 4}
    assert enumerate_copies_by_depth(FiniteGraph.path(3, anchor=1), ball, 2) == {1: 12}
    Y = FiniteGraph.path(3, anchor=0)
    depths = enumerate_copies_by_depth(Y, ball, 3)
    assert depths == {2: 12}
    assert sum(depths.values()) == count_induced_embeddings(Y, ball.subgraph(3), anchor_image=0)
    with pytest.raises(ValueError):
        enumerate_copies_by_depth(FiniteGraph.path(2), ball, 2)
    with pytest.raises(ValueError):
        enumerate_copies_by_depth(Y, ball, 4)


@st.composite
def graphs(draw, min_n=1, max_n=6, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    edges = set(chosen)
    if connected:
        edges |= {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    return FiniteGraph.from_edges(n, sorted(edges))


@settings(max_examples=120, deadline=None)
@given(graphs(max_n=4, connected=True), graphs(max_n=7), st.randoms(use_true_random=False))
def test_counts_match_brute_force_and_relabeling(Y, Z, rnd):
    n = count_induced_embeddings(Y, Z)
    assert n == brute_embeddings(Y, Z)
    assert n % automorphism_count(Y.adjacency) == 0
    perm = list(range(len(Z)))
    rnd.shuffle(perm)
    Zp = FiniteGraph.from_edges(len(Z), [(perm[u], perm[v]) for u in range(len(Z)) for v in Z.adjacency[u] if u < v])
    assert count_induced_embeddings(Y, Zp) == n


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=4, connected=True), graphs(min_n=1, max_n=6))
def test_anchored_counts_match_brute_force(Y, Z):
    Y.anchor = 0
    for z in range(len(Z)):
        assert count_induced_embeddings(Y, Z, anchor_image=z) == brute_embeddings(Y, Z, anchor_image=z)


def brute_automorphisms(adj, colors=None):
    n = len(adj)
    colors = colors or [0] * n
    edges = {(u, v) for u in range(n) for v in adj[u]}
    return sum(1 for p in itertools.permutations(range(n))
               if all(colors[p[v]] == colors[v] for v in range(n))
               and all((p[u], p[v]) in edges for u, v in edges))


def test_known_automorphism_groups():
    assert automorphism_count(star(4).adjacency) == 24
    assert automorphism_count(FiniteGraph.cycle(6).adjacency) == 12
    petersen = FiniteGraph.from_edges(10, [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)]
                                      + [(5 + i, 5 + (i + 2) % 5) for i in range(5)])
    assert automorphism_count(petersen.adjacency) == 120


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=7), st.lists(st.integers(0, 1), min_size=7, max_size=7))
def test_automorphism_count_matches_brute_force(g, cols):
    colors = cols[: len(g)]
    assert automorphism_count(g.adjacency, colors) == brute_automorphisms(g.adjacency, colors)


def relabel(g, perm):
    return FiniteGraph.from_edges(len(g), [(perm[u], perm[v]) for u in range(len(g)) for v in g.adjacency[u] if u < v])


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=7), st.randoms(use_true_random=False))
def test_canonical_form_and_isomorphism_on_relabelings(g, rnd):
    perm = list(range(len(g)))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    colors = [len(a) % 2 for a in g.adjacency]
    hcolors = [0] * len(g)
    for v in range(len(g)):
        hcolors[perm[v]] = colors[v]
    assert canonical_form(g.adjacency, colors) == canonical_form(h.adjacency, hcolors)
    phi = find_isomorphism(g.adjacency, colors, h.adjacency, hcolors)
    assert phi is not None
    for v in range(len(g)):
        assert {phi[u] for u in g.adjacency[v]} == set(h.adjacency[phi[v]])


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=6), graphs(max_n=6))
def test_canonical_form_separates_non_isomorphic(g, h):
    same = len(g) == len(h) and any(
        all({p[u] for u in g.adjacency[v]} == set(h.adjacency[p[v]]) for v in range(len(g)))
        for p in itertools.permutations(range(len(g))))
    assert (canonical_form(g.adjacency, [0] * len(g)) == canonical_form(h.adjacency, [0] * len(h))) == same
    assert (find_isomorphism(g.adjacency, [0] * len(g), h.adjacency, [0] * len(h)) is not None) == same


def test_large_tree_isomorphism_search_is_not_recursive(f2):
    ball = build_ball(f2, 5)
    g = ball.subgraph()
    perm = list(range(len(g)))
    random.Random(0).shuffle(perm)
    h = relabel(g, perm)
    assert find_isomorphism(g.adjacency, [0] * len(g), h.adjacency, [0] * len(h)) is not None
