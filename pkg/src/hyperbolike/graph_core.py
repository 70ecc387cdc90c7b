"""Finite balls around the basepoint of a graph oracle and the quantities
read off them: sphere sizes, dead ends, a hyperbolicity estimate and the
automorphism group order."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import refine
from .subgraph import FiniteGraph

log = logging.getLogger(__name__)


class BallConstructionError(RuntimeError):
    """The oracle failed while a ball was being built."""


class TooLargeError(RuntimeError):
    """A computation was refused because its input exceeds a configured cap."""


@dataclass(frozen=True)
class Ball:
    """The radius-R ball around ``base``.

    Vertices are indexed level by level, sorted by key within a level, so
    index 0 is the base and every prefix ``[0, offsets[n])`` is the ball of
    radius n.
    """

    base: str
    radius: int
    keys: tuple[str, ...]
    level: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]
    parents: tuple[tuple[int, ...], ...]
    children: tuple[tuple[int, ...], ...]
    # vertex has a neighbor outside the ball (only possible on the last level)
    exits: tuple[bool, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_index", {k: i for i, k in enumerate(self.keys)})

    def __len__(self):
        return len(self.keys)

    def index(self, key: str) -> int:
        return self._index[key]

    def __contains__(self, key) -> bool:
        return key in self._index

    @property
    def sphere_sizes(self) -> list[int]:
        return np.bincount(np.asarray(self.level, dtype=np.int64), minlength=self.radius + 1).tolist()

    @property
    def ball_sizes(self) -> list[int]:
        return list(itertools.accumulate(self.sphere_sizes))

    def size(self, n: int) -> int:
        """Number of vertices of level <= n."""
        return self.ball_sizes[n]

    def subgraph(self, n: int | None = None) -> FiniteGraph:
        """X_n as a FiniteGraph; vertex indices agree with the ball's."""
        m = len(self) if n is None else self.size(n)
        adj = [[u for u in self.adjacency[v] if u < m] for v in range(m)]
        return FiniteGraph(adj, names=list(self.keys[:m]), anchor=0)

    def distances_from(self, v: int) -> np.ndarray:
        """Distances inside the ball graph (exact X-distances only for pairs
        whose geodesics stay in the ball)."""
        dist = np.full(len(self), -1, dtype=np.int64)
        dist[v] = 0
        frontier = [v]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for w in frontier:
                for u in self.adjacency[w]:
                    if dist[u] < 0:
                        dist[u] = d
                        nxt.append(u)
            frontier = nxt
        return dist


def build_ball(oracle, R: int, check_degrees: bool | None = None) -> Ball:
    """Breadth-first closure of the oracle's base to depth R."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    base = oracle.base
    levels = [[base]]
    level_of = {base: 0}
    nbrs: dict[str, list[str]] = {}

    def neighbors(v):
        try:
            return oracle.neighbors(v)
        except Exception as exc:
            raise BallConstructionError(f"oracle failed at vertex {v!r}: {exc}") from exc

    for n in range(R):
        found = set()
        for v in levels[n]:
            nb = nbrs[v] = neighbors(v)
            for u in nb:
                if u not in level_of:
                    found.add(u)
        for u in found:
            level_of[u] = n + 1
        levels.append(sorted(found))
    for v in levels[R]:
        nbrs[v] = neighbors(v)

    keys = [k for lev in levels for k in lev]
    index = {k: i for i, k in enumerate(keys)}
    adjacency = []
    for k in keys:
        adjacency.append(tuple(sorted(index[u] for u in nbrs[k] if u in index)))
    level = [level_of[k] for k in keys]
    parents = tuple(tuple(u for u in adjacency[v] if level[u] == level[v] - 1) for v in range(len(keys)))
    children = tuple(tuple(u for u in adjacency[v] if level[u] == level[v] + 1) for v in range(len(keys)))
    exits = tuple(any(u not in index for u in nbrs[k]) for k in keys)
    ball = Ball(base, R, tuple(keys), tuple(level), tuple(adjacency), parents, children, exits)

    if check_degrees is None:
        check_degrees = getattr(oracle, "transitive", True)
    interior = [len(nbrs[k]) for k in keys if level_of[k] <= R - 1]
    if len(set(interior)) > 1:
        msg = f"interior degrees differ: {sorted(set(interior))}"
        if check_degrees:
            raise BallConstructionError(msg)
        log.warning("%s (symmetry unverified)", msg)
    return ball


@dataclass(frozen=True)
class DeadEndLevel:
    level: int
    sphere: int
    dead_ends: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.dead_ends, self.sphere) if self.sphere else Fraction(0)


@dataclass(frozen=True)
class DeadEndReport:
    levels: tuple[DeadEndLevel, ...]
    max_reliable_level: int
    witnesses: tuple[tuple[str, ...], ...] = ()

    def densities(self) -> list[Fraction]:
        return [lv.density for lv in self.levels]


def is_dead_end(ball: Ball, v: int) -> bool:
    """No neighbor one level further out.

    On the last sphere a neighbor outside the ball is necessarily one level
    further out, so the recorded boundary exits decide that level too.
    """
    return not ball.children[v] and not ball.exits[v]


def dead_end_census(ball: Ball, max_level: int | None = None) -> DeadEndReport:
    """Dead-end counts per level 0..max_level.

    The default stops at R - 1; the last sphere R may be requested
    explicitly since its neighbor lists are recorded when the ball is built.
    """
    top = ball.radius - 1 if max_level is None else max_level
    if top > ball.radius:
        raise ValueError(f"level {top} lies outside the radius-{ball.radius} ball")
    sizes = ball.sphere_sizes
    counts = [0] * (top + 1)
    witnesses: list[list[str]] = [[] for _ in range(top + 1)]
    for v in range(len(ball)):
        n = ball.level[v]
        if n <= top and is_dead_end(ball, v):
            counts[n] += 1
            witnesses[n].append(ball.keys[v])
    levels = tuple(DeadEndLevel(n, sizes[n], counts[n]) for n in range(top + 1))
    return DeadEndReport(levels, ball.radius - 1, tuple(tuple(w) for w in witnesses))


def dead_ends_by_definition(graph: FiniteGraph, base: int = 0) -> list[int]:
    """Vertices y with no z != y such that d(x,z) = d(x,y) + d(y,z).

    Brute force over all pairs; for small finite graphs only.
    """
    dx = graph.distances_from(base)
    out = []
    for y in range(len(graph)):
        dy = graph.distances_from(y)
        if not any(z != y and dx[z] == dx[y] + dy[z] for z in range(len(graph))):
            out.append(y)
    return out


def _triples(n: int, budget: int, seed: int):
    total = n * (n - 1) * (n - 2) // 6
    if budget >= total:
        yield from itertools.combinations(range(n), 3)
        return
    rng = np.random.default_rng(seed)
    # stratify by the first vertex so each prefix spreads over the ball
    for i in range(budget):
        a = i % n
        b, c = rng.choice(n - 1, size=2, replace=False)
        yield a, b + (b >= a), c + (c >= a)


def estimate_delta(ball: Ball, sample_budget: int, seed: int = 0) -> Fraction:
    """Largest four-point defect (S1 - S2) / 2 over sampled triples together
    with the base, using in-ball distances.

    The triples are a fixed seeded sequence, so a larger budget only adds
    samples and the estimate is nondecreasing in the budget. A full budget
    covers every triple.
    """
    if ball.radius < 2:
        raise ValueError("ball radius must be at least 2")
    if sample_budget <= 0:
        return Fraction(0)
    cache: dict[int, np.ndarray] = {}

    def dist(v):
        if v not in cache:
            cache[v] = ball.distances_from(v)
        return cache[v]

    best = 0
    d0 = dist(0)
    for a, b, c in _triples(len(ball), sample_budget, seed):
        da, db = dist(a), dist(b)
        sums = sorted((da[b] + d0[c], da[c] + d0[b], db[c] + d0[a]), reverse=True)
        best = max(best, int(sums[0] - sums[1]))
    return Fraction(best, 2)


def ball_automorphism_count(ball: Ball, n: int | None = None, cap: int = 2000) -> int:
    """|Aut(X_n)| for the finite graph X_n (the base is not required fixed)."""
    g = ball.subgraph(n)
    if len(g) > cap:
        raise TooLargeError(f"ball has {len(g)} vertices, cap is {cap}")
    return refine.automorphism_count(g.adjacency)


def parse_graph_text(text: str, allow_anchor: bool = True) -> tuple[FiniteGraph, int | None]:
    """Parse the explicit graph format.

    Lines are ``base <key>``, ``anchor <key>`` and ``edge <key1> <key2>``,
    with ``#`` comments and an optional ``format graph v1`` header.
    Returns the graph with names set to keys, and the base index if given.
    """
    names: dict[str, int] = {}
    edges = set()
    base = anchor = None

    def vid(k):
        if k not in names:
            names[k] = len(names)
        return names[k]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "format":
            if parts[1:] != ["graph", "v1"]:
                raise ValueError(f"line {lineno}: unsupported format header {line!r}")
        elif parts[0] == "base" and len(parts) == 2:
            if base is not None:
                raise ValueError(f"line {lineno}: base given twice")
            base = vid(parts[1])
        elif parts[0] == "anchor" and len(parts) == 2 and allow_anchor:
            anchor = vid(parts[1])
        elif parts[0] == "edge" and len(parts) == 3:
            u, v = vid(parts[1]), vid(parts[2])
            if u == v:
                raise ValueError(f"line {lineno}: loop at {parts[1]!r}")
            edges.add((min(u, v), max(u, v)))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw.strip()!r}")
    if not names:
        raise ValueError("graph file declares no vertices")
    adj = [set() for _ in names]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    g = FiniteGraph([sorted(a) for a in adj], names=list(names), anchor=anchor)
    return g, base


def read_graph_file(path, allow_anchor: bool = True):
    with open(path) as fh:
        try:
            return parse_graph_text(fh.read(), allow_anchor)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None
