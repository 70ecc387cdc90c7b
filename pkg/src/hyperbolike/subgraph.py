"""Induced-subgraph embedding counts.

Maps are counted individually: an embedding of Y into Z is an injective map
phi with phi(u) ~ phi(v) exactly when u ~ v. Dividing by |Aut(Y)| gives the
number of images, which is only done for reporting.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


@dataclass
class FiniteGraph:
    """Simple undirected graph on ``range(n)`` with optional names and anchor."""

    adjacency: list[list[int]]
    names: list[str] = field(default_factory=list)
    anchor: int | None = None

    def __post_init__(self):
        n = len(self.adjacency)
        if not self.names:
            self.names = [str(i) for i in range(n)]
        sets = [set(a) for a in self.adjacency]
        for v, nb in enumerate(sets):
            if v in nb:
                raise ValueError(f"loop at vertex {self.names[v]}")
            for u in nb:
                if not 0 <= u < n or v not in sets[u]:
                    raise ValueError(f"adjacency is not symmetric at {self.names[v]}")
        self.adjacency = [sorted(s) for s in sets]

    def __len__(self):
        return len(self.adjacency)

    @classmethod
    def from_edges(cls, n: int, edges, anchor=None) -> "FiniteGraph":
        adj = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        return cls([sorted(a) for a in adj], anchor=anchor)

    @classmethod
    def path(cls, n: int, anchor=None) -> "FiniteGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)], anchor)

    @classmethod
    def cycle(cls, n: int) -> "FiniteGraph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def is_connected(self) -> bool:
        if not self.adjacency:
            return False
        seen = {0}
        stack = [0]
        while stack:
            for u in self.adjacency[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self)

    def distances_from(self, s: int) -> list[int]:
        dist = [-1] * len(self)
        dist[s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for u in self.adjacency[v]:
                    if dist[u] < 0:
                        dist[u] = dist[v] + 1
                        nxt.append(u)
            frontier = nxt
        return dist

    def diameter(self) -> int:
        return max(max(self.distances_from(v)) for v in range(len(self)))


def _search_order(Y: FiniteGraph, first: int | None) -> list[int]:
    """Y's vertices ordered so each has as many earlier neighbors as possible."""
    n = len(Y)
    start = first if first is not None else max(range(n), key=lambda v: (len(Y.adjacency[v]), -v))
    order = [start]
    placed = {start}
    while len(order) < n:
        best = max(
            (v for v in range(n) if v not in placed),
            key=lambda v: (sum(u in placed for u in Y.adjacency[v]), len(Y.adjacency[v]), -v),
        )
        order.append(best)
        placed.add(best)
    return order


def iter_induced_embeddings(Y: FiniteGraph, Z: FiniteGraph, anchor_image: int | None = None):
    """Yield every induced embedding of Y into Z as a tuple indexed by Y vertex."""
    n = len(Y)
    if n == 0:
        yield ()
        return
    if n > len(Z):
        return
    if anchor_image is not None and Y.anchor is None:
        raise ValueError("anchor_image given but Y has no anchor")
    first = Y.anchor if anchor_image is not None else None
    order = _search_order(Y, first)
    ysets = [set(a) for a in Y.adjacency]
    zsets = [set(a) for a in Z.adjacency]
    ydeg = [len(a) for a in Y.adjacency]
    zdeg = [len(a) for a in Z.adjacency]
    # for each position: earlier positions that are Y-neighbors / non-neighbors
    back = []
    for i, v in enumerate(order):
        back.append(([order[j] for j in range(i) if order[j] in ysets[v]],
                     [order[j] for j in range(i) if order[j] not in ysets[v]]))
    phi = [-1] * n
    used = set()

    def extend(i):
        if i == n:
            yield tuple(phi)
            return
        v = order[i]
        nbrs, non = back[i]
        if nbrs:
            candidates = zsets[phi[nbrs[0]]]
        elif i == 0 and anchor_image is not None:
            candidates = (anchor_image,)
        else:
            candidates = range(len(Z))
        for w in candidates:
            if w in used or zdeg[w] < ydeg[v]:
                continue
            zw = zsets[w]
            if any(phi[u] not in zw for u in nbrs) or any(phi[u] in zw for u in non):
                continue
            phi[v] = w
            used.add(w)
            yield from extend(i + 1)
            used.discard(w)
            phi[v] = -1

    yield from extend(0)


def count_induced_embeddings(Y: FiniteGraph, Z: FiniteGraph, anchor_image: int | None = None) -> int:
    """Number of injective maps Y -> Z preserving adjacency and non-adjacency.

    >>> count_induced_embeddings(FiniteGraph.path(2), FiniteGraph.cycle(3))
    6
    """
    return sum(1 for _ in iter_induced_embeddings(Y, Z, anchor_image))


def enumerate_copies_by_depth(Y: FiniteGraph, ball, n: int) -> dict[int, int]:
    """Anchored embeddings of Y into X_n, sending Y's anchor to the basepoint,
    bucketed by the largest level they reach."""
    if Y.anchor is None:
        raise ValueError("Y needs an anchor vertex")
    if ball.radius < n:
        raise ValueError(f"ball radius {ball.radius} is smaller than n={n}")
    Z = ball.subgraph(n)
    depth = Counter()
    for phi in iter_induced_embeddings(Y, Z, anchor_image=0):
        depth[max(ball.level[w] for w in phi)] += 1
    return dict(sorted(depth.items()))
