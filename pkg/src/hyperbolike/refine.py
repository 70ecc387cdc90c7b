"""Color refinement, isomorphism search and automorphism counting for small
finite graphs given as adjacency lists over ``range(n)``."""

from __future__ import annotations

from typing import Sequence

Adjacency = Sequence[Sequence[int]]


def refine(adj: Adjacency, colors: Sequence) -> list[int]:
    """Equitable refinement of an initial coloring.

    Colors are relabelled by sorted signature at every round, so two graphs
    refined inside one disjoint union receive comparable labels.
    """
    palette = sorted(set(colors))
    cur = [palette.index(c) for c in colors] if len(palette) < 64 else _relabel(colors)
    while True:
        sigs = [(cur[v], tuple(sorted(cur[u] for u in adj[v]))) for v in range(len(adj))]
        nxt = _relabel(sigs)
        if max(nxt, default=-1) == max(cur, default=-1):
            return nxt
        cur = nxt


def _relabel(items) -> list[int]:
    index = {s: i for i, s in enumerate(sorted(set(items)))}
    return [index[s] for s in items]


def _union(adj1: Adjacency, adj2: Adjacency) -> list[list[int]]:
    n1 = len(adj1)
    return [list(a) for a in adj1] + [[u + n1 for u in a] for a in adj2]


def find_isomorphism(adj1: Adjacency, col1: Sequence, adj2: Adjacency, col2: Sequence) -> list[int] | None:
    """A color-preserving isomorphism ``adj1 -> adj2`` as a list, or None."""
    n = len(adj1)
    if n != len(adj2):
        return None
    union = _union(adj1, adj2)
    sets1 = [set(a) for a in adj1]
    sets2 = [set(a) for a in adj2]

    # depth-first over individualizations with an explicit stack; the depth
    # can reach the number of leaves of a large tree
    stack = [list(col1) + list(col2)]
    while stack:
        c = refine(union, stack.pop())
        left, right = c[:n], c[n:]
        if sorted(left) != sorted(right):
            continue
        cells: dict[int, list[int]] = {}
        for v, col in enumerate(left):
            cells.setdefault(col, []).append(v)
        target = None
        for col, members in sorted(cells.items(), key=lambda kv: (len(kv[1]), kv[0])):
            if len(members) > 1:
                target = col
                break
        if target is None:
            where = {col: v for v, col in enumerate(right)}
            phi = [where[left[v]] for v in range(n)]
            if all({phi[u] for u in sets1[v]} == sets2[phi[v]] for v in range(n)):
                return phi
            continue
        v = cells[target][0]
        fresh = max(c) + 1
        for w in reversed([i for i, col in enumerate(right) if col == target]):
            trial = list(c)
            trial[v] = fresh
            trial[n + w] = fresh
            stack.append(trial)
    return None


def automorphism_count(adj: Adjacency, colors: Sequence | None = None) -> int:
    """Order of the color-preserving automorphism group, by orbit-stabilizer.

    Vertices are fixed one at a time; the orbit of each under the pointwise
    stabilizer of the earlier ones is found by testing which candidates in its
    refined cell admit an automorphism.
    """
    n = len(adj)
    base = list(colors) if colors is not None else [0] * n
    order = 1
    while True:
        c = refine(adj, base)
        cells: dict[int, list[int]] = {}
        for v, col in enumerate(c):
            cells.setdefault(col, []).append(v)
        big = [m for m in cells.values() if len(m) > 1]
        if not big:
            return order
        members = min(big, key=lambda m: (len(m), m))
        v = members[0]
        fresh = max(c) + 1
        src = list(c)
        src[v] = fresh
        orbit = 1
        for w in members[1:]:
            dst = list(c)
            dst[w] = fresh
            if find_isomorphism(adj, src, adj, dst) is not None:
                orbit += 1
        order *= orbit
        base = src


def canonical_form(adj: Adjacency, colors: Sequence, leaf_cap: int = 20000) -> tuple:
    """Lexicographically least (colors, edges) certificate over the
    individualization-refinement search tree.

    Two colored graphs get equal certificates iff they are isomorphic.
    """
    n = len(adj)
    best = None
    leaves = 0

    def search(c):
        nonlocal best, leaves
        c = refine(adj, c)
        cells: dict[int, list[int]] = {}
        for v, col in enumerate(c):
            cells.setdefault(col, []).append(v)
        big = [col for col, m in cells.items() if len(m) > 1]
        if not big:
            leaves += 1
            if leaves > leaf_cap:
                raise RuntimeError("canonical labeling exceeded its search budget")
            cert = (
                tuple(sorted((c[v], colors[v]) for v in range(n))),
                tuple(sorted(tuple(sorted((c[u], c[v]))) for v in range(n) for u in adj[v] if u < v)),
            )
            if best is None or cert < best:
                best = cert
            return
        target = min(big, key=lambda col: (len(cells[col]), col))
        fresh = max(c) + 1
        for v in cells[target]:
            trial = list(c)
            trial[v] = fresh
            search(trial)

    search(_relabel(colors))
    return best
