"""Graph oracles: lazy neighbor functions with canonical vertex names.

Every oracle also fixes a transitive family of symmetries and exposes it
through *frames*: ``to_frame(y, z)`` applies a chosen symmetry sending ``y``
to the base, and ``frame_canonical`` reduces a decorated ball around the base
modulo the base stabilizer inside the family. Two decorated balls are
equivalent exactly when their canonical forms agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import inf
from typing import Sequence

from . import refine
from .rewrite import Presentation, RewriteError, RewriteSystem, kb_complete

log = logging.getLogger(__name__)


class BackendError(ValueError):
    """Invalid configuration, foreign key, or a word outside the certified range."""


class GraphOracle:
    """Base class. Subclasses set ``base`` and implement ``neighbors``."""

    base: str = ""
    transitive = True
    has_frames = False
    # True when the map p -> to_frame(y, from_frame(from_frame(y, s), p)) does not depend on y
    frame_translation_invariant = False

    def neighbors(self, v: str) -> list[str]:
        raise NotImplementedError

    def distance(self, u: str, v: str) -> int:
        raise NotImplementedError

    def level(self, v: str) -> int:
        return self.distance(self.base, v)

    def ball_keys(self, center: str, r: int) -> list[str]:
        """Vertices within distance r of center, ordered by distance then key."""
        seen = {center}
        out = [center]
        frontier = [center]
        for _ in range(r):
            nxt = set()
            for v in frontier:
                for u in self.neighbors(v):
                    if u not in seen:
                        nxt.add(u)
            frontier = sorted(nxt)
            seen.update(frontier)
            out.extend(frontier)
        return out

    # frames
    def to_frame(self, y: str, z: str) -> str:
        raise NotImplementedError

    def from_frame(self, y: str, p: str) -> str:
        raise NotImplementedError

    def frame_points(self, r: int) -> list[str]:
        return self.ball_keys(self.base, r)

    def frame_canonical(self, r: int, values: Sequence[int]) -> bytes:
        raise NotImplementedError

    def canonical_decorated_ball(self, center: str, r: int, dec: dict) -> bytes:
        pts = self.frame_points(r)
        moved = {self.to_frame(center, z): v for z, v in dec.items()}
        if set(moved) != set(pts):
            raise BackendError(f"decoration does not cover exactly the radius-{r} ball around {center!r}")
        return self.frame_canonical(r, [moved[p] for p in pts])


def _tree_form(root, kids, label) -> tuple:
    """Canonical nested tuple of a rooted labelled tree (children sorted)."""
    def form(v):
        return (label(v), tuple(sorted(form(c) for c in kids.get(v, ()))))
    return form(root)


class CayleyOracle(GraphOracle):
    """Cayley graph of a group given by a shortlex rewriting system.

    Vertices are shortlex normal forms, edges are right multiplication by a
    generator, and the symmetry family is left translation. A system that is
    not confluent is accepted only with ``certified_length``: the largest L
    such that normalizing any word of length <= L is known to be exact (see
    ``certify.certify_normal_forms``). Longer words raise BackendError.
    """

    has_frames = True
    frame_translation_invariant = True

    def __init__(self, rs: RewriteSystem, certified_length: int | None = None):
        if not rs.is_confluent and certified_length is None:
            raise BackendError("Cayley backend needs a confluent rewriting system (or a certified length)")
        self.rs = rs
        self.base = ""
        self.certified_length = None if rs.is_confluent else certified_length
        self.generators = tuple(rs.alphabet)
        self._frame_cache: dict[int, list[str]] = {}

    def nf(self, word: str) -> str:
        if self.certified_length is not None and len(word) > self.certified_length:
            raise BackendError(
                f"word {word!r} (length {len(word)}) exceeds the certified normal-form length {self.certified_length}"
            )
        return self.rs.normalize(word)

    def check_key(self, v: str):
        if not isinstance(v, str) or set(v) - set(self.generators) or not self.rs.is_reduced(v):
            raise BackendError(f"{v!r} is not a vertex key of this Cayley graph")

    def neighbors(self, v: str) -> list[str]:
        self.check_key(v)
        return sorted({self.nf(v + s) for s in self.generators})

    def distance(self, u: str, v: str) -> int:
        # shortlex normal forms are geodesic words
        return len(self.nf(self.rs.invert(u) + v))

    def level(self, v: str) -> int:
        return len(v)

    def to_frame(self, y: str, z: str) -> str:
        return self.nf(self.rs.invert(y) + z)

    def from_frame(self, y: str, p: str) -> str:
        return self.nf(y + p)

    def frame_points(self, r: int) -> list[str]:
        if r not in self._frame_cache:
            self._frame_cache[r] = self.ball_keys(self.base, r)
        return self._frame_cache[r]

    def frame_canonical(self, r: int, values: Sequence[int]) -> bytes:
        return b"T" + bytes(int(v) + 128 for v in values)


class FreeProductOracle(CayleyOracle):
    """Free product of cyclic groups, one generator per factor.

    Factor order ``inf`` gives a free generator with a separate inverse
    symbol, order 2 an involution, order m a generator with relator g^m.
    When every factor has order 2 or inf the Cayley graph is a tree and the
    symmetry family is enlarged to all tree automorphisms, so types are
    compared up to rooted-tree isomorphism.
    """

    _LETTERS = "abcdefghijklmnopqrstuvwxyz"

    def __init__(self, orders: Sequence):
        orders = [inf if (o == inf or str(o).lower() in ("inf", "infinity", "oo")) else int(o) for o in orders]
        if not orders or len(orders) > 26:
            raise BackendError("need between 1 and 26 free factors")
        gens, rels = [], []
        for letter, o in zip(self._LETTERS, orders):
            if o == inf:
                gens.append((letter, letter.upper()))
            elif o == 2:
                gens.append((letter, letter))
                rels.append(letter * 2)
            elif o >= 3:
                gens.append((letter, letter.upper()))
                rels.append(letter * o)
            else:
                raise BackendError(f"factor order {o} must be >= 2 or inf")
        self.orders = tuple(orders)
        self.presentation = Presentation(tuple(gens), tuple(rels))
        rs = kb_complete(self.presentation)
        if not rs.is_confluent:
            raise BackendError("free product presentation failed to complete")
        super().__init__(rs)
        self.is_tree = all(o == inf or o == 2 for o in orders)

    def frame_canonical(self, r: int, values: Sequence[int]) -> bytes:
        if not self.is_tree:
            return super().frame_canonical(r, values)
        pts = self.frame_points(r)
        val = dict(zip(pts, values))
        kids: dict[str, list[str]] = {}
        for p in pts[1:]:
            kids.setdefault(p[:-1], []).append(p)
        return b"R" + repr(_tree_form("", kids, val.__getitem__)).encode()


class QuasiTreeOracle(GraphOracle):
    """The k-regular tree with a fixed end, plus an edge from every vertex to
    its grandparent (the parent being the neighbor towards the end).

    ``j:w`` names the vertex reached by climbing the base ray to r_j and then
    descending along the child word w over the digits 0..k-2. Child 0 of r_j
    is r_{j-1}, so keys are canonical once j is minimal. The symmetry family
    is the group of tree automorphisms fixing the end.
    """

    has_frames = True
    _DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"

    def __init__(self, k: int = 3):
        if not isinstance(k, int) or k < 3 or k - 1 > len(self._DIGITS):
            raise BackendError(f"quasi-tree needs a finite valence 3 <= k <= {len(self._DIGITS) + 1}")
        self.k = k
        self.digits = self._DIGITS[: k - 1]
        self.base = "0:"
        self._frame_cache: dict[int, list[str]] = {}

    # addresses
    @staticmethod
    def _canon(j: int, w: str) -> tuple[int, str]:
        while j >= 1 and w.startswith("0"):
            j -= 1
            w = w[1:]
        return j, w

    def parse(self, v: str) -> tuple[int, str]:
        try:
            js, w = v.split(":")
            j = int(js)
        except (AttributeError, ValueError):
            raise BackendError(f"{v!r} is not a quasi-tree key") from None
        if j < 0 or set(w) - set(self.digits) or (j >= 1 and w.startswith("0")) or js != str(j):
            raise BackendError(f"{v!r} is not a canonical quasi-tree key")
        return j, w

    @staticmethod
    def key(j: int, w: str) -> str:
        return f"{j}:{w}"

    def _key(self, j, w):
        return self.key(*self._canon(j, w))

    def _parent(self, j, w):
        return (j, w[:-1]) if w else (j + 1, "")

    def tree_parent(self, v: str) -> str:
        return self.key(*self._parent(*self.parse(v)))

    def tree_children(self, v: str) -> list[str]:
        j, w = self.parse(v)
        return [self._key(j, w + c) for c in self.digits]

    def neighbors(self, v: str) -> list[str]:
        j, w = self.parse(v)
        out = set()
        pj, pw = self._parent(j, w)
        out.add(self.key(pj, pw))
        out.add(self.key(*self._parent(pj, pw)))
        for c in self.digits:
            out.add(self._key(j, w + c))
            for d in self.digits:
                out.add(self._key(j, w + c + d))
        return sorted(out)

    def _lift(self, u, v):
        """Both addresses written below a common ray vertex r_J."""
        (j1, w1), (j2, w2) = u, v
        J = max(j1, j2)
        return J, "0" * (J - j1) + w1, "0" * (J - j2) + w2

    def distance(self, u: str, v: str) -> int:
        J, w1, w2 = self._lift(self.parse(u), self.parse(v))
        c = 0
        while c < min(len(w1), len(w2)) and w1[c] == w2[c]:
            c += 1
        a, b = len(w1) - c, len(w2) - c
        # climb to the meeting vertex and descend, two tree steps per shortcut
        return (a + 1) // 2 + (b + 1) // 2

    # frames: y's ancestor chain goes to the base ray, and at each chain vertex
    # the digit of the chain child is swapped with 0
    def _relative(self, y: tuple[int, str], z: tuple[int, str]):
        """(i, u, chain label at A_i) with z reached from y's ancestor A_i by u."""
        J, wy, wz = self._lift(y, z)
        c = 0
        while c < min(len(wy), len(wz)) and wy[c] == wz[c]:
            c += 1
        i = len(wy) - c
        label = wy[c] if i >= 1 else None
        return i, wz[c:], label

    @staticmethod
    def _swap(u: str, label: str | None) -> str:
        if not u or label is None:
            return u
        h = u[0]
        h = "0" if h == label else (label if h == "0" else h)
        return h + u[1:]

    def to_frame(self, y: str, z: str) -> str:
        i, u, label = self._relative(self.parse(y), self.parse(z))
        return self._key(i, self._swap(u, label))

    def from_frame(self, y: str, p: str) -> str:
        i, u = self.parse(p)
        jy, wy = self.parse(y)
        if i <= len(wy):
            aj, aw = jy, wy[: len(wy) - i]
            label = wy[len(wy) - i] if i >= 1 else None
        else:
            aj, aw = jy + i - len(wy), ""
            label = "0"
        return self._key(aj, aw + self._swap(u, label))

    def frame_points(self, r: int) -> list[str]:
        if r not in self._frame_cache:
            self._frame_cache[r] = self.ball_keys(self.base, r)
        return self._frame_cache[r]

    def frame_canonical(self, r: int, values: Sequence[int]) -> bytes:
        pts = self.frame_points(r)
        val = dict(zip(pts, values))
        kids: dict[str, list[str]] = {}
        top = None
        for p in pts:
            j, w = self.parse(p)
            if (j, w) == (2 * r, ""):
                top = p
            else:
                kids.setdefault(self.tree_parent(p), []).append(p)
        # ray vertices are fixed by every end-fixing symmetry of the base
        def label(p):
            j, w = self.parse(p)
            return (val[p], not w)
        return b"Q" + repr(_tree_form(top, kids, label)).encode()


class ExplicitOracle(GraphOracle):
    """A finite graph read from a file; the symmetry family is every
    isomorphism between decorated balls."""

    def __init__(self, graph, base: int | None = None, source: str = "<graph>"):
        from .subgraph import FiniteGraph  # noqa: F401

        self.graph = graph
        self.source = source
        self.names = list(graph.names)
        self._index = {k: i for i, k in enumerate(self.names)}
        self.base = self.names[base if base is not None else 0]
        self._dist = [graph.distances_from(v) for v in range(len(graph))]
        degrees = {len(a) for a in graph.adjacency}
        self.transitive = len(degrees) == 1 and graph.is_connected()
        if not self.transitive:
            log.warning("%s: graph is not regular and connected; symmetry unverified", source)
        self._autos = None

    @classmethod
    def from_file(cls, path) -> "ExplicitOracle":
        from .graph_core import read_graph_file

        g, base = read_graph_file(path, allow_anchor=False)
        return cls(g, base, source=str(path))

    def _idx(self, v):
        try:
            return self._index[v]
        except KeyError:
            raise BackendError(f"{v!r} is not a vertex of {self.source}") from None

    def neighbors(self, v: str) -> list[str]:
        return sorted(self.names[u] for u in self.graph.adjacency[self._idx(v)])

    def distance(self, u: str, v: str) -> int:
        d = self._dist[self._idx(u)][self._idx(v)]
        if d < 0:
            raise BackendError(f"{u!r} and {v!r} lie in different components")
        return d

    def canonical_decorated_ball(self, center: str, r: int, dec: dict) -> bytes:
        c = self._idx(center)
        members = [v for v in range(len(self.graph)) if 0 <= self._dist[c][v] <= r]
        if set(dec) != {self.names[v] for v in members}:
            raise BackendError(f"decoration does not cover exactly the radius-{r} ball around {center!r}")
        pos = {v: i for i, v in enumerate(members)}
        adj = [[pos[u] for u in self.graph.adjacency[v] if u in pos] for v in members]
        colors = [(dec[self.names[v]], v == c) for v in members]
        return b"E" + repr(refine.canonical_form(adj, colors)).encode()


@dataclass(frozen=True)
class BackendConfig:
    """kind is one of 'freeproduct', 'cayley', 'quasitree', 'explicit'."""

    kind: str
    orders: tuple = ()
    rewriting: RewriteSystem | None = None
    certified_length: int | None = None
    k: int = 3
    path: str | None = None


def make_oracle(cfg: BackendConfig) -> GraphOracle:
    kind = cfg.kind.lower()
    if kind == "freeproduct":
        return FreeProductOracle(cfg.orders)
    if kind == "cayley":
        if cfg.rewriting is None:
            raise BackendError("cayley backend needs a rewriting system")
        return CayleyOracle(cfg.rewriting, cfg.certified_length)
    if kind == "quasitree":
        return QuasiTreeOracle(cfg.k)
    if kind == "explicit":
        if not cfg.path:
            raise BackendError("explicit backend needs a graph file path")
        return ExplicitOracle.from_file(cfg.path)
    raise BackendError(f"unknown backend kind {cfg.kind!r}")


__all__ = [
    "BackendConfig", "BackendError", "CayleyOracle", "ExplicitOracle", "FreeProductOracle",
    "GraphOracle", "QuasiTreeOracle", "RewriteError", "make_oracle",
]
