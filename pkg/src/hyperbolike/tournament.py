"""Tournaments and the weighted tournament-type automaton.

A tournament at y is an integer function F on the radius-r ball around y
with d(x,z) - d(x,y) <= F(z) <= d(y,z). Starting from F0(z) = d(x,z) at the
base, a child y' of y inherits

    F'(z') = min_z F(z) + d(z, z') - 1,

and y' has exactly #{z in B_2(y) : F(z) = 0, d(z, y') = 1} parents. The
automaton's states are tournaments up to the oracle's symmetry family; an
edge for each child carries weight 1/#parents, so that the weighted number of
paths of length n from the base state is the sphere size |X_{=n}|.
"""

from __future__ import annotations

import hashlib
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph_core import Ball, build_ball

log = logging.getLogger(__name__)

CLOSED = "Closed"
TRUNCATED = "Truncated"


class TypeCollision(RuntimeError):
    """Two vertices of one type have different outgoing transitions."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class IntegrityError(RuntimeError):
    """A quantity that must be a nonnegative integer or must match BFS did not."""


@dataclass(frozen=True)
class AutomatonParams:
    delta: int
    explore_radius: int
    # levels explored with every vertex and path weight (None: all of them)
    exhaustive_radius: int | None = None
    # beyond the exhaustive levels keep at most this many vertices per type and level
    reps_per_type: int = 4
    # levels on which the tournament bounds and same-type cone agreement are checked
    check_radius: int | None = None
    cone_depth: int = 3

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    @property
    def r(self) -> int:
        return max(2 * self.delta + 1, 2)


@dataclass
class Tournament:
    center: str
    radius: int
    values: dict

    def __getitem__(self, z):
        return self.values[z]


def local_ball(oracle, center: str, R: int) -> Ball:
    """Radius-R ball around an arbitrary center (distances inside are exact
    for pairs whose geodesics stay inside)."""

    class _Recentered:
        base = center
        transitive = getattr(oracle, "transitive", True)

        def neighbors(self, v):
            return oracle.neighbors(v)

    return build_ball(_Recentered(), R, check_degrees=False)


def initial_tournament(ball: Ball, params: AutomatonParams) -> Tournament:
    """F0(z) = d(x, z) on B_r(x)."""
    r = params.r
    if ball.radius < r:
        raise ValueError(f"ball radius {ball.radius} is smaller than the tournament radius {r}")
    return Tournament(ball.base, r, {ball.keys[i]: ball.level[i] for i in range(ball.size(r))})


def _fragment_distances(local: Ball, t: Tournament, child: str):
    r = t.radius
    if local.base != t.center:
        raise ValueError("local fragment must be centered at the tournament's center")
    if local.radius < 3 * r + 1:
        raise ValueError(f"local fragment radius {local.radius} < 3r+1 = {3 * r + 1}; distances would be unreliable")
    if child not in local or local.level[local.index(child)] != 1:
        raise ValueError(f"{child!r} is not a neighbor of {t.center!r}")
    src = [local.index(z) for z in t.values]
    dist = {z: local.distances_from(i) for z, i in zip(t.values, src)}
    dchild = local.distances_from(local.index(child))
    return dist, dchild


def transition(t: Tournament, child: str, local: Ball) -> Tournament:
    """F' on B_r(child) from F on B_r(center), with distances measured in a
    fragment of radius >= 3r+1 around the center."""
    dist, dchild = _fragment_distances(local, t, child)
    r = t.radius
    targets = [i for i in range(len(local)) if 0 <= dchild[i] <= r]
    vals = {}
    for j in targets:
        vals[local.keys[j]] = min(f + int(dist[z][j]) for z, f in t.values.items()) - 1
    return Tournament(child, r, vals)


def parent_count(t: Tournament, child: str, local: Ball) -> int:
    """#{z in B_2(center) : F(z) = 0 and d(z, child) = 1}."""
    dist, dchild = _fragment_distances(local, t, child)
    d0 = local.distances_from(0)
    return sum(1 for z, f in t.values.items() if f == 0 and d0[local.index(z)] <= 2 and dchild[local.index(z)] == 1)


# -- expansion engines --------------------------------------------------------

class _FrameSpace:
    """Tournaments stored as vectors over the frame ball B_r(base)."""

    def __init__(self, oracle, r: int, cone_depth: int):
        self.o = oracle
        self.r = r
        self.P = oracle.frame_points(r)
        self.P1 = oracle.frame_points(r + 1)
        self.pos1 = {p: i for i, p in enumerate(self.P1)}
        self.plevel = np.array([oracle.level(p) for p in self.P], dtype=np.int64)
        self.D = np.array([[oracle.distance(p, q) for q in self.P1] for p in self.P], dtype=np.int64)
        self.S = oracle.neighbors(oracle.base)
        self.sidx = [self.pos1[s] for s in self.S]
        self.Dn = self.D[:, self.sidx]
        self.b2 = self.plevel <= 2
        self._cols: dict[str, np.ndarray] = {}
        self.cone_r = max(r, cone_depth)
        self.cone_depth = cone_depth
        self.Pc = oracle.frame_points(self.cone_r)
        self.pos = {p: i for i, p in enumerate(self.P)}

    def initial(self):
        return self.o.base, self.plevel.copy()

    def _cols_for(self, y: str, s: str):
        if self.o.frame_translation_invariant:
            cols = self._cols.get(s)
            if cols is None:
                cols = self._cols[s] = np.array([self.pos1[self.o.from_frame(s, p)] for p in self.P])
            return cols
        yc = self.o.from_frame(y, s)
        return np.array([self.pos1[self.o.to_frame(y, self.o.from_frame(yc, p))] for p in self.P])

    def expand(self, y: str, F: np.ndarray):
        m = (F[:, None] + self.Dn).min(axis=0)
        out = []
        for k, s in enumerate(self.S):
            if m[k] != 1:
                continue
            cols = self._cols_for(y, s)
            Fc = (F[:, None] + self.D[:, cols]).min(axis=0) - 1
            pc = int(np.count_nonzero((F == 0) & self.b2 & (self.Dn[:, k] == 1)))
            out.append((self.o.from_frame(y, s), Fc, pc))
        return out

    def type_key(self, y, F) -> bytes:
        return self.o.frame_canonical(self.r, F.tolist())

    @staticmethod
    def fkey(F) -> bytes:
        return F.astype(np.int8).tobytes()

    def values(self, y, F) -> dict:
        return {self.o.from_frame(y, p): int(v) for p, v in zip(self.P, F)}

    def check_bounds(self, y, F, ly: int) -> list[str]:
        bad = []
        if F[0] != 0:
            bad.append(f"F({y!r}) = {F[0]} != 0")
        for p, v, dp in zip(self.P, F.tolist(), self.plevel.tolist()):
            lz = self.o.level(self.o.from_frame(y, p))
            if not (lz - ly <= v <= dp) or abs(v) > self.r:
                bad.append(f"bound fails at {y!r}, frame point {p!r}: {lz - ly} <= {v} <= {dp}")
        return bad

    def cone_key(self, y, F, ly: int) -> bytes:
        vals = []
        Fd = dict(zip(self.P, F.tolist()))
        for p in self.Pc:
            dp = self.o.level(p)
            inside = dp <= self.cone_depth and self.o.level(self.o.from_frame(y, p)) == ly + dp
            f = Fd.get(p, self.r + 1)
            vals.append((f + self.r + 1) * (self.cone_depth + 2) + (dp + 1 if inside else 0))
        return self.o.frame_canonical(self.cone_r, vals)


class _DictSpace:
    """Tournaments stored as dicts; for oracles without frames."""

    def __init__(self, oracle, r: int, cone_depth: int):
        self.o = oracle
        self.r = r
        self.cone_depth = cone_depth
        self._balls: dict[str, list[str]] = {}

    def _ball(self, y, r=None):
        r = self.r if r is None else r
        key = (y, r)
        if key not in self._balls:
            self._balls[key] = self.o.ball_keys(y, r)
        return self._balls[key]

    def initial(self):
        x = self.o.base
        return x, {z: self.o.distance(x, z) for z in self._ball(x)}

    def expand(self, y, F):
        d = self.o.distance
        out = []
        for yc in self.o.neighbors(y):
            if min(f + d(z, yc) for z, f in F.items()) != 1:
                continue
            Fc = {zc: min(f + d(z, zc) for z, f in F.items()) - 1 for zc in self._ball(yc)}
            pc = sum(1 for z, f in F.items() if f == 0 and d(y, z) <= 2 and d(z, yc) == 1)
            out.append((yc, Fc, pc))
        return out

    def type_key(self, y, F):
        return self.o.canonical_decorated_ball(y, self.r, F)

    @staticmethod
    def fkey(F):
        return tuple(sorted(F.items()))

    def values(self, y, F):
        return dict(F)

    def check_bounds(self, y, F, ly):
        bad = []
        if F[y] != 0:
            bad.append(f"F({y!r}) = {F[y]} != 0")
        for z, v in F.items():
            lz = self.o.level(z)
            if not (lz - ly <= v <= self.o.distance(y, z)) or abs(v) > self.r:
                bad.append(f"bound fails at {y!r}, point {z!r}")
        return bad

    def cone_key(self, y, F, ly):
        R = max(self.r, self.cone_depth)
        dec = {}
        for z in self._ball(y, R):
            dz = self.o.distance(y, z)
            inside = dz <= self.cone_depth and self.o.level(z) == ly + dz
            f = F.get(z, self.r + 1)
            dec[z] = (f + self.r + 1) * (self.cone_depth + 2) + (dz + 1 if inside else 0)
        return self.o.canonical_decorated_ball(y, R, dec)


# -- automaton ---------------------------------------------------------------

@dataclass
class TournamentAutomaton:
    states: list[bytes]
    edges: list[tuple[int, int, Fraction, int]]
    closure: str
    delta: int
    r: int
    representatives: list[str] = field(default_factory=list)
    rep_levels: list[int] = field(default_factory=list)
    base_state: int = 0

    @property
    def n_states(self) -> int:
        return len(self.states)

    def rows(self) -> list[dict[int, Fraction]]:
        """Sparse transfer matrix: rows[i][j] = summed weight of edges i -> j."""
        rows: list[dict[int, Fraction]] = [defaultdict(Fraction) for _ in self.states]
        for i, j, w, mult in self.edges:
            rows[i][j] += w * mult
        return [dict(r) for r in rows]

    def matrix(self) -> list[list[Fraction]]:
        n = len(self.states)
        M = [[Fraction(0)] * n for _ in range(n)]
        for i, row in enumerate(self.rows()):
            for j, w in row.items():
                M[i][j] = w
        return M

    def weights(self) -> set[Fraction]:
        return {w for _, _, w, _ in self.edges}

    def state_label(self, i: int) -> str:
        return hashlib.sha1(self.states[i]).hexdigest()[:10]

    def to_dot(self) -> str:
        lines = ["digraph tournament_types {"]
        for i in range(len(self.states)):
            lines.append(f'  s{i} [label="{self.state_label(i)}\\nlevel {self.rep_levels[i] if self.rep_levels else "?"}"];')
        for i, j, w, mult in self.edges:
            lines.append(f'  s{i} -> s{j} [label="{w} x{mult}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [
            "format aut v1",
            f"delta {self.delta}",
            f"radius {self.r}",
            f"closure {self.closure}",
            f"states {len(self.states)} base {self.base_state}",
        ]
        for i, s in enumerate(self.states):
            rep = self.representatives[i] if self.representatives else ""
            lvl = self.rep_levels[i] if self.rep_levels else -1
            lines.append(f"state {i} {s.hex()} level {lvl} rep {rep if rep else '-'}")
        for i, j, w, mult in self.edges:
            lines.append(f"edge {i} {j} {w} {mult}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TournamentAutomaton":
        head, states, reps, levels, edges = {}, [], [], [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            parts = raw.split()
            if not parts:
                continue
            tag = parts[0]
            try:
                if tag == "format":
                    if parts[1:] != ["aut", "v1"]:
                        raise ValueError("unsupported format header")
                elif tag in ("delta", "radius"):
                    head[tag] = int(parts[1])
                elif tag == "closure":
                    head[tag] = parts[1]
                elif tag == "states":
                    head["base"] = int(parts[3])
                elif tag == "state":
                    states.append(bytes.fromhex(parts[2]))
                    levels.append(int(parts[4]))
                    reps.append("" if parts[6] == "-" else parts[6])
                elif tag == "edge":
                    edges.append((int(parts[1]), int(parts[2]), Fraction(parts[3]), int(parts[4])))
                else:
                    raise ValueError(f"unknown line {raw!r}")
            except (IndexError, ValueError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(states, edges, head.get("closure", TRUNCATED), head.get("delta", 0), head.get("radius", 2),
                   reps, levels, head.get("base", 0))


@dataclass
class BuildReport:
    automaton: TournamentAutomaton
    violations: list[str]
    checked_vertices: int
    cone_pairs: int
    bfs_spheres: list[int]
    predicted: list[int]
    validated_up_to: int

    @property
    def ok(self) -> bool:
        return (not self.violations and self.automaton.closure == CLOSED
                and self.predicted[: self.validated_up_to + 1] == self.bfs_spheres[: self.validated_up_to + 1])


def predict_sphere_counts(a: TournamentAutomaton, n_max: int, strict: bool = True) -> list[int]:
    """iota M^n 1 for n = 0..n_max; each value must be a nonnegative integer."""
    if a.closure != CLOSED:
        log.warning("automaton is %s; predicted sphere counts are provisional", a.closure)
    rows = a.rows()
    vec = {a.base_state: Fraction(1)}
    out = []
    for n in range(n_max + 1):
        total = sum(vec.values(), Fraction(0))
        if total.denominator != 1 or total < 0:
            if strict:
                raise IntegrityError(f"iota M^{n} 1 = {total} is not a nonnegative integer")
        out.append(int(total) if total.denominator == 1 else total)
        nxt: dict[int, Fraction] = defaultdict(Fraction)
        for i, c in vec.items():
            for j, w in rows[i].items():
                nxt[j] += c * w
        vec = nxt
    return out


def build_automaton(oracle, params: AutomatonParams, validation: Ball | None = None) -> BuildReport:
    """Explore tournaments level by level and assemble the type automaton.

    Levels up to ``exhaustive_radius`` keep every (vertex, tournament) pair
    with its path weight; later levels keep ``reps_per_type`` pairs per type.
    When a validation ball is given, children, parent counts, tournament
    bounds, weight conservation and cone agreement are checked on it.
    Raises TypeCollision when one type has two different expansions.
    """
    r = params.r
    R = params.explore_radius
    if R < r + 2:
        raise ValueError(f"explore radius {R} must be at least r + 2 = {r + 2}")
    full_R = R if params.exhaustive_radius is None else min(params.exhaustive_radius, R)
    check_R = params.check_radius if params.check_radius is not None else (validation.radius - 1 if validation else -1)
    if validation is not None:
        check_R = min(check_R, validation.radius - 1)
    space = _FrameSpace(oracle, r, params.cone_depth) if getattr(oracle, "has_frames", False) \
        else _DictSpace(oracle, r, params.cone_depth)

    states: list[bytes] = []
    state_of: dict[bytes, int] = {}
    signature: dict[int, tuple] = {}
    sig_owner: dict[int, str] = {}
    reps: list[str] = []
    rep_levels: list[int] = []
    edges: list[tuple[int, int, Fraction, int]] = []
    expanded: set[int] = set()
    cone_ref: dict[int, tuple[str, bytes]] = {}
    violations: list[str] = []
    cone_pairs = 0
    checked = 0

    def state(tk, y, n):
        if tk not in state_of:
            state_of[tk] = len(states)
            states.append(tk)
            reps.append(y)
            rep_levels.append(n)
        return state_of[tk]

    y0, F0 = space.initial()
    items = {(y0, space.fkey(F0)): [y0, F0, Fraction(1), state(space.type_key(y0, F0), y0, 0)]}
    for n in range(R):
        keep = sorted(items.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        if n > full_R:
            per_type: dict[int, int] = defaultdict(int)
            chosen = []
            for key, it in keep:
                if per_type[it[3]] < params.reps_per_type:
                    per_type[it[3]] += 1
                    chosen.append((key, it))
            keep = chosen
        nxt: dict = {}
        mass_in: dict[str, Fraction] = defaultdict(Fraction)
        for _, (y, F, mass, s) in keep:
            kids = space.expand(y, F)
            targets = []
            for yc, Fc, pc in kids:
                if pc < 1:
                    violations.append(f"child {yc!r} of {y!r} has parent count {pc}")
                    pc = 1
                t = state(space.type_key(yc, Fc), yc, n + 1)
                targets.append((t, Fraction(1, pc)))
                k = (yc, space.fkey(Fc))
                if k not in nxt:
                    nxt[k] = [yc, Fc, Fraction(0), t]
                nxt[k][2] += mass / pc
                mass_in[yc] += mass / pc
            sig = tuple(sorted(targets))
            if s in signature:
                if signature[s] != sig:
                    raise TypeCollision(
                        f"type {s} expands differently at {sig_owner[s]!r} and {y!r}; delta too small or canonical form unsound",
                        witness=(sig_owner[s], y),
                    )
            else:
                signature[s] = sig
                sig_owner[s] = y
                expanded.add(s)
                counts: dict[tuple[int, Fraction], int] = defaultdict(int)
                for t, w in targets:
                    counts[(t, w)] += 1
                for (t, w), mult in sorted(counts.items()):
                    edges.append((s, t, w, mult))

            if validation is not None and n <= check_R and y in validation:
                checked += 1
                vi = validation.index(y)
                if validation.level[vi] != n:
                    violations.append(f"{y!r} explored at level {n}, BFS level {validation.level[vi]}")
                bfs_kids = sorted(validation.keys[c] for c in validation.children[vi])
                if sorted(yc for yc, _, _ in kids) != bfs_kids:
                    violations.append(f"children of {y!r} disagree with BFS")
                for yc, _, pc in kids:
                    if yc in validation and len(validation.parents[validation.index(yc)]) != pc:
                        violations.append(f"parent count of {yc!r} is {pc}, BFS has {len(validation.parents[validation.index(yc)])}")
                violations.extend(space.check_bounds(y, F, n))
            if n <= check_R:
                ck = space.cone_key(y, F, n)
                if s in cone_ref:
                    cone_pairs += 1
                    if cone_ref[s][1] != ck:
                        violations.append(f"cones of same-type vertices {cone_ref[s][0]!r} and {y!r} do not match")
                else:
                    cone_ref[s] = (y, ck)
        if n < full_R:
            for yc, m in mass_in.items():
                if m != 1:
                    violations.append(f"incoming path weight at {yc!r} is {m}, expected 1")
        items = nxt

    closure = CLOSED if len(expanded) == len(states) else TRUNCATED
    aut = TournamentAutomaton(states, edges, closure, params.delta, r, reps, rep_levels)
    predicted = predict_sphere_counts(aut, R, strict=False)
    for n, v in enumerate(predicted):
        if not isinstance(v, int) or v < 0:
            violations.append(f"iota M^{n} 1 = {v} is not a nonnegative integer")
            break
    bfs = validation.sphere_sizes if validation is not None else []
    upto = min(R - r - 1, validation.radius) if validation is not None else -1
    if validation is not None and predicted[: upto + 1] != bfs[: upto + 1]:
        violations.append(f"predicted spheres {predicted[: upto + 1]} differ from BFS {bfs[: upto + 1]}")
    return BuildReport(aut, violations, checked, cone_pairs, bfs, predicted, upto)


def fit_automaton(oracle, explore_radius: int, delta="auto", max_delta: int = 4,
                  validation_radius: int | None = None, **kw) -> BuildReport:
    """Build the automaton, escalating delta = 0, 1, 2, ... when delta='auto'.

    A delta is accepted when the build raises no TypeCollision, closes,
    records no violation and predicts the BFS spheres on the validation
    range. This certifies nothing about the true hyperbolicity constant.
    """
    vr = explore_radius if validation_radius is None else validation_radius
    validation = build_ball(oracle, vr, check_degrees=getattr(oracle, "transitive", True))
    deltas = range(max_delta + 1) if delta == "auto" else [int(delta)]
    last = None
    for d in deltas:
        params = AutomatonParams(d, explore_radius, **kw)
        if explore_radius < params.r + 2:
            break
        try:
            rep = build_automaton(oracle, params, validation)
        except TypeCollision as exc:
            log.info("delta=%d: %s", d, exc)
            last = exc
            continue
        if rep.ok or delta != "auto":
            return rep
        log.info("delta=%d rejected: closure %s, %d violations", d, rep.automaton.closure, len(rep.violations))
        last = rep
    if isinstance(last, TypeCollision):
        raise last
    if last is None:
        raise ValueError("explore radius too small for any delta")
    return last
