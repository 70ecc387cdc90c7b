"""Shortlex string rewriting and Knuth-Bendix completion.

Words are plain strings with one character per symbol. Every generator is
paired with a formal inverse; an involution is a symbol that is its own
inverse and contributes the rule ``aa -> ""`` instead of a pair of
free-reduction rules.

    >>> p = Presentation.from_text("gen a inv a\\ngen b inv B\\nrel bbb\\n")
    >>> rs = kb_complete(p)
    >>> rs.normalize("bb")
    'B'
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable

CONFLUENT = "Confluent"
BUDGET_EXHAUSTED = "BudgetExhausted"


class RewriteError(ValueError):
    """Malformed presentation, foreign symbol, or unusable rewriting system."""


@dataclass(frozen=True)
class Presentation:
    generators: tuple[tuple[str, str], ...]
    relators: tuple[str, ...] = ()

    def __post_init__(self):
        inverse = {}
        for g, gi in self.generators:
            if len(g) != 1 or len(gi) != 1:
                raise RewriteError(f"symbols must be single characters: {g!r}, {gi!r}")
            for s, t in ((g, gi), (gi, g)):
                if inverse.get(s, t) != t:
                    raise RewriteError(f"symbol {s!r} paired twice")
                inverse[s] = t
        for rel in self.relators:
            bad = set(rel) - set(inverse)
            if bad:
                raise RewriteError(f"relator {rel!r} uses undeclared symbols {sorted(bad)}")

    @property
    def alphabet(self) -> tuple[str, ...]:
        # generator order, each inverse right after its generator
        out = []
        for g, gi in self.generators:
            out.append(g)
            if gi != g:
                out.append(gi)
        return tuple(out)

    @property
    def inverse(self) -> dict[str, str]:
        inv = {}
        for g, gi in self.generators:
            inv[g] = gi
            inv[gi] = g
        return inv

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        gens, rels = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "format":
                if parts[1:] != ["presentation", "v1"]:
                    raise RewriteError(f"line {lineno}: unsupported format header {line!r}")
            elif parts[0] == "gen" and len(parts) == 4 and parts[2] == "inv":
                gens.append((parts[1], parts[3]))
            elif parts[0] == "gen" and len(parts) == 2:
                raise RewriteError(f"line {lineno}: generator {parts[1]!r} needs 'inv <symbol>'")
            elif parts[0] == "rel" and len(parts) == 2:
                rels.append(parts[1])
            else:
                raise RewriteError(f"line {lineno}: cannot parse {raw.strip()!r}")
        if not gens:
            raise RewriteError("presentation declares no generators")
        try:
            return cls(tuple(gens), tuple(rels))
        except RewriteError as exc:
            raise RewriteError(f"invalid presentation: {exc}") from None

    @classmethod
    def from_file(cls, path) -> "Presentation":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def to_text(self) -> str:
        lines = ["format presentation v1"]
        lines += [f"gen {g} inv {gi}" for g, gi in self.generators]
        lines += [f"rel {r}" for r in self.relators]
        return "\n".join(lines) + "\n"


def free_reduction_rules(p: Presentation) -> list[tuple[str, str]]:
    rules = []
    for g, gi in p.generators:
        rules.append((g + gi, ""))
        if gi != g:
            rules.append((gi + g, ""))
    return rules


class _Shortlex:
    def __init__(self, alphabet):
        self.rank = {s: i for i, s in enumerate(alphabet)}

    def key(self, w: str):
        return (len(w), [self.rank[c] for c in w])

    def orient(self, u: str, v: str) -> tuple[str, str]:
        return (u, v) if self.key(u) > self.key(v) else (v, u)


def _suffix_reduce(word: str, rules: dict[str, str], lengths: list[int]) -> str:
    # out stays irreducible, so a new redex can only end at its last symbol
    out: list[str] = []
    todo = list(reversed(word))
    while todo:
        out.append(todo.pop())
        n = len(out)
        for L in lengths:
            if L > n:
                break
            rhs = rules.get("".join(out[n - L:]))
            if rhs is not None:
                del out[n - L:]
                todo.extend(reversed(rhs))
                break
    return "".join(out)


def _overlaps(l1: str, l2: str) -> Iterable[tuple[str, int]]:
    """Words where a proper suffix of ``l1`` is a prefix of ``l2``."""
    for k in range(1, min(len(l1), len(l2))):
        if l1[-k:] == l2[:k]:
            yield l1 + l2[k:], k


@dataclass
class RewriteSystem:
    alphabet: tuple[str, ...]
    inverse: dict[str, str]
    rules: dict[str, str]
    status: str = CONFLUENT
    _goto: list = field(default=None, init=False, repr=False, compare=False)
    _match: list = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.rules = dict(sorted(self.rules.items(), key=lambda kv: _Shortlex(self.alphabet).key(kv[0])))
        self._build_index()

    @property
    def is_confluent(self) -> bool:
        return self.status == CONFLUENT

    def _build_index(self):
        # Aho-Corasick automaton over the left-hand sides
        goto: list[dict[str, int]] = [{}]
        terminal: list[str | None] = [None]
        for lhs in self.rules:
            s = 0
            for c in lhs:
                nxt = goto[s].get(c)
                if nxt is None:
                    goto.append({})
                    terminal.append(None)
                    nxt = goto[s][c] = len(goto) - 1
                s = nxt
            terminal[s] = lhs
        fail = [0] * len(goto)
        match = list(terminal)
        order = []
        queue = list(goto[0].values())
        for s in queue:
            fail[s] = 0
        head = 0
        while head < len(queue):
            s = queue[head]
            head += 1
            order.append(s)
            for c, t in goto[s].items():
                f = fail[s]
                while f and c not in goto[f]:
                    f = fail[f]
                nxt = goto[f].get(c, 0)
                fail[t] = nxt if nxt != t else 0
                queue.append(t)
        for s in order:
            if match[s] is None:
                match[s] = match[fail[s]]
        full = []
        for s in range(len(goto)):
            row = {}
            for c in self.alphabet:
                t = s
                while t and c not in goto[t]:
                    t = fail[t]
                row[c] = goto[t].get(c, 0)
            full.append(row)
        self._goto = full
        self._match = match

    def normalize(self, word: str) -> str:
        goto, match, rules = self._goto, self._match, self.rules
        out: list[str] = []
        states = [0]
        todo = list(reversed(word))
        while todo:
            c = todo.pop()
            try:
                s = goto[states[-1]][c]
            except KeyError:
                raise RewriteError(f"symbol {c!r} not in alphabet {''.join(self.alphabet)}") from None
            out.append(c)
            states.append(s)
            lhs = match[s]
            if lhs is not None:
                L = len(lhs)
                del out[-L:]
                del states[-L:]
                todo.extend(reversed(rules[lhs]))
        return "".join(out)

    def invert(self, word: str) -> str:
        inv = self.inverse
        try:
            return "".join(inv[c] for c in reversed(word))
        except KeyError as exc:
            raise RewriteError(f"symbol {exc.args[0]!r} not in alphabet") from None

    def is_reduced(self, word: str) -> bool:
        return self.normalize(word) == word

    def to_text(self) -> str:
        inv = " ".join(f"{s}={self.inverse[s]}" for s in self.alphabet)
        lines = [
            "format rws v1",
            "alphabet " + " ".join(self.alphabet),
            "inverse " + inv,
            f"status {self.status}",
        ]
        lines += [f"rule {lhs} -> {rhs}".rstrip() for lhs, rhs in self.rules.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RewriteSystem":
        alphabet = inverse = status = None
        rules = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, _, rest = line.partition(" ")
            if head == "format":
                if rest.split() != ["rws", "v1"]:
                    raise RewriteError(f"line {lineno}: unsupported format header {line!r}")
            elif head == "alphabet":
                alphabet = tuple(rest.split())
            elif head == "inverse":
                inverse = dict(item.split("=") for item in rest.split())
            elif head == "status":
                status = rest.strip()
            elif head == "rule":
                lhs, sep, rhs = rest.partition("->")
                if not sep:
                    raise RewriteError(f"line {lineno}: rule without '->'")
                rules[lhs.strip()] = rhs.strip()
            else:
                raise RewriteError(f"line {lineno}: cannot parse {line!r}")
        if alphabet is None or inverse is None or status not in (CONFLUENT, BUDGET_EXHAUSTED):
            raise RewriteError("rewriting dump is missing alphabet, inverse or status header")
        return cls(alphabet, inverse, rules, status)


def _interreduce(rules: dict[str, str], order: _Shortlex) -> dict[str, str]:
    changed = True
    while changed:
        changed = False
        for lhs in sorted(rules, key=order.key, reverse=True):
            others = {l: r for l, r in rules.items() if l != lhs}
            lengths = sorted({len(l) for l in others})
            if any(l in lhs for l in others):
                rhs = rules.pop(lhs)
                a = _suffix_reduce(lhs, others, lengths)
                b = _suffix_reduce(rhs, others, lengths)
                if a != b:
                    l2, r2 = order.orient(a, b)
                    rules[l2] = r2
                changed = True
                break
            new_rhs = _suffix_reduce(rules[lhs], others, lengths)
            if new_rhs != rules[lhs]:
                rules[lhs] = new_rhs
                changed = True
    return rules


def kb_complete(p: Presentation, max_rules: int = 500, max_len: int = 40) -> RewriteSystem:
    """Shortlex Knuth-Bendix completion.

    Pending equations are processed smallest first. Equations whose larger
    side exceeds ``max_len`` are dropped, and the run stops once the rule set
    would exceed ``max_rules``; either event yields a partial system with
    status ``BudgetExhausted``.
    """
    if max_rules <= 0 or max_len <= 0:
        raise ValueError("budgets must be positive")
    order = _Shortlex(p.alphabet)
    rules: dict[str, str] = {}
    lengths: list[int] = []
    pending: list = []
    counter = 0
    exhausted = False

    def push(u, v):
        nonlocal counter, exhausted
        u = _suffix_reduce(u, rules, lengths)
        v = _suffix_reduce(v, rules, lengths)
        if u == v:
            return
        lhs, rhs = order.orient(u, v)
        if len(lhs) > max_len:
            exhausted = True
            return
        counter += 1
        heapq.heappush(pending, (order.key(lhs), counter, lhs, rhs))

    for lhs, rhs in free_reduction_rules(p):
        push(lhs, rhs)
    for rel in p.relators:
        push(rel, "")

    while pending:
        _, _, u, v = heapq.heappop(pending)
        u = _suffix_reduce(u, rules, lengths)
        v = _suffix_reduce(v, rules, lengths)
        if u == v:
            continue
        lhs, rhs = order.orient(u, v)
        if len(rules) >= max_rules:
            exhausted = True
            break
        # retire rules made reducible by the new one
        for l, r in list(rules.items()):
            if lhs in l:
                del rules[l]
                counter += 1
                heapq.heappush(pending, (order.key(l), counter, l, r))
        rules[lhs] = rhs
        lengths = sorted({len(l) for l in rules})
        for l in list(rules):
            r = rules[l]
            nr = _suffix_reduce(r, rules, lengths)
            if nr != r:
                rules[l] = nr
        for l2, r2 in list(rules.items()):
            for w, k in _overlaps(lhs, l2):
                push(rhs + l2[k:], lhs[:-k] + r2)
            if l2 != lhs:
                for w, k in _overlaps(l2, lhs):
                    push(r2 + lhs[k:], l2[:-k] + rhs)

    rules = _interreduce(rules, order)
    rs = RewriteSystem(p.alphabet, p.inverse, rules, BUDGET_EXHAUSTED if exhausted else CONFLUENT)
    if not exhausted and check_local_confluence(rs):
        rs.status = BUDGET_EXHAUSTED
    return rs


def normalize(rs: RewriteSystem, w: str) -> str:
    return rs.normalize(w)


def check_local_confluence(rs: RewriteSystem) -> list[tuple[str, str, str]]:
    """Critical pairs whose two reducts normalize differently.

    Returns ``(overlap word, reduct 1 normal form, reduct 2 normal form)``
    triples; an empty list means the system is locally confluent.
    """
    bad = []
    items = list(rs.rules.items())
    for l1, r1 in items:
        for l2, r2 in items:
            for w, k in _overlaps(l1, l2):
                a = rs.normalize(r1 + l2[k:])
                b = rs.normalize(l1[:-k] + r2)
                if a != b:
                    bad.append((w, a, b))
            if l1 != l2:
                i = l1.find(l2)
                if i >= 0:
                    a = rs.normalize(r1)
                    b = rs.normalize(l1[:i] + r2 + l1[i + len(l2):])
                    if a != b:
                        bad.append((l1, a, b))
    return bad
