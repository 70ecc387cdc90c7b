"""Exact faithful representations used to certify rewriting normal forms.

A truncated (non-confluent) rewriting system still solves the word problem
for short words if no two distinct irreducible words of length <= L
represent the same element. This module checks that condition exactly for
von Dyck groups <a, b | a^l, b^m, (ab)^n> through the Tits representation
of the (l, m, n) Coxeter triangle group, whose rotation subgroup is the von
Dyck group. Entries live in Z[2cos(pi/N)], with N the lcm of the exponents
larger than 3 (2cos(pi/2) and 2cos(pi/3) are integers), so all arithmetic
is integer arithmetic.
"""

from __future__ import annotations

from math import lcm

import sympy

from .rewrite import RewriteSystem


class CertificationError(RuntimeError):
    pass


class CyclotomicIntegers:
    """The ring Z[c] with c = 2cos(pi/N), elements stored as coefficient tuples."""

    def __init__(self, N: int):
        x = sympy.Symbol("x")
        mp = sympy.Poly(sympy.minimal_polynomial(2 * sympy.cos(sympy.pi / N), x), x)
        coeffs = [int(v) for v in mp.all_coeffs()]
        if coeffs[0] != 1:
            raise CertificationError("minimal polynomial of 2cos(pi/N) is not monic")
        self.N = N
        self.degree = len(coeffs) - 1
        # c^d = -(a_{d-1} c^{d-1} + ... + a_0)
        self._tail = [-v for v in reversed(coeffs[1:])]
        self.zero = (0,) * self.degree
        self.one = (1,) + (0,) * (self.degree - 1)

    def from_int(self, k: int):
        return (k,) + (0,) * (self.degree - 1)

    def two_cos(self, n: int):
        """2cos(pi/n) as a ring element; n must divide N unless n <= 3."""
        if n <= 3:
            return self.from_int({1: -2, 2: 0, 3: 1}[n])
        if self.N % n:
            raise CertificationError(f"{n} does not divide {self.N}")
        m = self.N // n
        # 2cos(j*t) satisfies T_{j+1} = c*T_j - T_{j-1}, c = 2cos(t)
        prev, cur = self.from_int(2), self.gen()
        for _ in range(m - 1):
            prev, cur = cur, self.sub(self.mul(self.gen(), cur), prev)
        return cur

    def gen(self):
        if self.degree == 1:
            # c is the integer root of x - r
            return (self._tail[0],)
        return (0, 1) + (0,) * (self.degree - 2)

    def add(self, u, v):
        return tuple(a + b for a, b in zip(u, v))

    def sub(self, u, v):
        return tuple(a - b for a, b in zip(u, v))

    def mul(self, u, v):
        d = self.degree
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    if b:
                        prod[i + j] += a * b
        for k in range(2 * d - 2, d - 1, -1):
            top = prod[k]
            if top:
                prod[k] = 0
                for i, t in enumerate(self._tail):
                    prod[k - d + i] += top * t
        return tuple(prod[:d])


class VonDyckRepresentation:
    """Faithful integer-matrix representation of <a, b | a^l, b^m, (ab)^n>.

    ``a`` maps to s1*s2, ``b`` to s2*s3 and the inverse of ``b`` to s3*s2,
    where s1, s2, s3 are the Tits reflections of the triangle group with
    Coxeter exponents m12 = l, m23 = m, m13 = n.
    """

    def __init__(self, l: int, m: int, n: int, symbols=("a", "b", "B")):
        if min(l, m, n) < 2:
            raise CertificationError("triangle exponents must be >= 2")
        self.exponents = (l, m, n)
        self.ring = R = CyclotomicIntegers(lcm(*[e for e in (l, m, n) if e > 3] or [1]))
        cm = {(0, 1): l, (1, 2): m, (0, 2): n}
        # reflection s_i: e_i -> -e_i, e_j -> e_j + 2cos(pi/m_ij) e_i
        refl = []
        for i in range(3):
            rows = [[R.from_int(1 if r == c else 0) for c in range(3)] for r in range(3)]
            rows[i][i] = R.from_int(-1)
            for j in range(3):
                if j != i:
                    rows[i][j] = R.two_cos(cm[tuple(sorted((i, j)))])
            refl.append(rows)
        self._refl = refl
        sa, sb, sB = symbols
        self.generators = {
            sa: self.matmul(refl[0], refl[1]),
            sb: self.matmul(refl[1], refl[2]),
        }
        if sB != sb:
            self.generators[sB] = self.matmul(refl[2], refl[1])
        self.identity = [[R.from_int(1 if r == c else 0) for c in range(3)] for r in range(3)]

    def matmul(self, X, Y):
        R = self.ring
        out = []
        for r in range(3):
            row = []
            for c in range(3):
                acc = R.zero
                for k in range(3):
                    acc = R.add(acc, R.mul(X[r][k], Y[k][c]))
                row.append(acc)
            out.append(row)
        return out

    def word(self, w: str):
        M = self.identity
        for s in w:
            M = self.matmul(M, self.generators[s])
        return M

    @staticmethod
    def key(M) -> tuple:
        return tuple(tuple(entry) for row in M for entry in row)


def certify_normal_forms(rs: RewriteSystem, rep: VonDyckRepresentation, max_length: int) -> int:
    """Largest L <= max_length such that irreducible words up to length L are
    pairwise distinct group elements.

    Every rule is first checked to hold in the representation. For a
    shortlex-reducing system the returned bound means ``rs.normalize`` is the
    exact shortlex normal form on all words of length <= L.
    """
    for lhs, rhs in rs.rules.items():
        if rep.key(rep.word(lhs)) != rep.key(rep.word(rhs)):
            raise CertificationError(f"rule {lhs} -> {rhs} fails in the representation")
    seen = {rep.key(rep.identity)}
    level = [("", rep.identity)]
    for length in range(1, max_length + 1):
        nxt = []
        for w, M in level:
            for s in rs.alphabet:
                u = w + s
                if rs.normalize(u) != u:
                    continue
                Mu = rep.matmul(M, rep.generators[s])
                k = rep.key(Mu)
                if k in seen:
                    return length - 1
                seen.add(k)
                nxt.append((u, Mu))
        level = nxt
    return max_length
