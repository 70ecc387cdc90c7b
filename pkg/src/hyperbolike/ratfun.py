"""Exact rational generating functions.

Coefficient lists run from the constant term upward and hold Fractions.
Polynomial algebra (gcd, square-free and irreducible factorization, real
root isolation) is delegated to sympy over QQ; numeric pole locations come
from mpmath.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import sympy

_t = sympy.Symbol("t")


def _fr(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if hasattr(c, "numerator") and hasattr(c, "denominator"):
        num, den = c.numerator, c.denominator
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        return Fraction(int(num), int(den))
    return Fraction(c)


def _trim(c: Sequence) -> list[Fraction]:
    c = [_fr(x) for x in c]
    while c and c[-1] == 0:
        c.pop()
    return c


def to_poly(coeffs: Sequence) -> sympy.Poly:
    coeffs = _trim(coeffs)
    return sympy.Poly(list(reversed([sympy.Rational(x.numerator, x.denominator) for x in coeffs])) or [0], _t, domain="QQ")


def from_poly(p: sympy.Poly) -> list[Fraction]:
    return _trim(reversed([_fr(c) for c in p.all_coeffs()]))


def poly_mul(a, b) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_sub(a, b) -> list[Fraction]:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def poly_text(c: Sequence, var: str = "t") -> str:
    terms = []
    for i, x in enumerate(c):
        if x == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(x) == 1:
            terms.append(("-" if x < 0 else "+") + mono)
        else:
            terms.append(("-" if x < 0 else "+") + str(abs(x)) + ("*" + mono if mono else ""))
    if not terms:
        return "0"
    s = "".join(terms)
    return s[1:] if s.startswith("+") else s


@dataclass(frozen=True)
class RatFun:
    """num/den with gcd removed and den(0) = 1; analytic at 0."""

    num: tuple[Fraction, ...]
    den: tuple[Fraction, ...]

    def __init__(self, num: Sequence, den: Sequence = (1,)):
        n, d = _trim(num), _trim(den)
        if not d:
            raise ZeroDivisionError("zero denominator")
        if n:
            g = sympy.gcd(to_poly(n), to_poly(d))
            if g.degree() > 0:
                n = from_poly(sympy.div(to_poly(n), g)[0])
                d = from_poly(sympy.div(to_poly(d), g)[0])
        else:
            d = [Fraction(1)]
        # a remaining factor t in the denominator is a pole at 0
        if d[0] == 0:
            raise ValueError("rational function has a pole at 0")
        c = d[0]
        object.__setattr__(self, "num", tuple(x / c for x in n))
        object.__setattr__(self, "den", tuple(x / c for x in d))

    def __repr__(self):
        return f"RatFun(({poly_text(self.num)})/({poly_text(self.den)}))"

    def __str__(self):
        return f"({poly_text(self.num)})/({poly_text(self.den)})"

    def series(self, n_max: int) -> list[Fraction]:
        return series_expand(self, n_max)

    def __add__(self, other: "RatFun") -> "RatFun":
        return RatFun(poly_sub(poly_mul(self.num, other.den), [-x for x in poly_mul(other.num, self.den)]),
                      poly_mul(self.den, other.den))

    def __mul__(self, other: "RatFun") -> "RatFun":
        return RatFun(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    def __truediv__(self, other: "RatFun") -> "RatFun":
        return RatFun(poly_mul(self.num, other.den), poly_mul(self.den, other.num))

    def __eq__(self, other):
        return isinstance(other, RatFun) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def to_text(self) -> str:
        return "num: " + " ".join(map(str, self.num or [0])) + " / den: " + " ".join(map(str, self.den))

    @classmethod
    def from_text(cls, text: str) -> "RatFun":
        body = " ".join(line for line in text.splitlines() if not line.startswith("format"))
        try:
            left, right = body.split("/ den:")
            left = left.strip()
            if not left.startswith("num:"):
                raise ValueError
            return cls([Fraction(x) for x in left[4:].split()], [Fraction(x) for x in right.split()])
        except ValueError:
            raise ValueError(f"cannot parse rational function {text.strip()!r}") from None

    def to_json(self) -> dict:
        return {"num": [str(x) for x in self.num], "den": [str(x) for x in self.den], "text": str(self)}

    @classmethod
    def from_json(cls, obj: dict) -> "RatFun":
        return cls([Fraction(x) for x in obj["num"]], [Fraction(x) for x in obj["den"]])


def one_minus_t_power(j: int) -> list[Fraction]:
    out = [Fraction(1)]
    for _ in range(j):
        out = poly_mul(out, [Fraction(1), Fraction(-1)])
    return out


@dataclass(frozen=True)
class NoFit:
    reason: str

    def __bool__(self):
        return False


def berlekamp_massey(seq: Sequence[Fraction]) -> tuple[list[Fraction], int]:
    """Shortest connection polynomial C (C[0] = 1) and length L with
    sum_i C[i] a[n-i] = 0 for all L <= n < len(seq)."""
    s = [_fr(x) for x in seq]
    C, B = [Fraction(1)], [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n in range(len(s)):
        d = s[n] + sum((C[i] * s[n - i] for i in range(1, min(L, len(C) - 1) + 1)), Fraction(0))
        if d == 0:
            m += 1
            continue
        coef = d / b
        T = list(C)
        shifted = [Fraction(0)] * m + [coef * x for x in B]
        if len(shifted) > len(C):
            C = C + [Fraction(0)] * (len(shifted) - len(C))
        for i, x in enumerate(shifted):
            C[i] -= x
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    return _trim(C), L


def rational_from_recurrence(seq: Sequence, max_order: int, guard: int = 4):
    """Minimal rational function reproducing ``seq``, fitted on all but the
    last ``guard`` terms and verified on those. Returns NoFit on failure."""
    s = [_fr(x) for x in seq]
    if len(s) < 2 * max_order + guard:
        raise ValueError(f"need at least {2 * max_order + guard} terms, got {len(s)}")
    fit = s[: len(s) - guard] if guard else s
    C, L = berlekamp_massey(fit)
    if L > max_order:
        return NoFit(f"no recurrence of order <= {max_order} (linear complexity {L})")
    if 2 * L > len(fit):
        return NoFit(f"recurrence of order {L} is not determined by {len(fit)} terms")
    num = poly_mul(C, fit)[:L]
    f = RatFun(num, C)
    if series_expand(f, len(s) - 1) != s:
        return NoFit("fitted recurrence fails on the withheld guard terms")
    return f


def fit_with_denominator(seq: Sequence, den: Sequence, guard: int = 4):
    """RatFun num/den matching ``seq`` for a prescribed denominator, or NoFit."""
    s = [_fr(x) for x in seq]
    fit_len = len(s) - guard
    d = _trim(den)
    num = poly_mul(d, s[:fit_len])[: max(fit_len - len(d) + 1, 0)]
    if len(d) - 1 >= fit_len:
        return NoFit("denominator degree exceeds the fitting window")
    f = RatFun(num, d)
    if series_expand(f, len(s) - 1) != s:
        return NoFit("prescribed denominator does not reproduce the sequence")
    return f


def series_expand(f: RatFun, n_max: int) -> list[Fraction]:
    """Taylor coefficients 0..n_max of f (den(0) = 1)."""
    num, den = f.num, f.den
    out: list[Fraction] = []
    for n in range(n_max + 1):
        v = num[n] if n < len(num) else Fraction(0)
        for i in range(1, min(n, len(den) - 1) + 1):
            v -= den[i] * out[n - i]
        out.append(v)
    return out


def reversed_poly(den: Sequence) -> list[Fraction]:
    d = _trim(den)
    return list(reversed(d))


@dataclass(frozen=True)
class DominantRoot:
    """lambda, the largest positive root of the reversed denominator."""

    interval: tuple[Fraction, Fraction]
    value: mpmath.mpf
    simple: bool
    same_modulus_count: int
    tolerance: float
    minimal_factor: tuple[Fraction, ...]  # irreducible factor of the reversed denominator, low degree first

    @property
    def exact(self):
        """lambda as a Fraction when it is rational, else None."""
        if len(self.minimal_factor) == 2:
            return -self.minimal_factor[0] / self.minimal_factor[1]
        return None

    def __float__(self):
        return float(self.value)


def dominant_real_root(den: Sequence, precision: Fraction = Fraction(1, 10**30), tol: float = 1e-9) -> DominantRoot:
    d = _trim(den)
    if not d:
        raise ValueError("zero polynomial")
    rev = to_poly(reversed_poly(d))
    if rev.degree() < 1:
        raise ValueError("denominator is constant; no poles")
    # largest positive root of each irreducible factor, isolated exactly
    cands = []
    for f, e in rev.factor_list()[1]:
        if f.degree() < 1:
            continue
        ivs = [iv for iv, _ in f.intervals() if iv[1] > 0]
        if ivs:
            cands.append([f, e, max(ivs, key=lambda iv: iv[1])])
    if not cands:
        raise ValueError("reversed denominator has no positive real root")
    eps = sympy.Rational(1, 2)
    # distinct irreducible factors share no roots, so refining separates them
    while True:
        best = max(cands, key=lambda c: c[2][1])
        if all(c is best or c[2][1] < best[2][0] for c in cands):
            break
        eps /= 16
        for c in cands:
            if c[2][0] != c[2][1]:
                c[2] = c[0].refine_root(*c[2], eps=eps)
    fac, mult, (lo, hi) = best
    lo, hi = fac.refine_root(lo, hi, eps=sympy.Rational(precision.numerator, precision.denominator))
    lo, hi = _fr(lo), _fr(hi)
    mpmath.mp.dps = max(mpmath.mp.dps, 40)
    value = (mpmath.mpf(lo.numerator) / lo.denominator + mpmath.mpf(hi.numerator) / hi.denominator) / 2
    # numeric roots of the square-free part
    sqf = rev.sqf_part()
    roots = [r for r in mpmath.polyroots([mpmath.mpf(_fr(c).numerator) / _fr(c).denominator for c in sqf.all_coeffs()],
                                         maxsteps=400, extraprec=200)]
    count = sum(1 for r in roots if abs(abs(r) - value) <= tol * value)
    mono = from_poly(fac)
    mono = tuple(x / mono[-1] for x in mono)
    return DominantRoot((lo, hi), mpmath.mpf(value), mult == 1, count, tol, mono)


def _eval_mp(coeffs, x):
    v = mpmath.mpf(0)
    for c in reversed(coeffs):
        v = v * x + mpmath.mpf(c.numerator) / c.denominator
    return v


def polar_part_at_zero(b: RatFun, n: int) -> tuple[dict[int, Fraction], RatFun]:
    """Split b(t)/t^n into its polar part (exponent -> coefficient, exponents
    < 0) and the regular remainder."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    head = series_expand(b, n - 1) if n else []
    polar = {k - n: c for k, c in enumerate(head) if c != 0}
    rest = poly_sub(b.num, poly_mul(b.den, head))
    if any(rest[:n]):  # pragma: no cover
        raise ArithmeticError("polar split left low-order terms")
    return polar, RatFun(rest[n:], b.den)


@dataclass
class ExpPolyTerm:
    pole: mpmath.mpc
    multiplicity: int
    coefficients: list  # Pi(n) = sum_i coefficients[i] n^i
    factor: tuple[Fraction, ...]  # exact irreducible factor of the denominator containing the pole
    error: float

    @property
    def degree(self) -> int:
        return self.multiplicity - 1


@dataclass
class ExpPolyDecomposition:
    terms: list[ExpPolyTerm]
    n0: int
    max_residual: float
    coefficients: list[Fraction] = field(default_factory=list)

    def evaluate(self, n: int):
        return sum(sum(c * mpmath.mpf(n) ** i for i, c in enumerate(t.coefficients)) * t.pole ** (-n) for t in self.terms)


class DecompositionError(ArithmeticError):
    pass


def exp_poly_decompose(f: RatFun, precision: float = 1e-12, dps: int = 60) -> ExpPolyDecomposition:
    """f_n = sum_j Pi_j(n) alpha_j^(-n) for n >= n0, with deg Pi_j equal to
    the pole order minus one."""
    mpmath.mp.dps = max(mpmath.mp.dps, dps)
    den = to_poly(f.den)
    d = den.degree()
    n0 = max(0, len(f.num) - 1 - d + 1)
    if d == 0:
        coeffs = series_expand(f, n0 + 2)
        return ExpPolyDecomposition([], n0, 0.0, coeffs)
    terms_spec = []
    for fac, mult in den.factor_list()[1]:
        if fac.degree() < 1:
            continue
        fc = from_poly(fac)
        roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in reversed(fc)],
                                 maxsteps=500, extraprec=3 * dps)
        for r in roots:
            deriv = _eval_mp([c * i for i, c in enumerate(fc)][1:], r)
            err = float(abs(_eval_mp(fc, r)) / abs(deriv)) if deriv != 0 else float("inf")
            terms_spec.append((mpmath.mpc(r), mult, tuple(x / fc[-1] for x in fc), err))
    coeffs = series_expand(f, n0 + 2 * d)
    # solve for the Pi_j coefficients from d consecutive terms
    cols = []
    for pole, mult, _, _ in terms_spec:
        for i in range(mult):
            cols.append((pole, i))
    A = mpmath.matrix(d, d)
    rhs = mpmath.matrix(d, 1)
    for row in range(d):
        n = n0 + row
        for c, (pole, i) in enumerate(cols):
            A[row, c] = mpmath.mpf(n) ** i * pole ** (-n)
        rhs[row] = mpmath.mpf(coeffs[n].numerator) / coeffs[n].denominator
    try:
        cond = mpmath.cond(A)
        sol = mpmath.lu_solve(A, rhs)
    except ZeroDivisionError:
        raise DecompositionError("singular reconstruction system") from None
    terms = []
    c = 0
    for pole, mult, fac, err in terms_spec:
        terms.append(ExpPolyTerm(pole, mult, [sol[c + i] for i in range(mult)], fac, err))
        c += mult
    dec = ExpPolyDecomposition(terms, n0, 0.0, coeffs)
    resid = 0.0
    for n in range(n0, n0 + 2 * d + 1):
        exact = mpmath.mpf(coeffs[n].numerator) / coeffs[n].denominator
        resid = max(resid, float(abs(dec.evaluate(n) - exact) / max(1, abs(exact))))
    dec.max_residual = resid
    if resid > precision:
        raise DecompositionError(f"reconstruction residual {resid:.3g} exceeds {precision:g} (condition number {float(cond):.3g})")
    return dec


def ratfun_to_json(f) -> str:
    return json.dumps(f.to_json() if isinstance(f, RatFun) else {"nofit": f.reason}, sort_keys=True)
