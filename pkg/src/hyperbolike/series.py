"""Growth series, subgraph series, growth-rate checks and the accumulation
set of opposite series."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import mpmath

from . import ratfun as rf
from .graph_core import Ball, ball_automorphism_count
from .ratfun import NoFit, RatFun
from .subgraph import FiniteGraph, count_induced_embeddings, iter_induced_embeddings
from .tournament import CLOSED, IntegrityError, TournamentAutomaton, predict_sphere_counts

log = logging.getLogger(__name__)

ONE_MINUS_T = RatFun([1, -1])


def sphere_and_ball_series(a: TournamentAutomaton, bfs_spheres: Sequence[int] | None = None,
                           guard: int = 4) -> tuple[RatFun, RatFun]:
    """Sphere series sum_n (iota M^n 1) t^n fitted from 2d+1+guard exact
    Krylov terms, and the ball series sphere/(1-t)."""
    if a.closure != CLOSED:
        raise IntegrityError("automaton is not closed; its series would be provisional")
    d = a.n_states
    terms = predict_sphere_counts(a, 2 * d + 1 + guard)
    sphere = rf.rational_from_recurrence(terms, d + 1, guard)
    if not sphere:
        raise IntegrityError(f"Krylov sequence did not fit: {sphere.reason}")
    if bfs_spheres is not None:
        got = rf.series_expand(sphere, len(bfs_spheres) - 1)
        if got != [Fraction(x) for x in bfs_spheres]:
            raise IntegrityError(f"sphere series {got} disagrees with BFS {list(bfs_spheres)}")
    return sphere, sphere / ONE_MINUS_T


def ball_subgraph_series_formula(ball_series: RatFun, ball: Ball, n: int, check_up_to: int | None = None,
                                 cap: int = 2000, check_cap: int = 5000) -> RatFun:
    """b_{X_n}(t) = |Aut(X_n)| * t^n * b_x(t).

    Every induced copy of X_n in X_m is a ball X_n(y) with y in X_{m-n}, and
    each one is hit by |Aut(X_n)| maps, so the coefficient of t^m is
    |Aut(X_n)| * |X_{m-n}|. When ``check_up_to`` is given, the coefficients for n <= m <= check_up_to with |X_m| <= check_cap are
    compared with brute-force counts.
    """
    if n > ball.radius:
        raise ValueError(f"n={n} exceeds the ball radius {ball.radius}")
    aut = ball_automorphism_count(ball, n, cap)
    out = RatFun([0] * n + [aut * c for c in ball_series.num], ball_series.den)
    if check_up_to is not None:
        coeffs = rf.series_expand(out, check_up_to)
        Y = ball.subgraph(n)
        for m in range(n, min(check_up_to, ball.radius) + 1):
            if ball.size(m) > check_cap:
                break
            brute = count_induced_embeddings(Y, ball.subgraph(m))
            if brute != coeffs[m]:
                raise IntegrityError(f"(X_{n}|X_{m}) is {brute} by enumeration, formula gives {coeffs[m]}")
    return out


def subgraph_counts(Y: FiniteGraph, ball: Ball) -> list[int]:
    """(Y|X_n) for n = 0..R from one enumeration in X_R."""
    if not Y.is_connected():
        raise ValueError("Y must be connected")
    hist = [0] * (ball.radius + 1)
    level = ball.level
    for phi in iter_induced_embeddings(Y, ball.subgraph()):
        hist[max(level[w] for w in phi)] += 1
    out, acc = [], 0
    for h in hist:
        acc += h
        out.append(acc)
    return out


def subgraph_series(Y: FiniteGraph, ball: Ball, sphere: RatFun | None = None, guard: int = 4,
                    max_powers: int = 3):
    """Exact counts (Y|X_n), n <= R, and a rational function fitted to them
    (NoFit when neither minimal-recurrence fitting nor any candidate
    denominator sphere_den * (1-t)^j reproduces the withheld terms)."""
    if ball.radius < Y.diameter() + 2:
        raise ValueError("ball radius must be at least diameter(Y) + 2")
    counts = subgraph_counts(Y, ball)
    max_order = (len(counts) - guard) // 2
    fitted = rf.rational_from_recurrence(counts, max_order, guard)
    if not fitted and sphere is not None:
        for j in range(max_powers + 1):
            cand = rf.fit_with_denominator(counts, rf.poly_mul(list(sphere.den), rf.one_minus_t_power(j)), guard)
            if cand:
                fitted = cand
                break
    return counts, fitted


@dataclass
class GrowthReport:
    root: rf.DominantRoot
    ratio_window: tuple[float, float]
    early_window: tuple[float, float]
    late_window: tuple[float, float]
    polynomial_factor_suspected: bool
    flags: list[str] = field(default_factory=list)

    @property
    def lam(self):
        return self.root.value

    @property
    def simple(self) -> bool:
        return self.root.simple


def _window(ratios, lo, hi):
    vals = [ratios[n] for n in range(lo, hi + 1) if n in ratios]
    return (min(vals), max(vals)) if vals else (float("nan"), float("nan"))


def growth_rate_check(sphere: RatFun, ball_counts: Sequence[int]) -> GrowthReport:
    """lambda from the sphere denominator and the window of |X_n| / lambda^n."""
    root = rf.dominant_real_root(sphere.den)
    flags = []
    if not root.simple:
        flags.append("dominant pole is not simple")
    if root.value <= 1:
        flags.append("lambda <= 1: elementary growth")
    R = len(ball_counts) - 1
    ratios = {n: float(mpmath.mpf(ball_counts[n]) / root.value ** n) for n in range(1, R + 1)}
    whole = _window(ratios, 1, R)
    early = _window(ratios, max(1, R // 4), max(1, R // 2))
    late = _window(ratios, max(1, R // 2), R)
    # a factor n^k scales the ratios by n^k, so max - min keeps growing
    width = lambda w: w[1] - w[0]
    suspected = width(late) > width(early) + 1e-9 * late[1]
    if suspected:
        flags.append("ratio window widens with n: polynomial factor suspected")
    return GrowthReport(root, whole, early, late, suspected, flags)


def saito_hypothesis_check(coeffs: Sequence) -> tuple[bool, Fraction | None, Fraction | None]:
    """Exact min and max of a_{n-1}/a_n over the window; ok is False if some
    a_n vanishes."""
    a = [Fraction(x) for x in coeffs]
    if any(x == 0 for x in a):
        return False, None, None
    ratios = [a[n - 1] / a[n] for n in range(1, len(a))]
    if not ratios:
        return True, None, None
    return True, min(ratios), max(ratios)


@dataclass
class OmegaResult:
    N: int | None
    limits: list[list]  # one K-vector per residue class n mod N
    distinct: int
    method: str
    status: str = "ok"
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "limits": [[str(c) if isinstance(c, Fraction) else float(c) for c in lim] for lim in self.limits],
            "distinct": self.distinct,
            "method": self.method,
            "status": self.status,
        }


def opposite_poly(a: Sequence[Fraction], n: int, K: int) -> list[Fraction]:
    """Coefficients of s^k, k <= K, of X_n = sum_k (a_{n-k}/a_n) s^k."""
    return [a[n - k] / a[n] if k <= n else Fraction(0) for k in range(K + 1)]


def _merge(limits, tol):
    reps = []
    for lim in limits:
        if not any(max(abs(float(x) - float(y)) for x, y in zip(lim, r)) <= tol for r in reps):
            reps.append(lim)
    return len(reps)


def omega_empirical(coeffs: Sequence, K: int = 20, tol: float = 1e-9, N_max: int = 64) -> OmegaResult:
    """Least period N whose residue classes of X_n are Cauchy within tol over
    the last half of the window; limits are the last member of each class."""
    a = [Fraction(x) for x in coeffs]
    if len(a) < max(4 * K, 100):
        raise ValueError(f"need at least {max(4 * K, 100)} coefficients, got {len(a)}")
    ok, _, _ = saito_hypothesis_check(a)
    if not ok:
        raise ValueError("some coefficient vanishes; opposite series undefined")
    start = max(len(a) // 2, K)
    X = {n: [float(c) for c in opposite_poly(a, n, K)] for n in range(start, len(a))}
    for N in range(1, N_max + 1):
        classes = [[n for n in range(start, len(a)) if n % N == c] for c in range(N)]
        if any(len(cl) < 2 for cl in classes):
            break
        good = True
        for cl in classes:
            for k in range(K + 1):
                vals = [X[n][k] for n in cl]
                if max(vals) - min(vals) > tol:
                    good = False
                    break
            if not good:
                break
        if good:
            limits = [X[cl[-1]] for cl in classes]
            # order residues as n = 0, 1, ..., N-1 mod N
            return OmegaResult(N, limits, _merge(limits, tol), "Empirical")
    return OmegaResult(None, [], 0, "Empirical", status="no periodic convergence detected")


def _residue_exact(f: RatFun, alpha: Fraction) -> Fraction:
    """Coefficient c with f_n ~ c alpha^(-n) from a simple rational pole."""
    num = f.num
    dd = [i * c for i, c in enumerate(f.den)][1:]
    ev = lambda p, x: sum((c * x ** i for i, c in enumerate(p)), Fraction(0))
    return -ev(num, alpha) / (alpha * ev(dd, alpha))


def omega_analytic(f: RatFun, K: int = 20, tol: float = 1e-9, check: Sequence | None = None) -> OmegaResult:
    """Omega from the dominant poles alpha_1 * omega_j of f.

    With lambda = 1/|alpha_1| and f_n = C_[n] lambda^n + o(lambda^n), the
    limit for residue n has s^k coefficient (C_[n-k]/C_[n]) lambda^(-k).
    When every dominant pole is rational the limits are exact Fractions.
    """
    root = rf.dominant_real_root(f.den)
    warnings = []
    if not root.simple:
        warnings.append("dominant pole is not simple")
    dec = rf.exp_poly_decompose(f)
    lam = root.value
    rho = 1 / lam
    dom = [t for t in dec.terms if abs(abs(t.pole) - rho) <= 1e-9 * rho]
    orders = []
    exact = root.exact is not None
    for t in dom:
        w = t.pole / rho
        m = next((m for m in range(1, 65) if abs(w ** m - 1) <= 1e-9), None)
        if m is None:
            warnings.append(f"pole ratio {complex(w)} is not a detectable root of unity")
            break
        orders.append(m)
        if exact:
            # alpha_1 rational: alpha is a root of t^m - alpha_1^m exactly iff the factor divides it
            a1 = 1 / root.exact
            target = [-(a1 ** m)] + [Fraction(0)] * (m - 1) + [Fraction(1)]
            _, rem = rf.to_poly(target).div(rf.to_poly(list(t.factor)))
            if not rem.is_zero:
                warnings.append("root-of-unity ratio could not be confirmed exactly")
                exact = False
            if len(t.factor) != 2:
                exact = False
    if len(orders) != len(dom):
        if check is None:
            return OmegaResult(None, [], 0, "Analytic", status="numeric-only", warnings=warnings)
        log.warning("falling back to the empirical method: %s", "; ".join(warnings))
        res = omega_empirical(check, K, tol)
        res.warnings = warnings
        return res
    N = lcm(*orders) if orders else 1
    if exact:
        lam_q = root.exact
        poles = [-t.factor[0] / t.factor[1] for t in dom]
        res = [_residue_exact(f, p) for p in poles]
        # omega_j^(-n) with omega_j = p / alpha_1 rational, i.e. +-1
        a1 = 1 / lam_q
        C = [sum((c * (a1 / p) ** n for c, p in zip(res, poles)), Fraction(0)) for n in range(N)]
        if any(c == 0 for c in C):
            raise ValueError("leading coefficient vanishes on a residue class; opposite series undefined")
        limits = [[C[(n - k) % N] / C[n] * lam_q ** (-k) for k in range(K + 1)] for n in range(N)]
    else:
        cs = [t.coefficients[0] for t in dom]
        ws = [t.pole / rho for t in dom]
        C = [sum(c * w ** (-n) for c, w in zip(cs, ws)) for n in range(N)]
        if any(abs(c) <= tol * max(abs(x) for x in C) for c in C):
            raise ValueError("leading coefficient vanishes on a residue class; opposite series undefined")
        limits = [[(C[(n - k) % N] / C[n] * lam ** (-k)).real for k in range(K + 1)] for n in range(N)]
    out = OmegaResult(N, limits, _merge(limits, tol), "Analytic", warnings=warnings)
    if check is not None:
        emp = omega_empirical(check, K, tol)
        if emp.N is not None and not omega_agree(out, emp, 10 * tol):
            out.warnings.append("analytic and empirical limits disagree")
    return out


def omega_agree(a: OmegaResult, b: OmegaResult, tol: float) -> bool:
    """Same limit for every residue n mod lcm(N_a, N_b), coordinatewise within tol."""
    if a.N is None or b.N is None:
        return False
    L = lcm(a.N, b.N)
    for n in range(L):
        x, y = a.limits[n % a.N], b.limits[n % b.N]
        if max(abs(float(u) - float(v)) for u, v in zip(x, y)) > tol:
            return False
    return True


def growth_json(sphere: RatFun, ball: RatFun, growth: GrowthReport, omega: OmegaResult | None = None) -> str:
    obj = {
        "sphere": sphere.to_json(),
        "ball": ball.to_json(),
        "lambda": {
            "value": mpmath.nstr(growth.root.value, 30),
            "minimal_poly_factor": [str(c) for c in growth.root.minimal_factor],
            "simple": growth.root.simple,
            "same_modulus_count": growth.root.same_modulus_count,
        },
        "ratio_window": list(growth.ratio_window),
        "flags": growth.flags,
        "note": "sphere = sum_n |X_{=n}| t^n; ball = sphere/(1-t)",
    }
    if omega is not None:
        obj["omega"] = omega.to_json()
    return json.dumps(obj, indent=2, sort_keys=True)


def series_csv(spheres: Sequence[int], balls: Sequence[int], densities: Sequence | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "sphere", "ball", "dead_end_density"])
    for n, (s, b) in enumerate(zip(spheres, balls)):
        d = densities[n] if densities is not None and n < len(densities) else ""
        w.writerow([n, s, b, str(d)])
    return buf.getvalue()
