"""scikit-learn style wrappers around the pipelines.

``fit`` takes a graph oracle or a coefficient sequence in place of a data
matrix; fitted attributes end in an underscore and ``get_params`` /
``set_params`` come from BaseEstimator.
"""

from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import ratfun as rf
from ._validation import check_coefficients, check_delta, check_oracle, check_radius
from .series import growth_rate_check, omega_analytic, omega_empirical, sphere_and_ball_series
from .tournament import fit_automaton, predict_sphere_counts


class GrowthSeriesModel(BaseEstimator):
    """Tournament automaton, sphere and ball series and growth report of a graph."""

    def __init__(self, delta="auto", explore_radius=8, validation_radius=None, exhaustive_radius=None,
                 reps_per_type=4, max_delta=4, guard=4):
        self.delta = delta
        self.explore_radius = explore_radius
        self.validation_radius = validation_radius
        self.exhaustive_radius = exhaustive_radius
        self.reps_per_type = reps_per_type
        self.max_delta = max_delta
        self.guard = guard

    def fit(self, oracle, y=None):
        check_oracle(oracle)
        delta = check_delta(self.delta)
        R = check_radius(self.explore_radius, "explore_radius", 3)
        rep = fit_automaton(oracle, R, delta=delta, max_delta=self.max_delta,
                            validation_radius=self.validation_radius,
                            exhaustive_radius=self.exhaustive_radius, reps_per_type=self.reps_per_type)
        self.report_ = rep
        self.automaton_ = rep.automaton
        self.delta_ = rep.automaton.delta
        self.sphere_, self.ball_ = sphere_and_ball_series(rep.automaton, rep.bfs_spheres[: rep.validated_up_to + 1],
                                                          self.guard)
        balls = rf.series_expand(self.ball_, len(rep.bfs_spheres) - 1)
        self.growth_ = growth_rate_check(self.sphere_, [int(x) for x in balls])
        return self

    def predict(self, n):
        """Sphere sizes |X_{=m}| for m in n (an int or an iterable of ints)."""
        check_is_fitted(self, "automaton_")
        ns = [n] if isinstance(n, int) else list(n)
        counts = predict_sphere_counts(self.automaton_, max(ns))
        return counts[ns[0]] if isinstance(n, int) else [counts[m] for m in ns]

    def transform(self, n_max):
        """Rows (n, sphere, ball) for n = 0..n_max."""
        check_is_fitted(self, "sphere_")
        s = rf.series_expand(self.sphere_, n_max)
        b = rf.series_expand(self.ball_, n_max)
        return [(n, int(s[n]), int(b[n])) for n in range(n_max + 1)]


class RecurrenceFitter(BaseEstimator):
    """Minimal linear recurrence / rational generating function of a sequence."""

    def __init__(self, max_order=10, guard=4):
        self.max_order = max_order
        self.guard = guard

    def fit(self, coeffs, y=None):
        a = check_coefficients(coeffs, 2 * self.max_order + self.guard)
        f = rf.rational_from_recurrence(a, self.max_order, self.guard)
        if not f:
            raise ValueError(f.reason)
        self.ratfun_ = f
        self.n_seen_ = len(a)
        return self

    def predict(self, n_max):
        check_is_fitted(self, "ratfun_")
        return rf.series_expand(self.ratfun_, n_max)


class OppositeSeries(BaseEstimator):
    """Accumulation set of the opposite series of a coefficient sequence or
    rational function."""

    def __init__(self, K=20, tol=1e-9, N_max=64, method="empirical"):
        self.K = K
        self.tol = tol
        self.N_max = N_max
        self.method = method

    def fit(self, X, y=None):
        if isinstance(X, rf.RatFun):
            coeffs = rf.series_expand(X, max(4 * self.K, 200))
            self.omega_ = omega_analytic(X, self.K, self.tol, check=coeffs) if self.method == "analytic" \
                else omega_empirical(coeffs, self.K, self.tol, self.N_max)
        else:
            coeffs = check_coefficients(X, max(4 * self.K, 100))
            if self.method == "analytic":
                f = rf.rational_from_recurrence(coeffs, (len(coeffs) - 4) // 2, 4)
                if not f:
                    raise ValueError(f"no rational fit for analytic mode: {f.reason}")
                self.omega_ = omega_analytic(f, self.K, self.tol, check=coeffs)
            else:
                self.omega_ = omega_empirical(coeffs, self.K, self.tol, self.N_max)
        return self

    def transform(self, n):
        """Limit series for the residue class of each n."""
        check_is_fitted(self, "omega_")
        if self.omega_.N is None:
            raise ValueError(self.omega_.status)
        ns = [n] if isinstance(n, int) else list(n)
        out = [self.omega_.limits[m % self.omega_.N] for m in ns]
        return out[0] if isinstance(n, int) else out
