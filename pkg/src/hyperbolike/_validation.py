"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational
from typing import Sequence


def check_radius(R, name: str = "radius", minimum: int = 0, cap: int | None = None) -> int:
    if isinstance(R, bool) or not isinstance(R, Integral):
        raise TypeError(f"{name} must be an integer, got {R!r}")
    R = int(R)
    if R < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {R}")
    if cap is not None and R > cap:
        raise ValueError(f"{name} {R} exceeds the cap {cap}")
    return R


def check_delta(delta):
    if delta == "auto":
        return delta
    return check_radius(delta, "delta")


def check_coefficients(coeffs: Sequence, min_length: int = 1) -> list[Fraction]:
    """Exact coefficient list; floats are rejected so nothing inexact slips in."""
    out = []
    for i, c in enumerate(coeffs):
        if isinstance(c, float):
            raise TypeError(f"coefficient {i} is a float; pass integers, Fractions or strings")
        if isinstance(c, str):
            c = Fraction(c.strip())
        elif not isinstance(c, Rational):
            raise TypeError(f"coefficient {i} ({c!r}) is not rational")
        out.append(Fraction(c))
    if len(out) < min_length:
        raise ValueError(f"need at least {min_length} coefficients, got {len(out)}")
    return out


def check_oracle(oracle):
    for attr in ("base", "neighbors"):
        if not hasattr(oracle, attr):
            raise TypeError(f"{type(oracle).__name__} is not a graph oracle (missing {attr})")
    return oracle
