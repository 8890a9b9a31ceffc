"""Bracketed bisection, the one root finder used everywhere.

Derivative-free bisection is deliberately preferred over faster methods:
the equilibrium problem approaches a double root at pull-in where
Newton-type iterations stall, and bisection cost is bounded.
"""
from __future__ import annotations

from typing import Callable


def bisect_root(func: Callable[[float], float], lo: float, hi: float,
                xtol: float = 0.0, ftol: float = 0.0,
                max_iter: int = 200) -> float:
    """Root of func on [lo, hi]; func(lo) and func(hi) must differ in sign.

    Runs until the bracket width is <= xtol, |f(mid)| <= ftol, or the
    midpoint stops moving (machine convergence). xtol=0 bisects to machine
    precision.
    """
    if lo > hi:
        lo, hi = hi, lo
    f_lo = func(lo)
    f_hi = func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break  # interval no longer representable
        f_mid = func(mid)
        if f_mid == 0.0 or abs(f_mid) <= ftol:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)
