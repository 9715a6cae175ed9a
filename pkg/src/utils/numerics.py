"""
Numerical Helpers
=================
Bracketing root solves and grid maximisation used by the boundary and
verifier services.
"""

import logging
from typing import Callable, Tuple

import numpy as np

from src.core.exceptions import ConvergenceError

logger = logging.getLogger(__name__)


def bisect_root(func: Callable[[float], float], lo: float, hi: float,
                tol: float = 1e-12, max_iter: int = 200) -> float:
    """
    Root of `func` on [lo, hi] by bisection, assuming func(lo) and func(hi)
    have opposite signs (or one of them is zero).

    Halving continues until the bracket stops shrinking in floating point, so
    the result is as tight as the arithmetic allows; `tol` is the width that
    must at least be reached.

    Raises:
        ConvergenceError: If the bracket is invalid or `tol` is not reached
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise ConvergenceError(f"no sign change on [{lo}, {hi}]: f={f_lo}, {f_hi}")

    for iteration in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = func(mid)
        if f_mid == 0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    else:
        logger.debug(f"bisection used all {max_iter} iterations, width {hi - lo:.3e}")

    if hi - lo > tol:
        raise ConvergenceError(f"bisection stopped at width {hi - lo:.3e} > {tol:.1e}")
    return lo if abs(f_lo) <= abs(f_hi) else hi


def count_sign_changes(values: np.ndarray, zero_tol: float = 1e-14) -> int:
    """Sign changes along a sampled curve, ignoring samples within zero_tol of 0."""
    signs = np.sign(values[np.abs(values) > zero_tol])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def grid_maximize(func: Callable[[np.ndarray, np.ndarray], np.ndarray],
                  feasible: Callable[[np.ndarray, np.ndarray], np.ndarray],
                  bounds: Tuple[float, float, float, float],
                  points: int = 201, rounds: int = 8) -> Tuple[float, float, float]:
    """
    Maximise func(x, y) over the feasible part of a box by repeated grid
    search, zooming in on the best point each round.

    Returns:
        (max value, x, y)
    """
    x_min, x_max, y_min, y_max = bounds
    x_lo, x_hi, y_lo, y_hi = bounds
    best = (-np.inf, x_lo, y_lo)
    for _ in range(rounds):
        xs = np.linspace(x_lo, x_hi, points)
        ys = np.linspace(y_lo, y_hi, points)
        X, Y = np.meshgrid(xs, ys, indexing='ij')
        values = np.where(feasible(X, Y), func(X, Y), -np.inf)
        index = np.unravel_index(int(np.argmax(values)), values.shape)
        value = float(values[index])
        if value > best[0]:
            best = (value, float(X[index]), float(Y[index]))
        _, bx, by = best
        hx = 2 * (x_hi - x_lo) / (points - 1)
        hy = 2 * (y_hi - y_lo) / (points - 1)
        x_lo, x_hi = max(x_min, bx - hx), min(x_max, bx + hx)
        y_lo, y_hi = max(y_min, by - hy), min(y_max, by + hy)
    return best
