"""Log-space probability arithmetic.

All probabilities in this package live on the natural-log scale (a plain
float in [-inf, 0] once normalized), which keeps products of many small
predictive factors away from underflow.  The helpers here are the only
place the package does raw exp/log bookkeeping.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, logsumexp

# A log-scale probability; normalized values are <= 0.
LogProb = float


def log_rising_factorial(x: float, n: int) -> float:
    """log of x(x+1)...(x+n-1), the rising factorial, via log-gamma.

    n = 0 returns 0 (empty product).  Requires x > 0.
    """
    if x <= 0:
        raise ValueError(f"rising factorial requires x > 0, got {x}")
    if n < 0:
        raise ValueError(f"rising factorial requires n >= 0, got {n}")
    if n == 0:
        return 0.0
    return float(gammaln(x + n) - gammaln(x))


def log_factorial(n: int) -> float:
    """log(n!) for integer n >= 0."""
    if n < 0:
        raise ValueError(f"factorial requires n >= 0, got {n}")
    return math.lgamma(n + 1)


def log_binomial(n: int, k: int) -> float:
    """log of the binomial coefficient C(n, k)."""
    if not 0 <= k <= n:
        raise ValueError(f"binomial coefficient needs 0 <= k <= n, got ({n}, {k})")
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


def log_sum_exp(values) -> float:
    """log(sum(exp(values))), stable; -inf for an empty sequence."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=float)
    if arr.size == 0:
        return float("-inf")
    return float(logsumexp(arr))


def normalize_log_weights(log_weights) -> np.ndarray:
    """Shift log weights so they exponentiate to a distribution summing to 1."""
    arr = np.asarray(log_weights, dtype=float)
    return arr - log_sum_exp(arr)


def assert_normalized(log_values, tol: float = 1e-10) -> None:
    """Raise if exp(log_values) does not sum to 1 within tol."""
    total = float(np.exp(np.asarray(log_values, dtype=float)).sum())
    if abs(total - 1.0) > tol:
        raise AssertionError(f"log distribution sums to {total}, not 1 within {tol}")
