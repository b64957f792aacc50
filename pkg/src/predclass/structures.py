"""Joint classification structures: enumeration, posteriors, argmax machinery.

Both classification models score every assignment of the n test items to
the k classes; this module owns that shared engine, parameterized by the
model's log-weight function.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .logspace import log_sum_exp

# Log weights within this of the maximum count as tied; genuine exact ties
# survive float evaluation only to rounding error.
TIE_TOLERANCE = 1e-9

DEFAULT_ENUMERATION_CAP = 2**20


class EnumerationTooLargeError(ValueError):
    """k^n exceeds the enumeration cap; reports the offending count."""

    def __init__(self, n_items: int, class_count: int, cap: int):
        self.structure_count = class_count**n_items
        super().__init__(
            f"{class_count}^{n_items} = {self.structure_count} classification "
            f"structures exceed the enumeration cap {cap}"
        )


def enumerate_structures(
    n_items: int, class_count: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> tuple[tuple[int, ...], ...]:
    """All class assignments of n items, lexicographic, last item fastest.

    n_items = 0 yields the single empty structure.
    """
    if n_items < 0 or class_count < 1:
        raise ValueError(f"need n_items >= 0 and class_count >= 1, got "
                         f"({n_items}, {class_count})")
    if class_count**n_items > cap:
        raise EnumerationTooLargeError(n_items, class_count, cap)
    return tuple(product(range(1, class_count + 1), repeat=n_items))


@dataclass(frozen=True)
class StructurePosterior:
    """Posterior over all enumerated structures, kept in log space."""

    structures: tuple[tuple[int, ...], ...]
    log_unnormalized: np.ndarray
    log_normalizer: float

    @property
    def log_posterior(self) -> np.ndarray:
        return self.log_unnormalized - self.log_normalizer

    def posterior(self) -> np.ndarray:
        return np.exp(self.log_posterior)


def structure_posterior(
    n_items: int,
    class_count: int,
    log_weight: Callable[[tuple[int, ...]], float],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> StructurePosterior:
    """Score every structure with log_weight and normalize."""
    structures = enumerate_structures(n_items, class_count, cap)
    logw = np.array([log_weight(s) for s in structures], dtype=float)
    return StructurePosterior(structures, logw, log_sum_exp(logw))


def tied_argmax_structures(
    posterior: StructurePosterior, tol: float = TIE_TOLERANCE
) -> tuple[tuple[int, ...], ...]:
    """All structures whose log weight ties the maximum, lexicographic order.

    The first element is the canonical answer.
    """
    best = posterior.log_unnormalized.max()
    tied = [s for s, w in zip(posterior.structures, posterior.log_unnormalized)
            if w >= best - tol]
    return tuple(sorted(tied))


def marginal_log_posteriors(posterior: StructurePosterior, class_count: int) -> np.ndarray:
    """Per-item marginal label posteriors from a joint posterior.

    Returns an (n_items, class_count) array of normalized log probabilities,
    entry (i, c-1) summing the joint posterior over structures that put
    item i+1 in class c.
    """
    if not posterior.structures:
        return np.zeros((0, class_count))
    n_items = len(posterior.structures[0])
    out = np.empty((n_items, class_count))
    logp = posterior.log_posterior
    for i in range(n_items):
        for c in range(1, class_count + 1):
            member = [w for s, w in zip(posterior.structures, logp) if s[i] == c]
            out[i, c - 1] = log_sum_exp(member)
    return out


def argmax_labels(log_table: np.ndarray, tol: float = TIE_TOLERANCE) -> tuple[int, ...]:
    """Per-item argmax classes from an (n, k) log-posterior table.

    Ties within tol go to the lowest class index.
    """
    labels = []
    for row in np.asarray(log_table, dtype=float):
        best = row.max()
        labels.append(int(np.nonzero(row >= best - tol)[0][0]) + 1)
    return tuple(labels)
