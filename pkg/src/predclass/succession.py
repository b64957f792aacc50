"""Rules of succession, small predictive distributions, and the mutator urn.

The succession rules are next-observation probabilities given observed
species counts: Laplace's additive rule for a fixed alphabet, Johnson's
symmetric-Dirichlet generalization, De Morgan's rule with an explicit
new-species outcome, and the Poisson-Dirichlet rule that the Ewens sampling
formula induces.

The urn holds one mutator ball of weight theta plus, optionally, d0 colored
balls; drawing a colored ball (or any earlier observation) duplicates that
species, drawing the mutator founds a new one.  Started with no colors it
generates partition vectors distributed exactly by the Ewens sampling
formula with dispersion theta, which is what the Monte Carlo validation
leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.special import gammaln
from scipy.stats import chi2

from .data import PartitionVector

#: Sentinel outcome for "a species not seen before".
NEW = "new"


@dataclass(frozen=True)
class FrequencyRecord:
    """Observed species counts n_j > 0, their total, and the alphabet in force.

    alphabet_size pins a fixed, known alphabet for the rules that need one
    (Laplace, Johnson); when None those rules fall back to the number of
    distinct observed species.
    """

    counts: Mapping[int, int]
    alphabet_size: int | None = None

    def __post_init__(self):
        for j, n in self.counts.items():
            if n <= 0:
                raise ValueError(f"stored counts must be > 0; species {j} has {n}")
        if self.alphabet_size is not None and self.alphabet_size < len(self.counts):
            raise ValueError("alphabet smaller than the number of observed species")

    @classmethod
    def from_counts(cls, counts: Sequence[int], alphabet_size: int | None = None
                    ) -> "FrequencyRecord":
        """Record from a dense count vector indexed by species 1, 2, ..."""
        return cls({j: int(n) for j, n in enumerate(counts, start=1) if n},
                   alphabet_size)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def known_species(self) -> int:
        return len(self.counts)

    def count(self, j: int) -> int:
        return self.counts.get(j, 0)

    def fixed_alphabet(self) -> int:
        return self.alphabet_size if self.alphabet_size is not None else self.known_species


def laplace_rule(rec: FrequencyRecord, j: int) -> float:
    """(n_j + 1) / (N + d) over a fixed alphabet of d species."""
    d = rec.fixed_alphabet()
    if d < 1:
        raise ValueError("Laplace's rule needs a nonempty fixed alphabet")
    if not 1 <= j <= d:
        raise ValueError(f"species {j} outside the fixed alphabet 1..{d}")
    return (rec.count(j) + 1) / (rec.total + d)


def de_morgan_rule(rec: FrequencyRecord, target) -> float:
    """(n_j + 1) / (N + d + 1) for observed species, 1 / (N + d + 1) for NEW."""
    denom = rec.total + rec.known_species + 1
    if target is NEW or target == NEW:
        return 1 / denom
    if rec.count(target) == 0:
        raise ValueError(f"species {target!r} has not been observed")
    return (rec.count(target) + 1) / denom


def johnson_rule(rec: FrequencyRecord, j: int, alpha: float) -> float:
    """(n_j + alpha) / (N + d*alpha), the symmetric-Dirichlet rule.

    Stated for alphabets of three or more species; accepted here for d >= 2,
    where it coincides with the two-category Beta rule.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    d = rec.fixed_alphabet()
    if d < 2:
        raise ValueError("Johnson's rule needs an alphabet of at least 2 species")
    if not 1 <= j <= d:
        raise ValueError(f"species {j} outside the fixed alphabet 1..{d}")
    return (rec.count(j) + alpha) / (rec.total + d * alpha)


def pd_succession(rec: FrequencyRecord, target, theta: float) -> float:
    """n_j / (N + theta) for observed species, theta / (N + theta) for NEW."""
    if theta <= 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    denom = rec.total + theta
    if target is NEW or target == NEW:
        return theta / denom
    if rec.count(target) == 0:
        raise ValueError(f"species {target!r} has not been observed")
    return rec.count(target) / denom


def succession_distribution(rule: str, rec: FrequencyRecord, *,
                            alpha: float | None = None,
                            theta: float | None = None) -> dict:
    """Full outcome distribution of one rule, including NEW where it exists."""
    if rule == "laplace":
        return {j: laplace_rule(rec, j) for j in range(1, rec.fixed_alphabet() + 1)}
    if rule == "johnson":
        if alpha is None:
            raise ValueError("Johnson's rule needs alpha")
        return {j: johnson_rule(rec, j, alpha) for j in range(1, rec.fixed_alphabet() + 1)}
    if rule == "de-morgan":
        out = {j: de_morgan_rule(rec, j) for j in sorted(rec.counts)}
        out[NEW] = de_morgan_rule(rec, NEW)
        return out
    if rule == "pd":
        if theta is None:
            raise ValueError("the Poisson-Dirichlet rule needs theta")
        out = {j: pd_succession(rec, j, theta) for j in sorted(rec.counts)}
        out[NEW] = pd_succession(rec, NEW, theta)
        return out
    raise ValueError(f"unknown succession rule {rule!r}")


def beta_binomial_pmf(x: int, n: int, alpha: float, beta: float) -> float:
    """Beta-Binomial pmf: C(n,x) * B(x+alpha, n-x+beta) / B(alpha, beta)."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be > 0")
    if not 0 <= x <= n:
        raise ValueError(f"x must lie in 0..{n}, got {x}")
    log_pmf = (
        gammaln(n + 1) - gammaln(x + 1) - gammaln(n - x + 1)
        + gammaln(x + alpha) + gammaln(n - x + beta) - gammaln(n + alpha + beta)
        + gammaln(alpha + beta) - gammaln(alpha) - gammaln(beta)
    )
    return float(np.exp(log_pmf))


def posterior_succession(x: int, n: int, alpha: float, beta: float) -> float:
    """Next-trial success probability (x + alpha) / (n + alpha + beta).

    With no data this is the prior predictive alpha / (alpha + beta).
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be > 0")
    if not 0 <= x <= n:
        raise ValueError(f"x must lie in 0..{n}, got {x}")
    return (x + alpha) / (n + alpha + beta)


def heterogeneous_binomial_pmf(x: int, n: int, alpha: float, beta: float) -> float:
    """Binomial pmf at success probability alpha/(alpha+beta).

    The independent-populations counterpart of the Beta-Binomial: each trial
    has its own parameter, so only the prior mean survives.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be > 0")
    if not 0 <= x <= n:
        raise ValueError(f"x must lie in 0..{n}, got {x}")
    p = alpha / (alpha + beta)
    log_pmf = (gammaln(n + 1) - gammaln(x + 1) - gammaln(n - x + 1)
               + x * math.log(p) + (n - x) * math.log1p(-p))
    return float(np.exp(log_pmf))


@dataclass(frozen=True)
class UrnState:
    """Final state of one urn run.

    species_counts lists the d0 initial colors first (counting only actual
    draws, not the founding phantom ball), then new species in order of
    first appearance.  draw_species records the 1-based species index of
    every draw in order, so the induced partition of the draw indices can
    be reconstructed.
    """

    species_counts: tuple[int, ...]
    mutator_weight: float
    initial_colors: int
    draw_count: int
    draw_species: tuple[int, ...] = ()

    def partition_vector(self) -> PartitionVector:
        """Frequencies of frequencies of the drawn counts; zero counts dropped."""
        rho: dict[int, int] = {}
        for n in self.species_counts:
            if n > 0:
                rho[n] = rho.get(n, 0) + 1
        return PartitionVector(rho, self.draw_count)


def simulate_urn(
    draws: int,
    theta: float,
    initial_colors: int = 0,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> UrnState:
    """Run the mutator urn for a fixed number of draws.

    At each step with N draws made so far, a new species is founded with
    probability theta / (N + d0 + theta); otherwise species j is drawn with
    probability (n_j + [j is an initial color]) / (N + d0 + theta).  Identical
    seeds reproduce identical trajectories (numpy PCG64).
    """
    if theta <= 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    if draws < 0 or initial_colors < 0:
        raise ValueError("draws and initial_colors must be >= 0")
    if rng is None:
        rng = np.random.default_rng(seed)
    counts = [0] * initial_colors
    observations: list[int] = []
    for step in range(draws):
        u = rng.random() * (step + initial_colors + theta)
        if u < theta:
            counts.append(1)
            observations.append(len(counts) - 1)
            continue
        pick = int(u - theta)
        if pick >= step + initial_colors:  # guard the open-interval edge
            pick = step + initial_colors - 1
        if pick < step:
            species = observations[pick]
        else:
            species = pick - step
        counts[species] += 1
        observations.append(species)
    return UrnState(tuple(counts), float(theta), initial_colors, draws,
                    tuple(s + 1 for s in observations))


def sample_urn_partitions(
    draws: int,
    theta: float,
    replicates: int,
    initial_colors: int = 0,
    seed: int | None = None,
) -> list[PartitionVector]:
    """Partition vectors of many independent urn runs from one seeded stream."""
    rng = np.random.default_rng(seed)
    return [
        simulate_urn(draws, theta, initial_colors, rng=rng).partition_vector()
        for _ in range(replicates)
    ]


def pooled_chisquare(
    observed: Sequence[float], expected: Sequence[float], min_expected: float = 5.0
) -> tuple[float, int, float]:
    """Chi-square goodness of fit with small expected cells pooled.

    Cells with expected count below min_expected are merged into one pooled
    cell.  Returns (statistic, degrees of freedom, p-value).
    """
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.shape != exp.shape:
        raise ValueError("observed and expected must have the same length")
    keep = exp >= min_expected
    obs_cells = list(obs[keep])
    exp_cells = list(exp[keep])
    if (~keep).any():
        obs_cells.append(obs[~keep].sum())
        exp_cells.append(exp[~keep].sum())
    stat = float(sum((o - e) ** 2 / e for o, e in zip(obs_cells, exp_cells)))
    dof = len(obs_cells) - 1
    if dof < 1:
        raise ValueError("not enough cells for a chi-square test after pooling")
    return stat, dof, float(chi2.sf(stat, dof))
