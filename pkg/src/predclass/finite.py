"""Fixed-alphabet predictive classification (Dirichlet-multinomial).

Each feature j takes values in a known alphabet 1..r_j.  Within a class,
features are conditionally independent with per-value Dirichlet weights
lambda_cjl; integrating the multinomial likelihood against that prior gives
the closed-form predictive probability used throughout:

    p(test | train, S, T) = prod_c prod_j  Gamma(m_c + L_cj) / Gamma(n_c + m_c + L_cj)
                            * prod_l Gamma(n_cjl + m_cjl + lambda_cjl) / Gamma(m_cjl + lambda_cjl)

with L_cj = sum_l lambda_cjl, n_* counting test items under the candidate
structure S and m_* counting training items under T.  The label prior
integrates a symmetric Dirichlet over class frequencies the same way.

Three decision rules share this predictive:

* marginal   -- each test item scored alone against the training data;
* simultaneous -- the joint structure posterior over all k^n assignments,
  maximized globally (optimal under zero-one loss on the whole structure);
* marginalized -- per-item marginals of the joint posterior (optimal under
  per-item error counting).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .data import (
    CountTensor,
    FeatureTable,
    Labeling,
    count_frequencies,
    one_item_tensor,
)
from .logspace import LogProb, normalize_log_weights
from .structures import (
    DEFAULT_ENUMERATION_CAP,
    StructurePosterior,
    argmax_labels,
    marginal_log_posteriors,
    structure_posterior,
    tied_argmax_structures,
)


class AlphabetViolationError(ValueError):
    """An observed code exceeds the configured alphabet size of its feature."""


@dataclass(frozen=True)
class FiniteModelConfig:
    """Hyperparameters of the fixed-alphabet model.

    alphabet_sizes: per-feature alphabet sizes r_j; None infers each r_j as
        the largest code observed across training and test data.
    lambda_mode: "uniform" gives lambda_cjl = 1/r_j; "constant" gives
        lambda_cjl = lambda_value for every cell.
    lambda_table: optional explicit (c, j, l) -> lambda overrides on top of
        the mode-derived values.
    beta: Dirichlet weight(s) of the label prior, scalar or one per class.
    """

    alphabet_sizes: tuple[int, ...] | None = None
    lambda_mode: str = "uniform"
    lambda_value: float = 1.0
    lambda_table: Mapping[tuple[int, int, int], float] | None = None
    beta: float | tuple[float, ...] = 1.0
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self):
        if self.lambda_mode not in ("uniform", "constant"):
            raise ValueError(f"unknown lambda_mode {self.lambda_mode!r}")
        if self.lambda_mode == "constant" and self.lambda_value <= 0:
            raise ValueError("lambda_value must be > 0")
        if self.alphabet_sizes is not None and any(r < 1 for r in self.alphabet_sizes):
            raise ValueError("alphabet sizes must be >= 1")
        if self.lambda_table is not None and any(v <= 0 for v in self.lambda_table.values()):
            raise ValueError("all lambda overrides must be > 0")
        betas = self.beta if isinstance(self.beta, tuple) else (self.beta,)
        if any(b <= 0 for b in betas):
            raise ValueError("all beta must be > 0")

    def beta_for(self, c: int, class_count: int) -> float:
        if isinstance(self.beta, tuple):
            if len(self.beta) != class_count:
                raise ValueError(
                    f"{len(self.beta)} beta values for {class_count} classes"
                )
            return self.beta[c - 1]
        return float(self.beta)

    def beta_sum(self, class_count: int) -> float:
        return sum(self.beta_for(c, class_count) for c in range(1, class_count + 1))


def demo_config() -> FiniteModelConfig:
    """Configuration of the bundled worked example: lambda = 1, beta = (1, 1)."""
    return FiniteModelConfig(
        alphabet_sizes=(3, 3, 3, 3), lambda_mode="constant", lambda_value=1.0,
        beta=(1.0, 1.0),
    )


def resolve_alphabet(cfg: FiniteModelConfig, *sources) -> tuple[int, ...]:
    """Alphabet sizes from the config, or inferred as max observed codes.

    Sources may be FeatureTable or CountTensor; every observed code is
    validated against the resolved sizes.
    """
    n_features = None
    for src in sources:
        if src.n_features:
            n_features = src.n_features
            break
    if n_features is None:
        n_features = len(cfg.alphabet_sizes) if cfg.alphabet_sizes else 0
    if cfg.alphabet_sizes is not None:
        sizes = cfg.alphabet_sizes
        if len(sizes) != n_features and n_features:
            raise AlphabetViolationError(
                f"{len(sizes)} alphabet sizes for {n_features} features"
            )
    else:
        sizes = tuple(
            max((src.max_code(j) for src in sources), default=1) or 1
            for j in range(1, n_features + 1)
        )
    for src in sources:
        for j in range(1, (src.n_features or 0) + 1):
            observed = src.max_code(j)
            if observed > sizes[j - 1]:
                raise AlphabetViolationError(
                    f"feature {j} has observed code {observed} beyond alphabet "
                    f"size {sizes[j - 1]}"
                )
    return sizes


def _lambda(cfg: FiniteModelConfig, c: int, j: int, l: int, r_j: int) -> float:
    if cfg.lambda_table is not None and (c, j, l) in cfg.lambda_table:
        return float(cfg.lambda_table[(c, j, l)])
    if cfg.lambda_mode == "uniform":
        return 1.0 / r_j
    return float(cfg.lambda_value)


def log_predictive_finite(
    test_counts: CountTensor,
    train_counts: CountTensor,
    cfg: FiniteModelConfig,
    alphabet: tuple[int, ...] | None = None,
) -> LogProb:
    """Log predictive probability of the test counts given the training counts.

    An empty test tensor returns 0 (probability 1).  Pass a pre-resolved
    alphabet to skip re-validation in enumeration loops.
    """
    if train_counts.class_count != test_counts.class_count or (
        train_counts.n_features != test_counts.n_features
        and train_counts.n_features and test_counts.n_features
    ):
        raise ValueError("training and test tensors disagree on layout")
    if alphabet is None:
        alphabet = resolve_alphabet(cfg, train_counts, test_counts)
    total = 0.0
    for c in range(1, test_counts.class_count + 1):
        n_c = test_counts.class_size(c)
        if n_c == 0:
            continue
        m_c = train_counts.class_size(c)
        for j in range(1, test_counts.n_features + 1):
            r_j = alphabet[j - 1]
            big_lambda = sum(_lambda(cfg, c, j, l, r_j) for l in range(1, r_j + 1))
            total += gammaln(m_c + big_lambda) - gammaln(n_c + m_c + big_lambda)
            for l, n_cjl in test_counts.cell(c, j).items():
                lam = _lambda(cfg, c, j, l, r_j)
                m_cjl = train_counts.count(c, j, l)
                total += gammaln(n_cjl + m_cjl + lam) - gammaln(m_cjl + lam)
    return float(total)


def log_structure_prior(
    test_labels: Labeling, train_labels: Labeling, cfg: FiniteModelConfig
) -> LogProb:
    """Log prior of a test labeling given the training labeling.

    Dirichlet-multinomial over label frequencies: the training labels update
    the Dirichlet(beta) weights, the test labeling is scored against the
    updated prior.
    """
    if test_labels.class_count != train_labels.class_count:
        raise ValueError("labelings disagree on the number of classes")
    k = train_labels.class_count
    m, n = train_labels.n_items, test_labels.n_items
    beta_sum = cfg.beta_sum(k)
    total = gammaln(m + beta_sum) - gammaln(n + m + beta_sum)
    m_sizes, n_sizes = train_labels.class_sizes(), test_labels.class_sizes()
    for c in range(1, k + 1):
        b = cfg.beta_for(c, k)
        total += gammaln(n_sizes[c - 1] + m_sizes[c - 1] + b) - gammaln(m_sizes[c - 1] + b)
    return float(total)


def log_label_prior(c: int, train_labels: Labeling, cfg: FiniteModelConfig) -> LogProb:
    """Single-item label prior: the structure prior specialized to one item."""
    k = train_labels.class_count
    m_c = train_labels.class_sizes()[c - 1]
    return float(
        np.log(m_c + cfg.beta_for(c, k))
        - np.log(train_labels.n_items + cfg.beta_sum(k))
    )


@dataclass(frozen=True)
class SimultaneousResult:
    """Joint structure posterior with its tied maxima."""

    posterior: StructurePosterior
    best: tuple[tuple[int, ...], ...]
    canonical: tuple[int, ...]


@dataclass(frozen=True)
class MarginalResult:
    """Per-item classification: normalized log posterior table and argmax."""

    log_posteriors: np.ndarray = field(repr=False)
    labels: tuple[int, ...]

    def posteriors(self) -> np.ndarray:
        return np.exp(self.log_posteriors)


@dataclass(frozen=True)
class MarginalizedResult(MarginalResult):
    """Per-item marginals of the joint posterior, plus that posterior."""

    joint: StructurePosterior = None
    log_unnormalized_sums: np.ndarray = field(default=None, repr=False)


def spc_classify(
    test: FeatureTable,
    train: FeatureTable,
    train_labels: Labeling,
    cfg: FiniteModelConfig,
) -> SimultaneousResult:
    """Simultaneous classifier: posterior over all joint assignments.

    Ties are all reported; the lexicographically smallest is canonical.
    """
    train_counts = count_frequencies(train, train_labels)
    alphabet = resolve_alphabet(cfg, train, test)
    k = train_labels.class_count

    def log_weight(structure: tuple[int, ...]) -> float:
        labs = Labeling(structure, k)
        test_counts = count_frequencies(test, labs)
        return log_predictive_finite(test_counts, train_counts, cfg, alphabet) + \
            log_structure_prior(labs, train_labels, cfg)

    posterior = structure_posterior(test.n_items, k, log_weight, cfg.enumeration_cap)
    best = tied_argmax_structures(posterior)
    return SimultaneousResult(posterior, best, best[0])


def _item_log_posterior_row(
    row: Sequence[int],
    train_counts: CountTensor,
    train_labels: Labeling,
    cfg: FiniteModelConfig,
    alphabet: tuple[int, ...],
) -> np.ndarray:
    k = train_labels.class_count
    logw = np.array([
        log_predictive_finite(one_item_tensor(row, c, k), train_counts, cfg, alphabet)
        + log_label_prior(c, train_labels, cfg)
        for c in range(1, k + 1)
    ])
    return normalize_log_weights(logw)


def mpc_classify(
    test: FeatureTable,
    train: FeatureTable,
    train_labels: Labeling,
    cfg: FiniteModelConfig,
) -> MarginalResult:
    """Marginal classifier: each test item scored independently."""
    train_counts = count_frequencies(train, train_labels)
    alphabet = resolve_alphabet(cfg, train, test)
    k = train_labels.class_count
    table = np.array([
        _item_log_posterior_row(row, train_counts, train_labels, cfg, alphabet)
        for row in test.rows
    ]).reshape(test.n_items, k)
    return MarginalResult(table, argmax_labels(table))


def mdpc_classify(
    test: FeatureTable,
    train: FeatureTable,
    train_labels: Labeling,
    cfg: FiniteModelConfig,
) -> MarginalizedResult:
    """Marginalized classifier: per-item marginals of the joint posterior."""
    joint = spc_classify(test, train, train_labels, cfg)
    k = train_labels.class_count
    table = marginal_log_posteriors(joint.posterior, k)
    sums = table + joint.posterior.log_normalizer
    return MarginalizedResult(
        log_posteriors=table,
        labels=argmax_labels(table),
        joint=joint.posterior,
        log_unnormalized_sums=sums,
    )


def log_marginal_product_finite(
    test: FeatureTable,
    structure: Sequence[int],
    train_counts: CountTensor,
    cfg: FiniteModelConfig,
    alphabet: tuple[int, ...] | None = None,
) -> LogProb:
    """Sum of per-item log predictives under a fixed labeling (no label prior)."""
    if alphabet is None:
        alphabet = resolve_alphabet(cfg, train_counts, test)
    k = train_counts.class_count
    return float(sum(
        log_predictive_finite(one_item_tensor(row, c, k), train_counts, cfg, alphabet)
        for row, c in zip(test.rows, structure)
    ))
