"""Unbounded-alphabet predictive classification via the Ewens sampling formula.

When feature alphabets are not fixed in advance, the sufficient statistic
for a (class, feature) cell is its partition vector rho (how many values
were seen once, twice, ...), and the exchangeable predictive law over
partition vectors is the Ewens sampling formula with dispersion psi:

    p(rho) = n! / (psi (psi+1) ... (psi+n-1)) * prod_t (psi/t)^rho_t / rho_t!

Supervised prediction conditions on the training data by taking the ratio
of the joint (training + test) law to the training-only law, cell by cell.
The same three decision rules as the fixed-alphabet model apply; novel
feature values are handled natively instead of breaking the model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .data import (
    CountTensor,
    FeatureTable,
    Labeling,
    PartitionVector,
    combined_partition_vector,
    count_frequencies,
    partition_vector,
    update_partition_vector_one_item,
)
from .logspace import (
    LogProb,
    log_factorial,
    log_rising_factorial,
    normalize_log_weights,
)
from .structures import (
    DEFAULT_ENUMERATION_CAP,
    argmax_labels,
    marginal_log_posteriors,
    structure_posterior,
    tied_argmax_structures,
)
from .finite import (
    FiniteModelConfig,
    MarginalResult,
    MarginalizedResult,
    SimultaneousResult,
    log_structure_prior,
)


@dataclass(frozen=True)
class PartitionModelConfig:
    """Hyperparameters of the unbounded-alphabet model.

    psi has no default: it materially changes predictions and must be chosen.
    label_prior_mode "uniform" weights every structure equally; "dirichlet"
    reuses the fixed-alphabet label prior with weights beta.
    """

    psi: float
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    label_prior_mode: str = "uniform"
    beta: float | tuple[float, ...] = 1.0

    def __post_init__(self):
        if self.psi <= 0:
            raise ValueError(f"psi must be > 0, got {self.psi}")
        if self.label_prior_mode not in ("uniform", "dirichlet"):
            raise ValueError(f"unknown label_prior_mode {self.label_prior_mode!r}")


def _log_psi_part(rho: PartitionVector, psi: float) -> float:
    """Sufficient-statistic part: sum_t rho_t log(psi/t) - log(rho_t!)."""
    total = 0.0
    for t, r in rho.rho.items():
        if r:
            total += r * (np.log(psi) - np.log(t)) - log_factorial(r)
    return total


def log_ewens(rho: PartitionVector, psi: float) -> LogProb:
    """Ewens sampling formula in log space for one partition vector."""
    if psi <= 0:
        raise ValueError(f"psi must be > 0, got {psi}")
    n = rho.total
    return float(log_factorial(n) - log_rising_factorial(psi, n)
                 + _log_psi_part(rho, psi))


def log_joint_ewens(counts: CountTensor, psi: float) -> LogProb:
    """Product of per (class, feature) Ewens terms for one count tensor."""
    total = 0.0
    for c in range(1, counts.class_count + 1):
        for j in range(1, counts.n_features + 1):
            total += log_ewens(partition_vector(counts, c, j), psi)
    return float(total)


def log_predictive_pe(
    test_counts: CountTensor, train_counts: CountTensor, psi: float
) -> LogProb:
    """Log predictive probability of test counts given training counts.

    Cell by cell this is the ratio of the combined-data Ewens law to the
    training-data Ewens law; the factorial prefactors telescope into
    (m_c+n_c)!/m_c! over the shifted rising factorial.
    """
    if psi <= 0:
        raise ValueError(f"psi must be > 0, got {psi}")
    if train_counts.class_count != test_counts.class_count:
        raise ValueError("training and test tensors disagree on classes")
    total = 0.0
    for c in range(1, test_counts.class_count + 1):
        n_c = test_counts.class_size(c)
        if n_c == 0:
            continue
        m_c = train_counts.class_size(c)
        class_factor = (
            log_factorial(m_c + n_c) - log_factorial(m_c)
            - log_rising_factorial(psi + m_c, n_c)
        )
        for j in range(1, test_counts.n_features + 1):
            combined = combined_partition_vector(train_counts, test_counts, c, j)
            training = partition_vector(train_counts, c, j)
            total += class_factor
            total += _log_psi_part(combined, psi) - _log_psi_part(training, psi)
    return float(total)


def pe_marginal_predictive(
    item: Sequence[int], train_counts: CountTensor, c: int, psi: float
) -> LogProb:
    """Log predictive of a single item in class c given the training counts."""
    if not 1 <= c <= train_counts.class_count:
        raise IndexError(f"class {c} outside 1..{train_counts.class_count}")
    if psi <= 0:
        raise ValueError(f"psi must be > 0, got {psi}")
    m_c = train_counts.class_size(c)
    d_train = train_counts.n_features
    total = 0.0
    for j, v in enumerate(item, start=1):
        training = (partition_vector(train_counts, c, j) if j <= d_train
                    else PartitionVector({}, m_c))
        t_observed = train_counts.count(c, j, int(v)) if j <= d_train else 0
        updated = update_partition_vector_one_item(training, t_observed)
        total += np.log(m_c + 1) - np.log(psi + m_c)
        total += _log_psi_part(updated, psi) - _log_psi_part(training, psi)
    return float(total)


def log_marginal_product_pe(
    test: FeatureTable,
    structure: Sequence[int],
    train_counts: CountTensor,
    psi: float,
) -> LogProb:
    """Sum of per-item log predictives under a fixed labeling (no label prior)."""
    return float(sum(
        pe_marginal_predictive(row, train_counts, c, psi)
        for row, c in zip(test.rows, structure)
    ))


def _log_structure_prior_pe(
    structure: tuple[int, ...], train_labels: Labeling, cfg: PartitionModelConfig
) -> float:
    if cfg.label_prior_mode == "uniform":
        # constant over structures; kept explicit so weights are log joints
        return -len(structure) * np.log(train_labels.class_count)
    labs = Labeling(structure, train_labels.class_count)
    return log_structure_prior(labs, train_labels, FiniteModelConfig(beta=cfg.beta))


def _log_label_prior_pe(
    c: int, train_labels: Labeling, cfg: PartitionModelConfig
) -> float:
    return _log_structure_prior_pe((c,), train_labels, cfg)


def pe_spc_classify(
    test: FeatureTable,
    train: FeatureTable,
    train_labels: Labeling,
    cfg: PartitionModelConfig,
) -> SimultaneousResult:
    """Simultaneous classifier under the unbounded-alphabet model."""
    train_counts = count_frequencies(train, train_labels)
    k = train_labels.class_count

    def log_weight(structure: tuple[int, ...]) -> float:
        test_counts = count_frequencies(test, Labeling(structure, k))
        return log_predictive_pe(test_counts, train_counts, cfg.psi) + \
            _log_structure_prior_pe(structure, train_labels, cfg)

    posterior = structure_posterior(test.n_items, k, log_weight, cfg.enumeration_cap)
    best = tied_argmax_structures(posterior)
    return SimultaneousResult(posterior, best, best[0])


@dataclass(frozen=True)
class PEMarginalResult(MarginalResult):
    """Per-item result plus the implied joint labeling and its data predictive."""

    implied_structure: tuple[int, ...] = ()
    log_product_predictive: float = 0.0


def pe_mpc_classify(
    test: FeatureTable,
    train: FeatureTable,
    train_labels: Labeling,
    cfg: PartitionModelConfig,
) -> PEMarginalResult:
    """Marginal classifier: items scored independently, plus the implied joint.

    The reported log_product_predictive is the data part alone (no label
    prior) evaluated at the implied argmax labeling.
    """
    train_counts = count_frequencies(train, train_labels)
    k = train_labels.class_count
    rows = []
    for row in test.rows:
        logw = np.array([
            pe_marginal_predictive(row, train_counts, c, cfg.psi)
            + _log_label_prior_pe(c, train_labels, cfg)
            for c in range(1, k + 1)
        ])
        rows.append(normalize_log_weights(logw))
    table = np.array(rows).reshape(test.n_items, k)
    labels = argmax_labels(table)
    product = log_marginal_product_pe(test, labels, train_counts, cfg.psi)
    return PEMarginalResult(table, labels, labels, product)


def pe_mdpc_classify(
    test: FeatureTable,
    train: FeatureTable,
    train_labels: Labeling,
    cfg: PartitionModelConfig,
) -> MarginalizedResult:
    """Marginalized classifier: per-item marginals of the joint posterior.

    An extension: the marginalization machinery is the fixed-alphabet one
    applied verbatim to this model's joint posterior.
    """
    joint = pe_spc_classify(test, train, train_labels, cfg)
    k = train_labels.class_count
    table = marginal_log_posteriors(joint.posterior, k)
    sums = table + joint.posterior.log_normalizer
    return MarginalizedResult(
        log_posteriors=table,
        labels=argmax_labels(table),
        joint=joint.posterior,
        log_unnormalized_sums=sums,
    )


def integer_partitions(n: int) -> Iterator[PartitionVector]:
    """All partition vectors of the integer n, one per partition shape.

    Used to enumerate the Ewens sampling formula's support exactly, e.g. to
    check it sums to one.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")

    def parts(remaining: int, largest: int):
        if remaining == 0:
            yield []
            return
        for part in range(min(remaining, largest), 0, -1):
            for rest in parts(remaining - part, part):
                yield [part] + rest

    for shape in parts(n, n) if n else [[]]:
        rho: dict[int, int] = {}
        for part in shape:
            rho[part] = rho.get(part, 0) + 1
        yield PartitionVector(rho, n)
