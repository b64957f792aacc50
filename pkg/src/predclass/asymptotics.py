"""Numerical convergence experiments for joint vs per-item predictive scoring.

Each experiment measures, at desk scale, the absolute difference between
the log predictive probability a simultaneous (joint) classifier assigns a
block of test items and the sum of per-item log predictives a marginal
classifier assigns the same items:

* training_growth_experiment: fixed-alphabet model, training size grows --
  the gap collapses toward zero.
* saturation_experiment: fixed-alphabet model, a later block of items
  is scored against a growing history of test items -- joint scoring of the
  block factorizes into per-item scoring, and the joint and marginalized
  argmax labels of the block agree.
* novelty_persistence_experiment: unbounded-alphabet model with planted
  never-seen feature values -- the gap does not vanish no matter how much
  training data accumulates.
* gap_decomposition_check: on one instance, splits the exact gap into the
  sufficient-statistic part (which persists) and the combinatorial
  prefactor part (which dies off as training grows).

The harness contains no probability code of its own: every number comes
from the model modules. All experiments are seed-deterministic end to end;
data generation uses multinomial draws (fixed alphabets) or the mutator
urn (unbounded alphabets).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .data import (
    CountTensor,
    FeatureTable,
    Labeling,
    combined_partition_vector,
    count_frequencies,
    one_item_tensor,
    partition_vector,
    update_partition_vector_one_item,
)
from .finite import (
    FiniteModelConfig,
    log_label_prior,
    log_marginal_product_finite,
    log_predictive_finite,
    log_structure_prior,
    resolve_alphabet,
)
from .partition import _log_psi_part, log_marginal_product_pe, log_predictive_pe
from .structures import (
    argmax_labels,
    marginal_log_posteriors,
    structure_posterior,
    tied_argmax_structures,
)
from .succession import simulate_urn


class HypothesisViolationError(ValueError):
    """The generator cannot satisfy the experiment's positivity assumptions."""


@dataclass(frozen=True)
class GeneratorSpec:
    """Synthetic data source for the experiments.

    Exactly one of category_probs (fixed alphabet: strictly positive
    per (class, feature) category distributions) and psi (unbounded
    alphabet: one mutator urn per (class, feature)) must be given.
    """

    class_count: int
    n_features: int
    category_probs: Mapping[tuple[int, int], tuple[float, ...]] | None = None
    psi: float | None = None
    seed: int = 0

    def __post_init__(self):
        if (self.category_probs is None) == (self.psi is None):
            raise ValueError("specify exactly one of category_probs and psi")
        if self.psi is not None and self.psi <= 0:
            raise ValueError(f"psi must be > 0, got {self.psi}")
        if self.category_probs is not None:
            for c in range(1, self.class_count + 1):
                for j in range(1, self.n_features + 1):
                    probs = self.category_probs.get((c, j))
                    if probs is None:
                        raise ValueError(f"missing category distribution for ({c}, {j})")
                    if min(probs) <= 0:
                        raise HypothesisViolationError(
                            f"category distribution for ({c}, {j}) has a zero entry"
                        )
                    if abs(sum(probs) - 1.0) > 1e-9:
                        raise ValueError(f"distribution for ({c}, {j}) does not sum to 1")

    @classmethod
    def random_categorical(
        cls, class_count: int, n_features: int, alphabet_size: int, seed: int = 0,
        floor: float = 0.05,
    ) -> "GeneratorSpec":
        """Seeded strictly-positive category distributions (floored Dirichlet)."""
        rng = np.random.default_rng(seed)
        probs = {}
        for c in range(1, class_count + 1):
            for j in range(1, n_features + 1):
                p = rng.dirichlet(np.ones(alphabet_size))
                p = (p + floor) / (p + floor).sum()
                probs[(c, j)] = tuple(float(x) for x in p)
        return cls(class_count, n_features, probs, None, seed)

    def alphabet_size(self, j: int) -> int:
        return len(self.category_probs[(1, j)])


@dataclass(frozen=True)
class GapSeries:
    """Per-grid-point gap summary across replicates."""

    grid: tuple[int, ...]
    mean_gap: tuple[float, ...]
    std_error: tuple[float, ...]
    replicate_count: int
    extras: Mapping[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if any(g < 0 for g in self.mean_gap):
            raise ValueError("gaps are absolute values and cannot be negative")


def _summarize(grid, gaps_by_point, replicates, extras=None) -> GapSeries:
    arr = np.asarray(gaps_by_point, dtype=float)  # (grid, replicates)
    return GapSeries(
        grid=tuple(int(g) for g in grid),
        mean_gap=tuple(float(x) for x in arr.mean(axis=1)),
        std_error=tuple(float(x) for x in arr.std(axis=1, ddof=1) / np.sqrt(replicates)),
        replicate_count=replicates,
        extras=extras or {},
    )


def _labeling_from_sizes(sizes: Sequence[int]) -> Labeling:
    labels = []
    for c, size in enumerate(sizes, start=1):
        labels.extend([c] * size)
    return Labeling(tuple(labels), len(sizes))


def _tensor_from_cells(cells, class_sizes, class_count, n_features) -> CountTensor:
    return CountTensor(class_count, n_features, cells, tuple(class_sizes))


def _draw_training_tensor(gen: GeneratorSpec, m_per_class: int, rng) -> CountTensor:
    cells = {}
    for c in range(1, gen.class_count + 1):
        for j in range(1, gen.n_features + 1):
            counts = rng.multinomial(m_per_class, gen.category_probs[(c, j)])
            cells[(c, j)] = {l: int(n) for l, n in enumerate(counts, start=1) if n}
    return _tensor_from_cells(
        cells, [m_per_class] * gen.class_count, gen.class_count, gen.n_features
    )


def _draw_items(gen: GeneratorSpec, structure: Sequence[int], rng) -> FeatureTable:
    rows = []
    for c in structure:
        row = tuple(
            int(rng.choice(gen.alphabet_size(j), p=gen.category_probs[(c, j)])) + 1
            for j in range(1, gen.n_features + 1)
        )
        rows.append(row)
    return FeatureTable.from_rows(rows)


def _round_robin(n_items: int, class_count: int) -> tuple[int, ...]:
    return tuple(i % class_count + 1 for i in range(n_items))


def training_growth_experiment(
    gen: GeneratorSpec,
    m_grid: Sequence[int],
    n_test: int,
    replicates: int,
    cfg: FiniteModelConfig | None = None,
) -> GapSeries:
    """Joint-vs-marginal predictive gap as per-class training size grows.

    Per replicate a test set with a fixed labeling is drawn once, then
    scored against fresh training data of every size in m_grid.
    """
    if gen.category_probs is None:
        raise ValueError("this experiment needs a fixed-alphabet generator")
    if cfg is None:
        cfg = FiniteModelConfig(
            alphabet_sizes=tuple(gen.alphabet_size(j) for j in range(1, gen.n_features + 1))
        )
    structure = _round_robin(n_test, gen.class_count)
    test_labeling = Labeling(structure, gen.class_count)
    children = np.random.SeedSequence(gen.seed).spawn(replicates)
    gaps = [[] for _ in m_grid]
    for child in children:
        rng = np.random.default_rng(child)
        test = _draw_items(gen, structure, rng)
        test_counts = count_frequencies(test, test_labeling)
        for gi, m in enumerate(m_grid):
            train_counts = _draw_training_tensor(gen, int(m), rng)
            alphabet = resolve_alphabet(cfg, train_counts, test_counts)
            joint = log_predictive_finite(test_counts, train_counts, cfg, alphabet)
            product = log_marginal_product_finite(test, structure, train_counts, cfg,
                                                  alphabet)
            gaps[gi].append(abs(joint - product))
    return _summarize(m_grid, gaps, replicates)


def saturation_experiment(
    gen: GeneratorSpec,
    n_grid: Sequence[int],
    delta: int,
    replicates: int,
    m_per_class: int = 10,
    cfg: FiniteModelConfig | None = None,
) -> GapSeries:
    """Gap for a later block of delta items as the test history grows.

    The block is scored jointly (data predictive times label prior) and as
    a product of single-item terms, both conditioned on the training data
    plus a labeled history of n test items whose per-class sizes all grow.
    The extras carry, per grid point, the fraction of replicates where the
    joint argmax labeling of the block and the per-item argmax of its
    marginal posteriors coincide.
    """
    if gen.category_probs is None:
        raise ValueError("this experiment needs a fixed-alphabet generator")
    if cfg is None:
        cfg = FiniteModelConfig(
            alphabet_sizes=tuple(gen.alphabet_size(j) for j in range(1, gen.n_features + 1))
        )
    k = gen.class_count
    block_structure = _round_robin(delta, k)
    children = np.random.SeedSequence(gen.seed).spawn(replicates)
    gaps = [[] for _ in n_grid]
    agreement = [[] for _ in n_grid]
    for child in children:
        rng = np.random.default_rng(child)
        train_counts = _draw_training_tensor(gen, m_per_class, rng)
        block = _draw_items(gen, block_structure, rng)
        for gi, n in enumerate(n_grid):
            per_class = int(n) // k
            history = _draw_training_tensor(gen, per_class, rng)
            cells = {}
            for key in set(train_counts.cells) | set(history.cells):
                merged = dict(train_counts.cells.get(key, {}))
                for l, cnt in history.cells.get(key, {}).items():
                    merged[l] = merged.get(l, 0) + cnt
                cells[key] = merged
            combined = _tensor_from_cells(
                cells, [m_per_class + per_class] * k, k, gen.n_features
            )
            combined_labels = _labeling_from_sizes([m_per_class + per_class] * k)
            alphabet = resolve_alphabet(cfg, combined)

            def log_weight(s):
                labs = Labeling(s, k)
                return (
                    log_predictive_finite(count_frequencies(block, labs), combined,
                                          cfg, alphabet)
                    + log_structure_prior(labs, combined_labels, cfg)
                )

            joint = log_weight(block_structure)
            product = sum(
                log_predictive_finite(one_item_tensor(row, c, k), combined, cfg,
                                      alphabet)
                + log_label_prior(c, combined_labels, cfg)
                for row, c in zip(block.rows, block_structure)
            )
            gaps[gi].append(abs(joint - product))

            posterior = structure_posterior(delta, k, log_weight)
            joint_best = tied_argmax_structures(posterior)[0]
            marginal_best = argmax_labels(marginal_log_posteriors(posterior, k))
            agreement[gi].append(1.0 if joint_best == marginal_best else 0.0)
    extras = {"argmax_agreement": tuple(float(np.mean(a)) for a in agreement)}
    return _summarize(n_grid, gaps, replicates, extras)


def _plant_test_items(
    train_counts: CountTensor,
    structure: Sequence[int],
    unique_value_fraction: float,
    n_features: int,
    rng,
) -> FeatureTable:
    """Test items that carry brand-new feature values at the planted rate."""
    next_new = [
        max((train_counts.max_code(j) for j in range(1, n_features + 1)), default=0) + 1
    ]
    rows = []
    for c in structure:
        row = []
        for j in range(1, n_features + 1):
            cell = train_counts.cell(c, j)
            if cell and rng.random() >= unique_value_fraction:
                values = sorted(cell)
                weights = np.array([cell[v] for v in values], dtype=float)
                row.append(int(rng.choice(values, p=weights / weights.sum())))
            else:
                row.append(next_new[0])
                next_new[0] += 1
        rows.append(tuple(row))
    return FeatureTable.from_rows(rows)


def novelty_persistence_experiment(
    psi: float,
    m_grid: Sequence[int],
    unique_value_fraction: float,
    replicates: int,
    n_test: int = 4,
    class_count: int = 2,
    n_features: int = 2,
    epsilon: float = 0.1,
    seed: int = 0,
) -> GapSeries:
    """Joint-vs-marginal gap under the unbounded-alphabet model.

    Training data come from one mutator urn per (class, feature); test items
    plant never-seen values at the given rate.  The extras carry, per grid
    point, the fraction of replicates whose gap exceeds epsilon -- the
    quantity that stays bounded away from zero.
    """
    if psi <= 0:
        raise ValueError(f"psi must be > 0, got {psi}")
    structure = _round_robin(n_test, class_count)
    children = np.random.SeedSequence(seed).spawn(replicates)
    gaps = [[] for _ in m_grid]
    exceed = [[] for _ in m_grid]
    for child in children:
        rng = np.random.default_rng(child)
        for gi, m in enumerate(m_grid):
            cells = {}
            for c in range(1, class_count + 1):
                for j in range(1, n_features + 1):
                    urn = simulate_urn(int(m), psi, rng=rng)
                    cells[(c, j)] = {
                        l: n for l, n in enumerate(urn.species_counts, start=1) if n
                    }
            train_counts = _tensor_from_cells(
                cells, [int(m)] * class_count, class_count, n_features
            )
            test = _plant_test_items(train_counts, structure, unique_value_fraction,
                                     n_features, rng)
            test_counts = count_frequencies(test, Labeling(structure, class_count))
            joint = log_predictive_pe(test_counts, train_counts, psi)
            product = log_marginal_product_pe(test, structure, train_counts, psi)
            gap = abs(joint - product)
            gaps[gi].append(gap)
            exceed[gi].append(1.0 if gap > epsilon else 0.0)
    extras = {"exceed_fraction": tuple(float(np.mean(e)) for e in exceed)}
    return _summarize(m_grid, gaps, replicates, extras)


@dataclass(frozen=True)
class GapDecomposition:
    """Exact gap, its sufficient-statistic part, and the dying remainder."""

    exact_gap: float
    approx_gap: float

    @property
    def residual(self) -> float:
        return abs(self.exact_gap - self.approx_gap)


def gap_decomposition_check(
    test: FeatureTable,
    train: FeatureTable,
    train_labels: Labeling,
    structure: Sequence[int],
    psi: float,
) -> GapDecomposition:
    """Split the joint-minus-marginal log gap on one instance.

    approx_gap keeps only the partition-vector terms (computed through the
    exact one-item updates, which also covers items carrying novel values);
    the residual is the combinatorial prefactor part, which shrinks as the
    per-class training sizes grow.
    """
    test_labeling = Labeling(tuple(structure), train_labels.class_count)
    train_counts = count_frequencies(train, train_labels)
    test_counts = count_frequencies(test, test_labeling)
    exact = (
        log_predictive_pe(test_counts, train_counts, psi)
        - log_marginal_product_pe(test, structure, train_counts, psi)
    )
    approx = 0.0
    for c in range(1, train_labels.class_count + 1):
        items = [row for row, s in zip(test.rows, structure) if s == c]
        if not items:
            continue
        for j in range(1, test.n_features + 1):
            rho = partition_vector(train_counts, c, j)
            rho_joint = combined_partition_vector(train_counts, test_counts, c, j)
            approx += _log_psi_part(rho_joint, psi) - _log_psi_part(rho, psi)
            for row in items:
                t = train_counts.count(c, j, row[j - 1])
                rho_item = update_partition_vector_one_item(rho, t)
                approx -= _log_psi_part(rho_item, psi) - _log_psi_part(rho, psi)
    return GapDecomposition(float(exact), float(approx))


def write_gap_series(series: GapSeries, path) -> None:
    """Plain tabular text: one row per grid point."""
    extra_names = sorted(series.extras)
    with open(path, "w") as fh:
        fh.write("\t".join(["size", "mean_gap", "std_error", "replicates"]
                           + extra_names) + "\n")
        for i, size in enumerate(series.grid):
            row = [str(size), f"{series.mean_gap[i]:.10e}",
                   f"{series.std_error[i]:.10e}", str(series.replicate_count)]
            row += [f"{series.extras[name][i]:.10e}" for name in extra_names]
            fh.write("\t".join(row) + "\n")


def series_as_dict(series: GapSeries) -> dict:
    """Machine-readable form of a GapSeries for structured reports."""
    return {
        "grid": list(series.grid),
        "mean_gap": list(series.mean_gap),
        "std_error": list(series.std_error),
        "replicate_count": series.replicate_count,
        "extras": {name: list(vals) for name, vals in sorted(series.extras.items())},
    }


def load_thresholds() -> dict:
    """Frozen acceptance thresholds calibrated for the experiments."""
    text = resources.files("predclass").joinpath("experiment_thresholds.json").read_text()
    return json.loads(text)
