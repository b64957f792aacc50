"""Data model and sufficient statistics shared by both classification models.

Items are rows of positive integer category codes, one code per feature.
Classified data is summarized by per (class, feature, value) counts; the
unbounded-alphabet model compresses each (class, feature) count vector
further into its partition vector (frequencies of frequencies).  Value
codes are kept as sparse mappings throughout: the unbounded-alphabet model
never fixes an alphabet, so counts index by the codes actually observed.

Class and feature indices are 1-based in every public interface; all types
are immutable values and all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


class PairingError(ValueError):
    """Two structures that must describe the same items or layout do not."""


class InconsistentStatisticsError(ValueError):
    """A sufficient-statistic update contradicts the statistics it updates."""


@dataclass(frozen=True)
class FeatureTable:
    """Items-by-features matrix of positive integer category codes."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise PairingError(f"rows have differing lengths {sorted(widths)}")
        for i, row in enumerate(self.rows):
            for j, v in enumerate(row, start=1):
                if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                    raise ValueError(
                        f"feature codes must be integers >= 1; got {v!r} at item "
                        f"{i + 1}, feature {j}"
                    )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "FeatureTable":
        return cls(tuple(tuple(int(v) for v in row) for row in rows))

    @property
    def n_items(self) -> int:
        return len(self.rows)

    @property
    def n_features(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def value(self, i: int, j: int) -> int:
        """Code of feature j on item i (both 1-based)."""
        return self.rows[i - 1][j - 1]

    def max_code(self, j: int) -> int:
        """Largest observed code for feature j; 0 when there are no items."""
        return max((row[j - 1] for row in self.rows), default=0)

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Labeling:
    """Class assignment for each item of a paired FeatureTable."""

    assignments: tuple[int, ...]
    class_count: int

    def __post_init__(self):
        if self.class_count < 1:
            raise ValueError(f"class_count must be >= 1, got {self.class_count}")
        for i, c in enumerate(self.assignments):
            if not 1 <= c <= self.class_count:
                raise ValueError(
                    f"label {c} of item {i + 1} outside 1..{self.class_count}"
                )

    @classmethod
    def from_sequence(cls, labels: Iterable[int], class_count: int | None = None) -> "Labeling":
        labs = tuple(int(c) for c in labels)
        if class_count is None:
            class_count = max(labs, default=1)
        return cls(labs, class_count)

    @property
    def n_items(self) -> int:
        return len(self.assignments)

    def class_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.class_count
        for c in self.assignments:
            sizes[c - 1] += 1
        return tuple(sizes)

    def __len__(self) -> int:
        return len(self.assignments)


@dataclass(frozen=True)
class CountTensor:
    """Per (class, feature, value) frequencies plus per-class item counts.

    Only strictly positive counts are stored; `count` returns 0 elsewhere.
    """

    class_count: int
    n_features: int
    cells: Mapping[tuple[int, int], Mapping[int, int]] = field(repr=False)
    class_sizes: tuple[int, ...] = ()

    def count(self, c: int, j: int, l: int) -> int:
        return self.cells.get((c, j), {}).get(l, 0)

    def cell(self, c: int, j: int) -> Mapping[int, int]:
        """Sparse value -> count mapping for one (class, feature)."""
        if not (1 <= c <= self.class_count and 1 <= j <= self.n_features):
            raise IndexError(f"cell ({c}, {j}) outside {self.class_count} classes x "
                             f"{self.n_features} features")
        return self.cells.get((c, j), {})

    def class_size(self, c: int) -> int:
        return self.class_sizes[c - 1]

    @property
    def total_items(self) -> int:
        return sum(self.class_sizes)

    def max_code(self, j: int) -> int:
        codes = [max(self.cells[(c, j)], default=0)
                 for c in range(1, self.class_count + 1) if (c, j) in self.cells]
        return max(codes, default=0)


@dataclass(frozen=True)
class PartitionVector:
    """Frequencies of frequencies: rho[t] = number of values observed exactly t times.

    Values never observed are not tallied.  Only nonzero entries are stored;
    the invariant sum_t t*rho[t] == total always holds.
    """

    rho: Mapping[int, int]
    total: int

    def __post_init__(self):
        weight = 0
        for t, r in self.rho.items():
            if t < 1 or r < 0:
                raise ValueError(f"invalid partition entry rho[{t}] = {r}")
            weight += t * r
        if weight != self.total:
            raise InconsistentStatisticsError(
                f"partition vector accounts for {weight} observations, not {self.total}"
            )

    def count(self, t: int) -> int:
        return self.rho.get(t, 0)

    @property
    def support_size(self) -> int:
        """Largest t with rho[t] > 0; 0 for the empty partition."""
        return max((t for t, r in self.rho.items() if r > 0), default=0)

    @property
    def block_count(self) -> int:
        """Number of distinct values observed."""
        return sum(self.rho.values())


def count_frequencies(data: FeatureTable, labels: Labeling) -> CountTensor:
    """Tally per (class, feature, value) counts and per-class sizes."""
    if data.n_items != labels.n_items:
        raise PairingError(
            f"{data.n_items} items but {labels.n_items} labels"
        )
    cells: dict[tuple[int, int], dict[int, int]] = {}
    for row, c in zip(data.rows, labels.assignments):
        for j, v in enumerate(row, start=1):
            cell = cells.setdefault((c, j), {})
            cell[v] = cell.get(v, 0) + 1
    return CountTensor(
        class_count=labels.class_count,
        n_features=data.n_features if data.rows else 0,
        cells=cells,
        class_sizes=labels.class_sizes(),
    )


def one_item_tensor(row: Sequence[int], c: int, class_count: int) -> CountTensor:
    """CountTensor for a single item assigned to class c."""
    if not 1 <= c <= class_count:
        raise IndexError(f"class {c} outside 1..{class_count}")
    cells = {(c, j): {int(v): 1} for j, v in enumerate(row, start=1)}
    sizes = tuple(1 if cc == c else 0 for cc in range(1, class_count + 1))
    return CountTensor(class_count, len(row), cells, sizes)


def _rho_from_cell(cell: Mapping[int, int]) -> dict[int, int]:
    rho: dict[int, int] = {}
    for count in cell.values():
        if count > 0:
            rho[count] = rho.get(count, 0) + 1
    return rho


def partition_vector(counts: CountTensor, c: int, j: int) -> PartitionVector:
    """Partition vector of one (class, feature) cell."""
    cell = counts.cell(c, j)
    return PartitionVector(_rho_from_cell(cell), counts.class_size(c))


def combined_partition_vector(
    train: CountTensor, test: CountTensor, c: int, j: int
) -> PartitionVector:
    """Partition vector of the elementwise sum of a training and a test cell.

    A tensor with no items (zero features) is treated as all-zero counts, so
    combining with it reduces to partition_vector of the other side.
    """
    if train.class_count != test.class_count:
        raise PairingError(
            f"tensors disagree on classes: {train.class_count} vs {test.class_count}"
        )
    if train.n_features and test.n_features and train.n_features != test.n_features:
        raise PairingError(
            f"tensors disagree on features: {train.n_features} vs {test.n_features}"
        )
    n_features = train.n_features or test.n_features
    if not (1 <= c <= train.class_count and 1 <= j <= n_features):
        raise IndexError(f"cell ({c}, {j}) outside {train.class_count} classes x "
                         f"{n_features} features")
    merged = dict(train.cells.get((c, j), {}))
    for v, n in test.cells.get((c, j), {}).items():
        merged[v] = merged.get(v, 0) + n
    return PartitionVector(_rho_from_cell(merged), train.class_size(c) + test.class_size(c))


def update_partition_vector_one_item(
    rho: PartitionVector, t_observed: int
) -> PartitionVector:
    """Partition vector after one more observation of a value seen t_observed times.

    t_observed = 0 means the new observation carries a previously unseen
    value, which lands in the singleton bucket; otherwise one value moves
    from the t_observed bucket to the t_observed+1 bucket.
    """
    if t_observed < 0:
        raise ValueError(f"t_observed must be >= 0, got {t_observed}")
    updated = dict(rho.rho)
    if t_observed == 0:
        updated[1] = updated.get(1, 0) + 1
    else:
        if updated.get(t_observed, 0) < 1:
            raise InconsistentStatisticsError(
                f"no value has been observed exactly {t_observed} times"
            )
        updated[t_observed] -= 1
        if updated[t_observed] == 0:
            del updated[t_observed]
        updated[t_observed + 1] = updated.get(t_observed + 1, 0) + 1
    return PartitionVector(updated, rho.total + 1)
