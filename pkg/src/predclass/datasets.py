"""Bundled demo data: ten training items over four ternary features, two classes.

Two test sets accompany the training table: a three-item unlabeled set for
the fixed-alphabet classifiers, and a ten-item labeled set whose later
items carry feature values never seen in training, exercising the
unbounded-alphabet model.  The same tables ship as CSV files under
fixtures/ for the command line.

The recomputed sufficient statistics of the extended set are exposed for
reference because the document these tables originate from prints a few
inconsistent intermediate vectors; the raw tables here are authoritative
and everything downstream is derived from them.
"""

from __future__ import annotations

from .data import FeatureTable, Labeling

DEMO_TRAIN_ROWS = (
    (1, 2, 1, 3), (1, 2, 2, 3), (2, 1, 2, 1), (3, 3, 3, 1), (3, 3, 1, 2),
    (1, 3, 2, 2), (2, 3, 1, 1), (2, 2, 3, 3), (1, 2, 2, 3), (3, 1, 2, 2),
)
DEMO_TRAIN_LABELS = (1, 1, 1, 1, 1, 2, 2, 2, 2, 2)

DEMO_TEST_ROWS = (
    (1, 2, 3, 1), (1, 1, 2, 1), (2, 3, 1, 1),
)

DEMO_EXTENDED_TEST_ROWS = (
    (1, 2, 3, 1), (1, 1, 2, 1), (2, 3, 1, 1), (1, 3, 4, 3), (1, 4, 5, 1),
    (1, 3, 3, 3), (4, 2, 3, 1), (5, 1, 3, 4), (6, 4, 2, 3), (7, 1, 3, 4),
)
DEMO_EXTENDED_TEST_LABELS = (1, 1, 1, 1, 1, 2, 2, 2, 2, 2)


def demo_train() -> tuple[FeatureTable, Labeling]:
    return (FeatureTable.from_rows(DEMO_TRAIN_ROWS),
            Labeling.from_sequence(DEMO_TRAIN_LABELS, 2))


def demo_test() -> FeatureTable:
    return FeatureTable.from_rows(DEMO_TEST_ROWS)


def demo_extended_test() -> tuple[FeatureTable, Labeling]:
    return (FeatureTable.from_rows(DEMO_EXTENDED_TEST_ROWS),
            Labeling.from_sequence(DEMO_EXTENDED_TEST_LABELS, 2))


# Recomputed from the raw tables above (psi-free statistics). Training-cell
# partition vectors first, then the combined train+extended-test vectors.
DEMO_TRAINING_PARTITIONS = {
    (1, 1): {1: 1, 2: 2}, (1, 2): {1: 1, 2: 2}, (1, 3): {1: 1, 2: 2},
    (1, 4): {1: 1, 2: 2}, (2, 1): {1: 1, 2: 2}, (2, 2): {1: 1, 2: 2},
    (2, 3): {1: 2, 3: 1}, (2, 4): {1: 1, 2: 2},
}
DEMO_COMBINED_PARTITIONS = {
    (1, 1): {2: 2, 6: 1}, (1, 2): {1: 1, 2: 1, 3: 1, 4: 1},
    (1, 3): {1: 2, 2: 1, 3: 2}, (1, 4): {1: 1, 3: 1, 6: 1},
    (2, 1): {1: 5, 2: 1, 3: 1}, (2, 2): {1: 1, 3: 3},
    (2, 3): {1: 1, 4: 1, 5: 1}, (2, 4): {2: 3, 4: 1},
}
