import math
import random

import pytest

from predclass.asymptotics import (
    GapDecomposition,
    GapSeries,
    GeneratorSpec,
    HypothesisViolationError,
    gap_decomposition_check,
    load_thresholds,
    novelty_persistence_experiment,
    series_as_dict,
    saturation_experiment,
    training_growth_experiment,
    write_gap_series,
)
from predclass.data import FeatureTable, Labeling, count_frequencies
from predclass.partition import log_marginal_product_pe, log_predictive_pe


def small_generator(seed=0):
    return GeneratorSpec.random_categorical(2, 2, 3, seed=seed)


class TestGeneratorSpec:
    def test_rejects_zero_probability(self):
        with pytest.raises(HypothesisViolationError):
            GeneratorSpec(1, 1, {(1, 1): (1.0, 0.0)}, None, 0)

    def test_requires_exactly_one_mode(self):
        with pytest.raises(ValueError):
            GeneratorSpec(1, 1, None, None, 0)
        with pytest.raises(ValueError):
            GeneratorSpec(1, 1, {(1, 1): (0.5, 0.5)}, 2.0, 0)

    def test_random_categorical_strictly_positive(self):
        gen = GeneratorSpec.random_categorical(3, 2, 4, seed=5)
        for probs in gen.category_probs.values():
            assert min(probs) > 0
            assert sum(probs) == pytest.approx(1.0)


class TestGapSeries:
    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            GapSeries((10, 10), (0.1, 0.1), (0.0, 0.0), 1)

    def test_write_tabular(self, tmp_path):
        series = GapSeries((10, 100), (0.5, 0.05), (0.01, 0.001), 7,
                           {"exceed_fraction": (1.0, 0.5)})
        path = tmp_path / "series.tsv"
        write_gap_series(series, path)
        lines = path.read_text().splitlines()
        assert lines[0].split("\t") == ["size", "mean_gap", "std_error",
                                        "replicates", "exceed_fraction"]
        assert lines[1].startswith("10\t")
        assert len(lines) == 3
        as_dict = series_as_dict(series)
        assert as_dict["grid"] == [10, 100]
        assert as_dict["extras"]["exceed_fraction"] == [1.0, 0.5]


class TestTrainingGrowth:
    def test_empty_test_set_gap_is_zero(self):
        series = training_growth_experiment(small_generator(), [10, 20], 0, 5)
        assert series.mean_gap == (0.0, 0.0)

    def test_gap_shrinks(self):
        series = training_growth_experiment(small_generator(3), [10, 1000], 4, 40)
        assert series.mean_gap[1] < series.mean_gap[0]
        assert all(g >= 0 for g in series.mean_gap)

    def test_seed_determinism(self):
        a = training_growth_experiment(small_generator(9), [10, 100], 3, 10)
        b = training_growth_experiment(small_generator(9), [10, 100], 3, 10)
        assert a == b

    def test_rejects_partition_generator(self):
        gen = GeneratorSpec(2, 2, None, 5.0, 0)
        with pytest.raises(ValueError):
            training_growth_experiment(gen, [10], 2, 2)


class TestTestSaturation:
    def test_zero_block_gap_is_zero(self):
        series = saturation_experiment(small_generator(1), [10, 50], 0, 5)
        assert series.mean_gap == (0.0, 0.0)

    def test_gap_shrinks_and_agreement_rises(self):
        series = saturation_experiment(small_generator(2), [10, 500], 3, 30)
        assert series.mean_gap[1] < series.mean_gap[0]
        assert series.extras["argmax_agreement"][-1] >= 0.9

    def test_seed_determinism(self):
        a = saturation_experiment(small_generator(4), [10, 40], 2, 8)
        b = saturation_experiment(small_generator(4), [10, 40], 2, 8)
        assert a == b

    def test_frozen_config_meets_thresholds(self):
        th = load_thresholds()["test_saturation"]
        gen = GeneratorSpec.random_categorical(
            th["class_count"], th["n_features"], th["alphabet_size"],
            seed=th["seed"])
        series = saturation_experiment(gen, th["n_grid"], th["delta"],
                                       th["replicates"],
                                       m_per_class=th["m_per_class"])
        assert all(b < a for a, b in zip(series.mean_gap, series.mean_gap[1:]))
        assert series.mean_gap[-1] <= th["final_mean_gap_max"]
        assert series.extras["argmax_agreement"][-1] >= th["min_argmax_agreement"]


class TestNoveltyPersistence:
    def test_single_item_gap_is_zero(self):
        series = novelty_persistence_experiment(5.0, [20, 50], 1.0, 10, n_test=1)
        assert series.mean_gap == pytest.approx((0.0, 0.0), abs=1e-12)

    def test_singleton_classes_without_novel_values_small_gap(self):
        # one test item per class and no planted novelty: joint == product
        series = novelty_persistence_experiment(5.0, [200, 2000], 0.0, 10,
                                                n_test=2, class_count=2)
        assert series.mean_gap[-1] == pytest.approx(0.0, abs=1e-10)

    def test_planted_novelty_keeps_gap_alive(self):
        series = novelty_persistence_experiment(5.0, [100, 1000], 0.8, 30,
                                                n_test=4, seed=3)
        assert series.extras["exceed_fraction"][-1] > 0.2

    def test_seed_determinism(self):
        a = novelty_persistence_experiment(5.0, [50, 100], 0.5, 6, seed=11)
        b = novelty_persistence_experiment(5.0, [50, 100], 0.5, 6, seed=11)
        assert a == b

    def test_psi_domain(self):
        with pytest.raises(ValueError):
            novelty_persistence_experiment(0.0, [10], 0.5, 2)


class TestGapDecomposition:
    def _instance(self, m_per_class, seed=0):
        rng = random.Random(seed)
        train, labels = [], []
        for c in (1, 2):
            for _ in range(m_per_class):
                train.append((rng.randint(1, 6), rng.randint(1, 6)))
                labels.append(c)
        test = [(rng.randint(1, 8), rng.randint(1, 8)) for _ in range(4)]
        structure = (1, 2, 1, 2)
        return (FeatureTable.from_rows(train), Labeling.from_sequence(labels, 2),
                FeatureTable.from_rows(test), structure)

    def test_empty_test(self):
        train, labels, *_ = self._instance(5)
        check = gap_decomposition_check(FeatureTable.from_rows([]), train, labels,
                                        (), 5.0)
        assert check == GapDecomposition(0.0, 0.0)
        assert check.residual == 0.0

    def test_exact_gap_matches_direct_model_calls(self):
        train, labels, test, structure = self._instance(20, seed=4)
        check = gap_decomposition_check(test, train, labels, structure, 5.0)
        train_counts = count_frequencies(train, labels)
        test_counts = count_frequencies(test, Labeling(structure, 2))
        direct = (log_predictive_pe(test_counts, train_counts, 5.0)
                  - log_marginal_product_pe(test, structure, train_counts, 5.0))
        assert check.exact_gap == pytest.approx(direct, abs=1e-12)

    def test_residual_shrinks_with_training_size(self):
        residuals = []
        for m in (50, 500, 5000):
            train, labels, test, structure = self._instance(m, seed=1)
            check = gap_decomposition_check(test, train, labels, structure, 5.0)
            residuals.append(check.residual)
        assert residuals[1] < residuals[0]
        assert residuals[2] < residuals[1]

    def test_unique_value_cancellation_when_item_moves_class(self):
        # an item carrying a brand-new value contributes +log(psi) to one
        # class's partition-weight bracket and -log(psi) to the other's when
        # reassigned, netting zero in the joint log-ratio
        from predclass.data import combined_partition_vector
        from predclass.partition import _log_psi_part

        psi = 5.0
        train = FeatureTable.from_rows([(1,), (1,), (2,), (2,)])
        labels = Labeling.from_sequence([1, 1, 2, 2], 2)
        train_counts = count_frequencies(train, labels)
        novel_item = (9,)
        structure_a = (1,)
        structure_b = (2,)
        test = FeatureTable.from_rows([novel_item])

        def bracket(structure, c):
            test_counts = count_frequencies(test, Labeling(structure, 2))
            combined = combined_partition_vector(train_counts, test_counts, c, 1)
            from predclass.data import partition_vector
            base = partition_vector(train_counts, c, 1)
            return (_log_psi_part(combined, psi) - _log_psi_part(base, psi))

        delta_c1 = bracket(structure_a, 1) - bracket(structure_b, 1)
        delta_c2 = bracket(structure_a, 2) - bracket(structure_b, 2)
        assert delta_c1 == pytest.approx(math.log(psi), abs=1e-12)
        assert delta_c2 == pytest.approx(-math.log(psi), abs=1e-12)
        assert delta_c1 + delta_c2 == pytest.approx(0.0, abs=1e-12)


def test_thresholds_file_loads():
    thresholds = load_thresholds()
    assert set(thresholds) == {"training_growth", "test_saturation",
                               "novelty_persistence"}
    assert thresholds["training_growth"]["final_mean_gap_max"] == 0.05
