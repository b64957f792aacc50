import math
import random
from fractions import Fraction

import numpy as np
import pytest

from predclass.data import FeatureTable, Labeling, count_frequencies
from predclass.finite import (
    AlphabetViolationError,
    FiniteModelConfig,
    demo_config,
    log_label_prior,
    log_predictive_finite,
    log_structure_prior,
    mdpc_classify,
    mpc_classify,
    resolve_alphabet,
    spc_classify,
)
from predclass.structures import EnumerationTooLargeError, enumerate_structures

import oracles

# Exact predictive values of the demo instance for every structure, from the
# rational oracle (verified independently by a sequential chain-rule oracle).
DEMO_PREDICTIVES = {
    (1, 1, 1): 1 / 576000,
    (1, 1, 2): 1 / 589824,
    (1, 2, 1): 1 / 589824,
    (1, 2, 2): 1 / 786432,
    (2, 1, 1): 1 / 786432,
    (2, 1, 2): 1 / 1048576,
    (2, 2, 1): 1 / 589824,
    (2, 2, 2): 1 / 1080000,
}
DEMO_PRIORS = {
    (1, 1, 1): 2 / 13,
    (1, 1, 2): 3 / 26,
    (1, 2, 1): 3 / 26,
    (1, 2, 2): 3 / 26,
    (2, 1, 1): 3 / 26,
    (2, 1, 2): 3 / 26,
    (2, 2, 1): 3 / 26,
    (2, 2, 2): 2 / 13,
}
# Unnormalized per-item class sums of the demo marginalized classifier.
DEMO_MARGINAL_SUMS = {
    (1, 1): 8.050641442975428e-07, (1, 2): 5.948341130531071e-07,
    (2, 1): 7.194779877279211e-07, (2, 2): 6.804202696559184e-07,
    (3, 1): 8.050641442975428e-07, (3, 2): 5.948341130531071e-07,
}


def random_instance(seed, n_max=4, k_max=3, d_max=3, r=3, m_max=6):
    rng = random.Random(seed)
    k = rng.randint(1, k_max)
    d = rng.randint(1, d_max)
    n = rng.randint(0, n_max)
    m = rng.randint(k, m_max)
    train = [tuple(rng.randint(1, r) for _ in range(d)) for _ in range(m)]
    # every class occupied at least once so priors stay generic
    labels = [c for c in range(1, k + 1)] + [rng.randint(1, k) for _ in range(m - k)]
    test = [tuple(rng.randint(1, r) for _ in range(d)) for _ in range(n)]
    return (FeatureTable.from_rows(train), Labeling.from_sequence(labels, k),
            FeatureTable.from_rows(test), d, r)


class TestLogPredictive:
    def test_demo_every_structure_matches_exact_oracle(self, demo):
        train, labels, test = demo
        cfg = demo_config()
        train_counts = count_frequencies(train, labels)
        for structure, expected in DEMO_PREDICTIVES.items():
            test_counts = count_frequencies(test, Labeling(structure, 2))
            got = log_predictive_finite(test_counts, train_counts, cfg)
            assert got == pytest.approx(math.log(expected), abs=1e-10)

    def test_empty_test_tensor_is_certain(self, demo):
        train, labels, _ = demo
        train_counts = count_frequencies(train, labels)
        empty = count_frequencies(FeatureTable.from_rows([]),
                                  Labeling.from_sequence([], 2))
        assert log_predictive_finite(empty, train_counts, demo_config()) == 0.0

    def test_alphabet_violation(self, demo):
        train, labels, _ = demo
        train_counts = count_frequencies(train, labels)
        bad = count_frequencies(FeatureTable.from_rows([(4, 1, 1, 1)]),
                                Labeling.from_sequence([1], 2))
        with pytest.raises(AlphabetViolationError):
            log_predictive_finite(bad, train_counts, demo_config())

    @pytest.mark.parametrize("seed", range(15))
    def test_beta_binomial_reduction(self, seed):
        # k=1, d=1, r=2: the predictive is the ordered Beta-Binomial ratio
        rng = random.Random(seed)
        alpha, beta = rng.uniform(0.2, 3), rng.uniform(0.2, 3)
        m1, m2 = rng.randint(0, 5), rng.randint(0, 5)
        n1, n2 = rng.randint(0, 4), rng.randint(0, 4)
        train = FeatureTable.from_rows([(1,)] * m1 + [(2,)] * m2)
        labels = Labeling.from_sequence([1] * (m1 + m2), 1)
        test = FeatureTable.from_rows([(1,)] * n1 + [(2,)] * n2)
        cfg = FiniteModelConfig(
            alphabet_sizes=(2,), lambda_mode="constant", lambda_value=1.0,
            lambda_table={(1, 1, 1): alpha, (1, 1, 2): beta},
        )
        got = log_predictive_finite(
            count_frequencies(test, Labeling.from_sequence([1] * (n1 + n2), 1)),
            count_frequencies(train, labels), cfg)
        # ordered Beta-Binomial: beta(n1+m1+a, n2+m2+b) / beta(m1+a, m2+b)
        expected = (math.lgamma(n1 + m1 + alpha) + math.lgamma(n2 + m2 + beta)
                    - math.lgamma(n1 + n2 + m1 + m2 + alpha + beta)
                    - math.lgamma(m1 + alpha) - math.lgamma(m2 + beta)
                    + math.lgamma(m1 + m2 + alpha + beta))
        assert got == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("seed", range(20))
    def test_log_space_matches_exact_rationals(self, seed):
        train, labels, test, d, r = random_instance(seed, m_max=10)
        cfg = FiniteModelConfig(alphabet_sizes=(r,) * d, lambda_mode="uniform")
        structure = tuple(random.Random(seed + 1).randint(1, labels.class_count)
                          for _ in range(test.n_items))
        got = log_predictive_finite(
            count_frequencies(test, Labeling(structure, labels.class_count)),
            count_frequencies(train, labels), cfg)
        exact = oracles.predictive_finite_exact(
            test.rows, structure, train.rows, labels.assignments,
            labels.class_count, (r,) * d, oracles.uniform_lam())
        assert got == pytest.approx(float(math.log(exact)), abs=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_log_space_exact_with_counts_up_to_fifty(self, seed):
        # cell counts approach 50 here; log-space evaluation must still track
        # the exact rational value to 1e-9
        rng = random.Random(7000 + seed)
        k, d, r = 2, 2, 3
        train = [tuple(rng.randint(1, r) for _ in range(d)) for _ in range(120)]
        labels = [1 + (i % k) for i in range(120)]
        test = [tuple(rng.randint(1, r) for _ in range(d)) for _ in range(30)]
        structure = tuple(rng.randint(1, k) for _ in range(30))
        cfg = FiniteModelConfig(alphabet_sizes=(r,) * d, lambda_mode="uniform")
        got = log_predictive_finite(
            count_frequencies(FeatureTable.from_rows(test), Labeling(structure, k)),
            count_frequencies(FeatureTable.from_rows(train),
                              Labeling.from_sequence(labels, k)), cfg)
        exact = oracles.predictive_finite_exact(
            test, structure, train, labels, k, (r,) * d, oracles.uniform_lam())
        assert got == pytest.approx(float(math.log(exact)), abs=1e-9)


class TestStructurePrior:
    def test_demo_structure_prior_is_3_26(self, demo):
        train, labels, _ = demo
        got = log_structure_prior(Labeling((1, 2, 1), 2), labels, demo_config())
        assert got == pytest.approx(math.log(3 / 26), abs=1e-12)

    def test_demo_all_ones_prior(self, demo):
        train, labels, _ = demo
        got = log_structure_prior(Labeling((1, 1, 1), 2), labels, demo_config())
        assert got == pytest.approx(math.log(0.1538462), rel=1e-5)

    def test_empty_test_labeling(self, demo):
        _, labels, _ = demo
        got = log_structure_prior(Labeling.from_sequence([], 2), labels, demo_config())
        assert got == 0.0

    def test_label_prior_is_structure_prior_at_one_item(self, demo):
        _, labels, _ = demo
        cfg = demo_config()
        for c in (1, 2):
            assert log_label_prior(c, labels, cfg) == pytest.approx(
                log_structure_prior(Labeling((c,), 2), labels, cfg), abs=1e-12)


class TestEnumeration:
    def test_order_matches_lexicographic_last_fastest(self):
        got = enumerate_structures(3, 2)
        assert got == ((1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2),
                       (2, 1, 1), (2, 1, 2), (2, 2, 1), (2, 2, 2))

    def test_zero_items(self):
        assert enumerate_structures(0, 5) == ((),)

    def test_base_k_counting_oracle(self):
        got = enumerate_structures(2, 3)
        expected = []
        for value in range(9):
            expected.append((value // 3 + 1, value % 3 + 1))
        assert got == tuple(expected)

    def test_cap(self):
        with pytest.raises(EnumerationTooLargeError) as err:
            enumerate_structures(30, 2, cap=2**20)
        assert err.value.structure_count == 2**30


class TestSimultaneous:
    def test_demo_joint_weights_match_oracle(self, demo):
        train, labels, test = demo
        res = spc_classify(test, train, labels, demo_config())
        for structure, logw in zip(res.posterior.structures,
                                   res.posterior.log_unnormalized):
            expected = DEMO_PREDICTIVES[structure] * DEMO_PRIORS[structure]
            assert logw == pytest.approx(math.log(expected), abs=1e-10)

    def test_demo_argmax(self, demo):
        # correct argmax for these tables; the source document's table rows
        # for three structures are arithmetically wrong (see README)
        train, labels, test = demo
        res = spc_classify(test, train, labels, demo_config())
        assert res.canonical == (1, 1, 1)
        assert res.best == ((1, 1, 1),)

    def test_demo_exact_tie_between_equal_structures(self, demo):
        train, labels, test = demo
        res = spc_classify(test, train, labels, demo_config())
        by_structure = dict(zip(res.posterior.structures,
                                res.posterior.log_unnormalized))
        assert by_structure[(1, 2, 1)] == pytest.approx(
            by_structure[(2, 2, 1)], abs=1e-12)
        assert math.exp(by_structure[(1, 2, 1)]) == pytest.approx(
            1.956255e-7, rel=1e-3)

    def test_empty_test_set(self, demo):
        train, labels, _ = demo
        res = spc_classify(FeatureTable.from_rows([]), train, labels, demo_config())
        assert res.canonical == ()
        assert np.exp(res.posterior.log_posterior).sum() == pytest.approx(1.0)

    def test_posterior_normalizes(self, demo):
        train, labels, test = demo
        res = spc_classify(test, train, labels, demo_config())
        assert np.exp(res.posterior.log_posterior).sum() == pytest.approx(
            1.0, abs=1e-10)

    @pytest.mark.parametrize("seed", range(12))
    def test_argmax_matches_exact_rational_oracle(self, seed):
        train, labels, test, d, r = random_instance(seed, n_max=4, k_max=2)
        cfg = FiniteModelConfig(alphabet_sizes=(r,) * d, lambda_mode="uniform")
        res = spc_classify(test, train, labels, cfg)
        weights = oracles.finite_structure_weights(
            test.rows, train.rows, labels.assignments, labels.class_count,
            (r,) * d, oracles.uniform_lam(),
            [Fraction(1)] * labels.class_count)
        best = max(weights.values())
        exact_argmax = sorted(s for s, w in weights.items() if w == best)
        assert res.canonical == exact_argmax[0]

    def test_row_permutation_invariance(self, demo):
        train, labels, test = demo
        res = spc_classify(test, train, labels, demo_config())
        perm = [2, 0, 1]
        permuted = FeatureTable.from_rows([test.rows[i] for i in perm])
        res_p = spc_classify(permuted, train, labels, demo_config())
        lookup = dict(zip(res_p.posterior.structures,
                          res_p.posterior.log_unnormalized))
        for structure, logw in zip(res.posterior.structures,
                                   res.posterior.log_unnormalized):
            image = tuple(structure[i] for i in perm)
            assert logw == pytest.approx(lookup[image], abs=1e-10)

    def test_value_relabeling_invariance_with_symmetric_lambda(self, demo):
        train, labels, test = demo
        cfg = FiniteModelConfig(alphabet_sizes=(3, 3, 3, 3), lambda_mode="uniform")
        res = spc_classify(test, train, labels, cfg)
        swap = {1: 3, 2: 2, 3: 1}

        def relabel(table):
            return FeatureTable.from_rows(
                [(swap[r[0]],) + r[1:] for r in table.rows])

        res_p = spc_classify(relabel(test), relabel(train), labels, cfg)
        np.testing.assert_allclose(res.posterior.log_unnormalized,
                                   res_p.posterior.log_unnormalized, atol=1e-10)


class TestMarginal:
    def test_single_class_is_certain(self):
        train = FeatureTable.from_rows([(1, 2), (2, 1)])
        labels = Labeling.from_sequence([1, 1], 1)
        test = FeatureTable.from_rows([(1, 1)])
        res = mpc_classify(test, train, labels,
                           FiniteModelConfig(alphabet_sizes=(2, 2)))
        np.testing.assert_allclose(res.posteriors(), [[1.0]])

    def test_per_item_weights_are_single_item_slices(self, demo):
        train, labels, test = demo
        cfg = demo_config()
        train_counts = count_frequencies(train, labels)
        res = mpc_classify(test, train, labels, cfg)
        for i, row in enumerate(test.rows):
            logw = []
            for c in (1, 2):
                single = count_frequencies(FeatureTable.from_rows([row]),
                                           Labeling((c,), 2))
                logw.append(
                    log_predictive_finite(single, train_counts, cfg)
                    + log_label_prior(c, labels, cfg))
            logw = np.array(logw)
            np.testing.assert_allclose(res.log_posteriors[i],
                                       logw - np.logaddexp(*logw), atol=1e-12)

    def test_rows_normalize(self, demo):
        train, labels, test = demo
        res = mpc_classify(test, train, labels, demo_config())
        np.testing.assert_allclose(res.posteriors().sum(axis=1), 1.0, atol=1e-10)

    @pytest.mark.parametrize("seed", range(8))
    def test_single_item_marginal_equals_simultaneous(self, seed):
        train, labels, test, d, r = random_instance(seed, n_max=1, k_max=3)
        if test.n_items == 0:
            test = FeatureTable.from_rows([tuple(1 for _ in range(d))])
        cfg = FiniteModelConfig(alphabet_sizes=(r,) * d)
        marginal = mpc_classify(test, train, labels, cfg)
        joint = spc_classify(test, train, labels, cfg)
        np.testing.assert_allclose(
            marginal.log_posteriors[0],
            joint.posterior.log_posterior, atol=1e-10)
        assert marginal.labels == joint.canonical


class TestMarginalized:
    def test_demo_argmax_and_sums(self, demo):
        train, labels, test = demo
        res = mdpc_classify(test, train, labels, demo_config())
        assert res.labels == (1, 1, 1)
        for (item, c), expected in DEMO_MARGINAL_SUMS.items():
            got = math.exp(res.log_unnormalized_sums[item - 1][c - 1])
            assert got == pytest.approx(expected, rel=1e-9)

    def test_rows_normalize(self, demo):
        train, labels, test = demo
        res = mdpc_classify(test, train, labels, demo_config())
        np.testing.assert_allclose(res.posteriors().sum(axis=1), 1.0, atol=1e-10)

    def test_single_item_equals_marginal(self, demo):
        train, labels, test = demo
        single = FeatureTable.from_rows(test.rows[:1])
        a = mdpc_classify(single, train, labels, demo_config())
        b = mpc_classify(single, train, labels, demo_config())
        np.testing.assert_allclose(a.log_posteriors, b.log_posteriors, atol=1e-10)

    @pytest.mark.parametrize("seed", range(10))
    def test_marginals_match_exhaustive_sum_oracle(self, seed):
        train, labels, test, d, r = random_instance(seed, n_max=3, k_max=3)
        cfg = FiniteModelConfig(alphabet_sizes=(r,) * d)
        res = mdpc_classify(test, train, labels, cfg)
        weights = oracles.finite_structure_weights(
            test.rows, train.rows, labels.assignments, labels.class_count,
            (r,) * d, oracles.uniform_lam(), [Fraction(1)] * labels.class_count)
        exact = oracles.marginals_from_weights(weights, test.n_items,
                                               labels.class_count)
        expected = np.array(exact, dtype=float).reshape(test.n_items,
                                                        labels.class_count)
        np.testing.assert_allclose(res.posteriors(), expected, atol=1e-10)

    def test_argmax_invariant_to_weight_scaling(self, demo):
        from predclass.structures import StructurePosterior, argmax_labels, \
            marginal_log_posteriors
        train, labels, test = demo
        res = mdpc_classify(test, train, labels, demo_config())
        scaled = StructurePosterior(
            res.joint.structures,
            res.joint.log_unnormalized + 7.5,
            res.joint.log_normalizer + 7.5,
        )
        assert argmax_labels(marginal_log_posteriors(scaled, 2)) == res.labels


class TestResolveAlphabet:
    def test_inference_from_data(self, demo):
        train, labels, test = demo
        cfg = FiniteModelConfig(alphabet_sizes=None)
        assert resolve_alphabet(cfg, train, test) == (3, 3, 3, 3)

    def test_explicit_overrides(self, demo):
        train, labels, test = demo
        cfg = FiniteModelConfig(alphabet_sizes=(5, 5, 5, 5))
        assert resolve_alphabet(cfg, train, test) == (5, 5, 5, 5)

    def test_violation(self, demo):
        train, *_ = demo
        with pytest.raises(AlphabetViolationError):
            resolve_alphabet(FiniteModelConfig(alphabet_sizes=(2, 3, 3, 3)), train)
