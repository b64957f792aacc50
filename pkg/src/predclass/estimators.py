"""Scikit-learn estimator fronts for both classification models.

The estimators accept the usual (X, y) arrays with arbitrary label values,
map them onto the 1-based internal representation, and delegate to the
functional model layer.  `rule` picks the decision rule:

* "marginal"     -- items classified independently (fast, no enumeration);
* "simultaneous" -- argmax over the joint posterior on all assignments;
* "marginalized" -- per-item marginals of that joint posterior.

predict_proba returns per-item class posteriors for every rule; for
"simultaneous" these are the marginals of the joint posterior (the joint
argmax itself is available from joint_posterior / predict).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .data import FeatureTable, Labeling, count_frequencies
from .finite import (
    FiniteModelConfig,
    mdpc_classify,
    mpc_classify,
    spc_classify,
)
from .partition import (
    PartitionModelConfig,
    pe_mdpc_classify,
    pe_mpc_classify,
    pe_spc_classify,
)
from .structures import DEFAULT_ENUMERATION_CAP

_RULES = ("marginal", "simultaneous", "marginalized")


class _PredictiveClassifierBase(ClassifierMixin, BaseEstimator):
    """Shared fit/predict plumbing; subclasses supply the model config."""

    def _check_features(self, X):
        X = check_array(X, dtype=np.int64)
        if X.size and X.min() < 1:
            raise ValueError("feature codes must be positive integers (1-based)")
        return X

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.int64)
        if self.rule not in _RULES:
            raise ValueError(f"rule must be one of {_RULES}, got {self.rule!r}")
        if X.size and X.min() < 1:
            raise ValueError("feature codes must be positive integers (1-based)")
        self._config()  # surfaces bad hyperparameters at fit time
        self.classes_ = unique_labels(y)
        self.n_features_in_ = X.shape[1]
        index = {label: i + 1 for i, label in enumerate(self.classes_)}
        self._train_table = FeatureTable.from_rows(X.tolist())
        self._train_labels = Labeling.from_sequence(
            (index[label] for label in y), len(self.classes_)
        )
        return self

    def _dispatch(self, table):
        raise NotImplementedError

    def predict(self, X):
        check_is_fitted(self, "classes_")
        X = self._check_features(X)
        result = self._dispatch(FeatureTable.from_rows(X.tolist()))
        labels = result.canonical if hasattr(result, "canonical") else result.labels
        return self.classes_[np.asarray(labels, dtype=int) - 1]

    def predict_log_proba(self, X):
        check_is_fitted(self, "classes_")
        X = self._check_features(X)
        table = FeatureTable.from_rows(X.tolist())
        result = self._marginal_dispatch(table)
        return np.asarray(result.log_posteriors, dtype=float)

    def predict_proba(self, X):
        return np.exp(self.predict_log_proba(X))

    def joint_posterior(self, X):
        """Joint structure posterior over all assignments of the rows of X."""
        check_is_fitted(self, "classes_")
        X = self._check_features(X)
        return self._joint_dispatch(FeatureTable.from_rows(X.tolist()))

    def training_counts(self):
        check_is_fitted(self, "classes_")
        return count_frequencies(self._train_table, self._train_labels)


class DirichletMultinomialClassifier(_PredictiveClassifierBase):
    """Predictive classifier for categorical features with fixed alphabets.

    Parameters mirror FiniteModelConfig: alphabet_sizes (None infers each
    feature's alphabet from the data), lambda_mode/lambda_value for the
    per-value Dirichlet weights, beta for the label prior.
    """

    def __init__(self, rule="marginal", alphabet_sizes=None, lambda_mode="uniform",
                 lambda_value=1.0, beta=1.0, enumeration_cap=DEFAULT_ENUMERATION_CAP):
        self.rule = rule
        self.alphabet_sizes = alphabet_sizes
        self.lambda_mode = lambda_mode
        self.lambda_value = lambda_value
        self.beta = beta
        self.enumeration_cap = enumeration_cap

    def _config(self) -> FiniteModelConfig:
        sizes = self.alphabet_sizes
        return FiniteModelConfig(
            alphabet_sizes=tuple(sizes) if sizes is not None else None,
            lambda_mode=self.lambda_mode,
            lambda_value=self.lambda_value,
            beta=tuple(self.beta) if isinstance(self.beta, (list, tuple)) else self.beta,
            enumeration_cap=self.enumeration_cap,
        )

    def _joint_dispatch(self, table):
        return spc_classify(table, self._train_table, self._train_labels, self._config())

    def _marginal_dispatch(self, table):
        if self.rule == "marginal":
            return mpc_classify(table, self._train_table, self._train_labels,
                                self._config())
        return mdpc_classify(table, self._train_table, self._train_labels,
                             self._config())

    def _dispatch(self, table):
        if self.rule == "simultaneous":
            return self._joint_dispatch(table)
        return self._marginal_dispatch(table)


class EwensPredictiveClassifier(_PredictiveClassifierBase):
    """Predictive classifier for categorical features with unbounded alphabets.

    psi is the dispersion of the Ewens sampling formula and must be given;
    test items may carry feature values never seen in training.
    """

    def __init__(self, psi, rule="marginal", label_prior_mode="uniform", beta=1.0,
                 enumeration_cap=DEFAULT_ENUMERATION_CAP):
        self.psi = psi
        self.rule = rule
        self.label_prior_mode = label_prior_mode
        self.beta = beta
        self.enumeration_cap = enumeration_cap

    def _config(self) -> PartitionModelConfig:
        return PartitionModelConfig(
            psi=self.psi,
            enumeration_cap=self.enumeration_cap,
            label_prior_mode=self.label_prior_mode,
            beta=tuple(self.beta) if isinstance(self.beta, (list, tuple)) else self.beta,
        )

    def _joint_dispatch(self, table):
        return pe_spc_classify(table, self._train_table, self._train_labels,
                               self._config())

    def _marginal_dispatch(self, table):
        if self.rule == "marginal":
            return pe_mpc_classify(table, self._train_table, self._train_labels,
                                   self._config())
        return pe_mdpc_classify(table, self._train_table, self._train_labels,
                                self._config())

    def _dispatch(self, table):
        if self.rule == "simultaneous":
            return self._joint_dispatch(table)
        return self._marginal_dispatch(table)
