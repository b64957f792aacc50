"""Bayesian predictive classification of discrete-feature items.

Two exchangeability regimes share one API: a fixed-alphabet model
(Dirichlet-multinomial predictives) and an unbounded-alphabet model built
on the Ewens sampling formula, each with marginal, simultaneous, and
marginalized decision rules.  Succession-rule calculators, a mutator-urn
simulator, and a numerical harness for the models' convergence behavior
round out the package.
"""

__version__ = "0.1.0"

from .data import (
    CountTensor,
    FeatureTable,
    InconsistentStatisticsError,
    Labeling,
    PairingError,
    PartitionVector,
    combined_partition_vector,
    count_frequencies,
    one_item_tensor,
    partition_vector,
    update_partition_vector_one_item,
)
from .estimators import DirichletMultinomialClassifier, EwensPredictiveClassifier
from .finite import (
    AlphabetViolationError,
    FiniteModelConfig,
    demo_config,
    log_marginal_product_finite,
    log_predictive_finite,
    log_structure_prior,
    mdpc_classify,
    mpc_classify,
    spc_classify,
)
from .logspace import LogProb, log_rising_factorial, log_sum_exp, normalize_log_weights
from .partition import (
    PartitionModelConfig,
    integer_partitions,
    log_ewens,
    log_joint_ewens,
    log_marginal_product_pe,
    log_predictive_pe,
    pe_marginal_predictive,
    pe_mdpc_classify,
    pe_mpc_classify,
    pe_spc_classify,
)
from .structures import (
    EnumerationTooLargeError,
    StructurePosterior,
    enumerate_structures,
)
from .succession import (
    NEW,
    FrequencyRecord,
    UrnState,
    beta_binomial_pmf,
    de_morgan_rule,
    heterogeneous_binomial_pmf,
    johnson_rule,
    laplace_rule,
    pd_succession,
    posterior_succession,
    simulate_urn,
)

__all__ = [name for name in dir() if not name.startswith("_")]
