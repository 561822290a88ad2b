"""Capacitated multinomial-logit assortment bandit lab.

Building blocks: the choice environment (:mod:`.core`), a planted hard
instance family with its regret floor (:mod:`.adversarial`), divergence and
counting certificates that audit the floor end to end (:mod:`.divergence`),
offering policies (:mod:`.policies`), and reproducible Monte Carlo
experiments (:mod:`.runner`).  ``python -m mnlbandit --help`` lists the
command-line surface.
"""

from .core import (
    NO_PURCHASE,
    Assortment,
    AssortmentError,
    CapacityError,
    ChoiceDistribution,
    EnumerationLimitError,
    InvalidAssortmentError,
    MnlInstance,
    best_assortment,
    choice_distribution,
    expected_revenue,
    instantaneous_regret,
    sample_choice,
)
from .adversarial import (
    AdversarialSpec,
    ApplicabilityError,
    GapValue,
    LowerBoundValue,
    Regime,
    build_instance,
    epsilon_schedule,
    minimax_lower_bound,
    overlap_delta,
    sample_elevated_set,
    single_stage_gap,
)
from .divergence import (
    AuditReport,
    CategoricalPair,
    CheckRecord,
    PerStepKl,
    StepKlContext,
    kl_exact,
    kl_quadratic_bound,
    lower_bound_chain_audit,
    per_step_kl,
    pinsker_count_gap,
    random_categorical_pairs,
    trajectory_count_audit,
    tv_distance,
)
from .policies import (
    AssortmentPolicy,
    EpochUcbPolicy,
    FixedAssortmentPolicy,
    Observation,
    PolicySpec,
    ProtocolError,
    UniformRandomPolicy,
    ucb_assortment,
)
from .runner import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    OfferCounts,
    RegretTrace,
    ScalingFitResult,
    TrajectoryRow,
    bayes_regret,
    derive_seed,
    emit_report,
    experiment_result_from_json,
    pad_assortment,
    run_policy_trajectory,
    run_trajectory,
    scaling_fit,
    trajectory_rngs,
)

__version__ = "0.1.0"
