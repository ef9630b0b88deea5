"""Active-inference model of remote-participant presence and avatar gaze behaviour."""

from presence_aif.inference import (
    Categorical,
    DegenerateEvidenceError,
    GenerativeLevel,
    InvalidInputError,
    StochasticMatrix,
    bayes_posterior,
    expected_free_energy,
    kl_divergence,
    model_evidence,
    policy_posterior,
    precision_weighted_likelihood,
    shannon_entropy,
    softmax,
    variational_free_energy,
)
from presence_aif.presence import (
    ConditionResult,
    PresenceModelSpec,
    SimulationCondition,
    build_model,
    context_preference,
    infer_level_1_1,
    infer_level_2,
    run_condition,
    simulate,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "bayes_posterior",
    "build_model",
    "Categorical",
    "ConditionResult",
    "context_preference",
    "DegenerateEvidenceError",
    "expected_free_energy",
    "GenerativeLevel",
    "infer_level_1_1",
    "infer_level_2",
    "InvalidInputError",
    "kl_divergence",
    "model_evidence",
    "policy_posterior",
    "precision_weighted_likelihood",
    "PresenceModelSpec",
    "run_condition",
    "shannon_entropy",
    "simulate",
    "SimulationCondition",
    "softmax",
    "StochasticMatrix",
    "sweep",
    "variational_free_energy",
]
