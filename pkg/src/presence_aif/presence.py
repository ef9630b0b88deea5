"""Three-level model of gaze, presence and the decision to speak.

Level 1-1: the low-status agent observes a high-status member's gaze
(direct / averted) and infers whether that member is attentive.  The log
model evidence of this inference is the *presence* of the other person.

Level 2: the Level 1-1 posterior is treated as soft evidence about a social
context.  In the original model the context is {included, excluded}; in the
modified model it is {monitored, not monitored}.

Level 1-2: the agent chooses between expressing an opinion and staying
silent.  Speaking yields agreement / disagreement feedback whose preference
depends on the inferred context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from presence_aif.inference import (
    Categorical,
    GenerativeLevel,
    InvalidInputError,
    PreferenceMode,
    StochasticMatrix,
    as_probs,
    bayes_posterior,
    expected_free_energy,
    model_evidence,
    policy_posterior,
    precision_weighted_likelihood,
)

Variant = Literal["original", "modified"]

OBSERVATIONS = ("direct", "averted")
ATTENTION_STATES = ("attentive", "unconcerned")
FEEDBACK = ("agreement", "disagreement")
POLICIES = ("express", "silent")
CONTEXTS = {
    "original": ("included", "excluded"),
    "modified": ("monitored", "not monitored"),
}
# rows = feedback outcome, columns = context
DEFAULT_PREFS = {
    "original": ((0.0, 0.0), (0.0, -1.0)),
    "modified": ((0.0, 0.0), (-1.0, 0.0)),
}
DEFAULT_A_1_2 = ((0.8, 0.2), (0.2, 0.8))

DEFAULT_ZETA_11 = 0.2
DEFAULT_ZETA_2 = 0.2
DEFAULT_GAMMA = 1.0


def _uniform(n: int, labels=None) -> Categorical:
    return Categorical(np.full(n, 1.0 / n), labels)


@dataclass(frozen=True)
class PresenceModelSpec:
    variant: Variant = "original"
    zeta_11: float = DEFAULT_ZETA_11
    zeta_2: float = DEFAULT_ZETA_2
    prior_1_1: Categorical = field(default_factory=lambda: _uniform(2, ATTENTION_STATES))
    prior_2: Categorical | None = None
    prior_1_2: Categorical = field(default_factory=lambda: _uniform(2, FEEDBACK))
    A_1_2: StochasticMatrix = field(default_factory=lambda: StochasticMatrix(np.array(DEFAULT_A_1_2)))
    pref_matrix: np.ndarray | None = None
    gamma: float = DEFAULT_GAMMA
    preference_mode: PreferenceMode = "softmax"
    # EFE assigned to staying silent; no feedback is observed on that branch
    null_policy_efe: float = 0.0

    def __post_init__(self):
        if self.variant not in CONTEXTS:
            raise InvalidInputError(f"unknown variant {self.variant!r}")
        for name in ("zeta_11", "zeta_2", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidInputError(f"{name} must be finite and >= 0, got {v}")
        if not math.isfinite(self.null_policy_efe):
            raise InvalidInputError("null_policy_efe must be finite")
        if self.preference_mode not in ("softmax", "raw"):
            raise InvalidInputError(f"unknown preference_mode {self.preference_mode!r}")
        if self.prior_2 is None:
            object.__setattr__(self, "prior_2", _uniform(2, self.contexts))
        prefs = np.array(DEFAULT_PREFS[self.variant] if self.pref_matrix is None else self.pref_matrix, dtype=float)
        if prefs.shape != (len(FEEDBACK), len(self.prior_2)):
            raise InvalidInputError(f"pref_matrix must be 2 x {len(self.prior_2)}, got {prefs.shape}")
        if not np.all(np.isfinite(prefs)):
            raise InvalidInputError("pref_matrix must be finite")
        prefs.setflags(write=False)
        object.__setattr__(self, "pref_matrix", prefs)
        if len(self.prior_1_1) != 2 or len(self.prior_1_2) != 2:
            raise InvalidInputError("Level 1-1 and Level 1-2 priors are over two states")
        if self.A_1_2.shape != (2, 2):
            raise InvalidInputError("A_1_2 must be 2x2")

    @property
    def contexts(self) -> tuple[str, str]:
        return CONTEXTS[self.variant]

    @property
    def A_1_1(self) -> StochasticMatrix:
        return precision_weighted_likelihood(np.eye(2), self.zeta_11)

    @property
    def A_2(self) -> StochasticMatrix:
        return precision_weighted_likelihood(np.eye(2), self.zeta_2)

    def levels(self) -> dict[str, GenerativeLevel]:
        # single decision step, so B is the identity everywhere
        eye = StochasticMatrix(np.eye(2))
        return {
            "1-1": GenerativeLevel(self.A_1_1, eye, self.prior_1_1, self.zeta_11),
            "2": GenerativeLevel(self.A_2, eye, self.prior_2, self.zeta_2),
            "1-2": GenerativeLevel(self.A_1_2, eye, self.prior_1_2, 1.0),
        }

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "zeta_11": self.zeta_11,
            "zeta_2": self.zeta_2,
            "prior_1_1": self.prior_1_1.tolist(),
            "prior_2": self.prior_2.tolist(),
            "prior_1_2": self.prior_1_2.tolist(),
            "A_1_2": self.A_1_2.tolist(),
            "pref_matrix": self.pref_matrix.tolist(),
            "gamma": self.gamma,
            "preference_mode": self.preference_mode,
            "null_policy_efe": self.null_policy_efe,
        }


def build_model(
    variant: Variant = "original",
    zeta_11: float = DEFAULT_ZETA_11,
    zeta_2: float = DEFAULT_ZETA_2,
    prior_a: float = 0.5,
    **overrides,
) -> PresenceModelSpec:
    """Build a model with Level 1-1 prior ``[a, 1 - a]``.

    Extra keyword arguments override any other :class:`PresenceModelSpec` field.
    """
    if not (math.isfinite(prior_a) and 0.0 <= prior_a <= 1.0):
        raise InvalidInputError(f"prior weight a must lie in [0, 1], got {prior_a}")
    prior = Categorical(np.array([prior_a, 1.0 - prior_a]), ATTENTION_STATES)
    return PresenceModelSpec(variant=variant, zeta_11=zeta_11, zeta_2=zeta_2, prior_1_1=prior, **overrides)


def observation_index(observation: str | int) -> int:
    if isinstance(observation, str):
        key = observation.lower().replace("_", " ").split()[0]
        if key not in OBSERVATIONS:
            raise InvalidInputError(f"observation must be one of {OBSERVATIONS}, got {observation!r}")
        return OBSERVATIONS.index(key)
    if observation not in (0, 1):
        raise InvalidInputError(f"observation index must be 0 or 1, got {observation!r}")
    return int(observation)


def infer_level_1_1(model: PresenceModelSpec, observation: str | int) -> tuple[Categorical, float]:
    """Posterior over the other's attention and the presence (log evidence, nats)."""
    o = observation_index(observation)
    A = model.A_1_1
    post = bayes_posterior(model.prior_1_1, A, o)
    presence = math.log(model_evidence(model.prior_1_1, A, o))
    return Categorical(post.probs, ATTENTION_STATES), presence


def presence_evidence(model: PresenceModelSpec, observation: str | int) -> float:
    """Presence on the probability scale, ``p(o)``."""
    return model_evidence(model.prior_1_1, model.A_1_1, observation_index(observation))


def infer_level_2(model: PresenceModelSpec, q_1_1) -> Categorical:
    """Context posterior given the Level 1-1 belief as soft evidence.

    ``q_2(c) ∝ prior_2(c) * sum_s q_1_1(s) A_2[s, c]``
    """
    q = as_probs(q_1_1)
    A = np.asarray(model.A_2)
    if q.size != A.shape[0]:
        raise InvalidInputError(f"q_1_1 must have {A.shape[0]} entries, got {q.size}")
    unnorm = np.asarray(model.prior_2) * (q @ A)
    z = unnorm.sum()
    if z <= 0:
        raise InvalidInputError("context evidence vanished")
    return Categorical(unnorm / z, model.contexts)


def context_preference(model: PresenceModelSpec, q_2) -> np.ndarray:
    """Context-weighted log preference over feedback outcomes."""
    q = as_probs(q_2)
    if q.size != model.pref_matrix.shape[1]:
        raise InvalidInputError("q_2 does not match the number of contexts")
    return model.pref_matrix @ q


def policy_efe(model: PresenceModelSpec, log_pref) -> np.ndarray:
    g_express = expected_free_energy(model.A_1_2, model.prior_1_2, log_pref, model.preference_mode)
    return np.array([g_express, model.null_policy_efe])


@dataclass(frozen=True)
class SimulationCondition:
    """One simulated observation plus optional overrides of the base model.

    ``variant=None`` keeps the base model's variant.  Switching variant on a
    custom base resets the context prior and preference matrix to the new
    variant's defaults.
    """

    observation: str = "direct"
    variant: Variant | None = None
    zeta_11: float | None = None
    prior_a: float | None = None

    def __post_init__(self):
        observation_index(self.observation)
        if self.variant is not None and self.variant not in CONTEXTS:
            raise InvalidInputError(f"unknown variant {self.variant!r}")
        if self.prior_a is not None and not 0.0 <= self.prior_a <= 1.0:
            raise InvalidInputError(f"prior weight a must lie in [0, 1], got {self.prior_a}")

    def apply(self, base: PresenceModelSpec | None = None) -> PresenceModelSpec:
        if base is None:
            base = PresenceModelSpec(variant=self.variant or "original")
        elif self.variant is not None and self.variant != base.variant:
            base = replace(base, variant=self.variant, prior_2=None, pref_matrix=None)
        changes = {}
        if self.zeta_11 is not None:
            changes["zeta_11"] = self.zeta_11
        if self.prior_a is not None:
            changes["prior_1_1"] = Categorical(np.array([self.prior_a, 1.0 - self.prior_a]), ATTENTION_STATES)
        return replace(base, **changes) if changes else base


@dataclass(frozen=True)
class ConditionResult:
    observation: str
    variant: Variant
    q_1_1: Categorical
    presence: float
    q_2: Categorical
    context_log_pref: np.ndarray
    G: np.ndarray
    p_express: float

    @property
    def evidence(self) -> float:
        return math.exp(self.presence)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "observation": self.observation,
            "q_1_1": dict(zip(ATTENTION_STATES, self.q_1_1.tolist())),
            "presence": self.presence,
            "evidence": self.evidence,
            "q_2": dict(zip(CONTEXTS[self.variant], self.q_2.tolist())),
            "context_log_pref": dict(zip(FEEDBACK, self.context_log_pref.tolist())),
            "G": dict(zip(POLICIES, self.G.tolist())),
            "p_express": self.p_express,
        }


def simulate(model: PresenceModelSpec, observation: str | int) -> ConditionResult:
    """Run the full Level 1-1 -> Level 2 -> Level 1-2 pipeline for one observation."""
    o = observation_index(observation)
    q_1_1, presence = infer_level_1_1(model, o)
    q_2 = infer_level_2(model, q_1_1)
    log_pref = context_preference(model, q_2)
    G = policy_efe(model, log_pref)
    p_pi = policy_posterior(G, model.gamma)
    return ConditionResult(
        observation=OBSERVATIONS[o],
        variant=model.variant,
        q_1_1=q_1_1,
        presence=presence,
        q_2=q_2,
        context_log_pref=log_pref,
        G=G,
        p_express=float(p_pi.probs[0]),
    )


def run_condition(condition: SimulationCondition, base: PresenceModelSpec | None = None) -> ConditionResult:
    return simulate(condition.apply(base), condition.observation)


SWEEP_PARAMETERS = ("zeta11", "prior-a")


def sweep(
    parameter: str,
    grid: Sequence[float],
    base: SimulationCondition | None = None,
    model: PresenceModelSpec | None = None,
) -> list[tuple[float, float]]:
    """``p_express`` at each grid value of ``zeta11`` or ``prior-a``, in grid order."""
    base = base or SimulationCondition()
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or not np.all(np.isfinite(g)):
        raise InvalidInputError("grid must be a non-empty finite vector")
    if g.size > 1 and np.any(np.diff(g) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    if parameter in ("zeta11", "zeta_11"):
        if g[0] < 0:
            raise InvalidInputError("precision grid must be >= 0")
        conds = [replace(base, zeta_11=float(v)) for v in g]
    elif parameter in ("prior-a", "prior_a", "a"):
        if g[0] < 0 or g[-1] > 1:
            raise InvalidInputError("prior weight grid must lie in [0, 1]")
        conds = [replace(base, prior_a=float(v)) for v in g]
    else:
        raise InvalidInputError(f"unknown sweep parameter {parameter!r}; choose from {SWEEP_PARAMETERS}")
    return [(float(v), run_condition(c, model).p_express) for v, c in zip(g, conds)]
