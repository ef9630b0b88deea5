"""Discrete active-inference primitives.

Everything here is a pure function of small numpy arrays.  Models in this
package have two or three states per factor, so inference is exact
enumeration; there is no message passing or iterative VFE descent.

Conventions
-----------
* Likelihood / transition matrices are column-stochastic: ``A[o, s] = p(o | s)``.
* ``0 * ln 0`` is taken as 0, so every expectation is computed exactly
  without flooring probabilities.  The ``exp(-4)`` offset used when building
  precision-weighted likelihoods is part of the model, not a numerical guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

ATOL = 1e-9
LIKELIHOOD_OFFSET = math.exp(-4)

PreferenceMode = Literal["softmax", "raw"]


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class DegenerateEvidenceError(ValueError):
    """Raised when an observation has zero probability under the model."""


@dataclass(frozen=True)
class Categorical:
    """A finite probability vector, optionally with outcome labels."""

    probs: np.ndarray
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        p = _checked_probs(self.probs)
        if self.labels is not None and len(self.labels) != p.size:
            raise InvalidInputError("labels length does not match probabilities")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    def __len__(self):
        return self.probs.size

    def __getitem__(self, key):
        if isinstance(key, str):
            if self.labels is None:
                raise KeyError(key)
            key = self.labels.index(key)
        return float(self.probs[key])

    def tolist(self) -> list[float]:
        return self.probs.tolist()


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic conditional table, rows = child outcomes, columns = parent states."""

    entries: np.ndarray

    def __post_init__(self):
        m = as_stochastic(self.entries)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def tolist(self) -> list[list[float]]:
        return self.entries.tolist()


@dataclass(frozen=True)
class GenerativeLevel:
    """One level of a hierarchical model: likelihood, transitions, initial prior, precision."""

    A: StochasticMatrix
    B: StochasticMatrix
    D: Categorical
    precision: float = 1.0

    def __post_init__(self):
        n_states = self.A.shape[1]
        if self.B.shape != (n_states, n_states):
            raise InvalidInputError(f"B must be {n_states}x{n_states}, got {self.B.shape}")
        if len(self.D) != n_states:
            raise InvalidInputError(f"D must have {n_states} entries, got {len(self.D)}")
        if not math.isfinite(self.precision) or self.precision < 0:
            raise InvalidInputError(f"precision must be >= 0, got {self.precision}")


def _checked_probs(p) -> np.ndarray:
    p = np.array(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidInputError(f"categorical must be a non-empty vector, got shape {p.shape}")
    if not (np.isfinite(p).all() and (p >= 0).all()):
        raise InvalidInputError(f"categorical entries must be finite and >= 0: {p}")
    total = p.sum()
    if abs(total - 1.0) > ATOL:
        raise InvalidInputError(f"categorical must sum to 1, sums to {total!r}")
    return p


def as_probs(p) -> np.ndarray:
    """Validate and return a probability vector as a float array."""
    return _checked_probs(p)


def as_stochastic(A) -> np.ndarray:
    m = np.array(A, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise InvalidInputError(f"stochastic matrix must be 2-D, got shape {m.shape}")
    if not (np.isfinite(m).all() and (m >= 0).all()):
        raise InvalidInputError("stochastic matrix entries must be finite and >= 0")
    if np.any(np.abs(m.sum(axis=0) - 1.0) > ATOL):
        raise InvalidInputError(f"columns must sum to 1, got {m.sum(axis=0)}")
    return m


def _check_obs(A: np.ndarray, obs: int) -> int:
    if isinstance(obs, bool) or not isinstance(obs, (int, np.integer)):
        raise InvalidInputError(f"observation must be an integer index, got {obs!r}")
    if not 0 <= obs < A.shape[0]:
        raise InvalidInputError(f"observation {obs} out of range for {A.shape[0]} outcomes")
    return int(obs)


def _check_dims(A: np.ndarray, prior: np.ndarray):
    if A.shape[1] != prior.size:
        raise InvalidInputError(f"A has {A.shape[1]} columns but prior has {prior.size} states")


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # x * ln(y) with 0 * ln(anything) = 0
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return x * np.log(np.where(x != 0, y, 1.0))


def softmax(v: Sequence[float], scale: float = 1.0) -> Categorical:
    """Return ``exp(scale * v) / sum(exp(scale * v))``, max-subtracted for stability."""
    x = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("softmax expects a non-empty vector")
    if not np.all(np.isfinite(x)) or not math.isfinite(scale):
        raise InvalidInputError("softmax inputs must be finite")
    z = scale * x
    z = z - z.max()
    e = np.exp(z)
    return Categorical(e / e.sum())


def precision_weighted_likelihood(A_base, precision: float) -> StochasticMatrix:
    """Sharpen or flatten a likelihood: column-wise ``softmax(precision * ln(A + e^-4))``.

    ``precision = 0`` gives uniform columns; large precision recovers the
    base mapping (up to the ``e^-4`` offset).
    """
    A = as_stochastic(A_base)
    if not math.isfinite(precision) or precision < 0:
        raise InvalidInputError(f"precision must be finite and >= 0, got {precision}")
    logits = precision * np.log(A + LIKELIHOOD_OFFSET)
    logits = logits - logits.max(axis=0, keepdims=True)
    e = np.exp(logits)
    return StochasticMatrix(e / e.sum(axis=0, keepdims=True))


def model_evidence(prior, A, obs: int) -> float:
    """Marginal probability of ``obs``: ``sum_s A[obs, s] * prior[s]``."""
    p = as_probs(prior)
    m = as_stochastic(A)
    _check_dims(m, p)
    o = _check_obs(m, obs)
    return float(m[o] @ p)


def bayes_posterior(prior, A, obs: int) -> Categorical:
    """Exact posterior over states after observing outcome ``obs``."""
    p = as_probs(prior)
    m = as_stochastic(A)
    _check_dims(m, p)
    o = _check_obs(m, obs)
    joint = m[o] * p
    z = joint.sum()
    if z <= 0:
        raise DegenerateEvidenceError(f"observation {o} has zero probability under the model")
    return Categorical(joint / z)


def variational_free_energy(q, prior, A, obs: int) -> float:
    """``F = sum_s q(s) [ln q(s) - ln p(obs, s)]``.

    Returns ``math.inf`` when ``q`` puts mass on a state the joint rules out.
    """
    qv = as_probs(q)
    p = as_probs(prior)
    m = as_stochastic(A)
    _check_dims(m, p)
    if qv.size != p.size:
        raise InvalidInputError("q and prior differ in size")
    o = _check_obs(m, obs)
    joint = m[o] * p
    if np.any((qv > 0) & (joint == 0)):
        return math.inf
    return float(np.sum(_xlogy(qv, qv)) - np.sum(_xlogy(qv, joint)))


def kl_divergence(p, q) -> float:
    """``KL(p || q)`` in nats; ``math.inf`` if ``p`` has mass where ``q`` has none."""
    pv, qv = as_probs(p), as_probs(q)
    if pv.size != qv.size:
        raise InvalidInputError("distributions differ in size")
    if np.any((pv > 0) & (qv == 0)):
        return math.inf
    return float(np.sum(_xlogy(pv, pv)) - np.sum(_xlogy(pv, qv)))


def shannon_entropy(p) -> float:
    pv = as_probs(p)
    return float(-np.sum(_xlogy(pv, pv)))


def expected_free_energy(
    A,
    q_states,
    log_pref: Sequence[float],
    preference_mode: PreferenceMode = "softmax",
) -> float:
    """Expected free energy of one policy whose predicted states are ``q_states``.

    ``G = -epistemic - pragmatic`` where the epistemic term is the expected
    KL between the Bayes posterior ``q(s|o)`` and ``q(s)``, and the pragmatic
    term is ``sum_o q(o) ln p(o|C)``.

    ``preference_mode="softmax"`` normalises ``log_pref`` into ``p(o|C)``;
    ``"raw"`` uses ``log_pref`` directly as ``ln p(o|C)``.
    """
    m = as_stochastic(A)
    qs = as_probs(q_states)
    _check_dims(m, qs)
    c = np.asarray(log_pref, dtype=float)
    if c.shape != (m.shape[0],):
        raise InvalidInputError(f"log_pref needs {m.shape[0]} entries, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("log_pref must be finite")

    joint = m * qs[None, :]
    q_o = joint.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        post = np.where(q_o[:, None] > 0, joint / q_o[:, None], 0.0)
    # joint > 0 implies post > 0 and qs > 0, so xlogy terms are exact
    epistemic = float(np.sum(_xlogy(joint, post)) - np.sum(_xlogy(joint, qs[None, :])))

    if preference_mode == "softmax":
        ln_pref = np.log(softmax(c).probs)
    elif preference_mode == "raw":
        ln_pref = c
    else:
        raise InvalidInputError(f"unknown preference_mode {preference_mode!r}")
    pragmatic = float(q_o @ ln_pref)
    return -epistemic - pragmatic


def policy_posterior(G: Sequence[float], gamma: float = 1.0) -> Categorical:
    """``softmax(-gamma * G)``: lower expected free energy, higher probability."""
    if not math.isfinite(gamma) or gamma < 0:
        raise InvalidInputError(f"gamma must be finite and >= 0, got {gamma}")
    return softmax(G, -gamma)
