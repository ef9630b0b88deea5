import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from presence_aif.inference import Categorical, InvalidInputError, policy_posterior
from presence_aif.presence import (
    PresenceModelSpec,
    SimulationCondition,
    build_model,
    context_preference,
    infer_level_1_1,
    infer_level_2,
    policy_efe,
    presence_evidence,
    run_condition,
    simulate,
    sweep,
)

GRID_21 = np.linspace(0.0, 1.0, 21)


def test_build_model_table_likelihood():
    m = build_model("original", 0.2, 0.2, 0.5)
    np.testing.assert_allclose(m.A_1_1.entries, [[0.691, 0.309], [0.309, 0.691]], atol=1e-3)
    assert m.contexts == ("included", "excluded")
    np.testing.assert_array_equal(m.pref_matrix, [[0, 0], [0, -1]])
    np.testing.assert_array_equal(m.A_1_2.entries, [[0.8, 0.2], [0.2, 0.8]])


def test_build_model_zero_precision_uniform():
    np.testing.assert_array_equal(build_model("original", 0.0).A_1_1.entries, np.full((2, 2), 0.5))


def test_build_model_modified_preferences():
    m = build_model("modified", 0.2, 0.2, 0.5)
    assert m.contexts == ("monitored", "not monitored")
    np.testing.assert_array_equal(m.pref_matrix, [[0, 0], [-1, 0]])


@pytest.mark.parametrize("a", [-0.1, 1.1, math.nan])
def test_build_model_rejects_bad_prior(a):
    with pytest.raises(InvalidInputError):
        build_model(prior_a=a)


def test_spec_rejects_bad_fields():
    with pytest.raises(InvalidInputError):
        PresenceModelSpec(variant="sideways")
    with pytest.raises(InvalidInputError):
        PresenceModelSpec(zeta_2=-1)
    with pytest.raises(InvalidInputError):
        PresenceModelSpec(pref_matrix=np.zeros((3, 2)))


def test_levels_use_identity_transitions():
    levels = PresenceModelSpec().levels()
    assert set(levels) == {"1-1", "2", "1-2"}
    for lvl in levels.values():
        np.testing.assert_array_equal(lvl.B.entries, np.eye(2))


# ------------------------------------------------------------------ Level 1-1


def test_level_1_1_defaults_direct():
    q, presence = infer_level_1_1(PresenceModelSpec(), "direct")
    np.testing.assert_allclose(q.probs, [0.691, 0.309], atol=1e-3)
    assert presence == pytest.approx(math.log(0.5), abs=1e-15)


def test_level_1_1_certain_prior():
    m = build_model(prior_a=1.0)
    q, presence = infer_level_1_1(m, "direct")
    np.testing.assert_array_equal(q.probs, [1.0, 0.0])
    assert presence == pytest.approx(math.log(0.691), abs=1e-3)
    assert presence == math.log(m.A_1_1.entries[0, 0])


@pytest.mark.parametrize("obs", ["direct", "averted"])
def test_level_1_1_zero_precision_returns_prior(obs):
    q, _ = infer_level_1_1(build_model(zeta_11=0.0, prior_a=0.7), obs)
    np.testing.assert_allclose(q.probs, [0.7, 0.3], atol=1e-15)


def test_presence_with_informative_prior():
    m = build_model(prior_a=0.8)
    _, presence = infer_level_1_1(m, "direct")
    assert presence == pytest.approx(math.log(0.6146), abs=1e-3)
    assert presence_evidence(m, "direct") == pytest.approx(math.exp(presence))


def test_observation_names():
    with pytest.raises(InvalidInputError):
        infer_level_1_1(PresenceModelSpec(), "sideways")
    q, _ = infer_level_1_1(PresenceModelSpec(), "direct gaze")
    assert q["attentive"] > 0.5


# -------------------------------------------------------------------- Level 2


def test_level_2_uniform_evidence_returns_prior():
    m = replace(PresenceModelSpec(), prior_2=Categorical(np.array([0.3, 0.7])))
    np.testing.assert_allclose(infer_level_2(m, [0.5, 0.5]).probs, [0.3, 0.7], atol=1e-15)


def test_level_2_soft_evidence():
    q2 = infer_level_2(PresenceModelSpec(), [0.691, 0.309])
    # 0.691 * 0.691 + 0.309 * 0.309 vs 2 * 0.691 * 0.309, normalised
    np.testing.assert_allclose(q2.probs, [0.573, 0.427], atol=1e-3)


def test_level_2_high_precision_limit():
    q2 = infer_level_2(PresenceModelSpec(zeta_2=10.0), [1.0, 0.0])
    assert q2.probs[0] > 1 - 1e-12


# ----------------------------------------------------------- context preference


def test_context_preference_examples():
    orig, mod = PresenceModelSpec(), PresenceModelSpec(variant="modified")
    np.testing.assert_array_equal(context_preference(orig, [1.0, 0.0]), [0.0, 0.0])
    np.testing.assert_allclose(context_preference(orig, [0.573, 0.427]), [0.0, -0.427])
    np.testing.assert_allclose(context_preference(mod, [0.573, 0.427]), [0.0, -0.573])


# -------------------------------------------------------------- run_condition


@pytest.mark.parametrize("variant", ["original", "modified"])
@pytest.mark.parametrize("obs", [0, 1])
def test_pipeline_matches_hand_oracle(variant, obs):
    ref = oracles.presence_pipeline(0.2, 0.2, 0.5, obs, variant)
    r = simulate(PresenceModelSpec(variant=variant), obs)
    np.testing.assert_allclose(r.q_1_1.probs, ref["q11"], atol=1e-12)
    np.testing.assert_allclose(r.q_2.probs, ref["q2"], atol=1e-12)
    np.testing.assert_allclose(r.context_log_pref, ref["log_pref"], atol=1e-12)
    assert r.G[0] == pytest.approx(ref["G"], abs=1e-12)
    assert r.p_express == pytest.approx(ref["p_express"], abs=1e-12)
    assert r.presence == pytest.approx(math.log(ref["evidence"]), abs=1e-12)


def test_default_direct_gaze_close_to_published():
    # only the direct-gaze value is reachable with the default settings
    assert run_condition(SimulationCondition("direct")).p_express == pytest.approx(0.3729, abs=0.002)


def test_condition_result_invariants():
    r = run_condition(SimulationCondition("averted", prior_a=0.3, zeta_11=0.6))
    assert r.p_express == float(policy_posterior(r.G, 1.0).probs[0])
    q, presence = infer_level_1_1(build_model(zeta_11=0.6, prior_a=0.3), "averted")
    assert r.presence == presence


def test_pipeline_is_composition_of_steps():
    m = build_model(zeta_11=0.35, prior_a=0.65)
    r = simulate(m, "direct")
    q11, _ = infer_level_1_1(m, "direct")
    q2 = infer_level_2(m, q11)
    pref = context_preference(m, q2)
    G = policy_efe(m, pref)
    p = policy_posterior(G, m.gamma).probs[0]
    assert r.q_2.probs.tobytes() == q2.probs.tobytes()
    assert r.G.tobytes() == G.tobytes()
    assert r.p_express == p


def test_condition_variant_switch_resets_context():
    r = run_condition(SimulationCondition("direct", variant="modified"), PresenceModelSpec())
    assert r.variant == "modified"
    assert r.p_express == simulate(PresenceModelSpec(variant="modified"), "direct").p_express


def test_to_dict_keys():
    d = run_condition(SimulationCondition("direct")).to_dict()
    assert set(d["q_2"]) == {"included", "excluded"}
    assert set(d["G"]) == {"express", "silent"}


# --------------------------------------------------------------- properties

pos = st.floats(0.01, 5.0)


@settings(max_examples=200)
@given(pos, pos)
def test_ordering_original_and_modified(z11, z2):
    def p(variant, obs):
        return simulate(PresenceModelSpec(variant=variant, zeta_11=z11, zeta_2=z2), obs).p_express

    assert p("original", "direct") > p("original", "averted")
    assert p("modified", "direct") < p("modified", "averted")


@settings(max_examples=200)
@given(st.floats(0.0, 5.0), st.floats(0.0, 5.0), st.sampled_from(["direct", "averted"]))
def test_swap_symmetry(z11, z2, obs):
    flip = "averted" if obs == "direct" else "direct"
    a = simulate(PresenceModelSpec(variant="modified", zeta_11=z11, zeta_2=z2), obs).p_express
    b = simulate(PresenceModelSpec(variant="original", zeta_11=z11, zeta_2=z2), flip).p_express
    assert abs(a - b) <= 1e-12


@given(st.floats(0.0, 5.0), st.sampled_from(["original", "modified"]))
def test_zero_precision_erases_gaze(z2, variant):
    m = PresenceModelSpec(variant=variant, zeta_11=0.0, zeta_2=z2)
    assert simulate(m, "direct").p_express == simulate(m, "averted").p_express


@pytest.mark.parametrize("obs", ["direct", "averted"])
def test_zero_precision_presence_is_ln_half(obs):
    _, presence = infer_level_1_1(build_model(zeta_11=0.0, prior_a=0.5), obs)
    assert presence == math.log(0.5)


def test_monotone_in_precision_and_prior():
    zs = [p for _, p in sweep("zeta11", GRID_21)]
    As = [p for _, p in sweep("prior-a", GRID_21)]
    assert all(b >= a for a, b in zip(zs, zs[1:]))
    assert all(b >= a for a, b in zip(As, As[1:]))


# ---------------------------------------------------------------------- sweep


def test_sweep_single_point_matches_run_condition():
    [(v, p)] = sweep("zeta11", [0.2])
    assert v == 0.2
    assert p == run_condition(SimulationCondition("direct", zeta_11=0.2)).p_express


def test_sweep_is_deterministic_and_ordered():
    a = sweep("prior-a", GRID_21)
    assert a == sweep("prior-a", GRID_21)
    assert [v for v, _ in a] == GRID_21.tolist()


@pytest.mark.parametrize(
    "param, grid",
    [("zeta11", [0.5, 0.2]), ("zeta11", [-0.1, 0.2]), ("prior-a", [0.5, 1.5]), ("bogus", [0.1]), ("zeta11", [])],
)
def test_sweep_rejects_invalid_grid(param, grid):
    with pytest.raises(InvalidInputError):
        sweep(param, grid)
