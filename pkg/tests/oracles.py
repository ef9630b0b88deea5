"""Brute-force reference computations, written with plain loops and ``math``.

Nothing here imports the package; these are the independent side of
dual-route checks.
"""

import itertools
import math


def joint_table(prior, A):
    """Explicit ``{(o, s): p(o, s)}``."""
    n_o, n_s = len(A), len(prior)
    return {(o, s): A[o][s] * prior[s] for o in range(n_o) for s in range(n_s)}


def condition_on(joint, obs, n_s):
    marg = sum(joint[(obs, s)] for s in range(n_s))
    if marg == 0:
        return None, 0.0
    return [joint[(obs, s)] / marg for s in range(n_s)], marg


def vfe(q, prior, A, obs):
    total = 0.0
    for s, qs in enumerate(q):
        if qs > 0:
            total += qs * (math.log(qs) - math.log(A[obs][s] * prior[s]))
    return total


def efe_mutual_information(A, qs, log_pref, normalise=True):
    """G = -I(o; s) - E_q(o)[ln p(o|C)], with I = H[q(o)] - sum_s q(s) H[A[:, s]]."""
    n_o, n_s = len(A), len(qs)
    q_o = [sum(A[o][s] * qs[s] for s in range(n_s)) for o in range(n_o)]

    def h(p):
        return -sum(x * math.log(x) for x in p if x > 0)

    info = h(q_o) - sum(qs[s] * h([A[o][s] for o in range(n_o)]) for s in range(n_s))
    if normalise:
        z = sum(math.exp(c) for c in log_pref)
        ln_p = [c - math.log(z) for c in log_pref]
    else:
        ln_p = list(log_pref)
    return -info - sum(q_o[o] * ln_p[o] for o in range(n_o))


def simplex_grid(n, steps):
    """All points of the n-simplex with coordinates in multiples of 1/steps."""
    pts = []
    for combo in itertools.product(range(steps + 1), repeat=n - 1):
        if sum(combo) <= steps:
            pts.append([c / steps for c in combo] + [(steps - sum(combo)) / steps])
    return pts


def softmax_columns(logits_cols):
    out = []
    for col in logits_cols:
        m = max(col)
        e = [math.exp(c - m) for c in col]
        z = sum(e)
        out.append([x / z for x in e])
    # transpose columns -> rows
    return [[out[j][i] for j in range(len(out))] for i in range(len(out[0]))]


def presence_pipeline(zeta_11, zeta_2, a, obs, variant="original", gamma=1.0):
    """Whole model by hand: direct Bayes, soft-evidence Level 2, EFE via mutual information."""
    off = math.exp(-4)

    def likelihood(z):
        cols = [[z * math.log((1.0 if i == j else 0.0) + off) for i in range(2)] for j in range(2)]
        return softmax_columns(cols)

    A11, A2 = likelihood(zeta_11), likelihood(zeta_2)
    prior = [a, 1 - a]
    q11, evidence = condition_on(joint_table(prior, A11), obs, 2)
    soft = [sum(q11[s] * A2[s][c] for s in range(2)) for c in range(2)]
    z = sum(0.5 * x for x in soft)
    q2 = [0.5 * x / z for x in soft]
    if variant == "original":
        log_pref = [0.0, -q2[1]]
    else:
        log_pref = [0.0, -q2[0]]
    g = efe_mutual_information([[0.8, 0.2], [0.2, 0.8]], [0.5, 0.5], log_pref)
    p_express = 1.0 / (1.0 + math.exp(gamma * g))
    return {"q11": q11, "evidence": evidence, "q2": q2, "log_pref": log_pref, "G": g, "p_express": p_express}
