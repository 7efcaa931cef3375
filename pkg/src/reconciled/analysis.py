"""Closed-form cost model of the hashing sum protocol, and a simulator check.

Per-statement costs: the hash set ``t0 = k * m_b`` bits each loop round,
then ``t1 = t2 = 2n - 1`` bits for the two sums.  A round accepts with
probability ``p_a = (1 - coll)**d_a`` where ``coll`` is the pairwise
collision probability of the hash family.  All model values are exact
``Fraction`` objects; convert with ``float`` for display.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import random_instance
from .protocols import run_protocol


@dataclass(frozen=True)
class AnalysisParams:
    n: int
    k: int
    m_b: int
    d_a: int
    r: int | None = None
    c: Fraction = Fraction(1)

    def __post_init__(self):
        _check_nk(self.n, self.k)
        if self.d_a < 0 or self.m_b < 0:
            raise ValueError("d_a and m_b must be nonnegative")
        if self.r is not None and self.r < 1:
            raise ValueError("round bound r must be positive")

    @property
    def t0(self) -> int:
        return self.k * self.m_b

    @property
    def t1(self) -> int:
        return 2 * self.n - 1

    @property
    def t2(self) -> int:
        return 2 * self.n - 1


def _check_nk(n, k):
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")


def collision_probability(n: int, k: int) -> Fraction:
    _check_nk(n, k)
    return Fraction(2 ** (n - k) - 1, 2**n - 1)


def accept_probability(n: int, k: int, d_a: int) -> Fraction:
    if d_a < 0:
        raise ValueError("d_a must be nonnegative")
    return (1 - collision_probability(n, k)) ** d_a


def expected_bits_bounded(params: AnalysisParams, r: int | None = None) -> Fraction:
    """Expected bits when the loop is cut off after ``r`` rounds.

    Evaluates the finite sum term by term with Horner's rule over integers
    (one normalization at the end), so ``r`` in the thousands stays cheap.
    """
    r = params.r if r is None else r
    if r is None or r < 1:
        raise ValueError("a positive round bound r is required")
    top = 2**params.n - 1
    den = top**params.d_a
    acc_num = (top - (2 ** (params.n - params.k) - 1)) ** params.d_a
    q_num = den - acc_num
    t0, t1 = params.t0, params.t1

    acc = (r * t0 + t1)
    power = 1
    for i in range(r - 2, -1, -1):
        power *= den
        acc = acc * q_num + ((i + 1) * t0 + t1) * power
    series = Fraction(acc, power * den) * acc_num
    return series + params.t2


def expected_bits_unbounded(params: AnalysisParams) -> Fraction:
    p_a = accept_probability(params.n, params.k, params.d_a)
    return params.t0 / p_a + params.t1 + params.t2


def objective(n: int, k: int, m_b: int, d_a: int) -> Fraction:
    return expected_bits_unbounded(AnalysisParams(n, k, m_b, d_a))


def optimal_k(n: int, m_b: int, d_a: int) -> int:
    """Exact argmin over ``k`` in ``1..n`` of the expected bits; ties go low."""
    if d_a < 1 or m_b < 1:
        raise ValueError("optimal_k needs d_a >= 1 and m_b >= 1")
    best_k, best = 1, objective(n, 1, m_b, d_a)
    for k in range(2, n + 1):
        v = objective(n, k, m_b, d_a)
        if v < best:
            best_k, best = k, v
    return best_k


def heuristic_k(d_a: int, c=1) -> float:
    """Continuous hash width ``log2(d_a / c)``; not rounded."""
    if d_a < 1:
        raise ValueError("heuristic_k needs d_a >= 1")
    c = Fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    return math.log2(d_a) - math.log2(c)


def model_report(n: int, k: int, m_b: int, d_a: int, r: int | None = None,
                 c=1) -> dict:
    params = AnalysisParams(n, k, m_b, d_a, r, Fraction(c))
    p_a = accept_probability(n, k, d_a)
    out = {
        "params": {"n": n, "k": k, "m_b": m_b, "d_a": d_a, "r": r, "c": str(Fraction(c))},
        "model": {
            "collision": float(collision_probability(n, k)),
            "p_a": float(p_a),
            "p_n": float(1 - p_a),
            "t0": params.t0, "t1": params.t1, "t2": params.t2,
            "e_bits_r": float(expected_bits_bounded(params)) if r else None,
            "e_bits_inf": float(expected_bits_unbounded(params)),
        },
        "k_over_n_large": k / n > 0.5,
    }
    if d_a >= 1 and m_b >= 1:
        k_opt = optimal_k(n, m_b, d_a)
        h = heuristic_k(d_a, c)
        out["model"]["k_opt"] = k_opt
        out["model"]["e_bits_at_k_opt"] = float(objective(n, k_opt, m_b, d_a))
        out["model"]["heuristic_k"] = h
        out["model"]["heuristic_gap"] = h - k_opt
    return out


def simulate_vs_formula(n: int, k: int, m_b: int, d_a: int, trials: int, seed: int,
                        *, m_0: int = 0, round_cap: int = 10_000) -> dict:
    """Run the hashing protocol on fresh instances and set it beside the model.

    ``p_hat`` is the fraction of runs whose first loop round accepted, so
    ``rounds_mean * p_hat`` close to 1 is a real check of geometric rounds.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if m_0 > m_b:
        raise ValueError("m_0 cannot exceed m_b")
    m_a = m_0 + d_a
    first_accept = 0
    rounds, bits = [], []
    capped = wrong = 0
    for t in range(trials):
        inst = random_instance(n, m_a, m_b, m_0, seed=(seed << 32) ^ t)
        out = run_protocol("lv-sum", inst, shared_seed=(seed << 32) ^ t ^ 0x5bd1e995,
                           k=k, round_cap=round_cap)
        if not out.ok:
            capped += 1
            continue
        wrong += not out.oracle_match
        loops = out.info["loop_rounds"]
        first_accept += loops == 1
        rounds.append(loops)
        bits.append(out.payload_bits)
    done = len(rounds)
    params = AnalysisParams(n, k, m_b, d_a)
    p_a = float(accept_probability(n, k, d_a))
    p_hat = first_accept / done if done else float("nan")
    rounds_mean = math.fsum(rounds) / done if done else float("nan")
    bits_mean = math.fsum(bits) / done if done else float("nan")
    e_inf = float(expected_bits_unbounded(params))
    sigma = math.sqrt(p_a * (1 - p_a) / done) if done else float("nan")
    return {
        "params": {"n": n, "k": k, "m_b": m_b, "d_a": d_a, "m_0": m_0,
                   "trials": trials, "seed": seed},
        "model": {"p_a": p_a, "e_bits_inf": e_inf,
                  "e_rounds": 1 / p_a},
        "empirical": {"p_hat": p_hat, "rounds_mean": rounds_mean,
                      "bits_mean": bits_mean, "capped": capped, "wrong": wrong,
                      "rounds_times_p_hat": rounds_mean * p_hat,
                      "bits_from_rounds": params.t0 * rounds_mean + params.t1 + params.t2},
        "rel_err": {"p_a": (p_hat - p_a) / p_a,
                    "bits": (bits_mean - e_inf) / e_inf},
        "z_p_a": (p_hat - p_a) / sigma if sigma else 0.0,
    }
