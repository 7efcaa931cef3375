import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from reconciled.model import ProtocolError, make_instance, oracle_value, random_instance
from reconciled.protocols import (REGISTRY, disjointness_via_sum, idempotent_exchange,
                                  las_vegas_sum, naive_intersection,
                                  reconcile_then_compute, run_protocol,
                                  sum_via_intersection, trivial_sum)


def all_subsets(n):
    universe = range(1 << n)
    return [s for r in range(len(universe) + 1) for s in itertools.combinations(universe, r)]


@st.composite
def instances(draw, max_n=6, nonempty=False):
    n = draw(st.integers(1, max_n))
    elems = st.integers(0, (1 << n) - 1)
    a = draw(st.sets(elems, min_size=int(nonempty), max_size=10))
    b = draw(st.sets(elems, min_size=int(nonempty), max_size=10))
    return make_instance(n, a, b)


def test_registry_ids_are_the_published_names():
    assert set(REGISTRY) == {
        "idempotent-max", "idempotent-min", "idempotent-or", "idempotent-and",
        "trivial-sum", "lv-sum", "disj-via-sum", "sum-via-intersection",
        "naive-intersection", "reconcile-sum", "reconcile-product", "reconcile-max",
        "reconcile-min"}


# ---------- idempotent exchange

def test_max_exchange():
    out = idempotent_exchange(make_instance(2, {1, 3}, {2}), "max")
    assert out.value_at_a == out.value_at_b == 3
    assert out.payload_bits == 4


def test_min_exchange_identical_sets():
    out = idempotent_exchange(make_instance(3, {5}, {5}), "min")
    assert out.value == 5 and out.payload_bits == 6


def test_or_exchange():
    assert idempotent_exchange(make_instance(2, {0b01}, {0b10}), "or").value == 0b11


def test_and_exchange():
    out = idempotent_exchange(make_instance(4, {0b1110, 0b0111}, {0b0110}), "and")
    assert out.value == 0b0110 and out.oracle_match


def test_exchange_needs_nonempty_sets():
    with pytest.raises(ProtocolError):
        idempotent_exchange(make_instance(2, [], {1}), "max")


@given(instances(max_n=10, nonempty=True), st.sampled_from(["max", "min", "or", "and"]))
def test_exchange_matches_oracle(inst, op):
    out = idempotent_exchange(inst, op)
    assert out.oracle_match and out.payload_bits == 2 * inst.n


# ---------- trivial sum

def test_trivial_sum_figure_cell():
    out = trivial_sum(make_instance(2, {1, 2}, {2, 3}))
    assert out.value_at_a == out.value_at_b == 6
    assert out.payload_bits == 6


def test_trivial_sum_n3_payload():
    assert trivial_sum(random_instance(3, 3, 4, 1, seed=2)).payload_bits == 12


def test_trivial_sum_empty():
    out = trivial_sum(make_instance(2, [], []))
    assert out.value == 0 and out.payload_bits == 6


def test_trivial_sum_message_lengths():
    out = trivial_sum(random_instance(5, 4, 4, 2, seed=1))
    assert [m.length for m in out.transcript.messages] == [31, 9]


def test_trivial_sum_refuses_huge_n():
    with pytest.raises(ProtocolError):
        trivial_sum(make_instance(30, [1], [2]))


# ---------- Las Vegas sum

def test_lv_zero_difference_accepts_first_round():
    inst = random_instance(8, 6, 9, 6, seed=3)
    assert inst.d_a == 0
    out = las_vegas_sum(inst, k=2, shared_seed=5)
    assert out.info["loop_rounds"] == 1
    assert out.payload_bits == 2 * inst.m_b + 4 * 8 - 2


def test_lv_bijective_hash_accepts_first_round():
    for seed in range(30):
        inst = random_instance(6, 10, 12, 3, seed=seed)
        out = las_vegas_sum(inst, k=6, shared_seed=seed)
        assert out.info["loop_rounds"] == 1
        assert out.payload_bits == 6 * inst.m_b + 4 * 6 - 2
        assert out.oracle_match


def test_lv_round_state_invariants():
    inst = random_instance(7, 12, 10, 5, seed=8)
    only_a = set(inst.set_a) - set(inst.set_b)
    for seed in range(40):
        out = las_vegas_sum(inst, k=4, shared_seed=seed, trace=True)
        rounds = out.info["_trace"]
        assert len(rounds) == out.info["loop_rounds"]
        for st_ in rounds:
            assert set(st_.l_set) <= only_a
            assert len(st_.k_values) == inst.m_b
        assert set(rounds[-1].l_set) == only_a
        assert rounds[-1].s == sum(only_a)
        assert rounds[-1].s_prime == oracle_value(inst, "sum") == out.value


def test_lv_per_message_accounting():
    inst = random_instance(8, 9, 11, 4, seed=2)
    out = las_vegas_sum(inst, k=5, shared_seed=1)
    msgs = out.transcript.messages
    hash_msgs = [m for m in msgs if m.label.startswith("K_")]
    assert all(m.length == 5 * inst.m_b and m.direction == "B->A" for m in hash_msgs)
    tail = [m for m in msgs if m.label in ("s", "s_prime")]
    assert [m.length for m in tail] == [15, 15]
    assert [m.direction for m in tail] == ["A->B", "B->A"]
    assert out.control_bits == len(hash_msgs)
    assert out.payload_bits == 5 * inst.m_b * len(hash_msgs) + 30


def test_lv_control_bits_optional():
    inst = random_instance(8, 9, 11, 4, seed=2)
    plain = run_protocol("lv-sum", inst, 1, k=5)
    counted = run_protocol("lv-sum", inst, 1, k=5, count_control_bits=True)
    assert counted.bits == plain.bits + plain.control_bits


def test_lv_deterministic_transcripts():
    inst = random_instance(9, 15, 15, 7, seed=4)
    a = las_vegas_sum(inst, k=4, shared_seed=77)
    b = las_vegas_sum(inst, k=4, shared_seed=77)
    assert a.transcript == b.transcript


def test_lv_dedup_mode_sends_distinct_hashes():
    inst = random_instance(8, 5, 40, 2, seed=6)
    out = las_vegas_sum(inst, k=3, shared_seed=2, dedup=True)
    first = out.transcript.labelled("K_")[0]
    assert first.length % 3 == 0 and first.length <= 3 * 8
    assert out.oracle_match


def test_lv_round_cap_reports_status_not_value():
    # 8 hash values against 20 B elements: acceptance is rare
    inst = random_instance(8, 20, 20, 16, seed=1)
    out = run_protocol("lv-sum", inst, 1, k=3, round_cap=5)
    assert out.status == "round_cap_exceeded"
    assert out.value_at_a is None and out.value_at_b is None
    assert out.info["loop_rounds"] == 5


def test_lv_empty_b_set():
    inst = make_instance(4, {1, 2}, [])
    out = las_vegas_sum(inst, k=2)
    assert out.oracle_match and out.value == 3
    assert out.transcript.labelled("K_")[0].length == 0


def test_lv_mean_payload_tracks_rounds():
    # every run pays k * m_b per loop round plus 4n - 2, so the means agree too
    n, k, m_b = 8, 4, 6
    bits, rounds = [], []
    for t in range(2000):
        inst = random_instance(n, 4, m_b, 1, seed=t)
        out = las_vegas_sum(inst, k=k, shared_seed=t)
        bits.append(out.payload_bits)
        rounds.append(out.info["loop_rounds"])
    predicted = k * m_b * (sum(rounds) / len(rounds)) + 4 * n - 2
    assert abs(sum(bits) / len(bits) - predicted) <= 0.05 * predicted


def test_lv_needs_k():
    with pytest.raises(ProtocolError):
        run_protocol("lv-sum", make_instance(3, [1], [2]))
    with pytest.raises(ProtocolError):
        run_protocol("lv-sum", make_instance(3, [1], [2]), k=4)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=8), st.integers(0, 2**32), st.data())
def test_lv_never_wrong(inst, seed, data):
    k = data.draw(st.integers(max(1, inst.n - 3), inst.n))
    out = las_vegas_sum(inst, k=k, shared_seed=seed, round_cap=200)
    if out.ok:
        assert out.value_at_a == out.value_at_b == oracle_value(inst, "sum")
    else:
        assert out.value_at_a is None


# ---------- disjointness reduction

def test_disj_early_halt():
    out = disjointness_via_sum(make_instance(2, {0, 1}, {0, 2}))
    assert out.value_at_a == out.value_at_b == 0
    assert out.payload_bits == 2


def test_disj_overhead_beyond_sum():
    inst = make_instance(2, {1, 2}, {3})
    out = disjointness_via_sum(inst)
    assert out.value == 1
    assert out.payload_bits - trivial_sum(inst).payload_bits == 1 + (2 * 2 - 1)


def test_disj_detects_overlap_by_sum():
    out = disjointness_via_sum(make_instance(2, {1}, {1}))
    assert out.value == 0 and out.oracle_match


def test_disj_exhaustive_n2():
    subsets = all_subsets(2)
    assert len(subsets) ** 2 == 256
    for a, b in itertools.product(subsets, repeat=2):
        inst = make_instance(2, a, b)
        out = disjointness_via_sum(inst)
        assert out.value == oracle_value(inst, "disjointness")


def test_disj_verdict_bit_informs_b():
    inst = make_instance(3, {1, 2}, {4, 5})
    out = disjointness_via_sum(inst, verdict_bit=True)
    assert out.value_at_a == out.value_at_b == 1
    assert out.payload_bits == disjointness_via_sum(inst).payload_bits + 1


def test_disj_over_lv_sum():
    for seed in range(20):
        inst = random_instance(6, 5, 6, seed % 3, seed=seed)
        out = disjointness_via_sum(inst, "lv-sum", shared_seed=seed, k=5)
        assert out.oracle_match
        sub = las_vegas_sum(inst, k=5, shared_seed=seed)
        if not (0 in inst.set_a and 0 in inst.set_b):
            assert out.payload_bits - sub.payload_bits == 2 * 6


def test_disj_rejects_non_sum_subprotocol():
    with pytest.raises(ProtocolError):
        disjointness_via_sum(make_instance(2, [1], [2]), "naive-intersection")


# ---------- intersection

def test_naive_intersection_examples():
    assert naive_intersection(make_instance(2, {1, 2}, {2, 3})).value == (2,)
    assert naive_intersection(make_instance(2, [], {1, 3})).value == ()
    assert naive_intersection(make_instance(2, {1}, {1})).value == (1,)


def test_naive_intersection_first_message_length():
    # list encoding is shorter here: 2 * 8 + bits_for(kappa=3) = 18 < 256
    inst = make_instance(8, {3, 9}, {9, 10, 11})
    first = naive_intersection(inst).transcript.messages[0]
    assert first.length == min(2**8, 2 * 8 + 2)
    # characteristic vector is shorter here
    inst = random_instance(3, 6, 6, 4, seed=0)
    first = naive_intersection(inst).transcript.messages[0]
    assert first.length == min(2**3, 6 * 3 + 3) == 8


def test_naive_intersection_wide_elements():
    inst = random_instance(40, 6, 7, 3, seed=2)
    out = naive_intersection(inst)
    assert out.value == inst.intersection and out.value_at_b == inst.intersection


def test_sum_via_intersection_examples():
    assert sum_via_intersection(make_instance(2, {1, 2}, {2, 3})).value == 6
    inst = make_instance(3, {1, 2}, {4})
    assert sum_via_intersection(inst).value == 7
    assert sum_via_intersection(make_instance(2, {1}, {1})).value == 1


def test_sum_via_intersection_overhead():
    inst = random_instance(8, 10, 9, 4, seed=1)
    out = sum_via_intersection(inst)
    sub = naive_intersection(inst)
    assert out.payload_bits - sub.payload_bits == 2 * (2 * 8 - 1)


# ---------- reconcile then compute

def test_reconcile_sum():
    out = reconcile_then_compute(make_instance(2, {1, 2}, {2, 3}), "sum")
    assert out.value_at_a == out.value_at_b == 6 and out.payload_bits == 7


def test_reconcile_product():
    out = reconcile_then_compute(make_instance(2, {2, 3}, {3}), "product")
    assert out.value == 6 and out.payload_bits == 4 + 32 + 3


def test_reconcile_product_big():
    inst = make_instance(6, range(2, 64, 2), range(1, 64, 3))
    assert reconcile_then_compute(inst, "product").oracle_match


def test_reconcile_max_min():
    assert reconcile_then_compute(make_instance(2, {1}, {2}), "max").value == 2
    out = reconcile_then_compute(make_instance(4, {7, 9}, {3}), "min")
    assert out.value == 3 and out.payload_bits == 16 + 4


def test_reconcile_max_empty_union():
    with pytest.raises(ProtocolError):
        reconcile_then_compute(make_instance(2, [], []), "max")


@settings(max_examples=60, deadline=None)
@given(instances(max_n=6), st.integers(0, 1000))
def test_all_sum_like_protocols_agree_with_oracle(inst, seed):
    for pid in ("trivial-sum", "sum-via-intersection", "reconcile-sum",
                "reconcile-product", "naive-intersection", "disj-via-sum"):
        out = run_protocol(pid, inst, seed)
        assert out.ok and out.oracle_match, pid
        assert out.transcript.bits_a_to_b + out.transcript.bits_b_to_a == \
            out.payload_bits + out.control_bits


def test_unknown_protocol():
    with pytest.raises(ProtocolError):
        run_protocol("nope", make_instance(2, [1], [2]))
