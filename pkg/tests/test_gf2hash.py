import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reconciled.gf2hash import (HashSequence, LinearHash, apply, collision_rate_mc,
                                full_rank_fraction, gf2_rank, preimage_histogram,
                                sample_full_rank)


def _independent(rows):
    # brute force: no nonempty subset of rows xors to zero
    for r in range(1, len(rows) + 1):
        for combo in itertools.combinations(rows, r):
            acc = 0
            for v in combo:
                acc ^= v
            if acc == 0:
                return False
    return True


def _parity_hash(rows, x):
    return tuple(bin(r & x).count("1") % 2 for r in rows)


def exact_collision_rate(n, k):
    """Average over all full-rank k x n matrices and all pairs x != y."""
    hits = total = 0
    for rows in itertools.product(range(1 << n), repeat=k):
        if not _independent(rows):
            continue
        images = [_parity_hash(rows, x) for x in range(1 << n)]
        for x in range(1 << n):
            for y in range(1 << n):
                if x != y:
                    total += 1
                    hits += images[x] == images[y]
    return Fraction(hits, total)


def test_exhaustive_collision_rate_3_2():
    assert exact_collision_rate(3, 2) == Fraction(1, 7)


def test_exhaustive_collision_rate_4_2():
    assert exact_collision_rate(4, 2) == Fraction(1, 5)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (3, 3), (4, 3)])
def test_exhaustive_collision_rate_matches_closed_form(n, k):
    assert exact_collision_rate(n, k) == Fraction(2 ** (n - k) - 1, 2**n - 1)


@pytest.mark.parametrize("n,k", [(2, 1), (2, 2), (3, 2), (4, 2), (4, 4)])
def test_full_rank_fraction_by_enumeration(n, k):
    full = sum(_independent(rows) for rows in itertools.product(range(1 << n), repeat=k))
    assert full / 2 ** (n * k) == pytest.approx(full_rank_fraction(n, k), abs=1e-12)
    assert full_rank_fraction(n, k) > 0.288


def test_rank_agrees_with_brute_force():
    rng = random.Random(0)
    for _ in range(300):
        rows = [rng.getrandbits(4) for _ in range(rng.randint(1, 4))]
        assert (gf2_rank(rows) == len(rows)) == _independent(rows)


def test_square_sample_is_bijection():
    h = sample_full_rank(6, 6, random.Random(1))
    assert sorted(apply(h, x) for x in range(64)) == list(range(64))


def test_rank_one_row_nonzero():
    for seed in range(20):
        h = sample_full_rank(3, 1, random.Random(seed))
        assert h.rows[0] != 0


def test_rejects_bad_widths():
    with pytest.raises(ValueError):
        sample_full_rank(3, 4, random.Random(0))
    with pytest.raises(ValueError):
        sample_full_rank(3, 0, random.Random(0))


def test_rank_deficient_matrix_rejected():
    with pytest.raises(ValueError):
        LinearHash(3, 2, (0b011, 0b011))


def test_apply_examples():
    ident = LinearHash.identity(5)
    assert all(apply(ident, x) == x for x in range(32))
    h = LinearHash(3, 1, (0b111,))
    assert apply(h, 0b101) == 0
    assert apply(h, 0b100) == 1


@given(st.integers(1, 12), st.data())
def test_apply_zero_and_linearity(n, data):
    k = data.draw(st.integers(1, n))
    h = sample_full_rank(n, k, random.Random(data.draw(st.integers(0, 2**32))))
    x = data.draw(st.integers(0, 2**n - 1))
    y = data.draw(st.integers(0, 2**n - 1))
    assert apply(h, 0) == 0
    assert apply(h, x ^ y) == apply(h, x) ^ apply(h, y)


def test_histogram_single_row():
    h = LinearHash(3, 1, (0b111,))
    assert preimage_histogram(h).tolist() == [4, 4]


def test_histogram_n4_k2_exhaustive():
    # every full-rank 2 x 4 matrix, counted by direct enumeration of inputs
    for rows in itertools.product(range(16), repeat=2):
        if not _independent(rows):
            continue
        counts = [0] * 4
        for x in range(16):
            b = _parity_hash(rows, x)
            counts[b[0] * 2 + b[1]] += 1
        assert counts == [4, 4, 4, 4]
        assert preimage_histogram(LinearHash(4, 2, rows)).tolist() == counts


@pytest.mark.parametrize("n", range(1, 11))
def test_histogram_balanced(n):
    rng = random.Random(n)
    for k in range(1, n + 1):
        h = sample_full_rank(n, k, rng)
        hist = preimage_histogram(h)
        assert len(hist) == 2**k
        assert (hist == 2 ** (n - k)).all()


def test_histogram_refuses_large_n():
    with pytest.raises(ValueError):
        preimage_histogram(sample_full_rank(30, 2, random.Random(0)))


def test_collision_mc_bijection_is_zero():
    assert collision_rate_mc(6, 6, 5000, 1) == 0.0


def test_collision_mc_small():
    p = 1 / 7
    trials = 200_000
    est = collision_rate_mc(3, 2, trials, 3)
    assert abs(est - p) < 3 * (p * (1 - p) / trials) ** 0.5


def test_collision_mc_wide():
    # n = 64 exercises the full-width sampling path
    assert collision_rate_mc(64, 1, 20_000, 0) == pytest.approx(0.5, abs=0.015)


def test_hash_sequence_agreement():
    s1, s2 = HashSequence(99, 10, 4), HashSequence(99, 10, 4)
    assert all(s1[i] == s2[i] for i in range(1000))
    other = HashSequence(100, 10, 4)
    assert any(s1[i] != other[i] for i in range(10))


def test_dump_roundtrip():
    h = sample_full_rank(12, 5, random.Random(4))
    text = h.dump()
    assert text.splitlines()[0] == "12 5"
    assert LinearHash.load(text) == h
