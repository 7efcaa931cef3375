"""Balanced hashes F_2^n -> F_2^k realized as full-rank bit matrices.

A hash is stored as ``k`` row masks; output bit ``j`` (row 0 is the most
significant output bit) is the parity of ``row_j & x``.  Because the rows
are linearly independent, every output has exactly ``2**(n-k)`` preimages,
and a uniformly random full-rank matrix maps a fixed pair ``x != y`` to the
same value with probability ``(2**(n-k) - 1) / (2**n - 1)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .model import MAX_BITS


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of the row masks, by xor-basis insertion."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


@dataclass(frozen=True)
class LinearHash:
    n: int
    k: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"input width must be in [1, {MAX_BITS}], got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if len(self.rows) != self.k:
            raise ValueError(f"expected {self.k} rows, got {len(self.rows)}")
        if any(r < 0 or r >> self.n for r in self.rows):
            raise ValueError(f"row does not fit in {self.n} bits")
        if gf2_rank(self.rows) != self.k:
            raise ValueError("rows are linearly dependent; hash would not be balanced")

    def __call__(self, x: int) -> int:
        return apply(self, x)

    def dump(self) -> str:
        """Text form: header ``"n k"`` then one hex row per line."""
        width = (self.n + 3) // 4
        return "\n".join([f"{self.n} {self.k}"]
                         + [f"{r:0{width}x}" for r in self.rows]) + "\n"

    @classmethod
    def load(cls, text: str) -> "LinearHash":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        n, k = (int(v) for v in lines[0].split())
        return cls(n, k, tuple(int(ln, 16) for ln in lines[1:]))

    @classmethod
    def identity(cls, n: int) -> "LinearHash":
        return cls(n, n, tuple(1 << (n - 1 - j) for j in range(n)))


def apply(h: LinearHash, x: int) -> int:
    if x < 0 or x >> h.n:
        raise ValueError(f"{x} does not fit in {h.n} bits")
    out = 0
    for r in h.rows:
        out = (out << 1) | ((r & x).bit_count() & 1)
    return out


def sample_full_rank(n: int, k: int, rng: random.Random) -> LinearHash:
    """Uniform rank-``k`` matrix by rejection sampling on uniform matrices."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    while True:
        rows = tuple(rng.getrandbits(n) for _ in range(k))
        if gf2_rank(rows) == k:
            return LinearHash(n, k, rows)


def full_rank_fraction(n: int, k: int) -> float:
    """Probability that a uniform k x n bit matrix has rank k."""
    p = 1.0
    for i in range(k):
        p *= 1.0 - 2.0 ** (i - n)
    return p


def _outputs(h: LinearHash, xs: np.ndarray) -> np.ndarray:
    out = np.zeros(xs.shape, dtype=np.uint64)
    for r in h.rows:
        par = np.bitwise_count(xs & np.uint64(r)) & np.uint8(1)
        out = (out << np.uint64(1)) | par.astype(np.uint64)
    return out


def preimage_histogram(h: LinearHash) -> np.ndarray:
    """Number of inputs mapping to each of the ``2**k`` outputs."""
    if h.n > 24:
        raise ValueError(f"cannot enumerate 2**{h.n} inputs")
    xs = np.arange(1 << h.n, dtype=np.uint64)
    return np.bincount(_outputs(h, xs).astype(np.int64), minlength=1 << h.k)


def _full_rank_mask(rows: np.ndarray, n: int) -> np.ndarray:
    """Vectorized rank test for a batch of k-row matrices, shape (trials, k)."""
    trials, k = rows.shape
    basis = np.zeros((trials, n), dtype=np.uint64)
    ok = np.ones(trials, dtype=bool)
    for j in range(k):
        r = rows[:, j].copy()
        placed = np.zeros(trials, dtype=bool)
        for bit in range(n - 1, -1, -1):
            has = ((r >> np.uint64(bit)) & np.uint64(1)).astype(bool) & ~placed
            slot = basis[:, bit]
            empty = slot == 0
            put = has & empty
            basis[put, bit] = r[put]
            placed |= put
            red = has & ~empty
            r[red] ^= slot[red]
        ok &= placed
    return ok


def collision_rate_mc(n: int, k: int, trials: int,
                      rng: np.random.Generator | int | None = None) -> float:
    """Fraction of random (h, x != y) draws with h(x) == h(y).

    Uses linearity: ``h(x) == h(y)`` iff ``h(x ^ y) == 0``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 1 <= k <= n <= MAX_BITS:
        raise ValueError(f"need 1 <= k <= n <= {MAX_BITS}")
    rng = np.random.default_rng(rng)
    hits = 0
    chunk = 1 << 17
    done = 0
    while done < trials:
        t = min(chunk, trials - done)
        rows = _uniform_words(rng, n, (t, k))
        bad = ~_full_rank_mask(rows, n)
        while bad.any():
            rows[bad] = _uniform_words(rng, n, (int(bad.sum()), k))
            bad[bad] = ~_full_rank_mask(rows[bad], n)
        x = _uniform_words(rng, n, (t,))
        y = _uniform_words(rng, n, (t,))
        same = x == y
        while same.any():
            y[same] = _uniform_words(rng, n, (int(same.sum()),))
            same = x == y
        z = x ^ y
        par = np.bitwise_count(rows & z[:, None]) & np.uint8(1)
        hits += int((par.sum(axis=1) == 0).sum())
        done += t
    return hits / trials


def _uniform_words(rng: np.random.Generator, n: int, shape) -> np.ndarray:
    if n == 64:
        return rng.integers(0, 2**64 - 1, size=shape, dtype=np.uint64, endpoint=True)
    return rng.integers(0, 1 << n, size=shape, dtype=np.uint64)


class HashSequence:
    """The shared stream ``h_0, h_1, ...`` both parties derive from one seed.

    ``seq[i]`` depends only on ``(shared_seed, n, k, i)``, so two parties
    holding the same seed agree on every hash without communicating.
    """

    def __init__(self, shared_seed: int, n: int, k: int):
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        self.shared_seed = shared_seed
        self.n = n
        self.k = k

    def __getitem__(self, i: int) -> LinearHash:
        if i < 0:
            raise IndexError(i)
        return _sequence_member(self.shared_seed, self.n, self.k, i)

    def __eq__(self, other):
        return (isinstance(other, HashSequence)
                and (self.shared_seed, self.n, self.k)
                == (other.shared_seed, other.n, other.k))

    def __hash__(self):
        return hash((self.shared_seed, self.n, self.k))


@lru_cache(maxsize=4096)
def _sequence_member(seed: int, n: int, k: int, i: int) -> LinearHash:
    return sample_full_rank(n, k, random.Random(f"gf2hash/{seed}/{n}/{k}/{i}"))
