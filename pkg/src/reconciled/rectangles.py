"""Fooling families for the sum and product lower bounds.

For a ground set ``G`` every pair ``(Y, G - Y)`` has the same union, hence
the same function value.  Two such pairs ``(Y_i, Y'_i)`` and ``(Y_j, Y'_j)``
cannot lie in one monochromatic rectangle, because a rectangle containing
both also contains the crossed pairs, and at least one crossed pair misses
an element of ``G`` (sum) or a factor of the product.  Counting the pairs
of all families, whose values are pairwise distinct, lower-bounds the
number of rectangles in any monochromatic partition, and ``ceil(log2)`` of
that count lower-bounds the bits of any deterministic protocol.

Subsets of ``F_2^n`` are ``2**n``-bit masks (bit ``x`` set iff ``x`` is in
the subset).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

MAX_MATERIALIZE_N = 4


def mask_elements(mask: int) -> list[int]:
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return out


def elements_mask(elements) -> int:
    m = 0
    for x in elements:
        m |= 1 << x
    return m


def union_value(kind: str, mask: int) -> int:
    """``kind`` (sum or product) of the set encoded by ``mask``."""
    if kind == "sum":
        return sum(mask_elements(mask))
    if kind == "product":
        return math.prod(mask_elements(mask))
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class SubsetPair:
    y_mask: int
    y_prime_mask: int
    value: int

    @property
    def y(self) -> list[int]:
        return mask_elements(self.y_mask)

    @property
    def y_prime(self) -> list[int]:
        return mask_elements(self.y_prime_mask)


@dataclass(frozen=True)
class FoolingFamily:
    kind: str
    label: int
    common_value: int
    ground: tuple[int, ...]
    pairs: tuple[SubsetPair, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.pairs)


def _split_family(kind: str, label: int, ground: list[int]) -> FoolingFamily:
    gmask = elements_mask(ground)
    value = union_value(kind, gmask)
    pairs = []
    # enumerate every submask of the ground set
    sub = gmask
    while True:
        pairs.append(SubsetPair(sub, gmask ^ sub, value))
        if sub == 0:
            break
        sub = (sub - 1) & gmask
    pairs.reverse()
    return FoolingFamily(kind, label, value, tuple(ground), tuple(pairs))


def _check_n(n: int):
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_MATERIALIZE_N:
        raise ValueError(f"families for n={n} are too large to materialize "
                         f"(limit n <= {MAX_MATERIALIZE_N})")


def sum_fooling_families(n: int) -> list[FoolingFamily]:
    """The family over ``F^n - {0}`` followed by one per removed ``l >= 1``."""
    _check_n(n)
    top = 1 << n
    fams = [_split_family("sum", 0, list(range(1, top)))]
    for ell in range(1, top):
        fams.append(_split_family("sum", ell, [x for x in range(1, top) if x != ell]))
    return fams


def product_fooling_families(n: int) -> list[FoolingFamily]:
    """Families over ``F^n - {0, 1}`` and ``F^n - {0, 1, l}``, plus a zero cell.

    The last family is the single pair ``({0}, {})`` of value 0; every other
    family value is a positive factorial quotient, so it is distinct.
    """
    _check_n(n)
    top = 1 << n
    fams = [_split_family("product", 0, list(range(2, top)))]
    for ell in range(2, top):
        fams.append(_split_family("product", ell,
                                  [x for x in range(2, top) if x != ell]))
    fams.append(FoolingFamily("product", -1, 0, (0,), (SubsetPair(1, 0, 0),)))
    return fams


@dataclass
class FoolingReport:
    kind: str
    passed: bool
    checked_pairs: int = 0
    violations: list = field(default_factory=list)
    sampled: bool = False


def verify_fooling(families: list[FoolingFamily], kind: str, *,
                   samples: int | None = None, seed: int = 0,
                   max_violations: int = 10) -> FoolingReport:
    """Check the crossing condition inside each family and value distinctness.

    For ``i != j`` in one family with common value ``v`` the pairs are fooling
    iff ``f(Y_i, Y'_j) != v`` or ``f(Y_j, Y'_i) != v``.  With ``samples`` set,
    that many random index pairs are drawn per family instead of all of them.
    """
    report = FoolingReport(kind, True, sampled=samples is not None)
    cache: dict[int, int] = {}

    def f(mask):
        v = cache.get(mask)
        if v is None:
            v = cache[mask] = union_value(kind, mask)
        return v

    def record(entry):
        report.passed = False
        if len(report.violations) < max_violations:
            report.violations.append(entry)

    seen: dict[int, int] = {}
    for fam in families:
        if fam.common_value in seen:
            record({"family": fam.label, "reason": "value shared with family",
                    "other": seen[fam.common_value]})
        seen[fam.common_value] = fam.label
        for idx, p in enumerate(fam.pairs):
            if f(p.y_mask | p.y_prime_mask) != fam.common_value:
                record({"family": fam.label, "pair": idx, "reason": "off-value pair"})
        pairs = fam.pairs
        v = fam.common_value
        if samples is None:
            index_pairs = ((i, j) for i in range(len(pairs)) for j in range(i + 1, len(pairs)))
        else:
            rng = random.Random(f"fooling/{seed}/{fam.label}")
            size = len(pairs)
            index_pairs = (tuple(rng.sample(range(size), 2)) for _ in range(samples)) \
                if size > 1 else iter(())
        for i, j in index_pairs:
            a, b = pairs[i], pairs[j]
            report.checked_pairs += 1
            if f(a.y_mask | b.y_prime_mask) == v and f(b.y_mask | a.y_prime_mask) == v:
                record({"family": fam.label, "i": i, "j": j,
                        "reason": "both crossed pairs keep the value"})
    return report


def rectangle_count_lower_bound(n: int, kind: str) -> int:
    """Closed-form number of pairwise-incompatible monochromatic cells."""
    if n < 1:
        raise ValueError("n must be positive")
    top = 1 << n
    if kind == "sum":
        return 2 ** (top - 1) + (top - 1) * 2 ** (top - 2)
    if kind == "product":
        if n == 1:
            # only the pair ({}, {}) over the empty ground set, plus the zero cell
            return 2
        return 2 ** (top - 2) + (top - 2) * 2 ** (top - 3) + 1
    raise ValueError(f"unknown kind {kind!r}")


def ceil_log2(x: int) -> int:
    if x < 1:
        raise ValueError("x must be positive")
    return (x - 1).bit_length()


def closed_form_bound(n: int, kind: str) -> int:
    return (1 << n) + n - (1 if kind == "sum" else 2)


def comm_lower_bound(n: int, kind: str) -> int:
    if n > 24:
        # the count has about 2**n bits; trust the closed form past this point
        return closed_form_bound(n, kind)
    bits = ceil_log2(rectangle_count_lower_bound(n, kind))
    if bits != closed_form_bound(n, kind):
        raise AssertionError(f"log2 of the rectangle count gives {bits}, "
                             f"closed form gives {closed_form_bound(n, kind)}")
    return bits


def literature_bounds(n: int) -> dict:
    """Disjointness-derived reference values for the sum problem."""
    if n < 1:
        raise ValueError("n must be positive")
    top = 1 << n
    return {"disj_det": top + 1,
            "sum_det": top - 2 * n + 1,
            "sum_randomized_order": top}


def bounds_report(kind: str, n: int, *, samples: int | None = None,
                  seed: int = 0) -> dict:
    """Build, verify and summarize the families as the verify-bounds JSON.

    ``samples`` is the total number of random crossings to test, spread
    evenly over the families; ``None`` checks every crossing.
    """
    fams = (sum_fooling_families if kind == "sum" else product_fooling_families)(n)
    per_family = None if samples is None else -(-samples // len(fams))
    rep = verify_fooling(fams, kind, samples=per_family, seed=seed)
    count = sum(f.size for f in fams)
    closed = rectangle_count_lower_bound(n, kind)
    bits = ceil_log2(count)
    return {
        "kind": kind,
        "n": n,
        "families": [{"label": f.label, "size": f.size, "value_dec": str(f.common_value)}
                     for f in fams],
        "count_lower_bound": count,
        "comm_lower_bound_bits": bits,
        "closed_form_bits": closed_form_bound(n, kind),
        "checked_pairs": rep.checked_pairs,
        "sampled": rep.sampled,
        "violations": rep.violations,
        "pass": rep.passed and count == closed and bits == closed_form_bound(n, kind),
    }
