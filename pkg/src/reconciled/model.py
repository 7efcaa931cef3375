"""Instances, party views, bit-exact transcripts and the two-party engine.

A protocol is written as a pair of generator functions, one per party.  A
party yields :class:`Send` to put a message on the wire and :data:`RECV` to
block until the next message from the other party arrives; the engine feeds
the received :class:`Message` back into the generator.  The party's return
value is what that party believes ``f(S_A, S_B)`` to be.
"""

from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Generator, Iterable, Sequence

MAX_BITS = 64

KINDS = ("sum", "product", "max", "min", "or", "and", "disjointness",
         "intersection", "union")


class ProtocolError(RuntimeError):
    """Raised when a protocol is misused or the engine cannot make progress."""


class EmptyUnionError(ValueError):
    pass


# ---------- instances

@dataclass(frozen=True)
class Instance:
    """The pair ``(S_A, S_B)`` of ``n``-bit element sets.

    Elements are unsigned integers below ``2**n``; both sets are stored as
    strictly increasing tuples.  Use :func:`make_instance` to build one from
    arbitrary iterables.
    """

    n: int
    set_a: tuple[int, ...]
    set_b: tuple[int, ...]
    m_a: int = field(init=False)
    m_b: int = field(init=False)
    m_0: int = field(init=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"bit width must be in [1, {MAX_BITS}], got {self.n}")
        for name, s in (("set_a", self.set_a), ("set_b", self.set_b)):
            for prev, cur in zip(s, s[1:]):
                if cur <= prev:
                    raise ValueError(f"{name} must be strictly increasing")
            if s and (s[0] < 0 or s[-1] >= 1 << self.n):
                raise ValueError(f"{name} has an element outside [0, 2**{self.n})")
        object.__setattr__(self, "m_a", len(self.set_a))
        object.__setattr__(self, "m_b", len(self.set_b))
        object.__setattr__(self, "m_0", len(set(self.set_a) & set(self.set_b)))

    @property
    def d_a(self) -> int:
        return self.m_a - self.m_0

    @property
    def d_b(self) -> int:
        return self.m_b - self.m_0

    @property
    def d(self) -> int:
        return self.d_a + self.d_b

    @property
    def kappa(self) -> int:
        return max(self.m_a, self.m_b)

    @property
    def intersection(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.set_a) & set(self.set_b)))

    @property
    def union(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.set_a) | set(self.set_b)))

    def to_json(self) -> dict:
        return {"n": self.n,
                "set_a": [hex(x) for x in self.set_a],
                "set_b": [hex(x) for x in self.set_b]}

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        def parse(v):
            return int(v, 16) if isinstance(v, str) else int(v)
        return make_instance(int(obj["n"]),
                             [parse(v) for v in obj["set_a"]],
                             [parse(v) for v in obj["set_b"]])


def make_instance(n: int, set_a: Iterable[int], set_b: Iterable[int]) -> Instance:
    """Validate two element collections and wrap them as an :class:`Instance`.

    Raises ``ValueError`` on duplicates or elements that do not fit in
    ``n`` bits.
    """
    if not 1 <= n <= MAX_BITS:
        raise ValueError(f"bit width must be in [1, {MAX_BITS}], got {n}")
    out = []
    for name, s in (("set_a", set_a), ("set_b", set_b)):
        items = [int(x) for x in s]
        if len(set(items)) != len(items):
            raise ValueError(f"{name} contains duplicate elements")
        bad = [x for x in items if not 0 <= x < 1 << n]
        if bad:
            raise ValueError(f"{name} element {bad[0]} does not fit in {n} bits")
        out.append(tuple(sorted(items)))
    return Instance(n, out[0], out[1])


def random_instance(n: int, m_a: int, m_b: int, m_0: int, seed: int) -> Instance:
    """Sample an instance with exactly the requested sizes.

    The union is drawn uniformly without replacement from ``[0, 2**n)``; its
    first ``m_0`` elements are shared, the next ``m_a - m_0`` belong to A
    only and the rest to B only.
    """
    if min(m_a, m_b, m_0) < 0 or m_0 > min(m_a, m_b):
        raise ValueError(f"infeasible sizes m_a={m_a}, m_b={m_b}, m_0={m_0}")
    total = m_a + m_b - m_0
    if total > 1 << n:
        raise ValueError(f"union of size {total} does not fit in 2**{n} elements")
    rng = random.Random(seed)
    if n <= 60:
        pool = rng.sample(range(1 << n), total)
    else:
        # range() length overflows ssize_t; draw distinct values by rejection
        seen: dict[int, None] = {}
        while len(seen) < total:
            seen.setdefault(rng.getrandbits(n))
        pool = list(seen)
    common = pool[:m_0]
    only_a = pool[m_0:m_a]
    only_b = pool[m_a:]
    return make_instance(n, common + only_a, common + only_b)


def save_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance.to_json(), fh, indent=2)
        fh.write("\n")


def load_instance(path) -> Instance:
    with open(path) as fh:
        return Instance.from_json(json.load(fh))


# ---------- oracles

def oracle_value(instance: Instance, kind: str):
    """Brute-force value of ``kind`` on the explicitly materialized union."""
    union = set(instance.set_a) | set(instance.set_b)
    if kind == "sum":
        return sum(union)
    if kind == "product":
        return math.prod(union)
    if kind in ("max", "min", "or", "and"):
        if not union:
            raise EmptyUnionError(f"{kind} of the empty union is undefined")
        if kind == "max":
            return max(union)
        if kind == "min":
            return min(union)
        acc = 0 if kind == "or" else (1 << instance.n) - 1
        for x in union:
            acc = acc | x if kind == "or" else acc & x
        return acc
    if kind == "disjointness":
        return int(not set(instance.set_a) & set(instance.set_b))
    if kind == "intersection":
        return instance.intersection
    if kind == "union":
        return tuple(sorted(union))
    raise ValueError(f"unknown function kind {kind!r}")


# ---------- party knowledge

@dataclass(frozen=True)
class PartyView:
    """Everything one party is allowed to look at during a run."""

    role: str
    n: int
    own_set: tuple[int, ...]
    known_d_own: int
    known_m0: int
    kappa: int
    shared_seed: int = 0
    private_seed: int = 0

    @property
    def other(self) -> str:
        return "B" if self.role == "A" else "A"


def party_views(instance: Instance, shared_seed: int = 0,
                private_seeds: tuple[int, int] = (1, 2)) -> tuple[PartyView, PartyView]:
    """Views for A and B; d_own and m_0 are injected, never estimated."""
    a = PartyView("A", instance.n, instance.set_a, instance.d_a, instance.m_0,
                  instance.kappa, shared_seed, private_seeds[0])
    b = PartyView("B", instance.n, instance.set_b, instance.d_b, instance.m_0,
                  instance.kappa, shared_seed, private_seeds[1])
    return a, b


# ---------- messages and transcripts

@dataclass(frozen=True)
class Message:
    """One message on the wire: ``length`` bits, most significant bit first."""

    direction: str
    bits: int
    length: int
    kind: str = "payload"
    label: str = ""

    def __post_init__(self):
        if self.direction not in ("A->B", "B->A"):
            raise ValueError(f"bad direction {self.direction!r}")
        if self.kind not in ("payload", "control"):
            raise ValueError(f"bad message kind {self.kind!r}")
        if self.length < 0 or self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"value does not fit in {self.length} bits")

    @property
    def bitstring(self) -> str:
        return format(self.bits, f"0{self.length}b") if self.length else ""

    def to_json(self) -> dict:
        return {"dir": self.direction, "kind": self.kind,
                "len_bits": self.length, "bits_hex": hex(self.bits)}


@dataclass(frozen=True)
class Transcript:
    messages: tuple[Message, ...] = ()

    @property
    def payload_bits(self) -> int:
        return sum(m.length for m in self.messages if m.kind == "payload")

    @property
    def control_bits(self) -> int:
        return sum(m.length for m in self.messages if m.kind == "control")

    @property
    def rounds(self) -> int:
        return len(self.messages)

    @property
    def bits_a_to_b(self) -> int:
        return sum(m.length for m in self.messages if m.direction == "A->B")

    @property
    def bits_b_to_a(self) -> int:
        return sum(m.length for m in self.messages if m.direction == "B->A")

    def total_bits(self, count_control_bits: bool = False) -> int:
        return self.payload_bits + (self.control_bits if count_control_bits else 0)

    def labelled(self, prefix: str) -> list[Message]:
        return [m for m in self.messages if m.label.startswith(prefix)]

    def to_json(self) -> list[dict]:
        return [m.to_json() for m in self.messages]

    @classmethod
    def from_json(cls, items: Sequence[dict]) -> "Transcript":
        return cls(tuple(Message(d["dir"], int(d["bits_hex"], 16), int(d["len_bits"]),
                                 d["kind"]) for d in items))


@dataclass(frozen=True)
class Outcome:
    """Result of one protocol run.

    ``value_at_b`` is ``None`` when the protocol does not let B learn the
    value (the disjointness reduction without its final verdict bit).
    """

    protocol: str
    value_at_a: Any
    value_at_b: Any
    transcript: Transcript
    status: str = "ok"
    oracle_match: bool = True
    count_control_bits: bool = False
    info: dict = field(default_factory=dict, compare=False)

    @property
    def value(self):
        return self.value_at_a

    @property
    def payload_bits(self) -> int:
        return self.transcript.payload_bits

    @property
    def control_bits(self) -> int:
        return self.transcript.control_bits

    @property
    def bits(self) -> int:
        return self.transcript.total_bits(self.count_control_bits)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, tuple):
                return [hex(x) for x in v]
            return v
        return {"protocol": self.protocol, "status": self.status,
                "value_at_a": enc(self.value_at_a), "value_at_b": enc(self.value_at_b),
                "payload_bits": self.payload_bits, "control_bits": self.control_bits,
                "bits": self.bits, "rounds": self.transcript.rounds,
                "bits_a_to_b": self.transcript.bits_a_to_b,
                "bits_b_to_a": self.transcript.bits_b_to_a,
                "oracle_match": self.oracle_match,
                **{k: v for k, v in self.info.items() if not k.startswith("_")}}


# ---------- bit packing

def pack_fields(values: Sequence[int], width: int) -> int:
    acc = 0
    for v in values:
        if v < 0 or v >> width:
            raise ValueError(f"{v} does not fit in {width} bits")
        acc = (acc << width) | v
    return acc


def unpack_fields(bits: int, length: int, width: int) -> list[int]:
    if width == 0:
        return []
    if length % width:
        raise ProtocolError(f"message of {length} bits is not a multiple of {width}")
    count = length // width
    mask = (1 << width) - 1
    return [(bits >> (width * (count - 1 - i))) & mask for i in range(count)]


def bits_for(count: int) -> int:
    """Width of a field that can hold every integer in ``[0, count]``."""
    return max(1, count.bit_length())


def characteristic_vector(elements: Iterable[int], start: int, stop: int) -> int:
    """Indicator of ``elements`` over ``range(start, stop)``, first index as MSB."""
    width = stop - start
    acc = 0
    for x in elements:
        if start <= x < stop:
            acc |= 1 << (width - 1 - (x - start))
    return acc


def from_characteristic_vector(bits: int, start: int, stop: int) -> list[int]:
    width = stop - start
    return [start + i for i in range(width) if bits >> (width - 1 - i) & 1]


# ---------- engine

@dataclass(frozen=True)
class Send:
    bits: int
    length: int
    kind: str = "payload"
    label: str = ""


RECV = object()

# Returned by a party that gave up at the round cap.
CAPPED = object()

Party = Generator[Any, Any, Any]


def execute(party_a: Party, party_b: Party) -> tuple[Any, Any, Transcript]:
    """Drive two party generators to completion over a lossless channel.

    Messages are delivered in order.  Returns the two parties' results and
    the transcript.
    """
    gens = {"A": party_a, "B": party_b}
    inbox: dict[str, deque] = {"A": deque(), "B": deque()}
    request: dict[str, Any] = {}
    result: dict[str, Any] = {}
    messages: list[Message] = []

    def step(role, feed):
        try:
            request[role] = gens[role].send(feed)
        except StopIteration as stop:
            result[role] = stop.value

    step("A", None)
    step("B", None)
    while len(result) < 2:
        progressed = False
        for role, other in (("A", "B"), ("B", "A")):
            while role not in result:
                req = request[role]
                if isinstance(req, Send):
                    msg = Message(f"{role}->{other}", req.bits, req.length,
                                  req.kind, req.label)
                    messages.append(msg)
                    inbox[other].append(msg)
                    feed = None
                elif req is RECV and inbox[role]:
                    feed = inbox[role].popleft()
                elif req is RECV:
                    break
                else:
                    raise ProtocolError(f"party {role} yielded {req!r}")
                progressed = True
                step(role, feed)
        if not progressed:
            raise ProtocolError("deadlock: both parties are waiting")
    if inbox["A"] or inbox["B"]:
        raise ProtocolError("run finished with undelivered messages")
    return result["A"], result["B"], Transcript(tuple(messages))
