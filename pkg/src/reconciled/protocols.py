"""Two-party protocols for functions of the union ``S_A | S_B``.

Every protocol is a pair of party generators (see :mod:`reconciled.model`).
The registry at the bottom maps the stable protocol ids to descriptors;
:func:`run_protocol` is the single entry point used by the CLI and bench.

Wire conventions: elements are ``n``-bit fields, sums are ``2n - 1``-bit
fields (the largest possible sum, ``2**(n-1) * (2**n - 1)``, needs exactly
that many), characteristic vectors put the smallest index first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .gf2hash import HashSequence
from .model import (CAPPED, RECV, Instance, Outcome, PartyView, ProtocolError,
                    Send, bits_for, characteristic_vector, execute,
                    from_characteristic_vector, oracle_value, pack_fields,
                    party_views, unpack_fields)

DEFAULT_ROUND_CAP = 10_000
CHAR_VECTOR_MAX_N = 24


def sum_width(n: int) -> int:
    return 2 * n - 1


def _require_char_vector(instance: Instance):
    if instance.n > CHAR_VECTOR_MAX_N:
        raise ProtocolError(f"characteristic vectors need n <= {CHAR_VECTOR_MAX_N}, "
                            f"got n={instance.n}")


# ---------- idempotent exchange

_IDEMPOTENT = {
    "max": max,
    "min": min,
    "or": lambda a, b: a | b,
    "and": lambda a, b: a & b,
}


def _fold(op: str, xs, n: int) -> int:
    f = _IDEMPOTENT[op]
    acc = xs[0]
    for x in xs[1:]:
        acc = f(acc, x)
    return acc


def _idempotent_party(view: PartyView, op: str):
    own = _fold(op, view.own_set, view.n)
    if view.role == "A":
        yield Send(own, view.n, label="x_A")
        other = (yield RECV).bits
    else:
        other = (yield RECV).bits
        yield Send(own, view.n, label="x_B")
    return _IDEMPOTENT[op](own, other)


# ---------- trivial characteristic-vector sum

def _trivial_sum_a(view: PartyView):
    n = view.n
    # zero contributes nothing to the sum, so only indices 1 .. 2**n - 1 are sent
    vec = characteristic_vector(view.own_set, 1, 1 << n)
    yield Send(vec, (1 << n) - 1, label="char_a")
    return (yield RECV).bits


def _trivial_sum_b(view: PartyView):
    n = view.n
    msg = yield RECV
    theirs = from_characteristic_vector(msg.bits, 1, 1 << n)
    total = sum(set(theirs) | set(view.own_set))
    yield Send(total, sum_width(n), label="sum")
    return total


# ---------- Las Vegas hashing sum

@dataclass
class RoundState:
    """A's view of one loop iteration of the hashing protocol."""

    i: int
    k_values: list[int]
    l_set: list[int]
    s: int | None = None
    s_prime: int | None = None


def _lv_party_a(view: PartyView, k: int, round_cap: int, trace: list | None):
    n = view.n
    seq = HashSequence(view.shared_seed, n, k)
    i = 0
    while True:
        msg = yield RECV
        k_values = unpack_fields(msg.bits, msg.length, k)
        received = set(k_values)
        h = seq[i]
        l_set = [x for x in view.own_set if h(x) not in received]
        if trace is not None:
            trace.append(RoundState(i, k_values, l_set))
        if len(l_set) == view.known_d_own:
            yield Send(0, 1, "control", "stop")
            break
        yield Send(1, 1, "control", "continue")
        i += 1
        if i >= round_cap:
            return CAPPED
    s = sum(l_set)
    if trace is not None:
        trace[-1].s = s
    yield Send(s, sum_width(n), label="s")
    s_prime = (yield RECV).bits
    if trace is not None:
        trace[-1].s_prime = s_prime
    return s_prime


def _lv_party_b(view: PartyView, k: int, round_cap: int, dedup: bool):
    n = view.n
    seq = HashSequence(view.shared_seed, n, k)
    i = 0
    while True:
        h = seq[i]
        hashes = [h(x) for x in view.own_set]
        if dedup:
            hashes = sorted(set(hashes))
        yield Send(pack_fields(hashes, k), k * len(hashes), label=f"K_{i}")
        if (yield RECV).bits == 0:
            break
        i += 1
        if i >= round_cap:
            return CAPPED
    s = (yield RECV).bits
    s_prime = s + sum(view.own_set)
    yield Send(s_prime, sum_width(n), label="s_prime")
    return s_prime


# ---------- intersection and the intersection-based sum

def _naive_intersection_a(view: PartyView):
    n = view.n
    prefix = bits_for(view.kappa)
    list_len = len(view.own_set) * n + prefix
    if n <= CHAR_VECTOR_MAX_N and (1 << n) <= list_len:
        yield Send(characteristic_vector(view.own_set, 0, 1 << n), 1 << n,
                   label="set_a")
    else:
        yield Send((len(view.own_set) << (len(view.own_set) * n))
                   | pack_fields(view.own_set, n), list_len, label="set_a")
    msg = yield RECV
    count = msg.bits >> (msg.length - prefix)
    body = msg.bits & ((1 << (msg.length - prefix)) - 1)
    common = unpack_fields(body, count * n, n)
    return tuple(common)


def _naive_intersection_b(view: PartyView):
    n = view.n
    prefix = bits_for(view.kappa)
    msg = yield RECV
    if n <= CHAR_VECTOR_MAX_N and msg.length == 1 << n:
        theirs = from_characteristic_vector(msg.bits, 0, 1 << n)
    else:
        count = msg.bits >> (msg.length - prefix)
        theirs = unpack_fields(msg.bits & ((1 << (count * n)) - 1), count * n, n)
    common = sorted(set(theirs) & set(view.own_set))
    yield Send((len(common) << (len(common) * n)) | pack_fields(common, n),
               prefix + len(common) * n, label="intersection")
    return tuple(common)


def _sum_via_intersection_party(view: PartyView, sub: Callable):
    common = yield from sub(view)
    width = sum_width(view.n)
    own = sum(view.own_set)
    if view.role == "A":
        yield Send(own, width, label="x_A")
        other = (yield RECV).bits
    else:
        other = (yield RECV).bits
        yield Send(own, width, label="x_B")
    return own + other - sum(common)


# ---------- disjointness through a sum protocol

def _disj_party_a(view: PartyView, sub: Callable, verdict_bit: bool):
    n = view.n
    yield Send(int(0 in view.own_set), 1, label="zero_flag")
    reply = yield RECV
    if reply.bits == 1:
        return 0
    y = yield from sub(view)
    if y is CAPPED:
        return CAPPED
    x_b = (yield RECV).bits
    verdict = int(sum(view.own_set) + x_b == y)
    if verdict_bit:
        yield Send(verdict, 1, label="verdict")
    return verdict


def _disj_party_b(view: PartyView, sub: Callable, verdict_bit: bool):
    n = view.n
    zero_flag = (yield RECV).bits
    if zero_flag and 0 in view.own_set:
        # the halt announcement carries the answer itself, so it is payload
        yield Send(1, 1, label="halt")
        return 0
    yield Send(0, 1, "control", "go")
    y = yield from sub(view)
    if y is CAPPED:
        return CAPPED
    yield Send(sum(view.own_set), sum_width(n), label="x_B")
    if verdict_bit:
        return (yield RECV).bits
    return None


# ---------- one-directional reconciliation, then compute

def _reconcile_a(view: PartyView, phi: str):
    n = view.n
    yield Send(characteristic_vector(view.own_set, 0, 1 << n), 1 << n, label="char_a")
    msg = yield RECV
    if phi == "product":
        return msg.bits & ((1 << (msg.length - 32)) - 1)
    return msg.bits


def _reconcile_b(view: PartyView, phi: str):
    n = view.n
    msg = yield RECV
    union = sorted(set(from_characteristic_vector(msg.bits, 0, 1 << n))
                   | set(view.own_set))
    if phi == "sum":
        value = sum(union)
        yield Send(value, sum_width(n), label="value")
    elif phi == "product":
        value = math.prod(union)
        length = value.bit_length()
        if length >> 32:
            raise ProtocolError("product too long for a 32-bit length prefix")
        yield Send((length << length) | value, 32 + length, label="value")
    else:
        if not union:
            raise ProtocolError(f"{phi} of the empty union is undefined")
        value = max(union) if phi == "max" else min(union)
        yield Send(value, n, label="value")
    return value


# ---------- registry

@dataclass(frozen=True)
class ProtocolDescriptor:
    id: str
    function: str
    parties: Callable
    check: Callable[[Instance, dict], None] = lambda inst, params: None
    params: dict = field(default_factory=dict)
    doc: str = ""


def _check_idempotent(inst, params):
    if not inst.set_a or not inst.set_b:
        raise ProtocolError("idempotent exchange needs both sets nonempty")


def _check_char(inst, params):
    _require_char_vector(inst)


def _check_lv(inst, params):
    k = params.get("k")
    if k is None:
        raise ProtocolError("lv-sum needs a hash width k")
    if not 1 <= k <= inst.n:
        raise ProtocolError(f"need 1 <= k <= n, got k={k}, n={inst.n}")


def _check_intersection(inst, params):
    if inst.n > CHAR_VECTOR_MAX_N and inst.m_a * inst.n > (1 << inst.n):
        raise ProtocolError("instance too large for naive intersection")


def _check_reconcile(phi):
    def check(inst, params):
        _require_char_vector(inst)
        if phi in ("max", "min") and not (inst.set_a or inst.set_b):
            raise ProtocolError(f"{phi} of the empty union is undefined")
    return check


def _idempotent_parties(op):
    def parties(va, vb, params):
        return _idempotent_party(va, op), _idempotent_party(vb, op)
    return parties


def _trivial_parties(va, vb, params):
    return _trivial_sum_a(va), _trivial_sum_b(vb)


def _lv_parties(va, vb, params):
    cap = params.get("round_cap", DEFAULT_ROUND_CAP)
    return (_lv_party_a(va, params["k"], cap, params.get("_trace")),
            _lv_party_b(vb, params["k"], cap, params.get("dedup", False)))


def _intersection_parties(va, vb, params):
    return _naive_intersection_a(va), _naive_intersection_b(vb)


def _sub_for_role(sub_id: str, params: dict, role: str) -> Callable:
    desc = REGISTRY[sub_id]

    def run(view):
        # only this party's half of the pair is ever started
        pair = desc.parties(view, view, params)
        return (yield from pair[0 if role == "A" else 1])
    return run


def _sum_via_intersection_parties(va, vb, params):
    sub = params.get("sub", "naive-intersection")
    return (_sum_via_intersection_party(va, _sub_for_role(sub, params, "A")),
            _sum_via_intersection_party(vb, _sub_for_role(sub, params, "B")))


def _disj_parties(va, vb, params):
    sub = params.get("sub", "trivial-sum")
    verdict = params.get("verdict_bit", False)
    return (_disj_party_a(va, _sub_for_role(sub, params, "A"), verdict),
            _disj_party_b(vb, _sub_for_role(sub, params, "B"), verdict))


def _check_disj(inst, params):
    sub = params.get("sub", "trivial-sum")
    if REGISTRY[sub].function != "sum":
        raise ProtocolError(f"{sub} does not compute a sum")
    REGISTRY[sub].check(inst, params)


def _check_svi(inst, params):
    sub = params.get("sub", "naive-intersection")
    if REGISTRY[sub].function != "intersection":
        raise ProtocolError(f"{sub} does not compute an intersection")
    REGISTRY[sub].check(inst, params)


def _reconcile_parties(phi):
    def parties(va, vb, params):
        return _reconcile_a(va, phi), _reconcile_b(vb, phi)
    return parties


REGISTRY: dict[str, ProtocolDescriptor] = {}


def register(desc: ProtocolDescriptor) -> ProtocolDescriptor:
    if desc.id in REGISTRY:
        raise ValueError(f"protocol id {desc.id!r} already registered")
    REGISTRY[desc.id] = desc
    return desc


for _op in ("max", "min", "or", "and"):
    register(ProtocolDescriptor(f"idempotent-{_op}", _op, _idempotent_parties(_op),
                                _check_idempotent,
                                doc=f"exchange local {_op} values, 2n bits"))
register(ProtocolDescriptor("trivial-sum", "sum", _trivial_parties, _check_char,
                            doc="A sends its characteristic vector, B replies with the sum"))
register(ProtocolDescriptor("lv-sum", "sum", _lv_parties, _check_lv, {"k": None},
                            doc="Las Vegas hashing sum"))
register(ProtocolDescriptor("naive-intersection", "intersection",
                            _intersection_parties, _check_intersection,
                            doc="A sends its set, B replies with the intersection"))
register(ProtocolDescriptor("sum-via-intersection", "sum",
                            _sum_via_intersection_parties, _check_svi,
                            {"sub": "naive-intersection"},
                            doc="intersection subprotocol, then exchange local sums"))
register(ProtocolDescriptor("disj-via-sum", "disjointness", _disj_parties, _check_disj,
                            {"sub": "trivial-sum", "verdict_bit": False},
                            doc="disjointness from a sum protocol plus x_B"))
for _phi in ("sum", "product", "max", "min"):
    register(ProtocolDescriptor(f"reconcile-{_phi}", _phi, _reconcile_parties(_phi),
                                _check_reconcile(_phi),
                                doc=f"one-directional reconciliation, B returns the {_phi}"))


def run_protocol(protocol_id: str, instance: Instance, shared_seed: int = 0, *,
                 round_cap: int = DEFAULT_ROUND_CAP, count_control_bits: bool = False,
                 trace: bool = False, **params) -> Outcome:
    """Run a registered protocol on ``instance`` and check it against the oracle.

    Extra keyword arguments are protocol parameters (``k`` for ``lv-sum``,
    ``sub`` for the compound protocols, ``dedup``, ``verdict_bit``).  The run
    is a pure function of ``(protocol_id, instance, shared_seed, params)``.
    """
    try:
        desc = REGISTRY[protocol_id]
    except KeyError:
        raise ProtocolError(f"unknown protocol {protocol_id!r}") from None
    if round_cap < 1:
        raise ValueError("round_cap must be positive")
    merged = {**{k: v for k, v in desc.params.items() if v is not None}, **params,
              "round_cap": round_cap}
    desc.check(instance, merged)
    rounds: list[RoundState] | None = [] if trace else None
    merged["_trace"] = rounds
    va, vb = party_views(instance, shared_seed)
    ga, gb = desc.parties(va, vb, merged)
    value_a, value_b, transcript = execute(ga, gb)

    info = {}
    loops = len(transcript.labelled("K_"))
    if loops:
        info["loop_rounds"] = loops
    if rounds is not None:
        info["_trace"] = rounds
    if value_a is CAPPED or value_b is CAPPED:
        return Outcome(protocol_id, None, None, transcript, "round_cap_exceeded",
                       False, count_control_bits, info)
    expected = oracle_value(instance, desc.function)
    match = value_a == expected and value_b in (expected, None)
    return Outcome(protocol_id, value_a, value_b, transcript, "ok", match,
                   count_control_bits, info)


# ---------- named entry points

def idempotent_exchange(instance: Instance, op: str = "max") -> Outcome:
    return run_protocol(f"idempotent-{op}", instance)


def trivial_sum(instance: Instance) -> Outcome:
    return run_protocol("trivial-sum", instance)


def las_vegas_sum(instance: Instance, k: int, shared_seed: int = 0, *,
                  round_cap: int = DEFAULT_ROUND_CAP, dedup: bool = False,
                  trace: bool = False) -> Outcome:
    return run_protocol("lv-sum", instance, shared_seed, k=k, round_cap=round_cap,
                        dedup=dedup, trace=trace)


def disjointness_via_sum(instance: Instance, sum_protocol: str = "trivial-sum",
                         shared_seed: int = 0, **params) -> Outcome:
    return run_protocol("disj-via-sum", instance, shared_seed, sub=sum_protocol, **params)


def sum_via_intersection(instance: Instance,
                         intersection_protocol: str = "naive-intersection",
                         shared_seed: int = 0) -> Outcome:
    return run_protocol("sum-via-intersection", instance, shared_seed,
                        sub=intersection_protocol)


def naive_intersection(instance: Instance) -> Outcome:
    return run_protocol("naive-intersection", instance)


def reconcile_then_compute(instance: Instance, phi: str = "sum") -> Outcome:
    return run_protocol(f"reconcile-{phi}", instance)
