"""
Idempotent functions need only 2n bits
======================================

For max, min, bitwise or and bitwise and, duplicates in the union do not
matter. Each party folds its own set and the two partial results are
swapped, so the cost is 2n bits whatever the set sizes.
"""

from reconciled import idempotent_exchange, make_instance, random_instance

inst = make_instance(2, [1, 3], [2])
out = idempotent_exchange(inst, "max")
print("A holds", inst.set_a, " B holds", inst.set_b)
print("max at A:", out.value_at_a, " max at B:", out.value_at_b)
for msg in out.transcript.messages:
    print(f"  {msg.direction}  {msg.bitstring}  ({msg.length} bits)")

# The bill does not grow with the sets.
for m in (1, 10, 100, 1000):
    inst = random_instance(16, m, m, m // 2, seed=m)
    out = idempotent_exchange(inst, "max")
    print(f"m={m:5d}: {out.payload_bits} bits, correct={out.oracle_match}")
