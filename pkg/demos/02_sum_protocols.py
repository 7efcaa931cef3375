"""
Summing the union: trivial protocol versus hashing
==================================================

Sum is not idempotent, so elements held by both parties must be counted
once. The trivial protocol ships A's whole characteristic vector. The Las
Vegas protocol instead lets B send short hashes of its elements until A
can isolate exactly the elements only it holds.
"""

from reconciled import las_vegas_sum, oracle_value, random_instance, trivial_sum
from reconciled.analysis import AnalysisParams, expected_bits_unbounded

n, m_a, m_b, m_0 = 10, 12, 12, 10
inst = random_instance(n, m_a, m_b, m_0, seed=3)
print("true sum:", oracle_value(inst, "sum"))

triv = trivial_sum(inst)
print(f"trivial-sum: value {triv.value}, {triv.payload_bits} bits")

for k in (6, 8, 10):
    out = las_vegas_sum(inst, k=k, shared_seed=1)
    print(f"lv-sum k={k:2d}: value {out.value}, {out.payload_bits} bits, "
          f"{out.info['loop_rounds']} loop round(s)")

# Averaged over shared seeds, the cost tracks the model's expectation.
k, trials = 8, 2000
mean = sum(las_vegas_sum(inst, k=k, shared_seed=s).payload_bits
           for s in range(trials)) / trials
model = float(expected_bits_unbounded(AnalysisParams(n, k, m_b, inst.d_a)))
print(f"k={k}: measured mean {mean:.1f} bits, model {model:.1f} bits")
