"""
A small benchmark sweep
=======================

The bench harness runs several protocols over a grid of instance sizes and
reports measured bits next to the lower bound and the trivial upper bound.

The lower bound is a worst case over all inputs for deterministic protocols.
The hashing protocol is randomized and these instances are small, so it can
land below that line.
"""

from reconciled import bench

config = bench.BenchConfig(
    protocols=["trivial-sum", "lv-sum", "idempotent-max"],
    n=[4, 6, 8], m_a=[6], m_b=[6], m_0=[4], k=[4], trials=200, seed=1, timing=False)
records = bench.run_bench(config)

print(f"{'protocol':15s} {'n':>3s} {'bits':>8s} {'lower':>6s} {'trivial':>8s} {'model':>8s}")
for r in records:
    model = f"{r.lv_model_bits:8.1f}" if r.lv_model_bits is not None else f"{'':8s}"
    print(f"{r.protocol:15s} {r.n:3d} {r.bits_mean:8.1f} {r.lower_bound_sum:6d} "
          f"{r.trivial_upper_sum:8d} {model}")
