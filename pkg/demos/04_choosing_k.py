"""
Choosing the hash width
=======================

Narrow hashes make each round cheap but collide often, so rounds repeat.
Wide hashes almost always succeed at once but cost k bits per element of B.
The exact expected cost shows where the balance lies.
"""

from reconciled.analysis import heuristic_k, model_report, objective, optimal_k, simulate_vs_formula

n, m_b, d_a = 16, 100, 16
print(" k   expected bits")
for k in range(1, n + 1):
    print(f"{k:2d}   {float(objective(n, k, m_b, d_a)):12.1f}")
print("best k:", optimal_k(n, m_b, d_a))
print("log2(d_A / c) for c = 1/4:", heuristic_k(d_a, 0.25))

rep = model_report(8, 4, 4, 2)
print("\nmodel at n=8, k=4, m_B=4, d_A=2:", rep["model"])

# The model treats each element of A's difference independently. A quick
# simulation shows how the measured acceptance rate compares.
sim = simulate_vs_formula(8, 4, 4, 2, trials=2000, seed=0)
print("empirical:", sim["empirical"])
