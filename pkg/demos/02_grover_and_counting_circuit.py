"""Grover rotations and the counting circuit, checked against closed forms.

With S of N items marked, each Grover iteration rotates the state by 2*pi*theta
where sin^2(pi*theta) = S/N. Phase estimation on that rotation is quantum
counting. Here we run the full statevector simulator on a small register and
compare it with the analytic readout law the renderer samples from.

    python demos/02_grover_and_counting_circuit.py
"""
import numpy as np

from qraytrace.counting import (
    BooleanOracle,
    CountingConfig,
    counting_circuit_pmf,
    counting_distribution,
    fold_pmf,
    grover_iteration,
    simulate_counting_circuit,
    theta_from_count,
    uniform_state,
)

n, S = 4, 3
N = 1 << n
oracle = BooleanOracle.from_indices(N, [1, 7, 12])
theta = theta_from_count(S, N)

print(f"N = {N}, S = {S}, theta = {theta:.5f}")
print(" k   P(marked)   sin^2((2k+1) pi theta)")
state = uniform_state(n)
for k in range(1, 7):
    state = grover_iteration(state, oracle)
    p = np.sum(np.abs(state[oracle.marks]) ** 2)
    print(f"{k:2d}   {p:.6f}    {np.sin((2 * k + 1) * np.pi * theta) ** 2:.6f}")

t = 5
T = 1 << t
circuit = fold_pmf(counting_circuit_pmf(oracle, t))
closed = counting_distribution(theta, T)
print(f"\ncounting with t = {t}: max |circuit - closed form| = {np.abs(circuit - closed).max():.2e}")

rng = np.random.default_rng(0)
cfg = CountingConfig(n, t, B=1)
draws = [simulate_counting_circuit(oracle, cfg, rng).index for _ in range(2000)]
hist = np.bincount(draws, minlength=T // 2 + 1) / len(draws)
print("index  circuit-sampled  closed-form")
for k in np.flatnonzero(closed > 0.01):
    print(f"{k:5d}  {hist[k]:15.4f}  {closed[k]:11.4f}")
