"""
Monte Carlo experiments checked against exact oracles
=====================================================

Every simulated failure rate in this package has an exact counterpart: the
protocol's success depends only on how many of the N survivor bases match,
which is Binomial(N, 1/2), so event probabilities are finite rational sums.
The harness runs seeded trials, compares the empirical rate to the oracle at
3 sigma, and checks the oracle itself against the analytic bounds.
"""

import math
from fractions import Fraction

from qotsim.harness import (
    ExperimentConfig,
    brute_force_failure_probability,
    check_bounds,
    exact_failure_oracle,
    run_experiment,
)
from qotsim.params import correctness_epsilon, min_N, smallest_valid_N, validate_params

###############################################################################
# The exact abort probability for (3,1,6): honest Bob needs at least 2 of 6
# survivor bases to match, so the failure tail is P[M <= 1] = 7/64.

params = validate_params(3, 1, 6)
oracle = exact_failure_oracle(params, "correctness")
print("exact abort probability:", oracle, "=", float(oracle))

# An independent route to the same number: enumerate all 2^6 coin outcomes.
print("2^N enumeration:        ", brute_force_failure_probability(params))

###############################################################################
# 20k seeded trials land within the 3-sigma band around the oracle, and every
# completed run decodes the chosen bits exactly.

stats = run_experiment(ExperimentConfig(n=3, m=1, N=6, trials=20_000, seed=42))
print(f"\nempirical rate: {stats.event_rate:.5f}"
      f"   99% Wilson interval: [{stats.wilson_low:.5f}, {stats.wilson_high:.5f}]")
print("wrong decodes among completed runs:", stats.wrong_decodes)
for v in check_bounds(stats, params):
    print(f"  [{'PASS' if v.passed else 'FAIL'}] {v.criterion}")

###############################################################################
# Bound dominance: past the crossover N, the oracle probability sits below
# both the raw concentration bound and its eps^N simplification.

delta, eps = correctness_epsilon(3, 1)
start = smallest_valid_N(3, 1, min_N(delta))
print(f"\n(3,1) delta={delta}  crossover N={min_N(delta)}")
print(f"{'N':>4} {'oracle':>12} {'2exp(-2Nd^2)':>14} {'eps^N':>12}")
N = start
for _ in range(5):
    p = validate_params(3, 1, N)
    q = float(exact_failure_oracle(p, "correctness"))
    raw = 2 * math.exp(-2 * N * float(delta) ** 2)
    print(f"{N:>4} {q:>12.3e} {raw:>14.3e} {eps**N:>12.3e}")
    N = smallest_valid_N(3, 1, N + 1)

###############################################################################
# Larger instances: (4,1,40) has removal (x=8) and an abort tail P[M <= 15].

big = validate_params(4, 1, 40)
tail = exact_failure_oracle(big, "correctness")
print("\n(4,1,40) abort probability:", float(tail))
assert tail == sum(Fraction(math.comb(40, k), 2**40) for k in range(16))
stats = run_experiment(ExperimentConfig(n=4, m=1, N=40, trials=20_000, seed=43))
print(f"empirical over 20k trials: {stats.event_rate:.5f}")
