"""
Adversarial strategies and what they buy
========================================

Each adversary replaces one hook of the honest behavior while the other
party stays fully honest, checks included.  The simulations quantify each
attack's success probability and compare it with the exact prediction.
"""

from qotsim.adversary import Strategy
from qotsim.harness import ExperimentConfig, exact_failure_oracle, run_experiment
from qotsim.params import validate_params

###############################################################################
# Greedy Bob plays by the rules but packs an extra all-matching subset
# whenever the surviving matches allow it, decoding m+1 bits instead of m.
# At (2,1,6) the exact chance is 15/64 -- bounded, but far from negligible
# at desk-scale N.

stats = run_experiment(ExperimentConfig(
    n=2, m=1, N=6, trials=20_000, seed=7, strategy=Strategy("greedy"),
))
print(f"greedy extra-bit rate:     {stats.event_rate:.4f}"
      f"   exact: {stats.oracle_exact} = {stats.oracle_rate:.4f}")

###############################################################################
# Dishonest removal (low case): Bob is told to discard matching slots but
# discards mismatches instead, keeping every match for himself.  Alice's
# stated check -- basis equal implies bit equal -- is vacuous on mismatched
# slots, so the literal verifier never notices, and the attack succeeds far
# more often than greedy packing alone.

p4 = validate_params(4, 1, 40)
stats = run_experiment(ExperimentConfig(
    n=4, m=1, N=40, trials=4_000, seed=8, strategy=Strategy("dishonest-removal"),
))
honest_greedy = float(exact_failure_oracle(p4, "privacy"))
print(f"\ndishonest removal rate:    {stats.event_rate:.4f}"
      f"   exact: {stats.oracle_rate:.4f}")
print(f"compliant greedy at (4,1,40): {honest_greedy:.4f}")

# A strict verifier that also demands removed slots match shuts this down.
stats = run_experiment(ExperimentConfig(
    n=4, m=1, N=40, trials=2_000, seed=9,
    strategy=Strategy("dishonest-removal", strict_alice=True),
))
print(f"against the strict verifier: {stats.event_rate:.4f} "
      f"(every run caught: {stats.aborts})")

###############################################################################
# Postponing measurement: Bob commits without measuring, hoping to measure
# after Alice reveals her bases.  Each challenged pair catches him with
# probability 1/4, so surviving all N challenges happens with rate (3/4)^N.

for n, m, N, trials in ((3, 1, 6, 20_000), (4, 1, 40, 20_000)):
    stats = run_experiment(ExperimentConfig(
        n=n, m=m, N=N, trials=trials, seed=10, strategy=Strategy("postpone"),
    ))
    print(f"\npostpone survival at N={N}: {stats.event_rate:.5f}"
          f"   (3/4)^N = {stats.oracle_rate:.2e}")

###############################################################################
# Weak commitments: if a forged unveil slips through with probability p, Bob
# must still forge one whole subset's worth -- (N-x)/n unveils -- so his
# success rate is p^((N-x)/n), strictly below the privacy budget eps^N.

stats = run_experiment(ExperimentConfig(
    n=4, m=1, N=40, trials=200_000, seed=11,
    strategy=Strategy("commit-cheat", p=0.5),
))
print(f"\ncommit-cheat rate (p=0.5):  {stats.event_rate:.6f}"
      f"   0.5^8 = {stats.oracle_rate:.6f}")

###############################################################################
# Curious Alice guesses Bob's choice from the announced subsets.  Uniform
# placement pins her at chance level on completed runs.

stats = run_experiment(ExperimentConfig(
    n=3, m=1, N=6, trials=20_000, seed=12, strategy=Strategy("curious-alice"),
))
print(f"\ncurious-Alice guess rate:   {stats.event_rate:.4f}"
      f"   chance level: {stats.oracle_rate:.4f}")
