"""
Parameter admissibility and the security-bound landscape
========================================================

For a transfer of m out of n bits over N survivor slots, the protocol fixes
a target basis-match rate (2m+1)/(2n) and removes x slots to hit it.  Both
the removal count and the subset partition must come out as integers, so
only certain N are admissible.  Correctness and privacy each come with a
two-sided concentration bound 2*exp(-2N*delta^2) and a simplified eps^N
form that takes over once N exceeds ln(2)/delta^2.
"""

from qotsim import build_bound_report, smallest_valid_N, validate_params
from qotsim.params import InvalidN

###############################################################################
# Admissibility: (2, 1) needs N divisible by 3 with an even survivor count.

for N in range(3, 13):
    try:
        p = validate_params(2, 1, N)
        print(f"N={N:2d}: admissible, x={p.x}, subset size {p.subset_size}")
    except InvalidN:
        print(f"N={N:2d}: rejected")

###############################################################################
# The bound report gathers every derived quantity for one parameter choice.
# For (2, 1) both deviations are 1/6, so the raw bound is 2*exp(-N/18) and
# at N=18 it equals exactly 2/e.

report = build_bound_report(2, 1, N=18, p=0.5)
print("\ncase:                ", report.case)
print("target match rate:   ", report.target_rate)
print("correctness bound:   ", report.hoeffding_correctness_form)
print("privacy bound:       ", report.hoeffding_privacy_form)
print(f"privacy bound @N=18:  {report.hoeffding_privacy:.12f}  (2/e)")
print("bound crossover N:   ", report.min_N_privacy)
print(f"commitment attack:    {report.commitment_bound:.6f} = p^(subset size)")

###############################################################################
# In the low case (2m+1 < n) the privacy deviation as stated is negative;
# the report flags this and uses the absolute value throughout.

low = build_bound_report(4, 1)
print("\n(4,1) case:", low.case, " sign anomaly:", low.privacy_sign_anomaly,
      " |delta_p| =", low.delta_privacy)

###############################################################################
# Admissible N become sparse as n grows; the search helper finds the next one.

for n, m in ((2, 1), (4, 1), (5, 2), (7, 3)):
    N = smallest_valid_N(n, m, 30)
    print(f"smallest admissible N >= 30 for ({n},{m}): {N}")
