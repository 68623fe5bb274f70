"""Walk through the halting census of a small Turing machine space.

    python demos/halting_census.py            # (2,2), under a second
    python demos/halting_census.py --states 3 # (3,2), about a minute on one core
"""

import argparse

from beaverlab.census import HaltingCensus, BusyBeaverRecord, format_sig, halting_probability, output_censuses, scan_space
from beaverlab.machines import decode_machine, run
from beaverlab.stats import DecisionDistribution, cumulative_fraction, optime

parser = argparse.ArgumentParser()
parser.add_argument("--states", type=int, default=2, choices=(1, 2, 3))
args = parser.parse_args()

scan = scan_space(args.states, outputs=True)
census = HaltingCensus.from_scan(scan)
bb = BusyBeaverRecord.from_scan(scan)

print(f"({args.states},2) space: {census.total} machines, budget {census.budget} steps")
print(f"{census.halting} halt, {census.nonhalting} run past the budget\n")
print("  t  machines  probability")
for t, k in census.counts.items():
    print(f"{t:3d}  {k:8d}  {format_sig(halting_probability(census, t), 3)}")

# the longest runner, replayed on its own
champion = bb.step_champions[0]
r = run(decode_machine(champion, args.states), census.budget)
print(f"\nS_observed = {bb.S_observed} ({len(bb.step_champions)} machines), Sigma_observed = {bb.Sigma_observed}")
print(f"machine {champion} halts after {r.steps} steps with {r.ones} ones on the tape, output {r.output}")

# halting times read as a decision distribution
dist = DecisionDistribution.from_census(census)
share = cumulative_fraction(dist, 1, decided_only=True)
print(f"\n{float(share):.1%} of halting machines halt on their first step")
print(f"90% of halting machines have halted by t = {optime(dist, 0.9, decided_only=True)}")

for rule, oc in output_censuses(scan).items():
    print(f"{rule}: {oc.distinct} distinct outputs, longest {oc.longest}, single-symbol {oc.single_symbol()}")
