"""The equational pipeline at length 3, end to end.

Every subset of the ten length-3 formulas is an axiom system.  Systems that
are consistent and independent are kept, and every formula is then decided
against each of them.  Runs in well under a minute.
"""

from beaverlab.prover import decide, filter_systems, proof_census, prove, status_code, truth_space
from beaverlab.stats import cumulative_fraction, fbb
from beaverlab.terms import enumerate_formulas, generate_axiom_systems, parse_equation

corpus = enumerate_formulas(3)
print("length-3 formulas:")
for eq in corpus:
    print("   ", eq)

reports = filter_systems(generate_axiom_systems(corpus))
consistent = sum(r.consistent for r in reports)
usable = [r.system for r in reports if r.usable]
print(f"\n{len(reports)} systems, {consistent} consistent, {len(usable)} also independent")

space = truth_space(usable, corpus)
print("\ntruth space (rows are goals, columns are systems):")
for goal, row in zip(space.corpus, space.codes()):
    print(f"  {str(goal):18s} {' '.join(f'{c:>3s}' for c in row)}")

dist = proof_census(space)
print(f"\n{dist.total} cells, {dist.undecided} undecided, fBB = {fbb(dist)}")
print(f"decided at t=1: {float(cumulative_fraction(dist, 1)):.4f}")

# one proof that needs more than an axiom instance
axioms = [parse_equation("x1 = f(x1,x1)")]
goal = parse_equation("x1 = f(f(x1,x1),f(x1,x1))")
result = prove(axioms, goal, trace=True)
print(f"\n{goal} from {axioms[0]}: length {result.length}")
for line in result.trace:
    print("   ", line)

verdict = decide([parse_equation("x1 = f(x1,f(x1,x2))")], parse_equation("x1 = f(x1,f(x2,x1))"))
print(f"\nx1 = f(x1,f(x2,x1)) from x1 = f(x1,f(x1,x2)): {status_code(verdict)}")
print(verdict.model.to_json())
