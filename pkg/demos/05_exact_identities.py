"""Exact structural identities on small graphs, in rational arithmetic.

Enumerates the one-step transition law of each dynamics on a hand-sized
state and checks, without floating-point noise: the normalized-binomial
martingale property (exact for the sequential and random-out-degree
dynamics, one-sided for the frozen-denominator one), negative quadrant
dependence of the increments, and the exact fitness-conditional expected
degree formula.
"""

from fractions import Fraction

from paflab import ModelKind, oracle, theory

F = Fraction

state = oracle.ExactState(ModelKind.pafud(2), 2, 1, (F(1), F(3, 2)), (1, 0))
dist = oracle.enumerate_step(state)
print("one-step law of the increment vector (weights 2 and 3/2, sequential):")
for dz, p in dist.outcomes:
    print(f"  dZ={dz}  prob={p}")
print("  total:", dist.prob_sum())

print("\nmartingale residuals E[M^k_(n+1)|G_n] - M^k_n (relative):")
for k in (F(1, 2), 1, 2):
    for i in (1, 2):
        rel = oracle.verify_martingale(state, i, k, relative=True, dist=dist)
        print(f"  i={i} k={k}: {rel}")

paffd = oracle.ExactState(ModelKind.paffd(2), 2, 1, (F(1), F(3, 2)), (1, 0))
print("\nfrozen-denominator variant is a supermartingale away from k=1:")
for k in (F(1, 2), 1, 2):
    rel = oracle.verify_martingale(paffd, 1, k, relative=True)
    sign = "=" if rel == 0 else ("<" if rel < 0 else ">")
    print(f"  k={k}: residual {sign} 0  ({rel})")

print("\nnegative quadrant dependence (worst joint - product):")
for st in (state, paffd):
    res = oracle.verify_nqd(st)
    print(f"  {st.model.label()}: {res.worst}")

print("\nconditional expected degree at n=3 from the level-one martingale:")
pred = theory.conditional_mean_degree([1.0, 1.5], [1, 0], 1, 3, 1)
law = oracle.enumerate_step(
    oracle.ExactState(ModelKind.pafud(1), 2, 1, (F(1), F(3, 2)), (1, 0)))
direct = sum(p * (1 + dz[0]) for dz, p in law.outcomes)
print(f"  formula: {pred:.6f}   exact enumeration: {float(direct):.6f}")
