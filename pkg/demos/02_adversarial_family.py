"""The planted hard family: revenue gaps by overlap, and the regret floor.

Every item pays revenue 1; a hidden size-K set gets preference weight
(1+eps)/K while the rest get 1/K.  The only way to earn more is to find the
planted set, and the price of offering a wrong set has a closed form in the
overlap.
"""

import numpy as np

from mnlbandit import (
    AdversarialSpec,
    Assortment,
    best_assortment,
    build_instance,
    epsilon_schedule,
    expected_revenue,
    minimax_lower_bound,
    overlap_delta,
    sample_elevated_set,
    single_stage_gap,
)

n, k, eps = 12, 4, 0.4
planted = Assortment((2, 5, 7, 11))
inst = build_instance(AdversarialSpec(n, k, eps, planted))

star, value = best_assortment(inst)
print("planted", planted.items, "-> recovered optimum", star.items, f"value {value:.6f}")

# gap as a function of overlap with the planted set
print("\nshared  delta   measured gap   closed form    delta*eps/9")
others = [i for i in range(1, n + 1) if i not in planted]
r_star = expected_revenue(inst, planted)
for shared in range(k + 1):
    alt = Assortment(planted.items[:shared] + tuple(others[: k - shared]))
    delta = overlap_delta(planted, alt, k)
    gap = single_stage_gap(eps, delta)
    measured = r_star - expected_revenue(inst, alt)
    print(f"  {shared}     {delta:.2f}   {measured:.8f}   {gap.exact_gap:.8f}   {gap.lower_bound_gap:.8f}")

# the separation the experiments use: shrinks like sqrt(N/T), capped at 1/2
print("\nscheduled eps:")
for t in (256, 1024, 16384, 10**6):
    print(f"  T={t:<8d} eps={epsilon_schedule(16, t):.6f}")

# the certified floor and its two regimes (tiny horizons are bounded by
# T/54 instead of the sqrt term)
print("\nminimax floor min{1e-3*sqrt(NT), T/54}:")
for n_, t_ in ((16, 1024), (16, 16384), (400, 1)):
    lb = minimax_lower_bound(n_, t_, 4 if n_ == 16 else 100)
    print(f"  N={n_:<4d} T={t_:<7d} -> {lb.value:.6g}  [{lb.regime.value}]")

# uniform draws of the hidden set, as the Bayes experiments use them
rng = np.random.default_rng(3)
print("\nthree uniform draws of the planted set:",
      [sample_elevated_set(n, k, rng).items for _ in range(3)])
