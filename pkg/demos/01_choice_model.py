"""Walk through the choice environment: laws, sampling, enumeration."""

import numpy as np

from mnlbandit import (
    NO_PURCHASE,
    Assortment,
    MnlInstance,
    best_assortment,
    choice_distribution,
    expected_revenue,
    instantaneous_regret,
    sample_choice,
)

rng = np.random.default_rng(7)

# a small instance: 6 items, at most 3 on the shelf
revenues = np.array([0.9, 0.4, 0.8, 0.5, 1.0, 0.3])
weights = np.array([0.6, 1.4, 0.5, 0.9, 0.2, 1.1])
inst = MnlInstance(6, 3, revenues, weights)

offer = Assortment((1, 2, 5))
dist = choice_distribution(inst, offer)
print("offered", offer.items)
for outcome, p in zip(dist.outcomes, dist.probabilities):
    label = "walk away" if outcome is NO_PURCHASE else f"item {outcome}"
    print(f"  {label:10s} {p:.4f}")
print("probabilities sum to", dist.probabilities.sum())
print("expected revenue", expected_revenue(inst, offer))

# sampling follows the law: compare Monte Carlo frequencies
draws = 200_000
hits = {o: 0 for o in dist.outcomes}
for _ in range(draws):
    hits[sample_choice(dist, rng)] += 1
print("\nempirical vs exact over", draws, "draws")
for outcome, p in zip(dist.outcomes, dist.probabilities):
    print(f"  {str(outcome):12s} {hits[outcome] / draws:.4f}  vs  {p:.4f}")

# the revenue-optimal assortment, by exhaustive enumeration
star, value = best_assortment(inst)
print("\nbest assortment", star.items, "with expected revenue", round(value, 6))

# every other offer pays a nonnegative instantaneous regret
for items in [(1, 2, 5), (2, 4, 6), (5,), ()]:
    s = Assortment(items)
    print(f"  regret of {str(items):12s} {instantaneous_regret(inst, s):.6f}")

# an empty shelf sells nothing
empty = choice_distribution(inst, Assortment(()))
print("\nempty offer: P(no purchase) =", empty.probabilities[0])
