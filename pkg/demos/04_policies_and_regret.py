"""Run the three policies on one planted instance and inspect the epochs."""

import numpy as np

from mnlbandit import (
    AdversarialSpec,
    Assortment,
    EpochUcbPolicy,
    PolicySpec,
    build_instance,
    run_policy_trajectory,
    run_trajectory,
)

n, k, t, eps = 16, 4, 8192, 0.2
planted = Assortment((3, 6, 9, 12))
inst = build_instance(AdversarialSpec(n, k, eps, planted))

print(f"N={n} K={k} T={t} eps={eps}, planted {planted.items}\n")
for text in ("fixed", "fixed:items=3,6,9,12", "random", "epoch-ucb"):
    spec = PolicySpec.from_string(text)
    trace, counts = run_policy_trajectory(spec, inst, t, seed=42)
    top = np.argsort(counts.n_padded)[::-1][:k] + 1
    print(f"{spec.label():24s} cum regret {trace.cumulative:10.4f}   "
          f"most offered {tuple(int(i) for i in sorted(top))}")

# the epoch mechanics: offer a set until a no-purchase closes the epoch
policy = EpochUcbPolicy(n, k, inst.revenues)
trace, counts = run_trajectory(policy, inst, t, seed=42)
print(f"\nepoch-ucb internals after T={t} steps:")
print("  completed epochs:", policy.completed_epochs)
print("  item  epochs  v_hat    v_ucb      offers(padded)")
order = np.argsort(policy.epochs_offered)[::-1]
for i in order[:6]:
    print(f"  {i + 1:4d}  {policy.epochs_offered[i]:6d}  {policy.v_hat[i]:.4f}   "
          f"{policy.v_ucb[i]:9.4f}  {counts.n_padded[i]:8d}")
true_v = inst.preferences
print("  true weights: elevated", true_v[planted.indices()][0],
      " others", true_v[0])

# planted items should be offered more than the rest once eps is visible
mask = np.zeros(n, dtype=bool)
mask[planted.indices()] = True
print(f"\nmean offers, planted vs rest: "
      f"{counts.n_padded[mask].mean():.0f} vs {counts.n_padded[~mask].mean():.0f}")
