"""Multinomial-logit choice environment with a capacity constraint.

Items carry ids 1..N.  An assortment is a set of at most K item ids; the
customer either buys one offered item or walks away.  Walking away is the
``NO_PURCHASE`` sentinel, deliberately not an integer so it can never be
confused with an item id.

Choice law for an offered set s with preference weights v (outside option
weight fixed to 1):

    P(item j) = v_j / (1 + sum_{j' in s} v_j'),   P(no purchase) = 1 / (1 + sum v)

Expected revenue of s is sum_{j in s} r_j * P(j).

Everything here is immutable and safe to share across threads; only the
caller-owned random stream passed to :func:`sample_choice` is mutated.
"""

from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NO_PURCHASE",
    "MnlInstance",
    "Assortment",
    "ChoiceDistribution",
    "AssortmentError",
    "InvalidAssortmentError",
    "CapacityError",
    "EnumerationLimitError",
    "choice_distribution",
    "expected_revenue",
    "sample_choice",
    "best_assortment",
    "argmax_assortment",
    "instantaneous_regret",
    "ENUMERATION_LIMIT",
]

# Exhaustive search over subsets is only allowed up to this many items.
ENUMERATION_LIMIT = 25


class _NoPurchase:
    """Singleton sentinel for the walk-away outcome."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_PURCHASE"

    def __reduce__(self):  # keep it a singleton across pickling
        return (_NoPurchase, ())


NO_PURCHASE = _NoPurchase()


class AssortmentError(ValueError):
    """Base class for malformed assortments."""


class InvalidAssortmentError(AssortmentError):
    """Item ids out of range, duplicated, or otherwise malformed."""


class CapacityError(AssortmentError):
    """Assortment larger than the instance capacity K."""


class EnumerationLimitError(ValueError):
    """Exhaustive subset search requested above ENUMERATION_LIMIT items."""


@dataclass(frozen=True)
class Assortment:
    """A strictly increasing tuple of distinct item ids (1-based)."""

    items: tuple[int, ...]

    def __init__(self, items=()):
        items = tuple(int(i) for i in items)
        if any(i < 1 for i in items):
            raise InvalidAssortmentError(f"item ids must be >= 1, got {items}")
        if len(set(items)) != len(items):
            raise InvalidAssortmentError(f"duplicate item ids in {items}")
        object.__setattr__(self, "items", tuple(sorted(items)))

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, item):
        return item in self.items

    def indices(self) -> np.ndarray:
        """0-based numpy index array into instance-wide vectors."""
        return np.asarray(self.items, dtype=np.intp) - 1

    def __repr__(self):
        return f"Assortment({list(self.items)})"


@dataclass(frozen=True, eq=False)
class MnlInstance:
    """Problem instance: N items, capacity K, revenues r, preference weights v.

    Revenues lie in (0, 1]; preference weights are strictly positive.  The
    outside option always has weight 1.
    """

    n_items: int
    capacity: int
    revenues: np.ndarray
    preferences: np.ndarray

    def __post_init__(self):
        n, k = int(self.n_items), int(self.capacity)
        if n < 1:
            raise ValueError(f"need at least one item, got n_items={n}")
        if not 1 <= k <= n:
            raise ValueError(f"capacity must be in [1, n_items], got {k} with N={n}")
        r = np.asarray(self.revenues, dtype=np.float64).copy()
        v = np.asarray(self.preferences, dtype=np.float64).copy()
        if r.shape != (n,) or v.shape != (n,):
            raise ValueError(
                f"revenues/preferences must have shape ({n},), got {r.shape} and {v.shape}"
            )
        if not np.all((r > 0.0) & (r <= 1.0)):
            raise ValueError("revenues must lie in (0, 1]")
        if not np.all(v > 0.0):
            raise ValueError("preference weights must be strictly positive")
        r.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "n_items", n)
        object.__setattr__(self, "capacity", k)
        object.__setattr__(self, "revenues", r)
        object.__setattr__(self, "preferences", v)

    def validate_assortment(self, s: Assortment) -> None:
        """Raise if ``s`` is not offerable on this instance."""
        if not isinstance(s, Assortment):
            raise InvalidAssortmentError(f"expected Assortment, got {type(s).__name__}")
        if s.items and s.items[-1] > self.n_items:
            raise InvalidAssortmentError(
                f"item id {s.items[-1]} out of range for N={self.n_items}"
            )
        if len(s) > self.capacity:
            raise CapacityError(f"assortment size {len(s)} exceeds capacity {self.capacity}")


@dataclass(frozen=True, eq=False)
class ChoiceDistribution:
    """Outcome law of one offered assortment.

    ``outcomes[0]`` is always NO_PURCHASE, followed by the offered item ids in
    increasing order.  Probabilities are strictly positive and sum to one.
    """

    outcomes: tuple
    probabilities: np.ndarray
    _cumulative: list = field(repr=False, default=None)

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.ndim != 1 or len(p) != len(self.outcomes):
            raise ValueError("probabilities must align with outcomes")
        if not np.all(p > 0.0):
            raise ValueError("all outcome probabilities must be strictly positive")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "_cumulative", list(np.cumsum(p)))

    def prob_of(self, outcome) -> float:
        """Probability of one outcome (an item id or NO_PURCHASE)."""
        for o, p in zip(self.outcomes, self.probabilities):
            if o is outcome or o == outcome:
                return float(p)
        raise KeyError(f"outcome {outcome!r} not in support")

    def support(self) -> tuple:
        return self.outcomes


def choice_distribution(instance: MnlInstance, s: Assortment) -> ChoiceDistribution:
    """Exact MNL outcome law for assortment ``s`` on ``instance``."""
    instance.validate_assortment(s)
    if len(s) == 0:
        return ChoiceDistribution((NO_PURCHASE,), np.array([1.0]))
    w = instance.preferences[s.indices()]
    denom = 1.0 + float(np.sum(w))
    probs = np.empty(len(s) + 1)
    probs[0] = 1.0 / denom
    probs[1:] = w / denom
    return ChoiceDistribution((NO_PURCHASE, *s.items), probs)


def expected_revenue(instance: MnlInstance, s: Assortment) -> float:
    """Expected one-step revenue sum_j r_j * P(j | s).

    Computed literally as the dot product of revenues with the choice
    probabilities so it matches the distribution arithmetic bit for bit.
    """
    if len(s) == 0:
        instance.validate_assortment(s)
        return 0.0
    dist = choice_distribution(instance, s)
    return float(np.dot(instance.revenues[s.indices()], dist.probabilities[1:]))


def sample_choice(dist: ChoiceDistribution, rng: np.random.Generator):
    """Draw one outcome from ``dist`` using the caller's random stream.

    Consumes exactly one uniform variate, so trajectories are reproducible
    stream-for-stream.
    """
    u = rng.random()
    idx = bisect_right(dist._cumulative, u)
    if idx >= len(dist.outcomes):  # u landed on the 1.0 boundary
        idx = len(dist.outcomes) - 1
    return dist.outcomes[idx]


def argmax_assortment(
    weights: np.ndarray, revenues: np.ndarray, capacity: int
) -> tuple[Assortment, float]:
    """Best assortment of size <= capacity for arbitrary weights/revenues.

    Exhaustive search over all subsets, so it refuses to run above
    ENUMERATION_LIMIT items.  Ties are broken by the lexicographically
    smallest item tuple (the empty set is scanned first).
    """
    n = len(weights)
    if n > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"exhaustive search over {n} items exceeds the limit of {ENUMERATION_LIMIT}"
        )
    weights = np.asarray(weights, dtype=np.float64)
    revenues = np.asarray(revenues, dtype=np.float64)
    best_items: tuple[int, ...] = ()
    best_value = 0.0
    ids = range(1, n + 1)
    for size in range(1, int(capacity) + 1):
        for combo in itertools.combinations(ids, size):
            idx = np.asarray(combo, dtype=np.intp) - 1
            w = weights[idx]
            denom = 1.0 + float(np.sum(w))
            value = float(np.dot(revenues[idx], w / denom))
            # tuple ordering makes () < (j,) and (1,2) < (1,2,5), so ties
            # resolve to the lexicographically smallest item list
            if value > best_value or (value == best_value and combo < best_items):
                best_items, best_value = combo, value
    return Assortment(best_items), best_value


def best_assortment(instance: MnlInstance) -> tuple[Assortment, float]:
    """Revenue-optimal assortment of size <= K, by exhaustive enumeration."""
    return argmax_assortment(instance.preferences, instance.revenues, instance.capacity)


def instantaneous_regret(instance: MnlInstance, s: Assortment) -> float:
    """Expected-revenue shortfall of ``s`` against the optimal assortment.

    Nonnegative by construction: the maximization scans ``s`` itself with the
    same arithmetic.
    """
    _, best_value = best_assortment(instance)
    return best_value - expected_revenue(instance, s)
