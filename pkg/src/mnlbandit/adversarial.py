"""Hard instance family for capacitated MNL assortment bandits.

Every instance plants a hidden size-K set S: all revenues are 1, items in S
get preference weight (1+eps)/K, everything else 1/K.  The planted set is the
unique revenue maximizer, and offering any other size-K set costs

    gap(eps, delta) = delta*eps / ((2+eps) * (2 + (1-delta)*eps)) >= delta*eps/9

per step, where delta is the fraction of S missing from the offered set.  For
eps <= 1/2 the denominator is at most (2.5)^2 < 9, hence the /9 floor.

The family calibrated with eps = min{0.05*sqrt(N/T), 0.5} forces every policy
to suffer expected regret at least min{1e-3*sqrt(N*T), T/54} whenever
K <= N/4; :func:`minimax_lower_bound` evaluates that floor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Assortment, MnlInstance

__all__ = [
    "AdversarialSpec",
    "GapValue",
    "LowerBoundValue",
    "Regime",
    "ApplicabilityError",
    "build_instance",
    "epsilon_schedule",
    "overlap_delta",
    "single_stage_gap",
    "minimax_lower_bound",
    "sample_elevated_set",
]


class ApplicabilityError(ValueError):
    """The certified lower bound needs K <= N/4; raised when it doesn't hold."""


class Regime(enum.Enum):
    """Which branch of min{1e-3*sqrt(N*T), T/54} is active."""

    SQRT_NT = "sqrt_nt"
    LINEAR_T = "linear_t"


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(
            f"epsilon must lie in (0, 0.5] (the /9 gap floor needs it), got {epsilon}"
        )
    return epsilon


@dataclass(frozen=True)
class AdversarialSpec:
    """Parameters of one planted instance: (N, K, eps, elevated set)."""

    n_items: int
    capacity: int
    epsilon: float
    elevated_set: Assortment

    def __post_init__(self):
        n, k = int(self.n_items), int(self.capacity)
        if not 1 <= k <= n:
            raise ValueError(f"capacity must be in [1, n_items], got K={k}, N={n}")
        _check_epsilon(self.epsilon)
        s = self.elevated_set
        if not isinstance(s, Assortment):
            s = Assortment(s)
        if len(s) != k:
            raise ValueError(f"elevated set must have exactly K={k} items, got {len(s)}")
        if s.items and s.items[-1] > n:
            raise ValueError(f"elevated item {s.items[-1]} out of range for N={n}")
        object.__setattr__(self, "n_items", n)
        object.__setattr__(self, "capacity", k)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "elevated_set", s)

    @property
    def bound_applicable(self) -> bool:
        """True when K <= N/4, the hypothesis of the certified floor."""
        return 4 * self.capacity <= self.n_items

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "capacity": self.capacity,
            "epsilon": self.epsilon,
            "elevated_set": list(self.elevated_set.items),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AdversarialSpec":
        return cls(
            n_items=d["n_items"],
            capacity=d["capacity"],
            epsilon=d["epsilon"],
            elevated_set=Assortment(d["elevated_set"]),
        )

    def label(self) -> str:
        items = " ".join(str(i) for i in self.elevated_set.items)
        return f"elevated(N={self.n_items},K={self.capacity},eps={self.epsilon:.12g},S={items})"


@dataclass(frozen=True)
class GapValue:
    """Per-step revenue gap of an offered set at overlap deficit delta."""

    delta: float
    exact_gap: float
    lower_bound_gap: float  # delta*eps/9, always <= exact_gap


@dataclass(frozen=True)
class LowerBoundValue:
    """Worst-case expected-regret floor min{c*sqrt(N*T), T/54} with c = 1e-3."""

    value: float
    constant_c: float
    regime: Regime


def build_instance(spec: AdversarialSpec) -> MnlInstance:
    """Materialize the planted instance: unit revenues, elevated weights on S."""
    v = np.full(spec.n_items, 1.0 / spec.capacity)
    v[spec.elevated_set.indices()] = (1.0 + spec.epsilon) / spec.capacity
    return MnlInstance(
        n_items=spec.n_items,
        capacity=spec.capacity,
        revenues=np.ones(spec.n_items),
        preferences=v,
    )


def epsilon_schedule(n_items: int, horizon: int) -> float:
    """Calibrated elevation eps = min{0.05*sqrt(N/T), 0.5}.

    This is the largest elevation a horizon-T experiment cannot reliably
    detect; it always lands in (0, 0.5].
    """
    if n_items < 1 or horizon < 1:
        raise ValueError("n_items and horizon must be positive")
    return min(0.05 * math.sqrt(n_items / horizon), 0.5)


def overlap_delta(s0: Assortment, s_tilde: Assortment, capacity: int) -> float:
    """Fraction of the planted set missing: delta = 1 - |s0 & s_tilde| / K."""
    k = int(capacity)
    if len(s0) != k or len(s_tilde) != k:
        raise ValueError(
            f"both sets must have exactly K={k} items, got {len(s0)} and {len(s_tilde)}"
        )
    m = len(set(s0.items) & set(s_tilde.items))
    return 1.0 - m / k

def single_stage_gap(epsilon: float, delta: float) -> GapValue:
    """Exact per-step gap and its linear floor delta*eps/9."""
    epsilon = _check_epsilon(epsilon)
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    exact = delta * epsilon / ((2.0 + epsilon) * (2.0 + (1.0 - delta) * epsilon))
    return GapValue(delta=delta, exact_gap=exact, lower_bound_gap=delta * epsilon / 9.0)


def minimax_lower_bound(n_items: int, horizon: int, capacity: int) -> LowerBoundValue:
    """Worst-case expected regret floor over the planted family.

    Only certified for K <= N/4; anything else raises ApplicabilityError
    rather than returning an unsupported number.
    """
    n, t, k = int(n_items), int(horizon), int(capacity)
    if n < 1 or t < 1 or k < 1:
        raise ValueError("n_items, horizon and capacity must be positive")
    if 4 * k > n:
        raise ApplicabilityError(
            f"lower bound requires capacity at most a quarter of the items: K={k}, N={n}"
        )
    sqrt_branch = 1e-3 * math.sqrt(n * t)
    linear_branch = t / 54.0
    if sqrt_branch <= linear_branch:
        return LowerBoundValue(value=sqrt_branch, constant_c=1e-3, regime=Regime.SQRT_NT)
    return LowerBoundValue(value=linear_branch, constant_c=1e-3, regime=Regime.LINEAR_T)


def sample_elevated_set(n_items: int, capacity: int, rng: np.random.Generator) -> Assortment:
    """Uniformly random size-K subset of {1..N} (uniform over all C(N,K) sets)."""
    n, k = int(n_items), int(capacity)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= K <= N, got K={k}, N={n}")
    picked = rng.choice(n, size=k, replace=False)
    return Assortment(sorted(int(i) + 1 for i in picked))
