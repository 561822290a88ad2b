"""KL/TV toolbox and numeric certificates for the regret lower-bound chain.

All divergences use natural logarithms (nats).  The central objects:

* :func:`kl_exact`, :func:`kl_quadratic_bound`, :func:`tv_distance` -- exact
  divergence values and the chi-square-style upper bound
  KL(P||Q) <= sum_j (p_j - q_j)^2 / q_j for strictly positive categoricals.

* :func:`per_step_kl` -- the one-step information leak between two planted
  instances whose elevated sets differ in a single item i, conditioned on an
  offered set.  Exact value, the uniform ceiling 63*eps^2/K, and the five
  coordinate bounds that prove it.

* :func:`lower_bound_chain_audit` -- re-derives the full minimax chain
  (capacity fraction, subset-count identity, per-step ceiling, KL budget,
  Jensen, discrepancy ceiling, final floor eps*T/27 >= min{1e-3*sqrt(NT),
  T/54}) as numeric checks with signed margins.

* :func:`trajectory_count_audit` -- exact integer counting identities of a
  simulated trajectory (padded offer mass TK etc.).

A check passes when its signed margin is >= -1e-12; an AuditReport passes
when every row does.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .adversarial import ApplicabilityError, epsilon_schedule
from .core import Assortment

__all__ = [
    "MARGIN_TOLERANCE",
    "CategoricalPair",
    "StepKlContext",
    "PerStepKl",
    "CheckRecord",
    "AuditReport",
    "kl_exact",
    "kl_quadratic_bound",
    "tv_distance",
    "per_step_kl",
    "pinsker_count_gap",
    "lower_bound_chain_audit",
    "trajectory_count_audit",
    "random_categorical_pairs",
]

MARGIN_TOLERANCE = -1e-12


@dataclass(frozen=True, eq=False)
class CategoricalPair:
    """Two strictly positive categorical laws on a common finite support."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        if p.ndim != 1 or p.shape != q.shape:
            raise ValueError(f"p and q must be 1-d with equal length, got {p.shape}, {q.shape}")
        if len(p) < 1:
            raise ValueError("need at least one outcome")
        if not (np.all(p > 0.0) and np.all(q > 0.0)):
            raise ValueError("zero or negative probabilities are not allowed")
        for name, arr in (("p", p), ("q", q)):
            if abs(float(arr.sum()) - 1.0) > 1e-12:
                raise ValueError(f"{name} sums to {arr.sum()!r}, not 1 within 1e-12")
        p, q = p.copy(), q.copy()
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def dim(self) -> int:
        return len(self.p)


def kl_exact(pair: CategoricalPair) -> float:
    """KL(p || q) = sum_j p_j * log(p_j / q_j), in nats."""
    return float(np.dot(pair.p, np.log(pair.p / pair.q)))


def kl_quadratic_bound(pair: CategoricalPair) -> float:
    """Quadratic majorant sum_j (p_j - q_j)^2 / q_j of KL(p || q)."""
    d = pair.p - pair.q
    return float(np.sum(d * d / pair.q))


def tv_distance(pair: CategoricalPair) -> float:
    """Total variation distance 0.5 * sum_j |p_j - q_j|."""
    return 0.5 * float(np.sum(np.abs(pair.p - pair.q)))


def pinsker_count_gap(horizon: int, kl: float) -> float:
    """Largest possible shift T * sqrt(KL/2) of an expected count in [0, T].

    Combines Pinsker's inequality TV <= sqrt(KL/2) with the fact that a
    count statistic is bounded by the horizon.
    """
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be positive")
    kl = float(kl)
    if kl < 0.0:
        raise ValueError(f"KL divergence cannot be negative, got {kl}")
    return horizon * math.sqrt(kl / 2.0)


# ---------------------------------------------------------------------------
# check records / audit reports


@dataclass(frozen=True)
class CheckRecord:
    """One audited inequality: signed margin >= -1e-12 means it holds."""

    name: str
    exact: float
    bound: float
    margin: float

    @property
    def passed(self) -> bool:
        return self.margin >= MARGIN_TOLERANCE

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<42s} {self.exact:>16.9g} {self.bound:>16.9g} {self.margin:>13.4g}  {status}"


def _le(name: str, exact: float, bound: float) -> CheckRecord:
    """exact <= bound."""
    return CheckRecord(name, float(exact), float(bound), float(bound) - float(exact))


def _ge(name: str, exact: float, bound: float) -> CheckRecord:
    """exact >= bound."""
    return CheckRecord(name, float(exact), float(bound), float(exact) - float(bound))


def _eq(name: str, exact: float, bound: float) -> CheckRecord:
    """exact == bound (margin is minus the absolute difference)."""
    return CheckRecord(name, float(exact), float(bound), -abs(float(exact) - float(bound)) + 0.0)


@dataclass(frozen=True)
class AuditReport:
    """A named bundle of checks with headline values in ``extras``."""

    title: str
    checks: tuple[CheckRecord, ...]
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "checks", tuple(self.checks))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def to_table(self) -> str:
        head = f"{'check':<42s} {'exact':>16s} {'bound':>16s} {'margin':>13s}  status"
        lines = [self.title, head, "-" * len(head)]
        lines += [c.row() for c in self.checks]
        lines.append(f"=> {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)")
        return "\n".join(lines)

    def to_json(self) -> str:
        payload = {
            "title": self.title,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "exact": c.exact,
                    "bound": c.bound,
                    "margin": c.margin,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
            "extras": self.extras,
        }
        return json.dumps(payload, indent=2)


# ---------------------------------------------------------------------------
# one-step conditional laws of neighboring planted instances


@dataclass(frozen=True)
class StepKlContext:
    """Conditioning data for the one-step KL between neighboring instances.

    Two planted parameterizations share a base elevated set S' of size K-1 and
    differ in whether ``item`` is also elevated.  Given the offered set, the
    purchase outcome laws differ only through ``item``'s weight; this context
    captures the offered set (K' items, J of them in S') needed to write both
    laws down exactly.
    """

    epsilon: float
    capacity: int
    offered: Assortment
    elevated_base: Assortment
    item: int

    def __post_init__(self):
        eps = float(self.epsilon)
        if not 0.0 < eps <= 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5], got {eps}")
        k = int(self.capacity)
        if k < 1:
            raise ValueError("capacity must be positive")
        if len(self.elevated_base) != k - 1:
            raise ValueError(
                f"elevated base must have K-1={k - 1} items, got {len(self.elevated_base)}"
            )
        item = int(self.item)
        if item < 1:
            raise ValueError("item id must be >= 1")
        if item in self.elevated_base:
            raise ValueError(f"item {item} already in the elevated base")
        if len(self.offered) > k:
            raise ValueError(f"offered set of size {len(self.offered)} exceeds capacity {k}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "capacity", k)
        object.__setattr__(self, "item", item)

    @property
    def k_prime(self) -> int:
        return len(self.offered)

    @property
    def j_overlap(self) -> int:
        return len(set(self.offered.items) & set(self.elevated_base.items))

    @property
    def a(self) -> float:
        """Shared denominator offset 1 + K'/K, in (1, 2] when anything is offered."""
        return 1.0 + self.k_prime / self.capacity

    @classmethod
    def from_counts(
        cls, capacity: int, epsilon: float, k_prime: int, j_overlap: int
    ) -> "StepKlContext":
        """Canonical context with |offered| = k_prime and |offered & base| = j_overlap."""
        k = int(capacity)
        kp, j = int(k_prime), int(j_overlap)
        if not 1 <= kp <= k:
            raise ValueError(f"k_prime must be in [1, K], got {kp} with K={k}")
        if not 0 <= j <= kp - 1:
            raise ValueError(f"j_overlap must be in [0, k_prime-1], got {j} with k_prime={kp}")
        base = Assortment(range(1, k))
        item = k
        offered = list(range(1, j + 1)) + [item] + list(range(k + 1, k + 1 + (kp - j - 1)))
        return cls(
            epsilon=epsilon,
            capacity=k,
            offered=Assortment(offered),
            elevated_base=base,
            item=item,
        )

    def conditional_laws(self) -> CategoricalPair:
        """Outcome laws (no-purchase first, offered items ascending) under the
        base parameterization and under base + item."""
        if self.item not in self.offered:
            raise ValueError("conditional laws differ only when the item is offered")
        k, eps = self.capacity, self.epsilon
        base = set(self.elevated_base.items)
        low, high = 1.0 / k, (1.0 + eps) / k
        w_p = np.array([high if j in base else low for j in self.offered.items])
        w_q = w_p.copy()
        w_q[self.offered.items.index(self.item)] = high
        den_p = 1.0 + float(np.sum(w_p))
        den_q = 1.0 + float(np.sum(w_q))
        p = np.concatenate(([1.0], w_p)) / den_p
        q = np.concatenate(([1.0], w_q)) / den_q
        return CategoricalPair(p, q)


@dataclass(frozen=True)
class PerStepKl:
    """Result of one conditional-KL evaluation."""

    exact: float
    bound: float
    coord_checks: tuple[CheckRecord, ...]
    note: str | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.coord_checks)


def per_step_kl(ctx: StepKlContext) -> PerStepKl:
    """One-step KL between neighboring planted instances and its certificate.

    The ceiling is 63*eps^2/K regardless of the offered set.  When the
    distinguishing item is offered, the five coordinate bounds behind that
    ceiling are audited as well:

        |p_0 - q_0| <= eps/K          (no-purchase mass shift)
        |p_j - q_j| <= 2*eps/K^2      (any other offered item j)
        |p_i - q_i| <= 4*eps/K        (the distinguishing item)
        q_0 >= 1/3                    (no-purchase mass floor)
        q_j >= 1/(3K)                 (offered-item mass floor)
    """
    k, eps = ctx.capacity, ctx.epsilon
    ceiling = 63.0 * eps * eps / k
    if ctx.item not in ctx.offered:
        return PerStepKl(
            exact=0.0,
            bound=ceiling,
            coord_checks=(),
            note="item not offered: the two conditional laws coincide",
        )
    pair = ctx.conditional_laws()
    exact = kl_exact(pair)
    i_pos = 1 + ctx.offered.items.index(ctx.item)
    diff = np.abs(pair.p - pair.q)
    other = np.delete(diff[1:], i_pos - 1)
    checks = (
        _le("no_purchase_shift", diff[0], eps / k),
        _le("other_item_shift", float(other.max()) if len(other) else 0.0, 2.0 * eps / k**2),
        _le("distinguishing_item_shift", diff[i_pos], 4.0 * eps / k),
        _ge("no_purchase_floor", float(pair.q[0]), 1.0 / 3.0),
        _ge("offered_mass_floor", float(pair.q[1:].min()), 1.0 / (3.0 * k)),
        _le("kl_vs_ceiling", exact, ceiling),
    )
    return PerStepKl(exact=exact, bound=ceiling, coord_checks=checks)


# ---------------------------------------------------------------------------
# full lower-bound chain audit


def _count_profiles(n_items: int, horizon: int, capacity: int) -> dict[str, np.ndarray]:
    """Admissible per-item offer-count allocations over the N-K+1 candidates.

    Each profile obeys 0 <= n_i <= T and sum_i n_i <= T*K, standing in for
    the policy-dependent expected counts the chain must dominate uniformly.
    Counts are integers so the budget comparisons below are exact.
    """
    n, t, k = int(n_items), int(horizon), int(capacity)
    m = n - k + 1
    uniform = np.full(m, t * k // m, dtype=np.float64)
    concentrated = np.zeros(m)
    concentrated[:k] = float(t)
    ramp = np.arange(1, m + 1, dtype=np.float64)
    ramp = np.floor(ramp * ((t * k) / ramp.sum()))
    np.minimum(ramp, float(t), out=ramp)
    return {"uniform": uniform, "concentrated": concentrated, "ramp": ramp}


def lower_bound_chain_audit(
    n_items: int, horizon: int, capacity: int, epsilon: float | None = None
) -> AuditReport:
    """Numerically certify every step of the minimax lower-bound chain.

    With M = N-K+1 and D = T*eps*sqrt(63*T/(2M)), the audited chain is

        mean_i sqrt(KL_i/2) <= sqrt(mean_i KL_i / 2)            (Jensen)
        mean_i KL_i <= 63*T*eps^2 / M                           (count budget)
        discrepancy term <= D <= T/3                            (schedule)
        final = (eps/9) * (2T/3 - D) >= eps*T/27
              >= min{1e-3*sqrt(N*T), T/54}

    together with the capacity fraction TK/M <= TK/(3K+1) <= T/3, the exact
    subset-count identity C(N,K-1)/(K*C(N,K)) = 1/M, and the per-step KL
    ceiling 63*eps^2/K over every offered-set shape.  Passing the audit at
    the scheduled eps certifies the bound's constants for this (N, T, K).
    """
    n, t, k = int(n_items), int(horizon), int(capacity)
    if n < 1 or t < 1 or k < 1:
        raise ValueError("n_items, horizon and capacity must be positive")
    if 4 * k > n:
        raise ApplicabilityError(f"chain audit requires K <= N/4, got K={k}, N={n}")
    if epsilon is None:
        epsilon = epsilon_schedule(n, t)
    eps = float(epsilon)
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5], got {eps}")

    m = n - k + 1
    checks: list[CheckRecord] = [
        _le("capacity_fraction_vs_3k_plus_1", t * k / m, t * k / (3 * k + 1)),
        _le("capacity_fraction_vs_third", t * k / (3 * k + 1), t / 3.0),
    ]

    lhs = Fraction(math.comb(n, k - 1), k * math.comb(n, k))
    rhs = Fraction(1, m)
    if lhs == rhs:  # exact integer arithmetic decides; margin is only cosmetic
        checks.append(CheckRecord("subset_count_identity", float(lhs), float(rhs), 0.0))
    else:
        gap = max(abs(float(lhs - rhs)), 1e-9)
        checks.append(CheckRecord("subset_count_identity", float(lhs), float(rhs), -gap))

    worst_step = 0.0
    for k_prime in range(1, k + 1):
        for j in range(0, k_prime):
            ctx = StepKlContext.from_counts(k, eps, k_prime, j)
            worst_step = max(worst_step, per_step_kl(ctx).exact)
    step_ceiling = 63.0 * eps * eps / k
    checks.append(_le("per_step_kl_ceiling", worst_step, step_ceiling))

    kl_budget = 63.0 * t * eps * eps
    root_mean_ceiling = math.sqrt(kl_budget / (2.0 * m))
    for name, prof in _count_profiles(n, t, k).items():
        kl = prof * step_ceiling
        checks.append(_le(f"count_budget[{name}]", float(prof.sum()), t * k))
        checks.append(_le(f"kl_sum_budget[{name}]", float(kl.sum()), kl_budget))
        mean_root = float(np.mean(np.sqrt(kl / 2.0)))
        root_mean = math.sqrt(float(np.mean(kl)) / 2.0)
        checks.append(_le(f"jensen[{name}]", mean_root, root_mean))
        checks.append(_le(f"root_mean_ceiling[{name}]", root_mean, root_mean_ceiling))

    discrepancy = t * eps * math.sqrt(63.0 * t / (2.0 * m))
    bracket = 2.0 * t / 3.0 - discrepancy
    final = eps / 9.0 * bracket
    target = eps * t / 27.0
    minimax = min(1e-3 * math.sqrt(n * t), t / 54.0)
    checks.append(_le("discrepancy_vs_third", discrepancy, t / 3.0))
    checks.append(_ge("bracket_floor", bracket, t / 3.0))
    checks.append(_ge("final_floor", final, target))
    checks.append(_ge("minimax_floor", target, minimax))

    return AuditReport(
        title=f"lower-bound chain audit: N={n} T={t} K={k} eps={eps:.10g}",
        checks=tuple(checks),
        extras={
            "epsilon": eps,
            "discrepancy_ceiling": discrepancy,
            "final_value": final,
            "target_floor": target,
            "minimax_floor": minimax,
        },
    )


def trajectory_count_audit(counts, horizon: int, capacity: int) -> AuditReport:
    """Exact integer counting identities for one simulated trajectory.

    ``counts`` must expose integer arrays ``n_raw`` (offers) and ``n_padded``
    (offers after padding every assortment to size K).  Checks:
    sum of padded counts == T*K exactly, raw <= padded per item, and raw mass
    <= T*K.
    """
    raw = np.asarray(counts.n_raw, dtype=np.int64)
    padded = np.asarray(counts.n_padded, dtype=np.int64)
    if raw.shape != padded.shape or raw.ndim != 1:
        raise ValueError("count arrays must be 1-d and aligned")
    if np.any(raw < 0) or np.any(padded < 0):
        raise ValueError("negative offer counts are malformed")
    t, k = int(horizon), int(capacity)
    checks = (
        _eq("padded_mass_identity", float(padded.sum()), float(t * k)),
        _ge("raw_below_padded", float((padded - raw).min()), 0.0),
        _le("raw_mass_budget", float(raw.sum()), float(t * k)),
    )
    return AuditReport(
        title=f"trajectory count audit: T={t} K={k} N={len(raw)}",
        checks=checks,
        extras={"raw_total": int(raw.sum()), "padded_total": int(padded.sum())},
    )


def random_categorical_pairs(
    count: int,
    seed: int = 0xA55,
    min_dim: int = 2,
    max_dim: int = 50,
    floor: float = 1e-3,
) -> list[CategoricalPair]:
    """Seeded corpus of strictly positive categorical pairs for certificates.

    Each law is a random point of the simplex mixed with a uniform floor so
    every entry is >= ``floor``; dimensions are drawn from [min_dim, max_dim].
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(int(count)):
        dim = int(rng.integers(min_dim, max_dim + 1))
        laws = []
        for _ in range(2):
            x = rng.random(dim)
            laws.append(floor + (1.0 - dim * floor) * (x / x.sum()))
        pairs.append(CategoricalPair(laws[0], laws[1]))
    return pairs
