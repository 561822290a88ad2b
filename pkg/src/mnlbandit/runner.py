"""Monte Carlo regret experiments with reproducible seed splitting.

Seed scheme: every trajectory gets an integer seed derived from
``SeedSequence((master, tag, *indices))`` -- tag 0 for prior draws, 1 for
(draw, replicate) trajectories, 2 for scaling replicates.  A trajectory seed
splits once more into an environment stream and a policy stream.  Results are
therefore bit-identical for a given master seed regardless of the parallelism
degree, and every emitted row carries the exact per-trajectory seed.

Floats stored in results are rounded to 12 significant digits at construction
so that reports (which print 12 significant digits) round-trip losslessly.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .adversarial import (
    AdversarialSpec,
    ApplicabilityError,
    build_instance,
    epsilon_schedule,
    minimax_lower_bound,
    sample_elevated_set,
)
from .core import (
    Assortment,
    CapacityError,
    MnlInstance,
    best_assortment,
    choice_distribution,
    NO_PURCHASE,
    sample_choice,
)
from .divergence import AuditReport, trajectory_count_audit
from .policies import AssortmentPolicy, Observation, PolicySpec

__all__ = [
    "ConfigError",
    "OfferCounts",
    "RegretTrace",
    "ExperimentConfig",
    "TrajectoryRow",
    "ExperimentResult",
    "ScalingFitResult",
    "EXACT_PRIOR_LIMIT",
    "round12",
    "derive_seed",
    "trajectory_rngs",
    "pad_assortment",
    "run_trajectory",
    "run_policy_trajectory",
    "bayes_regret",
    "scaling_fit",
    "emit_report",
    "experiment_result_from_json",
]

# exact prior averaging is only allowed up to this many elevated sets
EXACT_PRIOR_LIMIT = 10_000


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def round12(x: float) -> float:
    """Round to 12 significant digits (the report precision)."""
    return float(f"{float(x):.12g}")


def derive_seed(master: int, tag: int, *indices: int) -> int:
    """Deterministic per-task seed from the master seed and an index path."""
    ss = np.random.SeedSequence((int(master), int(tag), *[int(i) for i in indices]))
    return int(ss.generate_state(1, np.uint64)[0])


def trajectory_rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Split one trajectory seed into (environment stream, policy stream)."""
    env_ss, pol_ss = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(env_ss), np.random.default_rng(pol_ss)


def pad_assortment(s: Assortment, n_items: int, capacity: int) -> Assortment:
    """Extend ``s`` to exactly K items by appending the smallest unused ids."""
    n, k = int(n_items), int(capacity)
    if k > n:
        raise ValueError(f"cannot pad to K={k} with only N={n} items")
    if len(s) > k:
        raise CapacityError(f"assortment of size {len(s)} already exceeds K={k}")
    if len(s) == k:
        return s
    have = set(s.items)
    out = list(s.items)
    for i in range(1, n + 1):
        if i not in have:
            out.append(i)
            if len(out) == k:
                break
    return Assortment(out)


@dataclass(frozen=True, eq=False)
class OfferCounts:
    """Per-item offer counts of one trajectory, raw and after padding to K."""

    n_raw: np.ndarray
    n_padded: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.n_raw, dtype=np.int64)
        padded = np.asarray(self.n_padded, dtype=np.int64)
        if raw.shape != padded.shape or raw.ndim != 1:
            raise ValueError("count arrays must be 1-d and aligned")
        object.__setattr__(self, "n_raw", raw)
        object.__setattr__(self, "n_padded", padded)


@dataclass(frozen=True, eq=False)
class RegretTrace:
    """Per-step expected-regret trace of one trajectory."""

    step_regrets: np.ndarray
    cumulative: float
    realized_revenue: float
    seed: int
    policy: str
    instance_label: str

    def __post_init__(self):
        arr = np.asarray(self.step_regrets, dtype=np.float64)
        object.__setattr__(self, "step_regrets", arr)
        # cumulative is accumulated per offered set (count * gap), which can
        # differ from the naive per-step sum only by float rounding
        if abs(self.cumulative - math.fsum(arr)) > 1e-9 * max(1.0, abs(self.cumulative)):
            raise ValueError("cumulative regret inconsistent with per-step trace")


def run_trajectory(
    policy: AssortmentPolicy,
    instance: MnlInstance,
    horizon: int,
    seed: int,
    env_rng: np.random.Generator | None = None,
    instance_label: str = "",
) -> tuple[RegretTrace, OfferCounts]:
    """Play ``policy`` against ``instance`` for ``horizon`` steps.

    Returns the expected-regret trace plus offer counts (raw and padded to
    size K).  The counting identities are audited before returning; the
    padded counts always sum to exactly T*K.
    """
    t_max = int(horizon)
    if t_max < 1:
        raise ValueError("horizon must be positive")
    if env_rng is None:
        env_rng = trajectory_rngs(seed)[0]
    _, best_value = best_assortment(instance)
    revenues = instance.revenues
    n, k = instance.n_items, instance.capacity

    trace = np.empty(t_max)
    realized = 0.0
    # per-assortment cache: distribution, regret gap, padded ids, step count
    stats: dict[tuple, list] = {}
    for t in range(t_max):
        s = policy.act()
        st = stats.get(s.items)
        if st is None:
            dist = choice_distribution(instance, s)
            if len(s):
                rev = float(np.dot(revenues[s.indices()], dist.probabilities[1:]))
            else:
                rev = 0.0
            padded = pad_assortment(s, n, k)
            st = stats.setdefault(s.items, [dist, best_value - rev, padded.items, 0])
        outcome = sample_choice(st[0], env_rng)
        policy.observe(Observation(s, outcome, t))
        trace[t] = st[1]
        st[3] += 1
        if outcome is not NO_PURCHASE:
            realized += revenues[outcome - 1]

    cumulative = 0.0
    n_raw = np.zeros(n, dtype=np.int64)
    n_padded = np.zeros(n, dtype=np.int64)
    for items, (dist, gap, padded_items, steps) in stats.items():
        cumulative += steps * gap
        for i in items:
            n_raw[i - 1] += steps
        for i in padded_items:
            n_padded[i - 1] += steps

    counts = OfferCounts(n_raw=n_raw, n_padded=n_padded)
    audit = trajectory_count_audit(counts, t_max, k)
    if not audit.passed:
        raise RuntimeError(f"count identities violated:\n{audit.to_table()}")
    trace_obj = RegretTrace(
        step_regrets=trace,
        cumulative=cumulative,
        realized_revenue=realized,
        seed=int(seed),
        policy=policy.name,
        instance_label=instance_label,
    )
    return trace_obj, counts


def run_policy_trajectory(
    policy_spec: PolicySpec,
    instance: MnlInstance,
    horizon: int,
    seed: int,
    instance_label: str = "",
) -> tuple[RegretTrace, OfferCounts]:
    """Build the policy from its spec with a seed-derived stream, then run."""
    env_rng, pol_rng = trajectory_rngs(seed)
    policy = policy_spec.make(instance.n_items, instance.capacity, instance.revenues, pol_rng)
    return run_trajectory(
        policy, instance, horizon, seed, env_rng=env_rng, instance_label=instance_label
    )


# ---------------------------------------------------------------------------
# Bayes-regret experiments over the planted-instance prior


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one Bayes-regret experiment.

    ``epsilon=None`` means the calibrated schedule min{0.05*sqrt(N/T), 0.5}.
    ``prior`` is 'sample' (uniform draws of the elevated set) or 'exact'
    (average over every size-K set; refused above EXACT_PRIOR_LIMIT sets).
    """

    n_items: int
    capacity: int
    horizon: int
    policy: PolicySpec
    epsilon: float | None = None
    draws: int = 40
    reps: int = 1
    seed: int = 0
    prior: str = "sample"

    def __post_init__(self):
        n, k, t = int(self.n_items), int(self.capacity), int(self.horizon)
        if n < 1 or t < 1:
            raise ConfigError("n_items and horizon must be positive")
        if not 1 <= k <= n:
            raise ConfigError(f"capacity must be in [1, N], got K={k}, N={n}")
        if self.epsilon is not None and not 0.0 < float(self.epsilon) <= 0.5:
            raise ConfigError(f"epsilon must be in (0, 0.5] or None, got {self.epsilon}")
        if int(self.draws) < 1:
            raise ConfigError("draws must be >= 1")
        if int(self.reps) < 1:
            raise ConfigError("reps must be >= 1")
        if self.prior not in ("sample", "exact"):
            raise ConfigError(f"prior must be 'sample' or 'exact', got {self.prior!r}")
        if not isinstance(self.policy, PolicySpec):
            raise ConfigError("policy must be a PolicySpec")
        object.__setattr__(self, "n_items", n)
        object.__setattr__(self, "capacity", k)
        object.__setattr__(self, "horizon", t)
        object.__setattr__(self, "draws", int(self.draws))
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "seed", int(self.seed))
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", float(self.epsilon))

    def resolve_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return epsilon_schedule(self.n_items, self.horizon)

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "capacity": self.capacity,
            "horizon": self.horizon,
            "policy": self.policy.to_dict(),
            "epsilon": self.epsilon,
            "draws": self.draws,
            "reps": self.reps,
            "seed": self.seed,
            "prior": self.prior,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["policy"] = PolicySpec.from_dict(d["policy"])
        return cls(**d)


@dataclass(frozen=True)
class TrajectoryRow:
    """One (draw, replicate) trajectory in a report."""

    draw_id: int
    seed: int
    elevated_set: tuple[int, ...]
    cum_regret: float


@dataclass(frozen=True)
class ExperimentResult:
    """Bayes-regret estimate with its lower-bound consistency check.

    ``consistency_margin`` is the signed value mean - 2*SE - bound; the check
    passes when it is nonnegative.  The bound fields are None (with a notice)
    when K > N/4, where the certified floor does not apply.
    """

    config: ExperimentConfig
    epsilon: float
    rows: tuple[TrajectoryRow, ...]
    per_draw_regret: tuple[float, ...]
    mean_regret: float
    std_error: float
    lower_bound: float | None
    lower_bound_regime: str | None
    consistency_margin: float | None
    consistent: bool | None
    notices: tuple[str, ...] = ()

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("standard error cannot be negative")
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "per_draw_regret", tuple(self.per_draw_regret))
        object.__setattr__(self, "notices", tuple(self.notices))


def _elevated_sets(config: ExperimentConfig) -> list[Assortment]:
    n, k = config.n_items, config.capacity
    if config.prior == "exact":
        total = math.comb(n, k)
        if total > EXACT_PRIOR_LIMIT:
            raise ConfigError(
                f"exact prior over C({n},{k})={total} sets exceeds the "
                f"limit of {EXACT_PRIOR_LIMIT}; use prior='sample'"
            )
        return [Assortment(c) for c in combinations(range(1, n + 1), k)]
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0)))
    return [sample_elevated_set(n, k, rng) for _ in range(config.draws)]


def _bayes_task(args) -> float:
    n, k, t, eps, elevated, policy_spec, seed = args
    spec = AdversarialSpec(n_items=n, capacity=k, epsilon=eps, elevated_set=Assortment(elevated))
    trace, _ = run_policy_trajectory(
        policy_spec, build_instance(spec), t, seed, instance_label=spec.label()
    )
    return trace.cumulative


def _run_tasks(tasks: list, parallel: int, fn) -> list:
    if parallel <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * parallel))))


def bayes_regret(config: ExperimentConfig, parallel: int = 1) -> ExperimentResult:
    """Average cumulative regret over the uniform prior on elevated sets.

    Runs ``reps`` trajectories per prior draw with split seeds and compares
    mean - 2*SE against the certified floor when K <= N/4.  Results are
    bit-identical for any parallelism degree.
    """
    eps = config.resolve_epsilon()
    sets = _elevated_sets(config)
    n, k, t = config.n_items, config.capacity, config.horizon
    tasks = [
        (n, k, t, eps, s.items, config.policy, derive_seed(config.seed, 1, d, r))
        for d, s in enumerate(sets)
        for r in range(config.reps)
    ]
    cums = np.array(_run_tasks(tasks, parallel, _bayes_task), dtype=np.float64)
    cums = cums.reshape(len(sets), config.reps)

    rows = tuple(
        TrajectoryRow(
            draw_id=d,
            seed=tasks[d * config.reps + r][6],
            elevated_set=s.items,
            cum_regret=round12(cums[d, r]),
        )
        for d, s in enumerate(sets)
        for r in range(config.reps)
    )
    per_draw = cums.mean(axis=1)
    mean = float(per_draw.mean())

    notices: list[str] = []
    if config.prior == "exact":
        # the prior average is exact; only replicate noise remains
        if config.reps >= 2:
            col_means = cums.mean(axis=0)
            se = float(np.std(col_means, ddof=1) / math.sqrt(config.reps))
        else:
            se = 0.0
            notices.append("exact prior with one replicate: standard error is zero by construction")
    elif len(sets) >= 2:
        se = float(np.std(per_draw, ddof=1) / math.sqrt(len(sets)))
    else:
        se = 0.0
        notices.append("single prior draw: standard error unavailable, reported as zero")

    if 4 * k <= n:
        lb = minimax_lower_bound(n, t, k)
        bound, regime = lb.value, lb.regime.value
        margin = round12(mean - 2.0 * se - bound)
        consistent = margin >= 0.0
        notices.append(
            "uniform-prior average regret at or above the floor is a necessary "
            "consistency condition, not a proof of the bound"
        )
    else:
        bound = regime = margin = consistent = None
        notices.append(f"lower bound requires K <= N/4 (K={k}, N={n}); comparison skipped")

    return ExperimentResult(
        config=config,
        epsilon=round12(eps),
        rows=rows,
        per_draw_regret=tuple(round12(x) for x in per_draw),
        mean_regret=round12(mean),
        std_error=round12(se),
        lower_bound=None if bound is None else round12(bound),
        lower_bound_regime=regime,
        consistency_margin=margin,
        consistent=consistent,
        notices=tuple(notices),
    )


# ---------------------------------------------------------------------------
# regret-growth exponent


@dataclass(frozen=True)
class ScalingFitResult:
    """Least-squares slope of log(mean regret) against log(horizon)."""

    policy: str
    n_items: int
    capacity: int
    horizons: tuple[int, ...]
    mean_regrets: tuple[float, ...]
    replications: int
    seed: int
    epsilon_mode: str  # 'auto' or the fixed value as text
    slope: float | None
    intercept: float | None
    residuals: tuple[float, ...]
    zero_regret: bool


def _scaling_task(args) -> float:
    return _bayes_task(args)


def scaling_fit(
    policy_spec: PolicySpec,
    grid,
    replications: int,
    seed: int,
    epsilon: float | str = "auto",
    parallel: int = 1,
) -> ScalingFitResult:
    """Fit the growth exponent of mean regret across a horizon grid.

    ``grid`` is a sequence of (N, K, T) with N and K constant and at least 3
    distinct horizons.  ``epsilon='auto'`` rescales the planted family with
    the schedule at each horizon (the minimax probe); a fixed float freezes
    the family so per-step gaps are horizon-independent.  Replicate r draws
    one elevated set and one trajectory seed shared by every horizon (common
    random numbers), which pins the fixed-policy slope at exactly 1.
    """
    pts = [(int(n), int(k), int(t)) for (n, k, t) in grid]
    if len(pts) < 3:
        raise ValueError("need at least 3 grid points")
    ns = {n for n, _, _ in pts}
    ks = {k for _, k, _ in pts}
    horizons = [t for _, _, t in pts]
    if len(ns) != 1 or len(ks) != 1:
        raise ValueError("grid must hold N and K fixed and vary only the horizon")
    if len(set(horizons)) != len(horizons):
        raise ValueError("grid horizons must be distinct")
    n, k = ns.pop(), ks.pop()
    reps = int(replications)
    if reps < 1:
        raise ValueError("replications must be >= 1")

    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0)))
    elevated = [sample_elevated_set(n, k, rng) for _ in range(reps)]
    rep_seeds = [derive_seed(seed, 2, r) for r in range(reps)]

    tasks = []
    for t in horizons:
        eps = epsilon_schedule(n, t) if epsilon == "auto" else float(epsilon)
        for r in range(reps):
            tasks.append((n, k, t, eps, elevated[r].items, policy_spec, rep_seeds[r]))
    cums = np.array(_run_tasks(tasks, parallel, _scaling_task), dtype=np.float64)
    means = cums.reshape(len(horizons), reps).mean(axis=1)

    zero = bool(np.any(means <= 0.0))
    if zero:
        slope = intercept = None
        residuals: tuple[float, ...] = ()
    else:
        x = np.log(np.asarray(horizons, dtype=np.float64))
        y = np.log(means)
        coef = np.polyfit(x, y, 1)
        slope, intercept = round12(coef[0]), round12(coef[1])
        residuals = tuple(round12(v) for v in (y - np.polyval(coef, x)))

    return ScalingFitResult(
        policy=policy_spec.label(),
        n_items=n,
        capacity=k,
        horizons=tuple(horizons),
        mean_regrets=tuple(round12(m) for m in means),
        replications=reps,
        seed=int(seed),
        epsilon_mode="auto" if epsilon == "auto" else f"{float(epsilon):.12g}",
        slope=slope,
        intercept=intercept,
        residuals=residuals,
        zero_regret=zero,
    )


# ---------------------------------------------------------------------------
# reports


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _experiment_payload(result: ExperimentResult) -> dict:
    return {
        "kind": "bayes_experiment",
        "config": result.config.to_dict(),
        "epsilon": result.epsilon,
        "summary": {
            "mean_regret": result.mean_regret,
            "std_error": result.std_error,
            "lower_bound": result.lower_bound,
            "lower_bound_regime": result.lower_bound_regime,
            "consistency_margin": result.consistency_margin,
            "consistent": result.consistent,
        },
        "notices": list(result.notices),
        "per_draw_regret": list(result.per_draw_regret),
        "rows": [
            {
                "draw_id": r.draw_id,
                "seed": r.seed,
                "elevated_set": list(r.elevated_set),
                "cum_regret": r.cum_regret,
            }
            for r in result.rows
        ],
    }


def experiment_result_from_json(text: str) -> ExperimentResult:
    """Inverse of ``emit_report(..., 'json')`` for experiment results."""
    d = json.loads(text)
    if d.get("kind") != "bayes_experiment":
        raise ValueError(f"not a bayes_experiment report: kind={d.get('kind')!r}")
    s = d["summary"]
    return ExperimentResult(
        config=ExperimentConfig.from_dict(d["config"]),
        epsilon=d["epsilon"],
        rows=tuple(
            TrajectoryRow(
                draw_id=r["draw_id"],
                seed=r["seed"],
                elevated_set=tuple(r["elevated_set"]),
                cum_regret=r["cum_regret"],
            )
            for r in d["rows"]
        ),
        per_draw_regret=tuple(d["per_draw_regret"]),
        mean_regret=s["mean_regret"],
        std_error=s["std_error"],
        lower_bound=s["lower_bound"],
        lower_bound_regime=s["lower_bound_regime"],
        consistency_margin=s["consistency_margin"],
        consistent=s["consistent"],
        notices=tuple(d["notices"]),
    )


def _experiment_csv(result: ExperimentResult) -> str:
    lines = ["draw_id,seed,elevated_set,cum_regret"]
    for r in result.rows:
        items = " ".join(str(i) for i in r.elevated_set)
        lines.append(f"{r.draw_id},{r.seed},{items},{_fmt(r.cum_regret)}")
    return "\n".join(lines) + "\n"


def _experiment_table(result: ExperimentResult) -> str:
    c = result.config
    lines = [
        f"bayes experiment: N={c.n_items} K={c.capacity} T={c.horizon} "
        f"policy={c.policy.label()} prior={c.prior}",
        f"  epsilon        {_fmt(result.epsilon)}"
        + ("  (scheduled)" if c.epsilon is None else ""),
        f"  draws x reps   {len(result.per_draw_regret)} x {c.reps}   master seed {c.seed}",
        f"  mean regret    {_fmt(result.mean_regret)}",
        f"  std error      {_fmt(result.std_error)}",
    ]
    if result.lower_bound is not None:
        verdict = "consistent" if result.consistent else "INCONSISTENT"
        lines += [
            f"  lower bound    {_fmt(result.lower_bound)}  [{result.lower_bound_regime}]",
            f"  margin         {_fmt(result.consistency_margin)}  (mean - 2*SE - bound): {verdict}",
        ]
    for note in result.notices:
        lines.append(f"  note: {note}")
    return "\n".join(lines) + "\n"


def _scaling_payload(result: ScalingFitResult) -> dict:
    return {
        "kind": "scaling_fit",
        "policy": result.policy,
        "n_items": result.n_items,
        "capacity": result.capacity,
        "horizons": list(result.horizons),
        "mean_regrets": list(result.mean_regrets),
        "replications": result.replications,
        "seed": result.seed,
        "epsilon_mode": result.epsilon_mode,
        "slope": result.slope,
        "intercept": result.intercept,
        "residuals": list(result.residuals),
        "zero_regret": result.zero_regret,
    }


def _scaling_csv(result: ScalingFitResult) -> str:
    lines = ["horizon,mean_regret"]
    for t, m in zip(result.horizons, result.mean_regrets):
        lines.append(f"{t},{_fmt(m)}")
    return "\n".join(lines) + "\n"


def _scaling_table(result: ScalingFitResult) -> str:
    lines = [
        f"scaling fit: policy={result.policy} N={result.n_items} K={result.capacity} "
        f"reps={result.replications} seed={result.seed} eps={result.epsilon_mode}",
    ]
    for t, m in zip(result.horizons, result.mean_regrets):
        lines.append(f"  T={t:<8d} mean regret {_fmt(m)}")
    if result.zero_regret:
        lines.append("  slope undefined: some grid point has zero mean regret")
    else:
        lines.append(f"  slope {_fmt(result.slope)}   intercept {_fmt(result.intercept)}")
    return "\n".join(lines) + "\n"


def _trace_payload(trace: RegretTrace) -> dict:
    return {
        "kind": "trajectory",
        "policy": trace.policy,
        "instance": trace.instance_label,
        "seed": trace.seed,
        "horizon": len(trace.step_regrets),
        "cum_regret": round12(trace.cumulative),
        "realized_revenue": round12(trace.realized_revenue),
        "step_regrets": [round12(x) for x in trace.step_regrets],
    }


def _trace_csv(trace: RegretTrace) -> str:
    lines = ["step,step_regret,cum_regret"]
    running = 0.0
    for t, g in enumerate(trace.step_regrets):
        running += g
        lines.append(f"{t},{_fmt(round12(g))},{_fmt(round12(running))}")
    return "\n".join(lines) + "\n"


def _trace_table(trace: RegretTrace) -> str:
    return (
        f"trajectory: policy={trace.policy} seed={trace.seed} instance={trace.instance_label}\n"
        f"  steps             {len(trace.step_regrets)}\n"
        f"  cumulative regret {_fmt(round12(trace.cumulative))}\n"
        f"  realized revenue  {_fmt(round12(trace.realized_revenue))}\n"
    )


def emit_report(result, fmt: str = "table") -> str:
    """Serialize a result object to 'json', 'csv', or 'table' text.

    Identical inputs produce byte-identical output: floats carry 12
    significant digits, line endings are LF, and field order is fixed.
    """
    if fmt not in ("json", "csv", "table"):
        raise ValueError(f"format must be json, csv or table, got {fmt!r}")
    if isinstance(result, ExperimentResult):
        if fmt == "json":
            return json.dumps(_experiment_payload(result), indent=2) + "\n"
        if fmt == "csv":
            return _experiment_csv(result)
        return _experiment_table(result)
    if isinstance(result, ScalingFitResult):
        if fmt == "json":
            return json.dumps(_scaling_payload(result), indent=2) + "\n"
        if fmt == "csv":
            return _scaling_csv(result)
        return _scaling_table(result)
    if isinstance(result, RegretTrace):
        if fmt == "json":
            return json.dumps(_trace_payload(result), indent=2) + "\n"
        if fmt == "csv":
            return _trace_csv(result)
        return _trace_table(result)
    if isinstance(result, AuditReport):
        if fmt == "json":
            return result.to_json() + "\n"
        if fmt == "csv":
            lines = ["name,exact,bound,margin,status"]
            for c in result.checks:
                status = "PASS" if c.passed else "FAIL"
                lines.append(f"{c.name},{_fmt(c.exact)},{_fmt(c.bound)},{_fmt(c.margin)},{status}")
            return "\n".join(lines) + "\n"
        return result.to_table() + "\n"
    raise TypeError(f"cannot emit a report for {type(result).__name__}")
