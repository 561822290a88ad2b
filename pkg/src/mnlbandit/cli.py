"""Command-line entry points.

Subcommands:

* ``verify``    -- run the certificate battery (closed-form gaps, divergence
                   majorants, one-step KL coordinates, the full lower-bound
                   chain, counting identities); exit 0 iff every check passes.
* ``simulate``  -- one trajectory of a policy on a planted instance.
* ``bayes``     -- Monte Carlo average regret over the uniform prior on
                   elevated sets, compared against the certified floor.
* ``scaling``   -- regret-growth exponent across a horizon grid.
* ``bound``     -- evaluate the minimax floor min{1e-3*sqrt(N*T), T/54}.

Every subcommand accepts ``--config FILE`` (JSON with option names as keys);
explicit command-line flags override config values, which override defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from .adversarial import (
    AdversarialSpec,
    ApplicabilityError,
    build_instance,
    epsilon_schedule,
    minimax_lower_bound,
    overlap_delta,
    single_stage_gap,
)
from .core import Assortment, expected_revenue
from .divergence import (
    AuditReport,
    CheckRecord,
    StepKlContext,
    kl_exact,
    kl_quadratic_bound,
    lower_bound_chain_audit,
    per_step_kl,
    random_categorical_pairs,
    trajectory_count_audit,
    tv_distance,
)
from .policies import PolicySpec
from .runner import (
    ConfigError,
    ExperimentConfig,
    bayes_regret,
    emit_report,
    round12,
    run_policy_trajectory,
    scaling_fit,
)

__all__ = ["main", "build_parser", "verification_battery"]


# ---------------------------------------------------------------------------
# certificate battery


def _gap_certificates() -> AuditReport:
    """Measured revenue gaps on planted instances vs the closed form."""
    n, k = 20, 5
    s0 = Assortment(range(1, k + 1))
    checks = []
    for eps in (0.01, 0.1, 0.25, 0.5):
        inst = build_instance(
            AdversarialSpec(n_items=n, capacity=k, epsilon=eps, elevated_set=s0)
        )
        r0 = expected_revenue(inst, s0)
        for shared in range(k + 1):
            alt = Assortment(
                tuple(range(1, shared + 1)) + tuple(range(k + 1, 2 * k + 1 - shared))
            )
            delta = overlap_delta(s0, alt, k)
            gap = single_stage_gap(eps, delta)
            measured = r0 - expected_revenue(inst, alt)
            diff = abs(measured - gap.exact_gap)
            checks.append(
                CheckRecord(
                    f"overlap_gap(eps={eps},shared={shared})",
                    measured,
                    gap.exact_gap,
                    -diff,
                )
            )
            checks.append(
                CheckRecord(
                    f"gap_ninth_floor(eps={eps},shared={shared})",
                    gap.exact_gap,
                    gap.lower_bound_gap,
                    gap.exact_gap - gap.lower_bound_gap,
                )
            )
    return AuditReport(
        "planted-instance revenue gaps vs closed form (N=20, K=5)",
        tuple(checks),
        {"epsilons": [0.01, 0.1, 0.25, 0.5], "overlaps": list(range(k + 1))},
    )


def _kl_certificates(seed: int) -> AuditReport:
    """Quadratic KL majorant and Pinsker on a random categorical corpus."""
    pairs = random_categorical_pairs(200, seed=seed)
    quad = [(kl_exact(p), kl_quadratic_bound(p)) for p in pairs]
    pins = [(tv_distance(p), math.sqrt(kl_exact(p) / 2.0)) for p in pairs]
    wq = min(quad, key=lambda t: t[1] - t[0])
    wp = min(pins, key=lambda t: t[1] - t[0])
    checks = (
        CheckRecord("kl_le_quadratic[200 pairs, worst]", wq[0], wq[1], wq[1] - wq[0]),
        CheckRecord("tv_le_pinsker[200 pairs, worst]", wp[0], wp[1], wp[1] - wp[0]),
    )
    return AuditReport(
        "divergence majorants on a random categorical corpus",
        checks,
        {"pairs": 200, "dimensions": "2..50", "seed": seed},
    )


def _step_kl_certificates() -> AuditReport:
    """Coordinate certificates for the one-step KL over all offered profiles."""
    worst: dict[str, CheckRecord] = {}
    contexts = 0
    for k in (2, 5, 10, 20):
        for eps in (0.05, 0.2, 0.5):
            for k_prime in range(1, k + 1):
                for j in range(k_prime):
                    res = per_step_kl(StepKlContext.from_counts(k, eps, k_prime, j))
                    contexts += 1
                    for c in res.coord_checks:
                        cur = worst.get(c.name)
                        if cur is None or c.margin < cur.margin:
                            worst[c.name] = c
    checks = [
        CheckRecord(f"{name}[{contexts} profiles, worst]", c.exact, c.bound, c.margin)
        for name, c in worst.items()
    ]
    absent = per_step_kl(
        StepKlContext(
            epsilon=0.2,
            capacity=4,
            offered=Assortment((1, 2)),
            elevated_base=Assortment((1, 2, 3)),
            item=4,
        )
    )
    checks.append(
        CheckRecord("absent_item_zero_divergence", absent.exact, 0.0, -abs(absent.exact))
    )
    return AuditReport(
        "one-step divergence coordinate certificates",
        tuple(checks),
        {"capacities": [2, 5, 10, 20], "epsilons": [0.05, 0.2, 0.5], "profiles": contexts},
    )


def _chain_certificates() -> list[AuditReport]:
    return [
        lower_bound_chain_audit(16, 1024, 4),
        lower_bound_chain_audit(100, 40_000, 25),
        lower_bound_chain_audit(400, 1_000_000, 100),
    ]


def _count_certificates(seed: int) -> list[AuditReport]:
    spec = AdversarialSpec(
        n_items=8, capacity=3, epsilon=0.3, elevated_set=Assortment((1, 2, 3))
    )
    _, counts = run_policy_trajectory(
        PolicySpec("random"), build_instance(spec), 400, seed, instance_label=spec.label()
    )
    traj = trajectory_count_audit(counts, 400, 3)

    rows = []
    for n, k in ((8, 2), (16, 4), (40, 8), (100, 25), (400, 100)):
        lhs = Fraction(math.comb(n, k - 1), k * math.comb(n, k))
        rhs = Fraction(1, n - k + 1)
        margin = 0.0 if lhs == rhs else -max(abs(float(lhs - rhs)), 1e-9)
        rows.append(CheckRecord(f"pick_rate_identity(N={n},K={k})", float(lhs), float(rhs), margin))
    ident = AuditReport("uniform pick-rate identity (compared as exact rationals)", tuple(rows))
    return [traj, ident]


def verification_battery(seed: int = 2653) -> list[AuditReport]:
    """All certificate reports, in a fixed order."""
    reports = [_gap_certificates(), _kl_certificates(seed), _step_kl_certificates()]
    reports.extend(_chain_certificates())
    reports.extend(_count_certificates(seed))
    return reports


# ---------------------------------------------------------------------------
# option handling


_CORES = os.cpu_count() or 1
_COMMON = {"format": "table", "out": None, "config": None}
_DEFAULTS: dict[str, dict] = {
    "verify": {"seed": 2653, **_COMMON},
    "simulate": {
        "n": 16, "k": 4, "t": 1024, "epsilon": "auto", "policy": "epoch-ucb",
        "elevated": None, "seed": 0, **_COMMON,
    },
    "bayes": {
        "n": 16, "k": 4, "t": 1024, "epsilon": "auto", "policy": "epoch-ucb",
        "draws": 40, "reps": 1, "seed": 0, "prior": "sample", "parallel": _CORES, **_COMMON,
    },
    "scaling": {
        "n": 16, "k": 4, "horizons": "1024,2048,4096,8192", "epsilon": "auto",
        "policy": "epoch-ucb", "reps": 3, "seed": 0, "parallel": _CORES, **_COMMON,
    },
    "bound": {"n": 16, "k": 4, "t": 1024, **_COMMON},
}

# config files may use the experiment-config field names
_CONFIG_ALIASES = {"n_items": "n", "capacity": "k", "horizon": "t"}


def _policy_spec(value) -> PolicySpec:
    if isinstance(value, PolicySpec):
        return value
    if isinstance(value, dict):
        return PolicySpec.from_dict(value)
    return PolicySpec.from_string(str(value))


def _resolve_epsilon(value, n: int, t: int) -> float:
    if value == "auto" or value is None:
        return epsilon_schedule(n, t)
    return float(value)


def _parse_items(value) -> tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(int(x) for x in value)
    return tuple(int(x) for x in str(value).split(",") if x.strip())


# ---------------------------------------------------------------------------
# subcommands (each returns report text and a pass flag)


def _cmd_verify(opts) -> tuple[str, bool]:
    reports = verification_battery(seed=int(opts["seed"]))
    ok = all(r.passed for r in reports)
    fmt = opts["format"]
    if fmt == "json":
        payload = {
            "kind": "verification",
            "passed": ok,
            "reports": [json.loads(r.to_json()) for r in reports],
        }
        return json.dumps(payload, indent=2) + "\n", ok
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["report", "name", "exact", "bound", "margin", "status"])
        for r in reports:
            for c in r.checks:
                writer.writerow(
                    [
                        r.title,
                        c.name,
                        f"{c.exact:.12g}",
                        f"{c.bound:.12g}",
                        f"{c.margin:.12g}",
                        "PASS" if c.passed else "FAIL",
                    ]
                )
        return buf.getvalue(), ok
    blocks = [r.to_table() for r in reports]
    total = sum(len(r.checks) for r in reports)
    blocks.append(f"verification: {'PASS' if ok else 'FAIL'} ({total} checks in {len(reports)} reports)")
    return "\n\n".join(blocks) + "\n", ok


def _cmd_simulate(opts) -> tuple[str, bool]:
    n, k, t = int(opts["n"]), int(opts["k"]), int(opts["t"])
    eps = _resolve_epsilon(opts["epsilon"], n, t)
    elevated = (
        Assortment(_parse_items(opts["elevated"]))
        if opts["elevated"]
        else Assortment(range(1, k + 1))
    )
    spec = AdversarialSpec(n_items=n, capacity=k, epsilon=eps, elevated_set=elevated)
    trace, counts = run_policy_trajectory(
        _policy_spec(opts["policy"]),
        build_instance(spec),
        t,
        int(opts["seed"]),
        instance_label=spec.label(),
    )
    text = emit_report(trace, opts["format"])
    if opts["format"] == "table":
        text += "\n" + trajectory_count_audit(counts, t, k).to_table() + "\n"
    return text, True


def _cmd_bayes(opts) -> tuple[str, bool]:
    eps = opts["epsilon"]
    config = ExperimentConfig(
        n_items=int(opts["n"]),
        capacity=int(opts["k"]),
        horizon=int(opts["t"]),
        policy=_policy_spec(opts["policy"]),
        epsilon=None if eps in ("auto", None) else float(eps),
        draws=int(opts["draws"]),
        reps=int(opts["reps"]),
        seed=int(opts["seed"]),
        prior=str(opts["prior"]),
    )
    result = bayes_regret(config, parallel=int(opts["parallel"]))
    return emit_report(result, opts["format"]), True


def _cmd_scaling(opts) -> tuple[str, bool]:
    n, k = int(opts["n"]), int(opts["k"])
    horizons = _parse_items(opts["horizons"])
    eps = opts["epsilon"]
    result = scaling_fit(
        _policy_spec(opts["policy"]),
        [(n, k, t) for t in horizons],
        replications=int(opts["reps"]),
        seed=int(opts["seed"]),
        epsilon="auto" if eps in ("auto", None) else float(eps),
        parallel=int(opts["parallel"]),
    )
    return emit_report(result, opts["format"]), True


def _cmd_bound(opts) -> tuple[str, bool]:
    n, k, t = int(opts["n"]), int(opts["k"]), int(opts["t"])
    lb = minimax_lower_bound(n, t, k)
    fmt = opts["format"]
    if fmt == "json":
        payload = {
            "kind": "minimax_floor",
            "n_items": n,
            "capacity": k,
            "horizon": t,
            "value": round12(lb.value),
            "regime": lb.regime.value,
            "constant_c": lb.constant_c,
        }
        return json.dumps(payload, indent=2) + "\n", True
    if fmt == "csv":
        return (
            "n_items,capacity,horizon,value,regime\n"
            f"{n},{k},{t},{lb.value:.12g},{lb.regime.value}\n",
            True,
        )
    return (
        f"minimax floor: N={n} K={k} T={t}\n"
        f"  value   {lb.value:.12g}\n"
        f"  regime  {lb.regime.value}\n"
        f"  formula min{{1e-3*sqrt(N*T), T/54}}\n",
        True,
    )


_COMMANDS = {
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "bayes": _cmd_bayes,
    "scaling": _cmd_scaling,
    "bound": _cmd_bound,
}


# ---------------------------------------------------------------------------
# parser / entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mnlbandit",
        description="capacitated assortment bandit lab: certificates, simulation, floors",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv", "table"), default=S,
                        help="report format (default table)")
        sp.add_argument("--out", default=S, help="write the report to this file")
        sp.add_argument("--config", default=S,
                        help="JSON file of option values; explicit flags win")

    p = sub.add_parser("verify", help="run the certificate battery")
    p.add_argument("--seed", type=int, default=S, help="seed for randomized corpora")
    common(p)

    p = sub.add_parser("simulate", help="one policy trajectory on a planted instance")
    p.add_argument("--n", type=int, default=S, help="number of items")
    p.add_argument("--k", type=int, default=S, help="assortment capacity")
    p.add_argument("--t", type=int, default=S, help="horizon")
    p.add_argument("--epsilon", default=S, help="weight elevation, or 'auto' for the schedule")
    p.add_argument("--policy", default=S, help="policy spec, e.g. epoch-ucb or fixed:items=1,2")
    p.add_argument("--elevated", default=S, help="elevated item ids, e.g. 1,2,3 (default 1..K)")
    p.add_argument("--seed", type=int, default=S)
    common(p)

    p = sub.add_parser("bayes", help="average regret over the uniform prior vs the floor")
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--t", type=int, default=S)
    p.add_argument("--epsilon", default=S, help="weight elevation, or 'auto' for the schedule")
    p.add_argument("--policy", default=S)
    p.add_argument("--draws", type=int, default=S, help="prior draws of the elevated set")
    p.add_argument("--reps", type=int, default=S, help="trajectories per draw")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--prior", choices=("sample", "exact"), default=S)
    p.add_argument("--parallel", type=int, default=S, help="worker processes (1 = serial)")
    common(p)

    p = sub.add_parser("scaling", help="regret-growth exponent over a horizon grid")
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--horizons", default=S, help="comma-separated horizons (>= 3)")
    p.add_argument("--epsilon", default=S, help="'auto' rescales per horizon; a float freezes it")
    p.add_argument("--policy", default=S)
    p.add_argument("--reps", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--parallel", type=int, default=S)
    common(p)

    p = sub.add_parser("bound", help="evaluate the minimax floor")
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--t", type=int, default=S)
    common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    cmd = ns.pop("command")
    opts = dict(_DEFAULTS[cmd])
    cfg_path = ns.pop("config", None)
    if cfg_path:
        try:
            with open(cfg_path) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {cfg_path}: {exc}", file=sys.stderr)
            return 2
        cfg = {_CONFIG_ALIASES.get(key, key): value for key, value in cfg.items()}
        unknown = set(cfg) - set(opts)
        if unknown:
            print(f"error: unknown config keys for {cmd}: {sorted(unknown)}", file=sys.stderr)
            return 2
        opts.update(cfg)
    opts.update(ns)

    try:
        text, ok = _COMMANDS[cmd](opts)
    except (ConfigError, ApplicabilityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = opts.get("out")
    if out:
        try:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
