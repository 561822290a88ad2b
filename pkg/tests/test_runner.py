import json
import math

import numpy as np
import pytest

from mnlbandit import (
    AdversarialSpec,
    Assortment,
    CapacityError,
    ConfigError,
    EpochUcbPolicy,
    ExperimentConfig,
    ExperimentResult,
    FixedAssortmentPolicy,
    PolicySpec,
    bayes_regret,
    build_instance,
    derive_seed,
    emit_report,
    epsilon_schedule,
    experiment_result_from_json,
    instantaneous_regret,
    minimax_lower_bound,
    pad_assortment,
    run_policy_trajectory,
    run_trajectory,
    scaling_fit,
    trajectory_rngs,
)
from mnlbandit.runner import OfferCounts, RegretTrace, round12


def test_round12():
    assert round12(1 / 3) == float("0.333333333333")
    assert round12(10.0) == 10.0
    x = round12(math.pi * 1e6)
    assert float(f"{x:.12g}") == x


def test_derive_seed_and_streams():
    assert derive_seed(7, 1, 2, 3) == derive_seed(7, 1, 2, 3)
    assert derive_seed(7, 1, 2, 3) != derive_seed(7, 1, 3, 2)
    assert derive_seed(7, 0) != derive_seed(7, 1)
    env_a, pol_a = trajectory_rngs(123)
    env_b, pol_b = trajectory_rngs(123)
    assert env_a.random() == env_b.random()
    assert pol_a.random() == pol_b.random()
    # environment and policy streams are distinct
    assert trajectory_rngs(5)[0].random() != trajectory_rngs(5)[1].random()


def test_pad_assortment():
    s = Assortment((2, 4, 5))
    assert pad_assortment(s, 6, 3) is s  # already size K
    assert pad_assortment(Assortment(()), 5, 3).items == (1, 2, 3)
    assert pad_assortment(Assortment((4,)), 5, 3).items == (1, 2, 4)
    with pytest.raises(ValueError):
        pad_assortment(Assortment((1,)), 2, 3)  # K > N
    with pytest.raises(CapacityError):
        pad_assortment(Assortment((1, 2, 3)), 5, 2)


def test_offer_counts_and_trace_validation():
    with pytest.raises(ValueError):
        OfferCounts(np.zeros(3, dtype=np.int64), np.zeros(2, dtype=np.int64))
    with pytest.raises(ValueError):
        RegretTrace(
            step_regrets=np.ones(4),
            cumulative=99.0,  # inconsistent with the trace
            realized_revenue=0.0,
            seed=0,
            policy="fixed",
            instance_label="",
        )


# ---------------------------------------------------------------------------
# single trajectories


def planted_instance(n=10, k=5, eps=0.5, elevated=None):
    s = Assortment(elevated or range(1, k + 1))
    return build_instance(AdversarialSpec(n, k, eps, s))


def test_optimal_fixed_policy_has_zero_regret():
    inst = planted_instance()
    pol = FixedAssortmentPolicy(10, 5, inst.revenues, items=range(1, 6))
    trace, counts = run_trajectory(pol, inst, 50, seed=3)
    assert trace.cumulative == 0.0
    assert not trace.step_regrets.any()
    assert counts.n_raw[:5].tolist() == [50] * 5


def test_disjoint_fixed_policy_regret_is_steps_times_gap():
    # worst-overlap set: every step pays the same instantaneous gap
    inst = planted_instance()
    bad = Assortment((6, 7, 8, 9, 10))
    pol = FixedAssortmentPolicy(10, 5, inst.revenues, items=bad)
    trace, _ = run_trajectory(pol, inst, 100, seed=4)
    gap = instantaneous_regret(inst, bad)
    assert trace.cumulative == 100 * gap  # bitwise: accumulated as count * gap
    assert trace.cumulative == pytest.approx(10.0, abs=1e-12)


def test_trajectory_determinism():
    inst = planted_instance(8, 3, 0.4)
    spec = PolicySpec("epoch-ucb")
    a, ca = run_policy_trajectory(spec, inst, 300, seed=41)
    b, cb = run_policy_trajectory(spec, inst, 300, seed=41)
    assert np.array_equal(a.step_regrets, b.step_regrets)
    assert a.cumulative == b.cumulative
    assert a.realized_revenue == b.realized_revenue
    assert np.array_equal(ca.n_padded, cb.n_padded)
    c, _ = run_policy_trajectory(spec, inst, 300, seed=42)
    assert not np.array_equal(a.step_regrets, c.step_regrets)


def test_trajectory_regret_is_nonnegative_and_accumulates():
    inst = planted_instance(8, 3, 0.4)
    trace, _ = run_policy_trajectory(PolicySpec("random"), inst, 500, seed=9)
    assert trace.step_regrets.min() >= 0.0
    cum = np.cumsum(trace.step_regrets)
    assert np.all(np.diff(cum) >= -1e-15)
    assert trace.cumulative == pytest.approx(cum[-1], rel=1e-9)
    assert 0.0 <= trace.realized_revenue <= 500.0
    with pytest.raises(ValueError):
        run_trajectory(
            FixedAssortmentPolicy(8, 3, inst.revenues), inst, 0, seed=1
        )


# ---------------------------------------------------------------------------
# experiment configs


def test_experiment_config_validation():
    good = ExperimentConfig(8, 2, 64, PolicySpec("fixed"))
    assert good.resolve_epsilon() == epsilon_schedule(8, 64)
    assert ExperimentConfig(8, 2, 64, PolicySpec("fixed"), epsilon=0.3).resolve_epsilon() == 0.3
    for kwargs in (
        dict(n_items=0),
        dict(capacity=9),
        dict(horizon=0),
        dict(epsilon=0.7),
        dict(epsilon=0.0),
        dict(draws=0),
        dict(reps=0),
        dict(prior="bogus"),
    ):
        base = dict(n_items=8, capacity=2, horizon=64, policy=PolicySpec("fixed"))
        base.update(kwargs)
        with pytest.raises(ConfigError):
            ExperimentConfig(**base)
    with pytest.raises(ConfigError):
        ExperimentConfig(8, 2, 64, "fixed")  # bare string is not a spec


def test_experiment_config_round_trip():
    cfg = ExperimentConfig(
        8, 2, 64, PolicySpec("fixed", {"items": (3, 4)}), epsilon=0.25,
        draws=6, reps=2, seed=17, prior="sample",
    )
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg


# ---------------------------------------------------------------------------
# Bayes-regret estimation


def test_bayes_regret_sampled_prior():
    cfg = ExperimentConfig(8, 2, 64, PolicySpec("fixed"), draws=6, reps=2, seed=5)
    res = bayes_regret(cfg)
    assert len(res.rows) == 12
    assert len(res.per_draw_regret) == 6
    assert res.epsilon == round12(epsilon_schedule(8, 64))
    # mean is computed before the 12-digit report rounding of per-draw values
    assert res.mean_regret == pytest.approx(np.mean(res.per_draw_regret), rel=1e-11)
    # 4K <= N here, so the floor comparison is reported
    assert res.lower_bound == round12(minimax_lower_bound(8, 64, 2).value)
    assert res.consistency_margin == round12(
        res.mean_regret - 2 * res.std_error - res.lower_bound
    )
    assert res.consistent == (res.consistency_margin >= 0)
    assert any("necessary" in n for n in res.notices)
    # deterministic: same config, same result object
    assert bayes_regret(cfg) == res


def test_bayes_regret_parallel_matches_serial():
    cfg = ExperimentConfig(8, 2, 64, PolicySpec("epoch-ucb"), draws=4, reps=2, seed=8)
    serial = bayes_regret(cfg, parallel=1)
    forked = bayes_regret(cfg, parallel=3)
    assert emit_report(serial, "json") == emit_report(forked, "json")


def test_bayes_regret_exact_prior():
    cfg = ExperimentConfig(6, 2, 32, PolicySpec("fixed"), reps=2, seed=3, prior="exact")
    res = bayes_regret(cfg)
    assert len(res.per_draw_regret) == math.comb(6, 2)
    assert len(res.rows) == math.comb(6, 2) * 2
    # K > N/4 here: the floor does not apply and the report says so
    assert res.lower_bound is None and res.consistent is None
    assert any("K <= N/4" in n for n in res.notices)
    one_rep = bayes_regret(
        ExperimentConfig(6, 2, 32, PolicySpec("fixed"), seed=3, prior="exact")
    )
    assert one_rep.std_error == 0.0
    assert any("zero by construction" in n for n in one_rep.notices)


def test_bayes_regret_exact_prior_guard():
    cfg = ExperimentConfig(40, 10, 16, PolicySpec("fixed"), prior="exact")
    with pytest.raises(ConfigError):
        bayes_regret(cfg)  # C(40,10) is far beyond the enumeration budget


# ---------------------------------------------------------------------------
# scaling fits


def test_scaling_fixed_policy_slope_is_one():
    # constant per-step gap + common random numbers across horizons
    fit = scaling_fit(
        PolicySpec("fixed"),
        [(8, 2, 32), (8, 2, 64), (8, 2, 128)],
        replications=3,
        seed=11,
        epsilon=0.5,
    )
    assert fit.slope == 1.0
    assert fit.epsilon_mode == "0.5"
    assert not fit.zero_regret
    assert len(fit.mean_regrets) == 3


def test_scaling_oracle_policy_flags_zero_regret():
    # K = N: the only elevated set is {1..N}, which the default fixed policy
    # offers — regret is identically zero and the exponent is undefined
    fit = scaling_fit(
        PolicySpec("fixed"),
        [(4, 4, 8), (4, 4, 16), (4, 4, 32)],
        replications=2,
        seed=2,
        epsilon=0.5,
    )
    assert fit.zero_regret
    assert fit.slope is None and fit.intercept is None
    assert fit.residuals == ()


def test_scaling_grid_validation():
    pts = [(8, 2, 32), (8, 2, 64), (8, 2, 128)]
    with pytest.raises(ValueError):
        scaling_fit(PolicySpec("fixed"), pts[:2], 2, 0)
    with pytest.raises(ValueError):
        scaling_fit(PolicySpec("fixed"), [(8, 2, 32), (9, 2, 64), (8, 2, 128)], 2, 0)
    with pytest.raises(ValueError):
        scaling_fit(PolicySpec("fixed"), [(8, 2, 32), (8, 2, 32), (8, 2, 64)], 2, 0)
    with pytest.raises(ValueError):
        scaling_fit(PolicySpec("fixed"), pts, 0, 0)


def test_scaling_parallel_matches_serial():
    fit1 = scaling_fit(PolicySpec("epoch-ucb"), [(8, 2, 32), (8, 2, 64), (8, 2, 128)],
                       replications=2, seed=4, parallel=1)
    fit3 = scaling_fit(PolicySpec("epoch-ucb"), [(8, 2, 32), (8, 2, 64), (8, 2, 128)],
                       replications=2, seed=4, parallel=3)
    assert emit_report(fit1, "json") == emit_report(fit3, "json")


# ---------------------------------------------------------------------------
# reports


def small_result():
    cfg = ExperimentConfig(8, 2, 64, PolicySpec("fixed"), draws=4, reps=1, seed=5)
    return bayes_regret(cfg)


def test_emit_report_json_round_trip():
    res = small_result()
    text = emit_report(res, "json")
    assert text.endswith("\n") and "\r" not in text
    assert experiment_result_from_json(text) == res
    with pytest.raises(ValueError):
        experiment_result_from_json(json.dumps({"kind": "other"}))


def test_emit_report_csv_schema():
    res = small_result()
    lines = emit_report(res, "csv").splitlines()
    assert lines[0] == "draw_id,seed,elevated_set,cum_regret"
    assert len(lines) == 1 + len(res.rows)
    first = lines[1].split(",")
    assert len(first) == 4
    assert all(tok.isdigit() for tok in first[2].split(" "))  # space-joined set


def test_emit_report_empty_rows_keeps_header():
    res = small_result()
    empty = ExperimentResult(
        config=res.config,
        epsilon=res.epsilon,
        rows=(),
        per_draw_regret=(),
        mean_regret=0.0,
        std_error=0.0,
        lower_bound=None,
        lower_bound_regime=None,
        consistency_margin=None,
        consistent=None,
        notices=(),
    )
    assert emit_report(empty, "csv") == "draw_id,seed,elevated_set,cum_regret\n"
    json.loads(emit_report(empty, "json"))  # still a valid document


def test_emit_report_table_and_errors():
    res = small_result()
    table = emit_report(res, "table")
    assert "mean regret" in table and "lower bound" in table
    with pytest.raises(ValueError):
        emit_report(res, "yaml")
    with pytest.raises(TypeError):
        emit_report(object())


def test_emit_trace_formats():
    inst = planted_instance(6, 2, 0.3, elevated=(1, 2))
    trace, _ = run_policy_trajectory(PolicySpec("random"), inst, 20, seed=6)
    csv_text = emit_report(trace, "csv")
    lines = csv_text.splitlines()
    assert lines[0] == "step,step_regret,cum_regret"
    assert len(lines) == 21
    payload = json.loads(emit_report(trace, "json"))
    assert payload["kind"] == "trajectory"
    assert payload["horizon"] == 20
    assert len(payload["step_regrets"]) == 20
    assert "cumulative regret" in emit_report(trace, "table")


def test_emit_report_is_stable():
    a = emit_report(small_result(), "json")
    b = emit_report(small_result(), "json")
    assert a == b
