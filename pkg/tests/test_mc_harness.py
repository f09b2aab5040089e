"""Experiment harness: config validation, reproducibility, statistical sanity."""

import csv
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from rootpacket import mc_harness as mh


def test_config_validation():
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="nope")
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="root_finding", eta=0.2)
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="root_finding", eta=0.125)
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="root_finding", epsilon_grid=[0.1, 0.2])
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="root_finding", epsilon_grid=[0.5, 0.5])
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="root_finding", epsilon_grid=[1.5, 0.1])
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="root_finding", trials=0)
    with pytest.raises(ValueError):
        mh.ExperimentConfig(experiment_kind="root_finding", checkpoint_ratio=1.0)
    cfg = mh.ExperimentConfig(experiment_kind="root_finding")
    with pytest.raises(ValueError):
        cfg.require_seed()


def test_load_config_roundtrip(tmp_path):
    p = tmp_path / "exp.toml"
    p.write_text(
        'experiment_kind = "epsilon_sweep"\n'
        "n_target = 5000\n"
        "trials = 8\n"
        "epsilon_grid = [0.2, 0.1, 0.05, 0.025]\n"
        "master_seed = 99\n"
    )
    cfg = mh.load_config(p)
    assert cfg.n_target == 5000 and cfg.trials == 8 and cfg.master_seed == 99
    cfg2 = mh.load_config(p, trials=16)
    assert cfg2.trials == 16
    p_bad = tmp_path / "bad.toml"
    p_bad.write_text('experiment_kind = "epsilon_sweep"\nno_such_key = 1\n')
    with pytest.raises(ValueError):
        mh.load_config(p_bad)


def test_root_finding_all_vertices_regime():
    cfg = mh.default_config(
        "root_finding", n_target=1000, trials=10, epsilon_grid=[1e-12], master_seed=1
    )
    table = mh.run_root_finding(cfg)
    row = dict(zip(table.header, table.rows[0]))
    assert row["success_rate"] == 1.0
    assert row["mean_running_max"] == 1000.0
    assert row["failures"] == 0


def test_root_finding_huge_epsilon_regime():
    cfg = mh.default_config(
        "root_finding", n_target=1000, trials=30, epsilon_grid=[0.9], master_seed=2
    )
    row = dict(zip(*[mh.run_root_finding(cfg).header, mh.run_root_finding(cfg).rows[0]]))
    assert row["success_rate"] < 0.5
    assert row["mean_size"] < 3.0


def test_reproducibility_and_thread_invariance():
    base = dict(n_target=4000, trials=12, epsilon_grid=[0.25, 0.125, 0.0625, 0.03125],
                master_seed=77)
    t1 = mh.run_epsilon_sweep(mh.default_config("epsilon_sweep", thread_count=1, **base))
    t2 = mh.run_epsilon_sweep(mh.default_config("epsilon_sweep", thread_count=1, **base))
    t4 = mh.run_epsilon_sweep(mh.default_config("epsilon_sweep", thread_count=4, **base))
    assert t1.rows == t2.rows == t4.rows
    assert t1.summary == t2.summary == t4.summary


def test_trial_seeds_differ_across_cells():
    # distinct trials/epsilons must not reuse trees: success column would
    # otherwise be perfectly correlated across the grid
    cfg = mh.default_config("root_finding", n_target=64, trials=40,
                            epsilon_grid=[0.5, 0.25], master_seed=5)
    table = mh.run_root_finding(cfg)
    sizes = [r[table.header.index("mean_size")] for r in table.rows]
    assert sizes[0] != sizes[1]


def test_csv_and_json_outputs(tmp_path):
    cfg = mh.default_config("epsilon_sweep", n_target=2000, trials=10,
                            epsilon_grid=[0.2, 0.1, 0.05, 0.025], master_seed=3)
    table = mh.run_epsilon_sweep(cfg)
    csv_path = tmp_path / "sweep.csv"
    table.to_csv(csv_path)
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == mh.ROOT_CSV_HEADER
    assert len(rows) == 1 + 4
    # full float round-trip through the CSV
    assert float(rows[1][rows[0].index("mean_running_max")]) == table.rows[0][
        table.header.index("mean_running_max")
    ]
    payload = json.loads(table.summary_json())
    assert payload["metadata"]["master_seed"] == 3
    assert "size_slope" in payload["summary"]
    assert len(payload["rows"]) == 4


def test_sweep_requires_four_points():
    cfg = mh.default_config("epsilon_sweep", n_target=100, trials=2,
                            epsilon_grid=[0.2, 0.1], master_seed=1)
    with pytest.raises(ValueError):
        mh.run_epsilon_sweep(cfg)


def test_sweep_slope_sanity_small_scale():
    cfg = mh.default_config(
        "epsilon_sweep", n_target=30_000, trials=48,
        epsilon_grid=[2.0**-k for k in range(3, 7)], master_seed=20250810,
        thread_count=2,
    )
    table = mh.run_epsilon_sweep(cfg)
    assert 0.7 < table.summary["size_slope"] < 1.4
    if table.summary.get("failure_slope") is not None:
        assert table.summary["failure_slope"] > 0.3


def test_limit_law_check_small_scale():
    cfg = mh.default_config(
        "limit_law_check", n_target=20_000, trials=1200, master_seed=6,
        thread_count=2, reference_draws=50_000, sample_dump_cap=5_000,
        degree_indices=[1, 10],
    )
    table = mh.run_limit_law_check(cfg)
    by_check = {r[0]: dict(zip(table.header, r)) for r in table.rows}
    # noise floor here is ~1.2/sqrt(1200) ~ 0.035; generous cap proves sanity
    assert by_check["d1_given_eve_first"]["ks_stat"] < 0.06
    assert by_check["d2_given_eve_first"]["ks_stat"] < 0.06
    assert by_check["d1_unconditional"]["ks_stat"] < 0.06
    for name in ("sampler_beta_1_2", "sampler_gg_5_2"):
        assert by_check[name]["ks_stat"] < 0.03
    # martingale column: empirical mean within 3 se of 1/(alpha_i sqrt(pi))
    for check in ("d1_unconditional", "d10_unconditional"):
        row = by_check[check]
        assert abs(row["emp_mean"] - row["martingale_mean"]) < 3 * row["emp_se"] + 1e-9
    samples = table.samples
    assert len(samples) > 0 and all(len(s) == 4 for s in samples)


def test_deviation_check_structure():
    cfg = mh.default_config(
        "deviation_check", n_target=5_000, trials=400, master_seed=8, thread_count=2,
        deviation_i_grid=[1, 4], deviation_a_grid=[1.0, 2.0, 8.0, 27.0],
    )
    table = mh.run_deviation_check(cfg)
    assert len(table.rows) == 2 * 4
    rows = [dict(zip(table.header, r)) for r in table.rows]
    for i in (1, 4):
        tails = [r["tail"] for r in rows if r["i"] == i]
        assert all(a >= b for a, b in zip(tails, tails[1:]))  # non-increasing in A
    # A=1 threshold is ~typical scale: must see events; A=27 must be censored here
    assert rows[0]["events"] > 0
    big_a = [r for r in rows if r["A"] == 27.0]
    assert all(r["censored"] for r in big_a)
    assert all(r["neg_log_tail"] == "" for r in big_a)
    assert set(table.summary["per_index"].keys()) == {"1", "4"}


def test_joint_bound_check_agreement():
    cfg = mh.default_config("joint_bound_check", master_seed=10, mc_draws=2_000_000)
    table = mh.run_joint_bound_check(cfg)
    cols = {n: i for i, n in enumerate(table.header)}
    assert len(table.rows) == 4 * 2
    for row in table.rows:
        assert abs(row[cols["z_score"]]) <= 3.5
    assert all(v < 2.0 for v in table.summary["worst_ratio_step"].values())
    powers = {(r[0], r[1]): r[cols["power"]] for r in table.rows}
    assert powers[(1.0, 0.5)] == 2.0 and powers[(0.5, 1.0)] == 2.0
    assert powers[(1.0, 0.0)] == 1.0 and powers[(0.5, 0.5)] == 1.0


def test_run_experiment_dispatch():
    cfg = mh.default_config("root_finding", n_target=100, trials=3,
                            epsilon_grid=[0.5], master_seed=4)
    assert mh.run_experiment(cfg).experiment == "root_finding"


# -- micro-scale brute force -----------------------------------------------------

def test_micro_exact_values_are_rational_and_sane():
    p05 = mh.micro_exact_root_probability(0.05)
    p20 = mh.micro_exact_root_probability(0.2)
    assert p05 == Fraction(1)  # every 5-vertex history keeps the root at eps=0.05
    assert p20 == Fraction(2, 3)
    # the enumeration sums to probability one over histories
    total = mh.micro_exact_root_probability(1e-12)
    assert total == Fraction(1)


def test_micro_mc_matches_exact_enumeration():
    eps = [0.05, 0.2]
    trials = 400_000
    est = mh.micro_mc_root_probability(eps, trials, master_seed=20250810)
    for e, p_hat in zip(eps, est):
        exact = float(mh.micro_exact_root_probability(e))
        se = math.sqrt(exact * (1 - exact) / trials)
        assert abs(p_hat - exact) <= 3 * se + 1e-12, (e, p_hat, exact)


def test_doubling_trials_shrinks_stderr_by_root_two():
    base = dict(n_target=3000, epsilon_grid=[0.08], thread_count=2)
    t1 = mh.run_root_finding(mh.default_config("root_finding", trials=300,
                                               master_seed=50, **base))
    t2 = mh.run_root_finding(mh.default_config("root_finding", trials=600,
                                               master_seed=51, **base))
    i = mh.ROOT_CSV_HEADER.index("success_se")
    ratio = t1.rows[0][i] / t2.rows[0][i]
    assert abs(ratio - math.sqrt(2)) / math.sqrt(2) < 0.20


def test_ols_slope_matches_polyfit():
    rng = np.random.default_rng(2)
    x = rng.normal(size=30)
    y = 2.5 * x - 1 + rng.normal(scale=0.1, size=30)
    slope, intercept, se = mh.ols_slope(x, y)
    ref = np.polyfit(x, y, 1)
    assert slope == pytest.approx(ref[0], rel=1e-12)
    assert intercept == pytest.approx(ref[1], rel=1e-12)
    assert se > 0
