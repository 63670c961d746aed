"""Scenario runners: frozen verdicts, independent oracles, determinism."""

import json

import pytest

import prestigesim.mining
from prestigesim import (
    SCENARIOS,
    run_dag_study,
    run_decay_study,
    run_file_distribution,
    run_gain_vs_decay,
    run_global,
    run_scenario,
    run_theorem_checks,
    run_tradeoff,
    scenario_names,
)
from prestigesim.acks import SIMPLE_ACK_BYTES


# --- registry -----------------------------------------------------------------

def test_registry_lists_every_runner():
    assert scenario_names() == tuple(SCENARIOS)
    assert set(scenario_names()) == {
        "decay", "gain_vs_decay", "dag_study", "global",
        "tradeoff", "file_distribution", "theorem_checks",
    }


def test_run_scenario_dispatch_and_unknown():
    result = run_scenario("decay", blocks=10, spike_up_at=3, spike_down_at=6)
    assert result.name == "decay"
    with pytest.raises(KeyError, match="gain_vs_decay"):
        run_scenario("does_not_exist")


# --- decay study -----------------------------------------------------------------

def decay_oracle(coins, d, blocks, spike, up, down):
    """Replay the stated recurrence directly: step, then inject at the spikes."""
    p = 0.0
    pre_drop = None
    for t in range(1, blocks + 1):
        p = coins + (1.0 - d) * p
        if t == up:
            p += spike
        elif t == down:
            p -= spike
        if t == down - 1:
            pre_drop = p
    return p, pre_drop


def test_decay_study_matches_recurrence_oracle():
    result = run_decay_study(seed=0)
    for coins, d in ((100, 0.05), (50, 0.05), (100, 0.1), (100, 0.3)):
        label = f"C{coins}_d{d}"
        final, pre_drop = decay_oracle(coins, d, 200, 200.0, 100, 150)
        assert result.summary[f"{label}.final_prestige"] == pytest.approx(final, abs=1e-9)
        assert result.summary[f"{label}.pre_drop_prestige"] == pytest.approx(pre_drop, abs=1e-9)
        assert result.summary[f"{label}.static_value"] == coins / d
        # the runner's own closed-form prediction agrees with the simulation
        assert result.summary[f"{label}.pre_drop_predicted"] == pytest.approx(
            pre_drop, abs=1e-6
        )


def test_decay_study_fast_decay_forgets_spike():
    result = run_decay_study(seed=0)
    # d=0.3 has shed nearly the whole spike by block 200; d=0.05 still carries some
    assert abs(result.summary["C100_d0.3.final_gap"]) < 1e-4
    assert result.summary["C100_d0.05.pre_drop_surplus"] > result.summary[
        "C100_d0.3.pre_drop_surplus"
    ]
    # near-plateau before the drop for the fastest decay: spike echo ~ keep^49
    assert result.summary["C100_d0.3.pre_drop_surplus"] == pytest.approx(
        200.0 * 0.7**49 - (100 / 0.3) * 0.7**149, abs=1e-6
    )


def test_decay_study_rows_shape():
    result = run_decay_study(seed=0, blocks=20, spike_up_at=5, spike_down_at=10)
    assert result.columns == ("block", "user_id", "prestige", "coins")
    assert len(result.rows) == 20 * 4
    assert {r[1] for r in result.rows} == {
        "C100_d0.05", "C50_d0.05", "C100_d0.1", "C100_d0.3"
    }


def test_decay_study_validation():
    with pytest.raises(ValueError, match="distinct"):
        run_decay_study(users=((100, 0.05), (100, 0.05)))
    with pytest.raises(ValueError, match="spike blocks"):
        run_decay_study(blocks=50, spike_up_at=40, spike_down_at=30)
    with pytest.raises(ValueError, match="spike blocks"):
        run_decay_study(blocks=50, spike_up_at=0, spike_down_at=30)


# --- gain vs decay ---------------------------------------------------------------

def test_gain_vs_decay_matches_closed_form():
    blocks = 2000
    result = run_gain_vs_decay(blocks=blocks, decay_grid=(0.01, 0.2, 0.99), injections=(0.0, 1.0, 2.0))
    by_pair = {(r[0], r[1]): r for r in result.rows}
    for d in (0.01, 0.2, 0.99):
        keep = 1.0 - d
        for a in (0.0, 1.0, 2.0):
            # surplus_t = a (1 - keep^t) / d, summed over t = 1..T
            total = (a / d) * (blocks - keep * (1.0 - keep**blocks) / d)
            final = a * (1.0 - keep**blocks) / d
            row = by_pair[(d, a)]
            assert row[2] == pytest.approx(total, rel=1e-9, abs=1e-9)
            assert row[3] == pytest.approx(final, rel=1e-9, abs=1e-12)
            assert row[4] == pytest.approx(total / blocks, rel=1e-9, abs=1e-12)


def test_gain_vs_decay_verdicts():
    result = run_gain_vs_decay()
    assert result.summary["zero_injection_zero_surplus"] is True
    assert result.summary["linearity_max_rel_dev"] == 0.0
    assert result.summary["surplus_decreasing_in_decay"] is True


# --- dag study -------------------------------------------------------------------
# seed 42 is the pinned evaluation seed; the statistics below were measured
# once and frozen, with comfortable margins to the claims they support.

@pytest.fixture(scope="module")
def dag_result():
    return run_dag_study(seed=42)


def test_dag_study_simple_gain_tracks_tasks_not_position(dag_result):
    s = dag_result.summary
    assert s["simple.gain_vs_tasks_r2"] == 1.0  # gain == fee * tasks exactly
    # distance tells you nothing: slope is flat relative to its own noise
    assert abs(s["simple.gain_vs_distance_slope"]) <= 2.0 * s["simple.gain_vs_distance_slope_stderr"]
    assert abs(s["simple.gain_vs_distance_spearman"]) < 0.1
    assert abs(s["simple.gain_vs_base_spearman"]) < 0.1


def test_dag_study_progressive_rewards_proximity_and_standing(dag_result):
    s = dag_result.summary
    assert s["progressive.gain_vs_tasks_r2"] > 0.95
    assert s["progressive.gain_vs_distance_spearman"] < -0.2  # closer to root, larger gain
    assert s["progressive.gain_vs_distance_slope"] < 0.0
    assert s["progressive.gain_vs_base_spearman"] > 0.2  # standing helps retention
    assert s["progressive.max_retained_at_zero_base"] == 0.0


def test_dag_study_ack_volume_accounting(dag_result):
    s = dag_result.summary
    assert s["ack_bytes_per_task"] == SIMPLE_ACK_BYTES * s["n_tasks"]
    assert s["ack_bytes_per_path"] > 0
    # path receipts only upload once per leaf; for these trees that is far
    # cheaper than one receipt per task
    assert s["ack_bytes_per_path"] < s["ack_bytes_per_task"]


def test_dag_study_rows_cover_both_modes(dag_result):
    modes = {r[0] for r in dag_result.rows}
    assert modes == {"simple", "progressive"}
    assert len(dag_result.rows) == 2 * s_users(dag_result)


def s_users(result):
    return result.summary["n_users"]


def test_dag_study_gain_decomposition(dag_result):
    cols = dag_result.columns
    i_ret, i_abs, i_gain = cols.index("retained"), cols.index("absorbed"), cols.index("gain")
    for row in dag_result.rows[:500]:
        assert row[i_gain] == pytest.approx(row[i_ret] + row[i_abs], abs=1e-9)
        assert row[i_ret] >= 0.0 and row[i_abs] >= 0.0


# --- global economy ------------------------------------------------------------------

def test_global_simple_work_beats_wealth():
    result = run_global(seed=0, mode="simple")
    s = result.summary
    # equal work probability leaves rich and poor within a few percent
    assert s["same_work_rel_gap.active"] < 0.1
    assert s["same_work_rel_gap.lazy"] < 0.1
    # working more lifts you further above your static value
    assert s["poor_active.surplus_trimmed"] > s["poor_lazy.surplus_trimmed"]
    assert s["rich_active.surplus_trimmed"] > s["rich_lazy.surplus_trimmed"]
    assert s["ordering_active_beats_rich_lazy"] is True


def test_global_progressive_orderings():
    s = run_global(seed=0, mode="progressive").summary
    assert s["ordering_rich_active_top"] is True
    assert s["ordering_active_beats_rich_lazy"] is True
    assert s["rich_active.surplus_trimmed"] > s["poor_active.surplus_trimmed"]


def test_global_idle_cohort_sits_at_static():
    result = run_global(
        seed=1, blocks=400, mode="simple", cohorts=(("idle", 50, 0.0, 10),)
    )
    assert abs(result.summary["idle.surplus_trimmed"]) < 1e-2
    assert result.summary["idle.static_value"] == 1000.0


def test_global_validation():
    with pytest.raises(ValueError):
        run_global(mode="warp")
    with pytest.raises(ValueError):
        run_global(cohorts=())


# --- decay tradeoff ------------------------------------------------------------------

@pytest.fixture(scope="module")
def tradeoff_result():
    return run_tradeoff(seed=0)


def test_tradeoff_endpoints(tradeoff_result):
    s = tradeoff_result.summary
    assert s["small_decay_rewards_work"] is True
    assert s["large_decay_rewards_wealth"] is True
    assert s["winner.d0.01"] == "poor_active"
    assert s["winner.d0.9"] == "rich_lazy"


def test_tradeoff_crossover_inside_grid(tradeoff_result):
    s = tradeoff_result.summary
    assert s["crossover_decay"] in (0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)
    assert 0.01 < s["crossover_decay"] <= 0.9
    assert s["richer_never_behind_at_same_work"] is True


def test_tradeoff_rows_consistent(tradeoff_result):
    cols = tradeoff_result.columns
    i_sum = cols.index("prestige_sum")
    i_mean = cols.index("prestige_mean_per_block")
    i_members = cols.index("members")
    blocks = tradeoff_result.summary["blocks"]
    for row in tradeoff_result.rows:
        # the mean is per member per block
        assert row[i_mean] == pytest.approx(row[i_sum] / (blocks * row[i_members]), rel=1e-12)


# --- file distribution ----------------------------------------------------------------

@pytest.fixture(scope="module")
def distribution_result():
    return run_file_distribution()  # scale=1000 defaults


def test_distribution_budget_is_exact(distribution_result):
    s = distribution_result.summary
    assert s["budget_exact"] is True
    assert s["rewards_sum_cents"] == s["budget_cents"] == 470_000_000 // 1000
    # integer rewards, recomputed from the rows
    rewards = [row[-1] for row in distribution_result.rows]
    assert all(isinstance(r, int) and r >= 0 for r in rewards)
    assert sum(rewards) == s["budget_cents"]


def test_distribution_reward_shape(distribution_result):
    s = distribution_result.summary
    assert 1000 <= s["top_reward_cents"] <= 10_000  # tens of dollars at the top
    assert 0.5 < s["fraction_paid"] <= 1.0
    assert 0 < s["typical_reward_cents"] < s["median_paid_reward_cents"] * 10
    assert s["creator_final_prestige"] > 0.0
    assert len(distribution_result.rows) == s["pool_size"]
    # one fixed-size receipt per join; with fanout-8 trees most members are
    # leaves whose path receipts re-upload the whole ancestor chain, so the
    # path total is the larger of the two here (unlike multi-task DAG studies)
    assert s["ack_bytes_per_task"] == SIMPLE_ACK_BYTES * s["n_tasks"]
    assert s["ack_bytes_per_path"] > 0


def test_distribution_gentle_parameter_shifts_stay_small():
    result = run_file_distribution(
        fee_grid=(270.0, 330.0), branch_grid=(0.4, 0.6)
    )
    assert result.summary["typical_reward_max_rel_shift"] < 0.05
    for f in (270.0, 330.0):
        for b in (0.4, 0.6):
            assert f"combo_f{f}_b{b}.typical_cents" in result.summary


# --- theorem checks ---------------------------------------------------------------------

def test_theorem_checks_all_pass():
    result = run_theorem_checks(seed=0, trials=200)
    assert result.summary["all_passed"] is True
    names = {row[0] for row in result.rows}
    assert names == {
        "split_trajectory_additive",
        "split_static_additive",
        "transfer_conservation",
        "split_never_retains_more",
        "collusion_never_beats_idle",
        "propagation_exact_and_nonnegative",
    }
    for row in result.rows:
        assert row[4] is True  # passed
        assert row[2] <= row[3]  # max_violation within tolerance


def test_theorem_checks_catch_a_corrupted_retention(monkeypatch):
    # Negative control: an over-retaining rule must trip at least one check.
    monkeypatch.setattr(
        prestigesim.mining,
        "retain_progressive",
        lambda x, prestige, bp: 1.01 * x if prestige > 0 else 0.0,
    )
    result = run_theorem_checks(seed=0, trials=200)
    assert result.summary["all_passed"] is False


# --- output contract ----------------------------------------------------------------------

def test_result_write_and_formats(tmp_path):
    result = run_decay_study(seed=5, blocks=12, spike_up_at=4, spike_down_at=8)
    csv_path, summary_path = result.write(tmp_path)
    assert csv_path.name == "decay.csv"
    assert summary_path.name == "decay_summary.txt"

    raw = csv_path.read_bytes()
    assert b"\r" not in raw  # LF endings on every platform
    lines = raw.decode().splitlines()
    assert lines[0] == "block,user_id,prestige,coins"
    assert len(lines) == 1 + len(result.rows)

    for line in summary_path.read_text().splitlines():
        key, _, value = line.partition(": ")
        assert key and value
        json.loads(value)  # every value is a JSON scalar


def test_summary_scalar_formatting():
    result = run_gain_vs_decay(blocks=10, decay_grid=(0.5,), injections=(0.0, 1.0, 2.0))
    text = result.summary_text()
    assert "zero_injection_zero_surplus: true" in text
    assert "blocks: 10" in text


@pytest.mark.parametrize(
    "runner,kwargs",
    [
        (run_decay_study, dict(seed=3, blocks=40, spike_up_at=10, spike_down_at=20)),
        (run_gain_vs_decay, dict(blocks=500, decay_grid=(0.05, 0.5), injections=(0.0, 1.0, 2.0))),
        (run_dag_study, dict(seed=1, n_users=200, n_trees=20)),
        (run_global, dict(seed=2, blocks=60, cohorts=(("a", 20, 0.1, 5), ("b", 40, 0.2, 5)))),
        (run_tradeoff, dict(seed=2, blocks=80, decay_grid=(0.05, 0.5))),
        (run_file_distribution, dict(seed=2, scale=200, episodes=2)),
        (run_theorem_checks, dict(seed=1, trials=50)),
    ],
)
def test_runs_are_deterministic(runner, kwargs):
    first = runner(**kwargs)
    second = runner(**kwargs)
    assert first.csv_text() == second.csv_text()
    assert first.summary_text() == second.summary_text()
