# Quick tour of the built-in study scenarios.
#
# Every scenario is a pure function of its keyword arguments: same inputs,
# byte-identical CSV and summary. The CLI (`prestigesim run <name>`) wraps
# these; here we call them directly with small sizes so the tour stays fast.

from prestigesim import run_scenario, run_theorem_checks, scenario_names

print("registered scenarios:")
for name in scenario_names():
    print(f"  - {name}")
print()

result = run_scenario("decay", blocks=60, spike_up_at=20, spike_down_at=40)
print("decay study, 60 blocks, +200 spike at block 20 removed at 40:")
label = "C100_d0.05"
for key in ("static_value", "final_prestige", "final_gap"):
    print(f"  {label}.{key} = {result.summary[f'{label}.{key}']:.4f}")
print()

result = run_scenario("gain_vs_decay", decay_grid=(0.05, 0.3, 0.9), blocks=300)
print("surplus sustained by a 1-prestige-per-block drip, 300 blocks:")
for decay, injection, total, final, _mean in result.rows:
    if injection == 1.0:
        print(f"  d={decay}: total surplus {total:>7.1f}, final surplus {final:.2f}")
print()

checks = run_theorem_checks(trials=150, seed=9)
print(f"mechanism properties over 150 random trials: all_passed={checks.summary['all_passed']}")
for prop, _trials, violation, tol, passed in checks.rows:
    print(f"  {prop:<32} worst {violation:.2e} (tol {tol:.0e}) {'ok' if passed else 'FAIL'}")
