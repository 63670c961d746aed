"""Watch a single account's prestige converge to its static value.

An account holding C coins and decaying at rate d settles at S = C/d no
matter where it starts. The gap to S shrinks by a factor of (1-d) per block,
so the whole trajectory is predictable in closed form.
"""

from prestigesim import Account, SystemParams, convergence_gap, inject_prestige, static_value, step_account

params = SystemParams(decay=0.05)
acct = Account(id="hodler", coins=100)
target = static_value(acct.coins, params)
print(f"coins={acct.coins}, decay={params.decay} -> static value {target:.1f}")
print()
print(f"{'block':>5}  {'prestige':>10}  {'predicted gap':>13}")
for t in range(0, 121):
    if t % 20 == 0:
        predicted = convergence_gap(0.0, acct.coins, params, t)
        print(f"{t:>5}  {acct.prestige:>10.3f}  {predicted:>13.3f}")
    acct = step_account(acct, params)

# A windfall (airdrop, bribe, bug) fades at the same geometric rate.
acct = inject_prestige(acct, 5000.0)
print()
print(f"after a +5000 prestige spike: {acct.prestige:.1f}")
for t in range(1, 201):
    acct = step_account(acct, params)
print(f"200 blocks later:             {acct.prestige:.1f}  (static value {target:.1f})")
