"""A tiny chain, block by block.

Three accounts mint blocks under prestige-weighted election, a buyer posts an
acknowledgment crediting a seeder's work (the seeder pays the claim fee, the
next minter collects it), a motivator escrows bonus payouts, and at the end
the whole state round-trips through the text snapshot format.
"""

from prestigesim import (
    Account,
    ChainState,
    SystemParams,
    advance_block,
    keygen,
    load_snapshot,
    make_simple_ack,
    register_motivator_reward,
    save_snapshot,
    setup,
    submit_ack,
)

state = ChainState.genesis(
    [
        Account(id="seeder", coins=40),
        Account(id="buyer", coins=60),
        Account(id="idler", coins=25),
    ],
    SystemParams(decay=0.2),
    rng_seed=11,
    subsidy=5,
    ack_fee=2,
)

# genesis derives each account's key pair from its id, so anyone can re-derive
keys = {uid: keygen(setup(128), uid) for uid in state.accounts}

print(f"{'h':>2}  {'minter':<7} {'seeder P':>9} {'buyer P':>8} {'idler P':>8}  {'coins s/b/i':>12}")


def show(st, minter="-"):
    a = st.accounts
    coins = f"{a['seeder'].coins}/{a['buyer'].coins}/{a['idler'].coins}"
    print(
        f"{st.height:>2}  {minter:<7} {a['seeder'].prestige:>9.2f}"
        f" {a['buyer'].prestige:>8.2f} {a['idler'].prestige:>8.2f}  {coins:>12}"
    )


show(state)
for h in range(1, 7):
    if h == 2:
        # the buyer vouches for 30 prestige of seeding work
        ack = make_simple_ack(keys["buyer"], h.to_bytes(32, "big"), keys["seeder"].vk, 30)
        state = submit_ack(state, ack, beneficiary="buyer")
    if h == 4:
        # the buyer escrows 9 coins, paid 3 per block to the next three minters
        state = register_motivator_reward(state, "buyer", coins_per_block=3, duration_blocks=3)
    state, block = advance_block(state)
    show(state, block.minter)

print()
print(f"escrow left: {state.escrowed_coins()}, fees pending: {state.fees_pending}")
text = save_snapshot(state)
print(f"snapshot is {len(text.splitlines())} lines; round-trips: {save_snapshot(load_snapshot(text)) == text}")
