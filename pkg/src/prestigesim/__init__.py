"""prestigesim: deterministic simulator for a prestige-backed reward system.

The package models an economy where completed useful work is acknowledged
with signed receipts, acknowledged work moves a decaying reputation score
(prestige) between accounts, and block minting rights are drawn in
proportion to prestige.

Modules
-------
core        prestige regeneration/decay dynamics and account state
mining      distribution DAGs, simple and progressive fee retention
acks        composite-signature acknowledgments and wire formats
chain       block state machine: election, rewards, replay protection
scenarios   reproducible experiments with CSV/summary outputs
cli         command-line front end (run / check / step / list)
"""

from .core import Account, SystemParams, convergence_gap, inject_prestige, static_value, step_account
from .errors import (
    AmountOverflow,
    DuplicateHop,
    DuplicateNode,
    DuplicateTask,
    InsufficientFunds,
    InvalidPrev,
    InvalidSignature,
    NoAccounts,
    NotInDag,
    PrestigeError,
    SnapshotError,
    UnknownAccount,
    UnknownNode,
    UnknownParent,
)
from .mining import (
    MiningDag,
    MiningMode,
    PrestigeView,
    TransferRecord,
    apply_transfer,
    attach_node,
    branch_power,
    propagate_upstream,
    retain_progressive,
    retain_simple,
)
from .acks import (
    AMOUNT_MAX,
    DEFAULT_SCHEME,
    CompositeScheme,
    HashXorScheme,
    KeyPair,
    MessageDescriptor,
    PATH_ACK_BASE_BYTES,
    PATH_HOP_BYTES,
    PathAck,
    PathHop,
    SIMPLE_ACK_BYTES,
    SchemeParams,
    SimpleAck,
    compose,
    encode_ack_message,
    extend_path_ack,
    keygen,
    make_root_ack,
    make_simple_ack,
    setup,
    sign,
    verify,
    verify_path_ack,
    verify_simple_ack,
)
from .chain import (
    Block,
    ChainState,
    RewardSchedule,
    advance_block,
    elect_minter,
    load_snapshot,
    register_motivator_reward,
    save_snapshot,
    submit_ack,
)
from .scenarios import (
    SCENARIOS,
    ScenarioResult,
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

__version__ = "0.1.0"

__all__ = [
    "Account",
    "SystemParams",
    "step_account",
    "static_value",
    "inject_prestige",
    "convergence_gap",
    "MiningDag",
    "MiningMode",
    "PrestigeView",
    "TransferRecord",
    "attach_node",
    "branch_power",
    "retain_simple",
    "retain_progressive",
    "propagate_upstream",
    "apply_transfer",
    "KeyPair",
    "MessageDescriptor",
    "SchemeParams",
    "CompositeScheme",
    "HashXorScheme",
    "DEFAULT_SCHEME",
    "setup",
    "keygen",
    "sign",
    "verify",
    "compose",
    "SimpleAck",
    "PathAck",
    "PathHop",
    "encode_ack_message",
    "make_simple_ack",
    "verify_simple_ack",
    "make_root_ack",
    "extend_path_ack",
    "verify_path_ack",
    "SIMPLE_ACK_BYTES",
    "PATH_HOP_BYTES",
    "PATH_ACK_BASE_BYTES",
    "AMOUNT_MAX",
    "ChainState",
    "Block",
    "RewardSchedule",
    "advance_block",
    "elect_minter",
    "submit_ack",
    "register_motivator_reward",
    "save_snapshot",
    "load_snapshot",
    "PrestigeError",
    "UnknownNode",
    "UnknownParent",
    "DuplicateNode",
    "NotInDag",
    "UnknownAccount",
    "NoAccounts",
    "InvalidSignature",
    "DuplicateTask",
    "InsufficientFunds",
    "AmountOverflow",
    "InvalidPrev",
    "DuplicateHop",
    "SnapshotError",
    "SCENARIOS",
    "ScenarioResult",
    "run_scenario",
    "scenario_names",
    "run_decay_study",
    "run_gain_vs_decay",
    "run_dag_study",
    "run_global",
    "run_tradeoff",
    "run_file_distribution",
    "run_theorem_checks",
]
