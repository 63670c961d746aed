"""Mining: how acknowledged work turns into retained prestige.

A completed task moves a prestige fee x from the beneficiary to the
contributor side. Two modes are supported:

* simple mining: the contributor keeps the whole fee.

* progressive mining: contributors sit in a distribution DAG (a forest of
  single-parent trees rooted at original content sources). A node keeps only
  the fraction P / (P + Pb) of what reaches it, where Pb is its branch power:
  the configured multiplier b times the summed (non-negative) prestige of all
  its ancestors up to the root. The remainder climbs the branch, each ancestor
  applying its own fraction, and the root absorbs whatever is left, so every
  transferred unit lands somewhere on the path.

Nodes with zero or negative prestige retain nothing and pass everything
upstream; ancestors with negative prestige contribute zero to branch power.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass, replace
from typing import Iterator

from .core import Account
from .errors import (
    DuplicateNode,
    NotInDag,
    UnknownAccount,
    UnknownNode,
    UnknownParent,
)


class MiningMode(str, enum.Enum):
    SIMPLE = "simple"
    PROGRESSIVE = "progressive"

    @classmethod
    def parse(cls, label: str | MiningMode) -> "MiningMode":
        if isinstance(label, MiningMode):
            return label
        try:
            return cls(label.lower())
        except ValueError:
            raise ValueError(f"unknown mining mode {label!r}; expected 'simple' or 'progressive'") from None


class MiningDag:
    """Forest of distribution trees; every node has at most one parent.

    Mutation happens in place (attach/add_root return self for chaining) and
    assumes exclusive access; no two block-processing steps may grow the same
    DAG concurrently. Acyclicity holds by construction because only brand-new
    node ids can be attached.
    """

    __slots__ = ("_parent", "_children")

    def __init__(self) -> None:
        self._parent: dict[str, str | None] = {}
        self._children: dict[str, list[str]] = {}

    # -- growth --------------------------------------------------------------

    def add_root(self, node: str) -> "MiningDag":
        if node in self._parent:
            raise DuplicateNode(node)
        self._parent[node] = None
        self._children[node] = []
        return self

    def attach(self, parent: str, child: str) -> "MiningDag":
        if parent not in self._parent:
            raise UnknownParent(parent)
        if child in self._parent:
            raise DuplicateNode(child)
        self._parent[child] = parent
        self._children[child] = []
        self._children[parent].append(child)
        return self

    # -- queries ---------------------------------------------------------------

    def __contains__(self, node: object) -> bool:
        return node in self._parent

    def __len__(self) -> int:
        return len(self._parent)

    @property
    def nodes(self) -> Iterator[str]:
        return iter(self._parent)

    @property
    def roots(self) -> tuple[str, ...]:
        return tuple(n for n, p in self._parent.items() if p is None)

    def is_root(self, node: str) -> bool:
        return self.parent(node) is None

    def parent(self, node: str) -> str | None:
        try:
            return self._parent[node]
        except KeyError:
            raise UnknownNode(node) from None

    def children(self, node: str) -> tuple[str, ...]:
        if node not in self._parent:
            raise UnknownNode(node)
        return tuple(self._children[node])

    def path_to_root(self, node: str) -> list[str]:
        """Node first, root last."""
        path = [node]
        current = self.parent(node)
        while current is not None:
            path.append(current)
            current = self._parent[current]
        return path

    def ancestors(self, node: str) -> list[str]:
        return self.path_to_root(node)[1:]

    def depth(self, node: str) -> int:
        """Edges between node and its root; roots have depth 0."""
        return len(self.path_to_root(node)) - 1

    def root_of(self, node: str) -> str:
        return self.path_to_root(node)[-1]

    def copy(self) -> "MiningDag":
        dup = MiningDag()
        dup._parent = dict(self._parent)
        dup._children = {k: list(v) for k, v in self._children.items()}
        return dup


def attach_node(dag: MiningDag, parent: str, child: str) -> MiningDag:
    """Grow the DAG under an existing parent; returns the mutated DAG."""
    return dag.attach(parent, child)


@dataclass(frozen=True)
class TransferRecord:
    """Audit record of one applied prestige transfer."""

    beneficiary: str
    contributor: str
    amount: float
    block: int
    mode: MiningMode
    retained_by: tuple[tuple[str, float], ...]


class PrestigeView(Mapping):
    """Read-only id -> prestige view over an account map (no copying)."""

    __slots__ = ("_accounts",)

    def __init__(self, accounts: Mapping[str, Account]) -> None:
        self._accounts = accounts

    def __getitem__(self, node: str) -> float:
        return self._accounts[node].prestige

    def __iter__(self):
        return iter(self._accounts)

    def __len__(self) -> int:
        return len(self._accounts)


# --- retention ----------------------------------------------------------------

def retain_simple(x: float) -> float:
    """Simple mining keeps the full fee."""
    if x < 0:
        raise ValueError(f"transfer amount must be >= 0, got {x}")
    return x


def retain_progressive(x: float, prestige: float, branch_power_value: float) -> float:
    """Fraction of x kept by a node with the given prestige and branch power.

    Clamps: non-positive prestige keeps nothing; with zero branch power a
    positive-prestige node keeps everything.
    """
    if x < 0:
        raise ValueError(f"transfer amount must be >= 0, got {x}")
    if prestige <= 0.0:
        return 0.0
    bp = max(branch_power_value, 0.0)
    if bp == 0.0:
        return x
    # multiply-then-divide can overshoot x by an ulp when bp is negligible
    # next to prestige; never hand back more than came in
    return min(x, x * prestige / (prestige + bp))


def branch_power(dag: MiningDag, node: str, prestige_of: Mapping[str, float], b: float) -> float:
    """b times the clamped prestige mass of everything above the node.

    Roots have no ancestors and therefore zero branch power.
    """
    if node not in dag:
        raise UnknownNode(node)
    total = 0.0
    for ancestor in dag.ancestors(node):
        total += max(prestige_of[ancestor], 0.0)
    return b * total


def propagate_upstream(
    dag: MiningDag,
    contributor: str,
    x: float,
    prestige_of: Mapping[str, float],
    b: float,
) -> list[tuple[str, float]]:
    """Split a fee x along the contributor's path to the root.

    Returns (node, amount) pairs in walk order, contributor first and root
    last. Every intermediate node keeps its progressive fraction of the
    residual reaching it; the root absorbs the final residual outright, so the
    amounts are non-negative and sum to exactly x (up to float rounding).
    """
    if x < 0:
        raise ValueError(f"transfer amount must be >= 0, got {x}")
    if contributor not in dag:
        raise UnknownNode(contributor)

    path = dag.path_to_root(contributor)
    clamped = [max(prestige_of[n], 0.0) for n in path]

    # Suffix sums give each node's ancestor prestige mass in one pass.
    above = [0.0] * len(path)
    running = 0.0
    for i in range(len(path) - 1, -1, -1):
        above[i] = running
        running += clamped[i]

    shares: list[tuple[str, float]] = []
    residual = x
    for i, node in enumerate(path[:-1]):
        kept = retain_progressive(residual, prestige_of[node], b * above[i])
        shares.append((node, kept))
        residual -= kept
    shares.append((path[-1], residual))
    return shares


# --- applying transfers ---------------------------------------------------------

def apply_transfer(
    accounts: Mapping[str, Account],
    dag: MiningDag,
    beneficiary: str,
    contributor: str,
    x: float,
    mode: MiningMode | str,
    *,
    b: float = 0.0,
    block: int = 0,
) -> tuple[dict[str, Account], TransferRecord]:
    """Debit the beneficiary by x and credit the contributor side.

    Simple mode credits the contributor in full; progressive mode splits x
    along the contributor's branch (requires the contributor to be in the
    DAG). Returns a new account map plus an audit record; the beneficiary may
    be driven below zero prestige.
    """
    mode = MiningMode.parse(mode)
    if beneficiary not in accounts:
        raise UnknownAccount(beneficiary)
    if contributor not in accounts:
        raise UnknownAccount(contributor)

    if mode is MiningMode.SIMPLE:
        shares = [(contributor, retain_simple(x))]
    else:
        if contributor not in dag:
            raise NotInDag(contributor)
        shares = propagate_upstream(dag, contributor, x, PrestigeView(accounts), b)
        for node, _ in shares:
            if node not in accounts:
                raise UnknownAccount(node)

    updated = dict(accounts)
    benef = updated[beneficiary]
    updated[beneficiary] = replace(benef, prestige=benef.prestige - x)
    for node, amount in shares:
        if amount == 0.0:
            continue
        acct = updated[node]
        updated[node] = replace(acct, prestige=acct.prestige + amount)

    record = TransferRecord(
        beneficiary=beneficiary,
        contributor=contributor,
        amount=float(x),
        block=block,
        mode=mode,
        retained_by=tuple((n, float(a)) for n, a in shares),
    )
    return updated, record
