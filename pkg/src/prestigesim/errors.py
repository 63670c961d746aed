"""Exception types shared across the simulator."""

from __future__ import annotations


class PrestigeError(Exception):
    """Base class for all simulator-specific errors."""


# --- distribution DAG -------------------------------------------------------

class UnknownNode(PrestigeError, KeyError):
    """Referenced node is not part of the DAG."""


class UnknownParent(UnknownNode):
    """Attach target does not exist in the DAG."""


class DuplicateNode(PrestigeError, ValueError):
    """Node id already present in the DAG."""


class NotInDag(PrestigeError):
    """Progressive transfer names a contributor outside the DAG."""


# --- accounts / chain -------------------------------------------------------

class UnknownAccount(PrestigeError, KeyError):
    """Referenced account id or verification key has no account."""


class NoAccounts(PrestigeError):
    """Operation requires at least one account."""


class InvalidSignature(PrestigeError):
    """Acknowledgment failed signature or path verification."""


class DuplicateTask(PrestigeError):
    """Every task id in the acknowledgment was already processed."""


class InsufficientFunds(PrestigeError):
    """Account cannot cover the requested coin debit."""


# --- acknowledgments --------------------------------------------------------

class AmountOverflow(PrestigeError, ValueError):
    """Acknowledged amount does not fit the 4-byte unsigned wire field."""


class InvalidPrev(PrestigeError):
    """Path extension starts from an acknowledgment that does not verify."""


class DuplicateHop(PrestigeError):
    """Path extension repeats a hop message already in the path."""


class SnapshotError(PrestigeError, ValueError):
    """State snapshot text is malformed."""
