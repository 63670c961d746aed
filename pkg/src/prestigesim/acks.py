"""Acknowledgments: signed receipts that make work claims checkable.

Two wire formats are exchanged:

* ``SimpleAck`` (102 bytes): one beneficiary acknowledges one contributor.
  Layout: task_id (32) || contributor_vk (33) || amount (4, big-endian
  unsigned) || signature (33). The beneficiary signs the first three fields;
  verification therefore needs the beneficiary's verification key, which
  travels out of band (the chain looks it up in account state).

* ``PathAck`` (33 + 69*n bytes): a contributor's proof of membership in a
  distribution branch. Hop 0 is the branch root's self-signed genesis record;
  every later hop is appended by the node that just received the content,
  signed over (task_id || its own vk || amount it owes). Each hop verifies
  against the vk stored in that hop, so the whole path checks out from the
  bytes alone plus the expected root key. The composite signature is the
  composition of all hop signatures; removing, reordering descriptor entries
  or tampering any field breaks it.

The signature scheme is pluggable behind ``CompositeScheme``. The default
backend is a deterministic keyed-hash construction (sign = 33-byte hash bound
to the signer's public key and message, compose = bytewise XOR). It gives the
exact algebra the simulator needs (commutative, associative, order-free
composition; unions verify; subsets do not) but no real unforgeability, and
exists so the package stays dependency-free and reproducible. A pairing-based
aggregate backend can be slotted in behind the same five operations.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

from .errors import AmountOverflow, DuplicateHop, InvalidPrev

TASK_ID_BYTES = 32
VK_BYTES = 33
SIG_BYTES = 33
AMOUNT_BYTES = 4
AMOUNT_MAX = 2**32 - 1

SIMPLE_ACK_BYTES = TASK_ID_BYTES + VK_BYTES + AMOUNT_BYTES + SIG_BYTES  # 102
PATH_HOP_BYTES = TASK_ID_BYTES + VK_BYTES + AMOUNT_BYTES  # 69
PATH_ACK_BASE_BYTES = SIG_BYTES  # 33


@dataclass(frozen=True)
class SchemeParams:
    """Output of scheme setup; carried by every key pair."""

    security: int
    backend: str


@dataclass(frozen=True)
class KeyPair:
    sk: bytes
    vk: bytes
    params: SchemeParams

    def __post_init__(self) -> None:
        if len(self.vk) != VK_BYTES:
            raise ValueError(f"verification key must be {VK_BYTES} bytes")


Entry = tuple[bytes, bytes]  # (message, verification key)


@dataclass(frozen=True)
class MessageDescriptor:
    """Set of (message, verification key) pairs a composite signs over."""

    entries: frozenset[Entry]

    @classmethod
    def of(cls, pairs: Iterable[Entry]) -> "MessageDescriptor":
        return cls(entries=frozenset((bytes(m), bytes(vk)) for m, vk in pairs))

    def messages(self) -> set[bytes]:
        return {m for m, _ in self.entries}

    def messages_unique(self) -> bool:
        return len(self.messages()) == len(self.entries)

    def overlaps(self, other: "MessageDescriptor") -> bool:
        return bool(self.messages() & other.messages())

    def union(self, other: "MessageDescriptor") -> "MessageDescriptor":
        return MessageDescriptor(entries=self.entries | other.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __or__(self, other: "MessageDescriptor") -> "MessageDescriptor":
        return self.union(other)


class CompositeScheme(ABC):
    """Five-operation interface every signature backend implements."""

    name: str = "abstract"

    @abstractmethod
    def setup(self, security_parameter: int) -> SchemeParams: ...

    @abstractmethod
    def keygen(self, params: SchemeParams, seed: bytes | int | str) -> KeyPair: ...

    @abstractmethod
    def sign(self, sk: bytes, message: bytes) -> bytes: ...

    @abstractmethod
    def verify(self, descriptor: MessageDescriptor, signature: bytes) -> bool: ...

    def compose(
        self,
        l1: MessageDescriptor,
        s1: bytes,
        l2: MessageDescriptor,
        s2: bytes,
    ) -> bytes | None:
        """Merge two valid composites over disjoint messages; None otherwise."""
        if not self.verify(l1, s1) or not self.verify(l2, s2):
            return None
        if l1.overlaps(l2):
            return None
        return self._merge(s1, s2)

    @abstractmethod
    def _merge(self, s1: bytes, s2: bytes) -> bytes: ...


def _seed_bytes(seed: bytes | int | str) -> bytes:
    if isinstance(seed, bytes):
        return seed
    if isinstance(seed, str):
        return seed.encode()
    return seed.to_bytes(16, "big", signed=False)


class HashXorScheme(CompositeScheme):
    """Deterministic functional backend: keyed hashes composed by XOR.

    Public keys are derived from secret keys, per-entry signatures are hashes
    bound to (vk, message), and a composite is the XOR of its entry hashes, so
    a composite verifies exactly against the full entry set it was built from.
    """

    name = "hash-xor"

    def setup(self, security_parameter: int) -> SchemeParams:
        if security_parameter <= 0:
            raise ValueError(f"security parameter must be positive, got {security_parameter}")
        return SchemeParams(security=security_parameter, backend=self.name)

    def keygen(self, params: SchemeParams, seed: bytes | int | str) -> KeyPair:
        material = _seed_bytes(seed)
        sk = hashlib.shake_256(
            b"prestigesim/sk/" + params.security.to_bytes(4, "big") + material
        ).digest(32)
        return KeyPair(sk=sk, vk=self._derive_vk(sk), params=params)

    def sign(self, sk: bytes, message: bytes) -> bytes:
        return self._entry_sig(self._derive_vk(sk), message)

    def verify(self, descriptor: MessageDescriptor, signature: bytes) -> bool:
        if len(signature) != SIG_BYTES:
            return False
        if len(descriptor) == 0:
            return False
        if not descriptor.messages_unique():
            return False
        expected = reduce(
            _xor_bytes,
            (self._entry_sig(vk, m) for m, vk in sorted(descriptor.entries)),
        )
        return expected == signature

    def _merge(self, s1: bytes, s2: bytes) -> bytes:
        return _xor_bytes(s1, s2)

    @staticmethod
    def _derive_vk(sk: bytes) -> bytes:
        return hashlib.shake_256(b"prestigesim/vk/" + sk).digest(VK_BYTES)

    @staticmethod
    def _entry_sig(vk: bytes, message: bytes) -> bytes:
        return hashlib.shake_256(b"prestigesim/sig/" + vk + message).digest(SIG_BYTES)


def _xor_bytes(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b, strict=True))


DEFAULT_SCHEME: CompositeScheme = HashXorScheme()


# Module-level convenience surface over the default backend.

def setup(security_parameter: int, scheme: CompositeScheme = DEFAULT_SCHEME) -> SchemeParams:
    return scheme.setup(security_parameter)


def keygen(
    params: SchemeParams,
    seed: bytes | int | str,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> KeyPair:
    return scheme.keygen(params, seed)


def sign(sk: bytes, message: bytes, scheme: CompositeScheme = DEFAULT_SCHEME) -> bytes:
    return scheme.sign(sk, message)


def verify(
    descriptor: MessageDescriptor,
    signature: bytes,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> bool:
    return scheme.verify(descriptor, signature)


def compose(
    l1: MessageDescriptor,
    s1: bytes,
    l2: MessageDescriptor,
    s2: bytes,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> bytes | None:
    return scheme.compose(l1, s1, l2, s2)


# --- wire formats -----------------------------------------------------------

def encode_ack_message(task_id: bytes, vk: bytes, amount: int) -> bytes:
    """Canonical signed payload: task_id || vk || amount (4-byte big-endian)."""
    if len(task_id) != TASK_ID_BYTES:
        raise ValueError(f"task id must be {TASK_ID_BYTES} bytes, got {len(task_id)}")
    if len(vk) != VK_BYTES:
        raise ValueError(f"verification key must be {VK_BYTES} bytes, got {len(vk)}")
    if not (0 <= amount <= AMOUNT_MAX):
        raise AmountOverflow(f"amount {amount} outside [0, {AMOUNT_MAX}]")
    return task_id + vk + amount.to_bytes(AMOUNT_BYTES, "big")


@dataclass(frozen=True)
class SimpleAck:
    """Single-task receipt; fixed 102-byte encoding."""

    task_id: bytes
    contributor_vk: bytes
    amount: int
    signature: bytes

    def message(self) -> bytes:
        return encode_ack_message(self.task_id, self.contributor_vk, self.amount)

    def to_bytes(self) -> bytes:
        return self.message() + self.signature

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "SimpleAck":
        if len(raw) != SIMPLE_ACK_BYTES:
            raise ValueError(f"simple ack must be {SIMPLE_ACK_BYTES} bytes, got {len(raw)}")
        task_id = raw[:TASK_ID_BYTES]
        vk = raw[TASK_ID_BYTES : TASK_ID_BYTES + VK_BYTES]
        off = TASK_ID_BYTES + VK_BYTES
        amount = int.from_bytes(raw[off : off + AMOUNT_BYTES], "big")
        sig = raw[off + AMOUNT_BYTES :]
        return cls(task_id=task_id, contributor_vk=vk, amount=amount, signature=sig)

    @classmethod
    def from_hex(cls, text: str) -> "SimpleAck":
        return cls.from_bytes(bytes.fromhex(text))


def make_simple_ack(
    beneficiary: KeyPair,
    task_id: bytes,
    contributor_vk: bytes,
    amount: int,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> SimpleAck:
    """Beneficiary-signed receipt naming the contributor to be credited."""
    message = encode_ack_message(task_id, contributor_vk, amount)
    signature = scheme.sign(beneficiary.sk, message)
    return SimpleAck(
        task_id=bytes(task_id),
        contributor_vk=bytes(contributor_vk),
        amount=int(amount),
        signature=signature,
    )


def verify_simple_ack(
    ack: SimpleAck,
    beneficiary_vk: bytes,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> bool:
    try:
        descriptor = MessageDescriptor.of([(ack.message(), beneficiary_vk)])
    except (ValueError, AmountOverflow):
        return False
    return scheme.verify(descriptor, ack.signature)


@dataclass(frozen=True)
class PathHop:
    """One node's membership record on a distribution branch."""

    task_id: bytes
    vk: bytes
    amount: int

    def message(self) -> bytes:
        return encode_ack_message(self.task_id, self.vk, self.amount)

    def to_bytes(self) -> bytes:
        return self.message()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "PathHop":
        if len(raw) != PATH_HOP_BYTES:
            raise ValueError(f"path hop must be {PATH_HOP_BYTES} bytes")
        task_id = raw[:TASK_ID_BYTES]
        vk = raw[TASK_ID_BYTES : TASK_ID_BYTES + VK_BYTES]
        amount = int.from_bytes(raw[TASK_ID_BYTES + VK_BYTES :], "big")
        return cls(task_id=task_id, vk=vk, amount=amount)


@dataclass(frozen=True)
class PathAck:
    """Root-first chain of hop records plus one composite signature."""

    hops: tuple[PathHop, ...]
    composite: bytes

    def __post_init__(self) -> None:
        if not self.hops:
            raise ValueError("path ack needs at least the root hop")
        if len(self.composite) != SIG_BYTES:
            raise ValueError(f"composite must be {SIG_BYTES} bytes")

    def descriptor(self) -> MessageDescriptor:
        return MessageDescriptor.of((hop.message(), hop.vk) for hop in self.hops)

    def messages(self) -> set[bytes]:
        return {hop.message() for hop in self.hops}

    def to_bytes(self) -> bytes:
        return b"".join(hop.to_bytes() for hop in self.hops) + self.composite

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "PathAck":
        body = len(raw) - PATH_ACK_BASE_BYTES
        if body <= 0 or body % PATH_HOP_BYTES != 0:
            raise ValueError(f"path ack length {len(raw)} is not 33 + 69*n")
        hops = tuple(
            PathHop.from_bytes(raw[i : i + PATH_HOP_BYTES])
            for i in range(0, body, PATH_HOP_BYTES)
        )
        return cls(hops=hops, composite=raw[body:])

    @classmethod
    def from_hex(cls, text: str) -> "PathAck":
        return cls.from_bytes(bytes.fromhex(text))


def make_root_ack(
    root: KeyPair,
    task_id: bytes,
    amount: int = 0,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> PathAck:
    """Self-signed genesis record that seeds a branch's path acks."""
    hop = PathHop(task_id=bytes(task_id), vk=root.vk, amount=int(amount))
    signature = scheme.sign(root.sk, hop.message())
    return PathAck(hops=(hop,), composite=signature)


def extend_path_ack(
    prev: PathAck,
    beneficiary: KeyPair,
    task_id: bytes,
    contributor_vk: bytes,
    amount: int,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> PathAck:
    """Append the extending node's hop and recompose the signature.

    The node that just received the content signs its own membership record
    and becomes the branch's newest contributor, so ``contributor_vk`` must be
    the signing key pair's public key. Grows the encoding by exactly 69 bytes.
    """
    if contributor_vk != beneficiary.vk:
        raise ValueError("extending node records its own key; contributor_vk must match beneficiary.vk")
    if not scheme.verify(prev.descriptor(), prev.composite):
        raise InvalidPrev("previous path ack does not verify")

    hop = PathHop(task_id=bytes(task_id), vk=bytes(contributor_vk), amount=int(amount))
    message = hop.message()
    if message in prev.messages():
        raise DuplicateHop("hop message already present in the path")

    signature = scheme.sign(beneficiary.sk, message)
    composite = scheme.compose(
        prev.descriptor(),
        prev.composite,
        MessageDescriptor.of([(message, hop.vk)]),
        signature,
    )
    if composite is None:
        raise InvalidPrev("extension failed to compose with the previous path")
    return PathAck(hops=prev.hops + (hop,), composite=composite)


def verify_path_ack(
    ack: PathAck,
    expected_root_vk: bytes,
    scheme: CompositeScheme = DEFAULT_SCHEME,
) -> bool:
    """Check the composite against every hop and the anchoring at the root."""
    if ack.hops[0].vk != expected_root_vk:
        return False
    try:
        descriptor = ack.descriptor()
    except (ValueError, AmountOverflow):
        return False
    return scheme.verify(descriptor, ack.composite)
