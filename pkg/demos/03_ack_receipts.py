# Acknowledgment receipts: fixed-width wire formats and composite signatures.
#
# A simple ack is one beneficiary vouching for one contributor (102 bytes).
# A path ack is a whole distribution branch vouching for itself: every hop
# signs its own membership record and the signatures XOR-compose into a
# single 33-byte tag, so the receipt grows by only 69 bytes per hop.

from prestigesim import (
    extend_path_ack,
    keygen,
    make_root_ack,
    make_simple_ack,
    setup,
    verify_path_ack,
    verify_simple_ack,
)

params = setup(128)
root = keygen(params, "root")
alice = keygen(params, "alice")
bob = keygen(params, "bob")

task = bytes.fromhex("aa" * 32)
simple = make_simple_ack(alice, task, bob.vk, amount=250)
wire = simple.to_bytes()
print(f"simple ack: {len(wire)} bytes")
print(f"  {wire.hex()[:64]}...")
print(f"  verifies for alice: {verify_simple_ack(simple, alice.vk)}")
print(f"  verifies for bob:   {verify_simple_ack(simple, bob.vk)}")
print()

path = make_root_ack(root, task_id=(0).to_bytes(32, "big"))
print(f"root-only path ack: {len(path.to_bytes())} bytes")
path = extend_path_ack(path, alice, (1).to_bytes(32, "big"), alice.vk, amount=40)
print(f"after alice joins:  {len(path.to_bytes())} bytes")
path = extend_path_ack(path, bob, (2).to_bytes(32, "big"), bob.vk, amount=40)
print(f"after bob joins:    {len(path.to_bytes())} bytes")
print(f"whole branch verifies against the root key: {verify_path_ack(path, root.vk)}")
print()

# Any tampering with any hop breaks the composite tag.
corrupted = path.to_bytes()
corrupted = corrupted[:40] + bytes([corrupted[40] ^ 1]) + corrupted[41:]
from prestigesim import PathAck

print(f"one flipped byte still parses, but: verifies = "
      f"{verify_path_ack(PathAck.from_bytes(corrupted), root.vk)}")
