"""Manager-side accumulator operations: setup, witness, update.

The verification half (belongs / check_update) lives in ``verify`` and never
imports this module or the tree, so verifiers can run without any memory.
"""

from dataclasses import dataclass

from ..errors import NotPresent, StaleAccumulator, UnsupportedParameter
from . import tree
from .hashing import DIGEST_BYTES, element_digest
from .tree import Memory, Node
from .witness import Witness, WitnessKind

SUPPORTED_BITS = DIGEST_BYTES * 8


@dataclass
class UpdateResult:
    acc_after: bytes
    witness: Witness


def setup(security_parameter_bits: int) -> tuple[bytes, Memory]:
    """Initial accumulator value for the empty set, plus fresh memory."""
    if security_parameter_bits != SUPPORTED_BITS:
        raise UnsupportedParameter(
            f"only {SUPPORTED_BITS}-bit digests are supported, got {security_parameter_bits}"
        )
    memory = Memory()
    return memory.value, memory


def witness_for_root(root: Node, element: bytes) -> Witness:
    """(Non)membership witness for ``element`` against an arbitrary root snapshot."""
    key = element_digest(element)
    path, terminal = tree.walk(root, key)
    steps = tree.path_steps(path)
    if isinstance(terminal, tree.Leaf) and terminal.key == key:
        return Witness(WitnessKind.MEMBERSHIP, key, steps)
    occupant = terminal.key if isinstance(terminal, tree.Leaf) else None
    return Witness(WitnessKind.NON_MEMBERSHIP, key, steps, occupant)


def witness(acc: bytes, memory: Memory, element: bytes) -> Witness:
    if acc != memory.value:
        raise StaleAccumulator("accumulator value does not match memory root")
    return witness_for_root(memory.root, element)


def simulate_update(root: Node, op: str, element: bytes) -> tuple[Node, Witness]:
    """Apply add/del to a root snapshot; returns (new root, update witness).

    The witness records the element's search path under the old root, from
    which a verifier recomputes both the before- and after-roots.
    """
    key = element_digest(element)
    path, terminal = tree.walk(root, key)
    steps = tree.path_steps(path)
    if op == "add":
        occupant = terminal.key if isinstance(terminal, tree.Leaf) else None
        w = Witness(WitnessKind.UPDATE_ADD, key, steps, occupant)
        return tree.insert(root, key), w
    if op == "del":
        if not (isinstance(terminal, tree.Leaf) and terminal.key == key):
            raise NotPresent(f"element digest {key.hex()} not accumulated")
        w = Witness(WitnessKind.UPDATE_DEL, key, steps)
        return tree.remove(root, key), w
    raise ValueError(f"unknown update op {op!r}")


def update(op: str, acc_before: bytes, memory: Memory, element: bytes) -> UpdateResult:
    """Add or delete ``element``, mutating ``memory`` in place."""
    if acc_before != memory.value:
        raise StaleAccumulator("accumulator value does not match memory root")
    new_root, w = simulate_update(memory.root, op, element)
    key = element_digest(element)
    memory.root = new_root
    if op == "add":
        memory.elements[key] = element
    else:
        del memory.elements[key]
    memory.epoch += 1
    return UpdateResult(new_root.digest, w)


def apply_update(op: str, memory: Memory, element: bytes) -> bytes:
    """update() minus witness construction; returns the new accumulator value.

    The storage network uses this on its commit path, where the update was
    already verified by the contract and the witness would go unread.
    """
    key = element_digest(element)
    if op == "add":
        memory.root = tree.insert(memory.root, key)
        memory.elements[key] = element
    elif op == "del":
        memory.root = tree.remove(memory.root, key)
        del memory.elements[key]
    else:
        raise ValueError(f"unknown update op {op!r}")
    memory.epoch += 1
    return memory.root.digest
