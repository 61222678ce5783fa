"""Compressed binary Merkle trie over 32-byte element digests.

Nodes are immutable; updates copy the touched root-to-leaf path and share
everything else, so old roots stay valid snapshots for free. The compressed
layout (branches exist only where keys actually diverge) is canonical for a
given key set, which makes the root digest history independent.
"""

from ..errors import AlreadyPresent, NotPresent
from .hashing import EMPTY_DIGEST, bit_at, branch_hash, first_diff_bit, leaf_hash


class Leaf:
    __slots__ = ("key", "digest")

    def __init__(self, key: bytes):
        self.key = key
        self.digest = leaf_hash(key)


class Branch:
    __slots__ = ("bit", "left", "right", "digest")

    def __init__(self, bit: int, left, right):
        self.bit = bit
        self.left = left
        self.right = right
        self.digest = branch_hash(bit, left.digest, right.digest)


class _Empty:
    __slots__ = ()
    digest = EMPTY_DIGEST


EMPTY = _Empty()

Node = Leaf | Branch | _Empty


def walk(root: Node, key: bytes):
    """Descend along ``key``; returns ([(branch, direction)...], terminal)."""
    path = []
    node = root
    while isinstance(node, Branch):
        direction = bit_at(key, node.bit)
        path.append((node, direction))
        node = node.right if direction else node.left
    return path, node


def path_steps(path) -> tuple[tuple[int, bytes], ...]:
    """Witness steps for a walk result: (branch bit, sibling digest) per level."""
    return tuple(
        (branch.bit, (branch.left if direction else branch.right).digest)
        for branch, direction in path
    )


def _rebuild(path, node: Node) -> Node:
    for branch, direction in reversed(path):
        if direction:
            node = Branch(branch.bit, branch.left, node)
        else:
            node = Branch(branch.bit, node, branch.right)
    return node


def insert(root: Node, key: bytes) -> Node:
    if isinstance(root, _Empty):
        return Leaf(key)
    path, terminal = walk(root, key)
    split = first_diff_bit(key, terminal.key)
    if split is None:
        raise AlreadyPresent(f"element digest {key.hex()} already accumulated")
    # The new branch sits above the first node whose discriminator passes the
    # split bit; everything below it is displaced onto the other side.
    cut = 0
    while cut < len(path) and path[cut][0].bit < split:
        cut += 1
    displaced = path[cut][0] if cut < len(path) else terminal
    new_leaf = Leaf(key)
    if bit_at(key, split) == 0:
        node = Branch(split, new_leaf, displaced)
    else:
        node = Branch(split, displaced, new_leaf)
    return _rebuild(path[:cut], node)


def remove(root: Node, key: bytes) -> Node:
    path, terminal = walk(root, key)
    if isinstance(terminal, _Empty) or terminal.key != key:
        raise NotPresent(f"element digest {key.hex()} not accumulated")
    if not path:
        return EMPTY
    branch, direction = path[-1]
    sibling = branch.left if direction else branch.right
    return _rebuild(path[:-1], sibling)


class Memory:
    """Public accumulator memory m = (T, X) plus an update counter.

    Single writer: updates must be externally serialized. Concurrent
    read-only witness extraction against a quiescent memory is safe, and old
    roots remain valid snapshots because nodes are never mutated.
    """

    __slots__ = ("root", "elements", "epoch")

    def __init__(self, root: Node | None = None, elements: dict | None = None, epoch: int = 0):
        self.root = root if root is not None else EMPTY
        self.elements = elements if elements is not None else {}
        self.epoch = epoch

    @property
    def value(self) -> bytes:
        """Current accumulator value: the root node's digest."""
        return self.root.digest

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, digest: bytes) -> bool:
        return digest in self.elements
