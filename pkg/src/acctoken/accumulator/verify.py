"""Pure witness verification: the contract side of the accumulator.

Nothing in this module touches tree memory; ``belongs`` and ``check_update``
are functions of their arguments only, safe to call on arbitrary adversarial
input. Malformed input yields BOTTOM (belongs) or 0 (check_update), never an
exception.

check_update soundness presupposes that the caller has already established
the element's (non)membership against ``acc_before``, e.g. via ``belongs``.
Callers that skip that step get chain consistency but not set semantics.
"""

from .hashing import (
    EMPTY_DIGEST,
    bit_at,
    branch_hash,
    element_digest,
    first_diff_bit,
    leaf_hash,
)
from .witness import Witness, WitnessKind, decode_witness
from ..errors import WitnessDecodeError


class _Bottom:
    __slots__ = ()

    def __repr__(self) -> str:
        return "BOTTOM"

    def __bool__(self) -> bool:
        return False


#: Verdict for witnesses that are valid for neither membership nor
#: non-membership: malformed bytes, wrong element, or a root mismatch.
BOTTOM = _Bottom()


def _as_witness(w):
    if isinstance(w, Witness):
        return w
    return decode_witness(bytes(w))


def _well_formed(w: Witness) -> bool:
    if len(w.element_digest) != 32:
        return False
    prev = -1
    for bit, sibling in w.steps:
        if not 0 <= bit <= 255 or bit <= prev or len(sibling) != 32:
            return False
        prev = bit
    if w.occupant is not None and len(w.occupant) != 32:
        return False
    return True


def _fold(node: bytes, steps, path_key: bytes, stop: int = 0) -> bytes:
    # Recompute root from a node digest upward; steps[stop:] are below it.
    for i in range(len(steps) - 1, stop - 1, -1):
        bit, sibling = steps[i]
        if bit_at(path_key, bit) == 0:
            node = branch_hash(bit, node, sibling)
        else:
            node = branch_hash(bit, sibling, node)
    return node


def _on_search_path(leaf_key: bytes, path_key: bytes, steps) -> bool:
    # A genuine terminal leaf agrees with the probed key at every branch bit.
    return all(bit_at(leaf_key, bit) == bit_at(path_key, bit) for bit, _ in steps)


def belongs(acc: bytes, element: bytes, w):
    """1 for a valid membership witness, 0 for non-membership, BOTTOM otherwise."""
    try:
        w = _as_witness(w)
    except (WitnessDecodeError, TypeError, ValueError):
        return BOTTOM
    try:
        return _belongs(acc, element, w)
    except Exception:
        return BOTTOM


def _belongs(acc: bytes, element: bytes, w: Witness):
    if not _well_formed(w) or w.element_digest != element_digest(element):
        return BOTTOM
    if w.kind == WitnessKind.MEMBERSHIP:
        if w.occupant is not None:
            return BOTTOM
        root = _fold(leaf_hash(w.element_digest), w.steps, w.element_digest)
        return 1 if root == acc else BOTTOM
    if w.kind == WitnessKind.NON_MEMBERSHIP:
        if w.occupant is None:
            if w.steps:
                return BOTTOM
            return 0 if acc == EMPTY_DIGEST else BOTTOM
        if w.occupant == w.element_digest:
            return BOTTOM
        if not _on_search_path(w.occupant, w.element_digest, w.steps):
            return BOTTOM
        root = _fold(leaf_hash(w.occupant), w.steps, w.element_digest)
        return 0 if root == acc else BOTTOM
    return BOTTOM


def check_update(acc_before: bytes, acc_after: bytes, element: bytes, w) -> int:
    """1 iff ``w`` proves acc_before --add/del element--> acc_after."""
    try:
        w = _as_witness(w)
    except (WitnessDecodeError, TypeError, ValueError):
        return 0
    try:
        return _check_update(acc_before, acc_after, element, w)
    except Exception:
        return 0


def _check_update(acc_before: bytes, acc_after: bytes, element: bytes, w: Witness) -> int:
    if not _well_formed(w) or w.element_digest != element_digest(element):
        return 0
    key = w.element_digest
    if w.kind == WitnessKind.UPDATE_ADD:
        if w.occupant is None:
            if w.steps:
                return 0
            ok = acc_before == EMPTY_DIGEST and acc_after == leaf_hash(key)
            return 1 if ok else 0
        if w.occupant == key or not _on_search_path(w.occupant, key, w.steps):
            return 0
        split = first_diff_bit(key, w.occupant)
        if any(bit == split for bit, _ in w.steps):
            return 0
        # One bottom-up pass recomputes both roots: the before-root from the
        # occupant leaf, and the after-root with a new branch spliced in at
        # the first bit where the element diverges from the occupant.
        before = leaf_hash(w.occupant)
        after = None
        for i in range(len(w.steps) - 1, -1, -1):
            bit, sibling = w.steps[i]
            if after is None and bit < split:
                after = _splice(key, split, before)
            if bit_at(key, bit) == 0:
                before = branch_hash(bit, before, sibling)
                if after is not None:
                    after = branch_hash(bit, after, sibling)
            else:
                before = branch_hash(bit, sibling, before)
                if after is not None:
                    after = branch_hash(bit, sibling, after)
        if after is None:
            after = _splice(key, split, before)
        return 1 if before == acc_before and after == acc_after else 0
    if w.kind == WitnessKind.UPDATE_DEL:
        if w.occupant is not None:
            return 0
        before = _fold(leaf_hash(key), w.steps, key)
        if not w.steps:
            after = EMPTY_DIGEST
        else:
            # Removing the leaf collapses its parent; the sibling takes its place.
            after = _fold(w.steps[-1][1], w.steps[:-1], key)
        return 1 if before == acc_before and after == acc_after else 0
    return 0


def _splice(key: bytes, split: int, displaced: bytes) -> bytes:
    new_leaf = leaf_hash(key)
    if bit_at(key, split) == 0:
        return branch_hash(split, new_leaf, displaced)
    return branch_hash(split, displaced, new_leaf)


def verification_hash_sizes(w: Witness, element_len: int) -> list[int]:
    """Input sizes (bytes) of every SHA-256 call the verifier makes for ``w``.

    Mirrors belongs/check_update exactly; used for gas metering so the cost
    model charges what the verification code actually computes. Leaf
    preimages are 33 bytes, internal-node preimages 66, plus one hash of the
    element's own encoding for the digest binding check.
    """
    sizes = [element_len]
    m = len(w.steps)
    if w.kind == WitnessKind.MEMBERSHIP:
        sizes += [33] + [66] * m
    elif w.kind == WitnessKind.NON_MEMBERSHIP:
        if w.occupant is not None:
            sizes += [33] + [66] * m
    elif w.kind == WitnessKind.UPDATE_ADD:
        if w.occupant is None:
            sizes += [33]
        else:
            split = first_diff_bit(w.element_digest, w.occupant)
            shallower = sum(1 for bit, _ in w.steps if split is not None and bit < split)
            sizes += [33, 33] + [66] * (m + shallower + 1)
    elif w.kind == WitnessKind.UPDATE_DEL:
        sizes += [33] + [66] * (m + (m - 1 if m else 0))
    return sizes
