"""Simulated external storage network holding accumulator memories.

The network is in-process and deterministic under a seed. It serves
logarithmic-size witness payloads to clients and applies contract-confirmed
updates; it never ships a whole memory. Fault policies model an unreliable
network on the serving path only (corrupted bytes, stale snapshots, refused
requests); commits always apply, mirroring a storage node that follows the
chain. Clients are expected to detect bad payloads via ``belongs``.
"""

import random
from collections import deque
from dataclasses import dataclass, field

from .accumulator import core, encode_witness
from .accumulator.hashing import TAG_ACC_ID, sha256
from .accumulator.tree import Memory, Node
from .errors import StorageError, Unavailable

HONEST = "honest"
CORRUPT_BITS = "corrupt-bits"
STALE = "stale"
UNAVAILABLE = "unavailable"

_MODES = (HONEST, CORRUPT_BITS, STALE, UNAVAILABLE)


@dataclass(frozen=True)
class AccumulatorId:
    """Names one accumulator memory: role plus contract instance."""

    name: str
    instance: str

    def digest(self) -> bytes:
        return sha256(TAG_ACC_ID + self.name.encode() + b"/" + self.instance.encode())

    def __str__(self) -> str:
        return f"{self.instance}:{self.name}"


@dataclass(frozen=True)
class FaultPolicy:
    mode: str = HONEST
    rate: float = 0.0
    lag_epochs: int = 0
    probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown fault mode {self.mode!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("corruption rate must lie in [0, 1]")
        if self.lag_epochs < 0:
            raise ValueError("lag must be non-negative")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must lie in [0, 1]")

    @classmethod
    def honest(cls) -> "FaultPolicy":
        return cls()

    @classmethod
    def corrupt_bits(cls, rate: float, seed: int = 0) -> "FaultPolicy":
        return cls(mode=CORRUPT_BITS, rate=rate, seed=seed)

    @classmethod
    def stale(cls, lag_epochs: int, seed: int = 0) -> "FaultPolicy":
        return cls(mode=STALE, lag_epochs=lag_epochs, seed=seed)

    @classmethod
    def unavailable(cls, probability: float, seed: int = 0) -> "FaultPolicy":
        return cls(mode=UNAVAILABLE, probability=probability, seed=seed)


@dataclass
class ServingStats:
    witness_fetches: int = 0
    witness_bytes: int = 0
    update_builds: int = 0
    update_witness_bytes: int = 0
    lookups: int = 0
    lookup_bytes: int = 0


@dataclass
class _Registered:
    memory: Memory
    index_prefix_len: int | None
    index: dict = field(default_factory=dict)
    # (epoch, root, op, element) of recent commits, newest last
    history: deque = field(default_factory=deque)
    # simulated roots reachable from build_update_witness chains
    snapshots: dict = field(default_factory=dict)


class StorageNetwork:
    """Holds one Memory per registered AccumulatorId; single writer per id."""

    def __init__(self, policy: FaultPolicy | None = None):
        self.policy = policy or FaultPolicy.honest()
        self._rng = random.Random(self.policy.seed)
        self._entries: dict[AccumulatorId, _Registered] = {}
        self.stats = ServingStats()
        self._history_len = max(self.policy.lag_epochs, 0) + 4

    # -- registry ----------------------------------------------------------

    def register(self, acc_id: AccumulatorId, index_prefix_len: int | None = None) -> bytes:
        """Set up a fresh accumulator under ``acc_id``; returns its initial value."""
        if acc_id in self._entries:
            raise StorageError(f"{acc_id} already registered")
        acc0, memory = core.setup(256)
        entry = _Registered(memory=memory, index_prefix_len=index_prefix_len)
        entry.history.append((0, memory.root, None, None))
        self._entries[acc_id] = entry
        return acc0

    def _entry(self, acc_id: AccumulatorId) -> _Registered:
        try:
            return self._entries[acc_id]
        except KeyError:
            raise StorageError(f"{acc_id} not registered") from None

    def accumulator_value(self, acc_id: AccumulatorId) -> bytes:
        return self._entry(acc_id).memory.value

    def epoch(self, acc_id: AccumulatorId) -> int:
        return self._entry(acc_id).memory.epoch

    # -- fault layer ---------------------------------------------------------

    def _maybe_refuse(self):
        if self.policy.mode == UNAVAILABLE and self._rng.random() < self.policy.probability:
            raise Unavailable("storage node did not respond")

    def _serve_bytes(self, payload: bytes) -> bytes:
        if self.policy.mode != CORRUPT_BITS or self.policy.rate == 0.0:
            return payload
        out = bytearray(payload)
        for i in range(len(out)):
            if self._rng.random() < self.policy.rate:
                out[i] ^= self._rng.randrange(1, 256)
        return bytes(out)

    def _serving_root(self, entry: _Registered) -> Node:
        if self.policy.mode != STALE or self.policy.lag_epochs == 0:
            return entry.memory.root
        target = entry.memory.epoch - self.policy.lag_epochs
        best = entry.history[0]
        for item in entry.history:
            if item[0] <= target:
                best = item
        return best[1]

    def _serving_elements(self, entry: _Registered, prefix: bytes) -> list[bytes]:
        plen = entry.index_prefix_len
        if plen is None or len(prefix) != plen:
            raise StorageError(f"lookups require a {plen}-byte prefix")
        current = set(entry.index.get(prefix, ()))
        if self.policy.mode == STALE and self.policy.lag_epochs > 0:
            target = entry.memory.epoch - self.policy.lag_epochs
            # Roll recent commits back to reconstruct the stale element view.
            for epoch, _root, op, element in reversed(entry.history):
                if epoch <= target or op is None:
                    break
                if element[:plen] == prefix:
                    if op == "add":
                        current.discard(element)
                    else:
                        current.add(element)
        return sorted(current)

    # -- serving API ---------------------------------------------------------

    def lookup(self, acc_id: AccumulatorId, prefix: bytes) -> list[bytes]:
        """Accumulated elements whose encoding starts with ``prefix``."""
        self._maybe_refuse()
        entry = self._entry(acc_id)
        found = self._serving_elements(entry, prefix)
        served = [self._serve_bytes(e) for e in found]
        self.stats.lookups += 1
        self.stats.lookup_bytes += sum(len(e) for e in served)
        return served

    def fetch_witness(self, acc_id: AccumulatorId, element: bytes) -> bytes:
        """Serialized (non)membership witness for ``element``."""
        self._maybe_refuse()
        entry = self._entry(acc_id)
        w = core.witness_for_root(self._serving_root(entry), element)
        payload = self._serve_bytes(encode_witness(w))
        self.stats.witness_fetches += 1
        self.stats.witness_bytes += len(payload)
        return payload

    def build_update_witness(
        self,
        acc_id: AccumulatorId,
        op: str,
        element: bytes,
        base: bytes | None = None,
    ) -> tuple[bytes, bytes]:
        """Simulate ``op`` without mutating memory.

        Returns (predicted accumulator value after the op, serialized update
        witness). Passing a previously returned value as ``base`` chains a
        second simulated update on top of the first, which is how clients
        assemble multi-update proof bundles against one snapshot.
        """
        self._maybe_refuse()
        entry = self._entry(acc_id)
        if base is None:
            root = self._serving_root(entry)
        elif base == entry.memory.value:
            root = entry.memory.root
        else:
            try:
                root = entry.snapshots[base]
            except KeyError:
                raise StorageError("unknown base snapshot; rebuild from current") from None
        new_root, w = core.simulate_update(root, op, element)
        entry.snapshots[new_root.digest] = new_root
        payload = self._serve_bytes(encode_witness(w))
        predicted = self._serve_bytes(new_root.digest)
        self.stats.update_builds += 1
        self.stats.update_witness_bytes += len(payload)
        return predicted, payload

    # -- commit path -----------------------------------------------------------

    def commit(self, acc_id: AccumulatorId, op: str, element: bytes) -> bytes:
        """Apply a contract-confirmed update to the real memory."""
        entry = self._entry(acc_id)
        memory = entry.memory
        acc_after = core.apply_update(op, memory, element)
        plen = entry.index_prefix_len
        if plen is not None and len(element) >= plen:
            bucket = entry.index.setdefault(element[:plen], set())
            if op == "add":
                bucket.add(element)
            else:
                bucket.discard(element)
                if not bucket:
                    del entry.index[element[:plen]]
        entry.history.append((memory.epoch, memory.root, op, element))
        while len(entry.history) > self._history_len:
            entry.history.popleft()
        entry.snapshots.clear()
        return acc_after
