"""Deployment wiring: contract, storage network and client in lock step.

``TokenSystem`` plays the role of the chain environment: it routes accepted
transactions to the contract, replays the confirmed updates into the storage
network in contract order, and assembles the calldata that gas metering sees.
A transaction is atomic end to end: a rejection at any stage leaves the
contract state, the storage memories and the logs untouched.
"""

import hashlib
from dataclasses import dataclass

from ..errors import Overflow, ZeroSupply
from ..gas import TxTrace
from ..storage import AccumulatorId, FaultPolicy, StorageNetwork
from . import bundle as pb
from .bundle import OpTag, ProofBundle, encode_bundle
from .client import TokenClient
from .contract import CONTRACT_KEYS, AccTokenContract, ContractState, LogRecord, TxOutcome
from .elements import (
    AMOUNT_BYTES,
    AMOUNT_MAX,
    ZERO_ADDRESS,
    allowance_element,
    balance_element,
    check_address,
    check_amount,
    decode_balance_element,
    pair_element,
)

BALANCE_PREFIX_LEN = 21  # tag byte plus owner address
ALLOWANCE_PREFIX_LEN = 41  # tag byte plus owner and spender

_SELECTORS = {
    op: hashlib.sha256(signature.encode()).digest()[:4]
    for op, signature in {
        OpTag.TRANSFER: "transfer(address,address,uint256)",
        OpTag.APPROVE: "approve(address,address,uint256)",
        OpTag.TRANSFER_FROM: "transferFrom(address,address,address,uint256)",
    }.items()
}


def abi_calldata(op: OpTag, addresses: list[bytes], tokens: int, extra_words: tuple[int, ...], bundle_bytes: bytes) -> bytes:
    """Simulated transaction payload: selector, padded args, announced words, bundle."""
    parts = [_SELECTORS[op]]
    for addr in addresses:
        parts.append(b"\x00" * 12 + addr)
    parts.append(tokens.to_bytes(AMOUNT_BYTES, "big"))
    for word in extra_words:
        parts.append(word.to_bytes(AMOUNT_BYTES, "big"))
    parts.append(bundle_bytes)
    return b"".join(parts)


@dataclass
class TxRecord:
    op: str
    log: LogRecord
    trace: TxTrace
    bundle_bytes: int
    verifications: int


class TokenSystem:
    """One deployed accumulator token plus its storage network and client."""

    def __init__(
        self,
        deployer: bytes,
        total: int,
        policy: FaultPolicy | None = None,
        network: StorageNetwork | None = None,
        instance: str = "token-0",
        lift_checkupdate_precondition: bool = False,
    ):
        check_address(deployer)
        if total == 0:
            raise ZeroSupply("deployment needs a positive total supply")
        if not 0 < total <= AMOUNT_MAX:
            raise Overflow(f"total supply {total} outside uint256 range")
        self.network = network if network is not None else StorageNetwork(policy)
        self.acc_ids = {
            pb.BALANCES: AccumulatorId(pb.BALANCES, instance),
            pb.ALLOWED_ADDRESSES: AccumulatorId(pb.ALLOWED_ADDRESSES, instance),
            pb.ALLOWED_BALANCES: AccumulatorId(pb.ALLOWED_BALANCES, instance),
        }
        self.network.register(self.acc_ids[pb.BALANCES], index_prefix_len=BALANCE_PREFIX_LEN)
        self.network.register(self.acc_ids[pb.ALLOWED_ADDRESSES])
        self.network.register(self.acc_ids[pb.ALLOWED_BALANCES], index_prefix_len=ALLOWANCE_PREFIX_LEN)

        balances_acc = self.network.commit(
            self.acc_ids[pb.BALANCES], "add", balance_element(deployer, total)
        )
        state = ContractState(
            balances_acc=balances_acc,
            allowed_addresses_acc=self.network.accumulator_value(self.acc_ids[pb.ALLOWED_ADDRESSES]),
            allowed_balances_acc=self.network.accumulator_value(self.acc_ids[pb.ALLOWED_BALANCES]),
            total_supply=total,
        )
        self.contract = AccTokenContract(state, lift_checkupdate_precondition)
        self.contract.logs.append(LogRecord("Transfer", ZERO_ADDRESS, deployer, total))
        self.client = TokenClient(self.contract, self.network, self.acc_ids)
        self.deployer = deployer

    # -- views ---------------------------------------------------------------

    def total_supply(self) -> int:
        return self.contract.total_supply()

    def balance_of(self, owner: bytes) -> int:
        return self.client.balance_of(owner)

    def allowance(self, owner: bytes, spender: bytes) -> int:
        return self.client.allowance(owner, spender)

    @property
    def state(self) -> ContractState:
        return self.contract.state

    # -- transaction submission ----------------------------------------------

    def _commit_and_record(
        self, op: OpTag, addresses: list[bytes], tokens: int, bundle: ProofBundle, outcome: TxOutcome
    ) -> TxRecord:
        for acc_name, update_op, element in outcome.commits:
            self.network.commit(self.acc_ids[acc_name], update_op, element)
        self._assert_lock_step()
        encoded = encode_bundle(bundle)
        trace = TxTrace(
            calldata=abi_calldata(op, addresses, tokens, bundle.announced, encoded),
            events=list(outcome.events),
        )
        return TxRecord(op.name.lower(), outcome.log, trace, len(encoded), outcome.verifications)

    def _assert_lock_step(self):
        for name, acc_id in self.acc_ids.items():
            stored = self.contract.state.value_of(name)
            if stored != self.network.accumulator_value(acc_id):
                raise AssertionError(f"storage diverged from contract on {name}")

    def transfer(self, sender: bytes, to: bytes, tokens: int, bundle: ProofBundle | None = None) -> TxRecord:
        if bundle is None:
            bundle = self.client.build_transfer(sender, to, tokens)
        outcome = self.contract.transfer(sender, to, tokens, bundle)
        return self._commit_and_record(OpTag.TRANSFER, [sender, to], tokens, bundle, outcome)

    def approve(self, owner: bytes, spender: bytes, tokens: int, bundle: ProofBundle | None = None) -> TxRecord:
        if bundle is None:
            bundle = self.client.build_approve(owner, spender, tokens)
        outcome = self.contract.approve(owner, spender, tokens, bundle)
        return self._commit_and_record(OpTag.APPROVE, [owner, spender], tokens, bundle, outcome)

    def transfer_from(
        self, spender: bytes, sender: bytes, to: bytes, tokens: int, bundle: ProofBundle | None = None
    ) -> TxRecord:
        if bundle is None:
            bundle = self.client.build_transfer_from(spender, sender, to, tokens)
        outcome = self.contract.transfer_from(spender, sender, to, tokens, bundle)
        return self._commit_and_record(
            OpTag.TRANSFER_FROM, [spender, sender, to], tokens, bundle, outcome
        )

    # -- bootstrap fast path -------------------------------------------------

    def fast_transfer(self, sender: bytes, to: bytes, tokens: int, sender_balance: int, to_balance: int | None):
        """Apply a transfer's state transition without proof machinery.

        Produces bit-identical contract and storage state to the verified
        path; population-growth workloads use it so benchmarks stay
        tractable. No event log is emitted; this is bootstrap tooling, not a
        transaction. ``to_balance`` is None when the destination holds no
        tuple yet.
        """
        check_amount(tokens)
        if sender_balance < tokens:
            raise ValueError("fast path needs a funded sender")
        bal = self.acc_ids[pb.BALANCES]
        self.network.commit(bal, "del", balance_element(sender, sender_balance))
        if to_balance is None:
            self.network.commit(bal, "add", balance_element(sender, sender_balance - tokens))
            acc = self.network.commit(bal, "add", balance_element(to, tokens))
        else:
            self.network.commit(bal, "del", balance_element(to, to_balance))
            self.network.commit(bal, "add", balance_element(sender, sender_balance - tokens))
            acc = self.network.commit(bal, "add", balance_element(to, to_balance + tokens))
        self.contract.state = ContractState(
            balances_acc=acc,
            allowed_addresses_acc=self.contract.state.allowed_addresses_acc,
            allowed_balances_acc=self.contract.state.allowed_balances_acc,
            total_supply=self.contract.state.total_supply,
        )

    def fast_approve(self, owner: bytes, spender: bytes, tokens: int, old: int | None):
        """Fast-path counterpart of approve; ``old`` is the prior allowance tuple."""
        check_amount(tokens)
        pairs = self.acc_ids[pb.ALLOWED_ADDRESSES]
        allowances = self.acc_ids[pb.ALLOWED_BALANCES]
        if old is None:
            pair_acc = self.network.commit(pairs, "add", pair_element(owner, spender))
        else:
            pair_acc = self.contract.state.allowed_addresses_acc
            self.network.commit(allowances, "del", allowance_element(owner, spender, old))
        allow_acc = self.network.commit(allowances, "add", allowance_element(owner, spender, tokens))
        self.contract.state = ContractState(
            balances_acc=self.contract.state.balances_acc,
            allowed_addresses_acc=pair_acc,
            allowed_balances_acc=allow_acc,
            total_supply=self.contract.state.total_supply,
        )

    # -- integrity hooks ------------------------------------------------------

    def balances_memory_sum(self) -> int:
        memory = self.network._entry(self.acc_ids[pb.BALANCES]).memory
        return sum(decode_balance_element(e)[1] for e in memory.elements.values())

    def check_conservation(self):
        total = self.balances_memory_sum()
        if total != self.contract.total_supply():
            raise AssertionError(
                f"balance tuples sum to {total}, total supply is {self.contract.total_supply()}"
            )

    def persistent_key_count(self) -> int:
        return CONTRACT_KEYS
