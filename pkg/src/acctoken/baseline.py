"""Bare-bones mapping-based ERC20: the comparison oracle and gas baseline.

Balances and allowances live directly in contract storage; every map access
is reported to the gas meter as one storage-key operation carrying the
contract's key count at that moment. Zeroed entries are deleted, mirroring
storage-release semantics, so the key count tracks live entries only.

``ever_approved`` is bookkeeping, not a storage key: it only classifies a
failed transferFrom as NotApproved (pair never approved) versus
InsufficientAllowance, matching the verdicts the accumulator token produces.
"""

from dataclasses import dataclass, field

from .erc20.contract import LogRecord
from .erc20.elements import AMOUNT_MAX, ZERO_ADDRESS, check_address, check_amount
from .erc20.system import abi_calldata
from .erc20.bundle import OpTag
from .errors import (
    InsufficientAllowance,
    InsufficientBalance,
    NotApproved,
    Overflow,
    ZeroSupply,
)
from .gas import TxTrace


@dataclass
class BaselineRecord:
    op: str
    log: LogRecord
    trace: TxTrace
    bundle_bytes: int = 0
    verifications: int = 0


@dataclass
class BaselineToken:
    balances: dict[bytes, int] = field(default_factory=dict)
    allowed: dict[tuple[bytes, bytes], int] = field(default_factory=dict)
    total_supply: int = 0
    ever_approved: set[tuple[bytes, bytes]] = field(default_factory=set)
    logs: list[LogRecord] = field(default_factory=list)
    # large population-growth runs disable retention to bound memory;
    # log_count still tracks emissions
    keep_logs: bool = True
    log_count: int = 0

    @classmethod
    def deploy(cls, deployer: bytes, total: int, keep_logs: bool = True) -> "BaselineToken":
        check_address(deployer)
        if total == 0:
            raise ZeroSupply("deployment needs a positive total supply")
        if not 0 < total <= AMOUNT_MAX:
            raise Overflow(f"total supply {total} outside uint256 range")
        token = cls(balances={deployer: total}, total_supply=total, keep_logs=keep_logs)
        token._log(LogRecord("Transfer", ZERO_ADDRESS, deployer, total))
        return token

    def _log(self, record: LogRecord):
        self.log_count += 1
        if self.keep_logs:
            self.logs.append(record)

    @property
    def key_count(self) -> int:
        return len(self.balances) + len(self.allowed)

    # -- views -----------------------------------------------------------------

    def balance_of(self, owner: bytes) -> int:
        return self.balances.get(owner, 0)

    def allowance(self, owner: bytes, spender: bytes) -> int:
        return self.allowed.get((owner, spender), 0)

    # -- storage helpers ---------------------------------------------------------

    def _write_balance(self, trace: TxTrace, owner: bytes, value: int):
        if owner in self.balances:
            trace.sstore_update(self.key_count)
            if value == 0:
                del self.balances[owner]
            else:
                self.balances[owner] = value
        else:
            if value == 0:
                return
            trace.sstore_new(self.key_count)
            self.balances[owner] = value

    def _write_allowance(self, trace: TxTrace, pair: tuple[bytes, bytes], value: int):
        if pair in self.allowed:
            trace.sstore_update(self.key_count)
            if value == 0:
                del self.allowed[pair]
            else:
                self.allowed[pair] = value
        else:
            if value == 0:
                return
            trace.sstore_new(self.key_count)
            self.allowed[pair] = value

    # -- operations ---------------------------------------------------------------

    def transfer(self, sender: bytes, to: bytes, tokens: int) -> BaselineRecord:
        check_address(sender), check_address(to)
        check_amount(tokens)
        trace = TxTrace()
        trace.sload(self.key_count)
        from_balance = self.balances.get(sender, 0)
        if from_balance < tokens:
            raise InsufficientBalance(f"balance {from_balance} cannot cover {tokens}")
        trace.sload(self.key_count)
        to_balance = self.balances.get(to, 0)
        check_amount(to_balance + tokens)
        self._write_balance(trace, sender, from_balance - tokens)
        self._write_balance(trace, to, to_balance + tokens)
        trace.calldata = abi_calldata(OpTag.TRANSFER, [sender, to], tokens, (), b"")
        log = LogRecord("Transfer", sender, to, tokens)
        self._log(log)
        return BaselineRecord("transfer", log, trace)

    def approve(self, owner: bytes, spender: bytes, tokens: int) -> BaselineRecord:
        check_address(owner), check_address(spender)
        check_amount(tokens)
        trace = TxTrace()
        trace.sload(self.key_count)
        self._write_allowance(trace, (owner, spender), tokens)
        self.ever_approved.add((owner, spender))
        trace.calldata = abi_calldata(OpTag.APPROVE, [owner, spender], tokens, (), b"")
        log = LogRecord("Approval", owner, spender, tokens)
        self._log(log)
        return BaselineRecord("approve", log, trace)

    def transfer_from(self, spender: bytes, sender: bytes, to: bytes, tokens: int) -> BaselineRecord:
        check_address(spender), check_address(sender), check_address(to)
        check_amount(tokens)
        trace = TxTrace()
        trace.sload(self.key_count)
        pair = (sender, spender)
        if pair not in self.ever_approved:
            raise NotApproved("spender was never approved by this owner")
        allowed = self.allowed.get(pair, 0)
        if allowed < tokens:
            raise InsufficientAllowance(f"allowance {allowed} cannot cover {tokens}")
        trace.sload(self.key_count)
        from_balance = self.balances.get(sender, 0)
        if from_balance < tokens:
            raise InsufficientBalance(f"balance {from_balance} cannot cover {tokens}")
        trace.sload(self.key_count)
        to_balance = self.balances.get(to, 0)
        check_amount(to_balance + tokens)
        self._write_allowance(trace, pair, allowed - tokens)
        self._write_balance(trace, sender, from_balance - tokens)
        self._write_balance(trace, to, to_balance + tokens)
        trace.calldata = abi_calldata(OpTag.TRANSFER_FROM, [spender, sender, to], tokens, (), b"")
        log = LogRecord("Transfer", sender, to, tokens)
        self._log(log)
        return BaselineRecord("transfer_from", log, trace)

    # -- integrity ------------------------------------------------------------------

    def check_conservation(self):
        total = sum(self.balances.values())
        if total != self.total_supply:
            raise AssertionError(f"balances sum to {total}, total supply is {self.total_supply}")
