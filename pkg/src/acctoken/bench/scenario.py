"""Deterministic benchmark scenarios: grow a population, meter sampled ops.

A scenario grows the account set to each checkpoint with funded transfers
from the deployer plus one approval per new account (account i approves
account i+1), then meters a fixed number of sampled transfer / approve /
transferFrom transactions at the checkpoint. Sampled transactions run the
full proof path; growth uses the unverified fast path, which produces
bit-identical state and keeps six-figure populations tractable.

Samples carry raw traces, so one run can be metered under any gas schedule
after the fact. Every metered transaction is cross-checked against a shadow
map ledger, and conservation plus the constant contract-key count are
asserted at every checkpoint.
"""

import random
from dataclasses import dataclass, field

from ..baseline import BaselineToken
from ..erc20.contract import CONTRACT_KEYS
from ..erc20.system import TokenSystem
from ..errors import AcctokenError
from ..gas import GasSchedule, RentParams, TxTrace, annual_rent, meter_transaction, rent_rate
from ..storage import FaultPolicy
from .workload import make_address, true_balance

OP_NAMES = {"transfer": "transfer", "approve": "approve", "transfer_from": "transferFrom"}
ACC = "acc"
BASELINE = "baseline"


@dataclass(frozen=True)
class Scenario:
    token: str = ACC
    checkpoints: tuple[int, ...] = (1000, 2000)
    ops_per_checkpoint: int = 100
    seed: int = 0
    grant: int = 100
    approve_allowance: int = 10**6
    supply: int = 10**15
    lift: bool = False
    fault: FaultPolicy = field(default_factory=FaultPolicy.honest)

    def __post_init__(self):
        if self.token not in (ACC, BASELINE):
            raise ValueError(f"unknown token {self.token!r}")
        if not self.checkpoints or any(
            b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])
        ):
            raise ValueError("checkpoints must be non-empty and strictly increasing")
        if self.checkpoints[0] <= 0:
            raise ValueError("checkpoints must be positive")
        if self.supply < self.grant * self.checkpoints[-1] + 1:
            raise ValueError("supply cannot fund the final checkpoint")


@dataclass
class OpSample:
    op: str
    trace: TxTrace
    proof_bytes: int
    verifications: int


@dataclass
class CheckpointSamples:
    n_accounts: int
    samples: list[OpSample]


@dataclass
class ScenarioRun:
    scenario: Scenario
    checkpoints: list[CheckpointSamples]
    dropped: int = 0
    conservation_checks: int = 0


@dataclass
class ResultRow:
    n_accounts: int
    op: str
    gas_mean: float
    gas_p95: int
    proof_bytes_mean: float
    verifications: float


class _ShadowLedger:
    """Plain-map mirror of every applied operation; the per-tx oracle."""

    def __init__(self, deployer: bytes, supply: int):
        self.token = BaselineToken.deploy(deployer, supply, keep_logs=False)

    def apply(self, kind: str, args: tuple):
        getattr(self.token, kind)(*args)

    def balance(self, owner: bytes) -> int:
        return self.token.balance_of(owner)

    def allowance(self, owner: bytes, spender: bytes) -> int:
        return self.token.allowance(owner, spender)


class _Population:
    """Growth bookkeeping: addresses by index plus the approved-pair pool."""

    def __init__(self):
        self.addresses: list[bytes] = [make_address(0)]
        self.approved_list: list[tuple[int, int]] = []
        self.approved_set: set[tuple[int, int]] = set()

    def address(self, index: int) -> bytes:
        while len(self.addresses) <= index:
            self.addresses.append(make_address(len(self.addresses)))
        return self.addresses[index]

    def add_pair(self, owner: int, spender: int):
        pair = (owner, spender)
        if pair not in self.approved_set:
            self.approved_set.add(pair)
            self.approved_list.append(pair)


def run_scenario(scenario: Scenario) -> ScenarioRun:
    pop = _Population()
    deployer = pop.address(0)
    shadow = _ShadowLedger(deployer, scenario.supply)
    if scenario.token == ACC:
        system = TokenSystem(
            deployer,
            scenario.supply,
            policy=scenario.fault,
            lift_checkupdate_precondition=scenario.lift,
        )
    else:
        system = BaselineToken.deploy(deployer, scenario.supply, keep_logs=False)

    created = 0
    run = ScenarioRun(scenario, [])
    for checkpoint in scenario.checkpoints:
        created = _grow(scenario, system, shadow, pop, created, checkpoint)
        samples = _sample_checkpoint(scenario, system, shadow, pop, checkpoint, run)
        run.checkpoints.append(CheckpointSamples(checkpoint, samples))
        _integrity(system, shadow)
        run.conservation_checks += 1
    return run


def _grow(scenario, system, shadow, pop, created, target) -> int:
    fast = isinstance(system, TokenSystem)
    deployer = pop.address(0)
    shadow_balances = shadow.token.balances
    for i in range(created + 1, target + 1):
        addr = pop.address(i)
        partner = pop.address(i + 1)
        if fast:
            system.fast_transfer(deployer, addr, scenario.grant, shadow_balances[deployer], None)
            system.fast_approve(addr, partner, scenario.approve_allowance, None)
        else:
            system.transfer(deployer, addr, scenario.grant)
            system.approve(addr, partner, scenario.approve_allowance)
        shadow.apply("transfer", (deployer, addr, scenario.grant))
        shadow.apply("approve", (addr, partner, scenario.approve_allowance))
        pop.add_pair(i, i + 1)
    return target


def _sample_checkpoint(scenario, system, shadow, pop, n_accounts, run) -> list[OpSample]:
    rng = random.Random(f"{scenario.seed}:{n_accounts}")
    samples: list[OpSample] = []
    for _ in range(scenario.ops_per_checkpoint):
        for kind in ("transfer", "approve", "transfer_from"):
            op_args = _pick_op(rng, shadow, pop, n_accounts, kind, scenario)
            if op_args is None:
                continue
            try:
                record = getattr(system, kind)(*op_args)
            except AcctokenError:
                run.dropped += 1
                continue
            shadow.apply(kind, op_args)
            _spot_check(system, shadow, op_args)
            samples.append(
                OpSample(OP_NAMES[kind], record.trace, record.bundle_bytes, record.verifications)
            )
    return samples


def _pick_op(rng, shadow, pop, n, kind, scenario):
    if kind == "transfer":
        for _ in range(64):
            src = rng.randrange(1, n + 1)
            dst = rng.randrange(1, n + 1)
            if src != dst and shadow.balance(pop.address(src)) >= 1:
                return (pop.address(src), pop.address(dst), 1)
        return None
    if kind == "approve":
        for _ in range(64):
            owner = rng.randrange(1, n + 1)
            spender = rng.randrange(1, n + 2)
            if owner != spender and (owner, spender) not in pop.approved_set:
                pop.add_pair(owner, spender)
                return (pop.address(owner), pop.address(spender), scenario.approve_allowance)
        return None
    for _ in range(64):
        owner, spender = pop.approved_list[rng.randrange(len(pop.approved_list))]
        dst = rng.randrange(1, n + 1)
        if (
            dst != owner
            and shadow.balance(pop.address(owner)) >= 1
            and shadow.allowance(pop.address(owner), pop.address(spender)) >= 1
        ):
            return (pop.address(spender), pop.address(owner), pop.address(dst), 1)
    return None


def _spot_check(system, shadow, op_args):
    # every metered transaction must leave both ledgers agreeing on the
    # balances it touched; read ledger state directly so fault policies on
    # the serving path cannot mask a divergence
    for addr in op_args:
        if isinstance(addr, bytes):
            got = true_balance(system, addr)
            want = shadow.balance(addr)
            if got != want:
                raise AssertionError(f"ledger divergence for {addr.hex()}: {got} != {want}")


def _integrity(system, shadow):
    system.check_conservation()
    shadow.token.check_conservation()
    if isinstance(system, TokenSystem):
        if system.persistent_key_count() != CONTRACT_KEYS:
            raise AssertionError("contract state grew beyond its four words")


# -- tabulation -----------------------------------------------------------------

def _percentile95(values: list[int]) -> int:
    ordered = sorted(values)
    index = max(0, -(-95 * len(ordered) // 100) - 1)
    return ordered[index]


def tabulate(run: ScenarioRun, schedule: GasSchedule) -> list[ResultRow]:
    """Meter a run's samples under ``schedule`` and aggregate per (op, n)."""
    rows = []
    for cp in run.checkpoints:
        by_op: dict[str, list[OpSample]] = {}
        for sample in cp.samples:
            by_op.setdefault(sample.op, []).append(sample)
        for op, samples in by_op.items():
            gas = [meter_transaction(schedule, s.trace).total for s in samples]
            rows.append(
                ResultRow(
                    n_accounts=cp.n_accounts,
                    op=op,
                    gas_mean=sum(gas) / len(gas),
                    gas_p95=_percentile95(gas),
                    proof_bytes_mean=sum(s.proof_bytes for s in samples) / len(samples),
                    verifications=sum(s.verifications for s in samples) / len(samples),
                )
            )
    rows.sort(key=lambda r: (r.op, r.n_accounts))
    return rows


CSV_HEADER = "n,op,gas_mean,gas_p95,proof_bytes_mean,verifications"


def rows_to_csv(rows: list[ResultRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.n_accounts},{r.op},{r.gas_mean:.2f},{r.gas_p95},"
            f"{r.proof_bytes_mean:.2f},{r.verifications:.2f}"
        )
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list[ResultRow]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognized results CSV header")
    rows = []
    for line in lines[1:]:
        n, op, gas_mean, gas_p95, proof_bytes, verifications = line.split(",")
        rows.append(
            ResultRow(int(n), op, float(gas_mean), int(gas_p95), float(proof_bytes), float(verifications))
        )
    return rows


# -- comparison and rent tables ---------------------------------------------------

@dataclass
class CompareRow:
    n_accounts: int
    op: str
    gas_a: float
    gas_b: float
    ratio_a_over_b: float


def compare(rows_a: list[ResultRow], rows_b: list[ResultRow]) -> list[CompareRow]:
    """Per-(op, n) gas ratios; both inputs must cover the same checkpoints."""
    index_b = {(r.op, r.n_accounts): r for r in rows_b}
    keys_a = {(r.op, r.n_accounts) for r in rows_a}
    if keys_a != set(index_b):
        raise ValueError("result sets cover different (op, checkpoint) grids")
    out = []
    for a in rows_a:
        b = index_b[(a.op, a.n_accounts)]
        out.append(CompareRow(a.n_accounts, a.op, a.gas_mean, b.gas_mean, a.gas_mean / b.gas_mean))
    out.sort(key=lambda r: (r.op, r.n_accounts))
    return out


@dataclass
class RentRow:
    k_total: int
    rate_wei_per_key_year: float
    annual_rent_wei: dict[int, float]


def rent_report(params: RentParams, contract_key_counts: list[int], k_totals: list[int]) -> list[RentRow]:
    rows = []
    for k_total in k_totals:
        rows.append(
            RentRow(
                k_total,
                rent_rate(params, k_total),
                {k: annual_rent(params, k, k_total) for k in contract_key_counts},
            )
        )
    return rows
