"""Client-side proof building and verified reads.

Clients never trust the storage network: every served payload is checked
against the contract's current accumulator values before use, so corrupted or
stale data surfaces as VerificationFailed here instead of reaching the chain.
Update witnesses are chained across the simulated snapshots the storage
exposes, in the same order the contract will verify and commit them.
"""

from ..accumulator import BOTTOM, belongs, check_update, decode_witness
from ..errors import (
    BundleSchemaMismatch,
    InsufficientAllowance,
    InsufficientBalance,
    NotApproved,
    VerificationFailed,
    WitnessDecodeError,
)
from ..storage import AccumulatorId, StorageNetwork
from . import bundle as pb
from .bundle import BundleEntry, OpTag, ProofBundle
from .contract import AccTokenContract
from .elements import (
    allowance_element,
    allowance_prefix,
    balance_element,
    balance_prefix,
    check_amount,
    decode_allowance_element,
    decode_balance_element,
    pair_element,
)


class TokenClient:
    def __init__(
        self,
        contract: AccTokenContract,
        network: StorageNetwork,
        acc_ids: dict[str, AccumulatorId],
    ):
        self.contract = contract
        self.network = network
        self.acc_ids = acc_ids
        self.lift = contract.lift

    # -- verified fetch helpers -------------------------------------------------

    def _acc_value(self, name: str) -> bytes:
        return self.contract.state.value_of(name)

    def _fetch_verified(self, name: str, element: bytes, want: int):
        """Fetch a (non)membership witness and insist on the expected verdict."""
        payload = self.network.fetch_witness(self.acc_ids[name], element)
        try:
            w = decode_witness(payload)
        except WitnessDecodeError as exc:
            raise VerificationFailed(f"storage served an unparseable witness: {exc}") from None
        verdict = belongs(self._acc_value(name), element, w)
        if verdict is BOTTOM or verdict != want:
            raise VerificationFailed(
                f"witness for {name} verified to {verdict!r}, expected {want}"
            )
        return w

    def _balance_entry(self, owner: bytes) -> tuple[bytes, int] | None:
        """The accumulated (owner, amount) tuple, or None if the owner has none."""
        found = self.network.lookup(self.acc_ids[pb.BALANCES], balance_prefix(owner))
        if not found:
            return None
        try:
            candidates = sorted(decode_balance_element(e) for e in found)
        except ValueError as exc:
            raise VerificationFailed(f"storage served a malformed balance tuple: {exc}") from None
        addr, amount = candidates[0]
        if addr != owner:
            raise VerificationFailed("storage answered a balance lookup for the wrong owner")
        return addr, amount

    def _allowance_entry(self, owner: bytes, spender: bytes) -> int | None:
        found = self.network.lookup(
            self.acc_ids[pb.ALLOWED_BALANCES], allowance_prefix(owner, spender)
        )
        if not found:
            return None
        try:
            amounts = sorted(decode_allowance_element(e)[2] for e in found)
        except ValueError as exc:
            raise VerificationFailed(f"storage served a malformed allowance: {exc}") from None
        return amounts[0]

    # -- verified reads ------------------------------------------------------------

    def balance_of(self, owner: bytes) -> int:
        """Owner's balance, proven against the contract's current accumulator."""
        entry = self._balance_entry(owner)
        if entry is None:
            self._fetch_verified(pb.BALANCES, balance_element(owner, 0), 0)
            return 0
        _, amount = entry
        self._fetch_verified(pb.BALANCES, balance_element(owner, amount), 1)
        return amount

    def allowance(self, owner: bytes, spender: bytes) -> int:
        """Spender's remaining allowance from owner, proven like balance_of."""
        pair = pair_element(owner, spender)
        payload = self.network.fetch_witness(self.acc_ids[pb.ALLOWED_ADDRESSES], pair)
        try:
            verdict = belongs(self._acc_value(pb.ALLOWED_ADDRESSES), pair, decode_witness(payload))
        except WitnessDecodeError:
            raise VerificationFailed("storage served an unparseable pair witness") from None
        if verdict == 0:
            return 0
        if verdict is BOTTOM:
            raise VerificationFailed("pair witness did not verify")
        amount = self._allowance_entry(owner, spender)
        if amount is None:
            raise VerificationFailed("approved pair has no allowance tuple in storage")
        self._fetch_verified(pb.ALLOWED_BALANCES, allowance_element(owner, spender, amount), 1)
        return amount

    # -- update chains ----------------------------------------------------------------

    def _chain(self, name: str, plan: list[tuple[str, bytes]]):
        """Build update witnesses for ``plan``, each on top of the previous."""
        acc_id = self.acc_ids[name]
        entries = []
        running = self._acc_value(name)
        base: bytes | None = None
        for op, element in plan:
            predicted, payload = self.network.build_update_witness(acc_id, op, element, base=base)
            try:
                w = decode_witness(payload)
            except WitnessDecodeError as exc:
                raise VerificationFailed(f"storage served an unparseable update witness: {exc}") from None
            if check_update(running, predicted, element, w) != 1:
                raise VerificationFailed(f"update witness for {name} did not verify")
            claim = pb.UPDATE_ADD if op == "add" else pb.UPDATE_DEL
            entries.append(BundleEntry(pb.purpose(name, claim), w, predicted))
            running = predicted
            base = predicted
        return entries

    def _strip_if_lifted(self, membership_entries: list[BundleEntry]) -> list[BundleEntry]:
        return [] if self.lift else membership_entries

    # -- bundle builders ---------------------------------------------------------------

    def build_transfer(self, sender: bytes, to: bytes, tokens: int) -> ProofBundle:
        check_amount(tokens)
        if sender == to:
            raise BundleSchemaMismatch("transfer to self has no bundle schema")
        entry = self._balance_entry(sender)
        if entry is None:
            raise InsufficientBalance("sender holds no balance tuple")
        _, y1 = entry
        if y1 < tokens:
            raise InsufficientBalance(f"balance {y1} cannot cover {tokens}")
        membership = [
            BundleEntry(
                pb.purpose(pb.BALANCES, pb.MEMBER),
                self._fetch_verified(pb.BALANCES, balance_element(sender, y1), 1),
            )
        ]
        to_entry = self._balance_entry(to)
        if to_entry is None:
            membership.append(
                BundleEntry(
                    pb.purpose(pb.BALANCES, pb.NON_MEMBER),
                    self._fetch_verified(pb.BALANCES, balance_element(to, 0), 0),
                )
            )
            announced = (y1,)
            plan = [
                ("del", balance_element(sender, y1)),
                ("add", balance_element(sender, y1 - tokens)),
                ("add", balance_element(to, tokens)),
            ]
        else:
            _, y2 = to_entry
            membership.append(
                BundleEntry(
                    pb.purpose(pb.BALANCES, pb.MEMBER),
                    self._fetch_verified(pb.BALANCES, balance_element(to, y2), 1),
                )
            )
            announced = (y1, y2)
            plan = [
                ("del", balance_element(sender, y1)),
                ("del", balance_element(to, y2)),
                ("add", balance_element(sender, y1 - tokens)),
                ("add", balance_element(to, y2 + tokens)),
            ]
        entries = self._strip_if_lifted(membership) + self._chain(pb.BALANCES, plan)
        return ProofBundle(
            OpTag.TRANSFER,
            entries,
            announced,
            base_accs={pb.BALANCES: self._acc_value(pb.BALANCES)},
        )

    def build_approve(self, owner: bytes, spender: bytes, tokens: int) -> ProofBundle:
        check_amount(tokens)
        pair = pair_element(owner, spender)
        base_accs = {
            pb.ALLOWED_ADDRESSES: self._acc_value(pb.ALLOWED_ADDRESSES),
            pb.ALLOWED_BALANCES: self._acc_value(pb.ALLOWED_BALANCES),
        }
        old = self._allowance_entry(owner, spender)
        if old is None:
            # first approval for this pair
            membership = [
                BundleEntry(
                    pb.purpose(pb.ALLOWED_ADDRESSES, pb.NON_MEMBER),
                    self._fetch_verified(pb.ALLOWED_ADDRESSES, pair, 0),
                )
            ]
            entries = (
                self._strip_if_lifted(membership)
                + self._chain(pb.ALLOWED_ADDRESSES, [("add", pair)])
                + self._chain(pb.ALLOWED_BALANCES, [("add", allowance_element(owner, spender, tokens))])
            )
            return ProofBundle(OpTag.APPROVE, entries, (), base_accs=base_accs)
        membership = [
            BundleEntry(
                pb.purpose(pb.ALLOWED_BALANCES, pb.MEMBER),
                self._fetch_verified(pb.ALLOWED_BALANCES, allowance_element(owner, spender, old), 1),
            )
        ]
        plan = [
            ("del", allowance_element(owner, spender, old)),
            ("add", allowance_element(owner, spender, tokens)),
        ]
        entries = self._strip_if_lifted(membership) + self._chain(pb.ALLOWED_BALANCES, plan)
        return ProofBundle(OpTag.APPROVE, entries, (old,), base_accs=base_accs)

    def build_transfer_from(
        self, spender: bytes, sender: bytes, to: bytes, tokens: int
    ) -> ProofBundle:
        check_amount(tokens)
        if sender == to:
            raise BundleSchemaMismatch("transfer to self has no bundle schema")
        pair = pair_element(sender, spender)
        allowed = self._allowance_entry(sender, spender)
        if allowed is None:
            raise NotApproved("spender was never approved by this owner")
        if allowed < tokens:
            raise InsufficientAllowance(f"allowance {allowed} cannot cover {tokens}")
        entry = self._balance_entry(sender)
        if entry is None:
            raise InsufficientBalance("owner holds no balance tuple")
        _, y1 = entry
        if y1 < tokens:
            raise InsufficientBalance(f"balance {y1} cannot cover {tokens}")
        old_allowance = allowance_element(sender, spender, allowed)
        membership = [
            BundleEntry(
                pb.purpose(pb.ALLOWED_ADDRESSES, pb.MEMBER),
                self._fetch_verified(pb.ALLOWED_ADDRESSES, pair, 1),
            ),
            BundleEntry(
                pb.purpose(pb.ALLOWED_BALANCES, pb.MEMBER),
                self._fetch_verified(pb.ALLOWED_BALANCES, old_allowance, 1),
            ),
            BundleEntry(
                pb.purpose(pb.BALANCES, pb.MEMBER),
                self._fetch_verified(pb.BALANCES, balance_element(sender, y1), 1),
            ),
        ]
        to_entry = self._balance_entry(to)
        if to_entry is None:
            membership.append(
                BundleEntry(
                    pb.purpose(pb.BALANCES, pb.NON_MEMBER),
                    self._fetch_verified(pb.BALANCES, balance_element(to, 0), 0),
                )
            )
            announced = (allowed, y1)
            balance_plan = [
                ("del", balance_element(sender, y1)),
                ("add", balance_element(sender, y1 - tokens)),
                ("add", balance_element(to, tokens)),
            ]
        else:
            _, y2 = to_entry
            membership.append(
                BundleEntry(
                    pb.purpose(pb.BALANCES, pb.MEMBER),
                    self._fetch_verified(pb.BALANCES, balance_element(to, y2), 1),
                )
            )
            announced = (allowed, y1, y2)
            balance_plan = [
                ("del", balance_element(sender, y1)),
                ("del", balance_element(to, y2)),
                ("add", balance_element(sender, y1 - tokens)),
                ("add", balance_element(to, y2 + tokens)),
            ]
        allowance_plan = [
            ("del", old_allowance),
            ("add", allowance_element(sender, spender, allowed - tokens)),
        ]
        entries = (
            self._strip_if_lifted(membership)
            + self._chain(pb.BALANCES, balance_plan)
            + self._chain(pb.ALLOWED_BALANCES, allowance_plan)
        )
        return ProofBundle(
            OpTag.TRANSFER_FROM,
            entries,
            announced,
            base_accs={
                pb.BALANCES: self._acc_value(pb.BALANCES),
                pb.ALLOWED_ADDRESSES: self._acc_value(pb.ALLOWED_ADDRESSES),
                pb.ALLOWED_BALANCES: self._acc_value(pb.ALLOWED_BALANCES),
            },
        )
