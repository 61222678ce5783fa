"""Storage network: serving, chained update building, commits, fault injection."""

import pytest

from acctoken.accumulator import BOTTOM, belongs, check_update, decode_witness, witness_size_bytes
from acctoken.errors import AlreadyPresent, NotPresent, StorageError, Unavailable
from acctoken.storage import AccumulatorId, FaultPolicy, StorageNetwork

AID = AccumulatorId("balances", "test-0")


def fresh_network(policy=None, elements=()):
    network = StorageNetwork(policy)
    network.register(AID, index_prefix_len=2)
    for element in elements:
        network.commit(AID, "add", element)
    return network


class TestRegistry:
    def test_register_returns_initial_value(self):
        network = StorageNetwork()
        acc0 = network.register(AID)
        assert acc0 == network.accumulator_value(AID)

    def test_double_register_rejected(self):
        network = fresh_network()
        with pytest.raises(StorageError):
            network.register(AID)

    def test_unknown_id_rejected(self):
        network = StorageNetwork()
        with pytest.raises(StorageError):
            network.fetch_witness(AccumulatorId("balances", "nope"), b"x")

    def test_id_digests_are_distinct(self):
        a = AccumulatorId("balances", "t")
        b = AccumulatorId("allowed-addresses", "t")
        c = AccumulatorId("balances", "u")
        assert len({a.digest(), b.digest(), c.digest()}) == 3


class TestHonestServing:
    def test_fetch_member(self):
        network = fresh_network(elements=[b"aa-1", b"ab-2"])
        acc = network.accumulator_value(AID)
        payload = network.fetch_witness(AID, b"aa-1")
        assert belongs(acc, b"aa-1", payload) == 1

    def test_fetch_non_member(self):
        network = fresh_network(elements=[b"aa-1"])
        acc = network.accumulator_value(AID)
        assert belongs(acc, b"zz", network.fetch_witness(AID, b"zz")) == 0

    def test_lookup_by_prefix(self):
        network = fresh_network(elements=[b"aa-1", b"aa-2", b"ab-3"])
        assert network.lookup(AID, b"aa") == [b"aa-1", b"aa-2"]
        assert network.lookup(AID, b"zz") == []
        with pytest.raises(StorageError):
            network.lookup(AID, b"a")  # wrong prefix length

    def test_byte_accounting_tracks_witness_sizes(self):
        network = fresh_network(elements=[b"aa-%d" % i for i in range(50)])
        expected = 0
        for i in range(50):
            payload = network.fetch_witness(AID, b"aa-%d" % i)
            expected += witness_size_bytes(decode_witness(payload))
        assert network.stats.witness_fetches == 50
        assert network.stats.witness_bytes == expected
        # the serving API never ships a memory: payloads stay witness-sized
        n = len(network._entry(AID).memory)
        assert network.stats.witness_bytes < n * 33 * 50


class TestBuildUpdateWitness:
    def test_prediction_matches_commit(self):
        network = fresh_network(elements=[b"aa-1"])
        acc = network.accumulator_value(AID)
        predicted, payload = network.build_update_witness(AID, "add", b"ab-9")
        assert check_update(acc, predicted, b"ab-9", payload) == 1
        committed = network.commit(AID, "add", b"ab-9")
        assert committed == predicted

    def test_build_does_not_mutate(self):
        network = fresh_network(elements=[b"aa-1"])
        before = network.accumulator_value(AID)
        network.build_update_witness(AID, "add", b"ab-9")
        assert network.accumulator_value(AID) == before
        assert network.epoch(AID) == 1

    def test_build_mirrors_preconditions(self):
        network = fresh_network(elements=[b"aa-1"])
        with pytest.raises(AlreadyPresent):
            network.build_update_witness(AID, "add", b"aa-1")
        with pytest.raises(NotPresent):
            network.build_update_witness(AID, "del", b"zz")

    def test_chained_builds_compose(self):
        # del then add, second witness computed on the post-first snapshot
        network = fresh_network(elements=[b"aa-100"])
        acc = network.accumulator_value(AID)
        mid, w_del = network.build_update_witness(AID, "del", b"aa-100")
        end, w_add = network.build_update_witness(AID, "add", b"aa-70", base=mid)
        assert check_update(acc, mid, b"aa-100", w_del) == 1
        assert check_update(mid, end, b"aa-70", w_add) == 1
        # sequential oracle: committing the same ops lands on the same values
        assert network.commit(AID, "del", b"aa-100") == mid
        assert network.commit(AID, "add", b"aa-70") == end

    def test_unknown_base_rejected(self):
        network = fresh_network(elements=[b"aa-1"])
        with pytest.raises(StorageError):
            network.build_update_witness(AID, "add", b"ab-1", base=b"\x00" * 32)

    def test_snapshots_cleared_by_commit(self):
        network = fresh_network(elements=[b"aa-1"])
        mid, _ = network.build_update_witness(AID, "del", b"aa-1")
        network.commit(AID, "add", b"ab-2")
        with pytest.raises(StorageError):
            network.build_update_witness(AID, "add", b"ac-3", base=mid)


class TestCommit:
    def test_round_trip_and_inverse(self):
        network = fresh_network()
        acc0 = network.accumulator_value(AID)
        network.commit(AID, "add", b"aa-1")
        assert network.commit(AID, "del", b"aa-1") == acc0

    def test_duplicate_add_rejected(self):
        network = fresh_network(elements=[b"aa-1"])
        with pytest.raises(AlreadyPresent):
            network.commit(AID, "add", b"aa-1")
        with pytest.raises(NotPresent):
            network.commit(AID, "del", b"zz")

    def test_epoch_advances(self):
        network = fresh_network()
        network.commit(AID, "add", b"aa-1")
        network.commit(AID, "add", b"ab-2")
        assert network.epoch(AID) == 2


class TestCorruptBits:
    def test_full_corruption_detected_by_client(self):
        network = fresh_network(FaultPolicy.corrupt_bits(1.0, seed=3), [b"aa-1"])
        acc = network.accumulator_value(AID)
        payload = network.fetch_witness(AID, b"aa-1")
        assert belongs(acc, b"aa-1", payload) is BOTTOM

    def test_partial_corruption_never_verifies_wrongly(self):
        network = fresh_network(FaultPolicy.corrupt_bits(0.10, seed=4), [b"aa-%d" % i for i in range(32)])
        acc = network.accumulator_value(AID)
        clean = 0
        for i in range(32):
            verdict = belongs(acc, b"aa-%d" % i, network.fetch_witness(AID, b"aa-%d" % i))
            if verdict == 1:
                clean += 1  # the fault left this payload untouched
            else:
                assert verdict is BOTTOM
        assert clean < 32

    def test_determinism_under_seed(self):
        a = fresh_network(FaultPolicy.corrupt_bits(0.3, seed=9), [b"aa-1", b"ab-2"])
        b = fresh_network(FaultPolicy.corrupt_bits(0.3, seed=9), [b"aa-1", b"ab-2"])
        assert a.fetch_witness(AID, b"aa-1") == b.fetch_witness(AID, b"aa-1")
        assert a.fetch_witness(AID, b"zz") == b.fetch_witness(AID, b"zz")


class TestStale:
    def test_witness_lags_one_epoch(self):
        network = fresh_network(FaultPolicy.stale(1), [b"aa-1"])
        acc_now = network.accumulator_value(AID)
        network.commit(AID, "add", b"ab-2")
        payload = network.fetch_witness(AID, b"ab-2")
        # served against the pre-commit snapshot: fails for the current value
        assert belongs(network.accumulator_value(AID), b"ab-2", payload) is BOTTOM
        assert belongs(acc_now, b"ab-2", payload) == 0

    def test_stale_lookup_rolls_back_elements(self):
        network = fresh_network(FaultPolicy.stale(1), [b"aa-1"])
        network.commit(AID, "add", b"aa-2")
        assert network.lookup(AID, b"aa") == [b"aa-1"]
        network.commit(AID, "add", b"ab-3")
        assert sorted(network.lookup(AID, b"aa")) == [b"aa-1", b"aa-2"]

    def test_zero_lag_is_honest(self):
        network = fresh_network(FaultPolicy.stale(0), [b"aa-1"])
        acc = network.accumulator_value(AID)
        assert belongs(acc, b"aa-1", network.fetch_witness(AID, b"aa-1")) == 1


class TestUnavailable:
    def test_always_refuses(self):
        network = fresh_network(FaultPolicy.unavailable(1.0), [b"aa-1"])
        with pytest.raises(Unavailable):
            network.fetch_witness(AID, b"aa-1")
        with pytest.raises(Unavailable):
            network.build_update_witness(AID, "add", b"ab-2")

    def test_sometimes_refuses_deterministically(self):
        outcomes = []
        for _ in range(2):
            network = fresh_network(FaultPolicy.unavailable(0.5, seed=5), [b"aa-1"])
            run = []
            for _ in range(20):
                try:
                    network.fetch_witness(AID, b"aa-1")
                    run.append(True)
                except Unavailable:
                    run.append(False)
            outcomes.append(run)
        assert outcomes[0] == outcomes[1]
        assert True in outcomes[0] and False in outcomes[0]


class TestPolicyValidation:
    def test_ranges(self):
        with pytest.raises(ValueError):
            FaultPolicy.corrupt_bits(1.5)
        with pytest.raises(ValueError):
            FaultPolicy.stale(-1)
        with pytest.raises(ValueError):
            FaultPolicy.unavailable(2.0)
        with pytest.raises(ValueError):
            FaultPolicy(mode="weird")
