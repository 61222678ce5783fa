import random

import pytest

from acctoken.accumulator import setup, update


@pytest.fixture(scope="session")
def large_tree_2_16():
    """One 2^16-element accumulator shared by size/benchmark-ish tests."""
    rng = random.Random(160_001)
    elements = [rng.randbytes(16) for _ in range(2**16)]
    acc, memory = setup(256)
    for element in elements:
        acc = update("add", acc, memory, element).acc_after
    return acc, memory, elements
