import hypothesis
import numpy as np
import pytest

from slexp.internal.algebra import makeNumberField, makeResidueRing
from slexp.internal.groups import GroupSpec, GroupTable, unipotentPair, \
    symmetrize

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile(
    "thorough", max_examples=200, deadline=None
    )
hypothesis.settings.load_profile("fast")


@pytest.fixture(scope="session")
def rationals():
    return makeNumberField([1, 0])

def primeRing(p):
    return makeResidueRing(makeNumberField([1, 0]), p)

def unipotentSet(ring):
    return symmetrize(unipotentPair(ring))

@pytest.fixture(scope="session")
def sl2f3():
    ring = primeRing(3)
    return GroupTable.fromSpec(GroupSpec(2, ring)), unipotentSet(ring)

@pytest.fixture(scope="session")
def sl2f5():
    ring = primeRing(5)
    return GroupTable.fromSpec(GroupSpec(2, ring)), unipotentSet(ring)

@pytest.fixture(scope="session")
def sl2f7():
    ring = primeRing(7)
    return GroupTable.fromSpec(GroupSpec(2, ring)), unipotentSet(ring)

@pytest.fixture(scope="session")
def sl2f11():
    ring = primeRing(11)
    return GroupTable.fromSpec(GroupSpec(2, ring)), unipotentSet(ring)

@pytest.fixture(scope="session")
def sl2f13():
    ring = primeRing(13)
    return GroupTable.fromSpec(GroupSpec(2, ring)), unipotentSet(ring)
