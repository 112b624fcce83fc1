import numpy as np
import pytest
from hypothesis import given, strategies as st

from slexp.internal.algebra import makeNumberField, makeResidueRing, \
    ringArith, crtSplit, crtJoin, ringFromJson, FieldFactor, FqElem
from slexp.internal.errors import NotMonic, Reducible, NotSquareFree, \
    RamifiedPrime, NotAUnit, FactorMismatch


def test_field_degree_and_discriminant():
    assert makeNumberField([1, 0]).degree == 1
    assert makeNumberField([1, 0]).discriminant == 1
    assert makeNumberField([1, 0, 1]).discriminant == -4
    assert makeNumberField([1, 0, -2]).discriminant == 8

def test_field_rejects_bad_polynomials():
    with pytest.raises(NotMonic):
        makeNumberField([2, 0])
    with pytest.raises(Reducible):
        makeNumberField([1, 0, -1])

def test_integer_crt_factors():
    ring = makeResidueRing(makeNumberField([1, 0]), 15)
    assert [ (f.p, f.k) for f in ring.factors ] == [ (3, 1), (5, 1) ]
    assert ring.cardinality == 15

def test_gaussian_factors_mod_5_and_3():
    K = makeNumberField([1, 0, 1])
    split = makeResidueRing(K, 5)
    assert [ (f.p, f.k) for f in split.factors ] == [ (5, 1), (5, 1) ]
    inert = makeResidueRing(K, 3)
    assert [ (f.p, f.k) for f in inert.factors ] == [ (3, 2) ]
    assert inert.factors[0].cardinality == 9

def test_residue_ring_errors():
    Q = makeNumberField([1, 0])
    with pytest.raises(NotSquareFree):
        makeResidueRing(Q, 12)
    with pytest.raises(RamifiedPrime):
        makeResidueRing(makeNumberField([1, 0, 1]), 2)

def test_ring_arith_examples():
    seven = makeResidueRing(makeNumberField([1, 0]), 7)
    assert ringArith(seven, 'inv', (2,)) == (4,)
    gauss5 = makeResidueRing(makeNumberField([1, 0, 1]), 5)
    assert ringArith(gauss5, 'mul', (0, 1), (0, 1)) == (4, 0)
    gauss3 = makeResidueRing(makeNumberField([1, 0, 1]), 3)
    assert ringArith(gauss3, 'inv', (0, 1)) == (0, 2)

def test_non_unit_has_no_inverse():
    ring = makeResidueRing(makeNumberField([1, 0]), 15)
    with pytest.raises(NotAUnit):
        ringArith(ring, 'inv', (3,))

def test_crt_split_and_join():
    ring = makeResidueRing(makeNumberField([1, 0]), 15)
    parts = crtSplit(ring, (7,))
    assert [ p.coeffs for p in parts ] == [ (1,), (2,) ]
    assert crtJoin(ring, parts) == (7,)
    assert crtJoin(ring, list(reversed(parts))) == (7,)

def test_theta_splits_into_roots():
    ring = makeResidueRing(makeNumberField([1, 0, 1]), 5)
    assert [ p.coeffs for p in crtSplit(ring, (0, 1)) ] == [ (2,), (3,) ]

def test_crt_join_needs_every_factor():
    ring = makeResidueRing(makeNumberField([1, 0]), 15)
    with pytest.raises(FactorMismatch):
        crtJoin(ring, crtSplit(ring, (7,))[:1])

def test_descriptor_round_trip():
    ring = makeResidueRing(makeNumberField([1, 0, -2]), 35)
    assert ringFromJson(ring.toJson()) == ring

def test_field_factor_subfields():
    F9 = makeResidueRing(makeNumberField([1, 0, 1]), 3).factors[0]
    assert F9.subfieldDegrees() == [1]
    in_f3 = [ x for x in F9.elements() if F9.inSubfield(x, 1) ]
    assert sorted(in_f3) == [ (0, 0), (1, 0), (2, 0) ]
    assert all(F9.mul(x, F9.inv(x)) == F9.one() for x in F9.units())

def test_fq_elem_arithmetic():
    F7 = FieldFactor(7, (0, 1))
    a = FqElem(F7, (3,))
    b = FqElem(F7, (5,))
    assert (a * b).coeffs == (1,)
    assert (a + b).coeffs == (1,)
    assert a.inverse() == b


RINGS = [ ([1, 0], 15), ([1, 0, 1], 15), ([1, 0, -2], 35) ]

@given(
    st.sampled_from(RINGS),
    st.lists(st.integers(0, 10**6), min_size=4, max_size=4)
    )
def test_split_is_multiplicative(case, values):
    f, q = case
    ring = makeResidueRing(makeNumberField(f), q)
    r = ring.degree
    x = tuple(v % q for v in values[:r])
    y = tuple(v % q for v in values[2:2+r])
    xs, ys = ring.split(x), ring.split(y)
    product = ring.split(ring.mul(x, y))
    assert product == [ F.mul(a, b) for F, a, b in zip(ring.factors, xs, ys) ]
    assert ring.split(ring.add(x, y)) \
        == [ F.add(a, b) for F, a, b in zip(ring.factors, xs, ys) ]
    assert ring.join(xs) == x

@pytest.mark.parametrize("case", RINGS)
def test_split_is_multiplicative_on_many_pairs(case):
    f, q = case
    ring = makeResidueRing(makeNumberField(f), q)
    rng = np.random.default_rng(q)
    values = rng.integers(0, q, size=(10000, 2, ring.degree))
    for x, y in values:
        x, y = tuple(int(c) for c in x), tuple(int(c) for c in y)
        expected = [ F.mul(a, b)
            for F, a, b in zip(ring.factors, ring.split(x), ring.split(y)) ]
        assert ring.split(ring.mul(x, y)) == expected

@given(st.integers(1, 34), st.integers(0, 34))
def test_units_invert(a, b):
    ring = makeResidueRing(makeNumberField([1, 0, -2]), 35)
    x = (a, b)
    if ring.isUnit(x):
        assert ring.mul(x, ring.inv(x)) == ring.one()
    else:
        with pytest.raises(NotAUnit):
            ring.inv(x)
