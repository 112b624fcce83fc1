import math

import pytest
from hypothesis import given, strategies as st

from slexp.internal.algebra import makeNumberField, makeResidueRing
from slexp.internal.groups import GroupSpec, GroupTable, enumerateGroup, \
    makeGroupElem, identity, project, factorEntries, subgroupAtlas, closure, \
    projectionProfile, factorwiseDistance, centralizerIndex, \
    atlasIndexAudit, torusClassIntersections, SubgroupDescriptor, \
    formatGenerators, parseGenerators, structuralCheck, reduceGroupElem, \
    isSymmetric, symmetrize, unipotentPair, homomorphismDefect
from slexp.internal.errors import NotInGroup, TooLarge, RingMismatch

from conftest import primeRing


@pytest.fixture(scope="module")
def sl2z15():
    ring = makeResidueRing(makeNumberField([1, 0]), 15)
    spec = GroupSpec(2, ring)
    return spec, enumerateGroup(spec)


@pytest.mark.parametrize("p,order", [ (2, 6), (3, 24), (5, 120), (7, 336) ])
def test_sl2_orders(p, order):
    spec = GroupSpec(2, primeRing(p))
    assert spec.order == order
    assert len(enumerateGroup(spec)) == order

def test_crt_product_order(sl2z15):
    spec, elements = sl2z15
    assert len(elements) == 2880
    assert len(set(g.encode() for g in elements)) == 2880

def test_enumeration_cap():
    with pytest.raises(TooLarge):
        enumerateGroup(GroupSpec(2, primeRing(53)))

def test_products_and_inverses():
    ring = primeRing(5)
    a = makeGroupElem(ring, [[1, 1], [0, 1]])
    b = makeGroupElem(ring, [[1, 0], [1, 1]])
    assert a * b == makeGroupElem(ring, [[2, 1], [1, 1]])
    Z = makeNumberField([1, 0])
    u = makeGroupElem(Z, [[1, 1], [0, 1]])
    assert u.inverse() == makeGroupElem(Z, [[1, -1], [0, 1]])
    assert (u * u.inverse()).isIdentity()

def test_determinant_is_checked():
    with pytest.raises(NotInGroup):
        makeGroupElem(primeRing(5), [[1, 1], [1, 1]])

def test_mixed_rings_rejected():
    a = makeGroupElem(primeRing(5), [[1, 1], [0, 1]])
    b = makeGroupElem(primeRing(7), [[1, 1], [0, 1]])
    with pytest.raises(RingMismatch):
        a * b

@given(st.integers(0, 2879), st.integers(0, 2879))
def test_group_axioms_and_projection(sl2z15, i, j):
    spec, elements = sl2z15
    g, h = elements[i], elements[j]
    assert (g * g.inverse()).isIdentity()
    for primes in ([3], [5]):
        assert project(g * h, primes=primes) \
            == project(g, primes=primes) * project(h, primes=primes)

def test_project_examples(sl2z15):
    spec, elements = sl2z15
    ring = spec.ring
    g = makeGroupElem(ring, [[7, 0], [0, 13]])
    assert project(g, primes=[3]).isIdentity()
    assert not project(g, primes=[5]).isIdentity()
    assert project(identity(ring, 2), target=[1]).isIdentity()

def test_reduce_from_integers():
    Z = makeNumberField([1, 0])
    ring = makeResidueRing(Z, 7)
    g = makeGroupElem(Z, [[8, 15], [1, 2]])
    assert reduceGroupElem(g, ring) == makeGroupElem(ring, [[1, 1], [1, 2]])

def test_atlas_sizes():
    atlas = { H.kind: H for H in subgroupAtlas(3) }
    assert atlas['Borel'].size == 6
    assert atlas['Borel'].index == 4
    atlas = { H.kind: H for H in subgroupAtlas(5) }
    assert atlas['Center'].size == 2
    assert atlas['SplitTorus'].size == 4
    assert atlas['NonsplitTorus'].size == 6
    assert atlas['TorusNormalizerSplit'].size == 8
    assert atlas['TorusNormalizerNonsplit'].size == 12
    assert all(H.verifySubgroup() for H in atlas.values())

@pytest.mark.parametrize("p", [5, 7, 11])
def test_atlas_index_audit(p):
    df = atlasIndexAudit(p)
    assert df['subgroup'].all()
    assert df['ok'].all()
    assert (df['index'] >= p + 1).all()

@pytest.mark.parametrize("p", [5, 7, 11])
def test_torus_intersections_land_in_center(p):
    report = torusClassIntersections(p)
    assert report['members'] == p * (p + 1) // 2 + p * (p - 1) // 2
    assert report['ok']

def test_closure_examples():
    ring3 = primeRing(3)
    H = closure(unipotentPair(ring3))
    assert H.size == 24
    assert H.is_full
    trivial = closure([identity(ring3, 2)])
    assert trivial.size == 1
    assert trivial.index == 24
    ring5 = primeRing(5)
    borel = closure([
        makeGroupElem(ring5, [[2, 0], [0, 3]]),
        makeGroupElem(ring5, [[1, 1], [0, 1]]),
        ])
    assert borel.size == 20
    assert borel.index == 6

def test_projection_profiles(sl2z15):
    spec, elements = sl2z15
    one5 = ((1,), (0,), (0,), (1,))
    first = SubgroupDescriptor('Explicit', spec,
        [ g for g in elements if factorEntries(g)[1] == one5 ])
    df = projectionProfile(first)
    assert df['surjective'].tolist() == [True, False]
    assert df['image_index'].tolist() == [1, 120]

    borel3 = SubgroupDescriptor('Explicit', spec,
        [ g for g in elements if factorEntries(g)[0][2] == (0,) ])
    df = projectionProfile(borel3)
    assert df['image_index'].tolist() == [4, 1]

    full = SubgroupDescriptor('Explicit', spec, elements)
    assert projectionProfile(full)['surjective'].all()

def test_factorwise_distance(sl2z15):
    spec, elements = sl2z15
    one5 = ((1,), (0,), (0,), (1,))
    g = identity(spec.ring, 2)
    h = next(x for x in elements
        if factorEntries(x)[1] == one5 and not x.isIdentity())
    assert factorwiseDistance(g, g) == 0
    assert factorwiseDistance(g, h) == pytest.approx(math.log(24))

@given(st.integers(0, 2879), st.integers(0, 2879), st.integers(0, 2879))
def test_distance_triangle_inequality(sl2z15, i, j, k):
    spec, elements = sl2z15
    a, b, c = elements[i], elements[j], elements[k]
    assert factorwiseDistance(a, c) \
        <= factorwiseDistance(a, b) + factorwiseDistance(b, c) + 1e-12

def test_homomorphism_defect_of_projection(sl2z15):
    spec, elements = sl2z15
    sample = elements[::97]
    assert homomorphismDefect(lambda g: g, sample) == 0

def test_centralizer_index():
    ring = primeRing(5)
    assert centralizerIndex(identity(ring, 2)) == 1
    assert centralizerIndex(makeGroupElem(ring, [[-1, 0], [0, -1]])) == 1
    assert centralizerIndex(makeGroupElem(ring, [[1, 1], [0, 1]])) == 12

def test_structural_check(sl2z15):
    spec, elements = sl2z15
    report = structuralCheck(spec)
    assert report['ok']
    assert report['max_multiplicity'] == 1

def test_generator_file_round_trip():
    ring = makeResidueRing(makeNumberField([1, 0, 1]), 15)
    S = [ makeGroupElem(ring, [[1, '0,1'], [0, 1]]),
        makeGroupElem(ring, [[1, 0], ['0,1', 1]]) ]
    parsed_ring, d, parsed = parseGenerators(formatGenerators(S))
    assert parsed_ring == ring
    assert d == 2
    assert parsed == S

def test_symmetrize():
    S = unipotentPair(primeRing(7))
    assert not isSymmetric(S)
    assert isSymmetric(symmetrize(S))

def test_group_table(sl2f5):
    table, S = sl2f5
    assert table.size == 120
    assert table.isFull()
    for s in S:
        left = table.leftTable(s)
        for i in (0, 17, 119):
            assert table.elements[left[i]] == s * table.elements[i]
    assert table.elements[table.identity_index].isIdentity()

def test_table_from_generators_matches_spec(sl2f5):
    table, S = sl2f5
    built = GroupTable.fromGenerators(S)
    assert built.size == table.size
    assert [ g.encode() for g in built.elements ] \
        == [ g.encode() for g in table.elements ]

def test_coset_labels(sl2f5):
    table, S = sl2f5
    borel = { H.kind: H for H in subgroupAtlas(5) }['Borel']
    labels = table.cosetLabels(borel.materialize(table.elements))
    assert len(set(labels.tolist())) == 6
