import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from slexp.internal.groups import SubgroupDescriptor, makeGroupElem, \
    identity, subgroupAtlas, symmetrize
from slexp.internal.walks import pointMass, countingMeasure, \
    uniformMeasure, convolve, walkPower, walkSteps, cosetMass, \
    escapeProfile, entropy, partitionEntropy, conditionalEntropy, \
    joinPartitions, measureFromProbabilities, \
    ballSize, wordCountBound, reduceWord, WordPredicate, countReducedWords, \
    enumerateWalkLengths, freeWalkStats, freeEscapeMass, flatteningTrace, \
    flatteningExponent, bsgExtract, formatSnapshot, parseSnapshot
from slexp.internal.spectral import buildOperator
from slexp.internal.errors import NotProper, ModeMismatch, BudgetExceeded, \
    NotAPartition, HypothesisNotMet


def _atlas(table, kind):
    H = { H.kind: H for H in subgroupAtlas(table.ring.factors[0]) }[kind]
    return H.materialize(table.elements)

def test_point_masses_convolve_to_product(sl2f5):
    table, S = sl2f5
    a, b = S[0], S[1]
    conv = convolve(pointMass(table, a), pointMass(table, b))
    assert conv.value(a * b) == 1
    assert conv.supportSize() == 1

def test_identity_is_neutral(sl2f5):
    table, S = sl2f5
    chi = countingMeasure(table, S)
    conv = convolve(chi, pointMass(table, identity(table.ring, 2)))
    assert conv.support() == chi.support()

def test_convolution_order(sl2f5):
    table, S = sl2f5
    a, b = S[0], S[1]
    mu = countingMeasure(table, [a, b])
    nu = countingMeasure(table, [b])
    conv = convolve(mu, nu)
    assert conv.value(a * b) == Fraction(1, 2)
    assert conv.value(b * b) == Fraction(1, 2)

def test_walk_power_matches_repeated_convolution(sl2f5):
    table, S = sl2f5
    chi = countingMeasure(table, S)
    twice = convolve(chi, chi)
    walk = walkPower(table, S, 2)
    assert twice.support() == walk.support()
    assert walk.total() == 1

@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_norm_is_return_probability(sl2f5, k):
    table, S = sl2f5
    walks = list(walkSteps(table, S, 2 * k))
    e = identity(table.ring, 2)
    assert walks[k - 1].l2NormSquared() == walks[2 * k - 1].value(e)

def test_float_walk_agrees_with_exact(sl2f5):
    table, S = sl2f5
    exact = walkPower(table, S, 4)
    inexact = walkPower(table, S, 4, exact=False)
    assert np.allclose(exact.probabilities(), inexact.probabilities())

def test_modes_are_not_mixed(sl2f5):
    table, S = sl2f5
    with pytest.raises(ModeMismatch):
        convolve(uniformMeasure(table), uniformMeasure(table, exact=False))

def test_convolution_budget(sl2f5):
    table, S = sl2f5
    chi = countingMeasure(table, S)
    with pytest.raises(BudgetExceeded):
        convolve(chi, chi, budget=4)

def test_symmetric_measure_reflects_to_itself(sl2f5):
    table, S = sl2f5
    chi = countingMeasure(table, S)
    assert chi.reflect().support() == chi.support()
    a = countingMeasure(table, S[:1])
    assert a.reflect().value(S[0].inverse()) == 1

def test_uniform_coset_mass(sl2f5):
    table, S = sl2f5
    borel = _atlas(table, 'Borel')
    assert cosetMass(uniformMeasure(table), borel) == Fraction(1, 6)
    x = S[1]
    assert cosetMass(uniformMeasure(table), borel, x) == Fraction(1, 6)
    assert cosetMass(pointMass(table, x), borel) == 1

def test_uniform_absorbs_convolution(sl2f5):
    table, S = sl2f5
    u = uniformMeasure(table)
    conv = convolve(countingMeasure(table, S), u)
    assert conv.maxWeight() == Fraction(1, 120)
    assert conv.supportSize() == 120

def test_escape_profile_decays(sl2f5):
    table, S = sl2f5
    df, summary = escapeProfile(table, S, _atlas(table, 'Borel'),
        [2, 4, 6, 8])
    assert df['l'].tolist() == [2, 4, 6, 8]
    assert summary['index'] == 6
    assert ((df['mass'] > 0) & (df['mass'] < 1)).all()
    for _, row in df.iterrows():
        assert float(Fraction(int(row['mass_num']), int(row['mass_den']))) \
            == pytest.approx(row['mass'])
    assert not summary['no_escape']

def test_escape_needs_proper_subgroup(sl2f5):
    table, S = sl2f5
    whole = SubgroupDescriptor('Explicit', table.spec, table.elements)
    with pytest.raises(NotProper):
        escapeProfile(table, S, whole, [2])

def test_escape_needs_even_lengths(sl2f5):
    table, S = sl2f5
    with pytest.raises(ValueError):
        escapeProfile(table, S, _atlas(table, 'Borel'), [3])

def test_no_escape_inside_borel(sl2f5):
    table, _ = sl2f5
    ring = table.ring
    S = symmetrize([
        makeGroupElem(ring, [[2, 0], [0, 3]]),
        makeGroupElem(ring, [[1, 1], [0, 1]]),
        ])
    df, summary = escapeProfile(table, S, _atlas(table, 'Borel'), [2, 4])
    assert summary['no_escape']
    assert summary['delta'] == 0
    assert (df['mass'] == 1.0).all()

def test_entropy_bounds(sl2f5):
    table, S = sl2f5
    assert entropy(pointMass(table, S[0])) == 0
    assert entropy(uniformMeasure(table)) == pytest.approx(math.log(120))
    assert entropy(countingMeasure(table, S)) == pytest.approx(math.log(4))
    walk = walkPower(table, S, 6)
    assert 0 < entropy(walk) <= math.log(120) + 1e-12

def test_partition_entropies(sl2f5):
    table, S = sl2f5
    walk = walkPower(table, S, 3)
    borel = _atlas(table, 'Borel')
    labels = table.cosetLabels(borel)
    cosets = [ np.nonzero(labels == c)[0].tolist()
        for c in range(int(labels.max()) + 1) ]
    halves = [ list(range(0, 60)), list(range(60, 120)) ]
    assert partitionEntropy(walk, cosets) <= math.log(6) + 1e-12
    conditional = conditionalEntropy(walk, cosets, halves)
    assert -1e-12 <= conditional <= partitionEntropy(walk, cosets) + 1e-12
    singletons = [ [i] for i in range(120) ]
    assert partitionEntropy(walk, singletons) == pytest.approx(entropy(walk))

def test_partition_must_not_overlap(sl2f5):
    table, S = sl2f5
    walk = walkPower(table, S, 1)
    with pytest.raises(NotAPartition):
        partitionEntropy(walk, [ list(range(0, 70)), list(range(60, 120)) ])
    with pytest.raises(NotAPartition):
        partitionEntropy(walk, [ [table.identity_index] ])

def test_free_group_counts():
    assert ballSize(2, 0) == 1
    assert ballSize(2, 3) == 36
    totals, hits = countReducedWords(2, 4)
    assert [ totals[l] for l in range(5) ] \
        == [ ballSize(2, l) for l in range(5) ]
    assert reduceWord((0, 1, 2, 0, 1, 3)) == ()
    assert wordCountBound(2, 2) == 3 ** 2

def test_free_walk_small_case():
    stats = freeWalkStats(2, 1)
    assert stats.P[0] == Fraction(1, 4)
    assert stats.P[2] == Fraction(1, 16)
    assert stats.normalization() == 1
    assert stats.kesten_ok

@given(st.integers(2, 4), st.integers(1, 8))
def test_free_walk_is_normalized(m, k):
    stats = freeWalkStats(m, k)
    assert stats.normalization() == 1
    assert stats.kesten_ok
    assert all(l % 2 == 0 for l in stats.level_mass)

def test_free_walk_matches_enumeration():
    stats = freeWalkStats(2, 2)
    counts = enumerateWalkLengths(2, 4)
    for l, n in counts.items():
        assert Fraction(n, 4 ** 4) == stats.level_mass[l]

def test_free_walk_rank_one_rejected():
    with pytest.raises(ValueError):
        freeWalkStats(1, 3)

def test_free_escape_mass_of_trivial_subgroup():
    trivial = WordPredicate(lambda word: len(word) == 0)
    stats = freeWalkStats(2, 2, trivial, l_cap=4)
    mass, truncated = freeEscapeMass(stats)
    assert mass == stats.P[0]
    assert not truncated
    stats = freeWalkStats(2, 3, trivial, l_cap=4)
    assert freeEscapeMass(stats)[1]
    df = stats.toDataFrame()
    assert df['in_H'].iloc[0] == 1

def test_flattening_trace(sl2f5, tmp_path):
    table, S = sl2f5
    trace = flatteningTrace(table, S, 60, stop=True)
    df = trace.data
    assert df['l2_norm_num'].iloc[0] == 1
    assert df['l2_norm_den'].iloc[0] == 4
    assert (np.diff(df['l2_norm']) <= 1e-15).all()
    assert trace.k_star == len(df)
    assert trace.constant == pytest.approx(trace.k_star / math.log(120))
    assert trace.almost_delta == pytest.approx(
        -2 * math.log(df['l2_norm'].iloc[1]) / math.log(120)
        )
    path = tmp_path / 'trace.csv'
    trace.saveToCsv(path)
    assert list(pd.read_csv(path).columns) \
        == ['k', 'l2_norm_num', 'l2_norm_den', 'entropy', 'support']

def test_flattening_exponent_of_uniform(sl2f5):
    table, S = sl2f5
    u = uniformMeasure(table, exact=False)
    report = flatteningExponent(u, u, atlas=subgroupAtlas(5))
    assert report['delta'] == pytest.approx(0, abs=1e-9)
    assert not report['norm_ok']
    assert report['coset_ok']

def test_bsg_on_uniform_measure(sl2f5):
    table, S = sl2f5
    u = uniformMeasure(table)
    result = bsgExtract(u, u, 2.0)
    assert result['size'] == 120
    assert result['tripling'] == 1
    assert result['min_mass_times_size'] == pytest.approx(1)

def test_bsg_hypothesis_not_met(sl2f5):
    table, S = sl2f5
    delta = pointMass(table, identity(table.ring, 2))
    with pytest.raises(HypothesisNotMet):
        bsgExtract(delta, uniformMeasure(table), 2.0)
    with pytest.raises(ValueError):
        bsgExtract(delta, delta, 1.0)

def test_snapshot_round_trip(sl2f5):
    table, S = sl2f5
    walk = walkPower(table, S, 3)
    parsed = parseSnapshot(table, formatSnapshot(walk))
    assert parsed.support() == walk.support()
    with pytest.raises(ModeMismatch):
        formatSnapshot(walk.toFloat())

def _denseWalk(table, S, k):
    M = buildOperator(table, S, mode='dense').dense()
    v = np.zeros(table.size)
    v[table.identity_index] = 1.0
    for _ in range(k):
        v = M.T @ v
        yield v

def _secondModulus(table, S):
    vals = np.linalg.eigvalsh(buildOperator(table, S, mode='dense').dense())
    return max(abs(vals[0]), abs(vals[-2]))

@pytest.mark.parametrize("name", ["sl2f5", "sl2f7", "sl2f11", "sl2f13"])
def test_flattening_time(name, request):
    table, S = request.getfixturevalue(name)
    n = table.size
    trace = flatteningTrace(table, S, 200, stop=True)
    assert trace.k_star is not None
    assert trace.target == pytest.approx(n ** -0.4)
    assert trace.constant == pytest.approx(trace.k_star / math.log(n))
    norms = [ np.linalg.norm(v) for v in _denseWalk(table, S, trace.k_star) ]
    assert norms == pytest.approx(trace.data['l2_norm'].tolist(), rel=1e-9)
    assert norms[-1] <= trace.target
    assert all(x > trace.target for x in norms[:-1])
    lam = _secondModulus(table, S)
    assert lam < 1
    k_bound = 1
    while math.sqrt(1.0 / n + lam ** (2 * k_bound) * (1 - 1.0 / n)) \
            > trace.target:
        k_bound += 1
    assert trace.k_star <= k_bound
    assert trace.constant <= k_bound / math.log(n)

@pytest.mark.parametrize(
    "kind", ["Center", "Borel", "TorusNormalizerSplit"]
    )
def test_escape_in_sl2f13(sl2f13, kind):
    table, S = sl2f13
    H = _atlas(table, kind)
    l = 2 * int(math.ceil(math.log(table.size)))
    assert l == 16
    df, summary = escapeProfile(table, S, H, [l])
    row = df.iloc[0]
    mass = Fraction(int(row['mass_num']), int(row['mass_den']))
    assert 0 < mass < 1
    assert summary['index'] == table.size // len(H.elements)
    assert summary['delta'] > 0
    assert float(mass) <= summary['index'] ** (-summary['delta']) \
        * (1 + 1e-12)
    v = list(_denseWalk(table, S, l))[-1]
    members = [ table.indexOf(h) for h in H.elements ]
    assert float(v[members].sum()) == pytest.approx(float(mass), rel=1e-9)
    lam = _secondModulus(table, S)
    uniform = len(members) / table.size
    assert abs(float(mass) - uniform) \
        <= math.sqrt(len(members)) * lam ** l + 1e-12

@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_entropy_identities_on_random_measures(sl2f5, seed, density):
    table, S = sl2f5
    n = table.size
    rng = np.random.default_rng(seed)
    weights = rng.random(n) * (rng.random(n) < density)
    weights[rng.integers(n)] += 1.0
    mu = measureFromProbabilities(table, weights / weights.sum())

    H = entropy(mu)
    assert mu.supportSize() >= math.exp(H) * (1 - 1e-12)
    assert math.exp(H) >= (1 - 1e-12) / mu.l2NormSquared()

    labels = table.cosetLabels(_atlas(table, 'Borel'))
    A = [ np.nonzero(labels == c)[0].tolist()
        for c in range(int(labels.max()) + 1) ]
    colours = rng.integers(0, 3, size=n)
    B = [ np.nonzero(colours == c)[0].tolist() for c in range(3) ]
    p = mu.probabilities()
    direct = 0.0
    for b in B:
        p_b = float(p[np.asarray(b, dtype=np.int64)].sum())
        if p_b <= 0:
            continue
        for a in A:
            both = sorted(set(a).intersection(b))
            p_ab = float(p[np.asarray(both, dtype=np.int64)].sum())
            if p_ab > 0:
                direct -= p_ab * math.log(p_ab / p_b)
    conditional = conditionalEntropy(mu, A, B)
    assert conditional == pytest.approx(direct, abs=1e-10)
    assert partitionEntropy(mu, joinPartitions(A, B)) \
        == pytest.approx(conditional + partitionEntropy(mu, B), abs=1e-10)
