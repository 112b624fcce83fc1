import json
import math

import numpy as np
import pytest

from slexp.internal.algebra import makeNumberField
from slexp.internal.groups import makeGroupElem, identity
from slexp.internal.walks import freeWalkStats, freeEscapeMass, \
    wordCountBound
from slexp.internal.archimedean import EmbeddingSet, adjoint, slBasis, \
    slCoordinates, proximality, projectiveDistance, hyperplaneDistance, \
    genericCheck, lettersWithInverses, powerUp, certificateJson, \
    normGrowth, predicateHV, predicateHT, HTPredicate, wordCountAudit, \
    goodLetterSearch, predicateScan
from slexp.internal.errors import ZeroVector, NonProximalMember, \
    FreenessUnverified, RingMismatch

from conftest import primeRing


@pytest.fixture(scope="module")
def rationals_embedded(rationals):
    return rationals, EmbeddingSet(rationals)

@pytest.fixture(scope="module")
def sanov(rationals_embedded):
    Q, embeddings = rationals_embedded
    A = [ makeGroupElem(Q, [[1, 2], [0, 1]]),
        makeGroupElem(Q, [[1, 0], [2, 1]]) ]
    return A, lettersWithInverses(A), embeddings

def _hyperbolic(ring):
    return makeGroupElem(ring, [[2, 1], [1, 1]])


def test_real_quadratic_embeddings():
    K = makeNumberField([1, 0, -2])
    embeddings = EmbeddingSet(K)
    assert embeddings.count == 2
    assert np.allclose(embeddings.evaluate((0, 1)),
        [math.sqrt(2), -math.sqrt(2)])
    assert np.allclose(embeddings.evaluate((3, 1)),
        [3 + math.sqrt(2), 3 - math.sqrt(2)])

def test_gaussian_embeddings():
    embeddings = EmbeddingSet(makeNumberField([1, 0, 1]))
    assert np.allclose(embeddings.roots, [1j, -1j])

def test_hat_sigma():
    K = makeNumberField([1, 0, -2])
    embeddings = EmbeddingSet(K)
    h = makeGroupElem(K, [['0,1', 1], [1, '0,1']])
    first, second = embeddings.hatSigma(h)
    r = math.sqrt(2)
    assert np.allclose(first, [[r, 1], [1, r]])
    assert np.allclose(second, [[-r, 1], [1, -r]])
    with pytest.raises(RingMismatch):
        embeddings.hatSigma(makeGroupElem(primeRing(5), [[1, 1], [0, 1]]))

def test_adjoint_basics():
    assert np.allclose(adjoint(np.eye(2)), np.eye(3))
    D = adjoint(np.diag([2.0, 0.5]))
    assert np.allclose(sorted(np.abs(np.linalg.eigvals(D))), [0.25, 1, 4])
    assert np.allclose([ slCoordinates(B) for B in slBasis(3) ], np.eye(8))
    assert adjoint(np.eye(3)).shape == (8, 8)

def test_adjoint_is_a_homomorphism():
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.standard_normal((2, 2))
        y = rng.standard_normal((2, 2))
        x = x / np.sqrt(complex(np.linalg.det(x)))
        y = y / np.sqrt(complex(np.linalg.det(y)))
        assert np.allclose(adjoint(x @ y), adjoint(x) @ adjoint(y))

def test_proximality():
    report = proximality(adjoint(np.diag([2.0, 0.5])))
    assert report.proximal
    assert report.lambda_top == pytest.approx(4)
    assert report.ratio == pytest.approx(0.25)
    assert report.complement_dim == 2
    assert report.distanceToComplement(np.array([1, 0, 0])) \
        == pytest.approx(1)
    assert report.distanceToComplement(np.array([0, 1, 0])) \
        == pytest.approx(0, abs=1e-12)
    rotation = adjoint(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert not proximality(rotation).proximal

def test_projective_distance():
    assert projectiveDistance([1, 0], [0, 1]) == pytest.approx(1)
    assert projectiveDistance([1, 0], [2, 0]) == pytest.approx(0)
    assert projectiveDistance([1, 1], [1, 0]) \
        == pytest.approx(math.sqrt(0.5))
    assert projectiveDistance([1j, 0], [1, 0]) == pytest.approx(0)
    assert hyperplaneDistance(np.array([1, 0]), [0, 3]) == 0
    with pytest.raises(ZeroVector):
        projectiveDistance([0, 0], [1, 0])

def test_empty_set_is_generic(rationals_embedded):
    Q, embeddings = rationals_embedded
    assert genericCheck([], embeddings).passed

def test_single_hyperbolic_element_is_generic(rationals_embedded):
    Q, embeddings = rationals_embedded
    report = genericCheck([_hyperbolic(Q)], embeddings)
    assert report.condition_i
    assert report.condition_ii
    assert report.condition_iii is None
    assert report.passed

def test_powers_share_attracting_lines(rationals_embedded):
    Q, embeddings = rationals_embedded
    g = _hyperbolic(Q)
    report = genericCheck([g, g * g], embeddings)
    assert not report.condition_ii
    assert not report.passed

def test_unipotent_pair_is_not_proximal(sanov):
    A, letters, embeddings = sanov
    with pytest.raises(NonProximalMember):
        genericCheck(A, embeddings)

def test_free_certificate_for_unipotent_pair(sanov):
    A, letters, embeddings = sanov
    M, powered, certificate = powerUp(A, embeddings)
    assert M == 1
    assert certificate['free']
    assert not certificate['geometric']
    assert certificate['words'] == 13121
    assert json.loads(certificateJson(certificate))['L_check'] == 8

def test_ping_pong_for_hyperbolic_element(rationals_embedded):
    Q, embeddings = rationals_embedded
    M, powered, certificate = powerUp([_hyperbolic(Q)], embeddings,
        samples=200)
    assert 1 <= M <= 64
    assert certificate['geometric']
    assert certificate['words'] == 17
    assert certificate['margins']['inclusion'] \
        < certificate['margins']['radius']
    assert powered[0] == _hyperbolic(Q) ** M

def test_torsion_is_not_free(rationals_embedded):
    Q, embeddings = rationals_embedded
    w = makeGroupElem(Q, [[0, -1], [1, 0]])
    with pytest.raises(FreenessUnverified):
        powerUp([w], embeddings)

def test_norm_growth(rationals_embedded, sanov):
    Q, embeddings = rationals_embedded
    df, summary = normGrowth([identity(Q, 2)], embeddings, 3)
    assert (df['max_log_norm'] == 0).all()
    assert summary['slope'] == pytest.approx(0)
    A, letters, _ = sanov
    df, summary = normGrowth(letters, embeddings, 4)
    assert summary['subadditive']
    assert summary['slope'] > 0
    assert df['size'].iloc[0] == 4

def test_subspace_predicate(rationals_embedded):
    Q, embeddings = rationals_embedded
    upper = makeGroupElem(Q, [[1, 1], [0, 1]])
    lower = makeGroupElem(Q, [[1, 0], [1, 1]])
    line = [ np.array([[0, 1], [0, 0]]) ]
    assert predicateHV(upper, line, embeddings)
    assert not predicateHV(lower, line, embeddings)
    assert predicateHV(lower, slBasis(2), embeddings)

def test_intertwining_predicate():
    K = makeNumberField([1, 0, -2])
    embeddings = EmbeddingSet(K)
    T = np.eye(3)
    h = makeGroupElem(K, [['0,1', 1], [1, '0,1']])
    assert not predicateHT(h, T, embeddings)
    assert predicateHT(identity(K, 2), T, embeddings)
    assert predicateHT(makeGroupElem(K, [[2, 1], [1, 1]]), T, embeddings)

def test_word_count_audit(sanov):
    A, letters, embeddings = sanov
    T = adjoint(embeddings.sigma(A[0], 0))
    df = wordCountAudit(letters, T, embeddings, 6)
    assert df['ok'].all()
    assert (df['in_H_T'] == 2).all()
    assert df['ball_size'].tolist() == [ 4 * 3 ** (l - 1) for l in range(1, 7) ]
    assert df['bound'].iloc[1] == wordCountBound(2, 2)

def test_good_letters(sanov):
    A, letters, embeddings = sanov
    T = adjoint(embeddings.sigma(A[0], 0))
    result = goodLetterSearch(letters, T, embeddings, l_max=5)
    assert result['mode'] == 'combinatorial'
    assert result['good_letters'] == [2, 3]
    assert result['found']

def test_predicate_scan(sanov):
    A, letters, embeddings = sanov
    T = adjoint(embeddings.sigma(A[0], 0))
    df = predicateScan(letters, T, embeddings, 2)
    assert len(df) == 1 + 4 + 12
    assert df['word'].iloc[0] == ''
    assert set(df[df['in_H_T']]['word']) \
        == { '', 'a1', 'A1', 'a1.a1', 'A1.A1' }

def test_escape_from_commuting_subgroup(sanov):
    A, letters, embeddings = sanov
    T = adjoint(embeddings.sigma(A[0], 0))
    predicate = HTPredicate(letters, T, embeddings)
    stats = freeWalkStats(2, 2, predicate, l_cap=4)
    assert stats.predicate_counts == { 0: 1, 1: 2, 2: 2, 3: 2, 4: 2 }
    mass, truncated = freeEscapeMass(stats)
    assert not truncated
    assert mass == stats.P[0] + 2 * stats.P[2] + 2 * stats.P[4]
    assert mass < 1
