from fractions import Fraction

import numpy as np
import pytest

from slexp.internal.groups import GroupSpec, GroupTable, makeGroupElem, \
    unipotentPair
from slexp.internal.spectral import buildOperator, operatorFromTable, \
    cyclicTable, completeTable, spectrumTop2, cheegerExhaustive, \
    traceMoment, minRepDimension, eigenvalueBoundCheck, multiplicityReport, \
    cheegerBound
from slexp.internal.errors import NotSymmetric, TooLarge
from slexp.experiment import Experiment

from conftest import primeRing


def test_cyclic_spectrum():
    op = operatorFromTable(cyclicTable(4, [1, -1]))
    vals = np.linalg.eigvalsh(op.dense())
    assert np.allclose(sorted(vals), [-1, 0, 0, 1])
    assert spectrumTop2(op).lambda2 == pytest.approx(0, abs=1e-12)

def test_complete_graph_spectrum():
    report = spectrumTop2(operatorFromTable(completeTable(6)))
    assert report.lambda1 == pytest.approx(1)
    assert report.lambda2 == pytest.approx(-0.2)

def test_operator_is_doubly_stochastic(sl2f3):
    table, S = sl2f3
    M = buildOperator(table, S).dense()
    assert M.shape == (24, 24)
    assert np.allclose(M.sum(axis=0), 1)
    assert np.allclose(M.sum(axis=1), 1)
    assert np.allclose(M, M.T)

def test_non_symmetric_set_rejected(sl2f3):
    table, S = sl2f3
    with pytest.raises(NotSymmetric):
        buildOperator(table, unipotentPair(table.ring))

@pytest.mark.parametrize("method", ["power", "lanczos"])
def test_iterative_matches_dense(sl2f3, sl2f5, method):
    for table, S in (sl2f3, sl2f5):
        op = buildOperator(table, S)
        dense = spectrumTop2(op, 'dense')
        iterative = spectrumTop2(op, method)
        assert iterative.lambda2 == pytest.approx(dense.lambda2, abs=1e-6)
        assert dense.gap > 0

def test_disconnected_graph_has_lambda2_one(sl2f5):
    table, S = sl2f5
    a = S[0]
    op = buildOperator(table, [a, a.inverse()])
    assert op.components() > 1
    assert spectrumTop2(op).lambda2 == pytest.approx(1, abs=1e-9)

def test_cheeger_small_graphs():
    assert cheegerExhaustive(operatorFromTable(cyclicTable(4, [1, -1]))) \
        == 1
    assert cheegerExhaustive(operatorFromTable(completeTable(4))) == 2
    cycle = cheegerExhaustive(operatorFromTable(cyclicTable(8, [1, -1])))
    assert cycle == Fraction(1, 2)

def test_cheeger_cap(sl2f3):
    table, S = sl2f3
    with pytest.raises(TooLarge):
        cheegerExhaustive(buildOperator(table, S), cap=20)

def test_cheeger_relation():
    report = cheegerBound(operatorFromTable(cyclicTable(6, [1, -1])))
    assert report['holds']
    assert report['cheeger'] == Fraction(2, 3)

def test_trace_moment(sl2f3, sl2f5):
    for table, S in (sl2f3, sl2f5):
        assert traceMoment(table, S, 1) == Fraction(table.size, len(S))
        M = buildOperator(table, S).dense()
        assert float(traceMoment(table, S, 1)) \
            == pytest.approx(np.sum(np.linalg.eigvalsh(M) ** 2), rel=1e-10)
        for k in range(1, 5):
            dense = np.trace(np.linalg.matrix_power(M, 2 * k))
            assert float(traceMoment(table, S, k)) \
                == pytest.approx(dense, rel=1e-10)

def test_min_rep_dimension():
    assert minRepDimension(5, 1, 2) == 2
    assert minRepDimension(13, 1, 2) == 6
    assert minRepDimension(2, 2, 3) == 15

def test_eigenvalue_bound(sl2f3, sl2f7):
    for (table, S), k in ((sl2f3, 2), (sl2f7, 3)):
        assert eigenvalueBoundCheck(buildOperator(table, S), k)['holds']

def test_eigenvalue_bound_degenerate_walk(sl2f5):
    table, S = sl2f5
    minus = makeGroupElem(table.ring, [[-1, 0], [0, -1]])
    report = eigenvalueBoundCheck(buildOperator(table, [minus, minus]), 2)
    assert report['lambda2'] == 1
    assert report['holds']

@pytest.mark.parametrize("name", ["sl2f5", "sl2f7", "sl2f11", "sl2f13"])
def test_lambda2_multiplicity(name, request):
    table, S = request.getfixturevalue(name)
    report = multiplicityReport(buildOperator(table, S))
    assert report['ok']
    assert report['multiplicity'] >= (table.ring.q - 1) // 2

def test_scan_over_generated_table():
    ring = primeRing(11)
    S = unipotentPair(ring)
    S = S + [ s.inverse() for s in S ]
    table = GroupTable.fromGenerators(S)
    assert table.size == GroupSpec(2, ring).order
    op = buildOperator(table, S, mode='matrix-free')
    report = spectrumTop2(op, 'lanczos')
    dense = spectrumTop2(buildOperator(table, S, mode='dense'), 'dense')
    assert report.lambda2 == pytest.approx(dense.lambda2, abs=1e-6)

def test_gap_minimum_is_reproduced_by_iterative_solvers(
        sl2f5, sl2f7, sl2f11, sl2f13):
    moduli = [5, 7, 11, 13]
    experiment = Experiment()
    experiment.newSetup('dense', 'unipotent', moduli=moduli, method='dense')
    dense = experiment.spectralScan('dense')
    assert dense['connected'].all()
    golden = dense['gap'].min()
    assert golden > 0
    direct = []
    for table, S in (sl2f5, sl2f7, sl2f11, sl2f13):
        M = buildOperator(table, S, mode='dense').dense()
        vals = np.linalg.eigvalsh(M)
        direct.append(1 - vals[-2])
    assert min(direct) == pytest.approx(golden, abs=1e-9)
    assert dense['gap'].tolist() == pytest.approx(direct, abs=1e-9)
    for method in ('power', 'lanczos'):
        experiment.newSetup(method, 'unipotent', moduli=moduli,
            method=method)
        df = experiment.spectralScan(method)
        assert (df['method'] == method).all()
        assert df['gap'].min() == pytest.approx(golden, abs=1e-6)

def test_cheeger_relation_on_sl2f3(sl2f3):
    table, S = sl2f3
    op = buildOperator(table, S)
    report = cheegerBound(op)
    assert report['holds']
    assert report['cheeger'] > 0
    borel = [ table.indexOf(g) for g in table.elements
        if table.ring.isZero(g.entries[2]) ]
    assert len(borel) == 6
    members = set(borel)
    boundary = sum(1 for i in borel for j in op.nbr[i]
        if int(j) not in members)
    assert report['cheeger'] <= Fraction(boundary, len(borel))
