"""Contains product-set growth experiments and the trace amplification lab."""

import math

import numpy as np # handle arrays
import pandas as pd # scan tables
import joblib as jl

from slexp.internal.algebra import FieldFactor, ResidueRing
from slexp.internal.groups import GroupSpec, GroupTable, GroupElem, \
    closure, factorEntries, fieldGroup, subgroupAtlas, slOrder, \
    ENUMERATION_CAP
from slexp.internal.spectral import minRepDimension
from slexp.internal.errors import TooLarge, NotSymmetric, EmptyResult, \
    AtlasUnavailable, ZeroElement, NotGenerating, SearchExhausted

PRODUCT_CAP = 200000
R_MAX = 12
LARGE_FACTOR_CUTOFF = 60


### Product sets ###

def _byEncoding(elements):
    return { g.encode(): g for g in elements }

def productSet(A, B, cap=PRODUCT_CAP):
    """The set A.B = {gh : g in A, h in B}, sorted by encoding.

    Arguments:
    A, B -- elements of one group (iterables of GroupElem)

    Keyword arguments:
    cap -- largest result size (default PRODUCT_CAP; int)

    Returns:
    list of GroupElem
    """
    A = list(_byEncoding(A).values())
    B = list(_byEncoding(B).values())
    out = {}
    for g in A:
        for h in B:
            x = g * h
            key = x.encode()
            if key not in out:
                out[key] = x
                if len(out) > cap:
                    raise TooLarge(
                        'product set exceeds cap ' + str(cap) + ' elements'
                        )
    return [ out[key] for key in sorted(out) ]

def iteratedProduct(S, k, cap=PRODUCT_CAP):
    """prod_k S = S.S. ... .S (k factors)."""
    if k < 1:
        raise ValueError('product length must be >= 1, got ' + str(k))
    out = list(_byEncoding(S).values())
    for _ in range(k - 1):
        out = productSet(out, S, cap)
    return sorted(out, key=lambda g: g.encode())

def isSymmetricSet(S):
    keys = set(g.encode() for g in S)
    return all(g.inverse().encode() in keys for g in S)


class GrowthReport(object):
    """Class defines exact product-set sizes of a symmetric set.

    Attributes:
    size_1, size_3 -- |S| and |S.S.S| (int)
    sizes_k -- k -> |prod_k S| (dict)
    iterated_ok -- k -> whether |prod_k S| |S|^(k-3) <= |S.S.S|^(k-2)
        (dict)
    delta_hat -- log(|SSS|/|S|) / log min(|S|, |G|/|S|) (float)
    regime_ok -- |S| <= |G|^(1-epsilon) (Boolean)
    """

    def __init__(self, size_1, size_3, sizes_k, order, epsilon):
        super(GrowthReport, self).__init__()
        self.size_1 = size_1
        self.size_3 = size_3
        self.sizes_k = dict(sizes_k)
        self.iterated_ok = {
            k: n * size_1 ** (k - 3) <= size_3 ** (k - 2)
            for k, n in self.sizes_k.items()
            }
        base = min(size_1, order / size_1) if order else size_1
        if base <= 1:
            self.delta_hat = 0.0
        else:
            self.delta_hat = math.log(size_3 / size_1) / math.log(base)
        self.regime_ok = size_1 <= order ** (1 - epsilon) if order else True

    def toDict(self):
        return {
            'size_1': self.size_1, 'size_3': self.size_3,
            'sizes_k': { str(k): n for k, n in sorted(self.sizes_k.items()) },
            'iterated_ok': {
                str(k): ok for k, ok in sorted(self.iterated_ok.items())
                },
            'delta_hat': self.delta_hat, 'regime_ok': self.regime_ok,
            }


def triplingReport(S, k_list=(3, 4, 5), epsilon=0.1, cap=PRODUCT_CAP):
    """Exact tripling and iterated-product sizes of a symmetric set.

    Arguments:
    S -- symmetric set (list of GroupElem)

    Keyword arguments:
    k_list -- product lengths k >= 3 checked (default (3, 4, 5); ints)
    epsilon -- regime exponent (default 0.1; float)
    cap -- product set cap (default PRODUCT_CAP; int)

    Returns:
    GrowthReport
    """
    S = list(_byEncoding(S).values())
    if not S:
        raise NotSymmetric('empty set')
    if not isSymmetricSet(S):
        raise NotSymmetric('set is not closed under inverses')
    k_list = sorted(set(int(k) for k in k_list))
    if any(k < 3 for k in k_list):
        raise ValueError('iterated products need k >= 3')
    sizes = {}
    current = S
    for k in range(2, max(k_list + [3]) + 1):
        current = productSet(current, S, cap)
        sizes[k] = len(current)
    spec = GroupSpec(S[0].d, S[0].ring)
    return GrowthReport(
        len(S), sizes[3], { k: sizes[k] for k in k_list }, spec.order,
        epsilon
        )

def randomSymmetricSet(table, size, rng):
    """Random symmetric set of the given size drawn from a group table.

    Sets of even size contain no involution.

    Arguments:
    table -- the group (GroupTable)
    size -- number of elements (int)
    rng -- random generator (numpy Generator)

    Returns:
    list of GroupElem closed under inverses
    """
    inverse = table.inverseTable()
    chosen = set()
    attempts = 0
    while len(chosen) < size:
        attempts += 1
        if attempts > 100 * table.size:
            raise TooLarge('could not draw a symmetric set of size '
                + str(size))
        i = int(rng.integers(table.size))
        if i == table.identity_index:
            continue
        pair = { i, int(inverse[i]) }
        if len(pair) == 1 and (size - len(chosen)) % 2 == 0:
            # an involution here would leave an odd gap
            continue
        if len(chosen | pair) <= size:
            chosen |= pair
    return [ table.elements[i] for i in sorted(chosen) ]

def _growthTrial(table, size, seed_seq, k_list, epsilon):
    rng = np.random.default_rng(seed_seq)
    S = randomSymmetricSet(table, size, rng)
    return triplingReport(S, k_list, epsilon)

def growthScan(
        primes, trials, size, seed=0, k_list=(3,), epsilon=0.1, n_cores=1,
        verbose=False):
    """Tripling of random symmetric sets in SL_2(F_p).

    Arguments:
    primes -- primes scanned (list of int)
    trials -- sets drawn per prime (int)
    size -- size of each set (int)

    Keyword arguments:
    seed -- master seed, split per (prime, trial) (default 0; int)
    k_list -- iterated products checked (default (3,); ints)
    epsilon -- regime exponent (default 0.1; float)
    n_cores -- parallel workers, 0 for all cores (default 1; int)
    verbose -- joblib progress output (default False; Boolean)

    Returns:
    pandas dataframe with columns p, trial, size, size_3, delta_hat,
    iterated_ok
    """
    if not n_cores:
        n_cores = jl.cpu_count()
    rows = []
    for n, p in enumerate(primes):
        table = GroupTable.fromSpec(GroupSpec(2, FieldFactor(p, (0, 1))))
        reports = jl.Parallel(n_jobs=n_cores, verbose=10 if verbose else 0) (
            jl.delayed( _growthTrial ) (
                table, size,
                np.random.SeedSequence(seed, spawn_key=(n, t)), k_list,
                epsilon
                ) for t in range(trials)
            )
        for t, report in enumerate(reports):
            rows.append({
                'p': p, 'trial': t, 'size': report.size_1,
                'size_3': report.size_3, 'delta_hat': report.delta_hat,
                'iterated_ok': all(report.iterated_ok.values()),
                })
    return pd.DataFrame(rows)


### Covering ###

def gowersCoverCheck(A, B, C, spec=None):
    """Compare |A||B||C| with |G|^3 / D and test A.B.C = G exhaustively.

    Arguments:
    A, B, C -- subsets of one finite SL_d (lists of GroupElem)

    Keyword arguments:
    spec -- ambient group, built from A when omitted (default None;
        GroupSpec)

    Returns:
    dictionary with product, threshold, threshold_met, full_cover
    """
    A = list(_byEncoding(A).values())
    B = list(_byEncoding(B).values())
    C = list(_byEncoding(C).values())
    if spec is None:
        spec = GroupSpec(A[0].d, A[0].ring)
    if spec.order > ENUMERATION_CAP:
        raise TooLarge(repr(spec) + ' is beyond the enumeration cap')
    D = min(minRepDimension(f.p, f.k, spec.d) for f in spec.ring.factors)
    threshold = spec.order ** 3 / D
    product = len(A) * len(B) * len(C)

    AB = productSet(A, B)
    covered = set()
    for g in AB:
        for h in C:
            covered.add((g * h).encode())
        if len(covered) == spec.order:
            break
    return {
        'product': product, 'threshold': threshold,
        'threshold_met': product > threshold,
        'full_cover': len(covered) == spec.order,
        }


### Regularization ###

def treeRegularize(S):
    """Make S regular level by level along the CRT factors.

    Level i groups elements by their projection to the first i factors.
    From the last level up, parents are bucketed by child count in dyadic
    ranges [2^b, 2^(b+1)), the bucket with the most elements is kept and
    every kept parent is truncated to the bucket minimum D_i, keeping its
    heaviest children. The reported loss factor per level is the dyadic
    guarantee 2 (floor(log2 |G_i|) + 1), not 2 log2 |G_i| + 1.

    Arguments:
    S -- elements over one residue ring (list of GroupElem)

    Returns:
    dictionary with A (list of GroupElem), degrees (D_1..D_n), loss_factors
    (2 (floor(log2 |G_i|) + 1) per level) and bound_ok
    (|A| >= |S| / prod loss_factors)
    """
    S = list(_byEncoding(S).values())
    if not S:
        raise EmptyResult('cannot regularize an empty set')
    ring, d = S[0].ring, S[0].d
    n = len(ring.factors)
    paths = { g.encode(): tuple(factorEntries(g)) for g in S }
    alive = dict(paths)
    degrees = [None] * n

    for level in range(n, 0, -1):
        children = {}
        weight = {}
        for key, path in alive.items():
            parent, child = path[:level-1], path[:level]
            children.setdefault(parent, {})
            children[parent][child] = children[parent].get(child, 0) + 1
        buckets = {}
        for parent, kids in children.items():
            b = len(kids).bit_length() - 1
            buckets.setdefault(b, []).append(parent)
            weight[parent] = sum(kids.values())
        best = max(
            buckets, key=lambda b: (sum(weight[x] for x in buckets[b]), b)
            )
        D = min(len(children[x]) for x in buckets[best])
        degrees[level-1] = D
        kept = set()
        for parent in buckets[best]:
            kids = sorted(
                children[parent].items(), key=lambda item: (-item[1], item[0])
                )
            kept.update(child for child, count in kids[:D])
        alive = {
            key: path for key, path in alive.items() if path[:level] in kept
            }
        if not alive:
            raise EmptyResult('regularization removed every element')

    A = [ g for g in S if g.encode() in alive ]
    loss = [
        2 * (int(math.floor(math.log2(slOrder(f.cardinality, d)))) + 1)
        for f in ring.factors
        ]
    total_loss = 1
    for factor_loss in loss:
        total_loss *= factor_loss
    return {
        'A': sorted(A, key=lambda g: g.encode()), 'degrees': degrees,
        'loss_factors': loss, 'bound_ok': len(A) * total_loss >= len(S),
        }

def sizeSplit(degrees, orders, L, cutoff=LARGE_FACTOR_CUTOFF):
    """Split factor indices by regular degree: D_i < |G_i|^(1 - 1/3L) is small.

    Factors with |G_i| below cutoff are listed as negligible.

    Returns:
    dictionary with small, large, negligible (lists of int)
    """
    out = { 'small': [], 'large': [], 'negligible': [] }
    for i, (D, order) in enumerate(zip(degrees, orders)):
        if order < cutoff:
            out['negligible'].append(i)
        elif D < order ** (1.0 - 1.0 / (3 * L)):
            out['small'].append(i)
        else:
            out['large'].append(i)
    return out

_COSET_LABELS = {}

def atlasCosetLabels(factor, cap=ENUMERATION_CAP):
    """Coset labels of every conjugate of every atlas subgroup of a factor.

    Returns:
    tuple (GroupTable of SL_2 over the factor, list of (kind, label array))
    """
    key = factor.key()
    if key in _COSET_LABELS:
        return _COSET_LABELS[key]
    atlas = subgroupAtlas(factor, cap)
    table = GroupTable(fieldGroup(factor, 2, cap), atlas[0].spec)
    labelings = []
    for H in atlas:
        seen = set()
        for x in table.elements:
            conj = H.conjugate(x)
            members = frozenset(conj.members)
            if members in seen:
                continue
            seen.add(members)
            labelings.append( (H.kind, table.cosetLabels(conj)) )
    _COSET_LABELS[key] = (table, labelings)
    return _COSET_LABELS[key]

def _worstCoset(table, labelings, indices):
    """Largest share of the given factor-table indices in one atlas coset."""
    best = (0.0, None, None)
    for n, (kind, labels) in enumerate(labelings):
        counts = np.bincount(labels[indices])
        label = int(np.argmax(counts))
        share = counts[label] / len(indices)
        if share > best[0]:
            best = (share, n, label)
    return best

def cosetStrip(S, delta_prime, cap=ENUMERATION_CAP):
    """Restrict S to atlas cosets until no factor concentrates.

    While some factor i outside J_b has an atlas coset gH (any conjugate of
    an atlas subgroup) with share >= |G_i|^(-delta'), keep only the
    elements projecting into gH and move i to J_b.

    Arguments:
    S -- elements of SL_2 over one residue ring (list of GroupElem)
    delta_prime -- concentration exponent, > 0 (float)

    Keyword arguments:
    cap -- factor enumeration cap (default ENUMERATION_CAP; int)

    Returns:
    dictionary with B (list of GroupElem), stripped (J_b, factor indices in
    stripping order), iterations and verified (postcondition rescan)
    """
    if delta_prime <= 0:
        raise ValueError('delta_prime must be positive')
    B = list(_byEncoding(S).values())
    if not B:
        raise EmptyResult('cannot strip an empty set')
    ring, d = B[0].ring, B[0].d
    if d != 2:
        raise AtlasUnavailable('subgroup atlases exist for d = 2 only')
    factors = ring.factors
    tables = [ atlasCosetLabels(f, cap) for f in factors ]

    def factorIndices(elements, i):
        table = tables[i][0]
        return np.array([
            table.index[b''.join(factors[i].encodeElem(e)
                for e in factorEntries(g)[i])]
            for g in elements
            ], dtype=np.int64)

    stripped = []
    iterations = 0
    changed = True
    while changed:
        changed = False
        for i, f in enumerate(factors):
            if i in stripped:
                continue
            table, labelings = tables[i]
            threshold = table.size ** (-delta_prime)
            idx = factorIndices(B, i)
            share, n, label = _worstCoset(table, labelings, idx)
            if share >= threshold:
                labels = labelings[n][1]
                B = [ g for g, j in zip(B, idx) if labels[j] == label ]
                stripped.append(i)
                iterations += 1
                changed = True
                break

    verified = True
    for i in range(len(factors)):
        if i not in stripped:
            table, labelings = tables[i]
            share = _worstCoset(table, labelings, factorIndices(B, i))[0]
            verified = verified and share < table.size ** (-delta_prime)
    return {
        'B': sorted(B, key=lambda g: g.encode()), 'stripped': stripped,
        'iterations': iterations, 'verified': verified,
        }


### Trace amplification over F_{p^k} ###

def wValue(field, a):
    """w(a) = a + a^-1."""
    if field.isZero(a):
        raise ZeroElement('w is undefined at 0')
    return field.add(a, field.inv(a))

def wIdentityCheck(field):
    """Check w(a) w(b) = w(ab) + w(ab^-1) for every pair of units.

    Returns:
    tuple (Boolean all hold, number of pairs checked)
    """
    units = list(field.units())
    checked = 0
    for a in units:
        wa = wValue(field, a)
        for b in units:
            lhs = field.mul(wa, wValue(field, b))
            rhs = field.add(
                wValue(field, field.mul(a, b)),
                wValue(field, field.mul(a, field.inv(b)))
                )
            checked += 1
            if lhs != rhs:
                return False, checked
    return True, checked

def _fieldProducts(field, A, B):
    return set(field.mul(a, b) for a in A for b in B)

def traceAmplify(field, Lambda, a1, a2, cap=5000000):
    """The set {a1 w(bc) + a2 w(bc^-1) : b, c in prod_4 Lambda}.

    Only the smallest proper subfield holding every w(x^2) is tested; any
    other proper subfield holding them contains it.

    Arguments:
    field -- the finite field (FieldFactor)
    Lambda -- units containing 1, closed under inverses (list of tuples)
    a1, a2 -- nonzero field elements (tuples)

    Keyword arguments:
    cap -- largest number of (b, c) pairs (default 5e6; int)

    Returns:
    dictionary with values (sorted list), size, w_squares (sorted list of
    w(x^2), x in Lambda), subfield (degree of the smallest proper subfield
    holding w_squares, or None), ratio_in_subfield and dichotomy_ok (size >=
    |w_squares|^2 whenever the side condition applies)
    """
    Lambda = set(tuple(a) for a in Lambda)
    if any(field.isZero(a) for a in Lambda):
        raise ZeroElement('Lambda contains 0')
    if field.isZero(a1) or field.isZero(a2):
        raise ZeroElement('a1 and a2 must be nonzero')
    if field.one() not in Lambda \
            or any(field.inv(a) not in Lambda for a in Lambda):
        raise ValueError('Lambda must contain 1 and be closed under inverses')

    prod = set(Lambda)
    for _ in range(3):
        prod = _fieldProducts(field, prod, Lambda)
    if len(prod) ** 2 > cap:
        raise TooLarge(
            str(len(prod)) + '^2 pairs exceed cap ' + str(cap)
            )
    values = set()
    for b in prod:
        for c in prod:
            values.add(field.add(
                field.mul(a1, wValue(field, field.mul(b, c))),
                field.mul(a2, wValue(field, field.mul(b, field.inv(c))))
                ))

    w_squares = set(wValue(field, field.mul(x, x)) for x in Lambda)
    subfield = None
    for kp in field.subfieldDegrees():
        if all(field.inSubfield(w, kp) for w in w_squares):
            subfield = kp
            break
    ratio = field.mul(a1, field.inv(a2))
    ratio_in = subfield is not None and field.inSubfield(ratio, subfield)
    applies = subfield is not None and not ratio_in
    return {
        'values': sorted(values), 'size': len(values),
        'w_squares': sorted(w_squares), 'subfield': subfield,
        'ratio_in_subfield': ratio_in,
        'dichotomy_ok': (not applies) or len(values) >= len(w_squares) ** 2,
        }

def findNondegenerate(S, subfield_degree, R_max=R_MAX, cap=ENUMERATION_CAP):
    """Search prod_R S for x = [[a,b],[c,d]] with abcd != 0, ad/bc outside F.

    Arguments:
    S -- generators of SL_2(F_{p^k}), over a FieldFactor or a residue ring
        with a single factor (list of GroupElem)
    subfield_degree -- degree of the proper subfield F (int)

    Keyword arguments:
    R_max -- largest word length searched (default R_MAX; int)
    cap -- closure cap (default ENUMERATION_CAP; int)

    Returns:
    tuple (GroupElem witness, word length R)
    """
    S = list(S)
    ring = S[0].ring
    if isinstance(ring, ResidueRing):
        if len(ring.factors) != 1:
            raise AtlasUnavailable('search needs a single field factor')
        field = ring.factors[0]
        S = [ GroupElem(field, 2, factorEntries(g)[0], check=False)
            for g in S ]
    else:
        field = ring
    if field.k < 2 or field.k % subfield_degree or subfield_degree >= field.k:
        raise ValueError(
            'F_' + str(field.p) + '^' + str(subfield_degree)
            + ' is not a proper subfield of F_' + str(field.p) + '^'
            + str(field.k)
            )
    H = closure(S, cap)
    if not H.is_full:
        raise NotGenerating(
            'generators span a subgroup of index ' + str(H.index)
            )

    def good(x):
        a, b, c, d = x.entries
        if any(field.isZero(e) for e in (a, b, c, d)):
            return False
        ratio = field.mul(field.mul(a, d), field.inv(field.mul(b, c)))
        return not field.inSubfield(ratio, subfield_degree)

    level = list(_byEncoding(S).values())
    for R in range(1, R_max + 1):
        for x in level:
            if good(x):
                return x, R
        if R < R_max:
            level = productSet(level, S)
    raise SearchExhausted(
        'no nondegenerate element in words of length <= ' + str(R_max)
        )
