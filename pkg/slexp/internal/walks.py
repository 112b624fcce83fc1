"""Contains measures on finite groups, convolution powers and walk statistics.

A WalkMeasure is a weight vector over the elements of a GroupTable. Exact
measures hold Python integer numerators in a numpy object array with one
shared denominator; float measures hold float64 weights. The two modes are
never mixed implicitly.
"""

import math
from fractions import Fraction

import numpy as np # handle arrays
import pandas as pd # trace tables

from slexp.internal.errors import BudgetExceeded, ModeMismatch, NotProper, \
    NotAPartition, HypothesisNotMet, NotInGroup

CONVOLUTION_BUDGET = 5000000
FLATTENING_EPSILON = 0.1


class WalkMeasure(object):
    """Class defines a nonnegative measure on the elements of a group table.

    Attributes:
    table -- group the measure lives on (GroupTable)
    weights -- numerators (object array, exact) or weights (float array)
    denominator -- shared denominator in exact mode, None for floats

    Methods:
    isExact, total, value, mass, support, supportSize
    l2NormSquared, l2Norm, maxWeight -- norms
    toFloat -- explicit cast to a float measure
    reflect -- the measure g -> mu(g^-1)
    """

    def __init__(self, table, weights, denominator=None):
        super(WalkMeasure, self).__init__()
        self.table = table
        self.weights = weights
        self.denominator = denominator

    def __repr__(self):
        return 'WalkMeasure(support=' + str(self.supportSize()) + ', ' \
            + ('exact' if self.isExact() else 'float') + ')'

    def isExact(self):
        return self.denominator is not None

    def _scalar(self, numerator):
        if self.isExact():
            return Fraction(int(numerator), self.denominator)
        return float(numerator)

    def total(self):
        return self._scalar(sum(self.weights.tolist()))

    def value(self, g):
        return self._scalar(self.weights[self.table.indexOf(g)])

    def mass(self, indices):
        """Mass of the elements with the given table indices."""
        return self._scalar(sum(self.weights[np.asarray(indices)].tolist()))

    def supportIndices(self):
        return np.nonzero(self.weights != 0)[0]

    def supportSize(self):
        return int(len(self.supportIndices()))

    def support(self):
        """Map from canonical encoding to weight over the support."""
        return {
            self.table.elements[i].encode(): self._scalar(self.weights[i])
            for i in self.supportIndices()
            }

    def l2NormSquared(self):
        squares = sum(int(w) * int(w) for w in self.weights.tolist()) \
            if self.isExact() else float(np.dot(self.weights, self.weights))
        if self.isExact():
            return Fraction(squares, self.denominator ** 2)
        return squares

    def l2Norm(self):
        return math.sqrt(float(self.l2NormSquared()))

    def maxWeight(self):
        return self._scalar(max(self.weights.tolist()))

    def toFloat(self):
        if not self.isExact():
            return self
        return WalkMeasure(
            self.table,
            np.array([ int(w) / self.denominator
                for w in self.weights.tolist() ], dtype=np.float64)
            )

    def probabilities(self):
        return self.toFloat().weights

    def reflect(self):
        out = self.weights.copy()
        out[self.table.inverseTable()] = self.weights
        return WalkMeasure(self.table, out, self.denominator)


### Constructors ###

def _zeros(table, exact):
    if exact:
        return np.array([0] * table.size, dtype=object)
    return np.zeros(table.size)

def pointMass(table, g, exact=True):
    weights = _zeros(table, exact)
    weights[table.indexOf(g)] = 1
    return WalkMeasure(table, weights, 1 if exact else None)

def countingMeasure(table, elements, exact=True):
    """chi_A for a multiset A: weight = multiplicity / |A|."""
    elements = list(elements)
    if not elements:
        raise ValueError('counting measure of an empty set')
    weights = _zeros(table, exact)
    for g in elements:
        weights[table.indexOf(g)] += 1
    if exact:
        return WalkMeasure(table, weights, len(elements))
    return WalkMeasure(table, weights / len(elements))

def uniformMeasure(table, exact=True):
    weights = np.array([1] * table.size, dtype=object) if exact \
        else np.full(table.size, 1.0 / table.size)
    return WalkMeasure(table, weights, table.size if exact else None)

def measureFromProbabilities(table, probabilities):
    return WalkMeasure(table, np.asarray(probabilities, dtype=np.float64))


### Convolution ###

def convolve(mu, nu, budget=CONVOLUTION_BUDGET):
    """The convolution (mu * nu)(g) = sum_h mu(g h^-1) nu(h).

    Arguments:
    mu, nu -- measures on the same table, same mode (WalkMeasure)

    Keyword arguments:
    budget -- largest |supp mu| |supp nu| allowed (default
        CONVOLUTION_BUDGET; int)

    Returns:
    WalkMeasure, exact when both inputs are
    """
    if mu.isExact() != nu.isExact():
        raise ModeMismatch('cast exact measures with toFloat() before mixing')
    if mu.table is not nu.table:
        raise NotInGroup('measures live on different group tables')
    table = mu.table
    left = mu.supportIndices()
    right = nu.supportIndices()
    if len(left) * len(right) > budget:
        raise BudgetExceeded(
            str(len(left)) + ' x ' + str(len(right))
            + ' pair products exceed budget ' + str(budget)
            )
    out = _zeros(table, mu.isExact())
    if len(left) <= len(right):
        for a in left:
            perm = table.leftTable(table.elements[a], cache=False)
            out[perm] += mu.weights[a] * nu.weights
    else:
        for b in right:
            perm = table.rightTable(table.elements[b])
            out[perm] += nu.weights[b] * mu.weights
    if mu.isExact():
        return WalkMeasure(table, out, mu.denominator * nu.denominator)
    return WalkMeasure(table, out)

def walkSteps(table, S, k, exact=True, start=None):
    """Yield chi_S^(j) for j = 1..k by left steps new[s h] += count[h]."""
    S = list(S)
    nbr = table.neighborTable(S)
    m = len(S)
    counts = _zeros(table, exact)
    if start is None:
        counts[table.identity_index] = 1
    else:
        counts[table.indexOf(start)] = 1
    denominator = 1
    for j in range(1, k + 1):
        new = _zeros(table, exact)
        for col in range(m):
            new[nbr[:, col]] += counts
        if exact:
            counts = new
            denominator *= m
            yield WalkMeasure(table, counts, denominator)
        else:
            counts = new / m
            yield WalkMeasure(table, counts)

def walkPower(table, S, k, budget=CONVOLUTION_BUDGET, exact=True):
    """chi_S^(k): weight(g) = #(length-k S-words equal to g) / |S|^k.

    Arguments:
    table -- the group (GroupTable)
    S -- generator multiset (list of GroupElem)
    k -- walk length, k >= 1 (int)

    Keyword arguments:
    budget -- largest k |G| |S| step cost allowed (default
        CONVOLUTION_BUDGET; int)
    exact -- big-integer counts rather than floats (default True; Boolean)

    Returns:
    WalkMeasure
    """
    if k < 1:
        raise ValueError('walk length must be >= 1, got ' + str(k))
    if k * table.size * len(S) > budget:
        raise BudgetExceeded(
            'walk of length ' + str(k) + ' on ' + str(table.size)
            + ' elements exceeds budget ' + str(budget)
            )
    for mu in walkSteps(table, S, k, exact):
        pass
    return mu


### Subgroup masses ###

def _alignSubgroup(H, table):
    if H.elements is not None and H.elements \
            and H.elements[0].ring == table.ring:
        return H
    return H.materialize(table.elements)

def cosetMass(mu, H, g=None):
    """Mass mu(gH) of a left coset, or the largest coset mass.

    Arguments:
    mu -- the measure (WalkMeasure)
    H -- subgroup, explicit or by predicate (SubgroupDescriptor)

    Keyword arguments:
    g -- coset representative; None scans every coset and returns the
        maximum (default None; GroupElem)

    Returns:
    Fraction for exact measures, float otherwise
    """
    table = mu.table
    H = _alignSubgroup(H, table)
    if g is not None:
        return mu.mass([ table.indexOf(g * h) for h in H.elements ])
    labels = table.cosetLabels(H)
    best = None
    for label in range(int(labels.max()) + 1):
        value = mu.mass(np.nonzero(labels == label)[0])
        if best is None or value > best:
            best = value
    return best

def escapeProfile(table, S, H, l_values, budget=CONVOLUTION_BUDGET):
    """Mass chi_S^(l)(H) over even walk lengths and fitted decay.

    Arguments:
    table -- the group (GroupTable)
    S -- generator multiset (list of GroupElem)
    H -- proper subgroup (SubgroupDescriptor)
    l_values -- even walk lengths (list of int)

    Keyword arguments:
    budget -- walk budget (default CONVOLUTION_BUDGET; int)

    Returns:
    tuple (pandas dataframe with columns l, mass, mass_num, mass_den,
    delta; summary dictionary with index, delta, decay_rate, monotone,
    no_escape)
    """
    H = _alignSubgroup(H, table)
    if H.size >= table.size or H.index == 1:
        raise NotProper('escape profile needs a proper subgroup')
    l_values = sorted(set(int(l) for l in l_values))
    if not l_values or any(l < 2 or l % 2 for l in l_values):
        raise ValueError('walk lengths must be even and >= 2: '
            + str(l_values))
    if l_values[-1] * table.size * len(S) > budget:
        raise BudgetExceeded(
            'escape profile up to l = ' + str(l_values[-1])
            + ' exceeds budget ' + str(budget)
            )

    index = table.size // H.size
    members = [ table.indexOf(h) for h in H.elements ]
    rows = []
    wanted = set(l_values)
    for l, mu in enumerate(walkSteps(table, S, l_values[-1]), start=1):
        if l in wanted:
            mass = mu.mass(members)
            delta = -math.log(mass) / math.log(index) if mass > 0 \
                else np.inf
            rows.append({
                'l': l, 'mass': float(mass), 'mass_num': mass.numerator,
                'mass_den': mass.denominator, 'delta': delta,
                })
    df = pd.DataFrame(rows)

    positive = df[df['mass'] > 0]
    if len(positive) >= 2:
        slope = np.polyfit(positive['l'], np.log(positive['mass']), 1)[0]
        decay_rate = -float(slope)
    else:
        decay_rate = float('nan')
    masses = df['mass'].tolist()
    summary = {
        'index': index,
        'delta': float(df['delta'].iloc[-1]),
        'decay_rate': decay_rate,
        'monotone': all(b <= a for a, b in zip(masses, masses[1:])),
        'no_escape': all(m == 1.0 for m in masses),
        }
    return df, summary


### Entropy ###

def entropy(mu):
    """Natural-log entropy with 0 log 0 = 0."""
    p = mu.probabilities()
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())

def _checkPartition(mu, blocks):
    seen = np.zeros(mu.table.size, dtype=bool)
    for block in blocks:
        block = np.asarray(list(block), dtype=np.int64)
        if seen[block].any() or len(set(block.tolist())) != len(block):
            raise NotAPartition('blocks overlap')
        seen[block] = True
    if not seen[mu.supportIndices()].all():
        raise NotAPartition('blocks do not cover the support')

def partitionEntropy(mu, blocks):
    """H_mu(A) = sum over blocks of -mu(A) log mu(A)."""
    _checkPartition(mu, blocks)
    p = mu.probabilities()
    total = 0.0
    for block in blocks:
        m = float(p[np.asarray(list(block), dtype=np.int64)].sum())
        if m > 0:
            total -= m * math.log(m)
    return total

def joinPartitions(A, B):
    """Common refinement A v B (nonempty intersections)."""
    out = []
    for a in A:
        a = set(a)
        for b in B:
            c = a.intersection(b)
            if c:
                out.append(sorted(c))
    return out

def conditionalEntropy(mu, A, B):
    """H_mu(A | B) = H_mu(A v B) - H_mu(B).

    Arguments:
    mu -- the measure (WalkMeasure)
    A, B -- partitions as lists of blocks of table indices (list of lists)

    Returns:
    float
    """
    _checkPartition(mu, A)
    _checkPartition(mu, B)
    return partitionEntropy(mu, joinPartitions(A, B)) \
        - partitionEntropy(mu, B)


### Free group walks ###

def ballSize(m, l):
    """|B_l| = 2m (2m-1)^(l-1) reduced words of length l in F_m."""
    if l == 0:
        return 1
    return 2 * m * (2 * m - 1) ** (l - 1)

def wordCountBound(m, l):
    """(2m-1)^(l/2+1) (2m-2)^(l/2-1), the bound on |B_l n H_T|."""
    return (2*m - 1) ** (l / 2.0 + 1) * (2*m - 2) ** (l / 2.0 - 1)

def inverseLetter(letter):
    """Letters 2i and 2i+1 stand for a_i and a_i^-1."""
    return letter ^ 1

def reduceWord(word):
    out = []
    for letter in word:
        if out and out[-1] == inverseLetter(letter):
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


class WordPredicate(object):
    """Class defines a membership test evaluated along reduced words.

    The state is extended one letter at a time so a depth-first word scan
    evaluates each word with one step. This base class keeps the word
    itself as state and applies a function of the word tuple.
    """

    def __init__(self, function):
        super(WordPredicate, self).__init__()
        self.function = function

    def start(self):
        return ()

    def extend(self, state, letter):
        return state + (letter,)

    def test(self, state):
        return bool(self.function(state))


def countReducedWords(m, l_max, predicate=None):
    """Count reduced words per length, and those satisfying predicate.

    Arguments:
    m -- rank of the free group (int)
    l_max -- largest word length (int)

    Keyword arguments:
    predicate -- membership test (default None; WordPredicate)

    Returns:
    tuple (dict l -> |B_l|, dict l -> |B_l n H|) by enumeration
    """
    totals = { l: 0 for l in range(l_max + 1) }
    hits = { l: 0 for l in range(l_max + 1) }
    start = predicate.start() if predicate is not None else None
    stack = [ ((), start) ]
    while stack:
        word, state = stack.pop()
        l = len(word)
        totals[l] += 1
        if predicate is not None and predicate.test(state):
            hits[l] += 1
        if l < l_max:
            for letter in range(2 * m):
                if word and word[-1] == inverseLetter(letter):
                    continue
                nxt = predicate.extend(state, letter) \
                    if predicate is not None else None
                stack.append( (word + (letter,), nxt) )
    return totals, hits

def enumerateWalkLengths(m, steps, budget=CONVOLUTION_BUDGET):
    """Distribution of reduced lengths after `steps` letters, by enumeration.

    Returns:
    dict l -> number of the (2m)^steps words reducing to length l
    """
    if (2 * m) ** steps > budget:
        raise BudgetExceeded(
            str(2*m) + '^' + str(steps) + ' words exceed budget '
            + str(budget)
            )
    counts = {}
    frontier = { (): 1 }
    for _ in range(steps):
        nxt = {}
        for word, n in frontier.items():
            for letter in range(2 * m):
                w = reduceWord(word + (letter,))
                nxt[w] = nxt.get(w, 0) + n
        frontier = nxt
    for word, n in frontier.items():
        counts[len(word)] = counts.get(len(word), 0) + n
    return counts


class FreeWalkStats(object):
    """Class defines exact walk statistics of the simple walk on F_m.

    Attributes:
    m, k -- rank and half walk length (int)
    ball_sizes -- l -> |B_l| (dict)
    level_mass -- l -> probability the 2k-step walk ends at length l (dict
        of Fraction)
    P -- l -> P_k(l), the probability of each word of length l (dict of
        Fraction)
    predicate_counts -- l -> |B_l n H| when a predicate was given (dict)
    kesten_bound -- ((2m-1)/m^2)^k (Fraction)
    kesten_ok -- P_k(0) <= kesten_bound (Boolean)
    """

    def __init__(self, m, k, level_mass, predicate_counts=None):
        super(FreeWalkStats, self).__init__()
        self.m = m
        self.k = k
        self.level_mass = level_mass
        self.ball_sizes = { l: ballSize(m, l) for l in level_mass }
        self.P = {
            l: mass / self.ball_sizes[l] for l, mass in level_mass.items()
            }
        self.predicate_counts = predicate_counts
        self.kesten_bound = Fraction(2*m - 1, m*m) ** k
        self.kesten_ok = self.P.get(0, Fraction(0)) <= self.kesten_bound

    def normalization(self):
        return sum(self.ball_sizes[l] * self.P[l] for l in self.P)

    def toDataFrame(self):
        rows = []
        for l in sorted(self.P):
            row = {
                'l': l, 'ball_size': self.ball_sizes[l],
                'P_num': self.P[l].numerator, 'P_den': self.P[l].denominator,
                }
            if self.predicate_counts is not None:
                row['in_H'] = self.predicate_counts.get(l)
            rows.append(row)
        return pd.DataFrame(rows)


def freeWalkStats(m, k, predicate=None, l_cap=12):
    """Exact P_k(l) for the 2k-step simple walk on the free group F_m.

    The reduced length performs a walk on {0, 1, ...}: 0 -> 1 surely, and
    l -> l+1 with probability (2m-1)/2m, l -> l-1 with probability 1/2m.

    Arguments:
    m -- rank, m >= 2 (int)
    k -- half the walk length (int)

    Keyword arguments:
    predicate -- membership test counted on B_l for l <= l_cap
        (default None; WordPredicate)
    l_cap -- largest length enumerated for predicate counts
        (default 12; int)

    Returns:
    FreeWalkStats
    """
    if m < 2:
        raise ValueError('free group rank must be >= 2, got ' + str(m))
    up = Fraction(2*m - 1, 2*m)
    down = Fraction(1, 2*m)
    dist = { 0: Fraction(1) }
    for _ in range(2 * k):
        nxt = {}
        for l, p in dist.items():
            if l == 0:
                nxt[1] = nxt.get(1, 0) + p
            else:
                nxt[l+1] = nxt.get(l+1, 0) + p * up
                nxt[l-1] = nxt.get(l-1, 0) + p * down
        dist = nxt
    counts = None
    if predicate is not None:
        totals, counts = countReducedWords(m, l_cap, predicate)
    return FreeWalkStats(m, k, dist, counts)

def freeEscapeMass(stats):
    """chi^(2k)(H) = sum_l |B_l n H| P_k(l) from predicate counts.

    Lengths beyond the enumerated range are bounded by |B_l|.

    Returns:
    tuple (Fraction upper bound, Boolean whether it was truncated)
    """
    if stats.predicate_counts is None:
        raise ValueError('walk statistics carry no predicate counts')
    total = Fraction(0)
    truncated = False
    for l, p in stats.P.items():
        if l in stats.predicate_counts:
            total += stats.predicate_counts[l] * p
        else:
            total += stats.ball_sizes[l] * p
            truncated = True
    return total, truncated


### Flattening ###

class FlatteningTrace(object):
    """Class defines the L2 flattening history of chi_S^(k).

    Attributes:
    data -- dataframe with columns k, l2_norm_num, l2_norm_den (exact
        squared norm), l2_norm, entropy, support
    target -- |G|^(-1/2 + epsilon) (float)
    k_star -- first k meeting the target, None if never (int)
    constant -- k_star / log|G| (float)
    almost_delta -- -2 log||chi^(k0)||_2 / log|G| at k0 = ceil(log N)
        when k0 was reached (float)
    """

    def __init__(self, data, target, k_star, size, norm=None):
        super(FlatteningTrace, self).__init__()
        self.data = data
        self.target = target
        self.k_star = k_star
        self.size = size
        self.constant = k_star / math.log(size) if k_star else None
        self.almost_delta = None
        if norm:
            k0 = int(math.ceil(math.log(norm)))
            hit = data[data['k'] == k0]
            if len(hit):
                self.almost_delta = -2 * math.log(float(hit['l2_norm'].iloc[0])) \
                    / math.log(size)

    def saveToCsv(self, save_to_file):
        print('Saving file...')
        self.data[[
            'k', 'l2_norm_num', 'l2_norm_den', 'entropy', 'support'
            ]].to_csv(save_to_file, index=False)
        print('...file saved.')


def flatteningTrace(
        table, S, k_max, epsilon=FLATTENING_EPSILON,
        budget=CONVOLUTION_BUDGET, stop=False):
    """Exact L2 norms, entropies and supports of chi_S^(k), k = 1..k_max.

    Arguments:
    table -- the group (GroupTable)
    S -- generator multiset (list of GroupElem)
    k_max -- largest walk length (int)

    Keyword arguments:
    epsilon -- flattening target exponent (default FLATTENING_EPSILON;
        float)
    budget -- walk budget (default CONVOLUTION_BUDGET; int)
    stop -- stop at the first k meeting the target (default False; Boolean)

    Returns:
    FlatteningTrace
    """
    if k_max * table.size * len(S) > budget:
        raise BudgetExceeded(
            'flattening trace to k = ' + str(k_max) + ' exceeds budget '
            + str(budget)
            )
    target = table.size ** (-0.5 + epsilon)
    rows = []
    k_star = None
    for k, mu in enumerate(walkSteps(table, S, k_max), start=1):
        sq = mu.l2NormSquared()
        norm = math.sqrt(float(sq))
        rows.append({
            'k': k, 'l2_norm_num': sq.numerator,
            'l2_norm_den': sq.denominator, 'l2_norm': norm,
            'entropy': entropy(mu), 'support': mu.supportSize(),
            })
        if k_star is None and norm <= target:
            k_star = k
            if stop:
                break
    ring = table.ring
    return FlatteningTrace(
        pd.DataFrame(rows), target, k_star, table.size,
        getattr(ring, 'cardinality', None)
        )

def flatteningExponent(mu, nu, epsilon=FLATTENING_EPSILON, atlas=None):
    """Measured delta in ||mu * nu||_2 = ||mu||_2^(1/2+delta) ||nu||_2^(1/2).

    Arguments:
    mu, nu -- probability measures on one table (WalkMeasure)

    Keyword arguments:
    epsilon -- hypothesis exponent (default FLATTENING_EPSILON; float)
    atlas -- proper subgroups whose cosets are checked (default None; list
        of SubgroupDescriptor)

    Returns:
    dictionary with delta, norm_ok, coset_ok, worst_coset_ratio
    """
    size = mu.table.size
    conv = convolve(mu, nu)
    log_mu = math.log(mu.l2Norm())
    delta = (math.log(conv.l2Norm()) - 0.5 * math.log(nu.l2Norm())) \
        / log_mu - 0.5 if log_mu != 0 else float('nan')
    worst = 0.0
    for H in atlas or []:
        H = _alignSubgroup(H, mu.table)
        index = size // H.size
        if index <= 1:
            continue
        ratio = float(cosetMass(mu, H)) / index ** (-epsilon)
        worst = max(worst, ratio)
    return {
        'delta': delta,
        'norm_ok': mu.l2Norm() > size ** (-0.5 + epsilon),
        'coset_ok': worst < 1,
        'worst_coset_ratio': worst,
        }


### Balog-Szemeredi-Gowers extraction ###

def _levelSets(weights, norm_sq, i_max):
    """A_i = {g : 2^(i-1) n < w(g) <= 2^i n} for |i| < i_max."""
    out = {}
    bound = int(math.ceil(i_max)) - 1
    slack = 1 + 1e-9
        # float rounding at level boundaries
    for i in range(-bound, bound + 1):
        lo = 2.0 ** (i - 1) * norm_sq * slack
        hi = 2.0 ** i * norm_sq * slack
        members = np.nonzero((weights > lo) & (weights <= hi))[0]
        if len(members):
            out[i] = members
    return out

def _indicator(table, indices):
    weights = _zeros(table, True)
    weights[np.asarray(indices)] = 1
    return WalkMeasure(table, weights, 1)

def bsgExtract(mu, nu, K, budget=CONVOLUTION_BUDGET):
    """Level-set extraction of a symmetric set of small tripling.

    Scans the level sets A_i of mu and B_j of nu for |i|, |j| < 10 log K,
    picks the pair maximizing 2^(i+j) ||mu||^2 ||nu||^2 |A_i||B_j|
    ||chi_Ai * chi_Bj||_2, takes A = A_i and returns
    S = {g : |A n A g| > |A| / C} with C = 2 |A A^-1| / |A|.

    Arguments:
    mu, nu -- probability measures on one table (WalkMeasure)
    K -- slack, K > 1 (float)

    Keyword arguments:
    budget -- convolution budget (default CONVOLUTION_BUDGET; int)

    Returns:
    dictionary with S (list of GroupElem), i, j, quantity, threshold, C,
    size, tripling (|S S S| / |S|) and min_mass_times_size
    """
    if K <= 1:
        raise ValueError('K must exceed 1, got ' + str(K))
    table = mu.table
    mu_f = mu.toFloat()
    nu_f = nu.toFloat()
    n_mu = float(mu_f.l2NormSquared())
    n_nu = float(nu_f.l2NormSquared())
    lhs = convolve(mu_f, nu_f, budget).l2Norm()
    rhs = n_mu ** 0.25 * n_nu ** 0.25 / K
    if lhs <= rhs:
        raise HypothesisNotMet(
            '||mu * nu||_2 = ' + str(lhs) + ' does not exceed '
            + '||mu||^1/2 ||nu||^1/2 / K = ' + str(rhs)
            )

    i_max = 10 * math.log(K)
    levels_mu = _levelSets(mu_f.weights, n_mu, i_max)
    levels_nu = _levelSets(nu_f.weights, n_nu, i_max)
    threshold = n_mu ** 0.25 * n_nu ** 0.25 \
        / (K * max(math.log(K), 1.0) ** 2)
    best = None
    for i, A in levels_mu.items():
        chi_A = countingMeasure(table, [ table.elements[a] for a in A ], False)
        for j, B in levels_nu.items():
            chi_B = countingMeasure(
                table, [ table.elements[b] for b in B ], False
                )
            quantity = 2.0 ** (i + j) * n_mu * n_nu * len(A) * len(B) \
                * convolve(chi_A, chi_B, budget).l2Norm()
            if best is None or quantity > best[0]:
                best = (quantity, i, j)
    if best is None or best[0] < threshold:
        raise HypothesisNotMet(
            'no level pair reaches ' + str(threshold)
            )
    quantity, i, j = best

    A = levels_mu[i]
    one_A = _indicator(table, A)
    pair_counts = convolve(one_A.reflect(), one_A, budget)
        # #{(a, b) in A x A : a^-1 b = g}
    a_a_inv = convolve(one_A, one_A.reflect(), budget).supportSize()
    C = 2.0 * a_a_inv / len(A)
    S_idx = np.nonzero(
        np.array([ int(w) for w in pair_counts.weights.tolist() ])
        > len(A) / C
        )[0]
    S = [ table.elements[s] for s in S_idx ]

    one_S = _indicator(table, S_idx)
    triple = convolve(convolve(one_S, one_S, budget), one_S, budget)
    reflected = convolve(mu_f.reflect(), mu_f, budget)
    min_mass = float(min(reflected.weights[S_idx])) if len(S_idx) else 0.0
    return {
        'S': S, 'i': i, 'j': j, 'quantity': quantity,
        'threshold': threshold, 'C': C, 'size': len(S),
        'tripling': triple.supportSize() / len(S) if S else float('nan'),
        'min_mass_times_size': min_mass * len(S),
        }


### Measure snapshots ###

def formatSnapshot(mu):
    """Lines "encoding weight_num/weight_den" over the support (exact)."""
    if not mu.isExact():
        raise ModeMismatch('snapshots hold exact measures')
    lines = []
    for i in mu.supportIndices():
        w = Fraction(int(mu.weights[i]), mu.denominator)
        lines.append(
            mu.table.elements[i].encode().hex() + ' ' + str(w.numerator)
            + '/' + str(w.denominator)
            )
    return '\n'.join(lines) + '\n'

def parseSnapshot(table, text):
    """Exact measure from snapshot text on the given table."""
    entries = []
    for line in text.splitlines():
        if not line.strip():
            continue
        enc, weight = line.split()
        num, den = weight.split('/')
        i = table.index.get(bytes.fromhex(enc))
        if i is None:
            raise NotInGroup('snapshot element ' + enc + ' is not in table')
        entries.append( (i, Fraction(int(num), int(den))) )
    denominator = 1
    for i, w in entries:
        denominator = denominator * w.denominator \
            // math.gcd(denominator, w.denominator)
    weights = _zeros(table, True)
    for i, w in entries:
        weights[i] = w.numerator * (denominator // w.denominator)
    return WalkMeasure(table, weights, denominator)
