"""Contains complex embeddings, the adjoint action and ping-pong certificates.

Every test here is numeric with explicit tolerances; freeness claims are
backed by exact word evaluation over O_K.
"""

import itertools
import json
import math

import mpmath
import numpy as np # complex linear algebra
import pandas as pd # growth tables

from slexp.internal.algebra import NumberField
from slexp.internal.groups import identity
from slexp.internal.walks import WordPredicate, inverseLetter, wordCountBound, \
    countReducedWords
from slexp.internal.errors import PrecisionLoss, IllConditioned, ZeroVector, \
    NonProximalMember, NoSuchM, FreenessUnverified, TooLarge, RingMismatch

PREDICATE_TOL = 1e-8
PROXIMAL_GAP = 1e-6
CONDITION_CAP = 1e12
M_MAX = 64
L_CHECK = 8
SAMPLES = 1000
SUBSET_SCAN_LIMIT = 12


### Embeddings ###

class EmbeddingSet(object):
    """Class defines the complex embeddings sigma_1..sigma_r of K = Q[x]/(f).

    Roots are refined by mpmath at the requested decimal precision and
    ordered by decreasing real part, then decreasing imaginary part.

    Methods:
    evaluate -- images of an O_K element under every embedding
    hatSigma -- images of a matrix over O_K
    """

    def __init__(self, field, precision=30):
        """Create a new EmbeddingSet.

        Arguments:
        field -- the number field (NumberField)

        Keyword arguments:
        precision -- decimal digits of the root refinement (default 30; int)
        """
        super(EmbeddingSet, self).__init__()
        self.field = field
        self.precision = precision
        with mpmath.workdps(precision):
            try:
                roots = mpmath.polyroots(
                    list(field.f_coeffs), maxsteps=200, extraprec=4*precision
                    )
            except mpmath.libmp.libhyper.NoConvergence as err:
                raise PrecisionLoss('root refinement failed: ' + str(err))
            roots = roots if isinstance(roots, list) else [roots]
            for root in roots:
                value = mpmath.polyval(list(field.f_coeffs), root)
                if abs(value) > mpmath.mpf(10) ** (-(precision - 4)) \
                        * max(1, abs(root)) ** field.degree:
                    raise PrecisionLoss(
                        '|f(root)| = ' + str(abs(value)) + ' above tolerance'
                        )
        self.mp_roots = sorted(
            roots, key=lambda z: (-round(float(mpmath.re(z)), 12),
                -round(float(mpmath.im(z)), 12))
            )
        self.roots = np.array([ complex(z) for z in self.mp_roots ])
        for a, b in itertools.combinations(self.roots, 2):
            if abs(a - b) < 10.0 ** (-min(precision, 15) + 4):
                raise PrecisionLoss('roots ' + str(a) + ', ' + str(b)
                    + ' are not separated')
        self.count = len(self.roots)
        self._powers = np.array([
            [ root ** j for j in range(field.degree) ] for root in self.roots
            ])

    def evaluate(self, x):
        """Images sigma_i(x) of an element of Z[theta] (numpy complex array)."""
        return self._powers @ np.array([ float(c) for c in x ])

    def hatSigma(self, g):
        """Images sigma_i(g) of a matrix over O_K, one d x d array each.

        Arguments:
        g -- element of SL_d(O_K) (GroupElem over NumberField)

        Returns:
        list of r complex numpy arrays
        """
        if not isinstance(g.ring, NumberField) or g.ring != self.field:
            raise RingMismatch(repr(g) + ' is not a matrix over O_K')
        values = np.array([ self.evaluate(e) for e in g.entries ])
            # shape (d*d, r)
        out = []
        for i in range(self.count):
            mat = values[:, i].reshape(g.d, g.d)
            det = np.linalg.det(mat)
            if abs(det - 1) > 1e-10 * max(1.0, np.linalg.norm(mat) ** g.d):
                raise PrecisionLoss(
                    'embedded determinant ' + str(det) + ' is not 1'
                    )
            out.append(mat)
        return out

    def sigma(self, g, i):
        return self.hatSigma(g)[i]


def embed(field, precision=30):
    return EmbeddingSet(field, precision)


### Adjoint representation ###

def slBasis(d):
    """Basis of sl_d: E_ij (i != j) in row-major order, then E_ii - E_i+1,i+1."""
    basis = []
    for i in range(d):
        for j in range(d):
            if i != j:
                E = np.zeros((d, d), dtype=complex)
                E[i, j] = 1
                basis.append(E)
    for i in range(d - 1):
        H = np.zeros((d, d), dtype=complex)
        H[i, i] = 1
        H[i+1, i+1] = -1
        basis.append(H)
    return basis

def slCoordinates(X):
    """Coordinates of a traceless matrix in slBasis."""
    d = X.shape[0]
    off = [ X[i, j] for i in range(d) for j in range(d) if i != j ]
    diag = np.cumsum(np.diag(X))[:d-1]
    return np.array(off + list(diag), dtype=complex)

def adjoint(gc):
    """Matrix of v -> g v g^-1 on sl_d in slBasis.

    Arguments:
    gc -- complex d x d matrix with determinant close to 1 (numpy array)

    Returns:
    complex (d^2-1) x (d^2-1) numpy array
    """
    gc = np.asarray(gc, dtype=complex)
    d = gc.shape[0]
    det = np.linalg.det(gc)
    if abs(det - 1) > 1e-8 * max(1.0, np.linalg.norm(gc) ** d):
        raise PrecisionLoss('determinant ' + str(det) + ' is not 1')
    inv = np.linalg.inv(gc)
    columns = [ slCoordinates(gc @ B @ inv) for B in slBasis(d) ]
    return np.array(columns).T


### Proximality and projective geometry ###

class ProximalityReport(object):
    """Class defines the top of the spectrum of a linear map.

    Attributes:
    lambda_top, lambda_second -- largest two eigenvalue moduli (float)
    ratio -- lambda_second / lambda_top (float)
    proximal -- unique simple top eigenvalue by more than the gap (Boolean)
    z -- top eigendirection (numpy array), None when not proximal
    ell -- covector whose kernel is the invariant complement V_T (numpy
        array), None when not proximal
    complement_dim -- dimension of V_T (int)
    """

    def __init__(self, moduli, proximal, z=None, ell=None):
        super(ProximalityReport, self).__init__()
        self.lambda_top = float(moduli[0])
        self.lambda_second = float(moduli[1]) if len(moduli) > 1 else 0.0
        self.ratio = self.lambda_second / self.lambda_top
        self.proximal = proximal
        self.z = z
        self.ell = ell
        self.complement_dim = len(moduli) - 1

    def distanceToComplement(self, x):
        """Projective distance from x to the hyperplane V_T."""
        return hyperplaneDistance(self.ell, x)


def proximality(T, gap=PROXIMAL_GAP, cond_cap=CONDITION_CAP):
    """Test whether T has a unique simple eigenvalue of maximal modulus.

    Arguments:
    T -- invertible complex square matrix (numpy array)

    Keyword arguments:
    gap -- required margin between the top two moduli (default
        PROXIMAL_GAP; float)
    cond_cap -- largest condition number accepted (default CONDITION_CAP;
        float)

    Returns:
    ProximalityReport
    """
    T = np.asarray(T, dtype=complex)
    cond = np.linalg.cond(T)
    if not np.isfinite(cond) or cond > cond_cap:
        raise IllConditioned('condition number ' + str(cond) + ' above cap')
    vals, vecs = np.linalg.eig(T)
    order = np.argsort(-np.abs(vals), kind='stable')
    moduli = np.abs(vals[order])
    scale = max(moduli[0], 1.0)
    proximal = len(moduli) == 1 or moduli[0] - moduli[1] > gap * scale
    if not proximal:
        return ProximalityReport(moduli, False)
    top = vals[order[0]]
    z = vecs[:, order[0]]
    z = z / np.linalg.norm(z)
    left_vals, left_vecs = np.linalg.eig(T.T)
    ell = left_vecs[:, int(np.argmin(np.abs(left_vals - top)))]
    ell = ell / np.linalg.norm(ell)
    return ProximalityReport(moduli, True, z, ell)

def projectiveDistance(x, y):
    """d(x, y) = ||x ^ y|| / (||x|| ||y||) for the Hermitian norm."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ZeroVector('the zero vector has no projective class')
    inner = abs(np.vdot(x, y)) / (nx * ny)
    return float(math.sqrt(max(0.0, 1.0 - min(1.0, inner) ** 2)))

def hyperplaneDistance(ell, x):
    """Projective distance from x to the hyperplane ker(ell)."""
    x = np.asarray(x, dtype=complex)
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ZeroVector('the zero vector has no projective class')
    return float(abs(np.dot(ell, x)) / (np.linalg.norm(ell) * nx))


### Generic sets ###

class GenericReport(object):
    """Class defines the outcome of the three genericity conditions.

    Attributes:
    condition_i, condition_ii, condition_iii -- pass flags (Boolean;
        condition_iii is None when both embeddings coincide)
    margins -- worst-case margin per condition (dict)
    passed -- every applicable condition holds (Boolean)
    """

    def __init__(self, condition_i, condition_ii, condition_iii, margins):
        super(GenericReport, self).__init__()
        self.condition_i = condition_i
        self.condition_ii = condition_ii
        self.condition_iii = condition_iii
        self.margins = margins
        self.passed = condition_i and condition_ii \
            and condition_iii is not False

    def toDict(self):
        return {
            'condition_i': self.condition_i,
            'condition_ii': self.condition_ii,
            'condition_iii': self.condition_iii,
            'margins': self.margins, 'passed': self.passed,
            }


def lettersWithInverses(A):
    """A followed by the inverses, letter 2i = a_i and 2i+1 = a_i^-1."""
    out = []
    for g in A:
        out += [ g, g.inverse() ]
    return out

def _numericRank(vectors, tol):
    s = np.linalg.svd(np.array(vectors), compute_uv=False)
    if not len(s) or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))

def _proximalData(embeddings, letters, i):
    reports = []
    for g in letters:
        report = proximality(adjoint(embeddings.sigma(g, i)))
        if not report.proximal:
            raise NonProximalMember(
                'rho_' + str(i+1) + '(' + g.formatText() + ') is not proximal'
                )
        reports.append(report)
    return reports

def genericCheck(
        A, embeddings, i=0, j=1, tol=PREDICATE_TOL, samples=200, seed=0):
    """Check conditions (i)-(iii) of genericity for A in embeddings i and j.

    (i) z of rho(g1) avoids V of rho(g2) whenever g1 g2 != 1; (ii) no proper
    subspace of dimension k holds more than k+1 of the z vectors, scanned
    over every subset when there are at most SUBSET_SCAN_LIMIT vectors and
    over seeded random subsets otherwise; (iii) no linear T maps more than
    d^2+1 of the z_1 lines to the matching z_2 lines, tested by the
    smallest singular value of the stacked constraints over (d^2+2)-subsets.

    Arguments:
    A -- elements of SL_d(O_K) (list of GroupElem)
    embeddings -- the embeddings (EmbeddingSet)

    Keyword arguments:
    i, j -- embedding indices (default 0 and 1; int)
    tol -- numeric tolerance (default PREDICATE_TOL; float)
    samples -- random subsets drawn per size when exhaustive scans are too
        large (default 200; int)
    seed -- seed of the random subsets (default 0; int)

    Returns:
    GenericReport
    """
    A = list(A)
    if not A:
        return GenericReport(True, True, True, {})
    j = min(j, embeddings.count - 1)
    letters = lettersWithInverses(A)
    d = A[0].d
    n = d * d - 1
    embeddings_used = sorted(set([i, j]))
    data = { e: _proximalData(embeddings, letters, e) for e in embeddings_used }
    rng = np.random.default_rng(seed)

    margin_i = float('inf')
    for e in embeddings_used:
        for a, ra in zip(letters, data[e]):
            for b, rb in zip(letters, data[e]):
                if (a * b).isIdentity():
                    continue
                margin_i = min(margin_i, rb.distanceToComplement(ra.z))
    ok_i = margin_i > tol

    ok_ii = True
    worst_ii = None
    for e in embeddings_used:
        Z = [ r.z for r in data[e] ]
        if len(Z) <= SUBSET_SCAN_LIMIT:
            subsets = ( c for s in range(3, len(Z) + 1)
                for c in itertools.combinations(range(len(Z)), s) )
        else:
            subsets = ( tuple(sorted(rng.choice(len(Z), s, replace=False)))
                for s in range(3, n + 2) for _ in range(samples) )
        for c in subsets:
            rank = _numericRank([ Z[x] for x in c ], tol)
            if rank <= len(c) - 2 and rank < n:
                ok_ii = False
                worst_ii = list(c)
                break

    ok_iii = None
    margin_iii = None
    if i != j:
        z1 = [ r.z for r in data[i] ]
        z2 = [ r.z for r in data[j] ]
        size = d * d + 2
        margin_iii = float('inf')
        if len(letters) >= size:
            blocks = []
            for a, b in zip(z1, z2):
                P = np.eye(n) - np.outer(b, b.conj()) / np.vdot(b, b)
                blocks.append(np.kron(a.reshape(1, -1), P))
            all_subsets = itertools.combinations(range(len(letters)), size)
            count = math.comb(len(letters), size)
            if count > samples * 10:
                all_subsets = ( tuple(sorted(rng.choice(len(letters), size,
                    replace=False))) for _ in range(samples) )
            for c in all_subsets:
                stacked = np.vstack([ blocks[x] for x in c ])
                s = np.linalg.svd(stacked, compute_uv=False)
                margin_iii = min(margin_iii, float(s[-1]))
        ok_iii = margin_iii > tol

    return GenericReport(ok_i, ok_ii, ok_iii, {
        'condition_i': margin_i, 'condition_ii_subset': worst_ii,
        'condition_iii': margin_iii,
        })


### Ping-pong ###

def _wordsDistinct(letters, l_check, cap):
    """Evaluate every reduced word of length <= l_check exactly.

    Returns:
    number of words; raises FreenessUnverified on a coincidence
    """
    m = len(letters) // 2
    total = 1 + sum(2*m * (2*m - 1) ** (l - 1) for l in range(1, l_check+1)) \
        if m else 1
    if total > cap:
        raise TooLarge(str(total) + ' words exceed cap ' + str(cap))
    start = identity(letters[0].ring, letters[0].d)
    seen = { start.encode(): () }
    stack = [ ((), start) ]
    while stack:
        word, value = stack.pop()
        if len(word) == l_check:
            continue
        for letter in range(len(letters)):
            if word and word[-1] == inverseLetter(letter):
                continue
            new_word = word + (letter,)
            new_value = value * letters[letter]
            key = new_value.encode()
            if key in seen:
                raise FreenessUnverified(
                    'words ' + str(seen[key]) + ' and ' + str(new_word)
                    + ' evaluate to the same element'
                    )
            seen[key] = new_word
            stack.append( (new_word, new_value) )
    return len(seen)

def _sampleQ(report, delta, count, rng):
    """Seeded points at projective distance >= delta from V_T."""
    n = len(report.z)
    points = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 100 * count:
            break
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if report.distanceToComplement(x) >= delta:
            points.append(x / np.linalg.norm(x))
    return points

def powerUp(
        A, embeddings, i=0, M_max=M_MAX, l_check=L_CHECK, samples=SAMPLES,
        seed=0, cap=200000):
    """Find M such that {g^M} plays ping-pong, and check freeness exactly.

    When every letter is proximal in rho_i the geometric certificate is
    searched for M = 1..M_max: with delta half the smallest condition (i)
    margin, each rho(g^M) must map the sampled Q_g (points at distance
    >= delta from V_g) into the delta/2 ball around z_g and contract
    sampled pairs. Otherwise the geometric part is skipped and M = 1. In
    both cases all reduced words of length <= l_check over {g^(+-M)} must
    be distinct under exact O_K arithmetic.

    Arguments:
    A -- elements of SL_d(O_K) (list of GroupElem)
    embeddings -- the embeddings (EmbeddingSet)

    Keyword arguments:
    i -- embedding used for the geometric certificate (default 0; int)
    M_max -- largest power tried (default M_MAX; int)
    l_check -- word length of the exact check (default L_CHECK; int)
    samples -- sampled points per Q_g (default SAMPLES; int)
    seed -- sampling seed (default 0; int)
    cap -- largest number of words evaluated (default 200000; int)

    Returns:
    tuple (M, list of letters g^M, g^-M, certificate dictionary)
    """
    A = list(A)
    letters = lettersWithInverses(A)
    try:
        reports = [ proximality(adjoint(embeddings.sigma(g, i)))
            for g in letters ]
        all_proximal = all(r.proximal for r in reports)
    except IllConditioned:
        all_proximal = False

    margins = {}
    if all_proximal:
        margin = float('inf')
        for a, ra in zip(letters, reports):
            for b, rb in zip(letters, reports):
                if not (a * b).isIdentity():
                    margin = min(margin, rb.distanceToComplement(ra.z))
        if not margin > PREDICATE_TOL:
            raise NoSuchM('condition (i) fails, no ping-pong neighbourhoods')
        delta = margin / 2.0
        radius = delta / 2.0
        rng = np.random.default_rng(seed)
        clouds = [ _sampleQ(r, delta, samples, rng) for r in reports ]
        base = [ adjoint(embeddings.sigma(g, i)) for g in letters ]
        found = None
        for M in range(1, M_max + 1):
            worst_inclusion = 0.0
            worst_contraction = float('inf')
            ok = True
            for R, r, cloud in zip(base, reports, clouds):
                T = np.linalg.matrix_power(R, M)
                images = [ T @ x for x in cloud ]
                inclusion = max(projectiveDistance(y, r.z) for y in images)
                worst_inclusion = max(worst_inclusion, inclusion)
                for (x, y), (tx, ty) in zip(
                        zip(cloud, cloud[1:]), zip(images, images[1:])):
                    before = projectiveDistance(x, y)
                    if before > 0:
                        worst_contraction = min(
                            worst_contraction,
                            before - projectiveDistance(tx, ty)
                            )
                if inclusion >= radius or worst_contraction <= 0:
                    ok = False
                    break
            if ok:
                found = M
                margins = {
                    'delta': delta, 'radius': radius,
                    'inclusion': worst_inclusion,
                    'contraction': worst_contraction,
                    }
                break
        if found is None:
            raise NoSuchM('no M <= ' + str(M_max) + ' passes ping-pong')
        M = found
    else:
        M = 1

    powered = []
    for g in A:
        gM = g ** M
        powered += [ gM, gM.inverse() ]
    words = _wordsDistinct(powered, l_check, cap)
    certificate = {
        'M': M, 'margins': margins, 'L_check': l_check, 'free': True,
        'geometric': all_proximal, 'words': words,
        }
    return M, powered, certificate

def certificateJson(certificate):
    return json.dumps(certificate, sort_keys=True)


### Norm growth ###

def normGrowth(S, embeddings, l_max, cap=200000):
    """Largest log ||sigma(g)|| over g in prod_l S, l = 1..l_max.

    Arguments:
    S -- elements of SL_d(O_K) (list of GroupElem)
    embeddings -- the embeddings (EmbeddingSet)
    l_max -- largest product length (int)

    Keyword arguments:
    cap -- largest product set (default 200000; int)

    Returns:
    tuple (pandas dataframe with columns l, size, max_log_norm; dictionary
    with slope and subadditive)
    """
    S = list({ g.encode(): g for g in S }.values())
    level = list(S)
    rows = []
    for l in range(1, l_max + 1):
        best = 0.0
        for g in level:
            for mat in embeddings.hatSigma(g):
                best = max(best, math.log(np.linalg.norm(mat, 2)))
        rows.append({ 'l': l, 'size': len(level), 'max_log_norm': best })
        if l < l_max:
            nxt = {}
            for g in level:
                for s in S:
                    h = g * s
                    nxt.setdefault(h.encode(), h)
            if len(nxt) > cap:
                raise TooLarge('product set exceeds cap ' + str(cap))
            level = list(nxt.values())
    df = pd.DataFrame(rows)
    maxima = dict(zip(df['l'], df['max_log_norm']))
    subadditive = all(
        maxima[a + b] <= maxima[a] + maxima[b] + 1e-9
        for a in maxima for b in maxima if a + b in maxima
        )
    slope = float(np.polyfit(df['l'], df['max_log_norm'], 1)[0]) \
        if len(df) > 1 else float(df['max_log_norm'].iloc[0])
    return df, { 'slope': slope, 'subadditive': subadditive }


### Subgroup predicates ###

def _asCoordinates(v, d):
    v = np.asarray(v, dtype=complex)
    if v.ndim == 2:
        return slCoordinates(v)
    return v

def predicateHV(h, V, embeddings, i=0, tol=PREDICATE_TOL):
    """Whether Ad(sigma_i(h)) preserves the subspace V of sl_d.

    Arguments:
    h -- element of SL_d(O_K) (GroupElem)
    V -- basis of V, as traceless matrices or slBasis coordinates (list)
    embeddings -- the embeddings (EmbeddingSet)

    Keyword arguments:
    i -- embedding index (default 0; int)
    tol -- residual tolerance (default PREDICATE_TOL; float)

    Returns:
    Boolean, ||(I - P_V) Ad P_V|| < tol ||Ad||
    """
    R = adjoint(embeddings.sigma(h, i))
    basis = np.array([ _asCoordinates(v, h.d) for v in V ]).T
    Q, _ = np.linalg.qr(basis)
    P = Q @ Q.conj().T
    residual = np.linalg.norm((np.eye(len(P)) - P) @ R @ P, 2)
    return bool(residual < tol * max(1.0, np.linalg.norm(R, 2)))

def predicateHT(h, T, embeddings, i=0, j=1, tol=PREDICATE_TOL):
    """Whether T Ad(sigma_i(h)) = Ad(sigma_j(h)) T up to relative residual."""
    j = min(j, embeddings.count - 1)
    R1 = adjoint(embeddings.sigma(h, i))
    R2 = adjoint(embeddings.sigma(h, j))
    return _relativeCommutator(T, R1, R2) < tol

def _relativeCommutator(T, R1, R2):
    scale = np.linalg.norm(T) * max(
        np.linalg.norm(R1), np.linalg.norm(R2), 1.0
        )
    return float(np.linalg.norm(T @ R1 - R2 @ T) / scale)


class HTPredicate(WordPredicate):
    """Class defines H_T membership evaluated along reduced words.

    The state is the pair of adjoint images of the word so far, so each
    extension costs two matrix products.
    """

    def __init__(self, letters, T, embeddings, i=0, j=1, tol=PREDICATE_TOL):
        """Create a new HTPredicate.

        Arguments:
        letters -- a_1, a_1^-1, a_2, a_2^-1, ... (list of GroupElem)
        T -- invertible map of sl_d (numpy array)
        embeddings -- the embeddings (EmbeddingSet)

        Keyword arguments:
        i, j -- embedding indices (default 0 and 1; int)
        tol -- relative residual tolerance (default PREDICATE_TOL; float)
        """
        super(HTPredicate, self).__init__(None)
        j = min(j, embeddings.count - 1)
        self.T = np.asarray(T, dtype=complex)
        self.tol = tol
        self.first = [ adjoint(embeddings.sigma(g, i)) for g in letters ]
        self.second = [ adjoint(embeddings.sigma(g, j)) for g in letters ]
        self.n = self.T.shape[0]

    def start(self):
        return (np.eye(self.n, dtype=complex), np.eye(self.n, dtype=complex))

    def extend(self, state, letter):
        return (state[0] @ self.first[letter], state[1] @ self.second[letter])

    def test(self, state):
        return _relativeCommutator(self.T, state[0], state[1]) < self.tol


def wordCountAudit(letters, T, embeddings, l_max, i=0, j=1):
    """|B_l n H_T| against (2m-1)^(l/2+1) (2m-2)^(l/2-1) for l = 1..l_max.

    Returns:
    pandas dataframe with columns l, ball_size, in_H_T, bound, ok
    """
    m = len(letters) // 2
    predicate = HTPredicate(letters, T, embeddings, i, j)
    totals, hits = countReducedWords(m, l_max, predicate)
    rows = []
    for l in range(1, l_max + 1):
        bound = wordCountBound(m, l)
        rows.append({
            'l': l, 'ball_size': totals[l], 'in_H_T': hits[l],
            'bound': bound, 'ok': hits[l] <= bound,
            })
    return pd.DataFrame(rows)

def goodLetterSearch(
        letters, T, embeddings, i=0, j=1, radii=None, l_max=6):
    """Find letters g0 such that no word of H_T starts with g0.

    Geometric mode (every letter proximal in both embeddings): g0 is good
    when d(T z_1, z_2) > kappa(T) r_1 + r_2 with kappa(T) = ||T|| ||T^-1||.
    Combinatorial mode otherwise: g0 is good when no reduced word of
    length <= l_max starting with g0 lies in H_T.

    Returns:
    dictionary with mode, good_letters (letter indices) and found
    """
    j = min(j, embeddings.count - 1)
    T = np.asarray(T, dtype=complex)
    try:
        first = [ proximality(adjoint(embeddings.sigma(g, i)))
            for g in letters ]
        second = [ proximality(adjoint(embeddings.sigma(g, j)))
            for g in letters ]
        geometric = all(r.proximal for r in first + second)
    except IllConditioned:
        geometric = False

    good = []
    if geometric:
        kappa = np.linalg.cond(T)
        for n, (r1, r2) in enumerate(zip(first, second)):
            rad1, rad2 = radii[n] if radii else (0.0, 0.0)
            if projectiveDistance(T @ r1.z, r2.z) > kappa * rad1 + rad2:
                good.append(n)
        mode = 'geometric'
    else:
        predicate = HTPredicate(letters, T, embeddings, i, j)
        for n in range(len(letters)):
            state = predicate.extend(predicate.start(), n)
            stack = [ ((n,), state) ]
            clean = True
            while stack and clean:
                word, state = stack.pop()
                if predicate.test(state):
                    clean = False
                    break
                if len(word) < l_max:
                    for letter in range(len(letters)):
                        if letter == inverseLetter(word[-1]):
                            continue
                        stack.append( (word + (letter,),
                            predicate.extend(state, letter)) )
            if clean:
                good.append(n)
        mode = 'combinatorial'
    return { 'mode': mode, 'good_letters': good, 'found': bool(good) }

def predicateScan(letters, T, embeddings, l_max, i=0, j=1):
    """H_T membership of every reduced word of length <= l_max.

    Words are written with letters a1, A1, a2, A2, ... for a_i and a_i^-1.

    Returns:
    pandas dataframe with columns word, length, in_H_T, in enumeration order
    """
    names = []
    for n in range(len(letters) // 2):
        names += [ 'a' + str(n+1), 'A' + str(n+1) ]
    predicate = HTPredicate(letters, T, embeddings, i, j)
    rows = []
    stack = [ ((), predicate.start()) ]
    while stack:
        word, state = stack.pop()
        rows.append({
            'word': '.'.join(names[x] for x in word), 'length': len(word),
            'in_H_T': predicate.test(state),
            })
        if len(word) < l_max:
            for letter in reversed(range(len(letters))):
                if word and word[-1] == inverseLetter(letter):
                    continue
                stack.append(
                    (word + (letter,), predicate.extend(state, letter))
                    )
    return pd.DataFrame(rows)
