"""Contains the Cayley operator of a group and its spectral diagnostics.

All quantities refer to the normalized operator M = adjacency / |S|, so the
top eigenvalue of a connected Cayley graph is 1 and the gap is 1 - lambda2.
"""

import math
from fractions import Fraction

import numpy as np # handle arrays
import scipy.linalg as sp_linalg
import scipy.sparse as sp_sparse
import scipy.sparse.csgraph as sp_csgraph
import scipy.sparse.linalg as sp_sparse_linalg

from slexp.internal.groups import GroupTable, isSymmetric, \
    ENUMERATION_CAP
from slexp.internal.errors import NotSymmetric, TooLargeForDense, \
    NoConvergence, TooLarge
from slexp.internal import walks

DENSE_CAP = 4096
CHEEGER_CAP = 24
POWER_MAX_ITER = 100000
POWER_TOL = 1e-9


class CayleyOperator(object):
    """Class defines the convolution operator f -> (g -> mean_s f(s g)).

    The operator is stored as a neighbour table nbr with nbr[i, j] the index
    of s_j g_i, so applying it is one gather and a mean.

    Methods:
    apply -- M f for a vector f
    dense -- M as a dense numpy array
    adjacency -- unnormalized sparse adjacency (with multiplicity)
    """

    def __init__(self, nbr, mode='matrix-free', table=None, S=None):
        """Create a new CayleyOperator.

        Arguments:
        nbr -- neighbour table, shape (|G|, |S|) (numpy array of int)

        Keyword arguments:
        mode -- 'dense' or 'matrix-free' (default 'matrix-free'; String)
        table -- group table the indices refer to (default None; GroupTable)
        S -- generator multiset (default None; list of GroupElem)
        """
        super(CayleyOperator, self).__init__()
        self.nbr = np.asarray(nbr, dtype=np.int64)
        self.size, self.degree = self.nbr.shape
        self.mode = mode
        self.table = table
        self.S = list(S) if S is not None else None
        self._dense = None

    def apply(self, f):
        return f[self.nbr].mean(axis=1)

    def dense(self):
        if self._dense is None:
            if self.size > DENSE_CAP:
                raise TooLargeForDense(
                    'dense operator on ' + str(self.size)
                    + ' vertices exceeds cap ' + str(DENSE_CAP)
                    )
            M = np.zeros((self.size, self.size))
            rows = np.repeat(np.arange(self.size), self.degree)
            np.add.at(M, (rows, self.nbr.ravel()), 1.0 / self.degree)
            self._dense = M
        return self._dense

    def adjacency(self):
        rows = np.repeat(np.arange(self.size), self.degree)
        return sp_sparse.csr_matrix(
            (np.ones(rows.size), (rows, self.nbr.ravel())),
            shape=(self.size, self.size)
            )

    def components(self):
        """Number of connected components of the Cayley graph."""
        n, labels = sp_csgraph.connected_components(
            self.adjacency(), directed=False
            )
        return n


def buildOperator(
        spec_or_table, S, mode='auto', dense_cap=DENSE_CAP,
        cap=ENUMERATION_CAP, verbose=False):
    """Build the Cayley operator of a group for a symmetric multiset S.

    Arguments:
    spec_or_table -- the group (GroupSpec or GroupTable)
    S -- symmetric generator multiset (list of GroupElem)

    Keyword arguments:
    mode -- 'dense', 'matrix-free' or 'auto' (dense when small enough)
        (default 'auto'; String)
    dense_cap -- largest group for dense mode (default DENSE_CAP; int)
    cap -- enumeration cap used when a spec is given (default
        ENUMERATION_CAP; int)
    verbose -- print progress (default False; Boolean)

    Returns:
    CayleyOperator
    """
    S = list(S)
    if not S:
        raise NotSymmetric('generator multiset is empty')
    if not isSymmetric(S):
        raise NotSymmetric(
            'generator multiset of size ' + str(len(S))
            + ' is not closed under inverses'
            )
    if isinstance(spec_or_table, GroupTable):
        table = spec_or_table
    else:
        table = GroupTable.fromSpec(spec_or_table, cap, verbose)

    if mode == 'auto':
        mode = 'dense' if table.size <= dense_cap else 'matrix-free'
    if mode == 'dense' and table.size > dense_cap:
        raise TooLargeForDense(
            '|G| = ' + str(table.size) + ' exceeds dense cap '
            + str(dense_cap)
            )
    return CayleyOperator(table.neighborTable(S), mode, table, S)

def operatorFromTable(nbr):
    """Cayley operator of an abstract group given by its neighbour table."""
    nbr = np.asarray(nbr, dtype=np.int64)
    adjacency = np.zeros((nbr.shape[0], nbr.shape[0]), dtype=np.int64)
    np.add.at(
        adjacency, (np.repeat(np.arange(nbr.shape[0]), nbr.shape[1]),
        nbr.ravel()), 1
        )
    if not np.array_equal(adjacency, adjacency.T):
        raise NotSymmetric('neighbour table does not define a symmetric graph')
    return CayleyOperator(nbr, 'dense' if nbr.shape[0] <= DENSE_CAP
        else 'matrix-free')

def cyclicTable(n, steps):
    """Neighbour table of Z/nZ with generator multiset steps."""
    return np.array([ [ (i + s) % n for s in steps ] for i in range(n) ])

def completeTable(n):
    """Neighbour table of Z/nZ with every non-zero generator (graph K_n)."""
    return cyclicTable(n, range(1, n))


class SpectrumReport(object):
    """Class defines the top of the spectrum of a Cayley operator.

    Attributes:
    lambda1, lambda2 -- top two eigenvalues of M (float)
    gap -- 1 - lambda2 (float)
    method -- 'dense', 'power' or 'lanczos' (String)
    residual -- ||M v - lambda2 v|| of the returned eigenvector (float)
    iterations -- solver iterations, 0 for dense (int)
    connected -- whether the Cayley graph is connected (Boolean)
    """

    def __init__(
            self, lambda1, lambda2, method, residual=0.0, iterations=0,
            connected=True):
        super(SpectrumReport, self).__init__()
        self.lambda1 = float(lambda1)
        self.lambda2 = float(lambda2)
        self.gap = 1.0 - self.lambda2
        self.method = method
        self.residual = float(residual)
        self.iterations = int(iterations)
        self.connected = connected

    def __repr__(self):
        return 'SpectrumReport(lambda2=' + repr(self.lambda2) + ', method=' \
            + self.method + ')'

    def toDict(self):
        return {
            'lambda1': self.lambda1, 'lambda2': self.lambda2, 'gap': self.gap,
            'method': self.method, 'residual': self.residual,
            'iterations': self.iterations, 'connected': self.connected,
            }


def _shiftedDeflated(op):
    """v -> P (I + M)/2 P v with P the projection off the constant vector."""
    def matvec(v):
        v = np.ravel(v)
        v = v - v.mean()
        w = 0.5 * (v + op.apply(v))
        return w - w.mean()
    return matvec

def _residual(op, v, lam):
    return float(np.linalg.norm(op.apply(v) - lam * v))

def spectrumTop2(
        op, method=None, tol=POWER_TOL, max_iter=POWER_MAX_ITER, seed=0):
    """Top two eigenvalues of the normalized Cayley operator.

    A disconnected graph reports lambda2 = 1 without solving. Iterative
    methods work on (I + M)/2 restricted to the complement of the constant
    vector, whose top eigenvalue is (1 + lambda2)/2.

    Arguments:
    op -- the operator (CayleyOperator)

    Keyword arguments:
    method -- 'dense', 'power' or 'lanczos'; dense for dense operators and
        power otherwise when None (default None; String)
    tol -- residual tolerance of the iterative methods (default POWER_TOL;
        float)
    max_iter -- iteration cap (default POWER_MAX_ITER; int)
    seed -- seed of the starting vector (default 0; int)

    Returns:
    SpectrumReport
    """
    if method is None:
        method = 'dense' if op.mode == 'dense' else 'power'
    if op.components() > 1:
        return SpectrumReport(1.0, 1.0, method, connected=False)

    n = op.size
    if method == 'dense':
        vals, vecs = sp_linalg.eigh(op.dense())
        lam2 = vals[-2]
        return SpectrumReport(
            vals[-1], lam2, 'dense', _residual(op, vecs[:, -2], lam2)
            )

    matvec = _shiftedDeflated(op)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v -= v.mean()
    v /= np.linalg.norm(v)

    if method == 'lanczos':
        linop = sp_sparse_linalg.LinearOperator(
            (n, n), matvec=matvec, dtype=np.float64
            )
        try:
            vals, vecs = sp_sparse_linalg.eigsh(
                linop, k=1, which='LA', v0=v, tol=tol * 1e-2,
                maxiter=int(max_iter)
                )
        except sp_sparse_linalg.ArpackNoConvergence as err:
            raise NoConvergence('Lanczos did not converge: ' + str(err))
        w = vecs[:, 0]
        w = w - w.mean()
        w /= np.linalg.norm(w)
        lam2 = float(w @ op.apply(w))
        residual = _residual(op, w, lam2)
        if residual > max(tol, 1e-7):
            raise NoConvergence(
                'Lanczos residual ' + str(residual) + ' above tolerance'
                )
        return SpectrumReport(1.0, lam2, 'lanczos', residual)

    if method != 'power':
        raise ValueError('unknown spectrum method ' + str(method))

    check_every = 10
    residual = float('inf')
    for it in range(1, int(max_iter) + 1):
        w = matvec(v)
        norm = np.linalg.norm(w)
        if norm == 0:
            # v lies in the -1 eigenspace
            return SpectrumReport(1.0, -1.0, 'power', _residual(op, v, -1.0), it)
        v = w / norm
        if it % check_every == 0:
            lam2 = float(v @ op.apply(v))
            residual = _residual(op, v, lam2)
            if residual <= tol:
                return SpectrumReport(1.0, lam2, 'power', residual, it)
    raise NoConvergence(
        'power iteration hit ' + str(int(max_iter)) + ' iterations with '
        + 'residual ' + str(residual)
        )

def cheegerExhaustive(op, cap=CHEEGER_CAP, chunk=1 << 14):
    """Exact expansion constant min |dX|/|X| over |X| <= |G|/2.

    |dX| counts the pairs (x, s) with x in X and s x outside X, so a single
    vertex gives |S|.

    Arguments:
    op -- the operator (CayleyOperator)

    Keyword arguments:
    cap -- largest vertex count scanned (default CHEEGER_CAP; int)
    chunk -- subsets scanned per numpy batch (default 2^14; int)

    Returns:
    Fraction
    """
    n = op.size
    if n > cap:
        raise TooLarge(
            'exhaustive Cheeger scan over ' + str(n) + ' vertices exceeds cap '
            + str(cap)
            )
    bits = np.arange(n, dtype=np.int64)
    best = None
    total = 1 << n
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        member = ((masks[:, None] >> bits) & 1).astype(np.int8)
        sizes = member.sum(axis=1)
        keep = sizes <= n // 2
        if not keep.any():
            continue
        member = member[keep]
        sizes = sizes[keep]
        outside = 1 - member[:, op.nbr]
            # shape (subsets, n, |S|)
        boundary = (member[:, :, None] * outside).sum(axis=(1, 2))
        ratios = boundary / sizes
        i = int(np.argmin(ratios))
        candidate = Fraction(int(boundary[i]), int(sizes[i]))
        if best is None or candidate < best:
            best = candidate
    return best

def traceMoment(table, S, k, budget=walks.CONVOLUTION_BUDGET):
    """Exact Tr(M^2k) = |G| ||chi_S^(k)||_2^2.

    Arguments:
    table -- the group (GroupTable)
    S -- generator multiset (list of GroupElem)
    k -- half the walk length (int)

    Keyword arguments:
    budget -- walk budget passed to walks.walkPower (default
        walks.CONVOLUTION_BUDGET; int)

    Returns:
    Fraction
    """
    mu = walks.walkPower(table, S, k, budget=budget)
    return table.size * mu.l2NormSquared()

def minRepDimension(p, k, d):
    """Lower bound on the dimension of nontrivial representations of SL_d(F_q).

    (q-1)/2 for d = 2 and odd q, q-1 for d = 2 and even q, q^(d-1)-1 for
    d >= 3; 1 for degenerate cases.
    """
    q = p ** k
    if q <= 3 or d < 2:
        return 1
    if d == 2:
        value = (q - 1) // 2 if p % 2 else q - 1
    else:
        value = q ** (d - 1) - 1
    return max(value, 1)

def groupMinRepDimension(spec):
    """Smallest minRepDimension over the CRT factors of spec."""
    return min(
        minRepDimension(f.p, f.k, spec.d) for f in spec.ring.factors
        )

def eigenvalueBoundCheck(op, k, delta_prime=None):
    """Check lambda2^2k <= |G|^(1-delta') ||chi_S^(k)||_2^2.

    Arguments:
    op -- dense-capable operator built from a group table (CayleyOperator)
    k -- half the walk length (int)

    Keyword arguments:
    delta_prime -- exponent, log D / log|G| with D the minimal
        representation dimension when None (default None; float)

    Returns:
    dictionary with lambda2, lhs, rhs, delta_prime, holds
    """
    n = op.size
    if delta_prime is None:
        D = groupMinRepDimension(op.table.spec)
        delta_prime = math.log(D) / math.log(n)
    report = spectrumTop2(op, method='dense')
    moment = traceMoment(op.table, op.S, k)
    l2_squared = float(moment) / n
    lhs = report.lambda2 ** (2 * k)
    rhs = n ** (1.0 - delta_prime) * l2_squared
    return {
        'lambda2': report.lambda2, 'lhs': lhs, 'rhs': rhs,
        'delta_prime': delta_prime, 'holds': lhs <= rhs * (1 + 1e-9),
        }

def multiplicityReport(op, tol=1e-8):
    """Multiplicity of lambda2 in the dense spectrum against the bound D."""
    vals = sp_linalg.eigh(op.dense(), eigvals_only=True)
    lam2 = vals[-2]
    multiplicity = int(np.sum(np.abs(vals[:-1] - lam2) <= tol))
    D = groupMinRepDimension(op.table.spec)
    return {
        'lambda2': float(lam2), 'multiplicity': multiplicity,
        'min_rep_dimension': D, 'ok': multiplicity >= D,
        }

def cheegerBound(op):
    """The relation c(G) >= |S| (1 - lambda2) / 2 on a small graph."""
    c = cheegerExhaustive(op)
    report = spectrumTop2(op, method='dense')
    bound = op.degree * (1.0 - report.lambda2) / 2.0
    return {
        'cheeger': c, 'lambda2': report.lambda2, 'bound': bound,
        'holds': float(c) >= bound - 1e-12,
        }
