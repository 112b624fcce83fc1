"""Contains SL_d over residue rings, enumeration, projections and subgroups."""

import collections
import itertools
import json
import math

import numpy as np # index tables
import pandas as pd # reports

from slexp.internal.algebra import FieldFactor, NumberField, ResidueRing
from slexp.internal.errors import RingMismatch, NotInGroup, TooLarge, \
    NotSymmetric, FactorMismatch, AtlasUnavailable

ENUMERATION_CAP = 100000


### Matrix helpers ###

_SIGNED_PERMUTATIONS = {}

def _signedPermutations(d):
    """Permutations of range(d) with their parity, cached per dimension."""
    if d not in _SIGNED_PERMUTATIONS:
        out = []
        for perm in itertools.permutations(range(d)):
            inversions = sum(
                1 for i in range(d) for j in range(i+1, d) if perm[i] > perm[j]
                )
            out.append( (perm, inversions % 2) )
        _SIGNED_PERMUTATIONS[d] = out
    return _SIGNED_PERMUTATIONS[d]

def determinant(ring, d, entries):
    """Determinant of a row-major d x d matrix of ring elements (Leibniz).

    Arguments:
    ring -- ring the entries live in
    d -- dimension (int)
    entries -- row-major entries (sequence of tuples)

    Returns:
    ring element
    """
    if d == 1:
        return tuple(entries[0])
    if d == 2:
        return ring.sub(
            ring.mul(entries[0], entries[3]), ring.mul(entries[1], entries[2])
            )
    total = ring.zero()
    for perm, odd in _signedPermutations(d):
        term = ring.one()
        for i in range(d):
            term = ring.mul(term, entries[i*d + perm[i]])
            if ring.isZero(term):
                break
        if odd:
            total = ring.sub(total, term)
        else:
            total = ring.add(total, term)
    return total

def _minor(entries, d, row, col):
    return tuple(
        entries[i*d + j] for i in range(d) if i != row
        for j in range(d) if j != col
        )

def _adjugate(ring, d, entries):
    if d == 1:
        return (ring.one(),)
    if d == 2:
        a, b, c, e = entries
        return (e, ring.neg(b), ring.neg(c), a)
    out = [None] * (d*d)
    for i in range(d):
        for j in range(d):
            cof = determinant(ring, d-1, _minor(entries, d, i, j))
            if (i + j) % 2:
                cof = ring.neg(cof)
            out[j*d + i] = cof
    return tuple(out)

def _matMul(ring, d, x, y):
    out = []
    for i in range(d):
        row = x[i*d:(i+1)*d]
        for j in range(d):
            acc = ring.zero()
            for k in range(d):
                a = row[k]
                if not ring.isZero(a):
                    acc = ring.add(acc, ring.mul(a, y[k*d + j]))
            out.append(acc)
    return tuple(out)


class GroupElem(object):
    """Class defines an element of SL_d over a ring.

    Entries are stored row-major as ring element tuples. Elements are
    immutable and hash by their entries; encode() gives the canonical bytes
    used for every set and table in the package.

    Methods:
    inverse -- adjugate inverse
    det -- determinant in the ring
    encode -- canonical byte encoding
    conjugate -- h g h^-1
    isIdentity, trace, entry, rows, formatText
    """

    DEBUG = False
        # if True, every product and inverse re-checks det = 1

    def __init__(self, ring, d, entries, check=True):
        """Create a new GroupElem.

        Arguments:
        ring -- ring of the entries (ResidueRing, FieldFactor or NumberField)
        d -- dimension (int)
        entries -- d*d ring elements, row-major (sequence of tuples)

        Keyword arguments:
        check -- verify det = 1 (default True; Boolean)
        """
        super(GroupElem, self).__init__()
        self.ring = ring
        self.d = d
        self.entries = tuple(tuple(e) for e in entries)
        if len(self.entries) != d*d:
            raise RingMismatch(
                'expected ' + str(d*d) + ' entries, got '
                + str(len(self.entries))
                )
        self._encoding = None
        if check:
            det = determinant(ring, d, self.entries)
            if det != ring.one():
                raise NotInGroup(
                    'determinant of ' + self.formatText() + ' is '
                    + ring.formatElem(det)
                    )

    def __eq__(self, other):
        return isinstance(other, GroupElem) and self.entries == other.entries \
            and self.d == other.d and self.ring == other.ring

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return 'GroupElem(' + self.formatText() + ')'

    def _checkCompatible(self, other):
        if not isinstance(other, GroupElem) or self.d != other.d \
                or not (self.ring is other.ring or self.ring == other.ring):
            raise RingMismatch(
                repr(self) + ' and ' + repr(other)
                + ' live in different groups'
                )

    def __mul__(self, other):
        self._checkCompatible(other)
        return GroupElem(
            self.ring, self.d,
            _matMul(self.ring, self.d, self.entries, other.entries),
            check=GroupElem.DEBUG
            )

    def __pow__(self, n):
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        out = identity(self.ring, self.d)
        while n > 0:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        return GroupElem(
            self.ring, self.d, _adjugate(self.ring, self.d, self.entries),
            check=GroupElem.DEBUG
            )

    def det(self):
        return determinant(self.ring, self.d, self.entries)

    def conjugate(self, h):
        """Return h g h^-1."""
        return h * self * h.inverse()

    def encode(self):
        if self._encoding is None:
            self._encoding = b''.join(
                self.ring.encodeElem(e) for e in self.entries
                )
        return self._encoding

    def isIdentity(self):
        return self.entries == identity(self.ring, self.d).entries

    def entry(self, i, j):
        return self.entries[i*self.d + j]

    def rows(self):
        return [ list(self.entries[i*self.d:(i+1)*self.d])
            for i in range(self.d) ]

    def trace(self):
        acc = self.ring.zero()
        for i in range(self.d):
            acc = self.ring.add(acc, self.entry(i, i))
        return acc

    def formatText(self):
        """Entries as whitespace separated "c0,c1" tokens, row-major."""
        return ' '.join(self.ring.formatElem(e) for e in self.entries)


def identity(ring, d):
    return GroupElem(
        ring, d,
        [ ring.one() if i == j else ring.zero()
            for i in range(d) for j in range(d) ],
        check=False
        )

def _coerceEntry(ring, value):
    if isinstance(value, str):
        return ring.parseElem(value)
    if isinstance(value, (tuple, list)):
        return ring.parseElem(','.join(str(int(c)) for c in value))
    return ring.fromInt(value)

def makeGroupElem(ring, rows):
    """Create a GroupElem from rows of entries.

    Arguments:
    ring -- ring of the entries
    rows -- d rows of d entries; an entry is an int, a coefficient sequence
        or "c0,c1" text (list of lists)

    Returns:
    GroupElem, checked to have determinant 1
    """
    d = len(rows)
    entries = []
    for row in rows:
        if len(row) != d:
            raise RingMismatch('matrix rows ' + str(rows) + ' are not square')
        entries += [ _coerceEntry(ring, v) for v in row ]
    return GroupElem(ring, d, entries)

def groupMul(g, h):
    return g * h

def groupInv(g):
    return g.inverse()

def isSymmetric(S):
    """Whether the multiset S equals its multiset of inverses."""
    counts = collections.Counter(s.encode() for s in S)
    inverses = collections.Counter(s.inverse().encode() for s in S)
    return counts == inverses

def symmetrize(S):
    """Multiset S together with the inverse of each element."""
    S = list(S)
    return S + [ s.inverse() for s in S ]

def unipotentPair(ring, t=1):
    """The pair [[1,t],[0,1]], [[1,0],[t,1]] over ring."""
    return [
        makeGroupElem(ring, [[1, t], [0, 1]]),
        makeGroupElem(ring, [[1, 0], [t, 1]]),
        ]


### Group specs and enumeration ###

def slOrder(s, d):
    """Order of SL_d(F_s): s^(d(d-1)/2) prod_{i=2..d} (s^i - 1)."""
    out = s ** (d * (d-1) // 2)
    for i in range(2, d+1):
        out *= s**i - 1
    return out


class GroupSpec(object):
    """Class defines the group SL_d(R) for a finite ring R.

    Attributes:
    d -- dimension (int)
    ring -- the ring (ResidueRing or FieldFactor)
    factor_orders -- |SL_d(F_{p^k})| per CRT factor (list of int)
    order -- product of the factor orders (int), None over O_K
    """

    def __init__(self, d, ring):
        super(GroupSpec, self).__init__()
        self.d = d
        self.ring = ring
        if isinstance(ring, NumberField):
            self.factor_orders = []
            self.order = None
        else:
            self.factor_orders = [
                slOrder(f.cardinality, d) for f in ring.factors
                ]
            self.order = 1
            for o in self.factor_orders:
                self.order *= o

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and self.d == other.d \
            and self.ring == other.ring

    def __hash__(self):
        return hash((self.d, self.ring.key()))

    def __repr__(self):
        return 'GroupSpec(d=' + str(self.d) + ', ' + repr(self.ring) + ')'

    def identity(self):
        return identity(self.ring, self.d)


_FIELD_GROUPS = {}

def _fieldGroupEntries(factor, d):
    """Entry tuples of every element of SL_d(F) for a field factor F.

    The first d-1 columns range freely and the last column solves the
    cofactor equation sum_i x_i C_i = 1.
    """
    key = (factor.key(), d)
    if key in _FIELD_GROUPS:
        return _FIELD_GROUPS[key]

    one = factor.one()
    if d == 1:
        _FIELD_GROUPS[key] = [ (one,) ]
        return _FIELD_GROUPS[key]

    elems = list(factor.elements())
    out = []
    for head in itertools.product(elems, repeat=d*(d-1)):
        cofactors = []
        for i in range(d):
            minor = tuple(
                head[r*(d-1) + c] for r in range(d) if r != i
                for c in range(d-1)
                )
            cof = determinant(factor, d-1, minor)
            if (i + d - 1) % 2:
                cof = factor.neg(cof)
            cofactors.append(cof)
        pivots = [ i for i in range(d) if not factor.isZero(cofactors[i]) ]
        if not pivots:
            continue
        pivot = pivots[0]
        pivot_inv = factor.inv(cofactors[pivot])
        free_rows = [ i for i in range(d) if i != pivot ]
        for free in itertools.product(elems, repeat=d-1):
            acc = one
            for i, x in zip(free_rows, free):
                acc = factor.sub(acc, factor.mul(x, cofactors[i]))
            column = [None] * d
            for i, x in zip(free_rows, free):
                column[i] = x
            column[pivot] = factor.mul(acc, pivot_inv)
            entries = []
            for r in range(d):
                entries += head[r*(d-1):(r+1)*(d-1)]
                entries.append(column[r])
            out.append(tuple(entries))

    _FIELD_GROUPS[key] = out
    return out

def fieldGroup(factor, d, cap=ENUMERATION_CAP):
    """All elements of SL_d(F) for a CRT factor F, as GroupElem objects."""
    order = slOrder(factor.cardinality, d)
    if order > cap:
        raise TooLarge(
            '|SL_' + str(d) + '(F_' + str(factor.cardinality) + ')| = '
            + str(order) + ' exceeds cap ' + str(cap)
            )
    return [ GroupElem(factor, d, e, check=False)
        for e in _fieldGroupEntries(factor, d) ]

def enumerateGroup(spec, cap=ENUMERATION_CAP, verbose=False):
    """Enumerate every element of SL_d(R), sorted by canonical encoding.

    Factor groups are enumerated over their fields and combined entrywise
    by CRT.

    Arguments:
    spec -- the group (GroupSpec)

    Keyword arguments:
    cap -- largest group order enumerated (default ENUMERATION_CAP; int)
    verbose -- print progress (default False; Boolean)

    Returns:
    list of GroupElem of length spec.order
    """
    if spec.order is None or spec.order > cap:
        raise TooLarge(
            'cannot enumerate ' + repr(spec) + ' of order ' + str(spec.order)
            + ' (cap ' + str(cap) + ')'
            )
    if verbose:
        print('Enumerating ' + repr(spec) + '...')

    ring, d = spec.ring, spec.d
    per_factor = [ _fieldGroupEntries(f, d) for f in ring.factors ]
    if isinstance(ring, FieldFactor):
        out = [ GroupElem(ring, d, e, check=False) for e in per_factor[0] ]
    else:
        out = []
        for combo in itertools.product(*per_factor):
            entries = [
                ring.join([ part[n] for part in combo ]) for n in range(d*d)
                ]
            out.append(GroupElem(ring, d, entries, check=False))

    out.sort(key=lambda g: g.encode())
    if verbose:
        print('...' + str(len(out)) + ' elements.')
    return out


### Projections ###

def factorEntries(g):
    """Entries of g split per CRT factor: list over factors of entry tuples."""
    ring = g.ring
    if isinstance(ring, FieldFactor):
        return [ g.entries ]
    parts = [ ring.split(e) for e in g.entries ]
    return [ tuple(p[i] for p in parts) for i in range(len(ring.factors)) ]

def primeTarget(ring, primes):
    """Factor indices of every CRT factor lying over the given primes."""
    primes = set(int(p) for p in primes)
    return [ i for i, f in enumerate(ring.factors) if f.p in primes ]

def project(g, target=None, primes=None):
    """Image of g under the CRT projection onto a subset of factors.

    Arguments:
    g -- element to project (GroupElem)

    Keyword arguments:
    target -- factor indices to keep (default None; list of int)
    primes -- alternatively, keep every factor over these primes
        (default None; list of int)

    Returns:
    GroupElem over the smaller ring (a FieldFactor for a single factor)
    """
    ring = g.ring
    if isinstance(ring, NumberField):
        raise FactorMismatch('elements over O_K have no CRT factors')
    if target is None:
        if primes is None:
            raise FactorMismatch('project needs a target or primes')
        target = primeTarget(ring, primes)
    if isinstance(ring, FieldFactor):
        if list(target) != [0]:
            raise FactorMismatch(
                'target ' + str(list(target)) + ' is not a factor of '
                + repr(ring)
                )
        return g
    sub, indices = ring.factorRing(target)
    if sub is ring:
        return g
    if isinstance(sub, FieldFactor):
        return GroupElem(sub, g.d, factorEntries(g)[indices[0]], check=False)
    return GroupElem(
        sub, g.d, [ tuple(c % sub.q for c in e) for e in g.entries ],
        check=False
        )

def reduceGroupElem(g, ring):
    """Reduce an element of SL_d(O_K) (or of a larger residue ring) mod q."""
    source = g.ring
    field = source if isinstance(source, NumberField) \
        else getattr(source, 'field', None)
    if not isinstance(ring, ResidueRing) or field != ring.field:
        raise RingMismatch(repr(g) + ' cannot be reduced into ' + repr(ring))
    if isinstance(source, ResidueRing) and source.q % ring.q:
        raise RingMismatch(
            str(ring.q) + ' does not divide ' + str(g.ring.q)
            )
    return GroupElem(
        ring, g.d, [ tuple(c % ring.q for c in e) for e in g.entries ],
        check=False
        )

def factorwiseDistance(g, h):
    """Sum of log|G_i| over the CRT factors where g and h differ.

    Arguments:
    g, h -- elements of the same group (GroupElem)

    Returns:
    nonnegative float
    """
    g._checkCompatible(h)
    ring = g.ring
    if isinstance(ring, NumberField):
        raise RingMismatch('distance is defined over residue rings only')
    total = 0.0
    for f, a, b in zip(ring.factors, factorEntries(g), factorEntries(h)):
        if a != b:
            total += math.log(slOrder(f.cardinality, g.d))
    return total

def homomorphismDefect(phi, A):
    """Largest factorwise distance between phi(gh) and phi(g)phi(h) on A."""
    images = [ phi(g) for g in A ]
    worst = 0.0
    for g, pg in zip(A, images):
        for h, ph in zip(A, images):
            worst = max(worst, factorwiseDistance(phi(g * h), pg * ph))
    return worst

def centralizerIndex(g, cap=ENUMERATION_CAP):
    """Index [G : C(g)], the product of the factor centralizer indices."""
    ring = g.ring
    index = 1
    for i, (f, part) in enumerate(zip(ring.factors, factorEntries(g))):
        gi = GroupElem(f, g.d, part, check=False)
        elems = fieldGroup(f, g.d, cap)
        commuting = sum(1 for h in elems if gi * h == h * gi)
        index *= len(elems) // commuting
    return index

def structuralCheck(spec):
    """Multiplicity of each factor type (p, k) against the field degree.

    Returns:
    dictionary with the multiplicities, whether each is at most the field
    degree r and whether every factor group is quasi-simple (p^k > 3)
    """
    ring = spec.ring
    r = ring.degree if hasattr(ring, 'degree') else 1
    counts = collections.Counter((f.p, f.k) for f in ring.factors)
    return {
        'multiplicities': { str(key): n for key, n in sorted(counts.items()) },
        'max_multiplicity': max(counts.values()) if counts else 0,
        'ok': all(n <= r for n in counts.values()),
        'quasi_simple': all(f.cardinality > 3 for f in ring.factors)
            and spec.d >= 2,
        }


### Subgroups ###

class SubgroupDescriptor(object):
    """Class defines a subgroup of a finite SL_d, explicit or by predicate.

    Methods:
    contains -- membership test
    verifySubgroup -- exhaustive closure check of an explicit subgroup
    materialize -- explicit version of a predicate subgroup
    conjugate -- explicit conjugate x H x^-1
    descriptor, toJson -- JSON export
    """

    KINDS = (
        'Explicit', 'Center', 'SplitTorus', 'NonsplitTorus',
        'TorusNormalizerSplit', 'TorusNormalizerNonsplit', 'Borel',
        'Preimage'
        )

    def __init__(
            self, kind, spec, elements=None, index=None, generators=None,
            predicate=None):
        """Create a new SubgroupDescriptor.

        Arguments:
        kind -- one of KINDS (String)
        spec -- ambient group (GroupSpec)

        Keyword arguments:
        elements -- explicit members (default None; list of GroupElem)
        index -- index in the ambient group, derived from the size when
            omitted (default None; int)
        generators -- generating elements (default None; list of GroupElem)
        predicate -- membership function for non-explicit subgroups
            (default None; function GroupElem -> Boolean)
        """
        super(SubgroupDescriptor, self).__init__()
        if kind not in self.KINDS:
            raise ValueError('unknown subgroup kind ' + str(kind))
        self.kind = kind
        self.spec = spec
        self.generators = list(generators) if generators else []
        self.predicate = predicate
        if elements is not None:
            self.elements = sorted(elements, key=lambda g: g.encode())
            self.members = set(g.encode() for g in self.elements)
            self.size = len(self.elements)
        else:
            self.elements = None
            self.members = None
            self.size = None
        if index is None and self.size and spec.order:
            index = spec.order // self.size
        self.index = index
        self.is_full = index == 1

    def __repr__(self):
        return 'SubgroupDescriptor(' + self.kind + ', size=' + str(self.size) \
            + ', index=' + str(self.index) + ')'

    def contains(self, g):
        if self.members is not None:
            return g.encode() in self.members
        return bool(self.predicate(g))

    def verifySubgroup(self):
        """Exhaustively check closure under product and inverse."""
        if self.elements is None:
            raise TooLarge('only explicit subgroups can be verified')
        for g in self.elements:
            if g.inverse().encode() not in self.members:
                return False
            for h in self.elements:
                if (g * h).encode() not in self.members:
                    return False
        return True

    def materialize(self, elements):
        """Explicit descriptor of the members among the given elements."""
        return SubgroupDescriptor(
            self.kind, self.spec, [ g for g in elements if self.contains(g) ],
            generators=self.generators
            )

    def conjugate(self, x):
        xi = x.inverse()
        return SubgroupDescriptor(
            'Explicit', self.spec, [ x * h * xi for h in self.elements ]
            )

    def descriptor(self):
        return {
            'kind': self.kind,
            'index': self.index,
            'size': self.size,
            'generators': [ g.formatText() for g in self.generators ],
            }

    def toJson(self):
        return json.dumps(self.descriptor(), sort_keys=True)


def closure(S, cap=ENUMERATION_CAP, spec=None):
    """Subgroup generated by S, by breadth-first left multiplication.

    Arguments:
    S -- generators sharing ring and dimension (list of GroupElem)

    Keyword arguments:
    cap -- largest closure size allowed (default ENUMERATION_CAP; int)
    spec -- ambient group, built from the generators if omitted
        (default None; GroupSpec)

    Returns:
    Explicit SubgroupDescriptor; is_full tells whether it is the whole group
    """
    S = list(S)
    if not S:
        raise ValueError('closure needs at least one element')
    if spec is None:
        spec = GroupSpec(S[0].d, S[0].ring)
    elements, _ = _breadthFirst(S, cap)
    return SubgroupDescriptor('Explicit', spec, elements, generators=S)

def _breadthFirst(S, cap):
    """Elements reachable from the identity and their left neighbours.

    Returns:
    tuple (elements in discovery order, {encoding: [encoding of s*g for s
    in S]})
    """
    start = identity(S[0].ring, S[0].d)
    for s in S[1:]:
        S[0]._checkCompatible(s)
    seen = { start.encode(): start }
    edges = {}
    frontier = [start]
    while frontier:
        nxt = []
        for g in frontier:
            row = []
            for s in S:
                h = s * g
                key = h.encode()
                row.append(key)
                if key not in seen:
                    seen[key] = h
                    nxt.append(h)
                    if len(seen) > cap:
                        raise TooLarge(
                            'closure exceeds cap ' + str(cap) + ' elements'
                            )
            edges[g.encode()] = row
        frontier = nxt
    return list(seen.values()), edges

def preimage(H, spec, target):
    """Full preimage in spec of a subgroup H of the target factor group."""
    return SubgroupDescriptor(
        'Preimage', spec, index=H.index,
        predicate=lambda g: H.contains(project(g, target)),
        generators=H.generators
        )

def projectionProfile(H):
    """Per-factor surjectivity of an explicit subgroup.

    Arguments:
    H -- explicit subgroup of a product group (SubgroupDescriptor)

    Returns:
    pandas dataframe with one row per CRT factor and columns factor, p, k,
    order, image_size, surjective, image_index
    """
    if H.elements is None:
        raise TooLarge('projection profile needs an explicit subgroup')
    ring, d = H.spec.ring, H.spec.d
    images = [ set() for f in ring.factors ]
    for h in H.elements:
        for i, part in enumerate(factorEntries(h)):
            images[i].add(part)
    rows = []
    for i, f in enumerate(ring.factors):
        order = slOrder(f.cardinality, d)
        rows.append({
            'factor': i, 'p': f.p, 'k': f.k, 'order': order,
            'image_size': len(images[i]),
            'surjective': len(images[i]) == order,
            'image_index': order // len(images[i]),
            })
    return pd.DataFrame(rows)


### Subgroup atlas of SL_2(F_p) ###

def _primeField(field):
    if isinstance(field, FieldFactor):
        if field.k != 1:
            raise AtlasUnavailable(
                'no subgroup atlas over the extension ' + repr(field)
                )
        return field
    return FieldFactor(int(field), (0, 1))

def smallestNonResidue(p):
    for n in range(2, p):
        if pow(n, (p-1) // 2, p) == p - 1:
            return n
    raise AtlasUnavailable('no quadratic non-residue mod ' + str(p))

def subgroupAtlas(field, cap=ENUMERATION_CAP):
    """Explicit center, tori, torus normalizers and Borel of SL_2(F_p).

    The nonsplit torus is the norm-one group of F_p(w), w^2 = n the smallest
    non-residue, acting on the basis {1, w}: [[a, bn], [b, a]] with
    a^2 - n b^2 = 1.

    Arguments:
    field -- odd prime p or a degree one FieldFactor (int or FieldFactor)

    Keyword arguments:
    cap -- largest group order allowed (default ENUMERATION_CAP; int)

    Returns:
    list of SubgroupDescriptor in the order Center, SplitTorus,
    NonsplitTorus, TorusNormalizerSplit, TorusNormalizerNonsplit, Borel
    """
    F = _primeField(field)
    p = F.p
    if p == 2:
        raise AtlasUnavailable('the atlas covers odd primes only')
    spec = GroupSpec(2, F)
    if spec.order > cap:
        raise TooLarge(
            '|SL_2(F_' + str(p) + ')| = ' + str(spec.order) + ' exceeds cap '
            + str(cap)
            )

    def mat(a, b, c, d):
        return GroupElem(
            F, 2, [ (a % p,), (b % p,), (c % p,), (d % p,) ], check=False
            )

    units = range(1, p)
    inv = { a: pow(a, p-2, p) for a in units }
    n = smallestNonResidue(p)

    center = [ mat(1, 0, 0, 1), mat(-1, 0, 0, -1) ]
    split = [ mat(a, 0, 0, inv[a]) for a in units ]
    nonsplit = [ mat(a, b*n, b, a) for a in range(p) for b in range(p)
        if (a*a - n*b*b) % p == 1 ]
    split_norm = split + [ mat(0, a, -inv[a], 0) for a in units ]
    alpha, gamma = next(
        (a, c) for a in range(p) for c in range(p) if (n*c*c - a*a) % p == 1
        )
    w = mat(alpha, -n*gamma, gamma, -alpha)
    nonsplit_norm = nonsplit + [ w * t for t in nonsplit ]
    borel = [ mat(a, b, 0, inv[a]) for a in units for b in range(p) ]

    return [
        SubgroupDescriptor('Center', spec, center),
        SubgroupDescriptor('SplitTorus', spec, split),
        SubgroupDescriptor('NonsplitTorus', spec, nonsplit),
        SubgroupDescriptor('TorusNormalizerSplit', spec, split_norm),
        SubgroupDescriptor('TorusNormalizerNonsplit', spec, nonsplit_norm),
        SubgroupDescriptor('Borel', spec, borel),
        ]

def atlasIndexAudit(field, cap=ENUMERATION_CAP):
    """Index of each atlas subgroup against the bound p+1.

    Returns:
    pandas dataframe with columns kind, size, index, bound, subgroup, ok
    """
    F = _primeField(field)
    rows = []
    for H in subgroupAtlas(F, cap):
        rows.append({
            'kind': H.kind, 'size': H.size, 'index': H.index,
            'bound': F.p + 1, 'subgroup': H.verifySubgroup(),
            'ok': H.index >= F.p + 1,
            })
    return pd.DataFrame(rows)

def torusClassIntersections(field, cap=ENUMERATION_CAP):
    """Audit intersections of all conjugates of the split and nonsplit tori.

    For every pair of distinct members I = H1 n H2 must satisfy
    |I| / |I n Z| <= 2 with Z the center.

    Returns:
    dictionary with keys p, members, pairs, max_ratio, ok
    """
    F = _primeField(field)
    atlas = { H.kind: H for H in subgroupAtlas(F, cap) }
    G = enumerateGroup(atlas['Center'].spec, cap)
    center = atlas['Center'].members
    members = set()
    for kind in ('SplitTorus', 'NonsplitTorus'):
        T = atlas[kind].elements
        for x in G:
            xi = x.inverse()
            members.add(frozenset((x * t * xi).encode() for t in T))
    members = sorted(members, key=lambda m: sorted(m))
    max_ratio = 0.0
    pairs = 0
    for H1, H2 in itertools.combinations(members, 2):
        inter = H1 & H2
        pairs += 1
        ratio = len(inter) / len(inter & center)
        max_ratio = max(max_ratio, ratio)
    return {
        'p': F.p, 'members': len(members), 'pairs': pairs,
        'max_ratio': max_ratio, 'ok': max_ratio <= 2,
        }


### Generator files ###

def formatGenerators(S):
    """Generator file text: a "p1,...;q;f" header, then one matrix per line."""
    S = list(S)
    ring = S[0].ring
    if isinstance(ring, NumberField):
        header = ';0;' + ','.join(str(c) for c in ring.f_coeffs)
    elif isinstance(ring, FieldFactor):
        raise RingMismatch('generator files hold matrices over O_K/(q)')
    else:
        header = ','.join(str(p) for p in ring.primes) + ';' + str(ring.q) \
            + ';' + ','.join(str(c) for c in ring.field.f_coeffs)
    return header + '\n' + '\n'.join(s.formatText() for s in S) + '\n'

def parseGenerators(text):
    """Parse generator file text.

    Returns:
    tuple (ring, d, list of GroupElem)
    """
    lines = [ l.strip() for l in text.splitlines() if l.strip() ]
    if not lines:
        raise ValueError('empty generator file')
    primes, q, f = lines[0].split(';')
    field = NumberField([ int(c) for c in f.split(',') ])
    if int(q) == 0:
        ring = field
    else:
        ring = ResidueRing(field, int(q))
        listed = sorted(int(p) for p in primes.split(',') if p.strip())
        if listed and listed != ring.primes:
            raise FactorMismatch(
                'header primes ' + str(listed) + ' do not factor ' + str(q)
                )
    S = []
    d = None
    for line in lines[1:]:
        tokens = line.split()
        size = int(round(math.sqrt(len(tokens))))
        if size * size != len(tokens) or (d is not None and size != d):
            raise RingMismatch('bad matrix line: ' + line)
        d = size
        S.append(GroupElem(ring, d, [ ring.parseElem(t) for t in tokens ]))
    return ring, d, S

def loadGenerators(path):
    with open(path, 'r') as handle:
        return parseGenerators(handle.read())

def saveGenerators(S, path):
    print('Saving file...')
    with open(path, 'w') as handle:
        handle.write(formatGenerators(S))
    print('...file saved.')


### Cayley tables ###

class GroupTable(object):
    """Class defines an enumerated group with an index and multiplication tables.

    Elements are sorted by canonical encoding; index i refers to
    elements[i]. Left multiplication tables map i to the index of s*g_i.

    Methods:
    indexOf -- index of an element
    leftTable -- numpy array i -> index(s * g_i)
    neighborTable -- |G| x |S| array of left neighbours
    cosetLabels -- label of the left coset g_i H of each element
    """

    def __init__(self, elements, spec=None, edges=None, edge_gens=None):
        """Create a new GroupTable.

        Arguments:
        elements -- every element of the group (list of GroupElem)

        Keyword arguments:
        spec -- ambient group (default None; GroupSpec)
        edges -- precomputed left neighbours keyed by encoding
            (default None; dict)
        edge_gens -- generators the edges were computed for
            (default None; list of GroupElem)
        """
        super(GroupTable, self).__init__()
        self.elements = sorted(elements, key=lambda g: g.encode())
        self.index = { g.encode(): i for i, g in enumerate(self.elements) }
        self.size = len(self.elements)
        self.ring = self.elements[0].ring
        self.d = self.elements[0].d
        self.spec = spec if spec is not None else GroupSpec(self.d, self.ring)
        self.identity_index = self.index[identity(self.ring, self.d).encode()]
        self._tables = {}
        if edges is not None:
            for j, s in enumerate(edge_gens):
                self._tables[s.encode()] = np.array(
                    [ self.index[edges[g.encode()][j]] for g in self.elements ],
                    dtype=np.int64
                    )

    @classmethod
    def fromSpec(cls, spec, cap=ENUMERATION_CAP, verbose=False):
        return cls(enumerateGroup(spec, cap, verbose), spec)

    @classmethod
    def fromGenerators(cls, S, cap=ENUMERATION_CAP, verbose=False):
        """Table of the subgroup generated by S, with S's tables filled in."""
        S = list(S)
        if verbose:
            print('Building Cayley table over ' + repr(S[0].ring) + '...')
        elements, edges = _breadthFirst(S, cap)
        table = cls(elements, edges=edges, edge_gens=S)
        if verbose:
            print('...' + str(table.size) + ' elements.')
        return table

    def indexOf(self, g):
        try:
            return self.index[g.encode()]
        except KeyError:
            raise NotInGroup(repr(g) + ' is not in this table')

    def leftTable(self, s, cache=True):
        key = s.encode()
        if key in self._tables:
            return self._tables[key]
        out = np.array(
            [ self.index[(s * g).encode()] for g in self.elements ],
            dtype=np.int64
            )
        if cache:
            self._tables[key] = out
        return out

    def rightTable(self, s):
        """numpy array i -> index(g_i * s), not cached."""
        return np.array(
            [ self.index[(g * s).encode()] for g in self.elements ],
            dtype=np.int64
            )

    def inverseTable(self):
        if 'inverse' not in self._tables:
            self._tables['inverse'] = np.array(
                [ self.index[g.inverse().encode()] for g in self.elements ],
                dtype=np.int64
                )
        return self._tables['inverse']

    def neighborTable(self, S):
        return np.stack([ self.leftTable(s) for s in S ], axis=1)

    def isFull(self):
        return self.spec.order == self.size

    def cosetLabels(self, H):
        """Label every element by its left coset gH (labels 0, 1, ...)."""
        labels = np.full(self.size, -1, dtype=np.int64)
        members = H.elements if H.elements is not None else [
            g for g in self.elements if H.contains(g)
            ]
        count = 0
        for i, g in enumerate(self.elements):
            if labels[i] < 0:
                for h in members:
                    labels[self.index[(g * h).encode()]] = count
                count += 1
        return labels
