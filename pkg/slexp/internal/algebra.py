"""Contains number fields, residue rings O_K/(q) and their finite field factors.

Elements are plain tuples of integers: a NumberField element (an element of
O_K = Z[theta]) and a ResidueRing element are coefficient vectors of length r
in the basis 1, theta, ..., theta^(r-1), lowest degree first; a FieldFactor
element is a coefficient vector of length k modulo (p, g). All three ring
classes share the same method names so matrices can be built over any of
them.
"""

import itertools
import json

from sympy import Poly, Symbol, factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor_sqf, gf_from_int_poly, \
    gf_gcdex, gf_mul, gf_quo, gf_rem

from slexp.internal.errors import NotMonic, Reducible, ZeroDiscriminant, \
    NotSquareFree, RamifiedPrime, CompositePrimeDetected, NotAUnit, \
    FactorMismatch, FactorizationUnsupported

X = Symbol('x')


def _reduceMonic(prod, low, r):
    """Reduce a coefficient list modulo a monic polynomial, in place.

    Arguments:
    prod -- coefficients lowest degree first, length <= 2r-1 (list of int)
    low -- defining polynomial lowest degree first, length r+1 (tuple of int)
    r -- degree of the defining polynomial (int)

    Returns:
    list of the r lowest coefficients after reduction (unreduced mod any q)
    """
    for i in range(len(prod) - 1, r - 1, -1):
        c = prod[i]
        if c:
            base = i - r
            for j in range(r):
                prod[base + j] -= c * low[j]
    return prod[:r]

def _convolve(x, y):
    """Coefficient list of the polynomial product of two coefficient tuples."""
    prod = [0] * (len(x) + len(y) - 1)
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                prod[i + j] += a * b
    return prod

def _lowToHigh(coeffs, length):
    """Convert a galoistools list (highest first) to a padded tuple."""
    out = [int(c) for c in reversed(coeffs)]
    out += [0] * (length - len(out))
    return tuple(out[:length])


class NumberField(object):
    """Class defines a monogenic number field K = Q[x]/(f) and its order Z[x]/(f).

    Elements of the order are coefficient tuples with integer entries; the
    class implements exact arithmetic on them so matrices over O_K can be
    multiplied without loss.

    Methods:
    zero, one, fromInt -- constant elements
    add, sub, neg, mul, pow -- exact arithmetic in Z[theta]
    isZero -- whether an element is zero
    reduce -- reduce an element into a ResidueRing
    encodeElem -- canonical bytes of an element
    formatElem, parseElem -- "c0,c1,..." text form
    """

    def __init__(self, f_coeffs):
        """Create a new NumberField.

        Arguments:
        f_coeffs -- coefficients of f, highest degree first, leading 1
            (sequence of int)
        """
        super(NumberField, self).__init__()
        coeffs = [int(c) for c in f_coeffs]
        if len(coeffs) < 2:
            raise NotMonic('f must have degree >= 1, got ' + str(coeffs))
        if coeffs[0] != 1:
            raise NotMonic(
                'leading coefficient of f must be 1, got ' + str(coeffs)
                )

        self.f_coeffs = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.low = tuple(reversed(coeffs))
            # f lowest degree first, used for reduction

        poly = Poly(coeffs, X, domain='ZZ')
        if self.degree > 1 and not poly.is_irreducible:
            raise Reducible(str(poly.as_expr()) + ' factors over Z')

        if self.degree == 1:
            self.discriminant = 1
        else:
            self.discriminant = int(poly.discriminant())
        if self.discriminant == 0:
            raise ZeroDiscriminant(str(poly.as_expr()))

        self.cardinality = None
        self.factors = []

    def __eq__(self, other):
        return isinstance(other, NumberField) \
            and self.f_coeffs == other.f_coeffs

    def __hash__(self):
        return hash(('K', self.f_coeffs))

    def __repr__(self):
        return 'NumberField(' + str(list(self.f_coeffs)) + ')'

    def key(self):
        """Return a hashable descriptor of this ring."""
        return ('K', self.f_coeffs)

    def zero(self):
        return (0,) * self.degree

    def one(self):
        return (1,) + (0,) * (self.degree - 1)

    def fromInt(self, n):
        return (int(n),) + (0,) * (self.degree - 1)

    def isZero(self, x):
        return not any(x)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def mul(self, x, y):
        if self.degree == 1:
            return (x[0] * y[0],)
        return tuple(_reduceMonic(_convolve(x, y), self.low, self.degree))

    def pow(self, x, n):
        out = self.one()
        base = x
        while n > 0:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def reduce(self, x, ring):
        """Reduce an element of O_K into the ResidueRing ring (same field)."""
        return tuple(c % ring.q for c in x)

    def encodeElem(self, x):
        """Canonical bytes: per coefficient a length byte and signed bytes."""
        out = b''
        for c in x:
            n = max(1, (c.bit_length() + 8) // 8)
            out += bytes([n]) + c.to_bytes(n, 'little', signed=True)
        return out

    def formatElem(self, x):
        return ','.join(str(c) for c in x)

    def parseElem(self, text):
        return _parseCoefficients(text, self.degree, None)


def _parseCoefficients(text, length, modulus):
    """Parse "c0,c1,..." into a padded coefficient tuple."""
    parts = [int(c) for c in str(text).strip().split(',') if c.strip() != '']
    if len(parts) > length:
        raise FactorMismatch(
            'element ' + str(text) + ' has more than ' + str(length)
            + ' coefficients'
            )
    parts += [0] * (length - len(parts))
    if modulus is not None:
        parts = [c % modulus for c in parts]
    return tuple(parts)


class FieldFactor(object):
    """Class defines a CRT factor F_{p^k} = F_p[x]/(g) of a residue ring.

    Elements are coefficient tuples of length k with entries in [0, p).

    Methods:
    zero, one, fromInt -- constant elements
    add, sub, neg, mul, inv, pow -- field arithmetic mod (p, g)
    frobenius -- x -> x^(p^t)
    inSubfield -- whether x lies in the subfield of degree kp
    elements -- iterator over every field element
    encodeElem, formatElem -- canonical bytes / text of an element
    """

    def __init__(self, p, g, index=0):
        """Create a new FieldFactor.

        Arguments:
        p -- prime characteristic (int)
        g -- monic irreducible factor of f mod p, lowest degree first,
            length k+1 (sequence of int)

        Keyword arguments:
        index -- position of this factor in its parent ring (default 0; int)
        """
        super(FieldFactor, self).__init__()
        self.p = int(p)
        self.g = tuple(int(c) % self.p for c in g)
        self.k = len(self.g) - 1
        self.index = index
        self.cardinality = self.p ** self.k
        self.factors = [self]
        self.width = max(1, ((self.p - 1).bit_length() + 7) // 8)

    def __eq__(self, other):
        return isinstance(other, FieldFactor) and self.p == other.p \
            and self.g == other.g

    def __hash__(self):
        return hash(('F', self.p, self.g))

    def __repr__(self):
        return 'FieldFactor(p=' + str(self.p) + ', g=' + str(list(self.g)) \
            + ')'

    def key(self):
        return ('F', self.p, self.g)

    def highCoeffs(self):
        """Coefficients of g highest degree first (list of int)."""
        return list(reversed(self.g))

    def zero(self):
        return (0,) * self.k

    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def fromInt(self, n):
        return (int(n) % self.p,) + (0,) * (self.k - 1)

    def isZero(self, x):
        return not any(x)

    def add(self, x, y):
        p = self.p
        if self.k == 1:
            return ((x[0] + y[0]) % p,)
        return tuple((a + b) % p for a, b in zip(x, y))

    def sub(self, x, y):
        p = self.p
        if self.k == 1:
            return ((x[0] - y[0]) % p,)
        return tuple((a - b) % p for a, b in zip(x, y))

    def neg(self, x):
        return tuple((-a) % self.p for a in x)

    def mul(self, x, y):
        p = self.p
        if self.k == 1:
            return ((x[0] * y[0]) % p,)
        prod = _reduceMonic(_convolve(x, y), self.g, self.k)
        return tuple(c % p for c in prod)

    def pow(self, x, n):
        if self.k == 1:
            return (pow(x[0], n, self.p),)
        out = self.one()
        base = x
        while n > 0:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def inv(self, x):
        if self.isZero(x):
            raise NotAUnit('zero has no inverse in ' + repr(self))
        if self.k == 1:
            return (pow(x[0], self.p - 2, self.p),)
        return self.pow(x, self.cardinality - 2)

    def frobenius(self, x, times=1):
        return self.pow(x, self.p ** times)

    def inSubfield(self, x, kp):
        """Whether x lies in the subfield F_{p^kp} (kp divides k)."""
        return self.pow(x, self.p ** kp) == tuple(x)

    def subfieldDegrees(self):
        """Degrees of the proper subfields of this field (list of int)."""
        return [j for j in range(1, self.k) if self.k % j == 0]

    def elements(self):
        for c in itertools.product(range(self.p), repeat=self.k):
            yield tuple(reversed(c))

    def units(self):
        for x in self.elements():
            if any(x):
                yield x

    def encodeElem(self, x):
        return b''.join(c.to_bytes(self.width, 'little') for c in x)

    def formatElem(self, x):
        return ','.join(str(c) for c in x)

    def parseElem(self, text):
        return _parseCoefficients(text, self.k, self.p)


class FqElem(object):
    """Class defines an element of one CRT factor of a residue ring."""

    def __init__(self, factor, coeffs):
        """Create a new FqElem.

        Arguments:
        factor -- the field this element lives in (FieldFactor)
        coeffs -- coefficients mod (p, g), lowest degree first (tuple of int)
        """
        super(FqElem, self).__init__()
        self.factor = factor
        self.coeffs = tuple(int(c) % factor.p for c in coeffs)

    @property
    def index(self):
        return self.factor.index

    def __eq__(self, other):
        return isinstance(other, FqElem) and self.factor == other.factor \
            and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.factor.key(), self.coeffs))

    def __repr__(self):
        return 'FqElem(' + self.factor.formatElem(self.coeffs) + ' in F_' \
            + str(self.factor.p) + '^' + str(self.factor.k) + ')'

    def __add__(self, other):
        return FqElem(self.factor, self.factor.add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return FqElem(self.factor, self.factor.sub(self.coeffs, other.coeffs))

    def __mul__(self, other):
        return FqElem(self.factor, self.factor.mul(self.coeffs, other.coeffs))

    def inverse(self):
        return FqElem(self.factor, self.factor.inv(self.coeffs))


class ResidueRing(object):
    """Class defines the residue ring O_K/(q) for a square-free unramified q.

    Construction factors q and factors f modulo every prime of q; the
    resulting CRT factors are stored in ascending prime, then ascending
    degree order.

    Methods:
    zero, one, fromInt -- constant elements
    add, sub, neg, mul, inv, pow -- arithmetic mod (q, f)
    split, join -- CRT decomposition into field factors (raw tuples)
    isUnit -- whether every CRT component is nonzero
    factorRing -- ring obtained by keeping a subset of CRT factors
    subRing -- ResidueRing for a divisor of q
    elements -- iterator over every ring element
    descriptor, toJson -- ring descriptor export
    """

    MAX_FACTOR_DEGREE = 4

    def __init__(self, field, q, max_factor_degree=None):
        """Create a new ResidueRing.

        Arguments:
        field -- the number field K (NumberField)
        q -- square-free modulus coprime to disc(f) (int >= 2)

        Keyword arguments:
        max_factor_degree -- largest degree of f factored mod p; larger
            degrees raise FactorizationUnsupported (default
            MAX_FACTOR_DEGREE; int)
        """
        super(ResidueRing, self).__init__()
        q = int(q)
        if q < 2:
            raise NotSquareFree('modulus must be >= 2, got ' + str(q))
        if max_factor_degree is None:
            max_factor_degree = self.MAX_FACTOR_DEGREE
        if field.degree > max_factor_degree:
            raise FactorizationUnsupported(
                'factoring a degree ' + str(field.degree)
                + ' polynomial mod p is not supported (max '
                + str(max_factor_degree) + ')'
                )

        self.field = field
        self.q = q
        self.degree = field.degree
        self.cardinality = q ** field.degree
        self.norm = self.cardinality
        self.width = max(1, ((q - 1).bit_length() + 7) // 8)

        factorization = factorint(q)
        for p, e in factorization.items():
            if e > 1:
                raise NotSquareFree(
                    str(q) + ' is divisible by ' + str(p) + '^' + str(e)
                    )
            if not isprime(p):
                raise CompositePrimeDetected(
                    'factor ' + str(p) + ' of ' + str(q) + ' is not prime'
                    )
        self.primes = sorted(int(p) for p in factorization)
        if self.primes and int(_product(self.primes)) != q:
            raise CompositePrimeDetected(
                'product of primes ' + str(self.primes) + ' != ' + str(q)
                )
        for p in self.primes:
            if field.discriminant % p == 0:
                raise RamifiedPrime(
                    str(p) + ' divides disc(f) = ' + str(field.discriminant)
                    )

        self.factors = []
        self._split_maps = []
            # per factor: residues of theta^j mod (p, g) for j < r
        self._lifts = []
            # per factor: ring elements lifting x^i of the factor
        for p in self.primes:
            self._addPrimeFactors(p)

        self._sub_rings = {}

    def _addPrimeFactors(self, p):
        """Factor f mod p and precompute split and lift maps for its factors."""
        r = self.degree
        fp = gf_from_int_poly(list(self.field.f_coeffs), p)
        lc, raw = gf_factor_sqf(fp, p, ZZ)
        gs = [[int(c) for c in g] for g in raw]

        check = [1]
        for g in gs:
            check = gf_mul(check, g, p, ZZ)
        if [int(c) for c in check] != [int(c) for c in fp]:
            raise FactorMismatch(
                'factors of f mod ' + str(p) + ' do not multiply to f'
                )

        def sortKey(g):
            low = list(reversed(g))[:-1]
            return (len(g) - 1, [(-c) % p for c in low])

        gs = sorted(gs, key=sortKey)

        others = self.q // p
        crt_coeff = (others * pow(others % p, -1, p)) % self.q if others > 1 \
            else 1

        for g in gs:
            k = len(g) - 1
            factor = FieldFactor(p, list(reversed(g)), len(self.factors))
            self.factors.append(factor)

            split_map = []
            for j in range(r):
                x_j = [1] + [0] * j
                split_map.append(_lowToHigh(gf_rem(x_j, g, p, ZZ), k))
            self._split_maps.append(split_map)

            h = gf_quo(fp, g, p, ZZ)
            s, t, gcd = gf_gcdex(h, g, p, ZZ)
            idem = gf_rem(gf_mul(s, h, p, ZZ), fp, p, ZZ)
            lifts = []
            for i in range(k):
                e_i = gf_rem(gf_mul(idem, [1] + [0] * i, p, ZZ), fp, p, ZZ)
                vec = _lowToHigh(e_i, r)
                lifts.append(tuple((c * crt_coeff) % self.q for c in vec))
            self._lifts.append(lifts)

    def __eq__(self, other):
        return isinstance(other, ResidueRing) and self.q == other.q \
            and self.field == other.field

    def __hash__(self):
        return hash(('R', self.field.f_coeffs, self.q))

    def __repr__(self):
        return 'ResidueRing(f=' + str(list(self.field.f_coeffs)) + ', q=' \
            + str(self.q) + ')'

    def key(self):
        return ('R', self.field.f_coeffs, self.q)

    ### Arithmetic ###

    def zero(self):
        return (0,) * self.degree

    def one(self):
        return (1,) + (0,) * (self.degree - 1)

    def fromInt(self, n):
        return (int(n) % self.q,) + (0,) * (self.degree - 1)

    def isZero(self, x):
        return not any(x)

    def add(self, x, y):
        q = self.q
        if self.degree == 1:
            return ((x[0] + y[0]) % q,)
        return tuple((a + b) % q for a, b in zip(x, y))

    def sub(self, x, y):
        q = self.q
        if self.degree == 1:
            return ((x[0] - y[0]) % q,)
        return tuple((a - b) % q for a, b in zip(x, y))

    def neg(self, x):
        return tuple((-a) % self.q for a in x)

    def mul(self, x, y):
        q = self.q
        if self.degree == 1:
            return ((x[0] * y[0]) % q,)
        prod = _reduceMonic(_convolve(x, y), self.field.low, self.degree)
        return tuple(c % q for c in prod)

    def pow(self, x, n):
        out = self.one()
        base = x
        while n > 0:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def isUnit(self, x):
        return all(any(part) for part in self.split(x))

    def inv(self, x):
        parts = self.split(x)
        inverses = []
        for factor, part in zip(self.factors, parts):
            if not any(part):
                raise NotAUnit(
                    self.formatElem(x) + ' vanishes mod ' + repr(factor)
                    )
            inverses.append(factor.inv(part))
        return self.join(inverses)

    ### CRT ###

    def split(self, x):
        """CRT components of x as raw coefficient tuples, one per factor."""
        parts = []
        for factor, split_map in zip(self.factors, self._split_maps):
            p = factor.p
            acc = [0] * factor.k
            for c, image in zip(x, split_map):
                if c:
                    for i, v in enumerate(image):
                        acc[i] += c * v
            parts.append(tuple(a % p for a in acc))
        return parts

    def join(self, parts):
        """Inverse of split: ring element with the given CRT components."""
        if len(parts) != len(self.factors):
            raise FactorMismatch(
                'expected ' + str(len(self.factors)) + ' CRT parts, got '
                + str(len(parts))
                )
        q = self.q
        acc = [0] * self.degree
        for part, lifts in zip(parts, self._lifts):
            for c, lift in zip(part, lifts):
                if c:
                    for j, v in enumerate(lift):
                        acc[j] += c * v
        return tuple(a % q for a in acc)

    ### Sub-rings and projections ###

    def subRing(self, primes):
        """ResidueRing over the same field for the product of the given primes.

        Arguments:
        primes -- primes dividing q (iterable of int)

        Returns:
        ResidueRing with modulus prod(primes)
        """
        primes = tuple(sorted(set(int(p) for p in primes)))
        if not primes or any(p not in self.primes for p in primes):
            raise FactorMismatch(
                str(list(primes)) + ' is not a nonempty set of primes of '
                + str(self.q)
                )
        if primes not in self._sub_rings:
            self._sub_rings[primes] = ResidueRing(
                self.field, int(_product(primes))
                )
        return self._sub_rings[primes]

    def factorRing(self, target):
        """Ring reached by keeping the CRT factors listed in target.

        Arguments:
        target -- factor indices to keep (iterable of int)

        Returns:
        tuple (ring, indices) where ring is this ring, a sub-ring over whole
        primes, or a single FieldFactor, and indices are the kept factor
        indices in order
        """
        indices = sorted(set(int(i) for i in target))
        if not indices or indices[0] < 0 or indices[-1] >= len(self.factors):
            raise FactorMismatch(
                'target ' + str(list(target)) + ' is not a nonempty subset of '
                + str(len(self.factors)) + ' factors'
                )
        if len(indices) == len(self.factors):
            return self, indices
        if len(indices) == 1:
            return self.factors[indices[0]], indices

        kept_primes = set(self.factors[i].p for i in indices)
        whole = [i for i, f in enumerate(self.factors) if f.p in kept_primes]
        if whole != indices:
            raise FactorMismatch(
                'target ' + str(indices) + ' splits a prime of ' + str(self.q)
                )
        return self.subRing(kept_primes), indices

    def projectElem(self, x, target):
        """Image of x in factorRing(target)."""
        ring, indices = self.factorRing(target)
        if ring is self:
            return tuple(x)
        if isinstance(ring, FieldFactor):
            return self.split(x)[indices[0]]
        return tuple(c % ring.q for c in x)

    ### Enumeration and text forms ###

    def elements(self):
        for c in itertools.product(range(self.q), repeat=self.degree):
            yield tuple(reversed(c))

    def encodeElem(self, x):
        return b''.join(c.to_bytes(self.width, 'little') for c in x)

    def formatElem(self, x):
        return ','.join(str(c) for c in x)

    def parseElem(self, text):
        return _parseCoefficients(text, self.degree, self.q)

    def descriptor(self):
        """Ring descriptor {"f": [...], "q": n, "factors": [[p, [g]], ...]}."""
        return {
            'f': list(self.field.f_coeffs),
            'q': self.q,
            'factors': [ [f.p, f.highCoeffs()] for f in self.factors ],
            }

    def toJson(self):
        return json.dumps(self.descriptor(), sort_keys=True)


def _product(values):
    out = 1
    for v in values:
        out *= v
    return out


### Spec-level operations ###

def makeNumberField(f_coeffs):
    """Create a NumberField from the coefficients of a monic polynomial.

    Arguments:
    f_coeffs -- coefficients, highest degree first (sequence of int)

    Returns:
    NumberField with computed degree and discriminant
    """
    return NumberField(f_coeffs)

def makeResidueRing(field, q):
    """Create the residue ring O_K/(q).

    Arguments:
    field -- the number field (NumberField)
    q -- square-free modulus coprime to the discriminant (int)

    Returns:
    ResidueRing with its CRT factors
    """
    return ResidueRing(field, q)

def ringFromJson(text):
    """Rebuild a ResidueRing from its descriptor JSON and check the factors."""
    desc = json.loads(text)
    ring = ResidueRing(NumberField(desc['f']), desc['q'])
    if 'factors' in desc:
        stored = [ [int(p), [int(c) for c in g]] for p, g in desc['factors'] ]
        if stored != ring.descriptor()['factors']:
            raise FactorMismatch(
                'stored factors ' + str(stored) + ' disagree with computed '
                + str(ring.descriptor()['factors'])
                )
    return ring

def ringArith(ring, op, x, y=None):
    """Apply one ring operation.

    Arguments:
    ring -- ring both operands live in (ResidueRing or FieldFactor)
    op -- 'add', 'sub', 'mul' or 'inv' (String)
    x -- first operand (tuple of int)

    Keyword arguments:
    y -- second operand, absent for 'inv' (default None; tuple of int)

    Returns:
    result element (tuple of int)
    """
    if op == 'inv':
        return ring.inv(x)
    if y is None:
        raise ValueError('operation ' + str(op) + ' needs two operands')
    if op == 'add':
        return ring.add(x, y)
    elif op == 'sub':
        return ring.sub(x, y)
    elif op == 'mul':
        return ring.mul(x, y)
    raise ValueError('unknown ring operation ' + str(op))

def crtSplit(ring, x):
    """CRT components of a ring element as FqElem objects, one per factor."""
    return [ FqElem(factor, part)
        for factor, part in zip(ring.factors, ring.split(x)) ]

def crtJoin(ring, parts):
    """Ring element from FqElem parts covering every factor exactly once.

    Arguments:
    ring -- target ring (ResidueRing)
    parts -- one part per CRT factor, any order (list of FqElem)

    Returns:
    ring element (tuple of int)
    """
    by_index = {}
    for part in parts:
        i = part.index
        if i in by_index or i >= len(ring.factors) \
                or ring.factors[i] != part.factor:
            raise FactorMismatch(
                'part ' + repr(part) + ' does not match a free factor of '
                + repr(ring)
                )
        by_index[i] = part.coeffs
    if len(by_index) != len(ring.factors):
        raise FactorMismatch(
            'parts cover ' + str(sorted(by_index)) + ' of '
            + str(len(ring.factors)) + ' factors'
            )
    return ring.join([ by_index[i] for i in range(len(ring.factors)) ])
