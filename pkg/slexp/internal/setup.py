"""Contains class Setup."""

import json

import numpy as np # seed sequences

from slexp.internal.algebra import makeNumberField, makeResidueRing
from slexp.internal.groups import GroupElem, ENUMERATION_CAP, symmetrize, \
    loadGenerators
from slexp.internal.spectral import DENSE_CAP, CHEEGER_CAP, POWER_MAX_ITER, \
    POWER_TOL
from slexp.internal.walks import CONVOLUTION_BUDGET, FLATTENING_EPSILON
from slexp.internal.growth import PRODUCT_CAP, R_MAX, LARGE_FACTOR_CUTOFF
from slexp.internal.archimedean import M_MAX, L_CHECK


class Setup(object):
    """Class defines a run configuration shared by every experiment.

    A Setup is fully serializable: toDict() and fromDict() round-trip every
    field, so a stored configuration and a seed reproduce a run.

    Attributes:
    f_coeffs -- coefficients of f, highest degree first (list of int)
    moduli -- moduli q to scan; 0 stands for O_K itself (list of int)
    d -- matrix dimension (int)
    generators -- generator matrices as entry text lines, row-major
        (list of Strings)
    gens_path -- generator file overriding generators (String or None)
    symmetric -- whether generators get their inverses added (Boolean)
    k, l_max -- walk length and word length parameters (int)
    method -- eigensolver: 'auto', 'dense', 'power' or 'lanczos' (String)
    epsilon, delta -- flattening and escape exponents (float)
    seed -- master seed (int)
    out -- output path, empty for stdout (String)
    format -- 'csv' or 'json' (String)
    n_jobs -- worker processes, 0 for all cores (int)
    caps -- every size cap and tolerance (dict)
    """

    PRESETS = {
        'unipotent': {
            'f_coeffs': [1, 0], 'd': 2, 'symmetric': True,
            'generators': [ '1 1 0 1', '1 0 1 1' ],
            'moduli': [ 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                53 ],
            },
        'sanov': {
            'f_coeffs': [1, 0], 'd': 2, 'symmetric': False,
            'generators': [ '1 2 0 1', '1 0 2 1' ], 'moduli': [0],
            },
        }

    DEFAULT_CAPS = {
        'enumeration': ENUMERATION_CAP,
        'dense': DENSE_CAP,
        'cheeger': CHEEGER_CAP,
        'product': PRODUCT_CAP,
        'convolution': CONVOLUTION_BUDGET,
        'power_max_iter': POWER_MAX_ITER,
        'power_tol': POWER_TOL,
        'R_max': R_MAX,
        'M_max': M_MAX,
        'L_check': L_CHECK,
        'large_cutoff': LARGE_FACTOR_CUTOFF,
        }

    FIELDS = (
        'f_coeffs', 'moduli', 'd', 'generators', 'gens_path', 'symmetric',
        'k', 'l_max', 'method', 'epsilon', 'delta', 'seed', 'out', 'format',
        'n_jobs', 'caps',
        )

    def __init__(
            self, f_coeffs=None, moduli=None, d=2, generators=None,
            gens_path=None, symmetric=True, k=8, l_max=8, method='auto',
            epsilon=FLATTENING_EPSILON, delta=0.1, seed=0, out='',
            format='csv', n_jobs=1, caps=None):
        """Create a new Setup.

        Keyword arguments:
        f_coeffs -- coefficients of f, highest degree first (default x;
            list of int)
        moduli -- moduli to scan, 0 for O_K (default [0]; list of int)
        d -- matrix dimension (default 2; int)
        generators -- matrices as entry text lines (default None; list of
            Strings)
        gens_path -- generator file (default None; String)
        symmetric -- add inverses to the generators (default True; Boolean)
        k -- walk length (default 8; int)
        l_max -- largest word or product length (default 8; int)
        method -- eigensolver (default 'auto'; String)
        epsilon -- flattening exponent (default FLATTENING_EPSILON; float)
        delta -- escape or coset stripping exponent (default 0.1; float)
        seed -- master seed (default 0; int)
        out -- output path (default ''; String)
        format -- 'csv' or 'json' (default 'csv'; String)
        n_jobs -- worker processes, 0 for all cores (default 1; int)
        caps -- overrides of DEFAULT_CAPS (default None; dict)
        """
        super(Setup, self).__init__()
        self.f_coeffs = [ int(c) for c in (f_coeffs or [1, 0]) ]
        self.moduli = [ int(q) for q in (moduli if moduli is not None
            else [0]) ]
        self.d = int(d)
        self.generators = list(generators or [])
        self.gens_path = gens_path
        self.symmetric = bool(symmetric)
        self.k = int(k)
        self.l_max = int(l_max)
        self.method = method
        self.epsilon = float(epsilon)
        self.delta = float(delta)
        self.seed = int(seed)
        self.out = out
        self.format = format
        self.n_jobs = int(n_jobs)
        self.caps = dict(Setup.DEFAULT_CAPS)
        unknown = set(caps or {}) - set(Setup.DEFAULT_CAPS)
        if unknown:
            raise ValueError('unknown caps: ' + ', '.join(sorted(unknown)))
        self.caps.update(caps or {})
        if self.format not in ('csv', 'json'):
            raise ValueError('format must be csv or json, got '
                + str(self.format))
        if self.method not in ('auto', 'dense', 'power', 'lanczos'):
            raise ValueError('unknown method ' + str(self.method))

    @classmethod
    def fromPreset(cls, preset, **overrides):
        """Setup from a named preset, 'unipotent' or 'sanov', with overrides."""
        if preset not in cls.PRESETS:
            raise ValueError('unknown preset ' + str(preset) + ', choose '
                + ' or '.join(sorted(cls.PRESETS)))
        values = dict(cls.PRESETS[preset])
        values.update({ k: v for k, v in overrides.items() if v is not None })
        return cls(**values)

    @classmethod
    def fromDict(cls, values):
        unknown = set(values) - set(cls.FIELDS)
        if unknown:
            raise ValueError('unknown setup fields: '
                + ', '.join(sorted(unknown)))
        return cls(**values)

    @classmethod
    def fromJson(cls, text):
        return cls.fromDict(json.loads(text))

    def toDict(self):
        return { name: getattr(self, name) for name in Setup.FIELDS }

    def toJson(self):
        return json.dumps(self.toDict(), sort_keys=True)

    def copy(self, **overrides):
        values = self.toDict()
        values.update({ k: v for k, v in overrides.items() if v is not None })
        return Setup.fromDict(values)

    def field(self):
        return makeNumberField(self.f_coeffs)

    def ring(self, q):
        """O_K when q is 0, O_K/(q) otherwise."""
        field = self.field()
        if int(q) == 0:
            return field
        return makeResidueRing(field, int(q))

    def generatorsOver(self, ring):
        """Generator multiset over ring, with inverses when symmetric.

        A generator file, when given, replaces the generator lines; its
        matrices are reduced into ring through their text form.

        Returns:
        list of GroupElem
        """
        lines = self.generators
        if self.gens_path:
            lines = [ g.formatText() for g in loadGenerators(self.gens_path)[2] ]
        if not lines:
            raise ValueError('setup has no generators')
        S = []
        for line in lines:
            tokens = line.split()
            if len(tokens) != self.d * self.d:
                raise ValueError('generator "' + line + '" is not a '
                    + str(self.d) + ' x ' + str(self.d) + ' matrix')
            S.append(GroupElem(
                ring, self.d, [ ring.parseElem(t) for t in tokens ]
                ))
        return symmetrize(S) if self.symmetric else S

    def seedFor(self, i):
        """Per-task seed, independent of scheduling."""
        return int(np.random.SeedSequence(self.seed, spawn_key=(int(i),))
            .generate_state(1)[0])
