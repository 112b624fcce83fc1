"""Contains class Experiment."""

import math
import time

import joblib as jl
import numpy as np # handle arrays
import pandas as pd # data wrangling

from slexp.internal.setup import Setup
from slexp.internal.algebra import FieldFactor, ResidueRing
from slexp.internal.groups import GroupSpec, GroupTable, subgroupAtlas, \
    atlasIndexAudit, torusClassIntersections
from slexp.internal.spectral import buildOperator, spectrumTop2
from slexp.internal.walks import flatteningTrace, escapeProfile
from slexp.internal.growth import triplingReport, growthScan
from slexp.internal.archimedean import EmbeddingSet, powerUp, normGrowth
from slexp.internal.errors import SlexpError, AtlasUnavailable


def _groupTable(setup, q, verbose=False):
    """Table of all of SL_d(O_K/(q)) and the generator multiset over it.

    The table is the whole group whether or not S generates it, so a
    non-generating S shows up as a disconnected Cayley graph.
    """
    ring = setup.ring(q)
    S = setup.generatorsOver(ring)
    table = GroupTable.fromSpec(
        GroupSpec(setup.d, ring), setup.caps['product'], verbose
        )
    return table, S

def _spectralRow(setup, q, seed, timing):
    """One row of a spectral scan; errors become an error tag."""
    start = time.perf_counter()
    row = {
        'q': q, 'size': None, 'lambda2': None, 'gap': None,
        'connected': None, 'method': None, 'error': '',
        }
    try:
        table, S = _groupTable(setup, q)
        method = setup.method
        if method == 'auto':
            method = 'dense' if table.size <= setup.caps['dense'] \
                else 'lanczos'
        mode = 'dense' if method == 'dense' else 'matrix-free'
        op = buildOperator(table, S, mode, dense_cap=setup.caps['dense'])
        report = spectrumTop2(
            op, method, tol=setup.caps['power_tol'],
            max_iter=setup.caps['power_max_iter'], seed=seed
            )
        row.update({
            'size': table.size, 'lambda2': report.lambda2, 'gap': report.gap,
            'connected': report.connected, 'method': report.method,
            })
    except SlexpError as err:
        row['error'] = type(err).__name__
    if timing:
        row['seconds'] = time.perf_counter() - start
    return row


class Experiment(object):
    """Class defines an experiment session over named setups.

    Methods:
    newSetup -- create a Setup and store it under a name
    spectralScan -- lambda_2 and gap of the Cayley operator per modulus
    flatten -- exact L2 flattening trace of the walk
    escape -- escape of mass from the subgroup atlas
    growth -- tripling and iterated-product sizes of the generators
    growthScan -- tripling of random symmetric sets
    freeCert -- ping-pong freeness certificate over O_K
    normGrowth -- archimedean norm growth of products of the generators
    atlas -- index and torus intersection audits of the subgroup atlas
    """

    def __init__(self):
        """Create a new Experiment."""
        super(Experiment, self).__init__()
        self.setups = {}
            # dictionary with keys=setup names, values=Setup objects

    def newSetup(self, name, preset=None, **kwargs):
        """Create a new Setup, save it in setups dict under given name.

        Two preset setups exist: "unipotent" (the pair [[1,1],[0,1]],
        [[1,0],[1,1]] and their inverses over Z) and "sanov" (the pair
        [[1,2],[0,1]], [[1,0],[2,1]] over Z, unreduced). Keyword arguments
        override individual fields of the preset.

        Arguments:
        name -- name of setup to be used as a key in setups dictionary

        Keyword arguments:
        preset -- preset setup to be used: "unipotent" or "sanov", if None
            every field comes from kwargs (default None; None or String)
        kwargs -- Setup fields

        Returns:
        the new Setup
        """
        if preset is None:
            setup = Setup(**kwargs)
        else:
            setup = Setup.fromPreset(preset, **kwargs)
        self.setups[name] = setup
        return setup

    def _setup(self, name):
        if isinstance(name, Setup):
            return name
        if name not in self.setups:
            raise ValueError('no setup named ' + str(name))
        return self.setups[name]

    def spectralScan(self, setup_name, timing=False, verbose=False):
        """Second eigenvalue and gap of the Cayley operator for every modulus.

        Rows run in a joblib pool and come back in input order, sorted by q;
        a failing modulus records the error class in its row and the scan
        continues. Each row's start vector is seeded from the master seed
        and the row position.

        Arguments:
        setup_name -- setup to scan (String or Setup)

        Keyword arguments:
        timing -- add a seconds column (default False; Boolean)
        verbose -- joblib progress output (default False; Boolean)

        Returns:
        pandas dataframe with columns q, size, lambda2, gap, connected,
        method, error and optionally seconds
        """
        setup = self._setup(setup_name)
        moduli = sorted(setup.moduli)
        n_cores = setup.n_jobs if setup.n_jobs else jl.cpu_count()
        if verbose:
            print('Starting spectral scan over ' + str(len(moduli))
                + ' moduli...')
        rows = jl.Parallel(n_jobs=n_cores, verbose=10 if verbose else 0) (
            jl.delayed( _spectralRow ) (setup, q, setup.seedFor(i), timing)
            for i, q in enumerate(moduli)
            )
        return pd.DataFrame(rows)

    def flatten(self, setup_name, q, verbose=False):
        """Exact flattening trace of chi_S^(k), k = 1..setup.k.

        Returns:
        tuple (FlatteningTrace, summary dictionary with k_star, constant,
        almost_delta, size, target)
        """
        setup = self._setup(setup_name)
        table, S = _groupTable(setup, q)
        if verbose:
            print('Walking on ' + str(table.size) + ' elements...')
        trace = flatteningTrace(
            table, S, setup.k, setup.epsilon, setup.caps['convolution']
            )
        summary = {
            'q': q, 'size': table.size, 'target': trace.target,
            'k_star': trace.k_star, 'constant': trace.constant,
            'almost_delta': trace.almost_delta,
            }
        return trace, summary

    def escape(self, setup_name, q, kinds=None):
        """Escape profiles chi_S^(l)(H) for the atlas subgroups of SL_2(F_q).

        Walk lengths are the even values up to setup.l_max.

        Returns:
        tuple (pandas dataframe with a kind column beside the escape
        profile columns, dictionary kind -> summary)
        """
        setup = self._setup(setup_name)
        ring = setup.ring(q)
        if not isinstance(ring, ResidueRing) or len(ring.factors) != 1 \
                or ring.factors[0].k != 1:
            raise AtlasUnavailable('the atlas needs a prime modulus that '
                + 'stays prime in O_K, got ' + str(q))
        table, S = _groupTable(setup, q)
        l_values = list(range(2, setup.l_max + 1, 2))
        frames = []
        summaries = {}
        for H in subgroupAtlas(ring.factors[0], setup.caps['enumeration']):
            if kinds and H.kind not in kinds:
                continue
            df, summary = escapeProfile(
                table, S, H, l_values, setup.caps['convolution']
                )
            df.insert(0, 'kind', H.kind)
            frames.append(df)
            summaries[H.kind] = summary
        return pd.concat(frames, ignore_index=True), summaries

    def growth(self, setup_name, q):
        """GrowthReport of the symmetric generator set."""
        setup = self._setup(setup_name)
        S = setup.copy(symmetric=True).generatorsOver(setup.ring(q))
        return triplingReport(
            S, (3, 4, 5), setup.epsilon, setup.caps['product']
            )

    def growthScan(self, setup_name, trials, size, verbose=False):
        """Tripling of random symmetric sets for each prime modulus."""
        setup = self._setup(setup_name)
        return growthScan(
            sorted(setup.moduli), trials, size, setup.seed,
            k_list=(3, 4, 5), epsilon=setup.epsilon, n_cores=setup.n_jobs,
            verbose=verbose
            )

    def freeCert(self, setup_name, precision=30):
        """Ping-pong certificate of the generators over O_K.

        Returns:
        certificate dictionary from powerUp
        """
        setup = self._setup(setup_name)
        field = setup.field()
        A = setup.copy(symmetric=False).generatorsOver(field)
        embeddings = EmbeddingSet(field, precision)
        M, powered, certificate = powerUp(
            A, embeddings, M_max=setup.caps['M_max'],
            l_check=setup.caps['L_check'], seed=setup.seed,
            cap=setup.caps['product']
            )
        return certificate

    def normGrowth(self, setup_name, precision=30):
        """Norm growth table of the symmetric generators over O_K."""
        setup = self._setup(setup_name)
        field = setup.field()
        S = setup.copy(symmetric=True).generatorsOver(field)
        return normGrowth(
            S, EmbeddingSet(field, precision), setup.l_max,
            setup.caps['product']
            )

    def atlas(self, setup_name):
        """Atlas audits for every prime modulus of the setup.

        Returns:
        tuple (index audit dataframe with a p column, list of torus
        intersection dictionaries)
        """
        setup = self._setup(setup_name)
        frames = []
        intersections = []
        for p in sorted(setup.moduli):
            factor = FieldFactor(p, (0, 1))
            df = atlasIndexAudit(factor, setup.caps['enumeration'])
            df.insert(0, 'p', p)
            frames.append(df)
            intersections.append(
                torusClassIntersections(factor, setup.caps['enumeration'])
                )
        return pd.concat(frames, ignore_index=True), intersections

    @staticmethod
    def fittedDelta(summaries):
        """Smallest escape exponent over a set of escape summaries."""
        values = [ s['delta'] for s in summaries.values()
            if np.isfinite(s['delta']) ]
        return min(values) if values else math.inf
