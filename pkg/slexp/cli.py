"""Console driver running experiments from flags or a JSON config file.

Every command is a pure function of its configuration and seed. Exit codes:
0 on success, 2 when an input fails a hypothesis, 1 on any other error.
"""

import argparse
import sys

from sympy import primerange

from slexp.experiment import Experiment
from slexp.internal.setup import Setup
from slexp.internal.data import saveTable, saveReport
from slexp.internal.errors import SlexpError, HypothesisNotMet

COMMANDS = ('spectral-scan', 'flatten', 'escape', 'growth', 'free-cert',
    'atlas')
REPORT_COMMANDS = ('growth', 'free-cert')
DEFAULT_PRESET = { 'free-cert': 'sanov' }


def parseIntList(text):
    """Integers "5,7,11"; "a:b" expands to the primes in [a, b]."""
    out = []
    for part in str(text).split(','):
        part = part.strip()
        if not part:
            continue
        if ':' in part:
            low, high = part.split(':')
            out += list(primerange(int(low), int(high) + 1))
        else:
            out.append(int(part))
    return out

def buildParser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON setup file; flags win')
    common.add_argument('--preset', choices=sorted(Setup.PRESETS),
        help='preset setup')
    common.add_argument('--f', type=parseIntList,
        help='coefficients of f, highest degree first, e.g. 1,0,1')
    common.add_argument('--q', type=parseIntList,
        help='moduli, e.g. 5,7,11 or 5:53 for the primes in a range')
    common.add_argument('--gens', help='generator file')
    common.add_argument('--d', type=int, help='matrix dimension')
    common.add_argument('--k', type=int, help='walk length')
    common.add_argument('--lmax', type=int, help='largest word length')
    common.add_argument('--method',
        choices=('auto', 'dense', 'power', 'lanczos'), help='eigensolver')
    common.add_argument('--epsilon', type=float, help='flattening exponent')
    common.add_argument('--delta', type=float, help='escape exponent')
    common.add_argument('--seed', type=int, help='master seed')
    common.add_argument('--out', help='output path, stdout when omitted')
    common.add_argument('--format', choices=('csv', 'json'),
        help='output format')
    common.add_argument('--n-jobs', type=int, dest='n_jobs',
        help='worker processes, 0 for all cores')
    common.add_argument('--verbose', action='store_true',
        help='progress messages')
    common.add_argument('--timing', action='store_true',
        help='add a seconds column to scans')

    parser = argparse.ArgumentParser(
        prog='slexp',
        description='Expansion experiments for SL_d over number-field '
            + 'residue rings.'
        )
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser

def setupFromArgs(args):
    """Setup from the config file or preset, overridden by given flags."""
    overrides = {
        'f_coeffs': args.f, 'moduli': args.q, 'gens_path': args.gens,
        'd': args.d, 'k': args.k, 'l_max': args.lmax, 'method': args.method,
        'epsilon': args.epsilon, 'delta': args.delta, 'seed': args.seed,
        'out': args.out, 'format': args.format, 'n_jobs': args.n_jobs,
        }
    if args.config:
        with open(args.config, 'r') as handle:
            return Setup.fromJson(handle.read()).copy(**overrides)
    preset = args.preset or DEFAULT_PRESET.get(args.command, 'unipotent')
    return Setup.fromPreset(preset, **overrides)

def _first(setup):
    if not setup.moduli:
        raise ValueError('no modulus given')
    return setup.moduli[0]

def runCommand(args, stdout=None, stderr=None):
    """Run one parsed command and write its output.

    Returns:
    output text
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    setup = setupFromArgs(args)
    experiment = Experiment()
    experiment.setups['cli'] = setup
    fmt = args.format or setup.format
    if args.command in REPORT_COMMANDS and args.format is None \
            and not args.config:
        fmt = 'json'

    if args.command == 'spectral-scan':
        df = experiment.spectralScan('cli', args.timing, args.verbose)
        text = saveTable(df, setup.out, fmt, args.verbose)
    elif args.command == 'flatten':
        trace, summary = experiment.flatten('cli', _first(setup),
            args.verbose)
        if summary['constant'] is not None:
            print('k*/log|G| = ' + repr(summary['constant']), file=stderr)
        if fmt == 'json':
            text = saveReport(
                { 'summary': summary, 'trace': trace.data }, setup.out, fmt,
                args.verbose
                )
        else:
            text = saveTable(trace.data[[
                'k', 'l2_norm_num', 'l2_norm_den', 'entropy', 'support'
                ]], setup.out, fmt, args.verbose)
    elif args.command == 'escape':
        df, summaries = experiment.escape('cli', _first(setup))
        if fmt == 'json':
            text = saveReport(
                { 'profile': df, 'summary': summaries,
                    'delta': Experiment.fittedDelta(summaries) },
                setup.out, fmt, args.verbose
                )
        else:
            text = saveTable(df, setup.out, fmt, args.verbose)
    elif args.command == 'growth':
        report = experiment.growth('cli', _first(setup))
        text = saveReport(report.toDict(), setup.out, fmt, args.verbose)
    elif args.command == 'free-cert':
        certificate = experiment.freeCert('cli')
        text = saveReport(certificate, setup.out, fmt, args.verbose)
    else:
        df, intersections = experiment.atlas('cli')
        if fmt == 'json':
            text = saveReport(
                { 'index': df, 'intersections': intersections },
                setup.out, fmt, args.verbose
                )
        else:
            text = saveTable(df, setup.out, fmt, args.verbose)

    if not setup.out:
        stdout.write(text)
    return text

def exitCode(err):
    if isinstance(err, HypothesisNotMet):
        return 2
    return 1

def main(argv=None):
    """Parse argv, run the command and return the exit code."""
    args = buildParser().parse_args(argv)
    try:
        runCommand(args)
    except (SlexpError, ValueError, OSError) as err:
        print(type(err).__name__ + ': ' + str(err), file=sys.stderr)
        return exitCode(err)
    return 0


if __name__ == '__main__':
    sys.exit(main())
