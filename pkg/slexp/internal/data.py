"""Contains report and table export methods."""

import io
import json
import math
from fractions import Fraction

import numpy as np # handle arrays
import pandas as pd # data wrangling


def jsonable(value):
    """Convert a report value into plain JSON types.

    Fractions become "num/den" strings, numpy scalars become Python numbers,
    non-finite floats become strings and dataframes become record lists.
    """
    if isinstance(value, dict):
        return { str(k): jsonable(v) for k, v in value.items() }
    if isinstance(value, (list, tuple, set, frozenset)):
        return [ jsonable(v) for v in value ]
    if isinstance(value, pd.DataFrame):
        return [ jsonable(r) for r in value.to_dict(orient='records') ]
    if isinstance(value, Fraction):
        return str(value.numerator) + '/' + str(value.denominator)
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, bytes):
        return value.hex()
    return value

def formatReport(report, fmt='json'):
    """Text of a report dictionary: sorted JSON, or a one-row CSV."""
    if fmt == 'json':
        return json.dumps(jsonable(report), sort_keys=True, indent=1) + '\n'
    flat = {}
    for key, value in sorted(report.items()):
        value = jsonable(value)
        flat[key] = json.dumps(value, sort_keys=True) \
            if isinstance(value, (list, dict)) else value
    return formatTable(pd.DataFrame([flat]), 'csv')

def formatTable(df, fmt='csv'):
    """Text of a dataframe as CSV without index, or as JSON records."""
    if fmt == 'json':
        return json.dumps(jsonable(df), sort_keys=True, indent=1) + '\n'
    buffer = io.StringIO()
    df.to_csv(buffer, index=False, lineterminator='\n')
    return buffer.getvalue()

def writeText(text, save_to_file='', verbose=False):
    """Write text to a file, or return it for stdout when no path is given."""
    if not save_to_file:
        return text
    if verbose:
        print('Saving file...')
    with open(save_to_file, 'w') as handle:
        handle.write(text)
    if verbose:
        print('...file saved.')
    return text

def saveTable(df, save_to_file='', fmt='csv', verbose=False):
    return writeText(formatTable(df, fmt), save_to_file, verbose)

def saveReport(report, save_to_file='', fmt='json', verbose=False):
    return writeText(formatReport(report, fmt), save_to_file, verbose)

def loadTable(path):
    return pd.read_csv(path)
