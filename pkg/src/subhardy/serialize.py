"""JSON encoding and decoding for the toolkit's data types.

Complex scalars travel as ``[re, im]`` pairs, vectors as arrays of pairs,
matrices as row-major nested arrays of pairs.  Parsing errors always name
the offending field.  ``dumps`` is deterministic (sorted keys, fixed
layout) so that identical inputs produce byte-identical reports.
"""

import json

import numpy as np

from .blaschke import BlaschkeProduct
from .errors import ParseError
from .operators import OperatorMatrix
from .spaces import CoefVector, TruncatedHardySpace

__all__ = [
    'complex_to_pair', 'pair_to_complex', 'vector_to_json',
    'vector_from_json', 'matrix_to_json', 'matrix_from_json',
    'blaschke_to_json', 'blaschke_from_json', 'space_to_json',
    'space_from_json', 'coefvector_to_json', 'coefvector_from_json',
    'operator_to_json', 'operator_from_json', 'sanitize', 'dumps',
]


def complex_to_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def pair_to_complex(pair, where='value'):
    try:
        re, im = pair
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise ParseError('field %r: expected a [re, im] pair, got %r'
                         % (where, pair)) from exc


def vector_to_json(v):
    return [complex_to_pair(z) for z in np.asarray(v, dtype=complex)]


def vector_from_json(data, where='vector'):
    if not isinstance(data, list):
        raise ParseError('field %r: expected a list of [re, im] pairs'
                         % where)
    return np.array([pair_to_complex(p, where) for p in data],
                    dtype=complex)


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[complex_to_pair(z) for z in row] for row in M]


def matrix_from_json(data, where='matrix'):
    if not isinstance(data, list) or not data:
        raise ParseError('field %r: expected a non-empty nested list'
                         % where)
    rows = [vector_from_json(row, where) for row in data]
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise ParseError('field %r: ragged rows' % where)
    return np.vstack(rows)


def _require(data, key, where):
    if not isinstance(data, dict):
        raise ParseError('field %r: expected an object' % where)
    if key not in data:
        raise ParseError('field %r: missing key %r' % (where, key))
    return data[key]


def blaschke_to_json(B):
    return {'zeros': [complex_to_pair(z) for z in B.zeros]}


def blaschke_from_json(data, where='blaschke'):
    zeros = _require(data, 'zeros', where)
    if not isinstance(zeros, list) or not zeros:
        raise ParseError('field %r.zeros: expected a non-empty list' % where)
    return BlaschkeProduct(tuple(pair_to_complex(p, where + '.zeros')
                                 for p in zeros))


def space_to_json(space):
    return {'n': space.n, 'caps': list(space.caps)}


def space_from_json(data, where='space'):
    caps = _require(data, 'caps', where)
    if not isinstance(caps, list):
        raise ParseError('field %r.caps: expected a list' % where)
    try:
        space = TruncatedHardySpace(tuple(int(c) for c in caps))
    except Exception as exc:
        raise ParseError('field %r.caps: %s' % (where, exc)) from exc
    n = data.get('n')
    if n is not None and int(n) != space.n:
        raise ParseError('field %r.n: inconsistent with caps' % where)
    return space


def coefvector_to_json(f):
    return {'space': space_to_json(f.space),
            'coeffs': vector_to_json(f.coeffs)}


def coefvector_from_json(data, where='coefvector'):
    space = space_from_json(_require(data, 'space', where), where + '.space')
    coeffs = vector_from_json(_require(data, 'coeffs', where),
                              where + '.coeffs')
    if coeffs.size != space.dim:
        raise ParseError('field %r.coeffs: length %d does not match the '
                         'space dimension %d'
                         % (where, coeffs.size, space.dim))
    return CoefVector(space, coeffs)


def operator_to_json(T):
    out = {'matrix': matrix_to_json(T.matrix)}
    if T.window.size != T.dim:
        out['window'] = [int(i) for i in T.window]
    return out


def operator_from_json(data, where='operator'):
    M = matrix_from_json(_require(data, 'matrix', where), where + '.matrix')
    if M.shape[0] != M.shape[1]:
        raise ParseError('field %r.matrix: expected a square matrix' % where)
    window = data.get('window')
    if window is not None:
        if not isinstance(window, list):
            raise ParseError('field %r.window: expected a list of indices'
                             % where)
        try:
            window = [int(i) for i in window]
        except (TypeError, ValueError) as exc:
            raise ParseError('field %r.window: non-integer entry'
                             % where) from exc
        if any(i < 0 or i >= M.shape[0] for i in window):
            raise ParseError('field %r.window: index out of range' % where)
    return OperatorMatrix(M, window=window)


def sanitize(obj):
    """Recursively convert reports to JSON-encodable builtins."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_pair(obj)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 1:
            return vector_to_json(obj)
        return matrix_to_json(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, 'to_json'):
        return sanitize(obj.to_json())
    raise TypeError('cannot serialise %r' % type(obj))


def dumps(report):
    """Deterministic JSON text (sorted keys, two-space indent)."""
    return json.dumps(sanitize(report), sort_keys=True, indent=2) + '\n'
