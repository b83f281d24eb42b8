"""Command-line front end with JSON input and output.

Every subcommand reads JSON (where applicable), writes one deterministic
JSON report and exits 0 when all verdicts pass, 1 on a verdict failure
(the report is still written), and 2 on usage or parse errors.  Reports
embed the full tolerance and cap configuration so each numeric claim is
reproducible from the report alone.
"""

import argparse
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import serialize
from .blaschke import BlaschkeProduct, tm_basis_coeffs
from .debranges import (ModelSubspace, extract_generators,
                        verify_contraction_property, verify_independence)
from .errors import ArgumentError, ParseError, ToolkitError
from .gallery import section2_report
from .operators import near_isometry_certificate, shimorin_check
from .wold import multivariable_wold, wold_decompose

__all__ = ['RunConfig', 'run', 'main']


@dataclass
class RunConfig:
    """Fully resolved invocation: one command plus every knob it honours."""

    command: str
    tol: float = 1e-9
    cap: int = 400
    k_max: int = 8
    m_max: int = None
    power_cap: int = None
    m: int = None
    N: int = 12
    d: int = 64
    seed: int = 0x5EED
    force: bool = False
    input_path: str = None
    output_path: str = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ArgumentError('tol must be positive')
        for name in ('cap', 'k_max', 'm_max', 'power_cap', 'm', 'N', 'd'):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ArgumentError('%s must be positive' % name)

    def to_json(self):
        out = asdict(self)
        out.pop('input_path')
        out.pop('output_path')
        return out


def _load_json(path):
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError('input file %r not found' % path)
    except json.JSONDecodeError as exc:
        raise ParseError('input file %r is not valid JSON: %s' % (path, exc))


def _cmd_basis(cfg):
    data = _load_json(cfg.input_path)
    B = serialize.blaschke_from_json(data)
    m_max = cfg.m_max if cfg.m_max is not None else 10
    elements = []
    vecs = []
    for j in range(B.degree):
        for m in range(m_max + 1):
            f = tm_basis_coeffs(B, (j, m), cfg.cap)
            vecs.append(f.coeffs)
            elements.append({'j': j, 'm': m,
                             'coeffs': serialize.vector_to_json(f.coeffs)})
    V = np.column_stack(vecs)
    gram_dev = float(np.abs(V.conj().T @ V
                            - np.eye(V.shape[1])).max())
    ok = gram_dev < cfg.tol
    return ok, {'blaschke': serialize.blaschke_to_json(B),
                'elements': elements, 'gram_deviation': gram_dev}


def _cmd_check(cfg):
    T = serialize.operator_from_json(_load_json(cfg.input_path))
    cert = near_isometry_certificate(T, k_max=cfg.k_max, tol=cfg.tol)
    shim = shimorin_check(T, tol=cfg.tol)
    return cert.verdict, {'near_isometry': cert.to_json(),
                          'shimorin': shim.to_json()}


def _cmd_wold(cfg):
    T = serialize.operator_from_json(_load_json(cfg.input_path))
    dec = wold_decompose(T, m_max=cfg.m_max, tol=cfg.tol,
                         power_cap=cfg.power_cap, k_max=cfg.k_max,
                         force=cfg.force)
    ok = (dec.certificate.verdict
          and all(v < cfg.tol for v in dec.residuals.values()))
    payload = {
        'certificate': dec.certificate.to_json(),
        'layers': [serialize.matrix_to_json(L.T) for L in dec.layers],
        'layer_dims': [L.shape[1] for L in dec.layers],
        'invertible_part': serialize.matrix_to_json(dec.invertible_part.T),
        'invertible_dim': dec.invertible_dim,
        'clipped': dec.clipped,
        'converged': dec.converged,
        'residuals': dec.residuals,
    }
    return ok, payload


def _cmd_wold_multi(cfg):
    data = _load_json(cfg.input_path)
    if not isinstance(data, dict) or 'operators' not in data:
        raise ParseError("field 'operators': missing")
    ops_json = data['operators']
    if not isinstance(ops_json, list) or len(ops_json) < 2:
        raise ParseError("field 'operators': expected a list of at least "
                         "two operators")
    Ts = [serialize.operator_from_json(o, 'operators[%d]' % i)
          for i, o in enumerate(ops_json)]
    dec = multivariable_wold(Ts, m=cfg.m, power_cap=cfg.power_cap,
                             tol=cfg.tol, k_max=cfg.k_max, force=cfg.force)
    summands = []
    for A in sorted(dec.summands, key=lambda a: (len(a), a)):
        basis = dec.summands[A]
        classes = {}
        for i, cl in dec.classifications[A].items():
            classes[str(i)] = None if cl is None else cl.to_json()
        summands.append({'A': list(A), 'dim': basis.shape[1],
                         'basis': serialize.matrix_to_json(basis.T),
                         'classifications': classes})
    ok = (all(c.verdict for c in dec.certificates)
          and all(v < cfg.tol for v in dec.residuals.values()))
    payload = {
        'summands': summands,
        'residuals': dec.residuals,
        'clipped': dec.clipped,
        'certificates': [c.to_json() for c in dec.certificates],
    }
    return ok, payload


def _cmd_debranges(cfg):
    data = _load_json(cfg.input_path)
    space = serialize.space_from_json(
        data.get('ambient') if isinstance(data, dict) else None, 'ambient')
    span_json = data.get('span')
    if not isinstance(span_json, list) or not span_json:
        raise ParseError("field 'span': expected a non-empty list of "
                         "coefficient vectors")
    cols = [serialize.vector_from_json(v, 'span[%d]' % i)
            for i, v in enumerate(span_json)]
    for i, c in enumerate(cols):
        if c.size != space.dim:
            raise ParseError("field 'span[%d]': length %d does not match "
                             "the ambient dimension %d"
                             % (i, c.size, space.dim))
    gram = data.get('gram')
    if gram is not None:
        gram = serialize.matrix_from_json(gram, 'gram')
    bl_json = data.get('blaschke')
    if not isinstance(bl_json, list) or not bl_json:
        raise ParseError("field 'blaschke': expected a non-empty list")
    Bs = [serialize.blaschke_from_json(b, 'blaschke[%d]' % i)
          for i, b in enumerate(bl_json)]
    try:
        M = ModelSubspace(space, np.column_stack(cols), gram)
    except ArgumentError as exc:
        raise ParseError('field span/gram: %s' % exc)
    G = extract_generators(M, Bs, tol=cfg.tol, k_max=cfg.k_max)
    sigma = verify_independence(G, tol=cfg.tol)
    contraction = verify_contraction_property(G, seed=cfg.seed)
    ok = (G.r <= G.bound and sigma > cfg.tol and contraction.passes
          and G.residual_representation < 1e-8)
    payload = {'generators': G.to_json(),
               'independence_sigma_min': sigma,
               'contraction': contraction.to_json()}
    return ok, payload


def _cmd_gallery(cfg):
    report = section2_report(N=cfg.N, d=cfg.d, tol=cfg.tol, k_max=cfg.k_max)
    return bool(report['strict_separation']), report


_HANDLERS = {
    'basis': _cmd_basis,
    'check': _cmd_check,
    'wold': _cmd_wold,
    'wold-multi': _cmd_wold_multi,
    'debranges': _cmd_debranges,
    'gallery': _cmd_gallery,
}


def run(cfg):
    """Execute one configuration; returns ``(exit_code, report_dict)``.

    Verdict failures (including certification and bound violations) yield
    exit code 1 with the report carrying an ``error`` field; the report is
    suppressed only on parse or usage errors (exit code 2).
    """
    base = {'command': cfg.command, 'config': cfg.to_json()}
    try:
        ok, payload = _HANDLERS[cfg.command](cfg)
    except ParseError:
        raise
    except ToolkitError as exc:
        report = dict(base)
        report['ok'] = False
        report['error'] = '%s: %s' % (type(exc).__name__, exc)
        return 1, report
    report = dict(base)
    report['ok'] = bool(ok)
    report.update(payload)
    return (0 if ok else 1), report


def _build_parser():
    parser = argparse.ArgumentParser(
        prog='subhardy',
        description='Blaschke bases, near-isometry certificates, Wold-type '
                    'decompositions and generator extraction on truncated '
                    'Hardy models.')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument('--input', required=True, dest='input_path',
                           help='path to the JSON input')
        p.add_argument('--output', dest='output_path', default=None,
                       help='write the JSON report here (default: stdout)')
        p.add_argument('--tol', type=float, default=1e-9)
        p.add_argument('--k-max', type=int, default=8, dest='k_max')

    p = sub.add_parser('basis', help='rational orthonormal basis '
                                     'coefficients and Gram check')
    common(p)
    p.add_argument('--cap', type=int, default=400)
    p.add_argument('--m-max', type=int, default=10, dest='m_max')

    p = sub.add_parser('check', help='near-isometry certificate and both '
                                     'quadratic-form conditions')
    common(p)

    p = sub.add_parser('wold', help='shift-plus-invertible decomposition')
    common(p)
    p.add_argument('--m-max', type=int, default=None, dest='m_max')
    p.add_argument('--power-cap', type=int, default=None, dest='power_cap')
    p.add_argument('--force', action='store_true')

    p = sub.add_parser('wold-multi', help='2^m-summand decomposition of a '
                                          'doubly commuting tuple')
    common(p)
    p.add_argument('--m', type=int, default=None)
    p.add_argument('--power-cap', type=int, default=None, dest='power_cap')
    p.add_argument('--force', action='store_true')

    p = sub.add_parser('debranges', help='generator extraction for an '
                                         'invariant subspace')
    common(p)
    p.add_argument('--seed', type=int, default=0x5EED)

    p = sub.add_parser('gallery', help='the weighted-shift and lattice '
                                       'separation report')
    common(p, needs_input=False)
    p.add_argument('--N', type=int, default=12)
    p.add_argument('--d', type=int, default=64)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    kwargs = {k: v for k, v in vars(ns).items() if v is not None}
    try:
        cfg = RunConfig(**kwargs)
        code, report = run(cfg)
    except (ParseError, ArgumentError) as exc:
        print('error: %s' % exc, file=sys.stderr)
        return 2
    text = serialize.dumps(report)
    if cfg.output_path:
        with open(cfg.output_path, 'w', encoding='utf-8') as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == '__main__':
    sys.exit(main())
