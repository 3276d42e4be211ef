"""
rysbench – command-line entry point.

Usage
-----
    rysbench check-approx --input m0.json --subset a,c,d
    rysbench check-duality --input m0.json
    rysbench check-rys --input m0.json --mereology nonempty-witness
    rysbench check-granules --input m0.json --granules blocks
    rysbench check-identities --input m0.json --suite cera-theorem --mode exhaustive
    rysbench build-cera --input m0.json
    rysbench quotient --input m0.json --spec "x^l = y^l and x^u = y^u"
    rysbench represent --input m0.json --max-n 5
    rysbench crad-info --input m0.json

Exit status: 0 when every check passes, 1 when a verdict fails, 2 on an
input or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from rysbench.errors import RysbenchError

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2

VERBS = ('check-approx', 'check-duality', 'check-rys', 'check-granules', 'check-identities',
         'build-cera', 'quotient', 'represent', 'crad-info')


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument('--input', metavar='MODEL', required=True, help='Model file (JSON)')
    p.add_argument('--format', choices=['json', 'text'], default='json',
                   help='Report format (default: json)')
    p.add_argument('--output', metavar='PATH', default=None,
                   help='Write the report to PATH instead of stdout')
    p.add_argument('--jobs', metavar='N', type=int, default=None, help='Worker threads')
    p.add_argument('--seed', metavar='N', type=int, default=None, help='Seed for sampled checks')
    p.add_argument('--samples', metavar='N', type=int, default=None, help='Sample count for sampled checks')
    p.add_argument('--mereology', choices=['literal', 'nonempty-witness'], default=None,
                   help='Reading of overlap for rough Y-systems')


def _add_mode(p: argparse.ArgumentParser) -> None:
    p.add_argument('--mode', choices=['exhaustive', 'sampled'], default=None,
                   help='Exhaustive scan or seeded sampling')


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog='rysbench',
        description='Finite-model workbench for rough Y-systems, granules and enriched pre-rough algebras.',
    )
    p.add_argument(
        '--version',
        action='store_true',
        default=False,
        help='Print the rysbench version and exit',
    )
    p.add_argument(
        '--log-level',
        metavar='LEVEL',
        default='WARNING',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        help='Logging level written to stderr (default: WARNING)',
    )
    sub = p.add_subparsers(dest='verb', metavar='VERB')

    q = sub.add_parser('check-approx', help='Containment and monotonicity of every approximation family')
    _add_common(q)
    q.add_argument('--family', type=int, default=None, help='Only this family index')
    q.add_argument('--subset', metavar='A,B,...', default=None, help='Also print approximations of this subset')

    q = sub.add_parser('check-duality', help='(A^u)^l = A^u and (A^l)^u = A^l')
    _add_common(q)
    _add_mode(q)
    q.add_argument('--family', type=int, default=None, help='Only this family index')

    q = sub.add_parser('check-rys', help='Rough Y-system axioms and supplementation')
    _add_common(q)

    q = sub.add_parser('check-granules', help='Granule property profile and admissibility')
    _add_common(q)
    q.add_argument('--granules', metavar='NAME', default='blocks',
                   help='Granule set name, "blocks" or a cover name (default: blocks)')
    q.add_argument('--property', metavar='NAME', action='append', default=None,
                   help='Only this property (repeatable)')
    q.add_argument('--max-depth', metavar='D', type=int, default=None, help='Term depth bound')
    q.add_argument('--subset', metavar='A,B,...', default=None,
                   help='Search a granule term for this subset')
    q.add_argument('--family', type=int, default=None,
                   help='Search for the lower approximation of --subset in this family')

    q = sub.add_parser('check-identities', help='Quasi-identity suite on the hybrid algebra')
    _add_common(q)
    _add_mode(q)
    q.add_argument('--suite', metavar='SUITE', default='cera-theorem',
                   help='Built-in suite name or path to a suite file (default: cera-theorem)')
    q.add_argument('--timing', action='store_true', default=None, help='Include per-identity timing')

    q = sub.add_parser('build-cera', help='Carrier and constants of the hybrid algebra')
    _add_common(q)
    q.add_argument('--elements', action='store_true', default=False, help='List every element')

    q = sub.add_parser('quotient', help='Rough-equality classes, or a quotient by a custom spec')
    _add_common(q)
    _add_mode(q)
    q.add_argument('--spec', metavar='SPEC', default=None,
                   help='Rough-equality spec such as "x^l = y^l and x^u = y^u"')
    q.add_argument('--explicit', action='store_true', default=False,
                   help='Group every subset instead of enumerating pairs')

    q = sub.add_parser('represent', help='Recover a partition from the hybrid algebra')
    _add_common(q)
    q.add_argument('--max-n', metavar='N', type=int, default=None, help='Largest universe size to try')

    q = sub.add_parser('crad-info', help='Pair universe K and componentwise operations')
    _add_common(q)
    return p


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def _subset(universe, text: str | None):
    if text is None:
        return None
    return universe.subset(n.strip() for n in text.split(',') if n.strip())


def _families(ctx, index: int | None) -> list[int]:
    if index is None:
        return [f.index for f in ctx.families]
    ctx.family(index)
    return [index]


def _check_approx(args, doc) -> tuple[dict, bool]:
    from rysbench.model import check_family
    from rysbench.reports import approx_data

    reports = [check_family(doc.ctx, i) for i in _families(doc.ctx, args.family)]
    data = approx_data(doc.ctx, doc.name, reports, _subset(doc.ctx.universe, args.subset))
    return data, data['passed']


def _check_duality(args, doc) -> tuple[dict, bool]:
    from rysbench.model import check_duality
    from rysbench.reports import duality_data

    sampled = None if args.mode is None else args.mode == 'sampled'
    reports = [check_duality(doc.ctx, i, sampled=sampled) for i in _families(doc.ctx, args.family)]
    data = duality_data(doc.ctx, doc.name, reports)
    return data, data['passed']


def _rys(args, doc):
    from rysbench.rys import build_rys
    return build_rys(doc.ctx, doc.rys, args.mereology)


def _check_rys(args, doc) -> tuple[dict, bool]:
    from rysbench.reports import rys_data
    from rysbench.rys import check_rys_axioms, supplementation_check

    m = _rys(args, doc)
    axioms = check_rys_axioms(m)
    data = rys_data(m, doc.name, axioms, supplementation_check(m))
    return data, axioms.passed


def _check_granules(args, doc) -> tuple[dict, bool]:
    from rysbench.granules import check_admissible, wra_term_search
    from rysbench.reports import granule_data

    m = _rys(args, doc)
    granules = doc.granule_set(args.granules)
    report = check_admissible(m, granules, args.property)
    terms = []
    target = _subset(doc.ctx.universe, args.subset)
    if target is not None:
        terms.append(wra_term_search(m, granules, target, args.family))
    data = granule_data(m, doc.name, report, terms)
    if args.property:
        passed = all(report.verdicts[p.upper()].holds for p in args.property)
    else:
        passed = report.admissible
    return data, passed


def _suite(args):
    from rysbench.verify.dsl import BUILTIN_SUITES, load_builtin_suite, parse_suite

    if args.suite in BUILTIN_SUITES:
        return args.suite, load_builtin_suite(args.suite)
    path = Path(args.suite)
    return path.stem, parse_suite(path.read_text(encoding='utf-8'))


def _check_identities(args, doc) -> tuple:
    from rysbench.qrst import build_cera
    from rysbench.verify.evaluate import run_suite

    name, identities = _suite(args)
    report = run_suite(build_cera(doc.ctx), identities, name, args.mode or 'exhaustive')
    report.model = doc.name or report.model
    return report, report.passed


def _build_cera(args, doc) -> tuple[dict, bool]:
    from rysbench.qrst import build_cera
    from rysbench.reports import cera_data

    return cera_data(build_cera(doc.ctx), doc.name, args.elements), True


def _quotient(args, doc) -> tuple[dict, bool]:
    from rysbench.quotient import build_quotient, generalized_quotient
    from rysbench.reports import generalized_data, quotient_data

    if args.spec is None:
        q = build_quotient(doc.ctx, 'explicit' if args.explicit else 'symbolic')
        return quotient_data(doc.ctx, doc.name, q), True
    m = _rys(args, doc)
    sampled = None if args.mode is None else args.mode == 'sampled'
    g = generalized_quotient(m, args.spec, sampled)
    return generalized_data(m, doc.name, g), g.ok


def _represent(args, doc) -> tuple[dict, bool]:
    from rysbench.qrst import build_cera
    from rysbench.reports import representation_data
    from rysbench.verify.search import representation_search

    result = representation_search(build_cera(doc.ctx), args.max_n, doc.ctx.settings)
    return representation_data(result, doc.name), result.found


def _crad_info(args, doc) -> tuple[dict, bool]:
    from rysbench.qrst import build_cera, build_crad, crad_info
    from rysbench.reports import crad_data

    crad = build_crad(build_cera(doc.ctx))
    return crad_data(crad, doc.name, crad_info(crad)), True


_HANDLERS = {
    'check-approx': _check_approx,
    'check-duality': _check_duality,
    'check-rys': _check_rys,
    'check-granules': _check_granules,
    'check-identities': _check_identities,
    'build-cera': _build_cera,
    'quotient': _quotient,
    'represent': _represent,
    'crad-info': _crad_info,
}


def _settings(args):
    from rysbench.config import resolve_settings

    overrides = {
        'jobs': args.jobs,
        'seed': args.seed,
        'samples': args.samples,
        'mereology': args.mereology,
        'max_depth': getattr(args, 'max_depth', None),
        'max_n': getattr(args, 'max_n', None),
        'timing': getattr(args, 'timing', None),
    }
    return resolve_settings(overrides)


def run(args: argparse.Namespace) -> int:
    """Execute one verb; return the exit status."""
    from rysbench.modelfile import load_model
    from rysbench.reports import render, verify_text
    from rysbench.verify.evaluate import VerifyReport

    try:
        settings = _settings(args)
        doc = load_model(args.input, settings)
        result, passed = _HANDLERS[args.verb](args, doc)
        if isinstance(result, VerifyReport):
            text = verify_text(result) if args.format == 'text' else render(result.to_dict(), 'json')
        else:
            text = render(result, args.format)
        if args.output:
            Path(args.output).write_text(text, encoding='utf-8')
        else:
            sys.stdout.write(text)
    except RysbenchError as exc:
        print(f'rysbench: error: {exc}', file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f'rysbench: error: {exc.filename or ""}: {exc.strerror or exc}', file=sys.stderr)
        return EXIT_ERROR
    except json.JSONDecodeError as exc:
        print(f'rysbench: error: invalid JSON: {exc}', file=sys.stderr)
        return EXIT_ERROR
    logger.info('%s finished: %s', args.verb, 'passed' if passed else 'failed')
    return EXIT_OK if passed else EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )

    from rysbench import __version__

    if args.version:
        print(f'rysbench {__version__}')
        return EXIT_OK
    if args.verb is None:
        parser.print_usage(sys.stderr)
        print('rysbench: error: a verb is required: ' + ', '.join(VERBS), file=sys.stderr)
        return EXIT_ERROR
    return run(args)


def rysbench() -> None:
    """Entry point for the ``rysbench`` command."""
    sys.exit(main())


if __name__ == '__main__':
    rysbench()
