"""
Report rendering.

Every command builds a plain ``dict`` (subsets written as lists of element
names, typed elements in their ``{"tag": ...}`` form) and renders it as JSON
or as indented text.  Key order is fixed by construction and no timing is
included unless requested, so equal inputs give byte-identical output.
"""
from __future__ import annotations

import json
from typing import Any, Iterable

from rysbench.granules import GranuleReport, TermSearchOutcome
from rysbench.model import DualityReport, FamilyReport, ModelContext, Subset
from rysbench.qrst import CeraStructure, CradReport, CradStructure
from rysbench.quotient import GeneralizedQuotient, QuotientStructure, members_of
from rysbench.rys import AxiomReport, RYSModel, SupplementationReport
from rysbench.verify.evaluate import VerifyReport
from rysbench.verify.search import RepresentationResult

FORMATS = ('json', 'text')


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def to_json(data: dict) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + '\n'


def _scalar(value: Any) -> str:
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'yes' if value else 'no'
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return '{' + ','.join(value) + '}'
    if isinstance(value, dict) and set(value) <= {'tag', 'set', 'lower', 'upper'}:
        if value.get('tag') == 't1':
            return 'τ1 {' + ','.join(value['set']) + '}'
        return 'τ2 ({' + ','.join(value['lower']) + '}, {' + ','.join(value['upper']) + '})'
    return str(value)


def _is_leaf(value: Any) -> bool:
    if isinstance(value, dict):
        return set(value) <= {'tag', 'set', 'lower', 'upper'} and 'tag' in value
    if isinstance(value, list):
        return all(isinstance(v, str) for v in value)
    return True


def _text_lines(value: Any, indent: int) -> Iterable[str]:
    pad = '  ' * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if _is_leaf(item):
                yield f'{pad}{key}: {_scalar(item)}'
            else:
                yield f'{pad}{key}:'
                yield from _text_lines(item, indent + 1)
    elif isinstance(value, list):
        for item in value:
            if _is_leaf(item):
                yield f'{pad}- {_scalar(item)}'
            else:
                lines = list(_text_lines(item, indent + 1))
                if lines:
                    lines[0] = f'{pad}- ' + lines[0].lstrip()
                yield from lines
    else:
        yield f'{pad}{_scalar(value)}'


def to_text(data: dict) -> str:
    return '\n'.join(_text_lines(data, 0)) + '\n'


def verify_text(report: VerifyReport) -> str:
    """One line per identity, disputed entries listed after the rest."""
    head = f'suite {report.suite} on {report.model} ({report.mode}'
    head += f', seed {report.seed})' if report.seed is not None else ')'
    lines = [head]
    ordered = [r for r in report.results if not r.disputed] + report.disputed()
    width = max((len(r.label) for r in ordered), default=0)
    for r in ordered:
        mark = ' (disputed)' if r.disputed else ''
        line = f'  {r.verdict:<22} {r.label:<{width}}  {r.checked} checked{mark}'
        if r.millis is not None:
            line += f' in {r.millis} ms'
        lines.append(line)
        if r.counterexample is not None:
            lines.append('      counterexample: ' + ', '.join(
                f'{v} = {_scalar(e)}' for v, e in r.counterexample.items()))
        elif r.undefined_at is not None:
            lines.append('      undefined at: ' + ', '.join(
                f'{v} = {_scalar(e)}' for v, e in r.undefined_at.items()))
    lines.append('passed' if report.passed else f'{len(report.failures())} identit(y/ies) not holding')
    return '\n'.join(lines) + '\n'


def render(data: dict, fmt: str = 'json') -> str:
    return to_json(data) if fmt == 'json' else to_text(data)


# ---------------------------------------------------------------------------
# Serializers
# ---------------------------------------------------------------------------

def _names(ctx: ModelContext, mask: Subset) -> list[str]:
    return list(ctx.universe.names(mask))


def _model_header(ctx: ModelContext, name: str) -> dict:
    data = {'model': name, 'universe': list(ctx.universe.elements)}
    if ctx.partition is not None:
        data['blocks'] = [_names(ctx, b) for b in ctx.partition.blocks]
    return data


def approx_data(ctx: ModelContext, name: str, families: list[FamilyReport],
                subset: Subset | None = None) -> dict:
    data = _model_header(ctx, name)
    data['families'] = [f.to_dict(ctx.universe) for f in families]
    if subset is not None:
        rows = []
        for fam in ctx.families:
            rows.append({'family': fam.index, 'lower': _names(ctx, fam.lower(subset)),
                         'upper': _names(ctx, fam.upper(subset))})
        data['subset'] = {'set': _names(ctx, subset), 'approximations': rows}
    data['passed'] = all(f.ok for f in families)
    return data


def duality_data(ctx: ModelContext, name: str, reports: list[DualityReport]) -> dict:
    data = _model_header(ctx, name)
    data['families'] = [r.to_dict(ctx.universe) for r in reports]
    data['passed'] = all(r.dual for r in reports)
    return data


def rys_data(m: RYSModel, name: str, axioms: AxiomReport, supplementation: SupplementationReport) -> dict:
    ctx = m.ctx
    data = _model_header(ctx, name)
    data['mode'] = m.mode
    data['definables'] = [_names(ctx, d) for d in m.definables]
    results = []
    for r in axioms.results:
        entry = {'name': r.name, 'holds': r.holds}
        if r.family is not None:
            entry['family'] = r.family
        if r.counterexample is not None:
            entry['counterexample'] = [_names(ctx, x) for x in r.counterexample]
        if r.note:
            entry['note'] = r.note
        if r.informational:
            entry['informational'] = True
        results.append(entry)
    data['axioms'] = results
    supp = {}
    for verdict in (supplementation.strict, supplementation.weak):
        entry = {'holds': verdict.holds, 'checked': verdict.checked}
        if verdict.counterexample is not None:
            entry['counterexample'] = [_names(ctx, x) for x in verdict.counterexample]
        if verdict.witness is not None:
            entry['witness'] = [_names(ctx, x) for x in verdict.witness]
        supp[verdict.name] = entry
    if supplementation.note:
        supp['note'] = supplementation.note
    data['supplementation'] = supp
    data['passed'] = axioms.passed
    return data


def granule_data(m: RYSModel, name: str, report: GranuleReport,
                 terms: list[TermSearchOutcome] = ()) -> dict:
    ctx = m.ctx
    data = _model_header(ctx, name)
    data['granules'] = {'name': report.granules.name, 'label': report.granules.label,
                        'members': [_names(ctx, g) for g in report.granules.members]}
    data['mode'] = report.mode
    verdicts = {}
    for prop, v in report.verdicts.items():
        entry = {'holds': v.holds}
        if v.families:
            entry['families'] = list(v.families)
        if v.witness is not None:
            entry['witness'] = [_names(ctx, x) for x in v.witness]
            if v.witness_family is not None:
                entry['witness_family'] = v.witness_family
        if v.note:
            entry['note'] = v.note
        verdicts[prop] = entry
    data['properties'] = verdicts
    if report.readings:
        data['readings'] = dict(report.readings)
    if terms:
        data['terms'] = [{'target': _names(ctx, t.target),
                          'term': None if t.term is None else t.term.format(ctx.universe),
                          **({'notice': t.notice} if t.notice else {})} for t in terms]
    data['admissible'] = report.admissible
    return data


def quotient_data(ctx: ModelContext, name: str, q: QuotientStructure) -> dict:
    data = _model_header(ctx, name)
    data['mode'] = q.mode
    data['count'] = len(q.classes)
    classes = []
    for p in q.classes:
        entry = p.to_dict(ctx)
        if q.mode == 'explicit':
            entry['members'] = len(members_of(ctx, p))
        classes.append(entry)
    data['classes'] = classes
    return data


def generalized_data(m: RYSModel, name: str, g: GeneralizedQuotient) -> dict:
    ctx = m.ctx
    data = _model_header(ctx, name)
    data['spec'] = g.spec.text
    data['equivalence'] = g.equivalence
    if g.equivalence_witness is not None:
        data['equivalence_witness'] = [_names(ctx, x) for x in g.equivalence_witness]
    data['count'] = g.class_count
    data['classes'] = [{'representative': _names(ctx, r), 'size': s}
                       for r, s in zip(g.representatives, g.sizes)]
    data['approximations'] = [
        {'symbol': a.symbol, 'well_defined': a.well_defined, 'injective': a.injective,
         'surjective': a.surjective,
         **({'witness': [_names(ctx, x) for x in a.witness]} if a.witness else {})}
        for a in g.approximations]
    reps = g.representatives
    data['operations'] = [
        {'name': o.name, 'verdict': o.verdict, 'mode': o.mode, 'defined_pairs': o.defined_pairs,
         'class_pairs': o.class_pairs,
         **({'unseen_pairs': o.unseen_pairs} if o.unseen_pairs else {}),
         **({'ill_defined': [[_names(ctx, reps[a]), _names(ctx, reps[b])] for a, b in o.ill_defined]}
            if o.ill_defined else {}),
         **({'witness': [[_names(ctx, x) for x in pair] for pair in o.witness]} if o.witness else {})}
        for o in g.operations]
    data['passed'] = g.ok
    return data


def cera_data(cera: CeraStructure, name: str, list_elements: bool = False) -> dict:
    ctx = cera.ctx
    data = _model_header(ctx, name)
    n1 = 1 << ctx.universe.size
    data['size'] = cera.size
    data['type1'] = n1
    data['type2'] = cera.size - n1
    data['constants'] = {k: e.to_dict(ctx) for k, e in cera.constants.items()}
    if list_elements:
        data['elements'] = [e.to_dict(ctx) for e in cera.elements()]
    return data


def crad_data(crad: CradStructure, name: str, report: CradReport) -> dict:
    data = _model_header(crad.cera.ctx, name)
    alg = crad.cera.algebra
    data['pairs'] = report.size
    data['carrier'] = report.carrier
    ops = []
    for op in report.operations:
        entry = {'name': op.name, 'tuples': op.tuples, 'defined': op.defined, 'inside': op.inside}
        if op.witness is not None:
            entry['witness'] = [[alg.describe(int(v)) for v in crad.pairs[k]] for k in op.witness]
        ops.append(entry)
    data['operations'] = ops
    data['note'] = report.note
    return data


def representation_data(result: RepresentationResult, name: str) -> dict:
    data = {'model': name}
    data.update(result.to_dict())
    return data
