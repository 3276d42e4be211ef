"""
Granule properties and admissibility.

A candidate granule collection is checked against twelve properties, each
evaluated per operator family and then quantified over the families (``∀i``
for RA, WRA, ACG, AS; ``∃i`` for the rest, NO being family-free).  Every check
is a vectorized scan over the relation matrices of the :class:`RYSModel`.

Term functions for WRA are searched breadth first: the closure of the granules
under ``+`` (pure sums, the empty sum being the least element) and then
``max_depth`` rounds of ``+``, ``·`` and ``∼`` limited to ``max_width`` granule
leaves per term.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from rysbench.errors import ConfigurationError
from rysbench.model import Subset, Universe
from rysbench.rys import RYSModel

logger = logging.getLogger(__name__)

PROPERTIES = ('RA', 'WRA', 'ACG', 'WCG', 'MER', 'LS', 'US', 'ST', 'AS', 'NO', 'FU', 'UU')
LABELS = ('initial', 'refined', 'unlabeled')


@dataclass(frozen=True)
class GranuleSet:
    name: str
    members: tuple[Subset, ...]
    label: str = 'unlabeled'

    @classmethod
    def of(cls, name: str, members: Iterable[Subset], label: str = 'unlabeled') -> GranuleSet:
        unique = tuple(sorted(set(members)))
        if not unique:
            raise ConfigurationError(f'granule set {name!r} is empty')
        if label not in LABELS:
            raise ConfigurationError(f'granule label must be one of {", ".join(LABELS)}, got {label!r}')
        return cls(name, unique, label)


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TermExpr:
    """A term over granules built with ``+``, ``·`` and ``∼``."""
    op: str                                  # 'empty', 'granule', '+', '·', '∼'
    args: tuple[TermExpr, ...] = ()
    granule: Subset | None = None

    @cached_property
    def depth(self) -> int:
        return 0 if not self.args else 1 + max(a.depth for a in self.args)

    @cached_property
    def leaves(self) -> int:
        if self.op == 'granule':
            return 1
        return sum(a.leaves for a in self.args)

    def evaluate(self, m: RYSModel) -> Subset:
        if self.op == 'empty':
            return 0
        if self.op == 'granule':
            return self.granule
        if self.op == '∼':
            return int(m.tilde[self.args[0].evaluate(m)])
        table = m.plus if self.op == '+' else m.times
        return int(table[self.args[0].evaluate(m), self.args[1].evaluate(m)])

    def format(self, universe: Universe) -> str:
        if self.op == 'empty':
            return '(empty sum)'
        if self.op == 'granule':
            return universe.format(self.granule)
        if self.op == '∼':
            return '∼' + self.args[0].format(universe)
        return f'({self.args[0].format(universe)} {self.op} {self.args[1].format(universe)})'


@dataclass
class TermSearch:
    """Values reachable from a granule set, each with its first term."""
    sums: dict[Subset, TermExpr]
    terms: dict[Subset, TermExpr]
    depth: int
    width: int


def _sum_closure(m: RYSModel, granules: tuple[Subset, ...]) -> dict[Subset, TermExpr]:
    found: dict[Subset, TermExpr] = {0: TermExpr('empty')}
    frontier = []
    for g in granules:
        if g not in found:
            found[g] = TermExpr('granule', granule=g)
            frontier.append(g)
    while frontier:
        fresh = []
        for v in frontier:
            for g in granules:
                z = int(m.plus[v, g])
                if z not in found:
                    found[z] = TermExpr('+', (found[v], TermExpr('granule', granule=g)))
                    fresh.append(z)
        frontier = sorted(fresh)
    return found


def search_terms(m: RYSModel, granules: tuple[Subset, ...], depth: int | None = None,
                 width: int | None = None) -> TermSearch:
    settings = m.ctx.settings
    depth = settings.max_depth if depth is None else depth
    width = (settings.max_width or len(granules)) if width is None else width
    sums = _sum_closure(m, granules)
    terms = dict(sums)
    for round_ in range(depth):
        values = np.array(sorted(terms), dtype=np.int64)
        leaves = np.array([terms[v].leaves for v in values.tolist()], dtype=np.int64)
        fresh: dict[Subset, TermExpr] = {}
        for v, z in zip(values.tolist(), m.tilde[values].tolist()):
            if z not in terms and z not in fresh:
                fresh[z] = TermExpr('∼', (terms[v],))
        fits = (leaves[:, None] + leaves[None, :]) <= width
        for symbol, table in (('+', m.plus), ('·', m.times)):
            results = table[np.ix_(values, values)]
            flat = np.where(fits, results, -1).ravel()
            uniq, first = np.unique(flat, return_index=True)
            for z, pos in zip(uniq.tolist(), first.tolist()):
                if z < 0 or z in terms or z in fresh:
                    continue
                i, j = divmod(pos, values.size)
                fresh[z] = TermExpr(symbol, (terms[int(values[i])], terms[int(values[j])]))
        logger.debug('term search round %d: %d new value(s)', round_ + 1, len(fresh))
        if not fresh:
            break
        terms.update(fresh)
    return TermSearch(sums, terms, depth, width)


@dataclass
class TermSearchOutcome:
    target: Subset
    term: TermExpr | None
    exhausted: bool
    notice: str | None = None


def wra_term_search(m: RYSModel, granules: GranuleSet, target: Subset, family: int | None = None,
                    side: str = 'l') -> TermSearchOutcome:
    """Find a term over *granules* evaluating to *target*.

    With *family* given the target is first replaced by its ``l_i`` (or
    ``u_i`` for ``side='u'``) approximation.  A missing term only means that
    nothing was found within the depth and width bounds.
    """
    if family is not None:
        lower, upper = m.ctx.arrays(family)
        target = int((lower if side == 'l' else upper)[target])
    search = search_terms(m, granules.members)
    term = search.sums.get(target) or search.terms.get(target)
    if term is not None:
        return TermSearchOutcome(target, term, False)
    notice = (f'no term within depth {search.depth} and width {search.width}; '
              'this is bounded exhaustion, not a refutation')
    return TermSearchOutcome(target, None, True, notice)


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------

@dataclass
class PropertyVerdict:
    name: str
    holds: bool
    families: tuple[int, ...] = ()           # families on which the per-family form holds
    witness: tuple[Subset, ...] | None = None
    witness_family: int | None = None
    note: str | None = None


@dataclass
class GranuleReport:
    granules: GranuleSet
    mode: str
    verdicts: dict[str, PropertyVerdict] = field(default_factory=dict)
    readings: dict[str, bool | None] = field(default_factory=dict)

    @property
    def admissible(self) -> bool:
        return all(self.verdicts[p].holds for p in ('WRA', 'LS', 'FU'))

    def profile(self) -> dict[str, bool]:
        return {name: v.holds for name, v in self.verdicts.items()}


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    return None if not hits.size else tuple(int(v) for v in hits[0])


class _Evaluator:
    """Per-family checks for one (model, granule set) pair."""

    def __init__(self, m: RYSModel, granules: GranuleSet):
        self.m = m
        self.g = np.asarray(granules.members, dtype=np.int64)
        self.granules = granules
        self.families = tuple(f.index for f in m.ctx.families)

    def tables(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self.m.ctx.arrays(i)

    def definable(self, i: int) -> np.ndarray:
        lower, upper = self.tables(i)
        masks = np.arange(self.m.size)
        return (lower == masks) & (upper == masks)

    @cached_property
    def search(self) -> TermSearch:
        return search_terms(self.m, self.granules.members)

    def _representation(self, i: int, reachable: Iterable[Subset]) -> tuple[Subset, ...] | None:
        ok = np.zeros(self.m.size, dtype=bool)
        ok[list(reachable)] = True
        lower, upper = self.tables(i)
        bad = ~ok[lower] | ~ok[upper]
        hit = np.flatnonzero(bad)
        return None if not hit.size else (int(hit[0]),)

    # each per-family check returns None when it holds, otherwise a witness

    def ra(self, i):
        return self._representation(i, self.search.sums)

    def wra(self, i):
        return self._representation(i, self.search.terms)

    def crisp(self, i):
        lower, upper = self.tables(i)
        bad = (lower[self.g] != self.g) | (upper[self.g] != self.g)
        hit = np.flatnonzero(bad)
        return None if not hit.size else (int(self.g[hit[0]]),)

    def mer(self, i):
        p = self.m.parthood
        candidates = self.definable(i).copy()
        if self.m.mode == 'nonempty-witness' and self.m.bottom is not None:
            candidates[self.m.bottom] = False
        xs = np.arange(self.m.size)
        bad = p[:, self.g].T & candidates[None, :] & (xs[None, :] != self.g[:, None])
        hit = _first(bad)
        return None if hit is None else (int(self.g[hit[0]]), hit[1])

    def ls(self, i):
        p = self.m.parthood
        lower, _ = self.tables(i)
        bad = p[self.g] & ~p[self.g][:, lower]
        hit = _first(bad)
        return None if hit is None else (int(self.g[hit[0]]), hit[1])

    def us(self, i):
        p, o = self.m.parthood, self.m.overlap_matrix
        _, upper = self.tables(i)
        bad = o[self.g] & ~p[self.g][:, upper]
        hit = _first(bad)
        return None if hit is None else (int(self.g[hit[0]]), hit[1])

    def st(self, i):
        return self.ls(i) or self.us(i)

    def common_supersets(self, i) -> np.ndarray:
        pp = self.m.proper_part_matrix[self.g]
        return pp[:, None, :] & pp[None, :, :] & self.definable(i)[None, None, :]

    def fu(self, i):
        common = self.common_supersets(i)
        hit = _first(~common.any(axis=2))
        return None if hit is None else (int(self.g[hit[0]]), int(self.g[hit[1]]))

    def uu(self, i):
        common = self.common_supersets(i)
        hit = _first(common.sum(axis=2) > 1)
        if hit is None:
            return None
        a, b = hit
        z, w = np.flatnonzero(common[a, b])[:2].tolist()
        return int(self.g[a]), int(self.g[b]), z, w

    def no(self):
        po = self.m.proper_overlap_matrix[np.ix_(self.g, self.g)]
        hit = _first(po)
        return None if hit is None else (int(self.g[hit[0]]), int(self.g[hit[1]]))


_PER_FAMILY = {
    'RA': ('ra', all), 'WRA': ('wra', all), 'ACG': ('crisp', all), 'WCG': ('crisp', any),
    'MER': ('mer', any), 'LS': ('ls', any), 'US': ('us', any), 'FU': ('fu', any),
    'UU': ('uu', any), 'AS': ('st', all),
}


def _quantified(ev: _Evaluator, name: str) -> PropertyVerdict:
    method, quantifier = _PER_FAMILY[name]
    witnesses = {i: getattr(ev, method)(i) for i in ev.families}
    good = tuple(i for i, w in witnesses.items() if w is None)
    holds = quantifier(w is None for w in witnesses.values())
    verdict = PropertyVerdict(name, holds, good)
    if not holds:
        bad = next(i for i in ev.families if witnesses[i] is not None)
        verdict.witness, verdict.witness_family = witnesses[bad], bad
    if name == 'WRA' and not holds:
        verdict.note = (f'no term within depth {ev.search.depth} and width {ev.search.width}; '
                        'bounded exhaustion')
    return verdict


def _evaluate(ev: _Evaluator, name: str, done: dict[str, PropertyVerdict]) -> PropertyVerdict:
    if name in done:
        return done[name]
    if name == 'NO':
        witness = ev.no()
        verdict = PropertyVerdict(name, witness is None, ev.families, witness)
    elif name == 'ST':
        ls, us = _evaluate(ev, 'LS', done), _evaluate(ev, 'US', done)
        verdict = PropertyVerdict(name, ls.holds and us.holds,
                                  tuple(i for i in ls.families if i in us.families))
        if not verdict.holds:
            failed = ls if not ls.holds else us
            verdict.witness, verdict.witness_family = failed.witness, failed.witness_family
            verdict.note = f'{failed.name} fails'
    else:
        verdict = _quantified(ev, name)
    done[name] = verdict
    return verdict


def check_property(m: RYSModel, granules: GranuleSet, prop: str) -> PropertyVerdict:
    """Evaluate one named granule property."""
    name = prop.upper()
    if name not in PROPERTIES:
        raise ConfigurationError(f'unknown granule property {prop!r}; expected one of {", ".join(PROPERTIES)}')
    return _evaluate(_Evaluator(m, granules), name, {})


def check_admissible(m: RYSModel, granules: GranuleSet,
                     properties: Iterable[str] | None = None) -> GranuleReport:
    """Full property profile plus the admissibility flag (WRA, LS and FU)."""
    ev = _Evaluator(m, granules)
    done: dict[str, PropertyVerdict] = {}
    wanted = [p.upper() for p in properties] if properties else list(PROPERTIES)
    for name in wanted:
        if name not in PROPERTIES:
            raise ConfigurationError(f'unknown granule property {name!r}')
    for name in ('WRA', 'LS', 'FU'):
        _evaluate(ev, name, done)
    report = GranuleReport(granules, m.mode)
    for name in PROPERTIES:
        if name in wanted or name in ('WRA', 'LS', 'FU'):
            report.verdicts[name] = _evaluate(ev, name, done)

    if 'UU' in report.verdicts:
        fu = report.verdicts['FU']
        uu = report.verdicts['UU']
        fu_family = fu.families[0] if fu.families else None
        report.readings = {
            'UU:any-family': uu.holds,
            'UU:fu-family': None if fu_family is None else fu_family in uu.families,
        }
    logger.info('granules %r: admissible=%s', granules.name, report.admissible)
    return report
