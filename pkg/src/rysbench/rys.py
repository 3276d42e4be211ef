"""
Rough Y-systems over the power set of a finite universe.

The carrier of an :class:`RYSModel` is ``℘(S)``, indexed by subset mask.
Parthood is held as a boolean matrix ``P[x, y]`` ("x is part of y") and every
derived mereological predicate is computed from it with numpy:

* overlap ``O = Pᵀ·P > 0`` (witnesses ``z`` with ``P z x`` and ``P z y``)
* underlap ``U = P·Pᵀ > 0``
* proper part, overcrossing and proper overlap by elementwise logic.

In ``nonempty-witness`` mode the least element is removed from the witness
range of overlap.  The ι-described sum, product and difference are resolved by
comparing the column of the defining predicate against every candidate; the
outcome is a value, ``none`` or ``multiple``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from rysbench.config import MEREOLOGY_MODES
from rysbench.errors import BudgetExceededError, ConfigurationError
from rysbench.model import ModelContext, Subset

logger = logging.getLogger(__name__)

_EXHAUSTIVE_ASSOCIATIVITY = 8


@dataclass(frozen=True)
class RysSection:
    """Optional overrides for a rough Y-system, as read from a model file."""
    mode: str | None = None
    parthood: tuple[tuple[Subset, Subset], ...] | None = None
    plus: Mapping[tuple[Subset, Subset], Subset] | None = None
    times: Mapping[tuple[Subset, Subset], Subset] | None = None
    tilde: Mapping[Subset, Subset] | None = None
    one: Subset | None = None
    definables: tuple[Subset, ...] | None = None


@dataclass(frozen=True)
class IotaResult:
    """Outcome of a description ``ιz φ(z)``."""
    status: str                # 'unique', 'none' or 'multiple'
    value: Subset | None = None
    candidates: int = 0

    @property
    def defined(self) -> bool:
        return self.status == 'unique'


class RYSModel:
    """A finite rough Y-system on ``℘(S)``."""

    def __init__(self, ctx: ModelContext, section: RysSection | None = None, mode: str | None = None):
        section = section or RysSection()
        n = ctx.universe.size
        if n > ctx.settings.matrix_bound:
            raise BudgetExceededError(
                f'a rough Y-system on |S| = {n} needs {1 << n}x{1 << n} relation matrices; '
                f'the matrix bound is {ctx.settings.matrix_bound}')
        self.ctx = ctx
        self.mode = mode or section.mode or ctx.settings.mereology
        if self.mode not in MEREOLOGY_MODES:
            raise ConfigurationError(f'unknown mereology mode {self.mode!r}')
        size = 1 << n
        masks = np.arange(size, dtype=np.int64)
        full = ctx.universe.full

        if section.parthood is None:
            self.parthood = (masks[:, None] & ~masks[None, :]) == 0
            self.user_parthood = False
        else:
            self.parthood = np.zeros((size, size), dtype=bool)
            for x, y in section.parthood:
                self.parthood[x, y] = True
            self.user_parthood = True

        self.plus = _binary_table(masks, section.plus, np.bitwise_or, 'plus')
        self.times = _binary_table(masks, section.times, np.bitwise_and, 'times')
        self.tilde = full & ~masks
        if section.tilde is not None:
            missing = size - len(section.tilde)
            if missing:
                logger.warning('tilde table lists %d of %d elements; the rest use complement',
                               len(section.tilde), size)
            for x, z in section.tilde.items():
                self.tilde[x] = z
        self.one = full if section.one is None else section.one
        self.definables = ctx.definables if section.definables is None else tuple(sorted(section.definables))

    @property
    def size(self) -> int:
        return 1 << self.ctx.universe.size

    @property
    def elements(self) -> range:
        return range(self.size)

    def format(self, x: Subset) -> str:
        return self.ctx.universe.format(x)

    # -- mereology -----------------------------------------------------------

    @cached_property
    def bottom(self) -> Subset | None:
        """The least element under parthood, if there is one."""
        hits = np.flatnonzero(self.parthood.all(axis=1))
        return int(hits[0]) if hits.size else None

    @cached_property
    def overlap_matrix(self) -> np.ndarray:
        witnesses = self.parthood.astype(np.int32)
        if self.mode == 'nonempty-witness':
            if self.bottom is None:
                logger.warning('no least element under parthood; nonempty-witness mode excludes nothing')
            else:
                witnesses[self.bottom, :] = 0
        return (witnesses.T @ witnesses) > 0

    @cached_property
    def underlap_matrix(self) -> np.ndarray:
        p = self.parthood.astype(np.int32)
        return (p @ p.T) > 0

    @cached_property
    def proper_part_matrix(self) -> np.ndarray:
        return self.parthood & ~self.parthood.T

    @cached_property
    def overcross_matrix(self) -> np.ndarray:
        return self.overlap_matrix & ~self.parthood

    @cached_property
    def proper_overlap_matrix(self) -> np.ndarray:
        return self.overcross_matrix & self.overcross_matrix.T

    @cached_property
    def definable_mask(self) -> np.ndarray:
        out = np.zeros(self.size, dtype=bool)
        out[list(self.definables)] = True
        return out

    def __repr__(self) -> str:
        return f'RYSModel(size={self.size}, mode={self.mode!r}, families={[f.index for f in self.ctx.families]})'


def _binary_table(masks: np.ndarray, table: Mapping | None, default, name: str) -> np.ndarray:
    out = default.outer(masks, masks)
    if table is not None:
        missing = masks.size * masks.size - len(table)
        if missing:
            logger.warning('%s table lists %d of %d pairs; the rest use the default operation',
                           name, len(table), masks.size * masks.size)
        for (x, y), z in table.items():
            out[x, y] = z
    return out


def build_rys(ctx: ModelContext, section: RysSection | None = None, mode: str | None = None) -> RYSModel:
    return RYSModel(ctx, section, mode)


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------

def parthood(m: RYSModel, x: Subset, y: Subset) -> bool:
    return bool(m.parthood[x, y])


def overlap(m: RYSModel, x: Subset, y: Subset) -> bool:
    return bool(m.overlap_matrix[x, y])


def underlap(m: RYSModel, x: Subset, y: Subset) -> bool:
    return bool(m.underlap_matrix[x, y])


def proper_part(m: RYSModel, x: Subset, y: Subset) -> bool:
    return bool(m.proper_part_matrix[x, y])


def overcross(m: RYSModel, x: Subset, y: Subset) -> bool:
    return bool(m.overcross_matrix[x, y])


def proper_overlap(m: RYSModel, x: Subset, y: Subset) -> bool:
    return bool(m.proper_overlap_matrix[x, y])


# ---------------------------------------------------------------------------
# Descriptions
# ---------------------------------------------------------------------------

def _describe(columns: np.ndarray, target: np.ndarray) -> IotaResult:
    hits = np.flatnonzero((columns == target[:, None]).all(axis=0))
    if hits.size == 1:
        return IotaResult('unique', int(hits[0]), 1)
    return IotaResult('none' if hits.size == 0 else 'multiple', None, int(hits.size))


def mereo_sum(m: RYSModel, x: Subset, y: Subset) -> IotaResult:
    """``ιz ∀w (O w z ↔ O w x ∨ O w y)``."""
    o = m.overlap_matrix
    return _describe(o, o[:, x] | o[:, y])


def mereo_product(m: RYSModel, x: Subset, y: Subset) -> IotaResult:
    """``ιz ∀w (P w z ↔ P w x ∧ P w y)``."""
    p = m.parthood
    return _describe(p, p[:, x] & p[:, y])


def mereo_difference(m: RYSModel, x: Subset, y: Subset) -> IotaResult:
    """``ιz ∀w (P w z ↔ P w x ∧ ¬O w y)``."""
    p = m.parthood
    return _describe(p, p[:, x] & ~m.overlap_matrix[:, y])


def iota_table(m: RYSModel, which: str) -> tuple[np.ndarray, np.ndarray]:
    """Resolve a description for every ordered pair at once.

    Returns ``(value, count)`` arrays: ``value[x, y]`` is the unique element or
    -1, ``count[x, y]`` the number of candidates.
    """
    if which == 'sum':
        columns, right, combine = m.overlap_matrix, m.overlap_matrix, np.bitwise_or
    elif which == 'product':
        columns, right, combine = m.parthood, m.parthood, np.bitwise_and
    elif which == 'difference':
        columns, right, combine = m.parthood, ~m.overlap_matrix, np.bitwise_and
    else:
        raise ConfigurationError(f'unknown description {which!r}')
    # columns packed into byte strings so candidates are found by dictionary lookup
    packed = np.packbits(columns, axis=0).T
    index: dict[bytes, list[int]] = {}
    for z in range(m.size):
        index.setdefault(packed[z].tobytes(), []).append(z)
    left_packed = packed
    right_packed = np.packbits(right, axis=0).T
    value = np.full((m.size, m.size), -1, dtype=np.int64)
    count = np.zeros((m.size, m.size), dtype=np.int64)
    for x in range(m.size):
        targets = combine(left_packed[x][None, :], right_packed)
        for y in range(m.size):
            hits = index.get(targets[y].tobytes(), ())
            count[x, y] = len(hits)
            if len(hits) == 1:
                value[x, y] = hits[0]
    return value, count


# ---------------------------------------------------------------------------
# Supplementation
# ---------------------------------------------------------------------------

@dataclass
class SupplementationVerdict:
    name: str
    holds: bool
    checked: int
    counterexample: tuple[Subset, Subset] | None = None
    witness: tuple[Subset, Subset, Subset] | None = None   # (x, y, z) for the first premise pair


@dataclass
class SupplementationReport:
    mode: str
    strict: SupplementationVerdict
    weak: SupplementationVerdict
    note: str | None = None


def _supplementation(m: RYSModel, name: str, blocker: np.ndarray) -> SupplementationVerdict:
    p = m.parthood
    # candidate z rows; nonempty-witness mode never offers the least element
    candidates = p.copy()
    if m.mode == 'nonempty-witness' and m.bottom is not None:
        candidates[m.bottom, :] = False
    # reach[x, y]: some candidate z with P z x and not blocker[z, y]
    reach = candidates.T.astype(np.int32) @ (~blocker).astype(np.int32)
    premise = ~p
    failing = np.argwhere(premise & (reach == 0))
    checked = int(premise.sum())
    if failing.size:
        x, y = (int(v) for v in failing[0])
        return SupplementationVerdict(name, False, checked, counterexample=(x, y))
    first = np.argwhere(premise)
    witness = None
    if first.size:
        x, y = (int(v) for v in first[0])
        z = int(np.flatnonzero(candidates[:, x] & ~blocker[:, y])[0])
        witness = (x, y, z)
    return SupplementationVerdict(name, True, checked, witness=witness)


def supplementation_check(m: RYSModel) -> SupplementationReport:
    """Strict (``¬𝕆 z y``) and weak (``¬O z y``) supplementation in the active mode."""
    report = SupplementationReport(
        m.mode,
        strict=_supplementation(m, 'strict', m.proper_overlap_matrix),
        weak=_supplementation(m, 'weak', m.overlap_matrix),
    )
    if not m.user_parthood and report.strict.holds:
        report.note = ('parthood is ⊆ on ℘(S): z = x − y is a part of x that does not properly '
                       'overlap y whenever x ⊄ y, so strict supplementation holds here although '
                       'it is not expected of classical rough set theory')
    return report


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------

@dataclass
class AxiomResult:
    name: str
    holds: bool
    family: int | None = None
    counterexample: tuple[Subset, ...] | None = None
    note: str | None = None
    informational: bool = False


@dataclass
class AxiomReport:
    mode: str
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.results if not r.informational)

    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.holds and not r.informational]


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    if not hits.size:
        return None
    return tuple(int(v) for v in hits[0])


def _result(name: str, bad: np.ndarray, family: int | None = None, **kw) -> AxiomResult:
    witness = _first(bad)
    return AxiomResult(name, witness is None, family, witness, **kw)


def _associativity(m: RYSModel, name: str, table: np.ndarray) -> AxiomResult:
    size = m.size
    if m.ctx.universe.size <= _EXHAUSTIVE_ASSOCIATIVITY:
        for x in range(size):
            left = table[table[x][:, None], np.arange(size)[None, :]]
            right = table[x][table]
            bad = np.argwhere(left != right)
            if bad.size:
                return AxiomResult(f'{name}-associative', False, None,
                                   (x, int(bad[0][0]), int(bad[0][1])))
        return AxiomResult(f'{name}-associative', True)
    rng = np.random.default_rng(m.ctx.settings.seed)
    xs, ys, zs = rng.integers(0, size, size=(3, m.ctx.settings.samples))
    bad = np.flatnonzero(table[table[xs, ys], zs] != table[xs, table[ys, zs]])
    witness = None if not bad.size else (int(xs[bad[0]]), int(ys[bad[0]]), int(zs[bad[0]]))
    return AxiomResult(f'{name}-associative', witness is None, None, witness,
                       note=f'sampled {m.ctx.settings.samples} triples')


def check_rys_axioms(m: RYSModel) -> AxiomReport:
    """Check the rough Y-system axioms, associativity and signature agreement."""
    p = m.parthood
    size = m.size
    eye = np.eye(size, dtype=bool)
    report = AxiomReport(m.mode)
    out = report.results

    diag = np.flatnonzero(~np.diag(p))
    out.append(AxiomResult('reflexivity', not diag.size, None, (int(diag[0]),) if diag.size else None))
    out.append(_result('antisymmetry', p & p.T & ~eye))

    w = set(m.definables)
    for fam in m.ctx.families:
        i = fam.index
        lower, upper = m.ctx.arrays(i)
        image_l, image_u = set(lower.tolist()), set(upper.tolist())
        stray = sorted((image_l ^ w) | (image_u ^ w))
        out.append(AxiomResult('surjectivity-shared', not stray, i, (stray[0],) if stray else None,
                               note='l_i and u_i both onto the shared W'))
        own = set(m.ctx.definables_of(i))
        stray = sorted((image_l | image_u) ^ own)
        out.append(AxiomResult('surjectivity-per-family', not stray, i, (stray[0],) if stray else None,
                               note='image of l_i and u_i equals W_i'))

        out.append(_result('lower-monotone', p & ~p[np.ix_(lower, lower)], i))
        out.append(_result('upper-monotone', p & ~p[np.ix_(upper, upper)], i))

        xs = np.arange(size)
        contraction = ~p[lower, xs]
        expansion = ~p[xs, upper]
        out.append(_result('contraction', contraction, i))
        out.append(_result('expansion', expansion, i))

        collapse = p[upper, lower] & ~((xs == lower) & (lower == upper))
        out.append(_result('exactness', collapse, i))

        mixed = ~p[lower, upper[lower]] | ~p[lower[upper], upper]
        out.append(_result('mixed-idempotence', mixed, i))

    out.append(_associativity(m, 'plus', m.plus))
    out.append(_associativity(m, 'times', m.times))

    for which, table in (('sum', m.plus), ('product', m.times)):
        value, count = iota_table(m, which)
        bad = value != table
        witness = _first(bad)
        note = None
        if witness is not None:
            c = int(count[witness])
            note = 'description undefined: ' + ('none' if c == 0 else 'multiple')
            if c == 1:
                note = 'description resolves to a different element'
        out.append(AxiomResult(f'{which}-agreement', witness is None, None, witness,
                               note=note, informational=True))
    return report


def exactness_consequence(m: RYSModel, index: int) -> tuple[Subset, ...]:
    """Elements ``x`` with ``P (u_i x) (l_i x)``."""
    lower, upper = m.ctx.arrays(index)
    return tuple(np.flatnonzero(m.parthood[upper, lower]).tolist())

