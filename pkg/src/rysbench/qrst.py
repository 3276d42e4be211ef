"""
The typed universe ``Y = ℘(S) ∪ ℘(S)/≈`` and its hybrid operations.

Type-1 elements are subsets (masks), type-2 elements are rough classes
(:class:`~rysbench.quotient.RoughPair`).  The two copies of a definable set are
different elements.  Mixed cases of ``join``, ``meet``, ``rimp`` and ``rimpb``
are evaluated with the closed forms ``⋃ y = y.upper`` and ``⋂ y = y.lower``
instead of enumerating class members.

:class:`CeraStructure` enumerates ``Y`` lazily and materializes it as a
:class:`~rysbench.algebra.FiniteAlgebra` (all tables built with numpy) for
identity checking and isomorphism search.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from rysbench.algebra import BINARY_OPS, UNARY_OPS, UNDEFINED, FiniteAlgebra
from rysbench.errors import BudgetExceededError, ConfigurationError
from rysbench.model import ModelContext, Subset, realizable_count
from rysbench.quotient import (RoughPair, class_intersection, class_union, pair_of,
                               pre_rough_imp, pre_rough_join, pre_rough_L, pre_rough_M,
                               pre_rough_meet, pre_rough_not, realizable_pairs)

logger = logging.getLogger(__name__)

TAU1, TAU2 = 1, 2


@dataclass(frozen=True)
class TypedElement:
    tag: int
    payload: Subset | RoughPair

    def __post_init__(self):
        if self.tag == TAU1 and not isinstance(self.payload, int):
            raise ConfigurationError('type-1 elements carry a subset')
        if self.tag == TAU2 and not (isinstance(self.payload, RoughPair) and self.payload.realizable):
            raise ConfigurationError('type-2 elements carry a realizable rough pair')
        if self.tag not in (TAU1, TAU2):
            raise ConfigurationError(f'unknown tag {self.tag!r}')

    @property
    def sort_key(self) -> tuple[int, ...]:
        if self.tag == TAU1:
            return TAU1, self.payload, 0
        return TAU2, self.payload.lower, self.payload.upper

    def __lt__(self, other: TypedElement) -> bool:
        return self.sort_key < other.sort_key

    def to_dict(self, ctx: ModelContext) -> dict:
        u = ctx.universe
        if self.tag == TAU1:
            return {'tag': 't1', 'set': list(u.names(self.payload))}
        return {'tag': 't2', 'lower': list(u.names(self.payload.lower)),
                'upper': list(u.names(self.payload.upper))}

    def format(self, ctx: ModelContext) -> str:
        if self.tag == TAU1:
            return 'τ1 ' + ctx.universe.format(self.payload)
        return 'τ2 ' + self.payload.format(ctx)


def t1(mask: Subset) -> TypedElement:
    return TypedElement(TAU1, int(mask))


def t2(pair: RoughPair) -> TypedElement:
    return TypedElement(TAU2, pair)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def _bracket(ctx: ModelContext, a: Subset) -> TypedElement:
    return t2(pair_of(ctx, a))


def lup(ctx: ModelContext, e: TypedElement) -> TypedElement:
    """𝔏: lower approximation on type 1, L on type 2."""
    if e.tag == TAU1:
        return t1(pair_of(ctx, e.payload).lower)
    return t2(pre_rough_L(ctx, e.payload))


def bup(ctx: ModelContext, e: TypedElement) -> TypedElement:
    """■: upper approximation on type 1, ¬L¬ (= M) on type 2."""
    if e.tag == TAU1:
        return t1(pair_of(ctx, e.payload).upper)
    return t2(pre_rough_M(ctx, e.payload))


def snot(ctx: ModelContext, e: TypedElement) -> TypedElement:
    if e.tag == TAU1:
        return t1(ctx.universe.complement(e.payload))
    return t2(pre_rough_not(ctx, e.payload))


def rnot(ctx: ModelContext, e: TypedElement) -> TypedElement | None:
    """¬, defined on type-2 elements only."""
    if e.tag == TAU1:
        return None
    return t2(pre_rough_not(ctx, e.payload))


def join(ctx: ModelContext, x: TypedElement, y: TypedElement) -> TypedElement:
    if x.tag == TAU1 and y.tag == TAU1:
        return t1(x.payload | y.payload)
    if x.tag == TAU2 and y.tag == TAU2:
        return t2(pre_rough_join(ctx, x.payload, y.payload))
    if x.tag == TAU1:
        return _bracket(ctx, x.payload | class_union(ctx, y.payload))
    return _bracket(ctx, class_union(ctx, x.payload) | y.payload)


def meet(ctx: ModelContext, x: TypedElement, y: TypedElement) -> TypedElement:
    if x.tag == TAU1 and y.tag == TAU1:
        return t1(x.payload & y.payload)
    if x.tag == TAU2 and y.tag == TAU2:
        return t2(pre_rough_meet(ctx, x.payload, y.payload))
    if x.tag == TAU1:
        return _bracket(ctx, x.payload & class_intersection(ctx, y.payload))
    return _bracket(ctx, class_intersection(ctx, x.payload) & y.payload)


def _rimp_common(ctx: ModelContext, x: TypedElement, y: TypedElement) -> TypedElement:
    comp = ctx.universe.complement
    if x.tag == TAU2 and y.tag == TAU2:
        return t2(pre_rough_imp(ctx, x.payload, y.payload))
    if x.tag == TAU1:
        # ⋃ over z in y of (x ∪ zᶜ)
        return _bracket(ctx, x.payload | comp(class_intersection(ctx, y.payload)))
    return _bracket(ctx, class_union(ctx, x.payload) | comp(y.payload))


def rimp(ctx: ModelContext, x: TypedElement, y: TypedElement) -> TypedElement:
    """⇝: ``x ∪ yᶜ`` on two type-1 arguments."""
    if x.tag == TAU1 and y.tag == TAU1:
        return t1(x.payload | ctx.universe.complement(y.payload))
    return _rimp_common(ctx, x, y)


def rimpb(ctx: ModelContext, x: TypedElement, y: TypedElement) -> TypedElement:
    """↠: as ⇝ except that two type-1 arguments give the class of ``x ∪ yᶜ``."""
    if x.tag == TAU1 and y.tag == TAU1:
        return _bracket(ctx, x.payload | ctx.universe.complement(y.payload))
    return _rimp_common(ctx, x, y)


OPERATIONS = {
    'lup': lup, 'bup': bup, 'snot': snot, 'rnot': rnot,
    'join': join, 'meet': meet, 'rimp': rimp, 'rimpb': rimpb,
}


# ---------------------------------------------------------------------------
# CERA
# ---------------------------------------------------------------------------

class CeraStructure:
    """The concrete enriched pre-rough algebra on ``Y`` for a partition."""

    def __init__(self, ctx: ModelContext):
        partition = ctx.require_partition()
        self.ctx = ctx
        full = ctx.universe.full
        self.bot = t1(0)
        self.top = t1(full)
        self.zero = t2(RoughPair(0, 0, True))
        self.one = t2(RoughPair(full, full, True))
        self._shape = partition.shape

    @property
    def constants(self) -> dict[str, TypedElement]:
        return {'bot': self.bot, 'top': self.top, 'zero': self.zero, 'one': self.one}

    @property
    def size(self) -> int:
        return (1 << self.ctx.universe.size) + realizable_count(self._shape)

    def elements(self) -> Iterator[TypedElement]:
        """Carrier in canonical order: type 1 by mask, then type 2 by pair."""
        for mask in range(1 << self.ctx.universe.size):
            yield t1(mask)
        for pair in self.pairs:
            yield t2(pair)

    @cached_property
    def pairs(self) -> tuple[RoughPair, ...]:
        return realizable_pairs(self.ctx)

    @cached_property
    def _pair_position(self) -> dict[tuple[int, int], int]:
        return {(p.lower, p.upper): k for k, p in enumerate(self.pairs)}

    def index(self, e: TypedElement) -> int:
        if e.tag == TAU1:
            return e.payload
        return (1 << self.ctx.universe.size) + self._pair_position[(e.payload.lower, e.payload.upper)]

    def element(self, i: int) -> TypedElement:
        n1 = 1 << self.ctx.universe.size
        return t1(i) if i < n1 else t2(self.pairs[i - n1])

    @cached_property
    def algebra(self) -> FiniteAlgebra:
        """All seven operation tables, built with numpy."""
        ctx = self.ctx
        n = ctx.universe.size
        if n > ctx.settings.matrix_bound:
            raise BudgetExceededError(
                f'materializing the hybrid algebra on |S| = {n} exceeds the matrix bound '
                f'{ctx.settings.matrix_bound}')
        full = np.int64(ctx.universe.full)
        n1 = 1 << n
        lower_of, upper_of = ctx.classical_arrays
        pl = np.array([p.lower for p in self.pairs], dtype=np.int64)
        pu = np.array([p.upper for p in self.pairs], dtype=np.int64)
        position = np.full(1 << (2 * n), UNDEFINED, dtype=np.int64)
        position[(pl << n) | pu] = n1 + np.arange(pl.size)

        masks = np.arange(n1, dtype=np.int64)
        tags = np.concatenate([np.full(n1, 1), np.full(pl.size, 2)]).astype(np.int8)
        a = np.concatenate([masks, pl])
        b = np.concatenate([masks, pu])
        one = tags == 1

        def pair_at(lo, up):
            return position[(lo << n) | up]

        def bracket(z):
            return pair_at(lower_of[z], upper_of[z])

        def c(z):
            return full & ~z

        unary = {
            'lup': np.where(one, lower_of[a], pair_at(a, a)),
            'bup': np.where(one, upper_of[a], pair_at(b, b)),
            'snot': np.where(one, c(a), pair_at(c(b), c(a))),
        }
        unary['rnot'] = np.where(one, UNDEFINED, unary['snot'])

        ax, bx, ay, by = a[:, None], b[:, None], a[None, :], b[None, :]
        both1 = one[:, None] & one[None, :]
        both2 = ~one[:, None] & ~one[None, :]
        first1 = one[:, None] & ~one[None, :]

        def cases(c11, c22, c12, c21):
            return np.select([both1, both2, first1], [c11, c22, c12], default=c21)

        implication = (c(ax) | ay) & (c(bx) | by)
        mixed_imp_12 = bracket(ax | c(ay))
        mixed_imp_21 = bracket(bx | c(ay))
        binary = {
            'join': cases(ax | ay, pair_at(ax | ay, bx | by), bracket(ax | by), bracket(bx | ay)),
            'meet': cases(ax & ay, pair_at(ax & ay, bx & by), bracket(ax & ay), bracket(ax & ay)),
            'rimp': cases(ax | c(ay), pair_at(implication, implication), mixed_imp_12, mixed_imp_21),
            'rimpb': cases(bracket(ax | c(ay)), pair_at(implication, implication), mixed_imp_12, mixed_imp_21),
        }
        constants = {name: self.index(e) for name, e in self.constants.items()}
        descriptions = [e.to_dict(ctx) for e in self.elements()]
        logger.debug('materialized hybrid algebra with %d elements', tags.size)
        name = 'cera(' + ','.join(str(s) for s in self._shape) + ')'
        return FiniteAlgebra(name, tags, unary, binary, constants, descriptions)


def build_cera(ctx: ModelContext) -> CeraStructure:
    return CeraStructure(ctx)


def apply(cera: CeraStructure, op: str, *args: TypedElement) -> TypedElement | None:
    """Evaluate *op* on typed elements without materializing the algebra."""
    if op not in OPERATIONS:
        raise ConfigurationError(f'unknown operation {op!r}')
    return OPERATIONS[op](cera.ctx, *args)


# ---------------------------------------------------------------------------
# CRAD
# ---------------------------------------------------------------------------

CRAD_NOTE = ('operations on K are applied componentwise per coordinate; '
             'this is a reading of "similar extended operations"')


@dataclass
class CradStructure:
    cera: CeraStructure
    pairs: np.ndarray             # shape (|K|, 2), algebra indices

    @property
    def size(self) -> int:
        return int(self.pairs.shape[0])


def build_crad(cera: CeraStructure) -> CradStructure:
    """``K = {(x, [x]) : τ1 x} ∪ {([x], x) : τ1 x}``."""
    alg = cera.algebra
    n1 = 1 << cera.ctx.universe.size
    masks = np.arange(n1, dtype=np.int64)
    # [x] is the class reached from x by joining with the zero class
    classes = alg.binary['join'][masks, alg.constants['zero']]
    first = np.stack([masks, classes], axis=1)
    second = np.stack([classes, masks], axis=1)
    return CradStructure(cera, np.concatenate([first, second]))


@dataclass
class CradOperation:
    name: str
    tuples: int
    defined: int
    inside: int
    witness: tuple[int, ...] | None = None


@dataclass
class CradReport:
    size: int
    carrier: int
    operations: list[CradOperation]
    note: str = CRAD_NOTE


def crad_info(crad: CradStructure) -> CradReport:
    """Count, per operation, the argument tuples defined componentwise and those staying in K."""
    alg = crad.cera.algebra
    size = alg.size
    keys = crad.pairs[:, 0] * size + crad.pairs[:, 1]
    operations = []
    for op in UNARY_OPS:
        table = alg.unary[op]
        left, right = table[crad.pairs[:, 0]], table[crad.pairs[:, 1]]
        operations.append(_crad_counts(op, left, right, keys, size, lambda k: (k,)))
    k = crad.size
    for op in BINARY_OPS:
        table = alg.binary[op]
        p, q = crad.pairs[:, None, :], crad.pairs[None, :, :]
        left = table[p[..., 0], q[..., 0]].ravel()
        right = table[p[..., 1], q[..., 1]].ravel()
        operations.append(_crad_counts(op, left, right, keys, size, lambda f: divmod(f, k)))
    return CradReport(crad.size, crad.cera.size, operations)


def _crad_counts(name, left, right, keys, size, unflatten) -> CradOperation:
    defined = (left >= 0) & (right >= 0)
    inside = defined & np.isin(left * size + right, keys)
    leaving = np.flatnonzero(defined & ~inside)
    witness = tuple(int(v) for v in unflatten(int(leaving[0]))) if leaving.size else None
    return CradOperation(name, int(left.size), int(defined.sum()), int(inside.sum()), witness)
