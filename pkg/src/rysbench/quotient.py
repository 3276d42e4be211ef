"""
Rough equality and the quotient of the power set.

A rough-equality class is never stored as a member list.  It is represented
by its ``(lower, upper)`` pair of definable sets; a pair is *realizable* (the
approximation pair of at least one subset) exactly when every singleton block
inside ``upper`` is also inside ``lower``.  Blocks with two or more elements
have three states (outside, boundary, inside) and singleton blocks have two.

The second half of this module builds the generalized quotient of a rough
Y-system under a boolean combination of approximation equalities and checks
which operations survive the passage to classes.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from lark import Lark, Transformer, UnexpectedInput

from rysbench.errors import ConfigurationError, EmptyClassError
from rysbench.model import ModelContext, Subset, is_subset

if TYPE_CHECKING:
    from rysbench.rys import RYSModel

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Rough pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class RoughPair:
    lower: Subset
    upper: Subset
    realizable: bool = field(default=True, compare=False)

    def format(self, ctx: ModelContext) -> str:
        u = ctx.universe
        return f'({u.format(self.lower)}, {u.format(self.upper)})'

    def to_dict(self, ctx: ModelContext) -> dict:
        u = ctx.universe
        return {'lower': list(u.names(self.lower)), 'upper': list(u.names(self.upper))}


def is_realizable(ctx: ModelContext, lower: Subset, upper: Subset) -> bool:
    """Whether ``(lower, upper)`` is the approximation pair of some subset."""
    blocks = ctx.require_partition().blocks
    definable = all(b & lower in (0, b) and b & upper in (0, b) for b in blocks)
    singletons = ctx.partition.singletons
    return definable and is_subset(lower, upper) and (singletons & upper) & ~lower == 0


def make_pair(ctx: ModelContext, lower: Subset, upper: Subset) -> RoughPair:
    return RoughPair(lower, upper, is_realizable(ctx, lower, upper))


def pair_of(ctx: ModelContext, a: Subset) -> RoughPair:
    """The ``(A^l, A^u)`` pair naming the rough class of *a*."""
    blocks = ctx.require_partition().blocks
    lower = upper = 0
    for b in blocks:
        if b & a:
            upper |= b
            if b & a == b:
                lower |= b
    return RoughPair(lower, upper, True)


def _require_realizable(ctx: ModelContext, p: RoughPair) -> None:
    if not is_realizable(ctx, p.lower, p.upper):
        raise EmptyClassError(f'{p.format(ctx)} is not the approximation pair of any subset')


def members_of(ctx: ModelContext, p: RoughPair) -> tuple[Subset, ...]:
    """Every subset ``X`` with ``X^l = p.lower`` and ``X^u = p.upper``, in canonical order."""
    _require_realizable(ctx, p)
    ctx.require_exhaustive('listing class members')
    lower, upper = ctx.classical_arrays
    hits = np.flatnonzero((lower == p.lower) & (upper == p.upper))
    return tuple(hits.tolist())


def class_union(ctx: ModelContext, p: RoughPair) -> Subset:
    """Union of the members of the class of *p*; always ``p.upper``."""
    _require_realizable(ctx, p)
    return p.upper


def class_intersection(ctx: ModelContext, p: RoughPair) -> Subset:
    """Intersection of the members of the class of *p*; always ``p.lower``."""
    _require_realizable(ctx, p)
    return p.lower


def realizable_pairs(ctx: ModelContext) -> tuple[RoughPair, ...]:
    """All rough-equality classes in canonical ``(lower, upper)`` order."""
    states = []
    for b in ctx.require_partition().blocks:
        if b & (b - 1):
            states.append(((0, 0), (0, b), (b, b)))
        else:
            states.append(((0, 0), (b, b)))
    pairs = []
    for choice in itertools.product(*states):
        lower = upper = 0
        for lo, up in choice:
            lower |= lo
            upper |= up
        pairs.append(RoughPair(lower, upper, True))
    pairs.sort()
    return tuple(pairs)


# ---------------------------------------------------------------------------
# Pre-rough operations
# ---------------------------------------------------------------------------

def pre_rough_L(ctx: ModelContext, p: RoughPair) -> RoughPair:
    return RoughPair(p.lower, p.lower, True)


def pre_rough_M(ctx: ModelContext, p: RoughPair) -> RoughPair:
    return RoughPair(p.upper, p.upper, True)


def pre_rough_not(ctx: ModelContext, p: RoughPair) -> RoughPair:
    full = ctx.universe.full
    return make_pair(ctx, full & ~p.upper, full & ~p.lower)


def pre_rough_join(ctx: ModelContext, p: RoughPair, q: RoughPair) -> RoughPair:
    return make_pair(ctx, p.lower | q.lower, p.upper | q.upper)


def pre_rough_meet(ctx: ModelContext, p: RoughPair, q: RoughPair) -> RoughPair:
    return make_pair(ctx, p.lower & q.lower, p.upper & q.upper)


def pre_rough_imp(ctx: ModelContext, p: RoughPair, q: RoughPair) -> RoughPair:
    """``(¬Lp ⊔ Lq) ⊓ (L¬p ⊔ ¬L¬q)``, composed from the other operations."""
    L, nt = pre_rough_L, pre_rough_not
    left = pre_rough_join(ctx, nt(ctx, L(ctx, p)), L(ctx, q))
    right = pre_rough_join(ctx, L(ctx, nt(ctx, p)), nt(ctx, L(ctx, nt(ctx, q))))
    return pre_rough_meet(ctx, left, right)


# ---------------------------------------------------------------------------
# Quotient structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuotientStructure:
    context: ModelContext = field(repr=False)
    classes: tuple[RoughPair, ...]
    mode: str                                 # 'explicit' or 'symbolic'


def build_quotient(ctx: ModelContext, mode: str = 'symbolic') -> QuotientStructure:
    """Enumerate ``℘(S)/≈`` either from pairs or by grouping every subset."""
    if mode == 'symbolic':
        return QuotientStructure(ctx, realizable_pairs(ctx), mode)
    if mode != 'explicit':
        raise ConfigurationError(f'quotient mode must be explicit or symbolic, got {mode!r}')
    ctx.require_exhaustive('grouping all subsets by rough equality')
    lower, upper = ctx.classical_arrays
    keys = np.unique(lower * (ctx.universe.full + 1) + upper)
    width = ctx.universe.full + 1
    classes = tuple(RoughPair(int(k // width), int(k % width), True) for k in keys.tolist())
    return QuotientStructure(ctx, classes, mode)


# ---------------------------------------------------------------------------
# Rough-equality specs
# ---------------------------------------------------------------------------

_SPEC_GRAMMAR = r"""
    ?start: disj
    ?disj: conj ("or" conj)*
    ?conj: neg ("and" neg)*
    ?neg: "not" neg          -> negation
        | "(" disj ")"
        | atom
    atom: "x" "^" APPROX "=" "y" "^" APPROX
    APPROX: /[lu][0-9]*/
    %import common.WS
    %ignore WS
"""


@dataclass(frozen=True)
class Approximation:
    family: int
    side: str          # 'l' or 'u'

    @property
    def symbol(self) -> str:
        return f'{self.side}{self.family}'


@dataclass(frozen=True)
class RoughEqualitySpec:
    """A boolean combination of equalities ``x^p = y^p``.

    ``clauses`` is a nested tuple: ``('atom', Approximation)``,
    ``('and', a, b, ...)``, ``('or', a, b, ...)`` or ``('not', a)``.
    """
    clauses: tuple
    text: str = ''

    def atoms(self) -> tuple[Approximation, ...]:
        found: list[Approximation] = []

        def walk(node):
            if node[0] == 'atom':
                if node[1] not in found:
                    found.append(node[1])
            else:
                for child in node[1:]:
                    walk(child)
        walk(self.clauses)
        return tuple(found)

    @property
    def conjunctive(self) -> bool:
        """True when this rough equality is a plain conjunction of atoms."""
        node = self.clauses
        if node[0] == 'atom':
            return True
        return node[0] == 'and' and all(c[0] == 'atom' for c in node[1:])


class _SpecBuilder(Transformer):
    def __init__(self, primary: int):
        super().__init__()
        self.primary = primary

    def atom(self, children):
        left, right = (str(c) for c in children)
        if left != right:
            raise ConfigurationError(
                f'rough-equality atoms compare the same approximation on both sides, got x^{left} = y^{right}')
        side, digits = left[0], left[1:]
        return ('atom', Approximation(int(digits) if digits else self.primary, side))

    def conj(self, children):
        return ('and', *children)

    def disj(self, children):
        return ('or', *children)

    def negation(self, children):
        return ('not', children[0])


@lru_cache(maxsize=1)
def _spec_parser() -> Lark:
    return Lark(_SPEC_GRAMMAR, parser='lalr')


def parse_rough_equality(text: str, primary: int = 1) -> RoughEqualitySpec:
    """Parse ``x^l = y^l and x^u = y^u`` style specs.

    A bare ``l``/``u`` refers to the *primary* family; ``l2``/``u2`` to family 2.
    """
    try:
        tree = _spec_parser().parse(text)
    except UnexpectedInput as exc:
        raise ConfigurationError(
            f'cannot parse rough-equality spec {text!r} at column {exc.column}') from None
    from lark.exceptions import VisitError
    try:
        clauses = _SpecBuilder(primary).transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None
    return RoughEqualitySpec(clauses, text.strip())


# ---------------------------------------------------------------------------
# Generalized quotient
# ---------------------------------------------------------------------------

_EXHAUSTIVE_PAIRS_BOUND = 8


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # smaller root wins so that roots are canonical representatives
            if rx < ry:
                self.parent[ry] = rx
            else:
                self.parent[rx] = ry


@dataclass
class ApproximationVerdict:
    symbol: str
    well_defined: bool
    injective: bool
    surjective: bool
    witness: tuple[Subset, Subset] | None = None


@dataclass
class OperationVerdict:
    name: str
    verdict: str                       # 'total', 'partial', 'ill-defined' or 'unknown'
    mode: str
    defined_pairs: int
    class_pairs: int
    witness: tuple[tuple[Subset, Subset], tuple[Subset, Subset]] | None = None
    ill_defined: tuple[tuple[int, int], ...] = ()      # class-id pairs with several result classes
    unseen_pairs: int = 0
    sampled_pairs: frozenset[tuple[int, int]] = field(default=frozenset(), repr=False)

    def pair_verdict(self, a: int, b: int) -> str:
        """'defined', 'ill-defined' or 'unseen' for the class pair ``(a, b)``."""
        if (a, b) in self.ill_defined:
            return 'ill-defined'
        if self.unseen_pairs and (a, b) not in self.sampled_pairs:
            return 'unseen'
        return 'defined'


@dataclass
class GeneralizedQuotient:
    spec: RoughEqualitySpec
    class_ids: np.ndarray = field(repr=False)
    representatives: tuple[Subset, ...]
    sizes: tuple[int, ...]
    equivalence: bool
    equivalence_witness: tuple[Subset, ...] | None
    approximations: list[ApproximationVerdict]
    operations: list[OperationVerdict]

    @property
    def class_count(self) -> int:
        return len(self.representatives)

    @property
    def ok(self) -> bool:
        return self.equivalence and all(a.well_defined for a in self.approximations)


def _evaluate_spec(node, values: dict[Approximation, np.ndarray], x: np.ndarray, y: np.ndarray) -> np.ndarray:
    op = node[0]
    if op == 'atom':
        table = values[node[1]]
        return table[x] == table[y]
    if op == 'not':
        return ~_evaluate_spec(node[1], values, x, y)
    parts = [_evaluate_spec(child, values, x, y) for child in node[1:]]
    combine = np.logical_and if op == 'and' else np.logical_or
    out = parts[0]
    for part in parts[1:]:
        out = combine(out, part)
    return out


def _approximation_tables(rys: RYSModel) -> dict[Approximation, np.ndarray]:
    tables = {}
    for fam in rys.ctx.families:
        lower, upper = rys.ctx.arrays(fam.index)
        tables[Approximation(fam.index, 'l')] = lower
        tables[Approximation(fam.index, 'u')] = upper
    return tables


def _classes(rys: RYSModel, spec: RoughEqualitySpec, tables) -> tuple[np.ndarray, bool, tuple | None]:
    n = rys.size
    if spec.conjunctive:
        signature = np.stack([tables[a] for a in spec.atoms()], axis=1)
        _, first, inverse = np.unique(signature, axis=0, return_index=True, return_inverse=True)
        # relabel so that class ids follow the order of their least member
        order = np.argsort(first)
        rank = np.empty_like(order)
        rank[order] = np.arange(order.size)
        return rank[inverse.reshape(-1)], True, None

    if rys.ctx.universe.size > _EXHAUSTIVE_PAIRS_BOUND:
        raise ConfigurationError(
            'non-conjunctive rough-equality specs need the full pair relation; '
            f'|S| = {rys.ctx.universe.size} exceeds {_EXHAUSTIVE_PAIRS_BOUND}')
    idx = np.arange(n)
    rel = _evaluate_spec(spec.clauses, tables, idx[:, None], idx[None, :])
    witness = None
    refl = np.flatnonzero(~np.diag(rel))
    if refl.size:
        witness = (int(refl[0]),)
    else:
        asym = np.argwhere(rel & ~rel.T)
        if asym.size:
            witness = (int(asym[0][0]), int(asym[0][1]))
        else:
            # x R y, y R z, not x R z
            relf = rel.astype(np.int32)
            broken = np.argwhere(((relf @ relf) > 0) & ~rel)
            if broken.size:
                x, z = int(broken[0][0]), int(broken[0][1])
                y = int(np.flatnonzero(rel[x] & rel[:, z])[0])
                witness = (x, y, z)
    uf = _UnionFind(n)
    for x, y in np.argwhere(rel).tolist():
        uf.union(x, y)
    roots = np.array([uf.find(x) for x in range(n)])
    _, ids = np.unique(roots, return_inverse=True)
    return ids.reshape(-1), witness is None, witness


def generalized_quotient(rys: RYSModel, spec: RoughEqualitySpec | str,
                         sampled: bool | None = None) -> GeneralizedQuotient:
    """Quotient the carrier of *rys* by *spec* and test the induced operations."""
    ctx = rys.ctx
    if isinstance(spec, str):
        spec = parse_rough_equality(spec, ctx.primary.index)
    for a in spec.atoms():
        ctx.family(a.family)
    tables = _approximation_tables(rys)
    ids, equivalence, eq_witness = _classes(rys, spec, tables)
    if not equivalence:
        logger.warning('%r is not an equivalence; using the classes of its closure', spec.text)
    count = int(ids.max()) + 1
    elements = np.arange(rys.size)
    reps = np.full(count, rys.size, dtype=np.int64)
    np.minimum.at(reps, ids, elements)
    sizes = np.bincount(ids, minlength=count)
    w = np.asarray(rys.definables, dtype=np.int64)
    logger.info('quotient by %r has %d classes', spec.text, count)

    approximations = []
    for a in sorted(tables, key=lambda a: (a.family, a.side)):
        image = tables[a]
        moved = ids[image]
        bad = np.flatnonzero(moved != moved[reps[ids]])
        witness = (int(reps[ids[bad[0]]]), int(bad[0])) if bad.size else None
        values = image[reps]
        approximations.append(ApproximationVerdict(
            a.symbol, not bad.size,
            injective=np.unique(values).size == count,
            surjective=set(values.tolist()) == set(w.tolist()),
            witness=witness))

    exhaustive = ctx.universe.size <= _EXHAUSTIVE_PAIRS_BOUND if sampled is None else not sampled
    operations = [_induced_binary(rys, name, table, ids, reps, count, exhaustive)
                  for name, table in (('plus', rys.plus), ('times', rys.times))]
    return GeneralizedQuotient(spec, ids, tuple(reps.tolist()), tuple(sizes.tolist()),
                               equivalence, eq_witness, approximations, operations)


def _induced_binary(rys: RYSModel, name: str, table: np.ndarray, ids: np.ndarray,
                    reps: np.ndarray, count: int, exhaustive: bool) -> OperationVerdict:
    n = rys.size
    if exhaustive:
        xs, ys = np.divmod(np.arange(n * n, dtype=np.int64), n)
        mode = 'exhaustive'
    else:
        rng = np.random.default_rng(rys.ctx.settings.seed)
        m = rys.ctx.settings.samples
        xs = rng.integers(0, n, size=m)
        ys = rng.integers(0, n, size=m)
        # anchor every sampled class pair at its representatives
        xs = np.concatenate([reps[ids[xs]], xs])
        ys = np.concatenate([reps[ids[ys]], ys])
        mode = 'sampled'
    pair = ids[xs] * count + ids[ys]
    result = ids[table[xs, ys]]
    keys = np.unique(pair * count + result)
    seen_pairs, per_pair = np.unique(keys // count, return_counts=True)
    broken = seen_pairs[per_pair > 1]
    defined = int(seen_pairs.size - broken.size)
    total_pairs = count * count
    unseen = total_pairs - int(seen_pairs.size)
    witness = None
    if broken.size:
        first = int(broken[0])
        where = np.flatnonzero(pair == first)
        base = int(result[where[0]])
        other = where[np.flatnonzero(result[where] != base)[0]]
        witness = ((int(xs[where[0]]), int(ys[where[0]])), (int(xs[other]), int(ys[other])))
    if unseen:
        # unsampled class pairs leave totality open
        verdict = 'partial' if broken.size and defined else 'unknown'
    elif not broken.size:
        verdict = 'total'
    elif defined == 0:
        verdict = 'ill-defined'
    else:
        verdict = 'partial'
    ill = tuple((int(k // count), int(k % count)) for k in broken.tolist())
    seen = frozenset((int(k // count), int(k % count)) for k in seen_pairs.tolist()) if unseen else frozenset()
    return OperationVerdict(name, verdict, mode, defined, total_pairs, witness, ill, unseen, seen)

