"""
Finite universes, subsets, partitions, covers and approximation operators.

Subsets are plain ``int`` bitmasks over an ordered :class:`Universe`: bit *k*
is set when the *k*-th element is a member.  The ordering of the ``universe``
array in the model file therefore fixes the canonical encoding, and "canonical
order" of subsets everywhere in rysbench is the order of their mask values.

Approximation operators come in operator families ``(l_i, u_i)``.  For
exhaustive work each family is materialized once as a pair of numpy tables
indexed by mask; single lookups on large universes fall back to evaluating the
defining formula directly.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from rysbench.config import Settings
from rysbench.errors import BudgetExceededError, ConfigurationError

logger = logging.getLogger(__name__)

Subset = int


# ---------------------------------------------------------------------------
# Bit helpers
# ---------------------------------------------------------------------------

def iter_bits(mask: Subset) -> Iterator[int]:
    """Yield the positions of the set bits of *mask*, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def is_subset(a: Subset, b: Subset) -> bool:
    return a & ~b == 0


# ---------------------------------------------------------------------------
# Universe, partition, cover
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Universe:
    """An ordered finite set of distinct, nonempty atom names."""
    elements: tuple[str, ...]

    def __post_init__(self):
        if not self.elements:
            raise ConfigurationError('a universe needs at least one element')
        for name in self.elements:
            if not isinstance(name, str) or not name:
                raise ConfigurationError(f'element names must be nonempty strings, got {name!r}')
        if len(set(self.elements)) != len(self.elements):
            dupes = sorted({e for e in self.elements if self.elements.count(e) > 1})
            raise ConfigurationError(f'duplicate element name(s): {", ".join(dupes)}')

    @classmethod
    def of(cls, names: Iterable[str]) -> Universe:
        return cls(tuple(names))

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def full(self) -> Subset:
        return (1 << self.size) - 1

    @cached_property
    def _position(self) -> dict[str, int]:
        return {name: k for k, name in enumerate(self.elements)}

    def subset(self, names: Iterable[str]) -> Subset:
        """Encode *names* as a mask; unknown names are a configuration error."""
        mask = 0
        for name in names:
            try:
                mask |= 1 << self._position[name]
            except KeyError:
                raise ConfigurationError(f'{name!r} is not an element of the universe') from None
        return mask

    def names(self, mask: Subset) -> tuple[str, ...]:
        """Decode *mask* into element names in canonical order."""
        return tuple(self.elements[k] for k in iter_bits(mask))

    def format(self, mask: Subset) -> str:
        return '{' + ','.join(self.names(mask)) + '}'

    def complement(self, mask: Subset) -> Subset:
        return self.full & ~mask

    def all_subsets(self) -> range:
        return range(1 << self.size)


@dataclass(frozen=True)
class Partition:
    """Pairwise-disjoint nonempty blocks covering the universe."""
    blocks: tuple[Subset, ...]

    @classmethod
    def of(cls, universe: Universe, blocks: Iterable[Subset]) -> Partition:
        seen = 0
        checked: list[Subset] = []
        for block in blocks:
            if block == 0:
                raise ConfigurationError('partition blocks must be nonempty')
            if block & seen:
                raise ConfigurationError(
                    f'partition blocks overlap on {universe.format(block & seen)}')
            seen |= block
            checked.append(block)
        if seen != universe.full:
            raise ConfigurationError(
                f'partition does not cover {universe.format(universe.full & ~seen)}')
        # canonical: ordered by lowest member
        checked.sort(key=lambda b: b & -b)
        return cls(tuple(checked))

    @cached_property
    def singletons(self) -> Subset:
        """Union of the one-element blocks."""
        mask = 0
        for block in self.blocks:
            if block & (block - 1) == 0:
                mask |= block
        return mask

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(sorted((b.bit_count() for b in self.blocks), reverse=True))


@dataclass(frozen=True)
class Cover:
    """A named collection of nonempty subsets whose union is the universe."""
    name: str
    members: tuple[Subset, ...]

    @classmethod
    def of(cls, universe: Universe, name: str, members: Iterable[Subset]) -> Cover:
        unique = sorted(set(members))
        if not name:
            raise ConfigurationError('covers need a name')
        if not unique or 0 in unique:
            raise ConfigurationError(f'cover {name!r} members must be nonempty')
        union = 0
        for member in unique:
            union |= member
        if union != universe.full:
            raise ConfigurationError(
                f'cover {name!r} does not cover {universe.format(universe.full & ~union)}')
        return cls(name, tuple(unique))


# ---------------------------------------------------------------------------
# Granular approximation formulas
# ---------------------------------------------------------------------------

def granular_lower(members: Sequence[Subset], mask: Subset) -> Subset:
    """Union of the *members* contained in *mask*."""
    out = 0
    for g in members:
        if g & mask == g:
            out |= g
    return out


def granular_upper(members: Sequence[Subset], mask: Subset) -> Subset:
    """Union of the *members* meeting *mask*."""
    out = 0
    for g in members:
        if g & mask:
            out |= g
    return out


def _lower_array(size: int, members: Sequence[Subset]) -> np.ndarray:
    masks = np.arange(1 << size, dtype=np.int64)
    out = np.zeros_like(masks)
    for g in members:
        out |= np.where((masks & g) == g, np.int64(g), np.int64(0))
    return out


def _upper_array(size: int, members: Sequence[Subset]) -> np.ndarray:
    masks = np.arange(1 << size, dtype=np.int64)
    out = np.zeros_like(masks)
    for g in members:
        out |= np.where((masks & g) != 0, np.int64(g), np.int64(0))
    return out


# ---------------------------------------------------------------------------
# Operator families
# ---------------------------------------------------------------------------

class FamilyKind(str, enum.Enum):
    PARTITION_CLASSICAL = 'partition-classical'
    COVER_STANDARD = 'cover-standard'
    COVER_DUAL = 'cover-dual'
    USER_TABLE = 'user-table'


@dataclass(frozen=True)
class OperatorFamily:
    """An indexed pair ``(l_i, u_i)`` of total maps on subsets."""
    index: int
    kind: FamilyKind
    lower: Callable[[Subset], Subset] = field(repr=False, compare=False)
    upper: Callable[[Subset], Subset] = field(repr=False, compare=False)
    cover: str | None = None

    @property
    def symbols(self) -> tuple[str, str]:
        return f'l{self.index}', f'u{self.index}'


@dataclass(frozen=True)
class FamilySpec:
    """Declarative description of a family, as read from a model file."""
    index: int
    kind: FamilyKind
    cover: str | None = None
    lower_table: Mapping[Subset, Subset] | None = None
    upper_table: Mapping[Subset, Subset] | None = None


# ---------------------------------------------------------------------------
# Model context
# ---------------------------------------------------------------------------

class ModelContext:
    """A universe with its partition and covers plus the derived families.

    The first family is the primary one; ``definables`` (the collection W) is
    computed from it.
    """

    def __init__(self, universe: Universe, partition: Partition | None = None,
                 covers: Iterable[Cover] = (), families: Iterable[OperatorFamily | FamilySpec] = (),
                 settings: Settings | None = None):
        self.settings = settings or Settings()
        if universe.size > self.settings.max_universe:
            raise ConfigurationError(
                f'universe has {universe.size} elements; the size guard is '
                f'{self.settings.max_universe} (override with RYS_MAX_UNIVERSE)')
        self.universe = universe
        self.partition = partition
        self.covers = tuple(covers)
        names = [c.name for c in self.covers]
        if len(set(names)) != len(names):
            raise ConfigurationError('cover names must be unique')

        built: list[OperatorFamily] = []
        for fam in families:
            built.append(fam if isinstance(fam, OperatorFamily) else self._build_family(fam))
        if not built:
            if partition is None:
                raise ConfigurationError('a model needs a partition or at least one operator family')
            built.append(self._build_family(FamilySpec(1, FamilyKind.PARTITION_CLASSICAL)))
        indices = [f.index for f in built]
        if len(set(indices)) != len(indices):
            raise ConfigurationError(f'duplicate family index in {indices}')
        self.families: tuple[OperatorFamily, ...] = tuple(built)
        self._arrays: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._tables: dict[int, tuple[list[int], list[int]]] = {}

    # -- construction helpers ---------------------------------------------

    @classmethod
    def from_blocks(cls, elements: Iterable[str], blocks: Iterable[Iterable[str]],
                    settings: Settings | None = None) -> ModelContext:
        """Build a model with one classical family from element-name blocks."""
        universe = Universe.of(elements)
        partition = Partition.of(universe, (universe.subset(b) for b in blocks))
        return cls(universe, partition, settings=settings)

    @classmethod
    def from_shape(cls, shape: Sequence[int], settings: Settings | None = None) -> ModelContext:
        """Build the canonical model whose blocks have the sizes in *shape*."""
        names = [f'x{k}' for k in range(sum(shape))]
        blocks, start = [], 0
        for size in shape:
            blocks.append(names[start:start + size])
            start += size
        return cls.from_blocks(names, blocks, settings=settings)

    def _build_family(self, spec: FamilySpec) -> OperatorFamily:
        kind = FamilyKind(spec.kind)
        if kind is FamilyKind.PARTITION_CLASSICAL:
            if self.partition is None:
                raise ConfigurationError(f'family {spec.index} is partition-classical but the model has no partition')
            blocks = self.partition.blocks
            return OperatorFamily(spec.index, kind,
                                  lambda a: granular_lower(blocks, a),
                                  lambda a: granular_upper(blocks, a))
        if kind in (FamilyKind.COVER_STANDARD, FamilyKind.COVER_DUAL):
            if spec.cover is None:
                raise ConfigurationError(f'family {spec.index} of kind {kind.value} needs a cover')
            members = self.cover(spec.cover).members
            if kind is FamilyKind.COVER_STANDARD:
                upper = lambda a: granular_upper(members, a)  # noqa: E731
            else:
                full = self.universe.full
                upper = lambda a: full & ~granular_lower(members, full & ~a)  # noqa: E731
            return OperatorFamily(spec.index, kind, lambda a: granular_lower(members, a), upper,
                                  cover=spec.cover)
        lower_table = dict(spec.lower_table or {})
        upper_table = dict(spec.upper_table or {})
        missing = (1 << self.universe.size) - min(len(lower_table), len(upper_table))
        if missing > 0:
            logger.warning('family %d: %d subset(s) missing from its tables map to themselves',
                           spec.index, missing)
        return OperatorFamily(spec.index, kind,
                              lambda a: lower_table.get(a, a),
                              lambda a: upper_table.get(a, a))

    # -- lookups -------------------------------------------------------------

    @property
    def primary(self) -> OperatorFamily:
        return self.families[0]

    def family(self, index: int) -> OperatorFamily:
        for fam in self.families:
            if fam.index == index:
                return fam
        raise ConfigurationError(f'no operator family with index {index}')

    def cover(self, name: str) -> Cover:
        for cover in self.covers:
            if cover.name == name:
                return cover
        raise ConfigurationError(f'no cover named {name!r}')

    def require_partition(self) -> Partition:
        if self.partition is None:
            raise ConfigurationError('this operation needs a partition but the model has none')
        return self.partition

    def exhaustive(self, bound: int | None = None) -> bool:
        """Whether all 2^|S| subsets may be scanned under *bound*."""
        return self.universe.size <= (self.settings.exhaustive_bound if bound is None else bound)

    def require_exhaustive(self, what: str, bound: int | None = None) -> None:
        if not self.exhaustive(bound):
            limit = self.settings.exhaustive_bound if bound is None else bound
            raise BudgetExceededError(
                f'{what} enumerates all subsets; |S| = {self.universe.size} exceeds the '
                f'exhaustive bound {limit} (use sampled mode)')

    # -- tables ----------------------------------------------------------------

    def arrays(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(lower, upper)`` numpy tables of family *index*, indexed by mask."""
        if index not in self._arrays:
            fam = self.family(index)
            self.require_exhaustive(f'tabulating family {index}')
            size = self.universe.size
            logger.debug('tabulating family %d (%s) over %d subsets', index, fam.kind.value, 1 << size)
            if fam.kind is FamilyKind.PARTITION_CLASSICAL:
                blocks = self.require_partition().blocks
                lower, upper = _lower_array(size, blocks), _upper_array(size, blocks)
            elif fam.kind in (FamilyKind.COVER_STANDARD, FamilyKind.COVER_DUAL):
                members = self.cover(fam.cover).members
                lower = _lower_array(size, members)
                if fam.kind is FamilyKind.COVER_STANDARD:
                    upper = _upper_array(size, members)
                else:
                    full = np.int64(self.universe.full)
                    masks = np.arange(1 << size, dtype=np.int64)
                    upper = full & ~lower[full & ~masks]
            else:
                masks = range(1 << size)
                lower = np.fromiter((fam.lower(a) for a in masks), dtype=np.int64, count=1 << size)
                upper = np.fromiter((fam.upper(a) for a in masks), dtype=np.int64, count=1 << size)
            self._arrays[index] = (lower, upper)
        return self._arrays[index]

    def tables(self, index: int) -> tuple[list[int], list[int]]:
        """Like :meth:`arrays` but as Python lists for fast scalar lookups."""
        if index not in self._tables:
            lower, upper = self.arrays(index)
            self._tables[index] = (lower.tolist(), upper.tolist())
        return self._tables[index]

    @cached_property
    def classical_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Partition lower/upper tables, independent of the declared families."""
        blocks = self.require_partition().blocks
        self.require_exhaustive('tabulating the classical approximations')
        size = self.universe.size
        return _lower_array(size, blocks), _upper_array(size, blocks)

    # -- definables --------------------------------------------------------

    def definables_of(self, index: int) -> tuple[Subset, ...]:
        """Fixed points ``{A : l_i(A) = u_i(A) = A}`` in canonical order."""
        fam = self.family(index)
        if fam.kind is FamilyKind.PARTITION_CLASSICAL:
            return unions_of(self.require_partition().blocks)
        lower, upper = self.arrays(index)
        masks = np.arange(1 << self.universe.size, dtype=np.int64)
        return tuple(np.flatnonzero((lower == masks) & (upper == masks)).tolist())

    @cached_property
    def definables(self) -> tuple[Subset, ...]:
        return self.definables_of(self.primary.index)

    def __repr__(self) -> str:
        blocks = None if self.partition is None else [self.universe.format(b) for b in self.partition.blocks]
        return (f'ModelContext(universe={self.universe.elements!r}, blocks={blocks!r}, '
                f'families={[f.index for f in self.families]!r})')


def unions_of(blocks: Sequence[Subset]) -> tuple[Subset, ...]:
    """All unions of subcollections of disjoint *blocks*, sorted."""
    out = [0]
    for block in blocks:
        out += [m | block for m in out]
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# Partition shapes
# ---------------------------------------------------------------------------

def partition_shapes(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield the integer partitions of *n* as non-increasing tuples."""
    if n == 0:
        yield ()
        return
    top = n if largest is None else min(n, largest)
    for first in range(top, 0, -1):
        for rest in partition_shapes(n - first, first):
            yield (first,) + rest


def realizable_count(shape: Iterable[int]) -> int:
    """Number of rough-equality classes of a partition with block sizes *shape*."""
    count = 1
    for size in shape:
        count *= 3 if size > 1 else 2
    return count


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def classical_lower(ctx: ModelContext, a: Subset) -> Subset:
    """Union of the partition blocks contained in *a*."""
    return granular_lower(ctx.require_partition().blocks, a)


def classical_upper(ctx: ModelContext, a: Subset) -> Subset:
    """Union of the partition blocks meeting *a*."""
    return granular_upper(ctx.require_partition().blocks, a)


def _own_cover(ctx: ModelContext, cover: Cover | str) -> Cover:
    name = cover if isinstance(cover, str) else cover.name
    own = ctx.cover(name)
    if not isinstance(cover, str) and own != cover:
        raise ConfigurationError(f'cover {name!r} does not belong to this model')
    return own


def cover_lower(ctx: ModelContext, cover: Cover | str, a: Subset) -> Subset:
    return granular_lower(_own_cover(ctx, cover).members, a)


def cover_upper(ctx: ModelContext, cover: Cover | str, a: Subset,
                kind: FamilyKind = FamilyKind.COVER_STANDARD) -> Subset:
    members = _own_cover(ctx, cover).members
    if FamilyKind(kind) is FamilyKind.COVER_DUAL:
        full = ctx.universe.full
        return full & ~granular_lower(members, full & ~a)
    return granular_upper(members, a)


def scan_subsets(ctx: ModelContext, sampled: bool | None = None,
                 samples: int | None = None, seed: int | None = None) -> tuple[str, np.ndarray]:
    """Return ``(mode, masks)`` for a subset scan.

    Exhaustive when the universe is within the exhaustive bound, unless
    *sampled* forces sampling; otherwise a seeded sample of distinct masks.
    """
    size = ctx.universe.size
    if sampled is None:
        sampled = not ctx.exhaustive()
        if sampled:
            logger.warning('|S| = %d exceeds the exhaustive bound; sampling subsets', size)
    if not sampled:
        return 'exhaustive', np.arange(1 << size, dtype=np.int64)
    n = ctx.settings.samples if samples is None else samples
    rng = np.random.default_rng(ctx.settings.seed if seed is None else seed)
    masks = np.unique(rng.integers(0, 1 << size, size=n, dtype=np.int64))
    return 'sampled', masks


@dataclass(frozen=True)
class DualityReport:
    family: int
    dual: bool
    mode: str
    checked: int
    counterexample: Subset | None = None
    clause: str | None = None      # 'ul' or 'lu'

    def to_dict(self, universe: Universe) -> dict:
        out = {'family': self.family, 'dual': self.dual, 'mode': self.mode, 'checked': self.checked}
        if self.counterexample is not None:
            out['counterexample'] = list(universe.names(self.counterexample))
            out['clause'] = self.clause
        return out


def check_duality(ctx: ModelContext, index: int, sampled: bool | None = None,
                  samples: int | None = None, seed: int | None = None) -> DualityReport:
    """Check ``(A^u)^l = A^u`` and ``(A^l)^u = A^l`` for family *index*."""
    fam = ctx.family(index)
    mode, masks = scan_subsets(ctx, sampled, samples, seed)
    if mode == 'exhaustive':
        lower, upper = ctx.arrays(index)
        bad_ul = lower[upper] != upper
        bad_lu = upper[lower] != lower
        bad = bad_ul | bad_lu
        hits = np.flatnonzero(bad)
        if hits.size:
            first = int(hits[0])
            return DualityReport(index, False, mode, int(masks.size), first,
                                 'ul' if bad_ul[first] else 'lu')
        return DualityReport(index, True, mode, int(masks.size))
    for a in masks.tolist():
        up, lo = fam.upper(a), fam.lower(a)
        if fam.lower(up) != up:
            return DualityReport(index, False, mode, int(masks.size), a, 'ul')
        if fam.upper(lo) != lo:
            return DualityReport(index, False, mode, int(masks.size), a, 'lu')
    return DualityReport(index, True, mode, int(masks.size))


@dataclass(frozen=True)
class FamilyReport:
    """Containment, monotonicity and image checks for one family."""
    family: int
    kind: str
    contained: bool
    monotone: bool
    definables: int
    image_is_definables: bool
    witnesses: dict[str, tuple[Subset, ...]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.contained and self.monotone

    def to_dict(self, universe: Universe) -> dict:
        return {
            'family': self.family,
            'kind': self.kind,
            'contained': self.contained,
            'monotone': self.monotone,
            'definables': self.definables,
            'image_is_definables': self.image_is_definables,
            'witnesses': {k: [list(universe.names(m)) for m in v] for k, v in self.witnesses.items()},
        }


def check_family(ctx: ModelContext, index: int) -> FamilyReport:
    """Exhaustively check ``l(A) ⊆ A ⊆ u(A)`` and monotonicity of family *index*."""
    fam = ctx.family(index)
    lower, upper = ctx.arrays(index)
    size = ctx.universe.size
    masks = np.arange(1 << size, dtype=np.int64)
    witnesses: dict[str, tuple[Subset, ...]] = {}

    bad = np.flatnonzero(((lower & ~masks) != 0) | ((masks & ~upper) != 0))
    if bad.size:
        witnesses['containment'] = (int(bad[0]),)

    # A ⊆ B is generated by adding one element at a time.
    monotone = True
    for k in range(size):
        bit = np.int64(1 << k)
        below = masks[(masks & bit) == 0]
        above = below | bit
        worse = ((lower[below] & ~lower[above]) != 0) | ((upper[below] & ~upper[above]) != 0)
        hit = np.flatnonzero(worse)
        if hit.size:
            monotone = False
            pair = (int(below[hit[0]]), int(above[hit[0]]))
            if 'monotonicity' not in witnesses or pair < witnesses['monotonicity']:
                witnesses['monotonicity'] = pair

    definables = ctx.definables_of(index)
    image = set(np.unique(lower).tolist()) | set(np.unique(upper).tolist())
    stray = sorted(image.symmetric_difference(definables))
    if stray:
        witnesses['image'] = (stray[0],)
    return FamilyReport(index, fam.kind.value, not bad.size, monotone, len(definables),
                        not stray, witnesses)
