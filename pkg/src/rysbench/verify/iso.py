"""
Isomorphism checking between finite partial algebras of the hybrid signature.

An isomorphism is a bijection on element indices that preserves tags and
constants and commutes with every operation, definedness included.  The
check first refines a joint colouring of both carriers (tag, constants,
colours of unary images, multisets of binary row and column colours); a
difference in the colour histograms certifies that no isomorphism exists.
Otherwise a backtracking search over colour-compatible candidates runs with
propagation: every new pair forces the images of its unary results and of
its binary results against all pairs already fixed.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from rysbench.algebra import BINARY_OPS, CONSTANTS, UNARY_OPS, FiniteAlgebra
from rysbench.config import Settings
from rysbench.errors import BudgetExceededError

logger = logging.getLogger(__name__)


@dataclass
class IsoResult:
    found: bool
    mapping: tuple[int, ...] | None = None      # mapping[i] is the image of element i
    reason: str = ''
    nodes: int = 0

    def to_dict(self) -> dict:
        data = {'found': self.found, 'reason': self.reason, 'nodes': self.nodes}
        if self.mapping is not None:
            data['mapping'] = list(self.mapping)
        return data


def _algebra(target) -> FiniteAlgebra:
    return target if isinstance(target, FiniteAlgebra) else target.algebra


def is_isomorphism(a: FiniteAlgebra, b: FiniteAlgebra, mapping) -> bool:
    """Check that *mapping* is an isomorphism from *a* onto *b*."""
    f = np.asarray(mapping, dtype=np.int64)
    if a.size != b.size or sorted(f.tolist()) != list(range(b.size)):
        return False
    if not np.array_equal(a.tags, b.tags[f]):
        return False
    if any(f[a.constants[c]] != b.constants[c] for c in CONSTANTS):
        return False

    def image(values):
        return np.where(values < 0, -1, f[np.maximum(values, 0)])

    for op in UNARY_OPS:
        if not np.array_equal(image(a.unary[op]), b.unary[op][f]):
            return False
    for op in BINARY_OPS:
        if not np.array_equal(image(a.binary[op]), b.binary[op][np.ix_(f, f)]):
            return False
    return True


def _identical(a: FiniteAlgebra, b: FiniteAlgebra) -> bool:
    return (a.size == b.size and np.array_equal(a.tags, b.tags) and a.constants == b.constants
            and all(np.array_equal(a.unary[op], b.unary[op]) for op in UNARY_OPS)
            and all(np.array_equal(a.binary[op], b.binary[op]) for op in BINARY_OPS))


# ---------------------------------------------------------------------------
# Colour refinement
# ---------------------------------------------------------------------------

def _initial_colours(alg: FiniteAlgebra) -> list[tuple]:
    marks = [tuple(int(alg.constants[c] == i) for c in CONSTANTS) for i in range(alg.size)]
    return [(int(alg.tags[i]), marks[i]) for i in range(alg.size)]


def _signatures(alg: FiniteAlgebra, colour: np.ndarray, k: int) -> list[tuple]:
    """New signature per element from the current colours (``k`` = undefined)."""
    ext = np.append(colour, k)
    parts = [colour.tolist()]
    for op in UNARY_OPS:
        parts.append(ext[alg.unary[op]].tolist())
    rows = []
    for op in BINARY_OPS:
        table = alg.binary[op]
        width = k + 1
        by_row = np.sort(colour[None, :] * width + ext[table], axis=1)
        by_col = np.sort(colour[None, :] * width + ext[table.T], axis=1)
        rows.append([r.tobytes() for r in by_row])
        rows.append([r.tobytes() for r in by_col])
    return [tuple(p[i] for p in parts) + tuple(r[i] for r in rows) for i in range(alg.size)]


def refine_colours(a: FiniteAlgebra, b: FiniteAlgebra) -> tuple[np.ndarray, np.ndarray]:
    """Stable joint colouring of two carriers; equal colours are candidates."""
    first = _initial_colours(a) + _initial_colours(b)
    palette = {c: i for i, c in enumerate(sorted(set(first)))}
    joint = np.array([palette[c] for c in first], dtype=np.int64)
    count = len(palette)
    while True:
        ca, cb = joint[:a.size], joint[a.size:]
        signatures = _signatures(a, ca, count) + _signatures(b, cb, count)
        palette = {s: i for i, s in enumerate(sorted(set(signatures)))}
        joint = np.array([palette[s] for s in signatures], dtype=np.int64)
        if len(palette) == count:
            break
        count = len(palette)
    logger.debug('colour refinement settled at %d colours', count)
    return joint[:a.size], joint[a.size:]


# ---------------------------------------------------------------------------
# Backtracking
# ---------------------------------------------------------------------------

class _Search:
    def __init__(self, a: FiniteAlgebra, b: FiniteAlgebra, ca: np.ndarray, cb: np.ndarray, budget: int):
        self.a, self.b = a, b
        self.ca, self.cb = ca, cb
        self.budget = budget
        self.nodes = 0
        self.f = np.full(a.size, -1, dtype=np.int64)
        self.g = np.full(b.size, -1, dtype=np.int64)
        self.trail: list[int] = []
        self.candidates = {int(c): np.flatnonzero(cb == c) for c in np.unique(cb)}
        sizes = Counter(ca.tolist())
        self.order = sorted(range(a.size), key=lambda i: (sizes[int(ca[i])], i))

    def assign(self, x: int, y: int) -> bool:
        queue = [(x, y)]
        while queue:
            x, y = queue.pop()
            if self.f[x] >= 0:
                if self.f[x] != y:
                    return False
                continue
            if self.g[y] >= 0 or self.ca[x] != self.cb[y]:
                return False
            self.f[x], self.g[y] = y, x
            self.trail.append(x)
            for op in UNARY_OPS:
                u, v = int(self.a.unary[op][x]), int(self.b.unary[op][y])
                if (u < 0) != (v < 0):
                    return False
                if u >= 0:
                    queue.append((u, v))
            fixed = np.asarray(self.trail, dtype=np.int64)
            images = self.f[fixed]
            for op in BINARY_OPS:
                ta, tb = self.a.binary[op], self.b.binary[op]
                for u, v in ((ta[x, fixed], tb[y, images]), (ta[fixed, x], tb[images, y])):
                    if np.any((u < 0) != (v < 0)):
                        return False
                    keep = (u >= 0) & (self.f[np.maximum(u, 0)] != v)
                    queue.extend(zip(u[keep].tolist(), v[keep].tolist()))
        return True

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            x = self.trail.pop()
            self.g[self.f[x]] = -1
            self.f[x] = -1

    def run(self) -> bool:
        x = next((i for i in self.order if self.f[i] < 0), None)
        if x is None:
            return True
        for y in self.candidates.get(int(self.ca[x]), ()):
            if self.g[y] >= 0:
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceededError(f'isomorphism search exceeded {self.budget} nodes')
            mark = len(self.trail)
            if self.assign(x, int(y)) and self.run():
                return True
            self.undo(mark)
        return False


def iso_check(first, second, settings: Settings | None = None) -> IsoResult:
    """Find an isomorphism from *first* onto *second*, or certify that none exists.

    Both arguments may be :class:`~rysbench.qrst.CeraStructure` instances or
    :class:`~rysbench.algebra.FiniteAlgebra` tables.
    """
    a, b = _algebra(first), _algebra(second)
    if settings is None:
        settings = getattr(getattr(first, 'ctx', None), 'settings', None) or Settings()
    if a.size != b.size:
        return IsoResult(False, reason=f'carrier sizes differ: {a.size} vs {b.size}')
    for tag in (1, 2):
        if a.count(tag) != b.count(tag):
            return IsoResult(False, reason=f'type-{tag} counts differ: {a.count(tag)} vs {b.count(tag)}')
    if _identical(a, b):
        return IsoResult(True, tuple(range(a.size)), 'identical tables')

    ca, cb = refine_colours(a, b)
    if Counter(ca.tolist()) != Counter(cb.tolist()):
        return IsoResult(False, reason='invariant colourings differ')

    search = _Search(a, b, ca, cb, settings.iso_budget)
    for c in CONSTANTS:
        if not search.assign(a.constants[c], b.constants[c]):
            return IsoResult(False, reason=f'constant {c} cannot be matched', nodes=search.nodes)
    found = search.run()
    logger.debug('isomorphism search %s -> %s: %s after %d node(s)', a.name, b.name, found, search.nodes)
    if not found:
        return IsoResult(False, reason='exhaustive search found no isomorphism', nodes=search.nodes)
    return IsoResult(True, tuple(int(v) for v in search.f), 'search', search.nodes)
