"""
Materialized finite partial algebras over the hybrid signature.

Elements are the integers ``0 .. size-1`` in canonical order.  Every operation
is a numpy table whose entries are element indices or ``-1`` where the
operation is undefined.  Each element carries a tag, 1 or 2; an element has
tag 2 exactly when ``rnot`` is defined on it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from rysbench.errors import ConfigurationError

UNARY_OPS = ('lup', 'bup', 'snot', 'rnot')
BINARY_OPS = ('join', 'meet', 'rimp', 'rimpb')
CONSTANTS = ('bot', 'top', 'zero', 'one')
UNDEFINED = -1


@dataclass(eq=False)
class FiniteAlgebra:
    name: str
    tags: np.ndarray
    unary: Mapping[str, np.ndarray]
    binary: Mapping[str, np.ndarray]
    constants: Mapping[str, int]
    descriptions: Sequence[dict] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.tags = np.asarray(self.tags, dtype=np.int8)
        n = self.tags.size
        if n == 0:
            raise ConfigurationError(f'algebra {self.name!r} has no elements')
        if not np.isin(self.tags, (1, 2)).all():
            raise ConfigurationError(f'algebra {self.name!r}: tags must be 1 or 2')
        for op in UNARY_OPS:
            table = np.asarray(self.unary.get(op), dtype=np.int64)
            if table.shape != (n,):
                raise ConfigurationError(f'algebra {self.name!r}: {op} table must have shape ({n},)')
            self._check_range(op, table)
        for op in BINARY_OPS:
            table = np.asarray(self.binary.get(op), dtype=np.int64)
            if table.shape != (n, n):
                raise ConfigurationError(f'algebra {self.name!r}: {op} table must have shape ({n}, {n})')
            self._check_range(op, table)
        self.unary = {op: np.asarray(self.unary[op], dtype=np.int64) for op in UNARY_OPS}
        self.binary = {op: np.asarray(self.binary[op], dtype=np.int64) for op in BINARY_OPS}
        missing = [c for c in CONSTANTS if c not in self.constants]
        if missing:
            raise ConfigurationError(f'algebra {self.name!r} lacks constant(s) {", ".join(missing)}')
        self.constants = {c: int(self.constants[c]) for c in CONSTANTS}
        if not all(0 <= v < n for v in self.constants.values()):
            raise ConfigurationError(f'algebra {self.name!r}: constant out of range')

    def _check_range(self, op: str, table: np.ndarray) -> None:
        if table.size and (table.min() < UNDEFINED or table.max() >= self.tags.size):
            raise ConfigurationError(f'algebra {self.name!r}: {op} table refers to missing elements')

    @property
    def size(self) -> int:
        return int(self.tags.size)

    def indices(self, tag: int) -> np.ndarray:
        return np.flatnonzero(self.tags == tag)

    def count(self, tag: int) -> int:
        return int((self.tags == tag).sum())

    def describe(self, i: int) -> dict:
        if self.descriptions is not None:
            return self.descriptions[i]
        return {'index': int(i), 'tag': f't{int(self.tags[i])}'}

    # -- sentinel tables for vectorized evaluation ---------------------------

    @cached_property
    def extended(self) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray], np.ndarray]:
        """Tables with an extra absorbing element ``size`` standing for undefined."""
        u = self.size
        unary = {}
        for op, table in self.unary.items():
            unary[op] = np.append(np.where(table < 0, u, table), u)
        binary = {}
        for op, table in self.binary.items():
            ext = np.full((u + 1, u + 1), u, dtype=np.int64)
            ext[:u, :u] = np.where(table < 0, u, table)
            binary[op] = ext
        tags = np.append(self.tags, 0).astype(np.int8)
        return unary, binary, tags

    def permuted(self, perm: Sequence[int], name: str | None = None) -> FiniteAlgebra:
        """Relabel element ``i`` as ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.size)):
            raise ConfigurationError('permutation must be a bijection on element indices')
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(self.size)

        def move(values: np.ndarray) -> np.ndarray:
            return np.where(values < 0, UNDEFINED, perm[np.maximum(values, 0)])

        unary = {op: move(t[inverse]) for op, t in self.unary.items()}
        binary = {op: move(t[np.ix_(inverse, inverse)]) for op, t in self.binary.items()}
        descriptions = None if self.descriptions is None else [self.descriptions[i] for i in inverse.tolist()]
        return FiniteAlgebra(name or f'{self.name}~', self.tags[inverse], unary, binary,
                             {c: int(perm[v]) for c, v in self.constants.items()}, descriptions)

    def with_entry(self, op: str, args: tuple[int, ...], value: int) -> FiniteAlgebra:
        """Copy with one table entry replaced."""
        unary = {k: v.copy() for k, v in self.unary.items()}
        binary = {k: v.copy() for k, v in self.binary.items()}
        (unary if op in UNARY_OPS else binary)[op][args] = value
        return FiniteAlgebra(f'{self.name}*', self.tags.copy(), unary, binary, dict(self.constants),
                             self.descriptions)
