"""
Representation search: recover an approximation space from an abstract algebra.

The abstract input is a :class:`~rysbench.algebra.FiniteAlgebra` whose type-2
elements are those on which ``rnot`` is defined.  It must first pass the
bundled ``aera-axioms`` suite.  Its type-1 part then fixes the universe size
``n`` (``2**n`` elements), and only partition shapes of ``n`` whose carrier
size matches are built and compared with :func:`~rysbench.verify.iso.iso_check`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from rysbench.algebra import FiniteAlgebra
from rysbench.config import Settings
from rysbench.model import ModelContext, partition_shapes, realizable_count
from rysbench.qrst import build_cera
from rysbench.verify.evaluate import VerifyReport, run_builtin_suite
from rysbench.verify.iso import iso_check

logger = logging.getLogger(__name__)

FOUND = 'found'
NONE_WITHIN_BOUND = 'none-within-bound'
PRECONDITION_FAILED = 'precondition-failed'


@dataclass
class RepresentationResult:
    status: str
    reason: str = ''
    shape: tuple[int, ...] | None = None
    context: ModelContext | None = None
    mapping: tuple[int, ...] | None = None
    tried: list[tuple[int, ...]] = field(default_factory=list)
    precondition: VerifyReport | None = None

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_dict(self) -> dict:
        data = {'status': self.status, 'reason': self.reason,
                'tried': [list(s) for s in self.tried]}
        if self.shape is not None:
            data['shape'] = list(self.shape)
            data['blocks'] = [list(self.context.universe.names(b)) for b in self.context.partition.blocks]
        if self.mapping is not None:
            data['mapping'] = list(self.mapping)
        if self.precondition is not None:
            data['failed_axioms'] = [r.label for r in self.precondition.failures()]
        return data


def _universe_size(count: int) -> int | None:
    if count < 2 or count & (count - 1):
        return None
    return count.bit_length() - 1


def representation_search(target, max_n: int | None = None,
                          settings: Settings | None = None) -> RepresentationResult:
    """Find a partition whose hybrid algebra is isomorphic to *target*."""
    if isinstance(target, FiniteAlgebra):
        alg = target
    else:
        alg = target.algebra
        settings = settings or target.ctx.settings
    settings = settings or Settings()
    max_n = settings.max_n if max_n is None else max_n

    precondition = run_builtin_suite(alg, 'aera-axioms', settings=settings)
    if not precondition.passed:
        labels = ', '.join(r.label for r in precondition.failures())
        logger.info('representation search refused: %s fails %s', alg.name, labels)
        return RepresentationResult(PRECONDITION_FAILED, f'input fails the aera-axioms suite: {labels}',
                                    precondition=precondition)

    n = _universe_size(alg.count(1))
    if n is None:
        return RepresentationResult(NONE_WITHIN_BOUND,
                                    f'{alg.count(1)} type-1 elements is not the size of a power set')
    if n > max_n:
        return RepresentationResult(NONE_WITHIN_BOUND, f'universe size {n} exceeds the bound {max_n}')

    result = RepresentationResult(NONE_WITHIN_BOUND, f'no partition of {n} element(s) matches')
    for shape in partition_shapes(n):
        if (1 << n) + realizable_count(shape) != alg.size:
            continue
        result.tried.append(shape)
        ctx = ModelContext.from_shape(shape, settings)
        iso = iso_check(build_cera(ctx), alg, settings)
        logger.debug('shape %s: %s', shape, iso.reason)
        if iso.found:
            logger.info('representation found: block sizes %s', shape)
            result.status, result.reason = FOUND, iso.reason
            result.shape, result.context, result.mapping = shape, ctx, iso.mapping
            return result
    return result
