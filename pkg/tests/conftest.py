"""Shared fixtures: the running model M0, cover C1 and seeded random partitions."""
from __future__ import annotations

import pytest

M0_ELEMENTS = ('a', 'b', 'c', 'd', 'e')
M0_BLOCKS = (('a', 'b'), ('c',), ('d', 'e'))
C1_MEMBERS = (('a', 'b'), ('b', 'c'), ('c', 'd', 'e'))


def random_blocks(rng, n: int) -> list[list[str]]:
    """A random partition of ``x0 .. x{n-1}`` as lists of names."""
    labels = rng.integers(0, n, size=n)
    blocks: dict[int, list[str]] = {}
    for k, label in enumerate(labels.tolist()):
        blocks.setdefault(label, []).append(f'x{k}')
    return list(blocks.values())


def random_contexts(count: int, largest: int, seed: int, settings=None):
    import numpy as np
    from rysbench.model import ModelContext
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, largest + 1))
        out.append(ModelContext.from_blocks([f'x{k}' for k in range(n)], random_blocks(rng, n), settings))
    return out


@pytest.fixture
def m0():
    from rysbench.model import ModelContext
    return ModelContext.from_blocks(M0_ELEMENTS, M0_BLOCKS)


@pytest.fixture
def m0_cover():
    """M0 with cover C1 and a cover-standard family 2."""
    from rysbench.model import Cover, FamilyKind, FamilySpec, ModelContext, Partition, Universe
    u = Universe.of(M0_ELEMENTS)
    partition = Partition.of(u, (u.subset(b) for b in M0_BLOCKS))
    cover = Cover.of(u, 'C1', (u.subset(m) for m in C1_MEMBERS))
    families = [FamilySpec(1, FamilyKind.PARTITION_CLASSICAL), FamilySpec(2, FamilyKind.COVER_STANDARD, 'C1')]
    return ModelContext(u, partition, [cover], families)


@pytest.fixture
def m0_cera(m0):
    from rysbench.qrst import build_cera
    return build_cera(m0)


@pytest.fixture
def m0_file(tmp_path):
    import json
    path = tmp_path / 'm0.json'
    path.write_text(json.dumps({
        'name': 'm0',
        'universe': list(M0_ELEMENTS),
        'partition': [list(b) for b in M0_BLOCKS],
        'covers': {'C1': [list(m) for m in C1_MEMBERS]},
        'families': [{'index': 1, 'kind': 'partition-classical'},
                     {'index': 2, 'kind': 'cover-standard', 'cover': 'C1'}],
        'rys': {'mode': 'nonempty-witness'},
    }))
    return path


@pytest.fixture(scope='session')
def random_partitions():
    """Fifty seeded random partitions on universes of at most ten elements."""
    return random_contexts(50, 10, seed=20240611)


@pytest.fixture(scope='session')
def small_partitions():
    """Seeded random partitions on universes of at most five elements."""
    return random_contexts(20, 5, seed=7)


@pytest.fixture(scope='session')
def six_element_partitions():
    """Seeded random partitions on universes of at most six elements."""
    return random_contexts(10, 6, seed=31)
