"""Tests for rysbench.verify.iso: isomorphism search and certificates."""
from __future__ import annotations

import numpy as np
import pytest

from rysbench.model import ModelContext
from rysbench.qrst import build_cera


class TestIsoCheck:
    def test_identical_tables(self, m0_cera):
        from rysbench.verify.iso import iso_check
        result = iso_check(m0_cera, m0_cera.algebra)
        assert result.found
        assert result.reason == 'identical tables'
        assert result.mapping == tuple(range(50))

    def test_relabelled_blocks(self, m0_cera):
        from rysbench.verify.iso import is_isomorphism, iso_check
        other = build_cera(ModelContext.from_shape((2, 2, 1)))
        result = iso_check(m0_cera, other)
        assert result.found
        assert is_isomorphism(m0_cera.algebra, other.algebra, result.mapping)

    def test_random_permutation(self, m0_cera):
        from rysbench.verify.iso import is_isomorphism, iso_check
        alg = m0_cera.algebra
        perm = np.random.default_rng(3).permutation(alg.size)
        shuffled = alg.permuted(perm)
        result = iso_check(alg, shuffled)
        assert result.found
        assert is_isomorphism(alg, shuffled, result.mapping)

    def test_carrier_sizes_differ(self):
        from rysbench.verify.iso import iso_check
        a = build_cera(ModelContext.from_blocks('abc', ['ab', 'c']))
        b = build_cera(ModelContext.from_blocks('abc', ['a', 'b', 'c']))
        result = iso_check(a, b)
        assert not result.found
        assert result.reason == 'carrier sizes differ: 14 vs 16'

    def test_same_size_different_shape(self):
        from rysbench.verify.iso import iso_check
        a = build_cera(ModelContext.from_shape((4, 2)))
        b = build_cera(ModelContext.from_shape((3, 3)))
        assert a.size == b.size
        assert not iso_check(a, b).found

    def test_single_entry_change(self, m0_cera):
        from rysbench.verify.iso import iso_check
        alg = m0_cera.algebra
        broken = alg.with_entry('snot', (alg.constants['bot'],), alg.constants['bot'])
        assert not iso_check(alg, broken).found

    def test_budget(self, m0_cera):
        from rysbench.config import Settings
        from rysbench.errors import BudgetExceededError
        from rysbench.verify.iso import iso_check
        alg = m0_cera.algebra
        shuffled = alg.permuted(np.random.default_rng(4).permutation(alg.size))
        with pytest.raises(BudgetExceededError):
            iso_check(alg, shuffled, Settings(iso_budget=1))


class TestColours:
    def test_refinement_is_invariant(self, m0_cera):
        from rysbench.verify.iso import refine_colours
        alg = m0_cera.algebra
        perm = np.random.default_rng(5).permutation(alg.size)
        ca, cb = refine_colours(alg, alg.permuted(perm))
        assert np.array_equal(ca, cb[perm])

    def test_is_isomorphism_rejects_non_bijection(self, m0_cera):
        from rysbench.verify.iso import is_isomorphism
        alg = m0_cera.algebra
        assert not is_isomorphism(alg, alg, [0] * alg.size)
