"""Tests for rysbench.qrst: the typed universe, hybrid operations and CRAD."""
from __future__ import annotations

import functools
import operator

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rysbench.errors import ConfigurationError
from rysbench.qrst import (TAU1, TAU2, apply, build_cera, build_crad, crad_info, join, lup, meet,
                           rimp, rnot, snot, t1, t2)
from rysbench.quotient import RoughPair, members_of, pair_of, realizable_pairs


class TestCarrier:
    def test_running_example_size(self, m0_cera):
        assert m0_cera.size == 50
        assert m0_cera.algebra.count(1) == 32
        assert m0_cera.algebra.count(2) == 18

    def test_small_sizes(self):
        from rysbench.model import ModelContext
        assert build_cera(ModelContext.from_blocks('abc', ['ab', 'c'])).size == 14
        assert build_cera(ModelContext.from_blocks('abc', ['a', 'b', 'c'])).size == 16

    def test_canonical_order(self, m0_cera):
        elements = list(m0_cera.elements())
        assert elements == sorted(elements)
        assert [m0_cera.index(e) for e in elements] == list(range(50))
        assert all(m0_cera.element(i) == e for i, e in enumerate(elements))

    def test_constants(self, m0_cera):
        c = m0_cera.constants
        assert c['bot'] == t1(0)
        assert c['top'] == t1(31)
        assert c['zero'].tag == TAU2 and c['one'].tag == TAU2
        assert c['top'] != c['one']

    def test_type_two_needs_realizable_pair(self):
        with pytest.raises(ConfigurationError):
            t2(RoughPair(0, 4, False))


class TestOperations:
    def test_mixed_join(self, m0):
        u = m0.universe
        c = u.subset('c')
        result = join(m0, t1(u.subset('a')), t2(RoughPair(c, c)))
        assert result == t2(RoughPair(c, u.subset('abc')))

    def test_mixed_meet(self, m0):
        u = m0.universe
        c = u.subset('c')
        result = meet(m0, t1(u.subset('ac')), t2(RoughPair(c, u.full)))
        assert result == t2(RoughPair(c, c))

    def test_mixed_implication(self, m0):
        u = m0.universe
        c = u.subset('c')
        assert rimp(m0, t1(c), t2(RoughPair(c, u.full))) == t2(RoughPair(u.full, u.full))

    def test_type_two_negation(self, m0):
        u = m0.universe
        c = u.subset('c')
        assert snot(m0, t2(RoughPair(c, u.full))) == t2(RoughPair(0, u.subset('abde')))

    def test_rnot_undefined_on_type_one(self, m0):
        assert rnot(m0, t1(3)) is None

    def test_lup_on_type_one(self, m0):
        u = m0.universe
        assert lup(m0, t1(u.subset('acd'))) == t1(u.subset('c'))

    def test_apply_unknown(self, m0_cera):
        with pytest.raises(ConfigurationError):
            apply(m0_cera, 'xor', t1(0), t1(0))


class TestMaterializedTables:
    def test_tables_agree_with_operations(self, m0_cera):
        alg = m0_cera.algebra
        elements = list(m0_cera.elements())
        ctx = m0_cera.ctx
        for op in ('lup', 'bup', 'snot', 'rnot'):
            for i, e in enumerate(elements):
                expected = apply(m0_cera, op, e)
                got = alg.unary[op][i]
                assert got == (-1 if expected is None else m0_cera.index(expected)), (op, e.format(ctx))
        rng = np.random.default_rng(0)
        for op in ('join', 'meet', 'rimp', 'rimpb'):
            for i, j in rng.integers(0, 50, size=(300, 2)).tolist():
                expected = apply(m0_cera, op, elements[i], elements[j])
                assert alg.binary[op][i, j] == m0_cera.index(expected), (op, i, j)

    def test_descriptions(self, m0_cera):
        alg = m0_cera.algebra
        assert alg.describe(0) == {'tag': 't1', 'set': []}
        assert alg.describe(32)['tag'] == 't2'

    def test_permuted_round_trip(self, m0_cera):
        alg = m0_cera.algebra
        perm = np.random.default_rng(1).permutation(alg.size)
        back = alg.permuted(perm).permuted(np.argsort(perm))
        for op in alg.binary:
            assert np.array_equal(back.binary[op], alg.binary[op])
        assert back.constants == alg.constants

    def test_rnot_marks_type_two(self, m0_cera):
        alg = m0_cera.algebra
        assert np.array_equal(alg.unary['rnot'] >= 0, alg.tags == TAU2)
        assert not (alg.tags[alg.unary['rnot'][alg.tags == TAU2]] == TAU1).any()


class TestCaseTables:
    def test_result_tags(self, m0_cera):
        alg = m0_cera.algebra
        tags = alg.tags.astype(int)
        left, right = np.meshgrid(tags, tags, indexing='ij')
        mixed = left != right
        for op in ('join', 'meet', 'rimp', 'rimpb'):
            result = alg.tags[alg.binary[op]]
            assert (result[mixed] == TAU2).all(), op
            assert (result[(left == TAU2) & (right == TAU2)] == TAU2).all(), op
        both_one = (left == TAU1) & (right == TAU1)
        for op in ('join', 'meet', 'rimp'):
            assert (alg.tags[alg.binary[op]][both_one] == TAU1).all(), op
        assert (alg.tags[alg.binary['rimpb']][both_one] == TAU2).all()
        for op in ('lup', 'bup', 'snot'):
            assert np.array_equal(alg.tags[alg.unary[op]], alg.tags), op

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=6), st.data())
    def test_mixed_cases_match_member_enumeration(self, labels, data):
        from rysbench.model import ModelContext
        names = [f'x{k}' for k in range(len(labels))]
        blocks: dict[int, list[str]] = {}
        for name, label in zip(names, labels):
            blocks.setdefault(label, []).append(name)
        ctx = ModelContext.from_blocks(names, blocks.values())
        full = ctx.universe.full
        x = data.draw(st.integers(min_value=0, max_value=full))
        for p in realizable_pairs(ctx):
            zs = members_of(ctx, p)
            union = imp_right = imp_left = 0
            for z in zs:
                union |= x | z
                imp_right |= x | (full & ~z)
                imp_left |= z | (full & ~x)
            intersection = x & functools.reduce(operator.and_, zs)
            assert join(ctx, t1(x), t2(p)) == t2(pair_of(ctx, union))
            assert join(ctx, t2(p), t1(x)) == t2(pair_of(ctx, union))
            assert meet(ctx, t1(x), t2(p)) == t2(pair_of(ctx, intersection))
            assert rimp(ctx, t1(x), t2(p)) == t2(pair_of(ctx, imp_right))
            assert rimp(ctx, t2(p), t1(x)) == t2(pair_of(ctx, imp_left))


class TestCrad:
    def test_pair_universe_size(self, m0_cera):
        crad = build_crad(m0_cera)
        assert crad.size == 64
        report = crad_info(crad)
        assert report.carrier == 50
        assert 'componentwise' in report.note

    def test_operation_counts(self, m0_cera):
        report = crad_info(build_crad(m0_cera))
        ops = {op.name: op for op in report.operations}
        assert ops['rnot'].defined == 0
        for name in ('lup', 'bup', 'snot'):
            assert ops[name].tuples == 64
            assert ops[name].inside == 64
        assert ops['join'].tuples == 64 * 64
        assert ops['join'].defined == 64 * 64
        assert ops['join'].inside < ops['join'].defined
        assert ops['join'].witness is not None
