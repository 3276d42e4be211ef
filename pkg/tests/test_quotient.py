"""Tests for rysbench.quotient: rough pairs, the quotient and generalized quotients."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rysbench.errors import ConfigurationError, EmptyClassError
from rysbench.quotient import (RoughPair, build_quotient, class_intersection, class_union,
                               generalized_quotient, is_realizable, members_of, pair_of,
                               parse_rough_equality, realizable_pairs)
from rysbench.rys import build_rys

partition_labels = st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=7)


def _context(labels):
    from rysbench.model import ModelContext
    names = [f'x{k}' for k in range(len(labels))]
    blocks: dict[int, list[str]] = {}
    for name, label in zip(names, labels):
        blocks.setdefault(label, []).append(name)
    return ModelContext.from_blocks(names, blocks.values())


class TestRoughPairs:
    def test_running_example_has_eighteen_classes(self, m0):
        assert len(realizable_pairs(m0)) == 18

    def test_symbolic_and_explicit_agree(self, m0):
        symbolic = build_quotient(m0, 'symbolic').classes
        explicit = build_quotient(m0, 'explicit').classes
        assert [(p.lower, p.upper) for p in symbolic] == [(p.lower, p.upper) for p in explicit]

    def test_class_members(self, m0):
        u = m0.universe
        p = RoughPair(u.subset('c'), u.full)
        members = members_of(m0, p)
        assert len(members) == 4
        assert all(pair_of(m0, x) == p for x in members)
        assert class_union(m0, p) == u.full
        assert class_intersection(m0, p) == u.subset('c')

    def test_singleton_boundary_is_not_realizable(self, m0):
        u = m0.universe
        assert not is_realizable(m0, 0, u.subset('c'))
        with pytest.raises(EmptyClassError):
            members_of(m0, RoughPair(0, u.subset('c'), False))

    def test_small_partitions(self):
        from rysbench.model import ModelContext
        assert len(realizable_pairs(ModelContext.from_blocks('abc', ['ab', 'c']))) == 6
        assert len(realizable_pairs(ModelContext.from_blocks('abc', ['a', 'b', 'c']))) == 8

    def test_classes_partition_the_power_set(self, random_partitions):
        for ctx in random_partitions[:10]:
            if ctx.universe.size > 8:
                continue
            total = sum(len(members_of(ctx, p)) for p in realizable_pairs(ctx))
            assert total == 1 << ctx.universe.size

    def test_unknown_mode(self, m0):
        with pytest.raises(ConfigurationError):
            build_quotient(m0, 'lazy')


class TestRoughEqualitySpec:
    def test_parse_conjunction(self):
        spec = parse_rough_equality('x^l = y^l and x^u = y^u')
        assert spec.conjunctive
        assert [a.symbol for a in spec.atoms()] == ['l1', 'u1']

    def test_parse_indexed_disjunction(self):
        spec = parse_rough_equality('x^l2 = y^l2 or not (x^u = y^u)')
        assert not spec.conjunctive
        assert [a.symbol for a in spec.atoms()] == ['l2', 'u1']

    def test_mismatched_sides(self):
        with pytest.raises(ConfigurationError, match='same approximation'):
            parse_rough_equality('x^l = y^u')

    def test_garbage(self):
        with pytest.raises(ConfigurationError, match='cannot parse'):
            parse_rough_equality('x = y')


class TestGeneralizedQuotient:
    def test_classical_rough_equality(self, m0):
        g = generalized_quotient(build_rys(m0), 'x^l = y^l and x^u = y^u')
        assert g.equivalence
        assert g.class_count == 18
        assert sum(g.sizes) == 32
        assert all(a.well_defined for a in g.approximations)
        assert g.ok

    def test_union_is_not_total_on_classes(self, m0):
        g = generalized_quotient(build_rys(m0), 'x^l = y^l and x^u = y^u')
        plus = next(o for o in g.operations if o.name == 'plus')
        assert plus.verdict == 'partial'
        assert plus.witness is not None

    def test_lower_only(self, m0):
        g = generalized_quotient(build_rys(m0), 'x^l = y^l')
        assert g.class_count == 8
        upper = next(a for a in g.approximations if a.symbol == 'u1')
        assert not upper.well_defined

    def test_upper_only(self, m0):
        g = generalized_quotient(build_rys(m0), 'x^u = y^u')
        assert g.class_count == 8
        lower = next(a for a in g.approximations if a.symbol == 'l1')
        assert not lower.well_defined
        x, y = lower.witness
        assert pair_of(m0, x).upper == pair_of(m0, y).upper
        assert pair_of(m0, x).lower != pair_of(m0, y).lower

    def test_ill_defined_class_pairs(self, m0):
        u = m0.universe
        g = generalized_quotient(build_rys(m0), 'x^u = y^u')
        ops = {o.name: o for o in g.operations}
        assert ops['plus'].verdict == 'total'
        assert ops['plus'].ill_defined == ()
        times = ops['times']
        assert times.verdict == 'partial'
        k = g.representatives.index(u.subset('a'))
        assert (k, k) in times.ill_defined
        assert times.pair_verdict(k, k) == 'ill-defined'
        assert times.pair_verdict(0, 0) == 'defined'
        assert times.defined_pairs == times.class_pairs - len(times.ill_defined)

    def test_sampled_quotient_is_not_total_without_coverage(self):
        from rysbench.config import Settings
        from rysbench.model import ModelContext
        ctx = ModelContext.from_blocks('a', ['a'], Settings(samples=1))
        g = generalized_quotient(build_rys(ctx), 'x^l = y^l', sampled=True)
        for o in g.operations:
            assert o.mode == 'sampled'
            assert o.unseen_pairs == 3
            assert o.verdict == 'unknown'
            assert [o.pair_verdict(a, b) for a in range(2) for b in range(2)].count('unseen') == 3

    def test_one_element_universe(self):
        from rysbench.model import ModelContext
        g = generalized_quotient(build_rys(ModelContext.from_blocks('a', ['a'])), 'x^l = y^l')
        assert g.class_count == 2
        assert all(o.verdict == 'total' for o in g.operations)

    def test_disjunction_is_not_transitive(self, m0):
        g = generalized_quotient(build_rys(m0), 'x^l = y^l or x^u = y^u')
        assert not g.equivalence
        assert len(g.equivalence_witness) == 3

    def test_unknown_family(self, m0):
        with pytest.raises(ConfigurationError):
            generalized_quotient(build_rys(m0), 'x^l3 = y^l3')


class TestPreRoughOperations:
    def test_running_example_values(self, m0):
        from rysbench.quotient import pre_rough_join, pre_rough_L, pre_rough_not
        u = m0.universe
        p = RoughPair(u.subset('c'), u.full)
        assert pre_rough_not(m0, p) == RoughPair(0, u.subset('abde'))
        joined = pre_rough_join(m0, RoughPair(u.subset('c'), u.subset('c')), RoughPair(0, u.subset('ab')))
        assert joined == RoughPair(u.subset('c'), u.subset('abc'))
        assert pre_rough_L(m0, RoughPair(0, 0)) == RoughPair(0, 0)

    def test_closure_and_laws(self, six_element_partitions):
        from rysbench.quotient import (pre_rough_imp, pre_rough_join, pre_rough_L, pre_rough_M,
                                       pre_rough_meet, pre_rough_not)
        for ctx in six_element_partitions:
            pairs = realizable_pairs(ctx)
            for p in pairs:
                assert pre_rough_not(ctx, pre_rough_not(ctx, p)) == p
                assert pre_rough_not(ctx, p).realizable
                lp = pre_rough_L(ctx, p)
                assert pre_rough_L(ctx, lp) == lp
                assert pre_rough_M(ctx, p) == pre_rough_not(ctx, pre_rough_L(ctx, pre_rough_not(ctx, p)))
                for q in pairs:
                    for op in (pre_rough_join, pre_rough_meet, pre_rough_imp):
                        assert op(ctx, p, q).realizable, (op.__name__, p, q)

    @settings(max_examples=40, deadline=None)
    @given(partition_labels)
    def test_class_lemma_matches_members(self, labels):
        ctx = _context(labels)
        for p in realizable_pairs(ctx):
            members = members_of(ctx, p)
            union = intersection = members[0]
            for x in members:
                union |= x
                intersection &= x
            assert union == class_union(ctx, p)
            assert intersection == class_intersection(ctx, p)

    @settings(max_examples=40, deadline=None)
    @given(partition_labels)
    def test_grouping_yields_realizable_pairs(self, labels):
        ctx = _context(labels)
        grouped = {pair_of(ctx, a) for a in ctx.universe.all_subsets()}
        assert sorted(grouped) == list(realizable_pairs(ctx))
