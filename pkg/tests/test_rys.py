"""Tests for rysbench.rys: mereology, descriptions, supplementation and axioms."""
from __future__ import annotations

import numpy as np
import pytest

from rysbench.errors import BudgetExceededError, ConfigurationError
from rysbench.rys import (RysSection, build_rys, check_rys_axioms, exactness_consequence, iota_table,
                          mereo_difference, mereo_product, mereo_sum, overcross, overlap, proper_overlap,
                          proper_part, supplementation_check)


class TestMereology:
    def test_literal_overlap_is_total(self, m0):
        m = build_rys(m0, mode='literal')
        assert m.bottom == 0
        assert overlap(m, m0.universe.subset('a'), m0.universe.subset('c'))

    def test_nonempty_witness_overlap_is_meeting(self, m0):
        m = build_rys(m0, mode='nonempty-witness')
        u = m0.universe
        assert not overlap(m, u.subset('a'), u.subset('c'))
        assert overlap(m, u.subset('ab'), u.subset('bc'))
        assert not overlap(m, 0, u.full)

    def test_proper_part(self, m0):
        m = build_rys(m0)
        u = m0.universe
        assert proper_part(m, u.subset('a'), u.subset('ab'))
        assert not proper_part(m, u.subset('ab'), u.subset('ab'))

    def test_unknown_mode(self, m0):
        with pytest.raises(ConfigurationError):
            build_rys(m0, mode='fuzzy')

    def test_matrix_bound(self):
        from rysbench.config import Settings
        from rysbench.model import ModelContext
        ctx = ModelContext.from_blocks('abcd', ['ab', 'cd'], Settings(matrix_bound=3))
        with pytest.raises(BudgetExceededError):
            build_rys(ctx)

    def test_proper_overlap_is_mutual_overcross(self, m0):
        for mode in ('literal', 'nonempty-witness'):
            m = build_rys(m0, mode=mode)
            for x in range(m.size):
                for y in range(m.size):
                    assert proper_overlap(m, x, y) == (overcross(m, x, y) and overcross(m, y, x))

    def test_exact_elements_are_definables(self, m0):
        assert exactness_consequence(build_rys(m0), 1) == m0.definables


class TestDescriptions:
    def test_literal_sum_is_multiple(self, m0):
        m = build_rys(m0, mode='literal')
        u = m0.universe
        result = mereo_sum(m, u.subset('a'), u.subset('c'))
        assert result.status == 'multiple'
        assert not result.defined

    def test_nonempty_witness_operations_are_set_operations(self, m0):
        m = build_rys(m0, mode='nonempty-witness')
        u = m0.universe
        x, y = u.subset('abc'), u.subset('cd')
        assert mereo_sum(m, x, y).value == x | y
        assert mereo_product(m, x, y).value == x & y
        assert mereo_difference(m, x, y).value == x & ~y

    def test_disjoint_product_is_least_element(self, m0):
        m = build_rys(m0, mode='nonempty-witness')
        u = m0.universe
        assert mereo_product(m, u.subset('a'), u.subset('c')).value == 0

    def test_iota_table_matches_scalar(self, m0):
        m = build_rys(m0, mode='nonempty-witness')
        value, count = iota_table(m, 'sum')
        for x in (0, 3, 7, 20):
            for y in (1, 4, 31):
                single = mereo_sum(m, x, y)
                assert count[x, y] == single.candidates
                assert value[x, y] == (single.value if single.defined else -1)

    def test_closed_forms_on_random_partitions(self, six_element_partitions):
        for ctx in six_element_partitions:
            m = build_rys(ctx, mode='nonempty-witness')
            masks = np.arange(m.size)
            x, y = np.meshgrid(masks, masks, indexing='ij')
            assert np.array_equal(iota_table(m, 'sum')[0], x | y)
            assert np.array_equal(iota_table(m, 'product')[0], x & y)
            assert np.array_equal(iota_table(m, 'difference')[0], x & ~y)

    def test_literal_sums_are_multiple(self, six_element_partitions):
        for ctx in six_element_partitions:
            _, count = iota_table(build_rys(ctx, mode='literal'), 'sum')
            assert (count > 1).all()

    def test_unknown_description(self, m0):
        with pytest.raises(ConfigurationError):
            iota_table(build_rys(m0), 'quotient')


class TestSupplementation:
    def test_weak_holds_with_nonempty_witnesses(self, m0):
        report = supplementation_check(build_rys(m0, mode='nonempty-witness'))
        assert report.weak.holds
        assert report.weak.witness is not None

    def test_witness_is_the_difference(self, m0):
        report = supplementation_check(build_rys(m0, mode='nonempty-witness'))
        for verdict in (report.weak, report.strict):
            x, y, z = verdict.witness
            assert z != 0
            assert z == x & ~y

    def test_empty_object_never_witnesses(self, m0):
        u = m0.universe
        section = RysSection(parthood=tuple((x, y) for x in range(32) for y in range(32)
                                            if x & ~y == 0 and x != u.subset('c')))
        m = build_rys(m0, section, mode='nonempty-witness')
        report = supplementation_check(m)
        assert not report.weak.holds
        assert report.weak.counterexample == (u.subset('c'), 0)

    def test_strict_note_for_set_parthood(self, m0):
        for mode in ('literal', 'nonempty-witness'):
            report = supplementation_check(build_rys(m0, mode=mode))
            assert report.strict.holds
            assert 'x − y' in report.note

    def test_weak_fails_literally(self, m0):
        report = supplementation_check(build_rys(m0, mode='literal'))
        assert not report.weak.holds
        assert report.weak.counterexample is not None


class TestAxioms:
    def test_classical_model_passes(self, m0):
        for mode in ('literal', 'nonempty-witness'):
            report = check_rys_axioms(build_rys(m0, mode=mode))
            assert report.passed, [r.name for r in report.failures()]

    def test_agreement_is_informational(self, m0):
        report = check_rys_axioms(build_rys(m0, mode='literal'))
        agreement = next(r for r in report.results if r.name == 'sum-agreement')
        assert agreement.informational
        assert not agreement.holds
        assert 'multiple' in agreement.note

    def test_cover_family_breaks_shared_surjectivity(self, m0_cover):
        report = check_rys_axioms(build_rys(m0_cover))
        failed = {(r.name, r.family) for r in report.failures()}
        assert ('surjectivity-shared', 2) in failed
        assert ('contraction', 2) not in failed

    def test_swapped_family_breaks_contraction(self, m0):
        from rysbench.model import FamilyKind, FamilySpec, ModelContext, classical_upper
        spec = FamilySpec(1, FamilyKind.USER_TABLE,
                          lower_table={a: classical_upper(m0, a) for a in range(32)},
                          upper_table={a: a for a in range(32)})
        ctx = ModelContext(m0.universe, m0.partition, families=[spec])
        report = check_rys_axioms(build_rys(ctx))
        contraction = next(r for r in report.results if r.name == 'contraction')
        assert not contraction.holds
        assert contraction.counterexample == (m0.universe.subset('a'),)
        assert contraction.family == 1

    def test_user_parthood_breaking_antisymmetry(self, m0):
        u = m0.universe
        pairs = tuple((x, y) for x in range(32) for y in range(32) if x & ~y == 0)
        section = RysSection(parthood=pairs + ((u.subset('ab'), u.subset('a')),))
        report = check_rys_axioms(build_rys(m0, section))
        names = {r.name for r in report.failures()}
        assert 'antisymmetry' in names

    def test_random_partitions(self, small_partitions):
        for ctx in small_partitions:
            assert check_rys_axioms(build_rys(ctx, mode='nonempty-witness')).passed
