"""Tests for rysbench.verify.dsl: suite parsing, printing and the bundled suites."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rysbench.errors import ConfigurationError, SuiteSyntaxError
from rysbench.verify.dsl import (BUILTIN_SUITES, App, Const, Equation, TypeAtom, Var, builtin_suite_text,
                                 load_builtin_suite, parse_identity, parse_suite, print_identity,
                                 print_suite)


class TestParse:
    def test_full_line(self):
        qi = parse_identity('[bm] "■x ⊕ y = y" tau1 x ; tau2 y ; join(x, y) = y => join(bup(x), y) = y')
        assert qi.label == 'bm'
        assert qi.anchor == '■x ⊕ y = y'
        assert not qi.disputed
        assert len(qi.premises) == 3
        assert qi.premises[0].atoms == (TypeAtom(1, Var('x')),)
        assert qi.conclusion.atoms == (Equation(App('join', (App('bup', (Var('x'),)), Var('y'))), Var('y')),)
        assert qi.variables() == ('x', 'y')

    def test_constants_and_disputed_marker(self):
        qi = parse_identity('[q]? snot(zero) = one')
        assert qi.disputed
        assert qi.premises == ()
        assert qi.conclusion.atoms[0].lhs == App('snot', (Const('zero'),))
        assert qi.variables() == ()

    def test_disjunctive_premise(self):
        qi = parse_identity('tau1 x ; meet(one, x) = y | y = join(x, zero) => tau2 y')
        assert len(qi.premises[1].atoms) == 2
        assert qi.name == 'line 1'

    def test_comments_and_blank_lines(self):
        text = '# heading\n\n[a] x = x\n   # indented comment\n[b] y = y  # trailing\n'
        suite = parse_suite(text)
        assert [qi.label for qi in suite] == ['a', 'b']
        assert [qi.line for qi in suite] == [3, 5]

    def test_every_bad_line_is_reported(self):
        text = '[ok] x = x\n[bad] join(x) = x\n[worse] x = \n[unknown] frob(x) = x\n'
        with pytest.raises(SuiteSyntaxError) as info:
            parse_suite(text)
        errors = info.value.errors
        assert [e.line for e in errors] == [2, 3, 4]
        assert 'join takes 2' in errors[0].message
        assert errors[0].column == 6
        assert "unknown operation 'frob'" in errors[2].message

    def test_bare_operation_name(self):
        with pytest.raises(SuiteSyntaxError, match='without arguments'):
            parse_suite('lup = x')

    def test_parse_identity_needs_one(self):
        with pytest.raises(ConfigurationError):
            parse_identity('x = x\ny = y')


class TestPrint:
    def test_canonical_form(self):
        qi = parse_identity('[t]?  "anchor"   tau2 x;tau2 y=>  rnot(join(x,y)) = meet(rnot(x),rnot(y))')
        assert print_identity(qi) == (
            '[t]? "anchor" tau2 x ; tau2 y => rnot(join(x, y)) = meet(rnot(x), rnot(y))')

    @pytest.mark.parametrize('name', sorted(BUILTIN_SUITES))
    def test_builtin_suites_reprint(self, name):
        suite = load_builtin_suite(name)
        assert parse_suite(print_suite(suite)) == suite

    @settings(max_examples=60, deadline=None)
    @given(st.recursive(
        st.sampled_from(['x', 'y', 'z', 'bot', 'one']),
        lambda inner: st.one_of(
            st.builds(lambda op, a: f'{op}({a})', st.sampled_from(['lup', 'bup', 'snot', 'rnot']), inner),
            st.builds(lambda op, a, b: f'{op}({a}, {b})',
                      st.sampled_from(['join', 'meet', 'rimp', 'rimpb']), inner, inner)),
        max_leaves=6))
    def test_generated_terms_reprint(self, term):
        line = f'[gen] "g" tau1 x => {term} = x'
        qi = parse_identity(line)
        assert print_identity(qi) == line


class TestBuiltinSuites:
    def test_unknown_suite(self):
        with pytest.raises(ConfigurationError, match='unknown built-in suite'):
            builtin_suite_text('nope')

    def test_cera_theorem_contents(self):
        labels = [qi.label for qi in load_builtin_suite('cera-theorem')]
        for label in ('type-1', 'ov-1.as-printed', 'ov-1.involution', 'qov-2.zero', 'ter(2).distrib',
                      'bi(1).de-morgan', 'bm', 'hra1'):
            assert label in labels
        disputed = [qi.label for qi in load_builtin_suite('cera-theorem') if qi.disputed]
        assert disputed == ['ov-1.as-printed', 'ov-1.involution']

    def test_aera_axioms_concatenates(self):
        parts = sum(len(load_builtin_suite(p)) for p in BUILTIN_SUITES['aera-axioms'])
        assert len(load_builtin_suite('aera-axioms')) == parts

    def test_labels_are_unique(self):
        for name in BUILTIN_SUITES:
            labels = [qi.label for qi in load_builtin_suite(name)]
            assert len(labels) == len(set(labels)), name
