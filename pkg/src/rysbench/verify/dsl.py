"""
Quasi-identity suite files: AST, parser and printer.

Suites are parsed line by line with the lark grammar ``quasi.lark``.  Every
line that fails to parse becomes a :class:`~rysbench.errors.ParseError`
(line 1-based, column 0-based); all of them are raised together as a
:class:`~rysbench.errors.SuiteSyntaxError`.

``print_identity`` writes the canonical form of an identity and
``parse_suite(print_suite(s)) == s`` for every parsed suite.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterator, Union

from lark import Lark, Transformer, UnexpectedInput
from lark.exceptions import VisitError

from rysbench.algebra import BINARY_OPS, CONSTANTS, UNARY_OPS
from rysbench.errors import ConfigurationError, ParseError, SuiteSyntaxError

logger = logging.getLogger(__name__)

BUILTIN_SUITES = {
    'cera-theorem': ('cera-theorem',),
    'pre-rough': ('pre-rough',),
    'boolean-topological': ('boolean-topological',),
    'aera-in': ('aera-in',),
    'aera-axioms': ('pre-rough', 'boolean-topological', 'aera-in'),
}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    op: str
    args: tuple[Term, ...]


Term = Union[Var, Const, App]


@dataclass(frozen=True)
class TypeAtom:
    tag: int
    term: Term


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term


Atom = Union[TypeAtom, Equation]


@dataclass(frozen=True)
class Clause:
    """A disjunction of atoms."""
    atoms: tuple[Atom, ...]


@dataclass(frozen=True)
class QuasiIdentity:
    premises: tuple[Clause, ...]
    conclusion: Clause
    label: str = ''
    anchor: str = ''
    disputed: bool = False
    line: int = field(default=0, compare=False)

    @property
    def name(self) -> str:
        return self.label or f'line {self.line}'

    def variables(self) -> tuple[str, ...]:
        """Variable names in order of first appearance."""
        seen: dict[str, None] = {}
        for clause in (*self.premises, self.conclusion):
            for atom in clause.atoms:
                for term in _atom_terms(atom):
                    for name in _term_variables(term):
                        seen.setdefault(name)
        return tuple(seen)


def _atom_terms(atom: Atom) -> tuple[Term, ...]:
    return (atom.term,) if isinstance(atom, TypeAtom) else (atom.lhs, atom.rhs)


def _term_variables(term: Term) -> Iterator[str]:
    if isinstance(term, Var):
        yield term.name
    elif isinstance(term, App):
        for arg in term.args:
            yield from _term_variables(arg)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_ARITY = {**{op: 1 for op in UNARY_OPS}, **{op: 2 for op in BINARY_OPS}}


class _SyntaxProblem(Exception):
    def __init__(self, column: int, message: str):
        super().__init__(message)
        self.column = column
        self.message = message


class _Builder(Transformer):
    def app(self, children):
        name, *args = children
        op = str(name)
        if op not in _ARITY:
            raise _SyntaxProblem(name.column - 1, f'unknown operation {op!r}')
        if len(args) != _ARITY[op]:
            raise _SyntaxProblem(name.column - 1, f'{op} takes {_ARITY[op]} argument(s), got {len(args)}')
        return App(op, tuple(args))

    def name(self, children):
        (token,) = children
        text = str(token)
        if text in _ARITY:
            raise _SyntaxProblem(token.column - 1, f'operation {text!r} used without arguments')
        return Const(text) if text in CONSTANTS else Var(text)

    def type_atom(self, children):
        tau, term = children
        return TypeAtom(int(str(tau)[-1]), term)

    def equation(self, children):
        return Equation(*children)

    def disjunction(self, children):
        return Clause(tuple(children))

    def premises(self, children):
        return tuple(children)

    def clauses(self, children):
        if len(children) == 1:
            return (), children[0]
        return children[0], children[1]

    def header(self, children):
        label, anchor, disputed = '', '', False
        for token in children:
            if token.type == 'LABEL':
                label = str(token)[1:-1].strip()
            elif token.type == 'DISPUTED':
                disputed = True
            elif token.type == 'ANCHOR':
                anchor = str(token)[1:-1]
        return label, anchor, disputed

    def start(self, children):
        label, anchor, disputed = children[0] if len(children) == 2 else ('', '', False)
        premises, conclusion = children[-1]
        return QuasiIdentity(premises, conclusion, label, anchor, disputed)


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark.open_from_package('rysbench.verify', 'quasi.lark', parser='lalr')


def _parse_line(text: str, line: int) -> QuasiIdentity:
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as exc:
        message = str(exc).strip().splitlines()[0]
        raise _SyntaxProblem(max(exc.column - 1, 0), message) from None
    try:
        qi = _Builder().transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None
    return QuasiIdentity(qi.premises, qi.conclusion, qi.label, qi.anchor, qi.disputed, line)


def _meaningful(text: str) -> bool:
    stripped = text.strip()
    return bool(stripped) and not stripped.startswith('#')


def parse_suite(text: str) -> list[QuasiIdentity]:
    """Parse a whole suite, one quasi-identity per non-blank, non-comment line."""
    identities: list[QuasiIdentity] = []
    errors: list[ParseError] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        if not _meaningful(raw):
            continue
        try:
            identities.append(_parse_line(raw, number))
        except _SyntaxProblem as exc:
            errors.append(ParseError(line=number, column=exc.column, message=exc.message))
    if errors:
        raise SuiteSyntaxError(errors)
    logger.debug('parsed %d quasi-identities', len(identities))
    return identities


def parse_identity(text: str) -> QuasiIdentity:
    identities = parse_suite(text)
    if len(identities) != 1:
        raise ConfigurationError(f'expected exactly one quasi-identity, found {len(identities)}')
    return identities[0]


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def print_term(term: Term) -> str:
    if isinstance(term, App):
        return f'{term.op}({", ".join(print_term(a) for a in term.args)})'
    return term.name


def print_atom(atom: Atom) -> str:
    if isinstance(atom, TypeAtom):
        return f'tau{atom.tag} {print_term(atom.term)}'
    return f'{print_term(atom.lhs)} = {print_term(atom.rhs)}'


def print_clause(clause: Clause) -> str:
    return ' | '.join(print_atom(a) for a in clause.atoms)


def print_identity(qi: QuasiIdentity) -> str:
    head = []
    if qi.label or qi.disputed:
        head.append(f'[{qi.label}]' + ('?' if qi.disputed else ''))
    if qi.anchor:
        head.append(f'"{qi.anchor}"')
    body = print_clause(qi.conclusion)
    if qi.premises:
        body = ' ; '.join(print_clause(c) for c in qi.premises) + ' => ' + body
    return ' '.join(head + [body])


def print_suite(identities: list[QuasiIdentity]) -> str:
    return ''.join(print_identity(qi) + '\n' for qi in identities)


# ---------------------------------------------------------------------------
# Built-in suites
# ---------------------------------------------------------------------------

def builtin_suite_text(name: str) -> str:
    try:
        parts = BUILTIN_SUITES[name]
    except KeyError:
        raise ConfigurationError(
            f'unknown built-in suite {name!r}; expected one of {", ".join(BUILTIN_SUITES)}') from None
    folder = resources.files('rysbench.verify').joinpath('suites')
    return ''.join(folder.joinpath(f'{part}.qid').read_text(encoding='utf-8') for part in parts)


def load_builtin_suite(name: str) -> list[QuasiIdentity]:
    return parse_suite(builtin_suite_text(name))
