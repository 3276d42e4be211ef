"""
Checking quasi-identities against a finite partial algebra.

Terms are compiled to numpy closures over the algebra's sentinel tables
(index ``size`` stands for "undefined" and absorbs every operation), so a
whole block of assignments is evaluated at once.

Semantics:

* an equation is true when both sides are defined and equal;
* a type atom is true when its term is defined and carries the tag;
* an undefined atom in a premise makes the premise false;
* an assignment is *active* when every premise holds;
* an active assignment whose conclusion is false *fails*, unless an atom of
  the conclusion was undefined, in which case it is *undefined-encountered*.

The verdict of an identity is ``fails`` if some active assignment fails,
otherwise ``undefined-encountered`` if some active assignment met an
undefined conclusion atom, otherwise ``holds``.  Assignments are ordered
lexicographically over the variables in order of first appearance, each
ranging over element indices in canonical order; reported assignments are
the first ones in that order.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from rysbench.algebra import FiniteAlgebra
from rysbench.config import Settings
from rysbench.errors import BudgetExceededError, ConfigurationError
from rysbench.verify.dsl import (Clause, Const, Equation, QuasiIdentity, Term, TypeAtom, Var,
                                 load_builtin_suite)

logger = logging.getLogger(__name__)

HOLDS = 'holds'
FAILS = 'fails'
UNDEFINED_ENCOUNTERED = 'undefined-encountered'
MODES = ('exhaustive', 'sampled')

_CHUNK = 1 << 16
_SAMPLE_CHUNK = 4096


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class IdentityResult:
    label: str
    anchor: str
    verdict: str
    checked: int
    active: int
    counterexample: dict[str, dict] | None = None
    undefined_at: dict[str, dict] | None = None
    disputed: bool = False
    millis: float | None = None
    line: int = 0

    def to_dict(self) -> dict:
        data = {'label': self.label, 'anchor': self.anchor, 'verdict': self.verdict,
                'checked': self.checked, 'active': self.active}
        if self.disputed:
            data['disputed'] = True
        if self.counterexample is not None:
            data['counterexample'] = self.counterexample
        if self.undefined_at is not None:
            data['undefined_at'] = self.undefined_at
        if self.millis is not None:
            data['millis'] = self.millis
        return data


@dataclass
class VerifyReport:
    suite: str
    model: str
    mode: str
    seed: int | None
    results: list[IdentityResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when every undisputed identity holds."""
        return all(r.verdict == HOLDS for r in self.results if not r.disputed)

    def failures(self) -> list[IdentityResult]:
        return [r for r in self.results if r.verdict != HOLDS and not r.disputed]

    def disputed(self) -> list[IdentityResult]:
        return [r for r in self.results if r.disputed]

    def to_dict(self) -> dict:
        data = {'suite': self.suite, 'model': self.model, 'mode': self.mode}
        if self.seed is not None:
            data['seed'] = self.seed
        data['passed'] = self.passed
        data['results'] = [r.to_dict() for r in self.results]
        return data


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------

Env = dict[str, np.ndarray]
Compiled = Callable[[Env, int], np.ndarray]


class _Compiler:
    def __init__(self, alg: FiniteAlgebra):
        self.alg = alg
        self.unary, self.binary, self.tags = alg.extended
        self.undefined = alg.size

    def term(self, term: Term) -> Compiled:
        if isinstance(term, Var):
            name = term.name
            return lambda env, n: env[name]
        if isinstance(term, Const):
            value = self.alg.constants[term.name]
            return lambda env, n: np.full(n, value, dtype=np.int64)
        args = [self.term(a) for a in term.args]
        if len(args) == 1:
            table = self.unary[term.op]
            (arg,) = args
            return lambda env, n: table[arg(env, n)]
        table = self.binary[term.op]
        left, right = args
        return lambda env, n: table[left(env, n), right(env, n)]

    def clause(self, clause: Clause) -> Callable[[Env, int], tuple[np.ndarray, np.ndarray]]:
        """Compile to a function returning (true, undefined) masks."""
        parts = []
        for atom in clause.atoms:
            if isinstance(atom, TypeAtom):
                parts.append(self._type_atom(atom))
            else:
                parts.append(self._equation(atom))

        def evaluate(env, n):
            true = np.zeros(n, dtype=bool)
            undefined = np.zeros(n, dtype=bool)
            for part in parts:
                t, u = part(env, n)
                true |= t
                undefined |= u
            return true, undefined
        return evaluate

    def _type_atom(self, atom: TypeAtom):
        term, tags, tag, bad = self.term(atom.term), self.tags, atom.tag, self.undefined

        def evaluate(env, n):
            value = term(env, n)
            return tags[value] == tag, value == bad
        return evaluate

    def _equation(self, atom: Equation):
        lhs, rhs, bad = self.term(atom.lhs), self.term(atom.rhs), self.undefined

        def evaluate(env, n):
            a, b = lhs(env, n), rhs(env, n)
            undefined = (a == bad) | (b == bad)
            return (a == b) & ~undefined, undefined
        return evaluate


def variable_domains(alg: FiniteAlgebra, qi: QuasiIdentity) -> dict[str, np.ndarray]:
    """Element indices each variable ranges over.

    A premise consisting of the single atom ``tau<i> v`` restricts ``v`` to
    the elements of tag ``i``; this only removes assignments on which the
    premise is false.
    """
    domains = {v: np.arange(alg.size, dtype=np.int64) for v in qi.variables()}
    for clause in qi.premises:
        if len(clause.atoms) == 1 and isinstance(clause.atoms[0], TypeAtom) \
                and isinstance(clause.atoms[0].term, Var):
            atom = clause.atoms[0]
            domain = domains[atom.term.name]
            domains[atom.term.name] = domain[alg.tags[domain] == atom.tag]
    return domains


@dataclass
class _Partial:
    """Outcome over one block of assignments; merged by taking minima."""
    checked: int = 0
    active: int = 0
    first_failure: int | None = None
    first_undefined: int | None = None

    def merge(self, other: _Partial) -> _Partial:
        return _Partial(self.checked + other.checked, self.active + other.active,
                        _min(self.first_failure, other.first_failure),
                        _min(self.first_undefined, other.first_undefined))


def _min(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class _Check:
    def __init__(self, alg: FiniteAlgebra, qi: QuasiIdentity):
        compiler = _Compiler(alg)
        self.qi = qi
        self.names = qi.variables()
        self.domains = variable_domains(alg, qi)
        self.shape = tuple(int(self.domains[v].size) for v in self.names)
        self.total = int(np.prod(self.shape, dtype=object)) if self.names else 1
        self.premises = [compiler.clause(c) for c in qi.premises]
        self.conclusion = compiler.clause(qi.conclusion)

    def evaluate(self, positions: np.ndarray) -> _Partial:
        """Evaluate the assignments at the given flat positions."""
        n = positions.size
        if self.names:
            coords = np.unravel_index(positions, self.shape)
            env = {v: self.domains[v][c] for v, c in zip(self.names, coords)}
        else:
            env = {}
        active = np.ones(n, dtype=bool)
        for premise in self.premises:
            true, _ = premise(env, n)
            active &= true
        true, undefined = self.conclusion(env, n)
        failing = active & ~true & ~undefined
        meets_undefined = active & ~true & undefined
        return _Partial(n, int(active.sum()), _first(positions, failing), _first(positions, meets_undefined))

    def assignment(self, alg: FiniteAlgebra, position: int | None) -> dict[str, dict] | None:
        if position is None:
            return None
        if not self.names:
            return {}
        coords = np.unravel_index(position, self.shape)
        return {v: alg.describe(int(self.domains[v][c])) for v, c in zip(self.names, coords)}


def _first(positions: np.ndarray, mask: np.ndarray) -> int | None:
    hits = positions[mask]
    return int(hits.min()) if hits.size else None


# ---------------------------------------------------------------------------
# Drivers
# ---------------------------------------------------------------------------

def _run_blocks(blocks: list, work: Callable[..., _Partial], jobs: int) -> _Partial:
    result = _Partial()
    if jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=jobs, thread_name_prefix='rysbench-verify') as pool:
            for partial in pool.map(work, blocks):
                result = result.merge(partial)
    else:
        for block in blocks:
            result = result.merge(work(block))
    return result


def _exhaustive(check: _Check, settings: Settings) -> _Partial:
    if check.total > settings.budget:
        raise BudgetExceededError(
            f'{check.qi.name}: {check.total} assignments exceed the budget of {settings.budget}; '
            'use sampled mode or raise the budget')
    starts = list(range(0, check.total, _CHUNK))
    logger.debug('%s: %d assignments in %d block(s)', check.qi.name, check.total, len(starts))

    def work(start: int) -> _Partial:
        return check.evaluate(np.arange(start, min(start + _CHUNK, check.total), dtype=np.int64))
    return _run_blocks(starts, work, settings.jobs)


def _sampled(check: _Check, samples: int, seed: int, settings: Settings) -> _Partial:
    if not check.names:
        return check.evaluate(np.zeros(1, dtype=np.int64))
    sizes = [(start, min(_SAMPLE_CHUNK, samples - start)) for start in range(0, samples, _SAMPLE_CHUNK)]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    shape = check.shape

    def work(block) -> _Partial:
        (_, count), stream = block
        rng = np.random.default_rng(stream)
        coords = [rng.integers(0, dim, size=count) for dim in shape]
        return check.evaluate(np.ravel_multi_index(coords, shape).astype(np.int64))
    return _run_blocks(list(zip(sizes, streams)), work, settings.jobs)


def _algebra_of(target) -> tuple[FiniteAlgebra, Settings | None]:
    if isinstance(target, FiniteAlgebra):
        return target, None
    return target.algebra, target.ctx.settings


def check_quasi_identity(target, qi: QuasiIdentity, mode: str = 'exhaustive', samples: int | None = None,
                         seed: int | None = None, settings: Settings | None = None) -> IdentityResult:
    """Check one quasi-identity on a :class:`CeraStructure` or a :class:`FiniteAlgebra`."""
    alg, own = _algebra_of(target)
    settings = settings or own or Settings()
    if mode not in MODES:
        raise ConfigurationError(f'unknown mode {mode!r}; expected one of {", ".join(MODES)}')
    check = _Check(alg, qi)
    started = time.perf_counter()
    if mode == 'exhaustive':
        partial = _exhaustive(check, settings)
    else:
        partial = _sampled(check, samples or settings.samples, settings.seed if seed is None else seed, settings)
    millis = round((time.perf_counter() - started) * 1000.0, 3) if settings.timing else None

    if partial.first_failure is not None:
        verdict = FAILS
    elif partial.first_undefined is not None:
        verdict = UNDEFINED_ENCOUNTERED
    else:
        verdict = HOLDS
    return IdentityResult(
        label=qi.name, anchor=qi.anchor, verdict=verdict, checked=partial.checked, active=partial.active,
        counterexample=check.assignment(alg, partial.first_failure),
        undefined_at=check.assignment(alg, partial.first_undefined),
        disputed=qi.disputed, millis=millis, line=qi.line)


def run_suite(target, identities: Iterable[QuasiIdentity], suite: str = '<suite>', mode: str = 'exhaustive',
              samples: int | None = None, seed: int | None = None,
              settings: Settings | None = None) -> VerifyReport:
    alg, own = _algebra_of(target)
    settings = settings or own or Settings()
    seed = settings.seed if seed is None else seed
    logger.info('checking suite %s on %s (%s)', suite, alg.name, mode)
    report = VerifyReport(suite, alg.name, mode, seed if mode == 'sampled' else None)
    for qi in identities:
        result = check_quasi_identity(alg, qi, mode, samples, seed, settings)
        logger.debug('%s: %s (%d checked)', result.label, result.verdict, result.checked)
        report.results.append(result)
    logger.info('suite %s: %d of %d hold', suite,
                sum(r.verdict == HOLDS for r in report.results), len(report.results))
    return report


def run_builtin_suite(target, suite: str, mode: str = 'exhaustive', samples: int | None = None,
                      seed: int | None = None, settings: Settings | None = None) -> VerifyReport:
    """Run one of the bundled suites (``cera-theorem``, ``aera-axioms``, ...)."""
    return run_suite(target, load_builtin_suite(suite), suite, mode, samples, seed, settings)
