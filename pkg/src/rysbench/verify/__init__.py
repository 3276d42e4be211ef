"""Quasi-identity checking, isomorphism and representation search."""
from rysbench.verify.dsl import (QuasiIdentity, load_builtin_suite, parse_identity, parse_suite,
                                 print_identity, print_suite)
from rysbench.verify.evaluate import (FAILS, HOLDS, UNDEFINED_ENCOUNTERED, IdentityResult, VerifyReport,
                                      check_quasi_identity, run_builtin_suite, run_suite)
from rysbench.verify.iso import IsoResult, iso_check
from rysbench.verify.search import RepresentationResult, representation_search

__all__ = [
    'FAILS', 'HOLDS', 'UNDEFINED_ENCOUNTERED',
    'IdentityResult', 'IsoResult', 'QuasiIdentity', 'RepresentationResult', 'VerifyReport',
    'check_quasi_identity', 'iso_check', 'load_builtin_suite', 'parse_identity', 'parse_suite',
    'print_identity', 'print_suite', 'representation_search', 'run_builtin_suite', 'run_suite',
]
