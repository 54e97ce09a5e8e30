"""Quantum Teichmuller numerics: e_b, lattice operator checks, verification suites."""

from ._qteich import ModularParameter, QteichError, check_ids, compile_word, eb, inversion_factor, run_suite

__all__ = ["ModularParameter", "QteichError", "check_ids", "compile_word", "eb", "inversion_factor", "run_suite"]
