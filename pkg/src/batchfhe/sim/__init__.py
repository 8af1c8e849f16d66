"""Executable semantics: the reference interpreter, the IR interpreter and the circuit simulator."""

from .reference import InputError, exec_reference
from .simulator import ExecutionTrace, SimCiphertext, apply_op, decrypt_sim, encrypt_sim, exec_circuit

__all__ = ["InputError", "exec_reference", "ExecutionTrace", "SimCiphertext", "apply_op",
           "decrypt_sim", "encrypt_sim", "exec_circuit"]
