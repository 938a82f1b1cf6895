"""Independent reference computations for the tests.

Nothing here goes through the package's state kernels: states are dense
tensors with one axis per named qubit, gates are applied with einsum.
"""

from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

from qkc.gatesets import builtin_gateset
from qkc.ir import Gate, Kernel


class DenseState:
    """Pure state over an ordered list of named qubits (first name = axis 0)."""

    def __init__(self, names):
        self.names = list(names)
        n = len(self.names)
        self.t = np.zeros((2,) * n, dtype=complex)
        self.t[(0,) * n] = 1.0

    @classmethod
    def from_vector(cls, names, vec):
        s = cls(names)
        s.t = np.asarray(vec, dtype=complex).reshape((2,) * len(names)).copy()
        return s

    def vector(self):
        return self.t.reshape(-1)

    def apply(self, u, targets):
        k = len(targets)
        axes = [self.names.index(q) for q in targets]
        ut = np.asarray(u, dtype=complex).reshape((2,) * (2 * k))
        out = np.tensordot(ut, self.t, axes=(list(range(k, 2 * k)), axes))
        self.t = np.moveaxis(out, list(range(k)), axes)

    def apply_gates(self, gates, gateset):
        for g in gates:
            self.apply(gateset[g.name].unitary(g.params), g.targets)
        return self


def embed(u, targets, order):
    """Full matrix of ``u`` on ``targets`` inside register ``order`` (order[0] most significant)."""
    n = len(order)
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        s = DenseState(order)
        s.t = np.zeros((2,) * n, dtype=complex)
        s.t[tuple(int(b) for b in format(col, f"0{n}b"))] = 1.0
        s.apply(u, targets)
        out[:, col] = s.vector()
    return out


def circuit_unitary(gates, gateset, order):
    dim = 2 ** len(order)
    return reduce(lambda acc, g: embed(gateset[g.name].unitary(g.params), g.targets, order) @ acc,
                  gates, np.eye(dim, dtype=complex))


def kron_lift(u, k, n):
    """Explicit Kronecker lift of a one-qubit ``u`` onto position ``k`` of ``n`` (position 0 = LSB)."""
    mats = [u if p == k else np.eye(2) for p in reversed(range(n))]
    return reduce(np.kron, mats)


def up_to_phase(a, b, tol):
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    overlap = np.vdot(b, a)
    if abs(overlap) < 1e-15:
        return np.max(np.abs(a)) <= tol and np.max(np.abs(b)) <= tol
    phase = overlap / abs(overlap)
    return np.max(np.abs(a - phase * b)) <= tol


# -- Hamming / Steane ---------------------------------------------------

def hamming_codewords():
    """All 16 words c with H c = 0, column j of H being binary(j + 1)."""
    words = []
    for bits in itertools.product((0, 1), repeat=7):
        s = 0
        for j, b in enumerate(bits):
            if b:
                s ^= j + 1
        if s == 0:
            words.append(bits)
    return words


def steane_logical_state(b, names):
    """(|c>) summed over codewords of weight parity b, normalized; names[j] holds bit j."""
    s = DenseState(names)
    s.t[:] = 0
    words = [w for w in hamming_codewords() if sum(w) % 2 == b]
    for w in words:
        s.t[tuple(w)] = 1 / np.sqrt(len(words))
    return s


def nearest_codeword_parity(bits):
    best = min(hamming_codewords(), key=lambda w: sum(x != y for x, y in zip(w, bits)))
    return sum(best) % 2


def gates_of(kernel: Kernel):
    """Gates in execution order, ignoring kernel structure."""
    out = []
    for ins in kernel.body:
        if isinstance(ins, Kernel):
            out.extend(gates_of(ins))
        else:
            out.append(ins)
    return out


CLIFFORDS = builtin_gateset("cliffords")
