"""Pure state of a stack of qubits, stored as a product of dense factors.

Every qubit starts in its own one-qubit factor.  A gate whose targets lie
in different factors merges them (Kronecker product); measuring a qubit
removes it from its factor.  The represented vector is the tensor product
of the factors, so semantics match a single dense vector while memory
scales with the largest entangled group rather than with every live qubit.

Global ordering: position 0 is the least significant bit of the dense
index; a newly allocated qubit becomes the most significant.
"""

from __future__ import annotations

import numpy as np

from . import kernels


class _Factor:
    __slots__ = ("psi", "qubits")

    def __init__(self, psi: np.ndarray, qubits: list[int]):
        self.psi = psi
        self.qubits = qubits  # local bit i holds global position qubits[i]


_KET0 = np.array([1.0, 0.0], dtype=complex)


class FactoredState:
    __slots__ = ("_where",)

    def __init__(self):
        self._where: list[_Factor] = []

    @property
    def n(self) -> int:
        return len(self._where)

    def factors(self) -> list[_Factor]:
        seen: dict[int, _Factor] = {}
        for f in self._where:
            seen.setdefault(id(f), f)
        return list(seen.values())

    def allocate(self) -> int:
        """Tensor a fresh |0> in as the most significant position."""
        pos = len(self._where)
        self._where.append(_Factor(_KET0.copy(), [pos]))
        return pos

    def _merge(self, a: _Factor, b: _Factor) -> _Factor:
        a.psi = np.kron(b.psi, a.psi)
        for p in b.qubits:
            self._where[p] = a
        a.qubits.extend(b.qubits)
        return a

    def apply(self, positions, u: np.ndarray, u_flat: np.ndarray | None = None) -> None:
        where = self._where
        f = where[positions[0]]
        for p in positions[1:]:
            g = where[p]
            if g is not f:
                f = self._merge(f, g)
        q = f.qubits
        if u_flat is None:
            u_flat = np.ascontiguousarray(u, dtype=complex).reshape(-1)
        k = len(positions)
        if k == 1:
            kernels.apply_1q(f.psi, q.index(positions[0]), u_flat)
        elif k == 2:
            kernels.apply_2q(f.psi, q.index(positions[0]), q.index(positions[1]), u_flat)
        else:
            f.psi = kernels.apply_matrix(f.psi, [q.index(p) for p in positions], u)

    def prob_one(self, pos: int) -> float:
        f = self._where[pos]
        return kernels.prob_one(f.psi, f.qubits.index(pos))

    def measure_last(self, u: float) -> int:
        """Born-sample the top qubit with uniform draw ``u``, collapse, drop it."""
        pos = len(self._where) - 1
        f = self._where[pos]
        bit = f.qubits.index(pos)
        b = 1 if u < kernels.prob_one(f.psi, bit) else 0
        f.psi = kernels.collapse(f.psi, bit, b)
        del f.qubits[bit]
        self._where.pop()
        return b

    def norms(self) -> list[float]:
        return [float(np.linalg.norm(f.psi)) for f in self.factors()]

    def max_factor_qubits(self) -> int:
        return max((len(f.qubits) for f in self.factors()), default=0)

    def dense(self) -> np.ndarray:
        """Materialize the full 2^n amplitude vector in global ordering."""
        n = self.n
        psi = np.ones(1, dtype=complex)
        order: list[int] = []
        for f in self.factors():
            psi = np.kron(f.psi, psi)
            order.extend(f.qubits)
        if n == 0:
            return psi
        # axis a of the reshaped tensor holds local bit n-1-a, i.e. position order[n-1-a]
        t = psi.reshape((2,) * n)
        src_positions = [order[n - 1 - a] for a in range(n)]
        perm = [src_positions.index(n - 1 - a) for a in range(n)]
        return np.ascontiguousarray(t.transpose(perm)).reshape(-1)
