"""Pure-numpy versions of the compiled kernels (same signatures)."""

import numpy as np

NAME = "python"


def apply_1q(psi: np.ndarray, bit: int, u: np.ndarray) -> None:
    step = 1 << bit
    v = psi.reshape(-1, 2, step)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = u[0] * a + u[1] * b
    v[:, 1, :] = u[2] * a + u[3] * b


def apply_2q(psi: np.ndarray, hi: int, lo: int, u: np.ndarray) -> None:
    first, second = sorted((hi, lo))
    v = psi.reshape(-1, 2, 1 << (second - first - 1), 2, 1 << first)
    old = []
    for h in (0, 1):
        for lval in (0, 1):
            idx = (slice(None), h, slice(None), lval, slice(None)) if hi > lo else (slice(None), lval, slice(None), h, slice(None))
            old.append(idx)
    parts = np.stack([v[i] for i in old])
    new = np.tensordot(u.reshape(4, 4), parts, axes=1)
    for r, i in enumerate(old):
        v[i] = new[r]


def prob_one(psi: np.ndarray, bit: int) -> float:
    v = psi.reshape(-1, 2, 1 << bit)[:, 1, :]
    return float(np.vdot(v, v).real)


def collapse(psi: np.ndarray, bit: int, outcome: int) -> np.ndarray:
    out = psi.reshape(-1, 2, 1 << bit)[:, outcome, :].reshape(-1).copy()
    norm = np.vdot(out, out).real
    if norm > 0:
        out /= np.sqrt(norm)
    return out
