"""Gate definitions, the built-in gate sets and unitary comparison."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, ParamArity, UnknownGate, UnknownGateSet

UNITARY_TOL = 1e-9
R2 = 1 / math.sqrt(2)


def u1_matrix(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -1j * np.exp(-1j * phi) * s], [-1j * np.exp(1j * phi) * s, c]],
        dtype=complex,
    )


def rz_matrix(lam: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * lam), np.exp(0.5j * lam)])


def zz_matrix() -> np.ndarray:
    # exp(-i pi/4 Z⊗Z)
    return np.diag(np.exp(-0.25j * math.pi * np.array([1, -1, -1, 1])))


FACTORIES: dict[str, tuple[int, Callable[..., np.ndarray]]] = {
    "u1": (2, u1_matrix),
    "rz": (1, rz_matrix),
    "zz": (0, zz_matrix),
}


@dataclass(frozen=True)
class GateDefinition:
    """A gate with a fixed ``matrix`` or a ``factory`` taking its parameters.

    Matrices use row-major layout; the first target is the most significant
    bit of the local basis index.
    """

    name: str
    arity: int
    param_count: int = 0
    matrix: np.ndarray | None = field(default=None, compare=False)
    factory: Callable[..., np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if (self.matrix is None) == (self.factory is None):
            raise ValueError(f"gate {self.name!r} needs exactly one of matrix/factory")
        if self.matrix is not None:
            m = np.asarray(self.matrix, dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @classmethod
    def with_parameters(cls, name: str, arity: int, param_count: int, factory) -> GateDefinition:
        return cls(name, arity, param_count, factory=factory)

    def unitary(self, params=()) -> np.ndarray:
        if len(params) != self.param_count:
            raise ParamArity(f"gate {self.name!r} takes {self.param_count} parameter(s), got {len(params)}")
        if self.matrix is not None:
            return self.matrix
        return np.asarray(self.factory(*params), dtype=complex)


@dataclass(frozen=True, eq=False)
class GateSet:
    name: str
    defs: dict[str, GateDefinition]

    def __post_init__(self):
        if "done" in self.defs:
            raise ValueError("'done' is reserved and cannot name a gate")
        for key, d in self.defs.items():
            if key != d.name:
                raise ValueError(f"gate registered as {key!r} is named {d.name!r}")

    @classmethod
    def of(cls, name: str, *defs: GateDefinition) -> GateSet:
        return cls(name, {d.name: d for d in defs})

    def __contains__(self, gate_id: str) -> bool:
        return gate_id in self.defs

    def __getitem__(self, gate_id: str) -> GateDefinition:
        try:
            return self.defs[gate_id]
        except KeyError:
            raise UnknownGate(f"gate {gate_id!r} not in gate set {self.name!r}") from None


X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
S = np.diag([1, 1j])
H = np.array([[R2, R2], [R2, -R2]], dtype=complex)
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def _builtin(name: str) -> GateSet:
    fixed = GateDefinition
    if name == "toy":
        return GateSet.of("toy", fixed("flip", 1, matrix=X), fixed("mix", 1, matrix=H), fixed("entangle", 2, matrix=CX))
    if name == "cliffords":
        return GateSet.of(
            "cliffords",
            fixed("x", 1, matrix=X),
            fixed("y", 1, matrix=Y),
            fixed("z", 1, matrix=Z),
            fixed("s", 1, matrix=S),
            fixed("h", 1, matrix=H),
            fixed("cx", 2, matrix=CX),
            fixed("cz", 2, matrix=CZ),
        )
    if name == "trapped-ion":
        return GateSet.of(
            "trapped-ion",
            GateDefinition.with_parameters("u1", 1, 2, u1_matrix),
            GateDefinition.with_parameters("rz", 1, 1, rz_matrix),
            fixed("zz", 2, matrix=zz_matrix()),
        )
    if name == "neutral-atom":
        return GateSet.of(
            "neutral-atom",
            GateDefinition.with_parameters("rz", 1, 1, rz_matrix),
            fixed("sx", 1, matrix=SX),
            fixed("cz", 2, matrix=CZ),
        )
    raise UnknownGateSet(f"unknown gate set {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}")


BUILTIN_NAMES = ("toy", "cliffords", "trapped-ion", "neutral-atom")
_CACHE: dict[str, GateSet] = {}


def builtin_gateset(name: str) -> GateSet:
    if name not in _CACHE:
        _CACHE[name] = _builtin(name)
    return _CACHE[name]


def unitary_of(gateset: GateSet, gate_id: str, params=()) -> np.ndarray:
    return gateset[gate_id].unitary(tuple(params))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) <= tol


def _phase_match(u: np.ndarray, v: np.ndarray, tol: float) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[idx]) == 0:
        return bool(np.max(np.abs(u)) <= tol)
    ratio = u[idx] / v[idx]
    phase = ratio / abs(ratio) if ratio != 0 else 1.0
    return bool(np.max(np.abs(u - phase * v)) <= tol)


def equivalent_up_to_phase(u, v, tol: float = UNITARY_TOL) -> bool:
    """True when ``u ≈ e^{iα} v`` entrywise within ``tol`` for some α.

    The phase is read off the largest-magnitude entry; trying both argument
    orders keeps the relation symmetric.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionMismatch(f"shapes {u.shape} and {v.shape} differ")
    return _phase_match(u, v, tol) or _phase_match(v, u, tol)


def _parse_entry(e) -> complex:
    if isinstance(e, (list, tuple)):
        re_, im = e
        return complex(re_, im)
    if isinstance(e, str):
        return complex(e.replace(" ", "").replace("i", "j"))
    return complex(e)


def gateset_from_dict(data: dict) -> GateSet:
    """Build a gate set from ``{name, gates: [{name, arity, params, matrix|factory}]}``.

    Matrix entries are numbers, ``[re, im]`` pairs or strings like ``"1-1j"``.
    Factories are limited to the built-in ids ``u1``, ``rz`` and ``zz``.
    """
    defs = []
    for g in data["gates"]:
        arity = int(g["arity"])
        params = int(g.get("params", 0))
        if "factory" in g:
            fid = g["factory"]
            if fid not in FACTORIES:
                raise ValueError(f"unknown factory {fid!r}; expected one of {sorted(FACTORIES)}")
            count, fn = FACTORIES[fid]
            if params != count:
                raise ValueError(f"factory {fid!r} takes {count} parameter(s), gate {g['name']!r} declares {params}")
            d = GateDefinition.with_parameters(g["name"], arity, params, fn)
            probe = d.unitary(tuple(0.3 * (i + 1) for i in range(params)))
        else:
            if params:
                raise ValueError(f"fixed-matrix gate {g['name']!r} cannot declare parameters")
            m = np.array([[_parse_entry(e) for e in row] for row in g["matrix"]], dtype=complex)
            d = GateDefinition(g["name"], arity, 0, matrix=m)
            probe = d.matrix
        if probe.shape != (2**arity, 2**arity):
            raise ValueError(f"gate {g['name']!r}: matrix shape {probe.shape} does not match arity {arity}")
        if not is_unitary(probe):
            raise ValueError(f"gate {g['name']!r} is not unitary")
        defs.append(d)
    return GateSet.of(data["name"], *defs)


def load_gateset(path: str | Path) -> GateSet:
    return gateset_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def resolve_gateset(name_or_path: str) -> GateSet:
    """Built-in name, or path to a JSON gate-set file."""
    if name_or_path in BUILTIN_NAMES:
        return builtin_gateset(name_or_path)
    p = Path(name_or_path)
    if p.suffix == ".json" or p.exists():
        return load_gateset(p)
    return builtin_gateset(name_or_path)
