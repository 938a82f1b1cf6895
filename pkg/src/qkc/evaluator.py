"""Small-step evaluator for kernel programs.

A configuration holds the kernel stack, the measurement stack, the quantum
state and the qubit map.  Each call to :func:`step` applies exactly one of
the four rules: start a nested kernel, apply a gate, or end the current
kernel (measure its qubit and run the callback, which either finishes or
continues with a returned kernel).
"""

from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvariantViolation, StepBudgetExceeded, UnknownCallback
from .gatesets import GateSet, X, Y, Z, builtin_gateset
from .ir import CallbackRef, Gate, Kernel, Program
from .runtime import CallbackRegistry, MeasurementStack
from .state import FactoredState

START_KERNEL = "StartKernel"
QUANTUM_GATE = "QuantumGate"
END_DONE = "EndDone"
END_CONTINUE = "EndContinue"

DEFAULT_MAX_STEPS = 10**7
NORM_TOL = 1e-9

_X = X.reshape(-1).copy()
_Y = Y.reshape(-1).copy()
_Z = Z.reshape(-1).copy()


@dataclass(frozen=True)
class NoiseModel:
    """Independent Pauli channel on each gate target, plus a pre-measurement flip."""

    px: float = 0.0
    py: float = 0.0
    pz: float = 0.0
    pmx: float = 0.0

    def __post_init__(self):
        for name in ("px", "py", "pz", "pmx"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        if self.px + self.py + self.pz > 1.0 + 1e-12:
            raise ValueError("px + py + pz exceeds 1")

    @classmethod
    def parse(cls, text: str) -> NoiseModel:
        parts = [float(x) for x in text.split(",")]
        if len(parts) != 4:
            raise ValueError("noise needs four comma-separated values px,py,pz,pmx")
        return cls(*parts)

    @property
    def gate_noise(self) -> bool:
        return self.px + self.py + self.pz > 0


@dataclass
class StepRecord:
    """Snapshot of the configuration after one step.

    For the two end-of-kernel rules, ``callback_mstack`` is the stack the
    callback received (the measured bit on top), before it ran.
    """

    rule: str
    mstack: list[int]
    qubits: list[tuple[str, int]]
    callback: str | None = None
    bit: int | None = None
    callback_mstack: list[int] | None = None

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "mstack": self.mstack,
            "qubits": [list(q) for q in self.qubits],
            "callback": self.callback,
            "bit": self.bit,
            "callback_mstack": self.callback_mstack,
        }


class Frame:
    """Active kernel: its body, a cursor into it, and its callback."""

    __slots__ = ("body", "pc", "callback")

    def __init__(self, body: tuple, callback: CallbackRef):
        self.body = body
        self.pc = 0
        self.callback = callback

    @property
    def remaining(self) -> tuple:
        return self.body[self.pc:]


class Configuration:
    """Mutable evaluator state: ``(C, S, (psi, m))``.

    ``qubits[i]`` is the id at position ``i``; the head of the qubit map is
    always the last entry.
    """

    def __init__(self, gateset: GateSet):
        self.gateset = gateset
        self.kernel_stack: list[Frame] = []
        self.mstack = MeasurementStack()
        self.state = FactoredState()
        self.qubits: list[str] = []
        self.allocations = 0
        self.measurements = 0
        self._pos: dict[str, int] = {}
        self._shadowed: list[int | None] = []
        self._unitaries: dict = {}

    def qmap(self) -> list[tuple[str, int]]:
        """Head-first ``(qubit, position)`` pairs."""
        return [(q, i) for i, q in reversed(list(enumerate(self.qubits)))]

    def position(self, qubit: str) -> int:
        try:
            return self._pos[qubit]
        except KeyError:
            raise InvariantViolation(f"qubit {qubit!r} is not allocated") from None

    @property
    def is_final(self) -> bool:
        return not self.kernel_stack

    def _allocate(self, qubit: str) -> None:
        pos = self.state.allocate()
        self.qubits.append(qubit)
        self._shadowed.append(self._pos.get(qubit))
        self._pos[qubit] = pos
        self.allocations += 1

    def _release(self) -> str:
        qubit = self.qubits.pop()
        prev = self._shadowed.pop()
        if prev is None:
            del self._pos[qubit]
        else:
            self._pos[qubit] = prev
        self.measurements += 1
        return qubit

    def unitary(self, g: Gate):
        key = (g.name, g.params)
        hit = self._unitaries.get(key)
        if hit is None:
            gdef = self.gateset[g.name]
            u = gdef.unitary(g.params)
            hit = (gdef.arity, u, np.ascontiguousarray(u, dtype=complex).reshape(-1))
            self._unitaries[key] = hit
        return hit

    def check(self) -> None:
        """Raise :class:`InvariantViolation` if a structural invariant fails."""
        n = self.state.n
        if len(self.kernel_stack) != len(self.qubits) or len(self.qubits) != n:
            raise InvariantViolation(
                f"lockstep broken: {len(self.kernel_stack)} kernels, {len(self.qubits)} mapped qubits, {n} state qubits"
            )
        if sorted(self._pos.values()) != sorted(set(self._pos.values())) or any(
            self.qubits[p] != q for q, p in self._pos.items()
        ):
            raise InvariantViolation("qubit map is inconsistent")
        for norm in self.state.norms():
            if abs(norm - 1.0) > NORM_TOL:
                raise InvariantViolation(f"state norm {norm} drifted from 1")


def resolve_program_gateset(program: Program, gateset: GateSet | None = None) -> GateSet:
    if gateset is not None:
        return gateset
    if program.gateset is None:
        raise ValueError("program has no gate set; pass one explicitly")
    return builtin_gateset(program.gateset)


def initial_config(program: Program, gateset: GateSet | None = None) -> Configuration:
    config = Configuration(resolve_program_gateset(program, gateset))
    k = program.kernel
    config._allocate(k.qubit)
    config.kernel_stack.append(Frame(k.body, k.callback))
    return config


def _record(config: Configuration, rule: str, callback=None, bit=None, seen=None) -> StepRecord:
    return StepRecord(rule, config.mstack.to_list(), config.qmap(), callback, bit, seen)


def step(config: Configuration, callbacks, rng, noise: NoiseModel | None = None, record: bool = True):
    """Apply one rule in place.  Returns ``(config, StepRecord | None)``."""
    stack = config.kernel_stack
    if not stack:
        raise InvariantViolation("configuration is final")
    frame = stack[-1]
    state = config.state
    if frame.pc < len(frame.body):
        ins = frame.body[frame.pc]
        frame.pc += 1
        if isinstance(ins, Kernel):
            config._allocate(ins.qubit)
            stack.append(Frame(ins.body, ins.callback))
            return config, (_record(config, START_KERNEL) if record else None)
        arity, u, u_flat = config.unitary(ins)
        if len(ins.targets) != arity:
            raise InvariantViolation(f"gate {ins.name!r} expects {arity} target(s), got {len(ins.targets)}")
        positions = [config.position(t) for t in ins.targets]
        state.apply(positions, u, u_flat)
        if noise is not None and noise.gate_noise:
            _pauli_noise(state, positions, rng, noise)
        return config, (_record(config, QUANTUM_GATE) if record else None)

    # end of kernel: measure the qubit at position n-1
    pos = state.n - 1
    if len(config.qubits) != state.n or config._pos.get(config.qubits[-1]) != pos:
        raise InvariantViolation("qubit map head is not at position n-1")
    if noise is not None and noise.pmx and rng.random() < noise.pmx:
        state.apply([pos], X, _X)
    bit = state.measure_last(rng.random())
    config._release()
    config.mstack.push(bit)
    stack.pop()
    seen = config.mstack.to_list() if record else None
    cb = frame.callback
    try:
        fn = callbacks[cb.name]
    except KeyError:
        raise UnknownCallback(f"callback {cb.name!r} is not registered") from None
    nxt = fn(config.mstack, *cb.params)
    if nxt is None:
        return config, (_record(config, END_DONE, cb.name, bit, seen) if record else None)
    if not isinstance(nxt, Kernel):
        raise InvariantViolation(f"callback {cb.name!r} returned {type(nxt).__name__}, not a Kernel")
    config._allocate(nxt.qubit)
    stack.append(Frame(nxt.body, nxt.callback))
    return config, (_record(config, END_CONTINUE, cb.name, bit, seen) if record else None)


def _pauli_noise(state: FactoredState, positions, rng, noise: NoiseModel) -> None:
    for p in positions:
        r = rng.random()
        if r < noise.px:
            state.apply([p], X, _X)
        elif r < noise.px + noise.py:
            state.apply([p], Y, _Y)
        elif r < noise.px + noise.py + noise.pz:
            state.apply([p], Z, _Z)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def shot_seed(seed: int, shot: int) -> int:
    """Per-shot seed: ``seed`` XOR a hash of the shot index."""
    return (seed & 0xFFFFFFFFFFFFFFFF) ^ _splitmix64(shot)


def _callbacks_for_run(registry):
    if isinstance(registry, CallbackRegistry):
        return registry.instantiate()
    if registry is None:
        return CallbackRegistry().instantiate()
    return dict(registry)


def iter_steps(program: Program, registry, seed: int, noise: NoiseModel | None = None, *,
               gateset: GateSet | None = None, max_steps: int = DEFAULT_MAX_STEPS,
               rng=None, record: bool = True) -> Iterator[tuple[Configuration, StepRecord | None]]:
    config = initial_config(program, gateset)
    callbacks = _callbacks_for_run(registry)
    rng = rng if rng is not None else random.Random(seed)
    steps = 0
    while config.kernel_stack:
        if steps >= max_steps:
            raise StepBudgetExceeded(f"no final configuration after {max_steps} steps")
        steps += 1
        yield step(config, callbacks, rng, noise, record)


def run(program: Program, registry=None, seed: int = 0, noise: NoiseModel | None = None, *,
        gateset: GateSet | None = None, max_steps: int = DEFAULT_MAX_STEPS, rng=None) -> list[int]:
    """Evaluate to a final configuration; return the measurement stack head first."""
    config = initial_config(program, gateset)
    callbacks = _callbacks_for_run(registry)
    rng = rng if rng is not None else random.Random(seed)
    stack = config.kernel_stack
    steps = 0
    while stack:
        if steps >= max_steps:
            raise StepBudgetExceeded(f"no final configuration after {max_steps} steps")
        steps += 1
        step(config, callbacks, rng, noise, False)
    return config.mstack.to_list()


def bitstring(bits) -> str:
    return "".join(map(str, bits))


def run_shots(program: Program, registry=None, shots: int = 1000, seed: int = 0,
              noise: NoiseModel | None = None, *, gateset: GateSet | None = None,
              max_steps: int = DEFAULT_MAX_STEPS, threads: int = 1) -> Counter:
    """Histogram of head-first measurement-stack bitstrings over ``shots`` runs.

    Shot ``i`` is seeded with ``shot_seed(seed, i)``, so the result does not
    depend on ``threads``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    gateset = resolve_program_gateset(program, gateset)
    if not isinstance(registry, CallbackRegistry):
        registry = CallbackRegistry(None) if registry is None else registry

    def chunk(indices) -> Counter:
        hist: Counter = Counter()
        for i in indices:
            bits = run(program, registry, shot_seed(seed, i), noise, gateset=gateset, max_steps=max_steps)
            hist[bitstring(bits)] += 1
        return hist

    if threads <= 1:
        return chunk(range(shots))
    parts = [range(t, shots, threads) for t in range(threads)]
    total: Counter = Counter()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for hist in pool.map(chunk, parts):
            total.update(hist)
    return total


def trace(program: Program, registry=None, seed: int = 0, noise: NoiseModel | None = None, *,
          gateset: GateSet | None = None, max_steps: int = DEFAULT_MAX_STEPS, rng=None) -> list[StepRecord]:
    return [rec for _, rec in iter_steps(program, registry, seed, noise, gateset=gateset,
                                         max_steps=max_steps, rng=rng)]
