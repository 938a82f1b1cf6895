"""Kernel AST: gates, callback references, kernels and programs.

A kernel allocates one qubit, runs its body (gates and nested kernels),
then measures the qubit and hands the bit to a named callback.  All values
here are immutable; the structural helpers return new trees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .errors import RenameCollision

QubitId = str
CallbackParam = Union[str, int, float]

PARAM_TOL = 1e-12
ANON_PREFIX = "_a"

_QUBIT_RE = re.compile(r"[^\s:;(),#]+")


def is_qubit_token(name: object) -> bool:
    return isinstance(name, str) and _QUBIT_RE.fullmatch(name) is not None


@dataclass(frozen=True, eq=False)
class Gate:
    """Application of a named gate to an ordered tuple of qubits.

    ``param_text`` keeps the literal spelling from source text so that
    serialization round-trips; it takes no part in equality.
    """

    name: str
    targets: tuple[QubitId, ...]
    params: tuple[float, ...] = ()
    param_text: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.param_text is not None:
            object.__setattr__(self, "param_text", tuple(self.param_text))

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.name == other.name
            and self.targets == other.targets
            and len(self.params) == len(other.params)
            and all(abs(a - b) <= PARAM_TOL for a, b in zip(self.params, other.params))
        )

    def __hash__(self):
        return hash((self.name, self.targets, len(self.params)))

    def with_targets(self, targets) -> Gate:
        return Gate(self.name, tuple(targets), self.params, self.param_text)


@dataclass(frozen=True)
class CallbackRef:
    name: str
    params: tuple[CallbackParam, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    def qubit_params(self) -> tuple[QubitId, ...]:
        return tuple(p for p in self.params if isinstance(p, str))

    def map_qubits(self, fn) -> CallbackRef:
        if not any(isinstance(p, str) for p in self.params):
            return self
        return CallbackRef(self.name, tuple(fn(p) if isinstance(p, str) else p for p in self.params))

    def __str__(self):
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(_format_callback_param(p) for p in self.params)})"


DONE = CallbackRef("done")


def _format_callback_param(p: CallbackParam) -> str:
    if isinstance(p, str):
        return p
    return format_number(p)


def format_number(x: float) -> str:
    if isinstance(x, int) or float(x).is_integer():
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class Kernel:
    qubit: QubitId
    body: tuple[Instruction, ...] = ()
    callback: CallbackRef = DONE

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if isinstance(self.callback, str):
            object.__setattr__(self, "callback", CallbackRef(self.callback))

    @classmethod
    def anonymous(cls, body=(), callback: CallbackRef | str = DONE) -> Kernel:
        """Kernel whose qubit gets a reserved ``_a<k>`` name.

        The index is the smallest one not already bound inside ``body``, so
        nesting anonymous kernels never shadows and the name is reproducible.
        """
        body = tuple(body)
        taken = set()
        for ins in body:
            if isinstance(ins, Kernel):
                taken |= bound_qubits(ins)
        k = 0
        while f"{ANON_PREFIX}{k}" in taken:
            k += 1
        return cls(f"{ANON_PREFIX}{k}", body, callback)


Instruction = Union[Gate, Kernel]


@dataclass(frozen=True)
class Program:
    gateset: str | None
    kernel: Kernel


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


def iter_kernels(kernel: Kernel) -> Iterator[Kernel]:
    """Pre-order walk over ``kernel`` and every nested kernel."""
    stack = [kernel]
    while stack:
        k = stack.pop()
        yield k
        stack.extend(ins for ins in reversed(k.body) if isinstance(ins, Kernel))


def iter_gates(kernel: Kernel) -> Iterator[Gate]:
    for k in iter_kernels(kernel):
        for ins in k.body:
            if isinstance(ins, Gate):
                yield ins


def bound_qubits(kernel: Kernel) -> set[QubitId]:
    return {k.qubit for k in iter_kernels(kernel)}


def callback_names(kernel: Kernel) -> set[str]:
    return {k.callback.name for k in iter_kernels(kernel)}


def free_qubits(kernel: Kernel) -> frozenset[QubitId]:
    """Qubits targeted by gates in the tree but bound by no kernel on the path."""
    free: set[QubitId] = set()

    def visit(k: Kernel, scope: frozenset):
        scope = scope | {k.qubit}
        for ins in k.body:
            if isinstance(ins, Kernel):
                visit(ins, scope)
            else:
                free.update(t for t in ins.targets if t not in scope)

    visit(kernel, frozenset())
    return frozenset(free)


def all_qubits(kernel: Kernel) -> set[QubitId]:
    ids = set()
    for k in iter_kernels(kernel):
        ids.add(k.qubit)
        ids.update(k.callback.qubit_params())
        for ins in k.body:
            if isinstance(ins, Gate):
                ids.update(ins.targets)
    return ids


def rename_qubits(kernel: Kernel, mapping: Mapping[QubitId, QubitId]) -> Kernel:
    """Substitute every bound, free and callback-parameter occurrence."""
    ids = all_qubits(kernel)
    images: dict[QubitId, QubitId] = {}
    for q in sorted(ids):
        new = mapping.get(q, q)
        if new in images and images[new] != q:
            raise RenameCollision(f"{images[new]!r} and {q!r} both map to {new!r}")
        images[new] = q

    def sub(q):
        return mapping.get(q, q)

    def visit(k: Kernel) -> Kernel:
        body = tuple(
            visit(ins) if isinstance(ins, Kernel) else ins.with_targets(map(sub, ins.targets))
            for ins in k.body
        )
        return Kernel(sub(k.qubit), body, k.callback.map_qubits(sub))

    return visit(kernel)


def validate(program: Program, gateset) -> list[Diagnostic]:
    """Check scoping, gate arity/params and target distinctness.

    ``gateset`` is a :class:`qkc.gatesets.GateSet`.  Returns an empty list
    when the program is well formed.
    """
    diags: list[Diagnostic] = []
    if program.gateset is not None and program.gateset != gateset.name:
        diags.append(Diagnostic("program", f"program targets gate set {program.gateset!r}, not {gateset.name!r}"))

    def visit(k: Kernel, path: str, scope: tuple):
        here = f"{path}kernel({k.qubit})"
        if not is_qubit_token(k.qubit):
            diags.append(Diagnostic(here, f"invalid qubit id {k.qubit!r}"))
        if k.qubit in scope:
            diags.append(Diagnostic(here, f"qubit {k.qubit!r} shadows an enclosing allocation"))
        inner = scope + (k.qubit,)
        for i, ins in enumerate(k.body):
            where = f"{here}/body[{i}]"
            if isinstance(ins, Kernel):
                visit(ins, where + "/", inner)
            elif isinstance(ins, Gate):
                _check_gate(ins, where, inner, gateset, diags)
            else:
                diags.append(Diagnostic(where, f"not an instruction: {ins!r}"))
        cb = k.callback
        if cb.name == "done" and cb.params:
            diags.append(Diagnostic(here + "/callback", "callback 'done' takes no parameters"))
        for p in cb.qubit_params():
            if p not in inner:
                diags.append(Diagnostic(here + "/callback", f"callback parameter {p!r} is not an allocated qubit"))

    visit(program.kernel, "", ())
    return diags


def _check_gate(g: Gate, where: str, scope: tuple, gateset, diags: list):
    gdef = gateset.defs.get(g.name)
    if gdef is None:
        diags.append(Diagnostic(where, f"unknown gate {g.name!r} in gate set {gateset.name!r}"))
    else:
        if len(g.targets) != gdef.arity:
            diags.append(Diagnostic(where, f"gate {g.name!r} expects {gdef.arity} target(s), got {len(g.targets)}"))
        if len(g.params) != gdef.param_count:
            diags.append(Diagnostic(where, f"gate {g.name!r} expects {gdef.param_count} parameter(s), got {len(g.params)}"))
    if len(set(g.targets)) != len(g.targets):
        diags.append(Diagnostic(where, f"duplicate target in {g.name!r}"))
    for t in g.targets:
        if t not in scope:
            diags.append(Diagnostic(where, f"qubit {t!r} is not allocated in scope"))


def pretty_print(kernel: Kernel, compact: bool = False) -> str:
    from .textformat import format_kernel

    return format_kernel(kernel, compact=compact)
