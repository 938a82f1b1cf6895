"""Compiler passes over kernel programs, with callback wrapping.

A pass rewrites gates through per-gate handlers and may expand each
logical qubit into ``width`` physical qubits.  Because expansion changes
the measurement structure, every callback the program can reach is
wrapped: the wrapper first runs the pass's decoder on the measurement
stack, then calls the wrapped callback, and compiles any kernel it
returns through the same pass.  Wrapping nests when passes are chained,
so decoders run outermost pass first and returned kernels are compiled
innermost pass first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CallbackNameCollision, GateSetMismatch, MissingHandler
from .ir import DONE, CallbackRef, Gate, Instruction, Kernel, Program
from .runtime import CallbackEntry, CallbackRegistry, MeasurementStack

Expand = Callable[[str], tuple]
Handler = Callable[[Gate, Expand], Sequence[Instruction]]
BlockCircuit = Callable[[tuple], Sequence[Instruction]]


@dataclass(frozen=True)
class Expansion:
    """How one logical qubit maps to physical qubits.

    ``prologue`` and ``epilogue`` take the tuple of physical ids and return
    the instructions run right after allocation (encoding) and right before
    measurement (readout basis change).
    """

    width: int = 1
    prologue: BlockCircuit | None = None
    epilogue: BlockCircuit | None = None

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("expansion width must be positive")
        if self.width == 1 and (self.prologue or self.epilogue):
            raise ValueError("width-1 expansion cannot carry a prologue or epilogue")

    def names(self, q: str) -> tuple:
        if self.width == 1:
            return (q,)
        return tuple(f"{q}.{i}" for i in range(self.width))

    def representative(self, q: str) -> str:
        return q if self.width == 1 else f"{q}.0"

    def logical(self, physical: str) -> str:
        """Inverse of :meth:`representative`."""
        if self.width == 1:
            return physical
        head, sep, tail = physical.rpartition(".")
        if not sep or tail != "0":
            raise ValueError(f"{physical!r} is not a block representative")
        return head


def no_decode(mstack: MeasurementStack) -> None:
    return None


class Pass:
    """A compiler pass from gate set ``source`` to gate set ``target``.

    ``handlers`` maps each source gate name to ``handler(gate, expand)``,
    where ``expand(q)`` gives the physical ids of logical qubit ``q``.
    ``decode`` pops this pass's physical bits off the measurement stack and
    pushes the logical bit(s) back.
    """

    def __init__(self, name: str, source: str, target: str, handlers: Mapping[str, Handler],
                 expansion: Expansion = Expansion(), decode: Callable[[MeasurementStack], None] = no_decode):
        self.name = name
        self.source = source
        self.target = target
        self.handlers = dict(handlers)
        self.expansion = expansion
        self._decode = decode

    def __repr__(self):
        return f"Pass({self.name!r}, {self.source!r} -> {self.target!r}, width={self.expansion.width})"

    @property
    def width(self) -> int:
        return self.expansion.width

    def decode(self, mstack: MeasurementStack) -> None:
        self._decode(mstack)

    def wrapped_name(self, callback_name: str) -> str:
        return f"{self.name}.{callback_name}"

    def compiler_callbacks(self) -> dict[str, CallbackEntry]:
        """Callbacks the pass itself introduces (the plain ``done``)."""
        return dict(CallbackRegistry().items())

    # -- kernels -------------------------------------------------------

    def compile_gate(self, gate: Gate) -> list[Instruction]:
        try:
            handler = self.handlers[gate.name]
        except KeyError:
            raise MissingHandler(f"pass {self.name!r} has no handler for gate {gate.name!r}") from None
        return list(handler(gate, self.expansion.names))

    def compile_body(self, body: Iterable[Instruction]) -> list[Instruction]:
        out: list[Instruction] = []
        for ins in body:
            if isinstance(ins, Kernel):
                out.append(self.compile_kernel(ins))
            else:
                out.extend(self.compile_gate(ins))
        return out

    def compile_callback(self, cb: CallbackRef) -> CallbackRef:
        rep = self.expansion.representative
        return CallbackRef(self.wrapped_name(cb.name),
                           tuple(rep(p) if isinstance(p, str) else p for p in cb.params))

    def compile_kernel(self, kernel: Kernel) -> Kernel:
        """Compile one kernel tree.

        A logical kernel on ``q`` becomes ``width`` nested kernels on
        ``q.0`` (outermost) .. ``q.(n-1)`` (innermost).  The innermost one
        holds the prologue, the compiled body and the epilogue; the outer
        physical kernels measure with plain ``done`` and ``q.0`` measures
        with the wrapped form of the original callback.
        """
        exp = self.expansion
        names = exp.names(kernel.qubit)
        body = self.compile_body(kernel.body)
        if exp.prologue is not None:
            body = list(exp.prologue(names)) + body
        if exp.epilogue is not None:
            body = body + list(exp.epilogue(names))
        cb = self.compile_callback(kernel.callback)
        if len(names) == 1:
            return Kernel(names[0], tuple(body), cb)
        inner = Kernel(names[-1], tuple(body), DONE)
        for q in reversed(names[1:-1]):
            inner = Kernel(q, (inner,), DONE)
        return Kernel(names[0], (inner,), cb)

    # -- callbacks -----------------------------------------------------

    def wrap_factory(self, inner_factory):
        logical = self.expansion.logical

        def factory():
            inner = inner_factory()

            def wrapped(mstack, *params):
                self.decode(mstack)
                if params:
                    params = tuple(logical(p) if isinstance(p, str) else p for p in params)
                kernel = inner(mstack, *params)
                if kernel is not None:
                    return self.compile_kernel(kernel)
                return None

            return wrapped

        return factory

    def wrap_callbacks(self, callbacks: Mapping[str, CallbackEntry]) -> dict[str, CallbackEntry]:
        """Wrapped entries keyed ``<pass>.<name>`` for every given callback."""
        out: dict[str, CallbackEntry] = {}
        for name, entry in callbacks.items():
            out[self.wrapped_name(name)] = CallbackEntry(self.wrap_factory(entry.factory), (self.name,) + entry.chain)
        return out

    def compile(self, program: Program, callbacks: Mapping[str, CallbackEntry] | None = None):
        """Return ``(compiled program, callback registry)``; the input is untouched."""
        if program.gateset is not None and program.gateset != self.source:
            raise GateSetMismatch(f"pass {self.name!r} expects gate set {self.source!r}, program uses {program.gateset!r}")
        callbacks = CallbackRegistry() if callbacks is None else callbacks
        new = self.wrap_callbacks(callbacks)
        for name, entry in self.compiler_callbacks().items():
            if name in new:
                raise CallbackNameCollision(f"pass {self.name!r} introduces {name!r}, which a wrapped callback already uses")
            new[name] = entry
        return Program(self.target, self.compile_kernel(program.kernel)), CallbackRegistry(new)


class Pipeline:
    """Left-to-right composition of passes."""

    def __init__(self, passes: Sequence[Pass] = ()):
        self.passes = tuple(passes)
        for a, b in zip(self.passes, self.passes[1:]):
            if a.target != b.source:
                raise GateSetMismatch(f"{a.name!r} produces {a.target!r} but {b.name!r} expects {b.source!r}")

    def __repr__(self):
        return f"Pipeline({[p.name for p in self.passes]})"

    def __len__(self):
        return len(self.passes)

    @property
    def source(self) -> str | None:
        return self.passes[0].source if self.passes else None

    @property
    def target(self) -> str | None:
        return self.passes[-1].target if self.passes else None

    def stages(self, program: Program, callbacks=None) -> list[tuple[Program, CallbackRegistry]]:
        """The program and callbacks before the first pass and after each one."""
        callbacks = CallbackRegistry() if callbacks is None else callbacks
        out = [(program, callbacks)]
        for p in self.passes:
            program, callbacks = p.compile(program, callbacks)
            out.append((program, callbacks))
        return out

    def compile(self, program: Program, callbacks=None):
        return self.stages(program, callbacks)[-1]


def chain(passes: Sequence[Pass]) -> Pipeline:
    return Pipeline(passes)
