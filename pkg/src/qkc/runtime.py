"""Measurement stack and the name -> host function callback registry."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional

from .errors import EmptyStack, UnknownCallback
from .ir import DONE, CallbackRef, Gate, Kernel

CallbackFn = Callable[..., Optional[Kernel]]
CallbackFactory = Callable[[], CallbackFn]


class MeasurementStack:
    """LIFO of classical bits; iteration and :meth:`to_list` are head first."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] = ()):
        self._bits = list(bits)[::-1]

    def push(self, bit: int) -> None:
        self._bits.append(bit)

    def pop(self) -> int:
        if not self._bits:
            raise EmptyStack("pop from an empty measurement stack")
        return self._bits.pop()

    def peek(self) -> int:
        if not self._bits:
            raise EmptyStack("peek at an empty measurement stack")
        return self._bits[-1]

    def to_list(self) -> list[int]:
        return self._bits[::-1]

    def __len__(self):
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return reversed(self._bits)

    def __eq__(self, other):
        if isinstance(other, MeasurementStack):
            return self._bits == other._bits
        if isinstance(other, (list, tuple)):
            return self.to_list() == list(other)
        return NotImplemented

    def __repr__(self):
        return f"MeasurementStack({self.to_list()})"

    def __str__(self):
        return "::".join(map(str, self)) or "[]"


def done(mstack: MeasurementStack) -> None:
    return None


@dataclass(frozen=True)
class CallbackEntry:
    """A registered callback.

    ``factory`` returns a fresh function per run so callbacks can keep
    private state.  ``chain`` lists the wrapping passes outermost first,
    ending with the original callback name.
    """

    factory: CallbackFactory
    chain: tuple[str, ...]


def _stateless(fn: CallbackFn) -> CallbackFactory:
    return lambda: fn


class CallbackRegistry(Mapping[str, CallbackEntry]):
    """Maps callback names to factories.  ``done`` is always present."""

    def __init__(self, entries: Mapping[str, CallbackEntry] | None = None):
        self._entries: dict[str, CallbackEntry] = dict(entries or {})
        self._entries.setdefault("done", CallbackEntry(_stateless(done), ("done",)))

    def register(self, name: str, fn: CallbackFn) -> CallbackRegistry:
        self._entries[name] = CallbackEntry(_stateless(fn), (name,))
        return self

    def register_factory(self, name: str, factory: CallbackFactory) -> CallbackRegistry:
        self._entries[name] = CallbackEntry(factory, (name,))
        return self

    def instantiate(self) -> dict[str, CallbackFn]:
        """Fresh callback instances for one run."""
        return {name: e.factory() for name, e in self._entries.items()}

    def __or__(self, other: Mapping[str, CallbackEntry]) -> CallbackRegistry:
        return CallbackRegistry({**self._entries, **dict(other)})

    def __getitem__(self, name: str) -> CallbackEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownCallback(f"callback {name!r} is not registered") from None

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __repr__(self):
        return f"CallbackRegistry({sorted(self._entries)})"


def invoke(callbacks, ref: CallbackRef, mstack: MeasurementStack) -> Kernel | None:
    """Run ``ref`` against ``mstack``.

    ``callbacks`` is either a :class:`CallbackRegistry` (a fresh instance is
    made for this call) or the dict returned by ``instantiate()``.
    """
    if isinstance(callbacks, CallbackRegistry):
        fn = callbacks[ref.name].factory()
    else:
        try:
            fn = callbacks[ref.name]
        except KeyError:
            raise UnknownCallback(f"callback {ref.name!r} is not registered") from None
    return fn(mstack, *ref.params)


def bell_kernel() -> Kernel:
    return Kernel(
        "q1",
        (Kernel("q2", (Gate("h", ("q2",)), Gate("cx", ("q2", "q1"))), DONE),),
        CallbackRef("repeat_until_zero"),
    )


def repeat_until_zero(mstack: MeasurementStack) -> Kernel | None:
    if mstack.pop() == 1:
        return bell_kernel()
    return None


def fix(mstack: MeasurementStack, q: str) -> Kernel:
    return Kernel.anonymous([Gate("flip", (q,))])


def builtin_callbacks() -> CallbackRegistry:
    reg = CallbackRegistry()
    reg.register("repeat_until_zero", repeat_until_zero)
    reg.register("fix", fix)
    return reg


BUILTIN_CALLBACKS = ("done", "repeat_until_zero", "fix")
