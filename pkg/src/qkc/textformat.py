"""Reader and writer for the ``allocate q: ... measure cb`` concrete syntax.

The grammar is indentation sensitive: any strictly deeper indentation
opens a kernel body, all body lines share that indentation, and the line
that returns to the ``allocate`` column must be its ``measure``.  ``#``
starts a comment, ``;`` separates gates on one line, and an optional first
line ``@gateset NAME`` names the gate set.
"""

from __future__ import annotations

import math
import re

from .errors import ParseError
from .ir import CallbackRef, Gate, Kernel, Program, format_number, is_qubit_token

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_CB_NAME = r"[A-Za-z_][A-Za-z0-9_.\-]*"
_DEC = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"

_HEADER_RE = re.compile(r"@gateset\s+(\S+)")
_ALLOC_RE = re.compile(r"allocate\s+(\S+?)\s*:")
_MEASURE_RE = re.compile(rf"measure\s+({_CB_NAME})\s*(?:\((.*)\))?")
_GATE_RE = re.compile(rf"({_NAME})\s*(?:\(([^()]*)\))?\s*(.*)")
_KEYWORD_RE = re.compile(r"(allocate|measure)\b")
_NUM_RE = re.compile(rf"[+-]?{_DEC}")
_INT_RE = re.compile(r"[+-]?\d+")
_PI_RE = re.compile(rf"([+-]?)(?:({_DEC})\s*\*\s*)?pi(?:\s*/\s*({_DEC}))?")


def parse_number(token: str) -> float:
    """Decimal literal, or ``pi`` optionally scaled as ``2*pi``, ``-pi/2``."""
    tok = token.strip()
    if _NUM_RE.fullmatch(tok):
        return float(tok)
    m = _PI_RE.fullmatch(tok)
    if m is None:
        raise ValueError(f"not a number: {token!r}")
    sign, mul, div = m.groups()
    value = math.pi * (float(mul) if mul else 1.0) / (float(div) if div else 1.0)
    return -value if sign == "-" else value


class _Parser:
    def __init__(self, text: str):
        self.lines: list[tuple[int, int, str]] = []  # (lineno, indent, content)
        for lineno, raw in enumerate(text.splitlines(), start=1):
            content = raw.split("#", 1)[0].rstrip()
            if not content.strip():
                continue
            stripped = content.lstrip(" ")
            indent = len(content) - len(stripped)
            if stripped.startswith("\t"):
                raise ParseError("tab character in indentation", lineno, indent + 1)
            self.lines.append((lineno, indent, stripped))

    def program(self, gateset: str | None) -> Program:
        i = 0
        if self.lines and self.lines[0][2].startswith("@"):
            lineno, indent, text = self.lines[0]
            m = _HEADER_RE.fullmatch(text)
            if m is None or indent:
                raise ParseError("malformed @gateset header", lineno, indent + 1)
            gateset = m.group(1)
            i = 1
        if i >= len(self.lines):
            raise ParseError("expected 'allocate'", self.lines[-1][0] + 1 if self.lines else 1)
        kernel, i = self.kernel(i, self.lines[i][1])
        if i < len(self.lines):
            lineno, indent, _ = self.lines[i]
            raise ParseError("unexpected content after the top-level kernel", lineno, indent + 1)
        return Program(gateset, kernel)

    def kernel(self, i: int, col: int) -> tuple[Kernel, int]:
        lineno, indent, text = self.lines[i]
        m = _ALLOC_RE.fullmatch(text)
        if m is None or indent != col:
            raise ParseError(f"expected 'allocate QUBIT:', got {text!r}", lineno, indent + 1)
        qubit = m.group(1)
        if not is_qubit_token(qubit):
            raise ParseError(f"invalid qubit id {qubit!r}", lineno, indent + 10)
        alloc_line = lineno
        body: list = []
        block = None
        i += 1
        while i < len(self.lines):
            lineno, indent, text = self.lines[i]
            if indent == col:
                return Kernel(qubit, tuple(body), self.measure(lineno, indent, text)), i + 1
            if indent < col:
                raise ParseError(f"missing 'measure' for 'allocate {qubit}:' (line {alloc_line})", lineno, indent + 1)
            if block is None:
                block = indent
            elif indent != block:
                raise ParseError(f"bad indentation: expected {block} spaces, got {indent}", lineno, indent + 1)
            keyword = _KEYWORD_RE.match(text)
            if keyword and keyword.group(1) == "allocate":
                k, i = self.kernel(i, indent)
                body.append(k)
                continue
            if keyword:
                raise ParseError(f"'measure' does not line up with 'allocate {qubit}:' (line {alloc_line})", lineno, indent + 1)
            body.extend(self.gates(lineno, indent, text))
            i += 1
        last = self.lines[-1][0]
        raise ParseError(f"missing 'measure' for 'allocate {qubit}:' (line {alloc_line})", last + 1)

    def measure(self, lineno: int, indent: int, text: str) -> CallbackRef:
        m = _MEASURE_RE.fullmatch(text)
        if m is None:
            raise ParseError(f"expected 'measure CALLBACK', got {text!r}", lineno, indent + 1)
        name, args = m.groups()
        if args is None:
            return CallbackRef(name)
        params = []
        for tok in (a.strip() for a in args.split(",")):
            if _INT_RE.fullmatch(tok):
                params.append(int(tok))
                continue
            if _NUM_RE.fullmatch(tok):
                params.append(float(tok))
                continue
            if not is_qubit_token(tok):
                raise ParseError(f"bad callback argument {tok!r}", lineno, indent + 1)
            params.append(tok)
        return CallbackRef(name, tuple(params))

    def gates(self, lineno: int, indent: int, text: str) -> list[Gate]:
        out = []
        col = indent + 1
        for chunk in text.split(";"):
            part = chunk.strip()
            m = _GATE_RE.fullmatch(part)
            if not part or m is None:
                raise ParseError(f"unknown token {part!r}", lineno, col)
            name, args, rest = m.groups()
            targets = tuple(rest.split())
            if not targets:
                raise ParseError(f"gate {name!r} has no target qubits", lineno, col)
            for t in targets:
                if not is_qubit_token(t):
                    raise ParseError(f"invalid qubit id {t!r}", lineno, col)
            texts: tuple[str, ...] = ()
            values: tuple[float, ...] = ()
            if args is not None:
                texts = tuple(a.strip() for a in args.split(","))
                try:
                    values = tuple(parse_number(a) for a in texts)
                except ValueError as exc:
                    raise ParseError(str(exc), lineno, col) from None
            out.append(Gate(name, targets, values, texts or None))
            col += len(chunk) + 1
        return out


def parse(text: str, gateset: str | None = None) -> Program:
    """Parse program text.  A ``@gateset`` header overrides ``gateset``."""
    return _Parser(text).program(gateset)


def parse_kernel(text: str) -> Kernel:
    return parse(text).kernel


def format_gate(g: Gate) -> str:
    head = g.name
    if g.params:
        texts = g.param_text if g.param_text is not None else tuple(format_number(p) for p in g.params)
        head += "(" + ", ".join(texts) + ")"
    return head + " " + " ".join(g.targets)


def _format_lines(kernel: Kernel, level: int, indent: str, compact: bool, out: list[str]):
    pad = indent * level
    out.append(f"{pad}allocate {kernel.qubit}:")
    inner = pad + indent
    run: list[Gate] = []

    def flush():
        if run:
            out.append(inner + "; ".join(format_gate(g) for g in run))
            run.clear()

    for ins in kernel.body:
        if isinstance(ins, Kernel):
            flush()
            _format_lines(ins, level + 1, indent, compact, out)
        elif compact and run and run[-1].name == ins.name:
            run.append(ins)
        else:
            flush()
            run.append(ins)
            if not compact:
                flush()
    flush()
    out.append(f"{pad}measure {kernel.callback}")


def format_kernel(kernel: Kernel, compact: bool = False, indent: str = "  ") -> str:
    out: list[str] = []
    _format_lines(kernel, 0, indent, compact, out)
    return "\n".join(out) + "\n"


def serialize(program: Program, compact: bool = False) -> str:
    """Canonical text: two-space nesting, one gate per line.

    ``compact`` joins runs of consecutive sibling gates that share a gate
    name with ``"; "``.
    """
    head = f"@gateset {program.gateset}\n" if program.gateset else ""
    return head + format_kernel(program.kernel, compact=compact)
