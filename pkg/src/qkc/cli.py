"""``qk`` command line: check, compile, run and trace kernel programs."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import QkcError
from .evaluator import DEFAULT_MAX_STEPS, NoiseModel, run_shots, trace
from .gatesets import GateSet, resolve_gateset
from .ir import Program, callback_names, iter_kernels, validate
from .passes import PASSES, parse_pipeline
from .runtime import BUILTIN_CALLBACKS, builtin_callbacks
from .textformat import parse, serialize

EXIT_OK, EXIT_USER, EXIT_IO = 0, 1, 2


class UserError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load(args) -> tuple[Program, GateSet]:
    program = parse(_read(args.file))
    if args.gateset:
        gs = resolve_gateset(args.gateset)
        if program.gateset is not None and program.gateset != gs.name:
            raise UserError(f"program declares gate set {program.gateset!r} but --gateset is {gs.name!r}")
        return Program(gs.name, program.kernel), gs
    if program.gateset is None:
        raise UserError("no gate set: add an '@gateset NAME' header or pass --gateset")
    return program, resolve_gateset(program.gateset)


def _check_callbacks(program: Program) -> None:
    unknown = sorted(callback_names(program.kernel) - set(BUILTIN_CALLBACKS))
    if unknown:
        raise UserError(
            f"unregistered callback(s): {', '.join(unknown)}; the CLI provides only "
            f"{', '.join(BUILTIN_CALLBACKS)}; register custom callbacks through the library API"
        )


def _compiled(args):
    """Validated, compiled program with its callbacks and final gate set."""
    program, gs = _load(args)
    diags = [str(d) for d in validate(program, gs)]
    if diags:
        raise UserError("invalid program:\n" + "\n".join(diags))
    _check_callbacks(program)
    pipeline = parse_pipeline(args.pipeline)
    program, callbacks = pipeline.compile(program, builtin_callbacks())
    if pipeline.passes:
        gs = resolve_gateset(program.gateset)
    return program, callbacks, gs


def _noise(args) -> NoiseModel | None:
    if not args.noise:
        return None
    try:
        return NoiseModel.parse(args.noise)
    except ValueError as exc:
        raise UserError(f"bad --noise: {exc}") from None


# -- commands -----------------------------------------------------------

def cmd_check(args) -> int:
    program, gs = _load(args)
    diags = [str(d) for d in validate(program, gs)]
    for d in diags:
        print(f"{args.file}: {d}", file=sys.stderr)
    if diags:
        return EXIT_USER
    print(f"{args.file}: ok ({program.gateset}, {sum(1 for _ in iter_kernels(program.kernel))} kernels)")
    return EXIT_OK


def cmd_compile(args) -> int:
    program, callbacks, gs = _compiled(args)
    _write(serialize(program, compact=args.compact), args.out)
    if args.manifest:
        used = callback_names(program.kernel)
        manifest = {
            "gateset": program.gateset,
            "pipeline": [p.name for p in parse_pipeline(args.pipeline).passes],
            "callbacks": {name: list(callbacks[name].chain) for name in sorted(used)},
        }
        _write(json.dumps(manifest, indent=2) + "\n", args.manifest)
    return EXIT_OK


def _format_histogram(hist, fmt: str, shots: int) -> str:
    rows = sorted(hist.items(), key=lambda kv: (len(kv[0]), kv[0]))
    if fmt == "json":
        return json.dumps(dict(rows), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bitstring", "count"])
        w.writerows(rows)
        return buf.getvalue()
    width = max((len(k) for k, _ in rows), default=1)
    return "".join(f"{k:<{width}}  {v:>8}  {v / shots:.4f}\n" for k, v in rows)


def cmd_run(args) -> int:
    if args.shots < 1:
        raise UserError("--shots must be >= 1")
    if args.threads < 1:
        raise UserError("--threads must be >= 1")
    program, callbacks, gs = _compiled(args)
    hist = run_shots(program, callbacks, args.shots, args.seed, _noise(args),
                     gateset=gs, max_steps=args.max_steps, threads=args.threads)
    _write(_format_histogram(hist, args.format, args.shots), args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    program, callbacks, gs = _compiled(args)
    records = trace(program, callbacks, args.seed, _noise(args), gateset=gs,
                    max_steps=args.max_steps)
    _write("".join(json.dumps(r.to_json()) + "\n" for r in records), args.out)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, compiled=True, sampled=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="program file, or - for stdin")
        p.add_argument("--gateset", help="built-in gate set name or JSON gate-set file")
        if compiled:
            p.add_argument("--pipeline", default="",
                           help=f"comma-separated passes from: {', '.join(PASSES)}")
            p.add_argument("--out", help="output file (default stdout)")
        if sampled:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--noise", metavar="PX,PY,PZ,PMX", help="Pauli gate noise and readout flip")
            p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
        p.set_defaults(func=fn)
        return p

    add("check", cmd_check, "parse and validate a program", compiled=False)
    p = add("compile", cmd_compile, "compile through a pipeline")
    p.add_argument("--manifest", help="write the callback wrapping chains as JSON here")
    p.add_argument("--compact", action="store_true", help="join runs of equal gates with ';'")
    p = add("run", cmd_run, "sample a histogram of measurement stacks", sampled=True)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--threads", type=int, default=1)
    add("trace", cmd_trace, "print every evaluation step as JSON lines", sampled=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"qk: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UserError, QkcError, ValueError, LookupError) as exc:
        msg = exc.args[0] if isinstance(exc, LookupError) and exc.args else exc
        print(f"qk: {msg}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
