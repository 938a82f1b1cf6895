"""Compare the compiled and numpy state-vector kernels.

Micro-benchmarks time each kernel on random states; the end-to-end run
samples a compiled pipeline once per backend in a subprocess, since the
backend is chosen at import time.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from qkc import kernels
from qkc.gatesets import CX, H

E2E = """
import json, time
from qkc import BACKEND, programs, parse_pipeline, builtin_callbacks, run_shots
prog, cbs = parse_pipeline({pipeline!r}).compile(programs.load({program!r}), builtin_callbacks())
t = time.perf_counter()
run_shots(prog, cbs, {shots}, 1)
print(json.dumps({{"backend": BACKEND, "seconds": time.perf_counter() - t}}))
"""


def micro(qubits, repeat):
    rng = np.random.default_rng(0)
    rows = []
    h = H.reshape(-1).copy()
    cx = CX.reshape(-1).copy()
    for n in qubits:
        psi0 = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        psi0 /= np.linalg.norm(psi0)
        for name, mod in sorted(kernels.available_backends().items()):
            psi = psi0.copy()
            cases = {
                "apply_1q": lambda: mod.apply_1q(psi, n // 2, h),
                "apply_2q": lambda: mod.apply_2q(psi, n - 1, 0, cx),
                "prob_one": lambda: mod.prob_one(psi, n // 2),
                "collapse": lambda: mod.collapse(psi, n // 2, 0),
            }
            for kname, fn in cases.items():
                number = max(1, 2 ** max(0, 16 - n))
                best = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
                rows.append({"qubits": n, "backend": name, "kernel": kname, "us": best * 1e6})
    return rows


def end_to_end(program, pipeline, shots):
    out = []
    for pure in ("", "1"):
        env = dict(os.environ, QKC_PURE_PYTHON=pure)
        code = E2E.format(pipeline=pipeline, program=program, shots=shots)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out.append(json.loads(res.stdout))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 12, 16, 20])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--program", default="fix_test")
    ap.add_argument("--pipeline", default="toy2cliffords,steane,na")
    ap.add_argument("--shots", type=int, default=200)
    ap.add_argument("--json", action="store_true", help="emit raw rows as JSON")
    args = ap.parse_args(argv)

    rows = micro(args.qubits, args.repeat)
    e2e = end_to_end(args.program, args.pipeline, args.shots)
    if args.json:
        print(json.dumps({"micro": rows, "end_to_end": e2e}, indent=2))
        return
    by = {(r["qubits"], r["kernel"], r["backend"]): r["us"] for r in rows}
    print(f"{'qubits':>6} {'kernel':<9} {'cython us':>11} {'python us':>11} {'speedup':>8}")
    for n in args.qubits:
        for k in ("apply_1q", "apply_2q", "prob_one", "collapse"):
            c, p = by.get((n, k, "cython")), by[(n, k, "python")]
            cs = f"{c:11.2f}" if c is not None else f"{'n/a':>11}"
            sp = f"{p / c:8.1f}" if c else f"{'-':>8}"
            print(f"{n:>6} {k:<9} {cs} {p:11.2f} {sp}")
    print(f"\nend to end: {args.program} through {args.pipeline or '(none)'}, {args.shots} shots")
    for r in e2e:
        print(f"  {r['backend']:<7} {r['seconds']:.3f}s")


if __name__ == "__main__":
    main()
