"""Concrete passes: Toy->Cliffords, rep-3 bit/phase, Steane and two native targets."""

from __future__ import annotations

from math import pi

from .compiler import Expansion, Pass, Pipeline
from .errors import UnknownPass
from .ir import Gate
from .runtime import MeasurementStack

HALF_PI = pi / 2


def _g(name, *targets, params=()):
    return Gate(name, targets, params)


def _rename(target_name: str):
    """Width-1 handler emitting ``target_name`` on the same targets."""

    def handler(gate, expand):
        return [_g(target_name, *gate.targets, params=gate.params)]

    return handler


def _transversal(*names: str):
    """Apply ``names`` in order on each physical index of the targets' blocks.

    Multi-qubit gates act pairwise: the i-th physical qubit of each target.
    """

    def handler(gate, expand):
        blocks = [expand(t) for t in gate.targets]
        out = []
        for i in range(len(blocks[0])):
            qs = tuple(b[i] for b in blocks)
            out.extend(_g(n, *qs) for n in names)
        return out

    return handler


# -- Toy -> Cliffords ---------------------------------------------------

def toy_to_cliffords() -> Pass:
    return Pass(
        "toy2cliffords", "toy", "cliffords",
        {"flip": _rename("x"), "mix": _rename("h"), "entangle": _rename("cx")},
    )


# -- repetition codes ---------------------------------------------------

def majority_decode(mstack: MeasurementStack) -> None:
    m0 = mstack.pop()
    m1 = mstack.pop()
    m2 = mstack.pop()
    mstack.push(1 if m0 + m1 + m2 >= 2 else 0)


# s acts as S-dagger on |111>, so logical S needs (z, s) on each qubit.
REP3_BIT_HANDLERS = {
    "x": _transversal("x"),
    "y": _transversal("y"),
    "z": _transversal("z"),
    "s": _transversal("z", "s"),
    "h": _transversal("h"),
    "cx": _transversal("cx"),
    "cz": _transversal("cz"),
}


def rep3_bit() -> Pass:
    return Pass("rep3bit", "cliffords", "cliffords", REP3_BIT_HANDLERS, Expansion(3), majority_decode)


def _h_all(qubits):
    return [_g("h", q) for q in qubits]


def _hadamard_conjugate(handler):
    def conjugated(gate, expand):
        qs = [q for t in gate.targets for q in expand(t)]
        return _h_all(qs) + list(handler(gate, expand)) + _h_all(qs)

    return conjugated


def rep3_phase() -> Pass:
    handlers = {name: _hadamard_conjugate(h) for name, h in REP3_BIT_HANDLERS.items()}
    return Pass("rep3phase", "cliffords", "cliffords", handlers, Expansion(3, _h_all, _h_all), majority_decode)


# -- Steane [[7,1,3]] -----------------------------------------------------

# Column j of the parity-check matrix is the binary form of j + 1.
STEANE_CHECKS = tuple(tuple((j + 1) >> r & 1 for j in range(7)) for r in range(3))
# Row r of the checks has a pivot qubit appearing only in that row.
_STEANE_PIVOTS = (0, 1, 3)


def steane_syndrome(bits) -> int:
    s = 0
    for j, b in enumerate(bits):
        if b:
            s ^= j + 1
    return s


def steane_correct(bits) -> int:
    """Logical value of seven Z-basis bits after single-error correction."""
    bits = list(bits)
    s = steane_syndrome(bits)
    if s:
        bits[s - 1] ^= 1
    return sum(bits) & 1


def steane_decode(mstack: MeasurementStack) -> None:
    bits = [mstack.pop() for _ in range(7)]
    mstack.push(steane_correct(bits))


def steane_encoder(qubits) -> list[Gate]:
    """Prepare |0_L> (uniform over the even-weight Hamming words) from |0000000>."""
    out = [_g("h", qubits[p]) for p in _STEANE_PIVOTS]
    for row, p in zip(STEANE_CHECKS, _STEANE_PIVOTS):
        out.extend(_g("cx", qubits[p], qubits[j]) for j in range(7) if row[j] and j != p)
    return out


def steane() -> Pass:
    handlers = {
        "x": _transversal("x"),
        "y": _transversal("y"),
        "z": _transversal("z"),
        "h": _transversal("h"),
        "s": _transversal("z", "s"),
        "cx": _transversal("cx"),
        "cz": _transversal("cz"),
    }
    return Pass("steane", "cliffords", "cliffords", handlers, Expansion(7, steane_encoder), steane_decode)


# -- native targets -------------------------------------------------------

def _ti_h(q):
    return [_g("u1", q, params=(HALF_PI, -HALF_PI)), _g("rz", q, params=(pi,))]


def _ti_cz(a, b):
    return [_g("zz", a, b), _g("rz", a, params=(-HALF_PI,)), _g("rz", b, params=(-HALF_PI,))]


def cliffords_to_trapped_ion() -> Pass:
    def one(fn):
        return lambda gate, expand: fn(*gate.targets)

    handlers = {
        "x": one(lambda q: [_g("u1", q, params=(pi, 0.0))]),
        "y": one(lambda q: [_g("u1", q, params=(pi, HALF_PI))]),
        "z": one(lambda q: [_g("rz", q, params=(pi,))]),
        "s": one(lambda q: [_g("rz", q, params=(HALF_PI,))]),
        "h": one(_ti_h),
        "cz": one(_ti_cz),
        # CX = (1 ⊗ Ry(π/2)) CZ (1 ⊗ Ry(-π/2)); Ry(θ) = u1(θ, π/2)
        "cx": one(lambda a, b: [_g("u1", b, params=(-HALF_PI, HALF_PI))] + _ti_cz(a, b)
                  + [_g("u1", b, params=(HALF_PI, HALF_PI))]),
    }
    return Pass("h2", "cliffords", "trapped-ion", handlers)


def _na_h(q):
    return [_g("rz", q, params=(HALF_PI,)), _g("sx", q), _g("rz", q, params=(HALF_PI,))]


def cliffords_to_neutral_atom() -> Pass:
    def one(fn):
        return lambda gate, expand: fn(*gate.targets)

    handlers = {
        "x": one(lambda q: [_g("sx", q), _g("sx", q)]),
        "y": one(lambda q: [_g("rz", q, params=(pi,)), _g("sx", q), _g("sx", q)]),
        "z": one(lambda q: [_g("rz", q, params=(pi,))]),
        "s": one(lambda q: [_g("rz", q, params=(HALF_PI,))]),
        "h": one(_na_h),
        "cz": one(lambda a, b: [_g("cz", a, b)]),
        "cx": one(lambda a, b: _na_h(b) + [_g("cz", a, b)] + _na_h(b)),
    }
    return Pass("na", "cliffords", "neutral-atom", handlers)


PASSES = {
    "toy2cliffords": toy_to_cliffords,
    "rep3bit": rep3_bit,
    "rep3phase": rep3_phase,
    "steane": steane,
    "h2": cliffords_to_trapped_ion,
    "na": cliffords_to_neutral_atom,
}


def get_pass(name: str) -> Pass:
    try:
        return PASSES[name]()
    except KeyError:
        raise UnknownPass(f"unknown pass {name!r}; available: {', '.join(PASSES)}") from None


def parse_pipeline(text: str | None) -> Pipeline:
    """``"toy2cliffords,rep3bit,h2"`` -> Pipeline.  Empty text is the identity."""
    names = [n.strip() for n in (text or "").split(",") if n.strip()]
    return Pipeline([get_pass(n) for n in names])
