import pytest

from qkc.errors import RenameCollision
from qkc.gatesets import builtin_gateset
from qkc.ir import (
    DONE, CallbackRef, Gate, Kernel, Program, all_qubits, bound_qubits, callback_names, free_qubits,
    is_qubit_token, iter_gates, rename_qubits, validate,
)
from qkc.runtime import bell_kernel

CLIFF = builtin_gateset("cliffords")


def messages(program, gs=CLIFF):
    return [d.message for d in validate(program, gs)]


def test_gate_equality_ignores_spelling_and_tiny_float_noise():
    assert Gate("rz", ("q",), (1.0,), ("1.0",)) == Gate("rz", ("q",), (1.0 + 1e-14,))
    assert Gate("rz", ("q",), (1.0,)) != Gate("rz", ("q",), (1.1,))
    assert hash(Gate("x", ["q"])) == hash(Gate("x", ("q",)))


def test_kernel_defaults_and_string_callback():
    k = Kernel("q", [Gate("x", ("q",))], "fix")
    assert k.callback == CallbackRef("fix")
    assert Kernel("q").callback is DONE


def test_anonymous_kernels_pick_unused_names():
    inner = Kernel.anonymous([Gate("h", ("_a0",))])
    assert inner.qubit == "_a0"
    outer = Kernel.anonymous([inner])
    assert outer.qubit == "_a1"


def test_scope_helpers():
    k = bell_kernel()
    assert bound_qubits(k) == {"q1", "q2"}
    assert callback_names(k) == {"done", "repeat_until_zero"}
    assert free_qubits(Kernel("a", (Gate("x", ("b",)),))) == {"b"}
    assert free_qubits(k) == frozenset()
    assert [g.name for g in iter_gates(k)] == ["h", "cx"]


def test_bell_program_is_valid():
    assert messages(Program("cliffords", bell_kernel())) == []


@pytest.mark.parametrize("kernel, fragment", [
    (Kernel("q", (Gate("cx", ("q", "q")),)), "duplicate target"),
    (Kernel("q", (Gate("x", ("r",)),)), "not allocated"),
    (Kernel("q", (Gate("t", ("q",)),)), "unknown gate"),
    (Kernel("q", (Gate("cx", ("q",)),)), "expects 2 target"),
    (Kernel("q", (Gate("x", ("q",), (1.0,)),)), "expects 0 parameter"),
    (Kernel("q", (Kernel("q"),)), "shadows"),
    (Kernel("q", (), CallbackRef("done", ("q",))), "takes no parameters"),
    (Kernel("q", (), CallbackRef("fix", ("z",))), "not an allocated qubit"),
    (Kernel("bad name"), "invalid qubit id"),
])
def test_validate_reports(kernel, fragment):
    msgs = messages(Program("cliffords", kernel))
    assert any(fragment in m for m in msgs), msgs


def test_validate_gateset_mismatch():
    assert any("gate set" in m for m in messages(Program("toy", bell_kernel())))


def test_sibling_kernels_may_reuse_a_name():
    k = Kernel("a", (Kernel("b"), Kernel("b")))
    assert messages(Program("cliffords", k)) == []


def test_rename_is_total_and_checks_collisions():
    k = Kernel("q1", (Kernel("q2", (Gate("cx", ("q2", "q1")),), CallbackRef("fix", ("q1",))),))
    r = rename_qubits(k, {"q1": "a", "q2": "b"})
    assert all_qubits(r) == {"a", "b"}
    assert r.body[0].callback.params == ("a",)
    with pytest.raises(RenameCollision):
        rename_qubits(k, {"q1": "q2"})
    with pytest.raises(RenameCollision):
        rename_qubits(k, {"q1": "z", "q2": "z"})


def test_qubit_tokens():
    assert is_qubit_token("q1.0")
    assert not is_qubit_token("a b")
    assert not is_qubit_token("q:")
    assert not is_qubit_token(3)
