import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkc.errors import DimensionMismatch, ParamArity, UnknownGate, UnknownGateSet
from qkc.gatesets import (
    BUILTIN_NAMES, CX, H, X, Z, GateDefinition, GateSet, builtin_gateset, equivalent_up_to_phase,
    gateset_from_dict, is_unitary, load_gateset, resolve_gateset, rz_matrix, u1_matrix, unitary_of,
)

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def test_builtin_contents():
    want = {
        "toy": {"flip", "mix", "entangle"},
        "cliffords": {"x", "y", "z", "s", "h", "cx", "cz"},
        "trapped-ion": {"u1", "rz", "zz"},
        "neutral-atom": {"rz", "sx", "cz"},
    }
    for name in BUILTIN_NAMES:
        assert set(builtin_gateset(name).defs) == want[name]
    with pytest.raises(UnknownGateSet):
        builtin_gateset("superconducting")


def test_toy_gates_equal_their_clifford_images():
    toy, cl = builtin_gateset("toy"), builtin_gateset("cliffords")
    for t, c in [("flip", "x"), ("mix", "h"), ("entangle", "cx")]:
        assert np.array_equal(toy[t].unitary(()), cl[c].unitary(()))


def test_known_matrices():
    cl = builtin_gateset("cliffords")
    assert np.array_equal(unitary_of(cl, "x"), [[0, 1], [1, 0]])
    assert np.allclose(unitary_of(cl, "h"), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    assert np.allclose(u1_matrix(math.pi, 0), [[0, -1j], [-1j, 0]])
    assert equivalent_up_to_phase(rz_matrix(math.pi), Z)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_every_gate_is_unitary(name):
    gs = builtin_gateset(name)
    for d in gs.defs.values():
        u = d.unitary(tuple(0.37 * (i + 1) for i in range(d.param_count)))
        assert u.shape == (2**d.arity,) * 2 and is_unitary(u)


@given(angles, angles)
def test_parameterized_gates_unitary(theta, phi):
    assert is_unitary(u1_matrix(theta, phi))
    assert is_unitary(rz_matrix(theta))


def test_param_arity_and_unknown_gate():
    ti = builtin_gateset("trapped-ion")
    with pytest.raises(ParamArity):
        ti["u1"].unitary((1.0,))
    with pytest.raises(ParamArity):
        builtin_gateset("cliffords")["x"].unitary((1.0,))
    with pytest.raises(UnknownGate):
        ti["h"]


def test_reserved_done():
    with pytest.raises(ValueError):
        GateSet.of("bad", GateDefinition("done", 1, matrix=X))


@given(st.floats(-math.pi, math.pi, allow_nan=False))
def test_phase_equivalence_properties(alpha):
    ph = np.exp(1j * alpha)
    assert equivalent_up_to_phase(ph * CX, CX)
    assert equivalent_up_to_phase(CX, ph * CX)
    assert not equivalent_up_to_phase(ph * X, Z)


def test_equivalence_tolerance_and_shapes():
    assert not equivalent_up_to_phase(H + 1e-6, H, 1e-9)
    assert equivalent_up_to_phase(H + 1e-12, H, 1e-9)
    with pytest.raises(DimensionMismatch):
        equivalent_up_to_phase(X, CX)


def test_json_gatesets(tmp_path):
    data = {"name": "mine", "gates": [
        {"name": "x", "arity": 1, "matrix": [[0, 1], [1, 0]]},
        {"name": "sy", "arity": 1, "matrix": [["0.5+0.5j", "-0.5-0.5j"], [[0.5, 0.5], [0.5, 0.5]]]},
        {"name": "r", "arity": 1, "params": 1, "factory": "rz"},
    ]}
    path = tmp_path / "mine.json"
    path.write_text(json.dumps(data))
    gs = load_gateset(path)
    assert gs.name == "mine" and gs["r"].param_count == 1
    assert resolve_gateset(str(path)).name == "mine"
    assert resolve_gateset("toy") is builtin_gateset("toy")
    with pytest.raises(ValueError):
        gateset_from_dict({"name": "n", "gates": [{"name": "a", "arity": 1, "matrix": [[1, 1], [0, 1]]}]})
    with pytest.raises(ValueError):
        gateset_from_dict({"name": "n", "gates": [{"name": "a", "arity": 2, "matrix": [[0, 1], [1, 0]]}]})
