"""Kernel-based quantum IR, callback-wrapping compiler passes and an evaluator."""

from .compiler import Expansion, Pass, Pipeline, chain
from .errors import QkcError
from .evaluator import NoiseModel, run, run_shots, step, trace
from .gatesets import GateSet, builtin_gateset, equivalent_up_to_phase
from .ir import DONE, CallbackRef, Gate, Kernel, Program, validate
from .kernels import BACKEND
from .passes import PASSES, parse_pipeline
from .runtime import CallbackRegistry, MeasurementStack, builtin_callbacks
from .textformat import parse, serialize

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DONE", "PASSES", "CallbackRef", "CallbackRegistry", "Expansion", "Gate", "GateSet",
    "Kernel", "MeasurementStack", "NoiseModel", "Pass", "Pipeline", "Program", "QkcError",
    "builtin_callbacks", "builtin_gateset", "chain", "equivalent_up_to_phase", "parse",
    "parse_pipeline", "run", "run_shots", "serialize", "step", "trace", "validate",
]
