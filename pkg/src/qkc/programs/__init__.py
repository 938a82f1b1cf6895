"""Bundled example programs, loadable by name."""

from __future__ import annotations

from importlib import resources

from ..ir import Program
from ..textformat import parse

NAMES = ("bell_rus", "fix_test", "empty", "flip_one")


def source(name: str) -> str:
    if name not in NAMES:
        raise LookupError(f"no bundled program {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__package__).joinpath(f"{name}.qk").read_text()


def load(name: str) -> Program:
    return parse(source(name))
