"""The built-in prelude and its context."""
from __future__ import annotations

import os
from functools import lru_cache
from importlib import resources

ENV_VAR = "HOLEFORGE_PRELUDE"


def builtin_prelude_text() -> str:
    return resources.files("holeforge").joinpath("data/prelude.syn").read_text(encoding="utf-8")


def prelude_text(path: str | None = None) -> tuple[str, str]:
    """(text, path) of the prelude in effect: explicit path, then the
    environment override, then the built-in file."""
    path = path or os.environ.get(ENV_VAR)
    if path:
        with open(path, encoding="utf-8") as fh:
            return fh.read(), path
    return builtin_prelude_text(), "<prelude>"


@lru_cache(maxsize=None)
def _load_builtin():
    from .program import load_program
    from .parser import parse_source
    src = parse_source(builtin_prelude_text(), "<prelude>", known_ctors={})
    return load_program(src, None)


def prelude_context():
    """Context of the built-in prelude (datatypes and constructors only)."""
    return _load_builtin().ctx


def prelude_program():
    return _load_builtin()
