"""User-facing errors with a source position and a stable code."""
from __future__ import annotations

# code -> short description; the codes are part of the CLI contract
CODES = {
    "E001": "lexical error",
    "E002": "syntax error",
    "E003": "unbalanced example block",
    "E004": "unknown option",
    "E005": "arity mismatch",
    "E006": "duplicate declaration",
    "E007": "unbound type variable",
    "E008": "type error",
    "E009": "ill-typed example",
    "E010": "example input is not a value",
    "E011": "unknown constructor",
    "E012": "unsaturated constructor in example",
    "E013": "non-exhaustive case",
    "E014": "unbound identifier",
    "E015": "bad option value",
    "E016": "unknown name in example",
    "E017": "misplaced hole",
    "E018": "missing signature",
    "E019": "unknown type constructor",
}


class Diagnostic(Exception):
    def __init__(self, message: str, code: str, line: int = 0, col: int = 0, path: str = "<input>"):
        super().__init__(message)
        self.message = message
        self.code = code
        self.line = line
        self.col = col
        self.path = path

    def at(self, path: str) -> "Diagnostic":
        self.path = path
        return self

    def render(self) -> str:
        return f"{self.path}:{self.line}:{self.col}: {self.message} [{self.code}]"

    def __str__(self):
        return self.render()
