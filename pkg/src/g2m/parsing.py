"""Cascading parser for raw model output: strict literal, then row-labelled
lines, then bare-integer flattening.

The parser is format-only: it never range-checks entries (that happens in
check_tokens, so a well-formed answer with an out-of-range value is
classified invalid-token rather than unparseable) and it never fabricates
entries to repair a malformed response.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

STAGE_STRICT = "strict"
STAGE_ROWWISE = "rowwise"
STAGE_FLATTEN = "flatten"

FAIL_NO_STRUCTURE = "no-structure"
FAIL_COUNT_MISMATCH = "count-mismatch"
FAIL_SHAPE_MISMATCH = "shape-mismatch"
FAIL_INVALID_TOKEN = "invalid-token"


@dataclass(frozen=True)
class ParseOutcome:
    """Either a parsed h x w matrix plus the stage that produced it, or a
    classified failure."""

    matrix: tuple | None = None
    stage: str | None = None
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.matrix is not None

    def rows(self) -> list[list[int]]:
        if self.matrix is None:
            raise ValueError("no matrix on a failed parse")
        return [list(r) for r in self.matrix]

    def to_json(self) -> dict:
        if self.ok:
            return {"ok": True, "stage": self.stage, "matrix": self.rows()}
        return {"ok": False, "failure": self.failure}

    @classmethod
    def from_json(cls, obj: dict) -> "ParseOutcome":
        if obj.get("ok"):
            return success(obj["matrix"], obj["stage"])
        return failure(obj["failure"])


def success(rows, stage: str) -> ParseOutcome:
    return ParseOutcome(matrix=tuple(tuple(int(v) for v in r) for r in rows), stage=stage)


def failure(kind: str) -> ParseOutcome:
    return ParseOutcome(failure=kind)


_FENCE_RE = re.compile(r"^```[^\n]*\n(.*?)\n?```$", re.DOTALL)


def normalize(text: str) -> str:
    """Strip surrounding whitespace and one enclosing code fence.

    A language tag on the opening fence line (```python) is dropped with
    the fence; anything else is left untouched.
    """
    s = text.strip()
    m = _FENCE_RE.match(s)
    if m:
        s = m.group(1).strip()
    return s


_INT = r"[+-]?\d+"
_ROW = rf"\[\s*{_INT}(?:\s*,\s*{_INT})*\s*\]"
_MATRIX_RE = re.compile(rf"^\s*\[\s*{_ROW}(?:\s*,\s*{_ROW})*\s*\]\s*$")
_ROW_RE = re.compile(_ROW)
_TOKEN_RE = re.compile(_INT)


def parse_strict(text: str, h: int, w: int) -> ParseOutcome:
    """Accept only a full-text list-of-lists literal of shape h x w."""
    if not _MATRIX_RE.match(text):
        return failure(FAIL_NO_STRUCTURE)
    rows = [[int(t) for t in _TOKEN_RE.findall(m.group(0))]
            for m in _ROW_RE.finditer(text)]
    if len(rows) != h or any(len(r) != w for r in rows):
        return failure(FAIL_SHAPE_MISMATCH)
    return success(rows, STAGE_STRICT)


_ROWLINE_RE = re.compile(
    rf"^\s*row\s*(\d+)\s*=\s*\[\s*({_INT}(?:\s*,\s*{_INT})*)\s*\]\s*$",
    re.IGNORECASE)


def parse_rowwise(text: str, h: int, w: int) -> ParseOutcome:
    """Collect ROW<k>=[...] lines; succeed iff labels 1..h each appear exactly
    once with w integers. Labels are case-insensitive and may arrive in any
    order; a duplicate, missing, or out-of-range label fails the stage."""
    found: dict[int, list[int]] = {}
    for line in text.splitlines():
        m = _ROWLINE_RE.match(line)
        if not m:
            continue
        k = int(m.group(1))
        if k in found or not 1 <= k <= h:
            return failure(FAIL_NO_STRUCTURE)
        found[k] = [int(t) for t in _TOKEN_RE.findall(m.group(2))]
    if set(found) != set(range(1, h + 1)):
        return failure(FAIL_NO_STRUCTURE)
    if any(len(found[k]) != w for k in found):
        return failure(FAIL_NO_STRUCTURE)
    return success([found[k] for k in range(1, h + 1)], STAGE_ROWWISE)


def parse_flatten(text: str, h: int, w: int) -> ParseOutcome:
    """Last resort: pull every integer token and reshape row-major if the
    count equals h*w."""
    tokens = [int(m.group(0)) for m in _TOKEN_RE.finditer(text)]
    if len(tokens) != h * w:
        return failure(FAIL_COUNT_MISMATCH)
    return success([tokens[r * w:(r + 1) * w] for r in range(h)], STAGE_FLATTEN)


def parse_cascade(text: str, h: int, w: int) -> ParseOutcome:
    """normalize, then strict -> rowwise -> flatten; first success wins.

    Total: never raises. When every stage fails, the flatten failure kind is
    returned and the caller scores the grid 0% cell accuracy.
    """
    s = normalize(text)
    out = parse_strict(s, h, w)
    if out.ok:
        return out
    out = parse_rowwise(s, h, w)
    if out.ok:
        return out
    return parse_flatten(s, h, w)


def check_tokens(outcome: ParseOutcome, c: int) -> ParseOutcome:
    """Downgrade a parsed matrix containing entries outside [0, c) to an
    invalid-token failure. Format parsing stays sign-agnostic; the range
    rule belongs to metric time."""
    if not outcome.ok:
        return outcome
    for row in outcome.matrix:
        for v in row:
            if not 0 <= v < c:
                return failure(FAIL_INVALID_TOKEN)
    return outcome


def serialize_matrix(matrix) -> str:
    """Render a matrix in the exact format the prompt requests."""
    return "[" + ", ".join(
        "[" + ", ".join(str(int(v)) for v in row) + "]" for row in matrix) + "]"
