"""JSON documents for problems and allocations.

A problem file holds one JSON object::

    {"agents": [1, 2, 3, 4], "revenues": [21, 1, 10, 10], "needs": [1, 1, 5, 5]}

A stream file (``.jsonl``) holds one such object per line.  Problems are
written with full float precision so they read back identically; payoffs
are rounded to 12 significant digits for stable golden output.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List

from .core import Allocation, Problem, ProblemError

PAYOFF_DIGITS = 12


class FormatError(ValueError):
    """A document that is not valid JSON or lacks the expected fields."""


def problem_to_dict(problem: Problem) -> Dict[str, Any]:
    return {
        "agents": list(problem.agents),
        "revenues": list(problem.revenues),
        "needs": list(problem.needs),
    }


def problem_from_dict(doc: Any) -> Problem:
    """Build a problem from a parsed document; structural defects raise ProblemError."""
    if not isinstance(doc, dict):
        raise FormatError(f"expected a JSON object, got {type(doc).__name__}")
    missing = [k for k in ("agents", "revenues", "needs") if k not in doc]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}")
    for key in ("agents", "revenues", "needs"):
        if not isinstance(doc[key], list):
            raise FormatError(f"field {key!r} must be an array")
    for v in doc["revenues"] + doc["needs"]:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FormatError(f"revenues and needs must be numbers, got {v!r}")
    return Problem(tuple(doc["agents"]), doc["revenues"], doc["needs"])


def round_payoff(x: float) -> float:
    return float(f"{x:.{PAYOFF_DIGITS}g}")


def allocation_to_dict(allocation: Allocation, rounded: bool = False) -> Dict[str, Any]:
    pay = [round_payoff(x) for x in allocation.payoffs] if rounded else list(allocation.payoffs)
    return {"agents": list(allocation.agents), "payoffs": pay}


def dumps_problem(problem: Problem) -> str:
    return json.dumps(problem_to_dict(problem))


def loads_problem(text: str) -> Problem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return problem_from_dict(doc)


def read_problem(path: str | Path) -> Problem:
    return loads_problem(Path(path).read_text())


def read_problems(path: str | Path) -> List[Problem]:
    """Problems from a stream file, one JSON object per non-blank line."""
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(loads_problem(line))
        except (FormatError, ProblemError) as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
    return out


def write_problems(path: str | Path, problems: Iterable[Problem]) -> None:
    Path(path).write_text("".join(dumps_problem(p) + "\n" for p in problems))
