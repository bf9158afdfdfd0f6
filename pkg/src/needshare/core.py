"""Problems, allocations and domain classification for linear hierarchies with needs.

A problem lists agents from the lowest rank to the top, together with the
revenue each agent brings and the need each agent must have covered.  Agent
ids only encode order; every rule works on positions, so any strictly
increasing relabeling gives the same payoffs.
"""

from __future__ import annotations

import enum
import math
import operator
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

DEFAULT_TOL = 1e-9


class ProblemError(ValueError):
    """Structurally malformed problem (lengths, signs, agent ordering)."""


class DomainError(ValueError):
    """Well-formed problem that lies outside the domain a rule is defined on."""


class Domain(str, enum.Enum):
    Z = "Z"
    ZSTAR = "ZStar"
    ZZERO = "ZZero"
    INVALID = "Invalid"

    def __str__(self) -> str:
        return self.value

    def contains(self, tag: "Domain") -> bool:
        """True if a problem classified as ``tag`` belongs to this domain."""
        return tag in _MEMBERS[self]


_MEMBERS = {
    Domain.ZZERO: frozenset({Domain.ZZERO}),
    Domain.Z: frozenset({Domain.ZZERO, Domain.Z}),
    Domain.ZSTAR: frozenset({Domain.ZZERO, Domain.Z, Domain.ZSTAR}),
    Domain.INVALID: frozenset({Domain.INVALID}),
}


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")


@dataclass(frozen=True)
class Problem:
    """A linear hierarchy ``agents`` (lowest rank first) with revenues and needs."""

    agents: Tuple[int, ...]
    revenues: Tuple[float, ...]
    needs: Tuple[float, ...]

    def __post_init__(self):
        agents = self.agents
        if type(agents) is not tuple or not set(map(type, agents)) <= {int}:
            agents = _as_ids(agents)
        try:
            revenues = tuple(map(float, self.revenues))
            needs = tuple(map(float, self.needs))
        except (TypeError, ValueError) as exc:
            raise ProblemError(f"revenues and needs must be numbers: {exc}") from None
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "revenues", revenues)
        object.__setattr__(self, "needs", needs)
        _check_structure(agents, revenues, needs)
        # classified once up front; nearly every problem built is checked against a domain
        object.__setattr__(self, "_tag", _classify(revenues, needs))

    @classmethod
    def canonical(cls, revenues: Sequence[float], needs: Sequence[float] | None = None) -> "Problem":
        """Build a problem over agents ``1..n``; needs default to zero."""
        if needs is None:
            needs = [0.0] * len(revenues)
        return cls(tuple(range(1, len(revenues) + 1)), revenues, needs)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def surpluses(self) -> Tuple[float, ...]:
        return tuple(r - z for r, z in zip(self.revenues, self.needs))

    @property
    def total_revenue(self) -> float:
        return sum(self.revenues)

    def domain(self) -> Domain:
        return validate(self)


def _as_ids(agents) -> Tuple[int, ...]:
    ids = []
    for a in agents:
        if isinstance(a, bool):
            raise ProblemError(f"agent ids must be integers, got {a!r}")
        try:
            ids.append(operator.index(a))
        except TypeError:
            raise ProblemError(f"agent ids must be integers, got {a!r}") from None
    return tuple(ids)


def _check_structure(agents, revenues, needs) -> None:
    n = len(agents)
    if n < 1:
        raise ProblemError("a problem needs at least one agent")
    if len(revenues) != n or len(needs) != n:
        raise ProblemError(
            f"length mismatch: {n} agents, {len(revenues)} revenues, {len(needs)} needs"
        )
    if agents[0] < 1 or not all(map(operator.lt, agents, agents[1:])):
        raise ProblemError(f"agent ids must be positive and strictly increasing: {agents}")
    for label, values in (("revenue", revenues), ("need", needs)):
        # a NaN or infinite entry makes the sum non-finite
        if min(values) < 0 or not math.isfinite(sum(values)):
            raise ProblemError(f"every {label} must be a finite nonnegative number, got {values}")


@dataclass(frozen=True)
class Allocation:
    agents: Tuple[int, ...]
    payoffs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "payoffs", tuple(map(float, self.payoffs)))
        if len(self.agents) != len(self.payoffs):
            raise ValueError("allocation agents and payoffs differ in length")

    @property
    def total(self) -> float:
        return sum(self.payoffs)

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.agents, self.payoffs))

    def is_nonnegative(self, tol: float = DEFAULT_TOL) -> bool:
        return min(self.payoffs) >= -tol


def validate(problem: Problem) -> Domain:
    """Return the most specific domain tag for ``problem``.

    ``ZZero`` when every need is zero, else ``Z`` when revenues cover needs
    agent by agent, else ``ZStar`` when they cover needs in aggregate, else
    ``Invalid``.  Structural defects are caught earlier, when the
    :class:`Problem` is built, and raise :class:`ProblemError`.
    """
    return problem._tag


def _classify(r: Tuple[float, ...], z: Tuple[float, ...]) -> Domain:
    if not any(z):
        return Domain.ZZERO
    if all(map(operator.ge, r, z)):
        return Domain.Z
    if sum(r) >= sum(z):
        return Domain.ZSTAR
    return Domain.INVALID


def require_domain(problem: Problem, domain: Domain) -> Domain:
    tag = validate(problem)
    if not domain.contains(tag):
        raise DomainError(f"problem is in {tag.value}, outside required domain {domain.value}")
    return tag


def canonicalize(problem: Problem) -> Tuple[Problem, Dict[int, int]]:
    """Relabel agents to ``1..n`` keeping order; returns the problem and the map old -> new."""
    mapping = {a: i for i, a in enumerate(problem.agents, start=1)}
    if all(a == i for a, i in mapping.items()):
        return problem, mapping
    return Problem(tuple(mapping.values()), problem.revenues, problem.needs), mapping


def relabel(problem: Problem, agents: Sequence[int]) -> Problem:
    """Same characteristics, rank by rank, on a new strictly increasing id set."""
    return Problem(tuple(agents), problem.revenues, problem.needs)


def approx_equal(x: Allocation, y: Allocation, tol: Tolerance | float = DEFAULT_TOL) -> bool:
    if x.agents != y.agents:
        raise ValueError(f"cannot compare allocations over {x.agents} and {y.agents}")
    eps = tol.abs_tol if isinstance(tol, Tolerance) else tol
    return all(abs(a - b) <= eps for a, b in zip(x.payoffs, y.payoffs))
