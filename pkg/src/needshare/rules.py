"""Allocation rules for linear hierarchies with needs.

Every rule maps a :class:`~needshare.core.Problem` to an
:class:`~needshare.core.Allocation` over the same agents.  Rules read only
the rank order of the agents, never the id values.

Need-adjusted geometric rule with parameter ``lam``: the lowest agent keeps
their need plus a share ``lam`` of their surplus; the remaining ``1 - lam``
is carried up and added to the next agent's surplus, and so on.  The top
agent absorbs whatever is still being carried::

    x_i = z_i + lam * (r_i - z_i + s_{i-1}),   s_i = (1 - lam) * (r_i - z_i + s_{i-1})
    x_n = r_n + s_{n-1}

Need-adjusted serial rule: each agent's surplus is split equally between
that agent and every agent above them::

    x_i = z_i + sum_{j <= i} (r_j - z_j) / (n - j + 1)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

from .core import Allocation, Domain, Problem, require_domain

Rule = Callable[[Problem], Allocation]

# A rule may be evaluated on any problem where total revenue covers total need.
RULE_DOMAIN = Domain.ZSTAR


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    return lam


def _surplus_carry(revenues: Sequence[float], needs: Sequence[float], lam: float) -> List[float]:
    n = len(revenues)
    keep = 1.0 - lam
    carry = 0.0
    out = []
    for i in range(n - 1):
        pot = revenues[i] - needs[i] + carry
        out.append(needs[i] + lam * pot)
        carry = keep * pot
    out.append(revenues[n - 1] + carry)
    return out


def _serial(revenues: Sequence[float], needs: Sequence[float]) -> List[float]:
    n = len(revenues)
    acc = 0.0
    out = []
    for j in range(n):
        acc += (revenues[j] - needs[j]) / (n - j)
        out.append(needs[j] + acc)
    return out


def geometric(problem: Problem, lam: float) -> Allocation:
    """Need-adjusted geometric rule, computed in one forward pass."""
    lam = _check_lambda(lam)
    require_domain(problem, RULE_DOMAIN)
    return Allocation(problem.agents, _surplus_carry(problem.revenues, problem.needs, lam))


def geometric_closed_form(problem: Problem, lam: float) -> Allocation:
    """Need-adjusted geometric rule evaluated term by term from its closed form.

    Quadratic in the number of agents; kept as an independent cross-check of
    :func:`geometric`.
    """
    lam = _check_lambda(lam)
    require_domain(problem, RULE_DOMAIN)
    s = problem.surpluses
    n = problem.n
    out = []
    for i in range(n - 1):
        discounted = sum((1.0 - lam) ** (i - j) * s[j] for j in range(i + 1))
        out.append(problem.needs[i] + lam * discounted)
    out.append(problem.revenues[n - 1] + sum((1.0 - lam) ** (n - 1 - j) * s[j] for j in range(n - 1)))
    return Allocation(problem.agents, out)


def full_transfer(problem: Problem) -> Allocation:
    """Everyone gets their need; the top agent also takes the whole surplus."""
    return geometric(problem, 0.0)


def no_transfer(problem: Problem) -> Allocation:
    return geometric(problem, 1.0)


def balanced_transfer(problem: Problem) -> Allocation:
    return geometric(problem, 0.5)


def serial(problem: Problem) -> Allocation:
    """Need-adjusted serial rule."""
    require_domain(problem, RULE_DOMAIN)
    return Allocation(problem.agents, _serial(problem.revenues, problem.needs))


def geometric_zero_needs(problem: Problem, lam: float) -> Allocation:
    """Geometric rule on problems where every need is zero."""
    lam = _check_lambda(lam)
    require_domain(problem, Domain.ZZERO)
    return Allocation(problem.agents, _surplus_carry(problem.revenues, problem.needs, lam))


def serial_zero_needs(problem: Problem) -> Allocation:
    require_domain(problem, Domain.ZZERO)
    return Allocation(problem.agents, _serial(problem.revenues, problem.needs))


def extend(base: Rule, problem: Problem) -> Allocation:
    """Pay needs first, then share the surpluses with a zero-needs ``base`` rule.

    Only defined when each agent's revenue covers their own need, so that the
    surpluses form a valid zero-needs problem.
    """
    require_domain(problem, Domain.Z)
    reduced = Problem(problem.agents, problem.surpluses, [0.0] * problem.n)
    share = base(reduced)
    return Allocation(problem.agents, [z + x for z, x in zip(problem.needs, share.payoffs)])


def folk_two_agent(problem: Problem) -> Allocation:
    """Two-agent folk solution: the subordinate's surplus is split in half."""
    if problem.n != 2:
        raise ValueError(f"the folk solution is defined for two agents, got {problem.n}")
    require_domain(problem, RULE_DOMAIN)
    (r1, r2), (z1, _) = problem.revenues, problem.needs
    half = (r1 - z1) / 2.0
    return Allocation(problem.agents, (z1 + half, r2 + half))


PROBE = Problem((1, 2), (1.0, 0.0), (0.0, 0.0))


def infer_lambda(rule: Rule) -> float:
    """Share of a unit surplus the subordinate keeps on the two-agent probe.

    For a need-adjusted geometric rule this is exactly its parameter.
    """
    lam = rule(PROBE).payoffs[0]
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"rule pays {lam!r} to the subordinate on the probe; not in [0, 1]")
    return lam


_KINDS = {
    "geometric",
    "serial",
    "full-transfer",
    "no-transfer",
    "balanced",
    "geometric-zero-needs",
    "serial-zero-needs",
    "extended",
}
_ZERO_NEEDS_KINDS = {"geometric-zero-needs", "serial-zero-needs"}
_SPEC_RE = re.compile(r"^\s*([a-z-]+)\s*(?::\s*([^()\s]+))?\s*(?:\((.*)\))?\s*$")


@dataclass(frozen=True)
class RuleSpec:
    """Selects a rule by name, with its parameter where it has one.

    ``RuleSpec("geometric", 0.3)`` is callable like any rule.  The named
    focal rules are aliases: ``full-transfer``, ``no-transfer`` and
    ``balanced`` evaluate the geometric rule at 0, 1 and 1/2.
    ``RuleSpec("extended", base=RuleSpec("serial-zero-needs"))`` lifts a
    zero-needs rule to problems with needs.
    """

    kind: str
    lam: Optional[float] = None
    base: Optional["RuleSpec"] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown rule {self.kind!r}; expected one of {sorted(_KINDS)}")
        if self.kind in ("geometric", "geometric-zero-needs"):
            if self.lam is None:
                raise ValueError(f"rule {self.kind!r} requires a lambda")
            object.__setattr__(self, "lam", _check_lambda(self.lam))
        elif self.lam is not None:
            raise ValueError(f"rule {self.kind!r} takes no lambda")
        if self.kind == "extended":
            if self.base is None or self.base.kind not in _ZERO_NEEDS_KINDS:
                raise ValueError("extended rules take a zero-needs base rule")
        elif self.base is not None:
            raise ValueError(f"rule {self.kind!r} takes no base rule")

    @property
    def effective_lambda(self) -> Optional[float]:
        """Geometric parameter this rule evaluates with, if it is a geometric rule."""
        return {"full-transfer": 0.0, "no-transfer": 1.0, "balanced": 0.5}.get(self.kind, self.lam)

    def __call__(self, problem: Problem) -> Allocation:
        kind = self.kind
        if kind == "serial":
            return serial(problem)
        if kind == "serial-zero-needs":
            return serial_zero_needs(problem)
        if kind == "geometric-zero-needs":
            return geometric_zero_needs(problem, self.lam)
        if kind == "extended":
            return extend(self.base, problem)
        return geometric(problem, self.effective_lambda)

    def __str__(self) -> str:
        if self.kind == "extended":
            return f"extended({self.base})"
        if self.lam is not None:
            return f"{self.kind}:{self.lam!r}"
        return self.kind

    @classmethod
    def parse(cls, text: str, lam: Optional[float] = None) -> "RuleSpec":
        """Parse ``geometric:0.3``, ``serial`` or ``extended(geometric-zero-needs:0.5)``.

        ``lam`` supplies the parameter when the text leaves it out (the CLI's
        ``--lambda`` flag).
        """
        m = _SPEC_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse rule {text!r}")
        kind, inline, inner = m.groups()
        if inline is not None:
            try:
                lam = float(inline)
            except ValueError:
                raise ValueError(f"bad lambda in rule {text!r}") from None
        if kind == "extended":
            if inner is None:
                raise ValueError("extended rule needs a base, e.g. extended(serial-zero-needs)")
            return cls("extended", base=cls.parse(inner, lam))
        if inner is not None:
            raise ValueError(f"rule {kind!r} takes no base rule")
        if kind not in ("geometric", "geometric-zero-needs"):
            lam = None
        return cls(kind, lam)
