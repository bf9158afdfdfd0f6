"""Axiom predicates, seeded problem generation and the audit engine.

Each ``check_*`` function evaluates one axiom on one concrete instance and
returns a :class:`Trial`.  Relational axioms take the perturbation
explicitly (a replacement top agent, a split, a second problem...), so a
failing trial can be replayed from its serialized form.

:func:`audit` draws problems and perturbation parameters from one seeded
stream per axiom and tallies the verdicts.  A clean audit only means no
counterexample turned up in the sampled trials.

A trial is *skipped* rather than failed when the instance or one of the
problems it builds falls outside the audit domain, or when the rule refuses
the problem with :class:`~needshare.core.DomainError`.
"""

from __future__ import annotations

import enum
import json
import operator
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .core import (
    DEFAULT_TOL,
    Allocation,
    Domain,
    DomainError,
    Problem,
    ProblemError,
    relabel,
    validate,
)
from .formats import allocation_to_dict, problem_to_dict
from .rules import Rule, folk_two_agent

MAX_AGENTS = 12


class Axiom(str, enum.Enum):
    BALANCE = "balance"
    ANONYMITY = "anonymity"
    NEEDS_LOWER_BOUND = "needs-lower-bound"
    WEAK_NEEDS_LOWER_BOUND = "weak-needs-lower-bound"
    LOWEST_RANK_CONSISTENCY = "lowest-rank-consistency"
    HIGHEST_RANK_INDEPENDENCE = "highest-rank-independence"
    HIGHEST_RANK_SPLITTING_NEUTRALITY = "highest-rank-splitting-neutrality"
    BILATERAL_LINEARITY = "bilateral-linearity"
    EQUAL_TREATMENT_OF_EQUALS = "equal-treatment-of-equals"
    HIERARCHICAL_ORDER_PRESERVATION = "hierarchical-order-preservation"
    CANONICAL_BILATERAL_FAIRNESS = "canonical-bilateral-fairness"
    SUPERIOR_INDEPENDENCE = "superior-independence"
    CANONICAL_SYMMETRIC_FAIRNESS = "canonical-symmetric-fairness"
    DECOMPOSABILITY = "decomposability"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AxiomId:
    """An axiom, plus the target share for canonical bilateral fairness."""

    axiom: Axiom
    lam: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "axiom", Axiom(self.axiom))
        if self.axiom is Axiom.CANONICAL_BILATERAL_FAIRNESS:
            lam = 0.5 if self.lam is None else float(self.lam)
            if not 0.0 <= lam <= 1.0:
                raise ValueError(f"canonical bilateral fairness share must lie in [0, 1], got {lam}")
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise ValueError(f"axiom {self.axiom.value} takes no parameter")

    def __str__(self) -> str:
        if self.lam is not None and self.lam != 0.5:
            return f"{self.axiom.value}:{self.lam!r}"
        return self.axiom.value

    @classmethod
    def parse(cls, text: str) -> "AxiomId":
        name, _, param = text.strip().partition(":")
        try:
            axiom = Axiom(name)
        except ValueError:
            raise ValueError(f"unknown axiom {name!r}") from None
        return cls(axiom, float(param) if param else None)


A = Axiom
SUITES: Dict[str, Tuple[AxiomId, ...]] = {
    "geometric-characterization": tuple(AxiomId(a) for a in (
        A.NEEDS_LOWER_BOUND, A.LOWEST_RANK_CONSISTENCY, A.HIGHEST_RANK_INDEPENDENCE,
        A.HIGHEST_RANK_SPLITTING_NEUTRALITY, A.BILATERAL_LINEARITY)),
    "no-transfer-characterization": (AxiomId(A.HIGHEST_RANK_INDEPENDENCE), AxiomId(A.EQUAL_TREATMENT_OF_EQUALS)),
    "full-transfer-characterization": (
        AxiomId(A.HIGHEST_RANK_SPLITTING_NEUTRALITY), AxiomId(A.HIERARCHICAL_ORDER_PRESERVATION)),
    "balanced-characterization": tuple(AxiomId(a) for a in (
        A.LOWEST_RANK_CONSISTENCY, A.HIGHEST_RANK_INDEPENDENCE,
        A.HIGHEST_RANK_SPLITTING_NEUTRALITY, A.CANONICAL_BILATERAL_FAIRNESS)),
    "serial-characterization": tuple(AxiomId(a) for a in (
        A.LOWEST_RANK_CONSISTENCY, A.SUPERIOR_INDEPENDENCE, A.CANONICAL_SYMMETRIC_FAIRNESS)),
    "two-agent-folk": (AxiomId(A.HIGHEST_RANK_INDEPENDENCE), AxiomId(A.CANONICAL_BILATERAL_FAIRNESS)),
    "full-transfer-zstar": (AxiomId(A.HIGHEST_RANK_INDEPENDENCE), AxiomId(A.NEEDS_LOWER_BOUND)),
    "geometric-zstar": tuple(AxiomId(a) for a in (
        A.WEAK_NEEDS_LOWER_BOUND, A.LOWEST_RANK_CONSISTENCY, A.HIGHEST_RANK_INDEPENDENCE,
        A.HIGHEST_RANK_SPLITTING_NEUTRALITY, A.BILATERAL_LINEARITY)),
    "all": tuple(AxiomId(a) for a in Axiom),
}
del A


def parse_axioms(text: str) -> Tuple[AxiomId, ...]:
    """Comma list of axiom names and suite names, deduplicated in order."""
    out: List[AxiomId] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        ids = SUITES[item] if item in SUITES else (AxiomId.parse(item),)
        out.extend(a for a in ids if a not in out)
    if not out:
        raise ValueError("no axioms given")
    return tuple(out)


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Trial:
    """Outcome of one axiom check.

    ``problems`` and ``allocations`` hold every instance the check evaluated,
    in order, so that a failure can be inspected without rerunning the rule.
    """

    axiom: str
    problem: Problem
    verdict: Verdict
    perturbation: Dict[str, Any] = field(default_factory=dict)
    problems: Tuple[Problem, ...] = ()
    allocations: Tuple[Allocation, ...] = ()
    reason: str = ""
    index: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def failed(self) -> bool:
        return self.verdict is Verdict.FAIL

    @property
    def skipped(self) -> bool:
        return self.verdict is Verdict.SKIPPED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "axiom": self.axiom,
            "index": self.index,
            "verdict": self.verdict.value,
            "reason": self.reason,
            "problem": problem_to_dict(self.problem),
            "perturbation": self.perturbation,
            "problems": [problem_to_dict(p) for p in self.problems],
            "allocations": [allocation_to_dict(x) for x in self.allocations],
        }


class _Skip(Exception):
    pass


def _in(domain: Domain, problem: Problem, what: str = "problem") -> None:
    tag = validate(problem)
    if not domain.contains(tag):
        raise _Skip(f"{what} is in {tag.value}, outside {domain.value}")


def _apply(rule: Rule, problem: Problem) -> Allocation:
    try:
        return rule(problem)
    except DomainError as exc:
        raise _Skip(f"rule undefined: {exc}") from None


def _close(a: Sequence[float], b: Sequence[float], tol: float) -> bool:
    return len(a) == len(b) and max(map(abs, map(operator.sub, a, b)), default=0.0) <= tol


def _build(agents, revenues, needs, what: str) -> Problem:
    try:
        return Problem(tuple(agents), revenues, needs)
    except ProblemError as exc:
        raise _Skip(f"{what} is not a problem: {exc}") from None


class _Recorder:
    """Collects the problems and allocations a check touches."""

    def __init__(self, rule: Rule, domain: Domain):
        self.rule = rule
        self.domain = domain
        self.problems: List[Problem] = []
        self.allocations: List[Allocation] = []

    def eval(self, problem: Problem, what: str = "problem") -> Allocation:
        _in(self.domain, problem, what)
        x = _apply(self.rule, problem)
        self.problems.append(problem)
        self.allocations.append(x)
        return x


def _trial(axiom, problem, domain, rule, body, perturbation=None) -> Trial:
    rec = _Recorder(rule, domain)
    try:
        ok, explain = body(rec)
        # explanations are formatted only for failures; most trials pass
        verdict, reason = (Verdict.PASS, "") if ok else (Verdict.FAIL, explain())
    except _Skip as exc:
        verdict, reason = Verdict.SKIPPED, str(exc)
    return Trial(
        axiom=str(axiom),
        problem=problem,
        verdict=verdict,
        perturbation=perturbation or {},
        problems=tuple(rec.problems),
        allocations=tuple(rec.allocations),
        reason=reason,
    )


def _worst(values: Iterable[Tuple[float, Any]], empty: Any = None) -> Tuple[float, Any]:
    return max(values, default=(0.0, empty), key=lambda v: v[0])


# -- unary axioms -------------------------------------------------------------


def check_balance(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                  domain: Domain = Domain.ZSTAR) -> Trial:
    def body(rec):
        x = rec.eval(problem)
        gap = abs(x.total - problem.total_revenue)
        return gap <= tol, lambda: f"payoffs sum to {x.total!r}, revenues to {problem.total_revenue!r}"
    return _trial(Axiom.BALANCE, problem, domain, rule, body)


def check_anonymity(rule: Rule, problem: Problem, agents: Sequence[int], tol: float = DEFAULT_TOL,
                    domain: Domain = Domain.ZSTAR) -> Trial:
    """Relabel ranks onto ``agents`` (strictly increasing) and compare rank by rank."""
    moved = relabel(problem, agents)

    def body(rec):
        x = rec.eval(problem)
        y = rec.eval(moved, "relabeled problem")
        return _close(x.payoffs, y.payoffs, tol), lambda: f"payoffs {x.payoffs} became {y.payoffs}"
    return _trial(Axiom.ANONYMITY, problem, domain, rule, body, {"agents": list(moved.agents)})


def check_needs_lower_bound(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                            domain: Domain = Domain.ZSTAR) -> Trial:
    def body(rec):
        x = rec.eval(problem)
        gap, (a, xi, z) = _worst(
            (z - xi, (a, xi, z)) for a, xi, z in zip(problem.agents, x.payoffs, problem.needs))
        return gap <= tol, lambda: f"agent {a} gets {xi!r} below need {z!r}"
    return _trial(Axiom.NEEDS_LOWER_BOUND, problem, domain, rule, body)


def check_weak_needs_lower_bound(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                                 domain: Domain = Domain.ZSTAR) -> Trial:
    """Needs lower bound, required only when every revenue covers its own need."""
    if not all(r >= z for r, z in zip(problem.revenues, problem.needs)):
        return Trial(str(Axiom.WEAK_NEEDS_LOWER_BOUND), problem, Verdict.SKIPPED,
                     reason="some revenue is below its need; the axiom is silent")
    t = check_needs_lower_bound(rule, problem, tol, domain)
    return replace(t, axiom=str(Axiom.WEAK_NEEDS_LOWER_BOUND))


def check_hierarchical_order_preservation(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                                          domain: Domain = Domain.ZSTAR) -> Trial:
    """Payoffs net of needs never decrease going up the hierarchy."""
    def body(rec):
        x = rec.eval(problem)
        net = [xi - z for xi, z in zip(x.payoffs, problem.needs)]
        # nondecreasing in rank iff every net payoff is at least the running maximum below it
        best, worst, where = float("-inf"), 0.0, None
        for a, v in zip(problem.agents, net):
            if best - v > worst:
                worst, where = best - v, (a, v, best)
            best = max(best, v)
        return worst <= tol, lambda: "agent {} nets {!r} below a subordinate's {!r}".format(*where)
    return _trial(Axiom.HIERARCHICAL_ORDER_PRESERVATION, problem, domain, rule, body)


def check_decomposability(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                          domain: Domain = Domain.ZSTAR) -> Trial:
    """phi(r, z) == phi(z, z) + phi(r - z, 0), on problems where r >= z."""
    def body(rec):
        if not all(r >= z for r, z in zip(problem.revenues, problem.needs)):
            raise _Skip("some revenue is below its need; r - z is not a problem")
        x = rec.eval(problem)
        needs_only = rec.eval(Problem(problem.agents, problem.needs, problem.needs), "needs part")
        surplus_only = rec.eval(
            Problem(problem.agents, problem.surpluses, [0.0] * problem.n), "surplus part")
        total = [a + b for a, b in zip(needs_only.payoffs, surplus_only.payoffs)]
        return _close(x.payoffs, total, tol), lambda: f"{x.payoffs} != {tuple(total)}"
    return _trial(Axiom.DECOMPOSABILITY, problem, domain, rule, body)


# -- relational axioms --------------------------------------------------------


def check_lowest_rank_consistency(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                                  domain: Domain = Domain.ZSTAR) -> Trial:
    """Drop the lowest agent, hand their leftover revenue to the next one up, and re-solve."""
    def body(rec):
        if problem.n < 2:
            raise _Skip("needs at least two agents")
        x = rec.eval(problem)
        r, z = problem.revenues, problem.needs
        reduced = _build(problem.agents[1:], (r[1] + r[0] - x.payoffs[0],) + r[2:], z[1:],
                         "reduced problem")
        y = rec.eval(reduced, "reduced problem")
        ok = _close(x.payoffs[1:], y.payoffs, tol)
        return ok, lambda: f"standing agents {x.payoffs[1:]} vs {y.payoffs}"
    return _trial(Axiom.LOWEST_RANK_CONSISTENCY, problem, domain, rule, body)


def check_highest_rank_independence(rule: Rule, problem: Problem, top_revenue: float, top_need: float,
                                    tol: float = DEFAULT_TOL, domain: Domain = Domain.ZSTAR) -> Trial:
    """Replace the top agent's revenue and need; nobody below may notice."""
    def body(rec):
        if top_revenue < top_need:
            raise _Skip("replacement top revenue is below its need")
        x = rec.eval(problem)
        moved = _build(problem.agents, problem.revenues[:-1] + (top_revenue,),
                       problem.needs[:-1] + (top_need,), "perturbed problem")
        y = rec.eval(moved, "perturbed problem")
        ok = _close(x.payoffs[:-1], y.payoffs[:-1], tol)
        return ok, lambda: f"{x.payoffs[:-1]} vs {y.payoffs[:-1]}"
    return _trial(Axiom.HIGHEST_RANK_INDEPENDENCE, problem, domain, rule, body,
                  {"top_revenue": top_revenue, "top_need": top_need})


def check_superior_independence(rule: Rule, problem: Problem, cut: int, revenues: Sequence[float],
                                needs: Sequence[float], tol: float = DEFAULT_TOL,
                                domain: Domain = Domain.ZSTAR) -> Trial:
    """Replace every agent from rank ``cut`` (1-based) upwards; those below keep their payoffs."""
    if not 1 <= cut <= problem.n:
        raise ValueError(f"cut must be a rank in 1..{problem.n}, got {cut}")
    k = cut - 1
    if len(revenues) != problem.n - k or len(needs) != problem.n - k:
        raise ValueError(f"replacement block must cover ranks {cut}..{problem.n}")

    def body(rec):
        if any(r < z for r, z in zip(revenues, needs)):
            raise _Skip("a replacement revenue is below its need")
        x = rec.eval(problem)
        moved = _build(problem.agents, problem.revenues[:k] + tuple(revenues),
                       problem.needs[:k] + tuple(needs), "perturbed problem")
        y = rec.eval(moved, "perturbed problem")
        return _close(x.payoffs[:k], y.payoffs[:k], tol), lambda: f"{x.payoffs[:k]} vs {y.payoffs[:k]}"
    return _trial(Axiom.SUPERIOR_INDEPENDENCE, problem, domain, rule, body,
                  {"cut": cut, "revenues": list(revenues), "needs": list(needs)})


def check_highest_rank_splitting_neutrality(rule: Rule, problem: Problem, follower_revenue: float,
                                            follower_need: float, follower_id: Optional[int] = None,
                                            tol: float = DEFAULT_TOL,
                                            domain: Domain = Domain.ZSTAR) -> Trial:
    """The top agent hands part of their revenue and need to a new agent placed above them.

    The split problem keeps ``r_m - follower_revenue`` and ``z_m - follower_need``
    at the old top; agents below the old top must keep their payoffs.
    """
    top_r, top_z = problem.revenues[-1], problem.needs[-1]
    kept_r, kept_z = top_r - follower_revenue, top_z - follower_need
    new_id = problem.agents[-1] + 1 if follower_id is None else follower_id
    descriptor = {"follower_id": new_id, "follower_revenue": follower_revenue,
                  "follower_need": follower_need, "kept_revenue": kept_r, "kept_need": kept_z}

    def body(rec):
        if min(kept_r, kept_z, follower_revenue, follower_need) < 0:
            raise _Skip("split shares exceed the top agent's revenue or need")
        x = rec.eval(problem)
        split = _build(problem.agents + (new_id,),
                       problem.revenues[:-1] + (kept_r, follower_revenue),
                       problem.needs[:-1] + (kept_z, follower_need), "split problem")
        y = rec.eval(split, "split problem")
        m = problem.n - 1
        return _close(x.payoffs[:m], y.payoffs[:m], tol), lambda: f"{x.payoffs[:m]} vs {y.payoffs[:m]}"
    return _trial(Axiom.HIGHEST_RANK_SPLITTING_NEUTRALITY, problem, domain, rule, body, descriptor)


def check_bilateral_linearity(rule: Rule, first: Problem, second: Problem, alpha: float, beta: float,
                              tol: float = DEFAULT_TOL, domain: Domain = Domain.ZSTAR) -> Trial:
    """phi(a*r + b*r', a*z + b*z') == a*phi(r, z) + b*phi(r', z') on two-agent problems."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    if first.n != 2 or second.n != 2 or first.agents != second.agents:
        raise ValueError("bilateral linearity compares two problems on the same two agents")
    mixed = Problem(
        first.agents,
        [alpha * a + beta * b for a, b in zip(first.revenues, second.revenues)],
        [alpha * a + beta * b for a, b in zip(first.needs, second.needs)],
    )

    def body(rec):
        x = rec.eval(first)
        y = rec.eval(second, "second problem")
        w = rec.eval(mixed, "combined problem")
        expect = [alpha * a + beta * b for a, b in zip(x.payoffs, y.payoffs)]
        return _close(w.payoffs, expect, tol), lambda: f"{w.payoffs} vs {tuple(expect)}"
    return _trial(Axiom.BILATERAL_LINEARITY, first, domain, rule, body,
                  {"second": problem_to_dict(second), "alpha": alpha, "beta": beta})


def check_equal_treatment_of_equals(rule: Rule, problem: Problem, i: int, j: int,
                                    tol: float = DEFAULT_TOL, domain: Domain = Domain.ZSTAR) -> Trial:
    """Agents ``i`` and ``j`` (ids) with identical revenue and need must be paid alike."""
    a, b = problem.agents.index(i), problem.agents.index(j)

    def body(rec):
        if (problem.revenues[a], problem.needs[a]) != (problem.revenues[b], problem.needs[b]):
            raise _Skip(f"agents {i} and {j} differ in revenue or need")
        x = rec.eval(problem)
        return abs(x.payoffs[a] - x.payoffs[b]) <= tol, \
            lambda: f"agent {i} gets {x.payoffs[a]!r}, agent {j} gets {x.payoffs[b]!r}"
    return _trial(Axiom.EQUAL_TREATMENT_OF_EQUALS, problem, domain, rule, body, {"pair": [i, j]})


def check_canonical_bilateral_fairness(rule: Rule, r1: float, z1: float, lam: float = 0.5,
                                       tol: float = DEFAULT_TOL, domain: Domain = Domain.ZSTAR) -> Trial:
    """Two agents, an unproductive boss: the subordinate keeps need plus ``lam`` of the surplus."""
    axiom = AxiomId(Axiom.CANONICAL_BILATERAL_FAIRNESS, lam)
    probe = Problem((1, 2), (r1, 0.0), (z1, 0.0))
    s = r1 - z1
    target = (z1 + lam * s, (1.0 - lam) * s)

    def body(rec):
        if r1 < z1:
            raise _Skip("subordinate revenue is below need")
        x = rec.eval(probe)
        return _close(x.payoffs, target, tol), lambda: f"{x.payoffs} vs {target}"
    return _trial(axiom, probe, domain, rule, body, {"r1": r1, "z1": z1, "lam": lam})


def check_canonical_symmetric_fairness(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                                       domain: Domain = Domain.ZSTAR) -> Trial:
    """Only the lowest agent produces: their net payoff equals every superior's payoff."""
    def body(rec):
        if any(problem.revenues[1:]) or any(problem.needs[1:]):
            raise _Skip("some superior has revenue or need")
        x = rec.eval(problem)
        net = x.payoffs[0] - problem.needs[0]
        gaps = ((abs(net - xk), (a, xk)) for a, xk in zip(problem.agents[1:], x.payoffs[1:]))
        gap, (a, xk) = _worst(gaps, empty=(None, None))
        return gap <= tol, lambda: f"agent {a} gets {xk!r}, lowest agent nets {net!r}"
    return _trial(Axiom.CANONICAL_SYMMETRIC_FAIRNESS, problem, domain, rule, body)


def check_folk_solution(rule: Rule, problem: Problem, tol: float = DEFAULT_TOL,
                        domain: Domain = Domain.ZSTAR) -> Trial:
    """Not an axiom: does ``rule`` agree with the two-agent folk solution here?"""
    def body(rec):
        x = rec.eval(problem)
        f = folk_two_agent(problem)
        return _close(x.payoffs, f.payoffs, tol), lambda: f"{x.payoffs} vs folk {f.payoffs}"
    return _trial("folk-solution", problem, domain, rule, body)


# -- test doubles ---------------------------------------------------------------


def proportional_to_needs(problem: Problem) -> Allocation:
    """Negative control: total revenue shared in proportion to needs (equally if none)."""
    total = problem.total_revenue
    weight = sum(problem.needs)
    if weight == 0:
        return Allocation(problem.agents, [total / problem.n] * problem.n)
    return Allocation(problem.agents, [total * z / weight for z in problem.needs])


def even_id_takes_all(problem: Problem) -> Allocation:
    """Negative control keyed to id values: the lowest even id takes everything.

    Falls back to the top agent when every id is odd.  Breaks anonymity.
    """
    evens = [k for k, a in enumerate(problem.agents) if a % 2 == 0]
    winner = evens[0] if evens else problem.n - 1
    pay = [0.0] * problem.n
    pay[winner] = problem.total_revenue
    return Allocation(problem.agents, pay)


def smallest_id_takes_all(problem: Problem) -> Allocation:
    """Negative control that is still anonymous: the lowest rank takes everything."""
    pay = [0.0] * problem.n
    pay[0] = problem.total_revenue
    return Allocation(problem.agents, pay)


# -- generation -------------------------------------------------------------------


def _check_generation(domain: Domain, n_range: Tuple[int, int], magnitude: float) -> None:
    lo, hi = n_range
    if not 1 <= lo <= hi <= MAX_AGENTS:
        raise ValueError(f"agent range must satisfy 1 <= min <= max <= {MAX_AGENTS}, got {n_range}")
    if not magnitude > 0:
        raise ValueError(f"magnitude must be positive, got {magnitude}")
    if domain is Domain.INVALID:
        raise ValueError("cannot generate problems in the Invalid domain")


def draw_problem(rng: random.Random, domain: Domain, n_range: Tuple[int, int] = (1, 8),
                 magnitude: float = 10.0) -> Problem:
    """One random problem in ``domain`` over agents ``1..n``.

    Z: needs and surpluses uniform on ``[0, magnitude]``.  ZZero: revenues
    uniform.  ZStar: revenues and needs drawn independently, then needs scaled
    down when they exceed total revenue, so individual shortfalls stay common.
    """
    n = rng.randint(*n_range)
    u = rng.random
    if domain is Domain.ZZERO:
        return Problem(tuple(range(1, n + 1)), [magnitude * u() for _ in range(n)], [0.0] * n)
    if domain is Domain.Z:
        needs = [magnitude * u() for _ in range(n)]
        revenues = [z + magnitude * u() for z in needs]
        return Problem(tuple(range(1, n + 1)), revenues, needs)
    if domain is Domain.ZSTAR:
        revenues = [magnitude * u() for _ in range(n)]
        needs = [magnitude * u() for _ in range(n)]
        total_r, total_z = sum(revenues), sum(needs)
        if total_z > total_r:
            scale = total_r / total_z * (0.5 + 0.5 * u())
            needs = [z * scale for z in needs]
            while sum(needs) > total_r:
                needs = [z * (1 - 1e-12) for z in needs]
        return Problem(tuple(range(1, n + 1)), revenues, needs)
    raise ValueError(f"cannot generate problems in {domain}")


def generate_problems(domain: Domain, n_range: Tuple[int, int] = (1, 8), magnitude: float = 10.0,
                      count: int = 1, seed: int = 0) -> Iterator[Problem]:
    """Deterministic stream of ``count`` random problems for ``seed``."""
    domain = Domain(domain)
    _check_generation(domain, n_range, magnitude)
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    rng = random.Random(seed)
    for _ in range(count):
        yield draw_problem(rng, domain, n_range, magnitude)


# -- samplers: one perturbation per axiom, drawn from the trial stream -------------


def _sample_top_pair(rng, domain, magnitude):
    need = 0.0 if domain is Domain.ZZERO else magnitude * rng.random()
    return need + magnitude * rng.random(), need


def _sample_split(rng, problem, domain):
    top_r, top_z = problem.revenues[-1], problem.needs[-1]
    if rng.random() < 0.25:
        return 0.0, 0.0
    if domain is Domain.ZSTAR:
        # totals are unchanged, so any split stays in ZStar
        return top_r * rng.random(), top_z * rng.random()
    need = top_z * rng.random()
    return need + (top_r - top_z) * rng.random(), need


def _draw_for(rng, domain, n_range, magnitude, min_agents):
    lo, hi = n_range
    lo = max(lo, min_agents)
    return draw_problem(rng, domain, (lo, max(hi, lo)), magnitude)


def _sample_trial(aid: AxiomId, rule: Rule, rng: random.Random, domain: Domain,
                  n_range: Tuple[int, int], magnitude: float, tol: float) -> Trial:
    ax = aid.axiom
    kw = {"tol": tol, "domain": domain}
    if ax is Axiom.BILATERAL_LINEARITY:
        pair = []
        for _ in range(2):
            p = draw_problem(rng, domain, (2, 2), magnitude)
            if rng.random() < 0.1:
                # degenerate subordinate with zero surplus
                p = Problem(p.agents, (p.needs[0], p.revenues[1]), p.needs)
            pair.append(p)
        alpha, beta = 2.0 * (1.0 - rng.random()), 2.0 * (1.0 - rng.random())
        return check_bilateral_linearity(rule, pair[0], pair[1], alpha, beta, **kw)

    relational = ax not in (Axiom.BALANCE, Axiom.NEEDS_LOWER_BOUND, Axiom.WEAK_NEEDS_LOWER_BOUND,
                            Axiom.DECOMPOSABILITY, Axiom.CANONICAL_BILATERAL_FAIRNESS)
    problem = _draw_for(rng, domain, n_range, magnitude, 2 if relational else 1)

    if ax is Axiom.BALANCE:
        return check_balance(rule, problem, **kw)
    if ax is Axiom.NEEDS_LOWER_BOUND:
        return check_needs_lower_bound(rule, problem, **kw)
    if ax is Axiom.WEAK_NEEDS_LOWER_BOUND:
        return check_weak_needs_lower_bound(rule, problem, **kw)
    if ax is Axiom.DECOMPOSABILITY:
        return check_decomposability(rule, problem, **kw)
    if ax is Axiom.HIERARCHICAL_ORDER_PRESERVATION:
        return check_hierarchical_order_preservation(rule, problem, **kw)
    if ax is Axiom.LOWEST_RANK_CONSISTENCY:
        return check_lowest_rank_consistency(rule, problem, **kw)
    if ax is Axiom.ANONYMITY:
        ids = sorted(rng.sample(range(1, 10 * problem.n + 10), problem.n))
        return check_anonymity(rule, problem, ids, **kw)
    if ax is Axiom.HIGHEST_RANK_INDEPENDENCE:
        r, z = _sample_top_pair(rng, domain, magnitude)
        return check_highest_rank_independence(rule, problem, r, z, **kw)
    if ax is Axiom.SUPERIOR_INDEPENDENCE:
        cut = rng.randint(2, problem.n)
        block = [_sample_top_pair(rng, domain, magnitude) for _ in range(problem.n - cut + 1)]
        return check_superior_independence(
            rule, problem, cut, [b[0] for b in block], [b[1] for b in block], **kw)
    if ax is Axiom.HIGHEST_RANK_SPLITTING_NEUTRALITY:
        fr, fz = _sample_split(rng, problem, domain)
        return check_highest_rank_splitting_neutrality(rule, problem, fr, fz, **kw)
    if ax is Axiom.EQUAL_TREATMENT_OF_EQUALS:
        a, b = sorted(rng.sample(range(problem.n), 2))
        if rng.random() < 0.5:
            a, b = b, a
        r, z = list(problem.revenues), list(problem.needs)
        r[b], z[b] = r[a], z[a]
        twin = Problem(problem.agents, r, z)
        t = check_equal_treatment_of_equals(rule, twin, problem.agents[a], problem.agents[b], **kw)
        return replace(t, problem=problem, perturbation={
            "copied_from": problem.agents[a], "copied_to": problem.agents[b], **t.perturbation})
    if ax is Axiom.CANONICAL_BILATERAL_FAIRNESS:
        return check_canonical_bilateral_fairness(
            rule, problem.revenues[0], problem.needs[0], aid.lam, **kw)
    if ax is Axiom.CANONICAL_SYMMETRIC_FAIRNESS:
        n = problem.n
        probe = Problem(problem.agents, (problem.revenues[0],) + (0.0,) * (n - 1),
                        (problem.needs[0],) + (0.0,) * (n - 1))
        t = check_canonical_symmetric_fairness(rule, probe, **kw)
        return replace(t, problem=problem, perturbation={"zeroed_superiors": n - 1})
    raise AssertionError(ax)


def run_trials(rule: Rule, axiom: AxiomId, domain: Domain = Domain.Z, trials: int = 1000,
               seed: int = 0, tol: float = DEFAULT_TOL, n_range: Tuple[int, int] = (1, 8),
               magnitude: float = 10.0) -> Iterator[Trial]:
    """Seeded stream of sampled trials for one axiom.

    The stream depends only on ``(seed, axiom)``, so axioms can be audited
    in any order, or in parallel, with identical results.
    """
    domain = Domain(domain)
    _check_generation(domain, n_range, magnitude)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    rng = random.Random(f"{seed}:{axiom}")
    for index in range(trials):
        t = _sample_trial(axiom, rule, rng, domain, n_range, magnitude, tol)
        # stamped in place: the trial was built here and is not shared yet
        object.__setattr__(t, "index", index)
        yield t


@dataclass
class AxiomResult:
    axiom: str
    attempted: int = 0
    skipped: int = 0
    failed: int = 0
    negative_payoffs: int = 0
    first_counterexample: Optional[Trial] = None

    @property
    def checked(self) -> int:
        return self.attempted - self.skipped

    @property
    def passed(self) -> int:
        return self.checked - self.failed

    @property
    def verdict(self) -> str:
        if self.failed:
            return f"falsified: {self.failed} of {self.checked} checked trials failed"
        return f"no counterexample found in {self.checked} trials"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "axiom": self.axiom,
            "attempted": self.attempted,
            "skipped": self.skipped,
            "passed": self.passed,
            "failed": self.failed,
            "negative_payoff_trials": self.negative_payoffs,
            "verdict": self.verdict,
            "first_counterexample": (
                None if self.first_counterexample is None else self.first_counterexample.to_dict()),
        }


@dataclass
class AuditReport:
    rule: str
    domain: Domain
    seed: int
    tol: float
    trials: int
    n_range: Tuple[int, int]
    magnitude: float
    results: List[AxiomResult] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(r.failed for r in self.results)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def __getitem__(self, axiom) -> AxiomResult:
        key = str(axiom if isinstance(axiom, (AxiomId, str)) else AxiomId(axiom))
        for r in self.results:
            if r.axiom == key:
                return r
        raise KeyError(key)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rule": self.rule,
            "domain": self.domain.value,
            "seed": self.seed,
            "tolerance": self.tol,
            "trials": self.trials,
            "agents": list(self.n_range),
            "magnitude": self.magnitude,
            "failures": self.failures,
            "axioms": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def tally(axiom: str, trials: Iterable[Trial], tol: float = DEFAULT_TOL) -> AxiomResult:
    res = AxiomResult(str(axiom))
    for t in trials:
        res.attempted += 1
        if t.skipped:
            res.skipped += 1
            continue
        if any(not x.is_nonnegative(tol) for x in t.allocations):
            res.negative_payoffs += 1
        if t.failed:
            res.failed += 1
            if res.first_counterexample is None or t.index < res.first_counterexample.index:
                res.first_counterexample = t
    return res


def _audit_one(args) -> AxiomResult:
    rule, aid, domain, trials, seed, tol, n_range, magnitude = args
    return tally(str(aid), run_trials(rule, aid, domain, trials, seed, tol, n_range, magnitude), tol)


def audit(rule: Rule, axioms: Iterable[AxiomId | Axiom | str], domain: Domain = Domain.Z,
          trials: int = 1000, seed: int = 0, tol: float = DEFAULT_TOL,
          n_range: Tuple[int, int] = (1, 8), magnitude: float = 10.0, workers: int = 1,
          rule_name: Optional[str] = None) -> AuditReport:
    """Audit ``rule`` against each axiom with ``trials`` sampled instances.

    ``workers > 1`` spreads axioms over processes; the rule must then be
    picklable.  Results do not depend on ``workers``.
    """
    ids: List[AxiomId] = []
    for a in axioms:
        aid = a if isinstance(a, AxiomId) else AxiomId.parse(a) if isinstance(a, str) else AxiomId(a)
        if aid not in ids:
            ids.append(aid)
    domain = Domain(domain)
    _check_generation(domain, n_range, magnitude)
    jobs = [(rule, aid, domain, trials, seed, tol, tuple(n_range), magnitude) for aid in ids]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_audit_one, jobs))
    else:
        results = [_audit_one(j) for j in jobs]
    name = rule_name if rule_name is not None else str(getattr(rule, "__name__", rule))
    return AuditReport(name, domain, seed, tol, trials, tuple(n_range), magnitude, results)


def find_counterexample(rule: Rule, axiom: AxiomId | Axiom | str, domain: Domain = Domain.Z,
                        trials: int = 1000, seed: int = 0, tol: float = DEFAULT_TOL,
                        **kwargs) -> Optional[Trial]:
    """First failing sampled trial, or None if every trial passed or was skipped."""
    aid = axiom if isinstance(axiom, AxiomId) else AxiomId.parse(axiom) if isinstance(axiom, str) \
        else AxiomId(axiom)
    for t in run_trials(rule, aid, domain, trials, seed, tol, **kwargs):
        if t.failed:
            return t
    return None
