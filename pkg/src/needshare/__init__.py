"""Revenue sharing in linear hierarchies where agents have needs."""

from .core import (
    DEFAULT_TOL,
    Allocation,
    Domain,
    DomainError,
    Problem,
    ProblemError,
    Tolerance,
    approx_equal,
    canonicalize,
    relabel,
    validate,
)
from .rules import (
    RuleSpec,
    balanced_transfer,
    extend,
    folk_two_agent,
    full_transfer,
    geometric,
    geometric_closed_form,
    geometric_zero_needs,
    infer_lambda,
    no_transfer,
    serial,
    serial_zero_needs,
)
from .axioms import Axiom, AxiomId, AuditReport, Trial, Verdict, audit, generate_problems

__all__ = [
    "DEFAULT_TOL", "Allocation", "Domain", "DomainError", "Problem", "ProblemError", "Tolerance",
    "approx_equal", "canonicalize", "relabel", "validate",
    "RuleSpec", "balanced_transfer", "extend", "folk_two_agent", "full_transfer", "geometric",
    "geometric_closed_form", "geometric_zero_needs", "infer_lambda", "no_transfer", "serial",
    "serial_zero_needs",
    "Axiom", "AxiomId", "AuditReport", "Trial", "Verdict", "audit", "generate_problems",
]
