"""Milne-Pinney reductions, Lie brackets and the Ermakov superposition rule."""

from ._ermakov import (
    ConfigError,
    DomainError,
    ErmakovError,
    Expr,
    ParseError,
    SecondOrderSystem,
    SingularityError,
    VerificationError,
    bracket,
    ermakov_invariant,
    general_solution,
    integrate,
    named_system,
    parse_expr,
    quasi_lie_transform,
    reducibility_check,
    run_scenario,
    superpose,
    verify,
    wronskian,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "ErmakovError",
    "Expr",
    "ParseError",
    "SecondOrderSystem",
    "SingularityError",
    "VerificationError",
    "bracket",
    "ermakov_invariant",
    "general_solution",
    "integrate",
    "named_system",
    "parse_expr",
    "quasi_lie_transform",
    "reducibility_check",
    "run_scenario",
    "superpose",
    "verify",
    "wronskian",
]
