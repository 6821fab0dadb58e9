"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class KerrSenseError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(KerrSenseError, ValueError):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DivergentSteadyState(KerrSenseError):
    """The linear (U = 0) cavity has no stable steady state at these drives."""


class SolverFailure(KerrSenseError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NonConvergence(KerrSenseError):
    """A time integration did not settle before ``t_max``.

    ``state`` holds the last integrated value and ``residual`` the norm of the
    right-hand side there, so callers probing unstable regimes can inspect
    where the trajectory went.
    """

    def __init__(self, message: str, state=None, residual: float | None = None, t_final: float | None = None):
        super().__init__(message)
        self.state = state
        self.residual = residual
        self.t_final = t_final


class PreconditionError(KerrSenseError, ValueError):
    pass


class SensitivityError(KerrSenseError):
    def __init__(self, message: str, side: str):
        super().__init__(message)
        self.side = side


class OracleError(KerrSenseError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class RegimeTooHot(OracleError):
    """The truncated Fock space never captured the state before the cutoff cap."""


class DegenerateNullSpace(OracleError):
    pass


class ConfigError(KerrSenseError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field
