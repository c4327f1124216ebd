"""Shared exception types.

Config problems and numeric failures are kept apart because the command
line maps them to different exit codes (2 and 3 respectively).
"""

from __future__ import annotations


class ConfigError(Exception):
    """A scenario configuration is malformed or violates an invariant."""


class ConvergenceError(RuntimeError):
    """An iterative solver ran out of budget.

    Carries the last iterate and its residual so callers can diagnose
    or fall back.
    """

    def __init__(self, message: str, last: float, residual: float):
        super().__init__(f"{message} (last iterate {last!r}, residual {residual!r})")
        self.last = last
        self.residual = residual


class DegenerateModelError(RuntimeError):
    """Calibration produced zero intensity in both directions."""
