"""Shared exception types."""

from __future__ import annotations

__all__ = [
    "BudgetError",
    "DieParseError",
    "SymmetricUndetermined",
    "ValidityFloorError",
]


class DieParseError(ValueError):
    """A die specification is syntactically invalid or violates an invariant."""


class BudgetError(RuntimeError):
    """An exact computation would exceed its configured resource budget."""


class SymmetricUndetermined(ValueError):
    """The leading constant L is exactly zero, so the asymptotic tilt sign
    cannot be determined by the one-term expansion."""


class ValidityFloorError(ValueError):
    """A bound was requested for an n below its validity floor."""
