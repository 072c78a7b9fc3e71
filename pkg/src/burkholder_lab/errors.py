"""Typed failures raised by the lab.

Property violations are never exceptions: a scan that finds a counterexample
returns a report saying so. These classes cover the cases where a computation
cannot produce a meaningful number at all.

This module imports nothing from the rest of the package.
"""

from __future__ import annotations


class LabError(Exception):
    """Base class for every failure the lab raises on purpose."""


class DomainError(LabError, ValueError):
    """An exponent or parameter lies outside the range a formula is stated for."""


class QuadratureError(LabError):
    """A quadrature did not converge, or two refinement levels disagree."""


class GridError(LabError, ValueError):
    """Grid shapes or sizes are incompatible, or a field holds non-finite values."""


class DegenerateSpecError(LabError, ValueError):
    """An input is well-typed but degenerate (zero denominator, empty ensemble)."""


class NonFiniteError(LabError, ArithmeticError):
    """A function under test returned NaN or infinity where a number was needed."""


class FieldFormatError(LabError):
    """A field file is malformed or uses an unsupported container version."""


class ConfigurationError(LabError):
    """A run configuration is invalid; the CLI maps this to exit status 2."""
