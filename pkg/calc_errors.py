#!/usr/bin/env python3
"""
Error Types for the Graded Calculus Tool
This module defines the exception hierarchy raised by the calculation engine
and by the script front end.
"""

from typing import List, Optional


class GradedCalcError(Exception):
    """Base class for every error raised by the graded calculus engine"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def at(self, line: int, column: int) -> 'GradedCalcError':
        """Attach a script position if none is known yet"""
        if self.line is None:
            self.line = line
            self.column = column
        return self

    @property
    def kind(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        return self.message


class CoordinateError(GradedCalcError):
    """Invalid coordinate system data (bad identifier, zero degree, overflow)"""


class NameCollision(CoordinateError):
    """Two coordinates share a name"""


class CoordinateMismatch(GradedCalcError):
    """Objects living on different coordinate systems were combined"""


class DegreeError(GradedCalcError):
    """A declared or required degree does not match the computed one"""


class ZeroInverse(GradedCalcError):
    """Inversion of the zero rational function"""


class CompositionPole(GradedCalcError):
    """A substituted denominator vanished identically"""


class EvalPole(GradedCalcError):
    """A denominator vanished at an evaluation point"""


class NotInvertible(GradedCalcError):
    """A graded function with zero body was inverted"""


class SingularDifferential(GradedCalcError):
    """Some degree block of a morphism differential is not invertible"""


class BadUnderlyingInverse(GradedCalcError):
    """The supplied inverse of the underlying map failed verification"""


class DegreeZero(GradedCalcError):
    """The Euler primitive was requested for a form of degree zero"""


class NotClosed(GradedCalcError):
    """A primitive was requested for a form that is not closed"""


class NonPolynomialResidue(GradedCalcError):
    """The base form left after eliminating graded coordinates is not polynomial"""


class MissingOverlap(GradedCalcError):
    """A transition needed for a triple check was not declared"""


class BadBaseCocycle(GradedCalcError):
    """Ordinary transition matrices violate the cocycle condition"""


class ScriptError(GradedCalcError):
    """A script refers to an unknown name or passes bad command arguments"""


class ScriptSyntaxError(GradedCalcError):
    """A script does not match the grammar"""

    def __init__(self, message: str, line: int, column: int, expected: Optional[List[str]] = None):
        super().__init__(message, line, column)
        self.expected = list(expected or [])

    def __str__(self) -> str:
        text = f"line {self.line}, column {self.column}: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        return text


class InvalidTransition(GradedCalcError):
    """Transition data with a wrong shape, degree or non-identity diagonal"""
