#!/usr/bin/env python3
"""
Vector Field Module for the Graded Calculus Tool
This module provides vector fields on graded domains in the frame of coordinate
derivations: application to functions, graded commutators, the Euler field,
pointwise values, relatedness along morphisms and pushforward.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from calc_errors import CoordinateMismatch, DegreeError
from graded_degrees import CoordinateSystem
from graded_series import GradedFunction, Trunc, min_trunc, partial, series_mul, value_at, truncate
from domain_morphisms import DomainMorphism, pullback
from rational_coefficients import Rational

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('vector_fields')


class VectorField:
    """
    Derivation X = X^A d/dz^A of degree |X|; components are aligned with the
    unified coordinates and satisfy |X^A| = |X| + |z^A|.
    """

    def __init__(self, cs: CoordinateSystem, degree: int, components: Sequence[GradedFunction]):
        components = list(components)
        if len(components) != len(cs.names):
            raise CoordinateMismatch(f"Field on {cs.label} needs {len(cs.names)} components, got {len(components)}")
        for A, X in enumerate(components):
            if X.cs != cs:
                raise CoordinateMismatch(f"Component {cs.names[A]} does not live on {cs.label}")
            expected = degree + cs.degrees[A]
            if X.terms and X.degree != expected:
                raise DegreeError(
                    f"Component {cs.names[A]} has degree {X.degree}, expected {expected} for a degree-{degree} field")
            components[A] = X.with_degree(expected)
        self.cs = cs
        self.degree = degree
        self.components = tuple(components)

    @classmethod
    def zero(cls, cs: CoordinateSystem, degree: int = 0, trunc: Trunc = None) -> 'VectorField':
        return cls(cs, degree, [GradedFunction.zero(cs, degree + d, trunc) for d in cs.degrees])

    @classmethod
    def coordinate(cls, cs: CoordinateSystem, name: str) -> 'VectorField':
        """The coordinate derivation d/dz^A"""
        A = cs.index_of(name)
        degree = -cs.degrees[A]
        components = [GradedFunction.constant(cs, 1) if B == A else GradedFunction.zero(cs, degree + d)
                      for B, d in enumerate(cs.degrees)]
        return cls(cs, degree, components)

    @classmethod
    def from_mapping(cls, cs: CoordinateSystem, components: Dict[str, GradedFunction],
                     degree: Optional[int] = None) -> 'VectorField':
        """Build a field from named components; the degree is inferred when omitted"""
        if degree is None:
            degree = 0
            for name, X in components.items():
                if X.terms:
                    degree = X.degree - cs.degrees[cs.index_of(name)]
                    break
        values = []
        for A, name in enumerate(cs.names):
            values.append(components.get(name, GradedFunction.zero(cs, degree + cs.degrees[A])))
        unknown = set(components) - set(cs.names)
        if unknown:
            raise CoordinateMismatch(f"Unknown coordinates {sorted(unknown)} in field on {cs.label}")
        return cls(cs, degree, values)

    @property
    def trunc(self) -> Trunc:
        return min_trunc(*(X.trunc for X in self.components))

    def _check(self, other: 'VectorField'):
        if other.cs != self.cs:
            raise CoordinateMismatch(f"Fields live on {self.cs.label} and {other.cs.label}")

    def __add__(self, other: 'VectorField') -> 'VectorField':
        self._check(other)
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise DegreeError(f"Cannot add fields of degree {self.degree} and {other.degree}")
        degree = other.degree if self.is_zero() else self.degree
        return VectorField(self.cs, degree, [a + b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> 'VectorField':
        return VectorField(self.cs, self.degree, [-X for X in self.components])

    def __sub__(self, other: 'VectorField') -> 'VectorField':
        return self + (-other)

    def scale(self, c) -> 'VectorField':
        return VectorField(self.cs, self.degree, [X.scale(c) for X in self.components])

    def times(self, f: GradedFunction) -> 'VectorField':
        """Left module action f*X, of degree |f| + |X|"""
        return VectorField(self.cs, self.degree + f.degree, [series_mul(f, X) for X in self.components])

    def is_zero(self) -> bool:
        return all(X.is_zero() for X in self.components)

    def agrees_with(self, other: 'VectorField', up_to: Trunc = None) -> bool:
        self._check(other)
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            return False
        return all(a.agrees_with(b, up_to) for a, b in zip(self.components, other.components))

    def __repr__(self) -> str:
        return f"VectorField(degree={self.degree} on {self.cs.label})"


def vf_apply(X: VectorField, f: GradedFunction) -> GradedFunction:
    """
    Apply X to f as sum_A X^A * df/dz^A.

    Raises:
        CoordinateMismatch: f lives on another system
    """
    if f.cs != X.cs:
        raise CoordinateMismatch(f"Function lives on {f.cs.label}, field on {X.cs.label}")
    result = GradedFunction.zero(X.cs, X.degree + f.degree, min_trunc(f.trunc, X.trunc))
    for A, component in enumerate(X.components):
        if component.is_zero() and component.trunc is None:
            continue
        derivative = partial(f, A)
        if derivative.is_zero() and derivative.trunc is None:
            continue
        result = result + series_mul(component, derivative)
    return result


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    """Graded commutator [X, Y] = XY - (-1)^{|X||Y|} YX, read off on coordinates"""
    X._check(Y)
    sign = -1 if (X.degree * Y.degree) % 2 else 1
    components = []
    for A in range(len(X.cs.names)):
        first = vf_apply(X, Y.components[A])
        second = vf_apply(Y, X.components[A])
        components.append(first - second if sign > 0 else first + second)
    return VectorField(X.cs, X.degree + Y.degree, components)


def euler(cs: CoordinateSystem) -> VectorField:
    """Euler field sum_mu |xi_mu| xi_mu d/dxi_mu"""
    components = [GradedFunction.zero(cs, 0) for _ in cs.even_names]
    for name, degree in cs.graded:
        components.append(GradedFunction.coordinate(cs, name).scale(degree))
    return VectorField(cs, 0, components)


@dataclass
class TangentVector:
    """Value of a vector field at a base point"""
    point: Tuple[Fraction, ...]
    degree: int
    components: Dict[str, Fraction]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.components.values())


def vf_value_at(X: VectorField, point: Sequence[Rational]) -> TangentVector:
    point = tuple(Fraction(a) for a in point)
    values = {name: value_at(C, point) for name, C in zip(X.cs.names, X.components)}
    return TangentVector(point, X.degree, values)


def related_check(X: VectorField, Y: VectorField, phi: DomainMorphism) -> bool:
    """
    True iff X(phi*(w^K)) = phi*(Y(w^K)) for every target coordinate, up to
    the common truncation weight.
    """
    if X.cs != phi.source or Y.cs != phi.target:
        raise CoordinateMismatch("Fields do not match the source and target of the morphism")
    if X.degree != Y.degree and not (X.is_zero() or Y.is_zero()):
        return False
    for K, name in enumerate(phi.target.names):
        left = vf_apply(X, phi.coordinate_pullback(K))
        right = pullback(phi, Y.components[K])
        if not left.agrees_with(right):
            logger.debug(f"Relatedness fails on coordinate {name}")
            return False
    return True


def pushforward(X: VectorField, phi: DomainMorphism, inverse: DomainMorphism) -> VectorField:
    """
    Field on the target of an invertible phi related to X:
    Y^K = psi*(X(phi*(w^K))) with psi the inverse of phi.
    """
    if inverse.source != phi.target or inverse.target != phi.source:
        raise CoordinateMismatch("Inverse does not run from the target back to the source")
    components = [pullback(inverse, vf_apply(X, phi.coordinate_pullback(K)))
                  for K in range(len(phi.target.names))]
    return VectorField(phi.target, X.degree, components)
