#!/usr/bin/env python3
"""
Differential Form Module for the Graded Calculus Tool
This module represents differential forms as functions on the shifted tangent
domain, where d, i_X and L_X are vector fields, and provides form pullback,
the graded Poincare homotopy and explicit primitives of closed forms.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from calc_errors import (
    CoordinateMismatch, DegreeError, DegreeZero, NotClosed, NonPolynomialResidue, NameCollision
)
from graded_degrees import CoordinateSystem, MultiIndex, epsilon
from graded_series import (
    GradedFunction, Trunc, base_of, min_trunc, series_mul, substitute_zero, transport, truncate
)
from domain_morphisms import DomainMorphism, pullback
from vector_fields import VectorField, vf_apply, bracket, euler
from rational_coefficients import BaseCoefficient, is_polynomial, poly_terms, to_fraction

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('differential_forms')


def minimal_shift(cs: CoordinateSystem) -> int:
    """Smallest even s >= 0 with every coordinate degree at least -s"""
    lowest = min(cs.degrees, default=0)
    s = max(0, -lowest)
    return s + (s % 2)


@lru_cache(maxsize=None)
def _doubled(base: CoordinateSystem, shift: int) -> CoordinateSystem:
    differentials = [('d' + name, degree + 1 + shift) for name, degree in zip(base.names, base.degrees)]
    try:
        return CoordinateSystem(base.even_names, base.graded + tuple(differentials), base.trunc,
                                f"T[{1 + shift}]{base.name}" if base.name else '')
    except NameCollision as e:
        raise NameCollision(f"Coordinate 1-form names clash with coordinates of {base.label}: {e.message}")


class ShiftedSystem:
    """
    Base system together with an even shift s; the doubled system carries the
    base coordinates followed by dz^A of degree |z^A| + 1 + s.
    """

    def __init__(self, base: CoordinateSystem, shift: Optional[int] = None):
        lowest = minimal_shift(base)
        if shift is None:
            shift = lowest
        if shift % 2 or shift < lowest:
            raise DegreeError(f"Shift {shift} must be even and at least {lowest} for {base.label}")
        self.base = base
        self.shift = shift
        self.doubled = _doubled(base, shift)

    def __eq__(self, other) -> bool:
        return isinstance(other, ShiftedSystem) and self.base == other.base and self.shift == other.shift

    def __hash__(self) -> int:
        return hash((self.base, self.shift))

    def differential_index(self, A: int) -> int:
        """Position of dz^A among the graded coordinates of the doubled system"""
        return self.base.n_star + A

    def form_degree(self, p: MultiIndex) -> int:
        return sum(p[self.base.n_star:])

    def lift(self, f: GradedFunction) -> GradedFunction:
        if f.cs != self.base:
            raise CoordinateMismatch(f"Function lives on {f.cs.label}, forms on {self.base.label}")
        return transport(f, self.doubled)

    def __repr__(self) -> str:
        return f"ShiftedSystem({self.base.label}, s={self.shift})"


class Form:
    """Homogeneous p-form, stored as a function on the doubled system"""

    def __init__(self, shifted: ShiftedSystem, p: int, value: GradedFunction):
        if value.cs != shifted.doubled:
            raise CoordinateMismatch(f"Form value does not live on {shifted.doubled.label}")
        for index in value.terms:
            if shifted.form_degree(index) != p:
                raise DegreeError(f"Term with {shifted.form_degree(index)} differentials in a {p}-form")
        self.shifted = shifted
        self.p = p
        self.value = value

    @property
    def deg(self) -> int:
        return self.value.degree - self.p * (1 + self.shifted.shift)

    @property
    def trunc(self) -> Trunc:
        return self.value.trunc

    @classmethod
    def from_function(cls, shifted: ShiftedSystem, f: GradedFunction) -> 'Form':
        return cls(shifted, 0, shifted.lift(f))

    @classmethod
    def zero(cls, shifted: ShiftedSystem, p: int, deg: int, trunc: Trunc = None) -> 'Form':
        return cls(shifted, p, GradedFunction.zero(shifted.doubled, deg + p * (1 + shifted.shift), trunc))

    @classmethod
    def coordinate_differential(cls, shifted: ShiftedSystem, name: str) -> 'Form':
        return cls(shifted, 1, GradedFunction.coordinate(shifted.doubled, 'd' + name))

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def _check(self, other: 'Form'):
        if self.shifted != other.shifted:
            raise CoordinateMismatch(f"Forms live on {self.shifted} and {other.shifted}")

    def __add__(self, other: 'Form') -> 'Form':
        self._check(other)
        if self.p != other.p:
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            raise DegreeError(f"Cannot add a {self.p}-form and a {other.p}-form")
        return Form(self.shifted, self.p, self.value + other.value)

    def __neg__(self) -> 'Form':
        return Form(self.shifted, self.p, -self.value)

    def __sub__(self, other: 'Form') -> 'Form':
        return self + (-other)

    def scale(self, c) -> 'Form':
        return Form(self.shifted, self.p, self.value.scale(c))

    def __mul__(self, other) -> 'Form':
        if isinstance(other, Form):
            self._check(other)
            return Form(self.shifted, self.p + other.p, series_mul(self.value, other.value))
        return self.scale(other)

    def reshift(self, shift: int) -> 'Form':
        """Same form on a larger even shift; parities and signs are unchanged"""
        if shift == self.shifted.shift:
            return self
        target = ShiftedSystem(self.shifted.base, shift)
        value = GradedFunction(target.doubled, self.deg + self.p * (1 + shift), dict(self.value.terms),
                               self.value.trunc, validate=False)
        return Form(target, self.p, value)

    def agrees_with(self, other: 'Form', up_to: Trunc = None) -> bool:
        self._check(other)
        if self.p != other.p and not (self.is_zero() or other.is_zero()):
            return False
        return self.value.agrees_with(other.value, up_to)

    def __repr__(self) -> str:
        return f"Form(p={self.p}, deg={self.deg}, {self.value})"


@lru_cache(maxsize=None)
def de_rham_field(shifted: ShiftedSystem) -> VectorField:
    """d as the vector field dz^A d/dz^A on the doubled system"""
    doubled = shifted.doubled
    degree = 1 + shifted.shift
    components = []
    for A, name in enumerate(doubled.names):
        if A < len(shifted.base.names):
            components.append(GradedFunction.coordinate(doubled, 'd' + name))
        else:
            components.append(GradedFunction.zero(doubled, degree + doubled.degrees[A]))
    return VectorField(doubled, degree, components)


def interior_field(shifted: ShiftedSystem, X: VectorField) -> VectorField:
    """i_X as the vector field X^A d/d(dz^A) on the doubled system"""
    if X.cs != shifted.base:
        raise CoordinateMismatch(f"Field lives on {X.cs.label}, forms on {shifted.base.label}")
    doubled = shifted.doubled
    degree = X.degree - 1 - shifted.shift
    count = len(shifted.base.names)
    components = []
    for A in range(len(doubled.names)):
        if A < count:
            components.append(GradedFunction.zero(doubled, degree + doubled.degrees[A], X.trunc))
        else:
            components.append(shifted.lift(X.components[A - count]))
    return VectorField(doubled, degree, components)


def lie_field(shifted: ShiftedSystem, X: VectorField) -> VectorField:
    """L_X as the graded commutator [i_X, d] of vector fields on the doubled system"""
    return bracket(interior_field(shifted, X), de_rham_field(shifted))


def d(omega: Form) -> Form:
    """Exterior derivative, raising the form degree by one and keeping deg"""
    return Form(omega.shifted, omega.p + 1, vf_apply(de_rham_field(omega.shifted), omega.value))


def i_X(omega: Form, X: VectorField) -> Form:
    """Interior product; deg shifts by |X|"""
    if omega.p == 0:
        return Form.zero(omega.shifted, 0, omega.deg + X.degree, omega.trunc)
    return Form(omega.shifted, omega.p - 1, vf_apply(interior_field(omega.shifted, X), omega.value))


def lie(omega: Form, X: VectorField) -> Form:
    """Lie derivative L_X = i_X d + (-1)^{|X|} d i_X"""
    first = i_X(d(omega), X)
    if omega.p == 0:
        return first
    second = d(i_X(omega, X))
    return first + second if X.degree % 2 == 0 else first - second


def pullback_form(phi: DomainMorphism, omega: Form) -> Form:
    """
    Pull a form back along phi, using the doubled morphism that sends dw^K
    to d(phi*(w^K)). Both sides are moved to a common shift first.
    """
    if omega.shifted.base != phi.target:
        raise CoordinateMismatch(f"Form lives on {omega.shifted.base.label}, morphism target is {phi.target.label}")
    shift = max(minimal_shift(phi.source), minimal_shift(phi.target), omega.shifted.shift)
    omega = omega.reshift(shift)
    source = ShiftedSystem(phi.source, shift)
    target = omega.shifted
    ybar = [source.lift(y) for y in phi.ybar]
    thetabar = [source.lift(t) for t in phi.thetabar]
    for K in range(len(phi.target.names)):
        thetabar.append(d(Form.from_function(source, phi.coordinate_pullback(K))).value)
    doubled_phi = DomainMorphism(source.doubled, target.doubled, phi.underlying, ybar, thetabar)
    return Form(source, omega.p, pullback(doubled_phi, omega.value))


def exact_primitive_nonzero_degree(omega: Form) -> Form:
    """
    Primitive i_E(omega)/deg(omega) of a closed form of nonzero degree.

    Raises:
        DegreeZero: deg(omega) is 0
        NotClosed: d(omega) does not vanish
    """
    if omega.is_zero():
        return Form.zero(omega.shifted, max(omega.p - 1, 0), omega.deg, omega.trunc)
    if omega.deg == 0:
        raise DegreeZero("Form has degree 0; use the homotopy primitive")
    if omega.p == 0:
        raise DegreeError("Primitives exist only for forms with p >= 1")
    if not d(omega).is_zero():
        raise NotClosed("Form is not closed")
    return i_X(omega, euler(omega.shifted.base)).scale(Fraction(1, omega.deg))


def _split_monomial(shifted: ShiftedSystem, index: MultiIndex, mu: int) -> Tuple[int, int, MultiIndex, int]:
    """(q, r, rest, sign) with xi^index = sign * (dxi_mu)^q * xi_mu^r * xi^rest"""
    cs = shifted.doubled
    dpos = shifted.differential_index(shifted.base.n0 + mu)
    q, r = index[dpos], index[mu]
    rest = tuple(0 if k in (mu, dpos) else e for k, e in enumerate(index))
    D = tuple(q if k == dpos else 0 for k in range(len(index)))
    X = tuple(r if k == mu else 0 for k in range(len(index)))
    XR = tuple(a + b for a, b in zip(X, rest))
    return q, r, rest, epsilon(D, XR, cs) * epsilon(X, rest, cs)


def poincare_homotopy(omega: Form, mu: int) -> Form:
    """
    Homotopy operator K eliminating the graded coordinate xi_mu:
    d K + K d = 1 - pi*s* on forms, where pi*s* drops xi_mu and dxi_mu.

    Even |xi_mu|: K(dxi xi^r rest) = xi^(r+1)/(r+1) rest.
    Odd |xi_mu|: K(dxi^q xi^r rest) = dxi^(q-1) xi^(r+1) rest.
    """
    shifted = omega.shifted
    cs = shifted.doubled
    if omega.p == 0:
        return Form.zero(shifted, 0, omega.deg, omega.trunc)
    odd = shifted.base.odd_mask[mu]
    dpos = shifted.differential_index(shifted.base.n0 + mu)
    n = cs.n_star
    terms: Dict[MultiIndex, BaseCoefficient] = {}
    for index, c in omega.value.terms.items():
        q, r, rest, sign = _split_monomial(shifted, index, mu)
        if q == 0:
            continue
        if odd:
            if r == 1:
                continue
            D = tuple(q - 1 if k == dpos else 0 for k in range(n))
            X = tuple(1 if k == mu else 0 for k in range(n))
            XR = tuple(a + b for a, b in zip(X, rest))
            new_sign = epsilon(D, XR, cs) * epsilon(X, rest, cs)
            if new_sign == 0:
                continue
            target = tuple(a + b for a, b in zip(D, XR))
            value = c if sign * new_sign > 0 else -c
        else:
            X = tuple(r + 1 if k == mu else 0 for k in range(n))
            new_sign = epsilon(X, rest, cs)
            target = tuple(a + b for a, b in zip(X, rest))
            value = c * Fraction(1, r + 1)
            if sign * new_sign < 0:
                value = -value
        terms[target] = terms[target] + value if target in terms else value
    degree = omega.value.degree - cs.graded_degrees[dpos] + shifted.base.graded_degrees[mu]
    trunc = omega.value.trunc
    return Form(shifted, omega.p - 1, GradedFunction(cs, degree, terms, trunc, validate=False))


def zero_section_projection(omega: Form, mu: int) -> Form:
    """pi*s*: drop every term containing xi_mu or dxi_mu"""
    shifted = omega.shifted
    dpos = shifted.differential_index(shifted.base.n0 + mu)
    return Form(shifted, omega.p, substitute_zero(omega.value, [mu, dpos]))


def radial_field(cs: CoordinateSystem) -> VectorField:
    """R = x^i d/dx^i on the even coordinates"""
    components = [GradedFunction.coordinate(cs, name) for name in cs.even_names]
    components += [GradedFunction.zero(cs, degree) for degree in cs.graded_degrees]
    return VectorField(cs, 0, components)


def _radial_primitive(omega: Form) -> Form:
    """Primitive of a closed polynomial form in the even coordinates alone"""
    shifted = omega.shifted
    cs = shifted.doubled
    base = base_of(cs)
    zero_monom = (0,) * base.n0
    pieces: Dict[int, Dict[MultiIndex, BaseCoefficient]] = {}
    for index, c in omega.value.terms.items():
        if not is_polynomial(c):
            raise NonPolynomialResidue("Base form has non-polynomial coefficients after eliminating graded coordinates")
        scale = to_fraction(c.denom.LC)
        for exponents, a in poly_terms(c.numer, base.n0):
            N = sum(exponents) + omega.p
            monomial = base.from_terms({exponents: a / scale}, {zero_monom: Fraction(1)})
            bucket = pieces.setdefault(N, {})
            bucket[index] = bucket[index] + monomial if index in bucket else monomial
    R = radial_field(shifted.base)
    alpha = Form.zero(shifted, omega.p - 1, omega.deg, omega.trunc)
    for N, terms in sorted(pieces.items()):
        component = Form(shifted, omega.p, GradedFunction(cs, omega.value.degree, terms, omega.trunc, validate=False))
        alpha = alpha + i_X(component, R).scale(Fraction(1, N))
    return alpha


def primitive_deg_zero(omega: Form) -> Form:
    """
    Primitive of a closed degree-0 form: eliminate graded coordinates one at a
    time with the homotopy operator, then integrate the remaining polynomial
    base form radially.

    Raises:
        NotClosed: d(omega) does not vanish
        NonPolynomialResidue: the residual base form is not polynomial
    """
    if omega.deg != 0:
        raise DegreeError(f"Form has degree {omega.deg}, expected 0")
    if omega.p == 0:
        raise DegreeError("Primitives exist only for forms with p >= 1")
    if not d(omega).is_zero():
        raise NotClosed("Form is not closed")
    alpha = Form.zero(omega.shifted, omega.p - 1, 0, omega.trunc)
    current = omega
    for mu in range(omega.shifted.base.n_star):
        alpha = alpha + poincare_homotopy(current, mu)
        current = zero_section_projection(current, mu)
    alpha = alpha + _radial_primitive(current)
    logger.debug(f"Degree-zero primitive built for a {omega.p}-form")
    return alpha


def primitive(omega: Form) -> Form:
    """Primitive of a closed form, choosing the Euler branch when deg != 0"""
    if omega.deg != 0:
        return exact_primitive_nonzero_degree(omega)
    return primitive_deg_zero(omega)
