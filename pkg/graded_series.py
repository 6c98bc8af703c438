#!/usr/bin/env python3
"""
Graded Series Module for the Graded Calculus Tool
This module provides homogeneous formal power series in graded coordinates with
rational-function coefficients: products with Koszul signs, body and value,
inversion, partial derivatives and the graded Taylor split.
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from calc_errors import CoordinateMismatch, DegreeError, NotInvertible, CoordinateError
from graded_degrees import (
    CoordinateSystem, MultiIndex, epsilon, index_degree, weight, render_index
)
from rational_coefficients import (
    BaseCoefficient, BaseField, Rational, base_field, coeff_eval, coeff_partial,
    coeff_taylor, coeff_invert, convert_coefficient, render_coefficient, is_atomic,
    leading_sign
)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('graded_series')

# None marks an exact series
Trunc = Optional[int]


def base_of(cs: CoordinateSystem) -> BaseField:
    return base_field(cs.even_names)


def normalize_trunc(cs: CoordinateSystem, trunc: Trunc) -> Trunc:
    """Bounded systems become exact once trunc reaches their top weight"""
    if trunc is None:
        return None
    if cs.max_weight is not None and trunc >= cs.max_weight:
        return None
    return max(trunc, -1)


def min_trunc(*truncs: Trunc) -> Trunc:
    finite = [t for t in truncs if t is not None]
    return min(finite) if finite else None


def expansion_limit(cs: CoordinateSystem, *truncs: Trunc) -> Trunc:
    """
    Weight at which an infinite expansion (inverse, Taylor pullback) is cut:
    the smallest input weight, or the system default when all inputs are exact.
    """
    limit = min_trunc(*truncs)
    if limit is None and cs.max_weight is None:
        return cs.trunc
    return limit


def _as_number(trunc: Trunc) -> float:
    return math.inf if trunc is None else trunc


class GradedFunction:
    """
    Homogeneous formal power series on a graded domain.

    Terms map multi-indices to nonzero coefficients; every stored index has
    degree equal to the function degree and weight at most trunc.
    """

    __slots__ = ('cs', 'degree', 'terms', 'trunc')

    def __init__(self, cs: CoordinateSystem, degree: int, terms: Dict[MultiIndex, BaseCoefficient],
                 trunc: Trunc = None, validate: bool = True):
        trunc = normalize_trunc(cs, trunc)
        clean = {}
        for p, c in terms.items():
            if not c:
                continue
            if trunc is not None and weight(p) > trunc:
                continue
            if validate:
                if not cs.is_valid_index(p):
                    raise DegreeError(f"Index {p} is not valid for system {cs.label}")
                if index_degree(p, cs) != degree:
                    raise DegreeError(
                        f"Term {render_index(p, cs) or '1'} has degree {index_degree(p, cs)}, expected {degree}")
            clean[p] = c
        self.cs = cs
        self.degree = degree
        self.terms = clean
        self.trunc = trunc

    @classmethod
    def zero(cls, cs: CoordinateSystem, degree: int = 0, trunc: Trunc = None) -> 'GradedFunction':
        return cls(cs, degree, {}, trunc)

    @classmethod
    def constant(cls, cs: CoordinateSystem, value, trunc: Trunc = None) -> 'GradedFunction':
        return cls(cs, 0, {cs.zero_index: base_of(cs).constant(value)}, trunc)

    @classmethod
    def from_coefficient(cls, cs: CoordinateSystem, c: BaseCoefficient, trunc: Trunc = None) -> 'GradedFunction':
        return cls(cs, 0, {cs.zero_index: c}, trunc)

    @classmethod
    def coordinate(cls, cs: CoordinateSystem, name: str, trunc: Trunc = None) -> 'GradedFunction':
        """The coordinate function z^A"""
        if name in cs.even_names:
            return cls(cs, 0, {cs.zero_index: base_of(cs).gen(cs.even_names.index(name))}, trunc)
        mu = cs.graded_index(name)
        return cls(cs, cs.graded_degrees[mu], {cs.unit_index(mu): base_of(cs).one}, trunc)

    def _new(self, degree: int, terms: Dict[MultiIndex, BaseCoefficient], trunc: Trunc) -> 'GradedFunction':
        return GradedFunction(self.cs, degree, terms, trunc, validate=False)

    @property
    def base(self) -> BaseField:
        return base_of(self.cs)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, p: MultiIndex) -> BaseCoefficient:
        return self.terms.get(tuple(p), self.base.zero)

    def lowest_weight(self) -> float:
        """Smallest weight that can carry a nonzero term"""
        if self.terms:
            return min(weight(p) for p in self.terms)
        return _as_number(self.trunc) + 1

    def sorted_terms(self) -> List[Tuple[MultiIndex, BaseCoefficient]]:
        return sorted(self.terms.items(), key=lambda t: (weight(t[0]), t[0]))

    def _check(self, other: 'GradedFunction'):
        if not isinstance(other, GradedFunction):
            raise TypeError(f"Expected a GradedFunction, got {type(other).__name__}")
        if other.cs != self.cs:
            raise CoordinateMismatch(f"Functions live on {self.cs.label} and {other.cs.label}")

    def _sum_degree(self, other: 'GradedFunction') -> int:
        if self.degree == other.degree or not other.terms:
            return self.degree
        if not self.terms:
            return other.degree
        raise DegreeError(f"Cannot add functions of degree {self.degree} and {other.degree}")

    def __add__(self, other: 'GradedFunction') -> 'GradedFunction':
        self._check(other)
        degree = self._sum_degree(other)
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms[p] + c if p in terms else c
        return self._new(degree, terms, min_trunc(self.trunc, other.trunc))

    def __neg__(self) -> 'GradedFunction':
        return self._new(self.degree, {p: -c for p, c in self.terms.items()}, self.trunc)

    def __sub__(self, other: 'GradedFunction') -> 'GradedFunction':
        return self + (-other)

    def __mul__(self, other) -> 'GradedFunction':
        if isinstance(other, GradedFunction):
            return series_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> 'GradedFunction':
        return self.scale(other)

    def scale(self, c) -> 'GradedFunction':
        """Multiply by a degree-0 coefficient (rational number or BaseCoefficient)"""
        c = self.base.constant(c)
        if not c:
            return self._new(self.degree, {}, self.trunc)
        return self._new(self.degree, {p: c * v for p, v in self.terms.items()}, self.trunc)

    def with_degree(self, degree: int) -> 'GradedFunction':
        """Re-annotate the degree of a zero function"""
        if self.terms and degree != self.degree:
            raise DegreeError(f"Function has degree {self.degree}, not {degree}")
        return self._new(degree, self.terms, self.trunc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedFunction):
            return NotImplemented
        return (self.cs == other.cs and self.trunc == other.trunc and self.terms == other.terms
                and (self.degree == other.degree or not self.terms))

    __hash__ = None

    def agrees_with(self, other: 'GradedFunction', up_to: Trunc = None) -> bool:
        """Equality of all coefficients up to the common truncation weight"""
        self._check(other)
        limit = min_trunc(self.trunc, other.trunc, up_to)
        if self.degree != other.degree and self.terms and other.terms:
            return truncate(self, limit).is_zero() and truncate(other, limit).is_zero()
        return truncate(self - other, limit).is_zero()

    def __repr__(self) -> str:
        return f"GradedFunction({render_function(self)}, degree={self.degree}, trunc={self.trunc})"

    def __str__(self) -> str:
        return render_function(self)


def truncate(f: GradedFunction, W: Trunc) -> GradedFunction:
    if W is None:
        return f
    W = min_trunc(W, f.trunc)
    return f._new(f.degree, {p: c for p, c in f.terms.items() if weight(p) <= W}, W)


def _product_trunc(f: GradedFunction, g: GradedFunction) -> Trunc:
    bound = min(_as_number(f.trunc) + g.lowest_weight(), _as_number(g.trunc) + f.lowest_weight())
    if bound == math.inf:
        return None
    return int(bound)


def series_mul(f: GradedFunction, g: GradedFunction) -> GradedFunction:
    """
    Product of graded series with Koszul signs.

    Args:
        f: Left factor
        g: Right factor on the same system

    Returns:
        f*g of degree |f| + |g|

    Raises:
        CoordinateMismatch: the factors live on different systems
    """
    f._check(g)
    cs = f.cs
    W = normalize_trunc(cs, _product_trunc(f, g))
    terms: Dict[MultiIndex, BaseCoefficient] = {}
    right = [(q, weight(q), c) for q, c in g.terms.items()]
    for p, a in f.terms.items():
        wp = weight(p)
        for q, wq, b in right:
            if W is not None and wp + wq > W:
                continue
            sign = epsilon(p, q, cs)
            if sign == 0:
                continue
            r = tuple(x + y for x, y in zip(p, q))
            value = a * b if sign > 0 else -(a * b)
            terms[r] = terms[r] + value if r in terms else value
    return GradedFunction(cs, f.degree + g.degree, terms, W, validate=False)


def body(f: GradedFunction) -> BaseCoefficient:
    """Coefficient of the empty monomial; zero unless |f| = 0"""
    if f.degree != 0:
        return f.base.zero
    return f.coefficient(f.cs.zero_index)


def value_at(f: GradedFunction, point: Sequence[Rational]) -> Fraction:
    if f.degree != 0:
        return Fraction(0)
    return coeff_eval(body(f), point, f.base)


def series_invert(f: GradedFunction, W: Trunc = None) -> GradedFunction:
    """
    Multiplicative inverse through the Neumann series.

    Args:
        f: Degree-0 function with nonzero body
        W: Requested weight (None: the function's own weight, or the system
           default for exact input on an unbounded system)

    Returns:
        g with f*g = 1 up to weight min(W, trunc of f)

    Raises:
        NotInvertible: nonzero degree or zero body
    """
    if f.degree != 0:
        raise NotInvertible(f"Only degree-0 functions can be inverted, got degree {f.degree}")
    f0 = body(f)
    if not f0:
        raise NotInvertible("Function has zero body")
    inv0 = coeff_invert(f0)
    rest = f - GradedFunction.from_coefficient(f.cs, f0)
    if rest.is_zero() and rest.trunc is None:
        return GradedFunction.from_coefficient(f.cs, inv0, W)
    limit = expansion_limit(f.cs, W, f.trunc)
    rest = truncate(rest.scale(inv0), limit)
    one = GradedFunction.constant(f.cs, 1, limit)
    total = one
    power = one
    top = f.cs.max_weight if limit is None else limit
    # rest starts at weight 2: a degree-0 monomial needs two graded factors
    for q in range(1, top // 2 + 1):
        power = truncate(series_mul(power, rest), limit)
        if power.is_zero():
            break
        total = total + power if q % 2 == 0 else total - power
    return truncate(total.scale(inv0), limit)


def partial_even(f: GradedFunction, i: int) -> GradedFunction:
    base = f.base
    terms = {p: coeff_partial(c, i, base) for p, c in f.terms.items()}
    return f._new(f.degree, terms, f.trunc)


def partial_odd(f: GradedFunction, mu: int) -> GradedFunction:
    """Left derivative with respect to the graded coordinate xi_mu"""
    cs = f.cs
    odd = cs.odd_mask
    degrees = cs.graded_degrees
    terms: Dict[MultiIndex, BaseCoefficient] = {}
    for q, c in f.terms.items():
        if q[mu] == 0:
            continue
        passed = sum(q[nu] * degrees[nu] for nu in range(mu))
        sign = -1 if (odd[mu] and passed % 2) else 1
        p = q[:mu] + (q[mu] - 1,) + q[mu + 1:]
        terms[p] = c * (q[mu] * sign)
    trunc = None if f.trunc is None else f.trunc - 1
    return GradedFunction(cs, f.degree - degrees[mu], terms, trunc, validate=False)


def partial(f: GradedFunction, A: int) -> GradedFunction:
    """Derivative along the unified coordinate z^A"""
    if A < f.cs.n0:
        return partial_even(f, A)
    return partial_odd(f, A - f.cs.n0)


@dataclass
class TaylorSplit:
    """Graded Taylor polynomial and remainder of a function at a point"""
    T: GradedFunction
    R: GradedFunction
    center: Tuple[Fraction, ...]
    order: int


def taylor_split(f: GradedFunction, point: Sequence[Rational], q: int) -> TaylorSplit:
    """
    Split f into its order-q graded Taylor polynomial and remainder.

    Each coefficient of weight w is expanded classically to order q - w.
    """
    base = f.base
    point = tuple(Fraction(a) for a in point)
    T_terms: Dict[MultiIndex, BaseCoefficient] = {}
    R_terms: Dict[MultiIndex, BaseCoefficient] = {}
    for p, c in f.terms.items():
        w = weight(p)
        if w > q:
            R_terms[p] = c
            continue
        t, r = coeff_taylor(c, point, q - w, base)
        T_terms[p] = t
        R_terms[p] = r
    return TaylorSplit(f._new(f.degree, T_terms, f.trunc), f._new(f.degree, R_terms, f.trunc), point, q)


def transport(f: GradedFunction, target: CoordinateSystem) -> GradedFunction:
    """
    Re-express f on a system containing all of its coordinates under the same
    names and degrees. Graded coordinates may be reordered, which costs the
    Koszul sign of the permutation of odd factors.
    """
    source = f.cs
    if source == target:
        return f
    positions = []
    for name, degree in source.graded:
        try:
            nu = target.graded_index(name)
        except CoordinateError:
            raise CoordinateMismatch(f"Coordinate {name} of {source.label} is missing from {target.label}")
        if target.graded_degrees[nu] != degree:
            raise CoordinateMismatch(f"Coordinate {name} changes degree between {source.label} and {target.label}")
        positions.append(nu)
    src_base, dst_base = base_of(source), base_of(target)
    terms: Dict[MultiIndex, BaseCoefficient] = {}
    for p, c in f.terms.items():
        q = [0] * target.n_star
        sign = 1
        for mu, e in enumerate(p):
            if not e:
                continue
            nu = positions[mu]
            if target.odd_mask[nu] and e % 2:
                for other in range(nu + 1, target.n_star):
                    if q[other] % 2 and target.odd_mask[other]:
                        sign = -sign
            q[nu] = e
        c = convert_coefficient(c, src_base, dst_base)
        terms[tuple(q)] = c if sign > 0 else -c
    return GradedFunction(target, f.degree, terms, f.trunc, validate=False)


def substitute_zero(f: GradedFunction, mus: Sequence[int]) -> GradedFunction:
    """Drop every term containing one of the listed graded coordinates"""
    kept = {p: c for p, c in f.terms.items() if all(p[mu] == 0 for mu in mus)}
    return f._new(f.degree, kept, f.trunc)


def render_function(f: GradedFunction) -> str:
    """
    Canonical text of a function: terms by weight then index, each rendered as
    coefficient * monomial, e.g. 'x^2 + 2*x * xi1*xi2'.
    """
    if not f.terms:
        return '0'
    base = f.base
    pieces = []
    for p, c in f.sorted_terms():
        monomial = render_index(p, f.cs)
        sign = leading_sign(c)
        magnitude = -c if sign < 0 else c
        coeff_text = render_coefficient(magnitude, base)
        if not monomial:
            text = coeff_text
        elif magnitude == base.one:
            text = monomial
        elif is_atomic(magnitude) or not magnitude.denom.is_ground:
            text = f"{coeff_text} * {monomial}"
        else:
            text = f"({coeff_text}) * {monomial}"
        if not pieces:
            pieces.append(text if sign > 0 else f"-{text}")
        else:
            pieces.append(f" + {text}" if sign > 0 else f" - {text}")
    return ''.join(pieces)
