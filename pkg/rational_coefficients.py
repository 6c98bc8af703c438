#!/usr/bin/env python3
"""
Rational Coefficient Module for the Graded Calculus Tool
This module provides the base coefficients of graded functions: rational
functions in the even coordinates with exact rational number coefficients,
backed by sympy's sparse fraction fields.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Dict, List, Sequence, Tuple, Union

from sympy import Dummy, Symbol, QQ
from sympy.polys.fields import field, FracElement
from sympy.polys.rings import PolyElement

from calc_errors import ZeroInverse, CompositionPole, EvalPole, CoordinateMismatch

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('rational_coefficients')

BaseCoefficient = FracElement
BasePoint = Tuple[Fraction, ...]
Rational = Union[int, Fraction]

# generator used when a system has no even coordinates
_UNIT_SYMBOL = Dummy('unit')


def to_fraction(value) -> Fraction:
    """Convert a sympy ground rational (or int) into a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


def to_ground(value: Rational):
    """Convert an int or Fraction into an element of QQ"""
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def parse_rational(text: str) -> Fraction:
    """Parse 'p' or 'p/q' into a Fraction"""
    return Fraction(text.strip())


def format_rational(value: Rational) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class BaseField:
    """Field of rational functions in a fixed, ordered tuple of even coordinates"""

    def __init__(self, names: Tuple[str, ...]):
        self.names = tuple(names)
        symbols = [Symbol(n) for n in self.names] or [_UNIT_SYMBOL]
        result = field(symbols, QQ)
        self.field = result[0]
        self.ring = self.field.ring
        self.gens = tuple(result[1:1 + len(self.names)])
        self.zero = self.field.zero
        self.one = self.field.one

    def __repr__(self) -> str:
        return f"BaseField({', '.join(self.names)})"

    @property
    def n0(self) -> int:
        return len(self.names)

    def constant(self, value) -> BaseCoefficient:
        if isinstance(value, FracElement):
            return value
        if isinstance(value, (int, Fraction)):
            return self.field(to_ground(value))
        return self.field(value)

    def gen(self, i: int) -> BaseCoefficient:
        return self.gens[i]

    def owns(self, f: BaseCoefficient) -> bool:
        return f.field == self.field

    def from_terms(self, numerator: Dict[Tuple[int, ...], Fraction],
                   denominator: Dict[Tuple[int, ...], Fraction]) -> BaseCoefficient:
        """Build a canonical coefficient from sparse exponent-vector maps"""
        num = self.ring.from_dict({self._monom(m): to_ground(c) for m, c in numerator.items()})
        den = self.ring.from_dict({self._monom(m): to_ground(c) for m, c in denominator.items()})
        if not den:
            raise ZeroInverse("Coefficient denominator is the zero polynomial")
        return self.field.new(num, den)

    def _monom(self, exponents: Sequence[int]) -> Tuple[int, ...]:
        exponents = tuple(exponents)
        if not self.names:
            return (0,)
        if len(exponents) != self.n0:
            raise CoordinateMismatch(f"Exponent vector {exponents} does not fit {self.names}")
        return exponents


@lru_cache(maxsize=None)
def base_field(names: Tuple[str, ...]) -> BaseField:
    return BaseField(tuple(names))


def poly_terms(p: PolyElement, n0: int) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """Terms of a polynomial as (exponents, rational) pairs, highest total degree first"""
    terms = [(tuple(m[:n0]), to_fraction(c)) for m, c in p.terms()]
    terms.sort(key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
    return terms


def coeff_add(f: BaseCoefficient, g: BaseCoefficient) -> BaseCoefficient:
    if f.field != g.field:
        raise CoordinateMismatch("Coefficients belong to different coordinate systems")
    return f + g


def coeff_mul(f: BaseCoefficient, g: BaseCoefficient) -> BaseCoefficient:
    if f.field != g.field:
        raise CoordinateMismatch("Coefficients belong to different coordinate systems")
    return f * g


def coeff_neg(f: BaseCoefficient) -> BaseCoefficient:
    return -f


def coeff_invert(f: BaseCoefficient) -> BaseCoefficient:
    """
    Multiplicative inverse of a rational function.

    Raises:
        ZeroInverse: f is the zero function
    """
    if not f:
        raise ZeroInverse("Cannot invert the zero rational function")
    return f.field.one / f


def coeff_partial(f: BaseCoefficient, i: int, base: BaseField) -> BaseCoefficient:
    """Derivative with respect to the i-th even coordinate"""
    return f.diff(base.gens[i])


def _substitute(p: PolyElement, values: Sequence[BaseCoefficient], n0: int,
                target: BaseField, powers: Dict[Tuple[int, int], BaseCoefficient]) -> BaseCoefficient:
    total = target.zero
    for monom, c in p.terms():
        term = target.constant(to_fraction(c))
        for i in range(n0):
            e = monom[i]
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = values[i] ** e
                term = term * powers[key]
        total = total + term
    return total


def coeff_compose(f: BaseCoefficient, g: Sequence[BaseCoefficient], target: BaseField) -> BaseCoefficient:
    """
    Substitute the coefficients g for the variables of f.

    Args:
        f: Rational function in m0 variables
        g: m0 rational functions over the target field
        target: Field the result lives in

    Returns:
        Canonical f(g)

    Raises:
        CompositionPole: the substituted denominator vanishes identically
    """
    n0 = len(f.field.symbols) if f.field.symbols[0] != _UNIT_SYMBOL else 0
    if len(g) != n0:
        raise CoordinateMismatch(f"Composition expects {n0} arguments, got {len(g)}")
    powers: Dict[Tuple[int, int], BaseCoefficient] = {}
    den = _substitute(f.denom, g, n0, target, powers)
    if not den:
        raise CompositionPole("Denominator vanishes identically after substitution")
    num = _substitute(f.numer, g, n0, target, powers)
    return num / den


def convert_coefficient(f: BaseCoefficient, source: BaseField, target: BaseField) -> BaseCoefficient:
    """Re-express f over a field whose coordinates include the source coordinates"""
    if source.field == target.field:
        return f
    try:
        images = [target.gens[target.names.index(n)] for n in source.names]
    except ValueError:
        raise CoordinateMismatch(f"Cannot move a coefficient from {source.names} to {target.names}")
    return coeff_compose(f, images, target)


def _eval_poly(p: PolyElement, point: Sequence[Fraction], n0: int) -> Fraction:
    total = Fraction(0)
    for monom, c in p.terms():
        term = to_fraction(c)
        for i in range(n0):
            if monom[i]:
                term *= point[i] ** monom[i]
        total += term
    return total


def coeff_eval(f: BaseCoefficient, point: Sequence[Rational], base: BaseField) -> Fraction:
    """
    Exact value of f at a rational point.

    Raises:
        EvalPole: the denominator vanishes at the point
    """
    if len(point) != base.n0:
        raise CoordinateMismatch(f"Point {tuple(point)} has {len(point)} coordinates, expected {base.n0}")
    point = [Fraction(a) for a in point]
    den = _eval_poly(f.denom, point, base.n0)
    if den == 0:
        raise EvalPole(f"Denominator vanishes at {format_point(point)}")
    return _eval_poly(f.numer, point, base.n0) / den


def format_point(point: Sequence[Rational]) -> str:
    return '(' + ', '.join(format_rational(a) for a in point) + ')'


def is_polynomial(f: BaseCoefficient) -> bool:
    return f.denom.is_ground


def total_degree(f: BaseCoefficient) -> int:
    """Total degree of the numerator"""
    return max((sum(m) for m in f.numer.monoms()), default=0)


def derivative_table(f: BaseCoefficient, order: int, base: BaseField) -> Dict[Tuple[int, ...], BaseCoefficient]:
    """All mixed partial derivatives of f up to the given total order"""
    table = {(0,) * base.n0: f}
    for alpha in _multi_indices(base.n0, order):
        if alpha in table:
            continue
        i = next(j for j, e in enumerate(alpha) if e)
        lower = tuple(e - 1 if j == i else e for j, e in enumerate(alpha))
        table[alpha] = coeff_partial(table[lower], i, base)
    return table


def _multi_indices(n: int, order: int) -> List[Tuple[int, ...]]:
    indices = [alpha for alpha in product(range(order + 1), repeat=n) if sum(alpha) <= order]
    indices.sort(key=lambda a: (sum(a), a))
    return indices


def multi_factorial(alpha: Sequence[int]) -> int:
    result = 1
    for e in alpha:
        result *= factorial(e)
    return result


def coeff_taylor(f: BaseCoefficient, point: Sequence[Rational], order: int,
                 base: BaseField) -> Tuple[BaseCoefficient, BaseCoefficient]:
    """
    Classical Taylor split f = T + R at a point.

    Args:
        f: Rational function without a pole at the point
        point: Expansion center
        order: Largest total degree kept in T

    Returns:
        (T, R) with T the Taylor polynomial and R = f - T

    Raises:
        EvalPole: f has a pole at the point
    """
    point = [Fraction(a) for a in point]
    coeff_eval(f, point, base)
    if order < 0:
        return base.zero, f
    table = derivative_table(f, order, base)
    shifts = [base.gens[i] - base.constant(point[i]) for i in range(base.n0)]
    taylor = base.zero
    for alpha, derivative in table.items():
        value = coeff_eval(derivative, point, base)
        if value == 0:
            continue
        term = base.constant(value / multi_factorial(alpha))
        for i, e in enumerate(alpha):
            if e:
                term = term * shifts[i] ** e
        taylor = taylor + term
    return taylor, f - taylor


def _render_monomial(exponents: Sequence[int], names: Sequence[str]) -> str:
    factors = []
    for name, e in zip(names, exponents):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return '*'.join(factors)


def render_poly_terms(terms: List[Tuple[Tuple[int, ...], Fraction]], names: Sequence[str]) -> str:
    if not terms:
        return '0'
    pieces = []
    for exponents, c in terms:
        monomial = _render_monomial(exponents, names)
        magnitude = abs(c)
        if not monomial:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{format_rational(magnitude)}*{monomial}"
        if not pieces:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f" + {body}" if c > 0 else f" - {body}")
    return ''.join(pieces)


def render_coefficient(f: BaseCoefficient, base: BaseField) -> str:
    """Canonical text of a coefficient, e.g. '2*x', '(x)/(x + 1)'"""
    num_terms = poly_terms(f.numer, base.n0)
    if f.denom.is_ground:
        scale = Fraction(1) / to_fraction(f.denom.LC)
        return render_poly_terms([(m, c * scale) for m, c in num_terms], base.names)
    num = render_poly_terms(num_terms, base.names)
    den = render_poly_terms(poly_terms(f.denom, base.n0), base.names)
    return f"({num})/({den})"


def is_atomic(f: BaseCoefficient) -> bool:
    """True when the rendered coefficient is a single signed monomial"""
    return f.denom.is_ground and len(f.numer) <= 1


def leading_sign(f: BaseCoefficient) -> int:
    """Sign of a single-monomial coefficient (1 for everything else)"""
    if is_atomic(f) and f.numer:
        c = to_fraction(f.numer.LC) / to_fraction(f.denom.LC)
        return -1 if c < 0 else 1
    return 1


def coefficient_to_json(f: BaseCoefficient, base: BaseField) -> Dict[str, List]:
    return {
        'num': [[format_rational(c), list(m)] for m, c in poly_terms(f.numer, base.n0)],
        'den': [[format_rational(c), list(m)] for m, c in poly_terms(f.denom, base.n0)],
    }


def coefficient_from_json(data: Dict[str, List], base: BaseField) -> BaseCoefficient:
    numerator = {tuple(m): parse_rational(c) for c, m in data['num']}
    denominator = {tuple(m): parse_rational(c) for c, m in data['den']}
    return base.from_terms(numerator, denominator)
