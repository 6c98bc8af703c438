#!/usr/bin/env python3
"""
Sample Object Module for the Graded Calculus Tool
This module generates seeded random coordinate systems, functions, morphisms,
vector fields, forms and transition data for the property test suites.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from graded_degrees import CoordinateSystem, enumerate_indices
from graded_series import GradedFunction, base_of, body, series_invert, series_mul
from domain_morphisms import DomainMorphism
from vector_fields import VectorField
from differential_forms import Form, ShiftedSystem
from rational_coefficients import BaseCoefficient

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('sample_objects')

SAMPLE_SYSTEMS = {
    'odd': CoordinateSystem(('x',), (('xi', 1), ('eta', 1)), 6, 'odd'),
    'mixed': CoordinateSystem(('x',), (('xi', 1), ('eta', -1), ('zeta', 2)), 4, 'mixed'),
    'negative': CoordinateSystem(('x', 'y'), (('a', -1), ('b', -2), ('c', 1)), 4, 'negative'),
    'wide': CoordinateSystem(('x',), (('a', -1), ('c', 1), ('u', 2), ('b', -2)), 5, 'wide'),
}


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_rational(rng: np.random.Generator, bound: int = 3, integral: bool = False) -> Fraction:
    numerator = int(rng.integers(-bound, bound + 1))
    if integral:
        return Fraction(numerator)
    return Fraction(numerator, int(rng.integers(1, 3)))


def random_coefficient(rng: np.random.Generator, cs: CoordinateSystem, max_degree: int = 2,
                       rational: bool = False) -> BaseCoefficient:
    """Small polynomial in the even coordinates, optionally over a nonvanishing denominator"""
    base = base_of(cs)
    value = base.constant(random_rational(rng))
    for i in range(base.n0):
        e = int(rng.integers(0, max_degree + 1))
        if e:
            value = value + base.constant(random_rational(rng)) * base.gen(i) ** e
    if rational and base.n0:
        value = value / (base.gen(0) ** 2 + 1)
    return value


def random_function(rng: np.random.Generator, cs: CoordinateSystem, degree: int,
                    max_weight: Optional[int] = None, density: float = 0.6,
                    rational: bool = False) -> GradedFunction:
    """Random homogeneous function with roughly density of the admissible monomials"""
    W = cs.trunc if max_weight is None else max_weight
    terms = {}
    for p in enumerate_indices(cs, degree, W):
        if rng.random() < density:
            terms[p] = random_coefficient(rng, cs, rational=rational)
    return GradedFunction(cs, degree, terms)


def random_invertible(rng: np.random.Generator, cs: CoordinateSystem,
                      max_weight: Optional[int] = None) -> GradedFunction:
    """Degree-0 function whose body is a nonzero constant"""
    f = random_function(rng, cs, 0, max_weight)
    f = f - GradedFunction.from_coefficient(cs, body(f))
    c = random_rational(rng, integral=True) or Fraction(1)
    return f + GradedFunction.constant(cs, c)


def random_morphism(rng: np.random.Generator, source: CoordinateSystem, target: CoordinateSystem,
                    max_weight: Optional[int] = None, identity_body: bool = False) -> DomainMorphism:
    """
    Random polynomial morphism. With identity_body the underlying map is the
    identity and the linear graded part is the identity plus noise of higher
    weight, which makes the result invertible.
    """
    base = base_of(source)
    underlying = []
    ybar = []
    for j in range(target.n0):
        if identity_body:
            underlying.append(base.gen(j))
        else:
            underlying.append(random_coefficient(rng, source))
        correction = random_function(rng, source, 0, max_weight)
        ybar.append(correction - GradedFunction.from_coefficient(source, body(correction)))
    thetabar = []
    for nu, (name, degree) in enumerate(target.graded):
        t = random_function(rng, source, degree, max_weight)
        if identity_body:
            keep = {p: c for p, c in t.terms.items() if sum(p) > 1}
            t = GradedFunction(source, degree, keep) + GradedFunction.coordinate(source, source.graded_names[nu])
        thetabar.append(t)
    return DomainMorphism(source, target, underlying, ybar, thetabar, name='sample')


def random_field(rng: np.random.Generator, cs: CoordinateSystem, degree: int,
                 max_weight: Optional[int] = None) -> VectorField:
    components = [random_function(rng, cs, degree + d, max_weight, density=0.4) for d in cs.degrees]
    return VectorField(cs, degree, components)


def random_form(rng: np.random.Generator, shifted: ShiftedSystem, p: int, deg: int,
                max_weight: Optional[int] = None, density: float = 0.4) -> Form:
    """Random homogeneous p-form of the given form degree"""
    doubled = shifted.doubled
    total = deg + p * (1 + shifted.shift)
    W = doubled.trunc if max_weight is None else max_weight
    terms = {}
    for index in enumerate_indices(doubled, total, W):
        if shifted.form_degree(index) == p and rng.random() < density:
            terms[index] = random_coefficient(rng, doubled)
    return Form(shifted, p, GradedFunction(doubled, total, terms))


Matrix = List[List[GradedFunction]]


def cocycle_product(A: Matrix, B: Matrix) -> Matrix:
    """P(A, B)[k][l] = sum_r B[r][l] * A[k][r], the order used by the bundle cocycle"""
    m = len(A)
    result = []
    for kappa in range(m):
        row = []
        for lam in range(m):
            total = None
            for rho in range(m):
                term = series_mul(B[rho][lam], A[kappa][rho])
                total = term if total is None else total + term
            row.append(total)
        result.append(row)
    return result


def _elementary(cs: CoordinateSystem, degrees: Sequence[int], a: int, b: int,
                c: GradedFunction) -> Tuple[Matrix, Matrix]:
    m = len(degrees)
    def build(sign: int) -> Matrix:
        rows = []
        for kappa in range(m):
            row = []
            for lam in range(m):
                if kappa == lam:
                    row.append(GradedFunction.constant(cs, 1))
                elif (kappa, lam) == (a, b):
                    row.append(c if sign > 0 else -c)
                else:
                    row.append(GradedFunction.zero(cs, degrees[lam] - degrees[kappa]))
            rows.append(row)
        return rows
    return build(1), build(-1)


def _diagonal(cs: CoordinateSystem, degrees: Sequence[int], entries: Sequence[GradedFunction]) -> Tuple[Matrix, Matrix]:
    m = len(degrees)
    forward, backward = [], []
    for kappa in range(m):
        forward.append([entries[kappa] if kappa == lam else GradedFunction.zero(cs, degrees[lam] - degrees[kappa])
                        for lam in range(m)])
        backward.append([series_invert(entries[kappa]) if kappa == lam
                         else GradedFunction.zero(cs, degrees[lam] - degrees[kappa]) for lam in range(m)])
    return forward, backward


def random_frame_change(rng: np.random.Generator, cs: CoordinateSystem, degrees: Sequence[int],
                        steps: int = 2, max_weight: Optional[int] = None) -> Tuple[Matrix, Matrix]:
    """
    Random invertible matrix H with entry (k, l) of degree degrees[l] - degrees[k],
    together with its inverse for the cocycle product.
    """
    m = len(degrees)
    diag = [random_invertible(rng, cs, max_weight) for _ in range(m)]
    H, H_inv = _diagonal(cs, degrees, diag)
    for _ in range(steps):
        if m < 2:
            break
        a, b = (int(v) for v in rng.choice(m, size=2, replace=False))
        c = random_function(rng, cs, degrees[b] - degrees[a], max_weight, density=0.5)
        E, E_inv = _elementary(cs, degrees, a, b, c)
        H = cocycle_product(H, E)
        H_inv = cocycle_product(E_inv, H_inv)
    return H, H_inv


def random_transition_matrices(rng: np.random.Generator, cs: CoordinateSystem, degrees: Sequence[int],
                               charts: Sequence[str], max_weight: Optional[int] = None) -> Dict[Tuple[str, str], Matrix]:
    """Cocycle-satisfying G_ab = P(H_a, H_b^-1) on one shared system"""
    frames = {label: random_frame_change(rng, cs, degrees, max_weight=max_weight) for label in charts}
    matrices = {}
    for a in charts:
        for b in charts:
            if a != b:
                matrices[(a, b)] = cocycle_product(frames[a][0], frames[b][1])
    return matrices
