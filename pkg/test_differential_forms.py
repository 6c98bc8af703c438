#!/usr/bin/env python3
"""
Test Script for Differential Forms
This script tests the Cartan calculus on shifted tangent bundles, the
homotopy operator and the primitive constructions for closed forms.
"""

import sys
import logging

import pytest

from calc_errors import DegreeError, DegreeZero, NameCollision, NonPolynomialResidue, NotClosed
from graded_degrees import CoordinateSystem
from differential_forms import (Form, ShiftedSystem, d, exact_primitive_nonzero_degree, i_X, lie, lie_field,
                                minimal_shift, poincare_homotopy, primitive, pullback_form,
                                zero_section_projection)
from graded_series import GradedFunction
from domain_morphisms import DomainMorphism, pullback
from vector_fields import VectorField, bracket, euler, vf_apply
from object_codec import function_from_text
from sample_objects import SAMPLE_SYSTEMS, make_rng, random_field, random_form, random_function, random_morphism

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('differential_forms_test')

SYSTEMS = ['odd', 'mixed', 'negative']
SEEDS = range(10)
# per-seed draws; with 3 systems and 10 seeds these give 210 Cartan triples,
# 120 Euler and homotopy checks and 120 primitives per form degree
CARTAN_SAMPLES = 7
FORM_SAMPLES = 4


def _sign(a, b=1):
    return -1 if (a * b) % 2 else 1


def _random_form(rng, shifted, p=None, deg=None, max_weight=3):
    p = int(rng.integers(0, 3)) if p is None else p
    deg = int(rng.integers(-1, 2)) if deg is None else deg
    return random_form(rng, shifted, p, deg, max_weight=max_weight)


def test_minimal_shift_and_validation():
    assert minimal_shift(SAMPLE_SYSTEMS['odd']) == 0
    assert minimal_shift(SAMPLE_SYSTEMS['mixed']) == 2
    assert minimal_shift(SAMPLE_SYSTEMS['negative']) == 2
    with pytest.raises(DegreeError):
        ShiftedSystem(SAMPLE_SYSTEMS['odd'], 1)
    with pytest.raises(DegreeError):
        ShiftedSystem(SAMPLE_SYSTEMS['negative'], 0)
    clash = CoordinateSystem(('x', 'dx'), (), 4, 'clash')
    with pytest.raises(NameCollision):
        ShiftedSystem(clash)


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_d_squares_to_zero_and_is_a_derivation(system, seed):
    shifted = ShiftedSystem(SAMPLE_SYSTEMS[system])
    rng = make_rng(seed)
    omega = _random_form(rng, shifted)
    eta = _random_form(rng, shifted, max_weight=2)
    assert d(d(omega)).is_zero()
    left = d(omega * eta)
    right = d(omega) * eta + (omega * d(eta)).scale(_sign(omega.value.degree))
    assert left.agrees_with(right)
    assert d(omega).deg == omega.deg


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_wedge_is_graded_commutative(system, seed):
    shifted = ShiftedSystem(SAMPLE_SYSTEMS[system])
    rng = make_rng(20 + seed)
    omega = _random_form(rng, shifted)
    eta = _random_form(rng, shifted)
    sign = _sign(omega.value.degree, eta.value.degree)
    assert (omega * eta).agrees_with((eta * omega).scale(sign))


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_cartan_identities(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    shifted = ShiftedSystem(cs)
    rng = make_rng(40 + seed)
    for _ in range(CARTAN_SAMPLES):
        omega, X, Y = _cartan_sample(rng, cs, shifted)
        # L_X agrees with the commutator field on the doubled system
        assert lie(omega, X).value.agrees_with(vf_apply(lie_field(shifted, X), omega.value))
        # d commutes with L_X up to sign
        assert d(lie(omega, X)).agrees_with(lie(d(omega), X).scale(_sign(X.degree)))
        # interior products graded-commute
        sign = _sign(X.degree - 1, Y.degree - 1)
        assert i_X(i_X(omega, Y), X).agrees_with(i_X(i_X(omega, X), Y).scale(sign))


def _cartan_sample(rng, cs, shifted):
    omega = _random_form(rng, shifted, max_weight=2)
    X = random_field(rng, cs, int(rng.integers(-1, 2)), max_weight=2)
    Y = random_field(rng, cs, int(rng.integers(-1, 2)), max_weight=2)
    return omega, X, Y


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_lie_derivative_commutators(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    shifted = ShiftedSystem(cs)
    rng = make_rng(240 + seed)
    for _ in range(CARTAN_SAMPLES):
        omega, X, Y = _cartan_sample(rng, cs, shifted)
        XY = bracket(X, Y)
        # [L_X, i_Y] = i_[X,Y]
        sign = _sign(X.degree, Y.degree - 1)
        left = i_X(lie(omega, X), Y).scale(-sign) + lie(i_X(omega, Y), X)
        assert left.agrees_with(i_X(omega, XY))
        # [L_X, L_Y] = L_[X,Y]
        sign = _sign(X.degree, Y.degree)
        left = lie(lie(omega, Y), X) - lie(lie(omega, X), Y).scale(sign)
        assert left.agrees_with(lie(omega, XY))


def test_lie_commutator_on_coordinate_fields():
    cs = SAMPLE_SYSTEMS['odd']
    shifted = ShiftedSystem(cs)
    X = VectorField.from_mapping(cs, {'x': function_from_text('x', cs)})
    Y = VectorField.coordinate(cs, 'x')
    omega = Form(shifted, 1, function_from_text('x^2*dx', shifted.doubled))
    # [x d/dx, d/dx] = -d/dx
    assert bracket(X, Y).agrees_with(Y.scale(-1))
    assert i_X(omega, bracket(X, Y)).value == function_from_text('-x^2', shifted.doubled)
    left = lie(i_X(omega, Y), X) - i_X(lie(omega, X), Y)
    assert left.agrees_with(i_X(omega, bracket(X, Y)))


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_lie_derivative_of_euler_field_is_degree(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    shifted = ShiftedSystem(cs)
    rng = make_rng(60 + seed)
    for _ in range(FORM_SAMPLES):
        omega = _random_form(rng, shifted)
        assert lie(omega, euler(cs)).agrees_with(omega.scale(omega.deg))


def test_coordinate_form_degrees():
    cs = SAMPLE_SYSTEMS['negative']
    shifted = ShiftedSystem(cs)
    db = Form.coordinate_differential(shifted, 'b')
    assert db.p == 1
    assert db.deg == -2
    assert db.value.degree == -2 + 1 + 2
    f = function_from_text('x^2', cs)
    df = d(Form.from_function(shifted, f))
    assert df.value == function_from_text('2*x*dx', shifted.doubled)


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_homotopy_operator_identity(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    shifted = ShiftedSystem(cs)
    rng = make_rng(80 + seed)
    for _ in range(FORM_SAMPLES):
        omega = _random_form(rng, shifted, p=int(rng.integers(1, 3)))
        for mu in range(cs.n_star):
            left = d(poincare_homotopy(omega, mu)) + poincare_homotopy(d(omega), mu)
            right = omega - zero_section_projection(omega, mu)
            assert left.agrees_with(right), cs.graded_names[mu]


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_primitive_of_exact_form(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    shifted = ShiftedSystem(cs)
    rng = make_rng(100 + seed)
    for _ in range(FORM_SAMPLES):
        for deg in (-1, 0, 1):
            beta = _random_form(rng, shifted, p=int(rng.integers(0, 2)), deg=deg, max_weight=2)
            omega = d(beta)
            alpha = primitive(omega)
            assert d(alpha).agrees_with(omega), deg


def test_primitive_examples():
    cs = SAMPLE_SYSTEMS['odd']
    shifted = ShiftedSystem(cs)
    dx = Form.coordinate_differential(shifted, 'x')
    assert primitive(dx).agrees_with(Form.from_function(shifted, GradedFunction.coordinate(cs, 'x')))
    dxi = Form.coordinate_differential(shifted, 'xi')
    assert primitive(dxi).agrees_with(Form.from_function(shifted, GradedFunction.coordinate(cs, 'xi')))
    with pytest.raises(DegreeZero):
        exact_primitive_nonzero_degree(dx)
    not_closed = Form(shifted, 1, function_from_text('x*dxi', shifted.doubled))
    with pytest.raises(NotClosed):
        primitive(not_closed)
    rational = d(Form.from_function(shifted, function_from_text('1/(x^2 + 1)', cs)))
    with pytest.raises(NonPolynomialResidue):
        primitive(rational)
    with pytest.raises(DegreeError):
        primitive(Form.from_function(shifted, GradedFunction.coordinate(cs, 'x')))


@pytest.mark.parametrize('seed', SEEDS)
def test_pullback_commutes_with_d(seed):
    cs = SAMPLE_SYSTEMS['odd']
    rng = make_rng(140 + seed)
    phi = random_morphism(rng, cs, cs, max_weight=2)
    shifted = ShiftedSystem(cs)
    omega = _random_form(rng, shifted, max_weight=2)
    assert d(pullback_form(phi, omega)).agrees_with(pullback_form(phi, d(omega)))
    f = random_function(rng, cs, 0, max_weight=2)
    zero_form = Form.from_function(shifted, f)
    assert pullback_form(phi, zero_form).agrees_with(Form.from_function(shifted, pullback(phi, f)))


def test_pullback_across_shifts():
    source = SAMPLE_SYSTEMS['odd']
    target = CoordinateSystem(('y',), (('b', -2),), 4, 'target')
    phi_pullbacks = [function_from_text('x^2', source), GradedFunction.zero(source, -2)]
    phi = DomainMorphism.from_pullbacks(source, target, phi_pullbacks, 'phi')
    omega = Form.coordinate_differential(ShiftedSystem(target), 'y')
    pulled = pullback_form(phi, omega)
    assert pulled.shifted.shift == 2
    expected = function_from_text('2*x*dx', pulled.shifted.doubled)
    assert pulled.value == expected


def main():
    """Main function"""
    return pytest.main([__file__, '-q'])


if __name__ == "__main__":
    sys.exit(main())
