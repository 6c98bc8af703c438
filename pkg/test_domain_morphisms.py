#!/usr/bin/env python3
"""
Test Script for Domain Morphisms
This script tests pullback, composition, the chain rule, graded rank
classification and the inverse function construction.
"""

import sys
import logging
from fractions import Fraction

import pytest

from calc_errors import BadUnderlyingInverse, CoordinateMismatch, SingularDifferential
from graded_degrees import CoordinateSystem
from graded_series import GradedFunction, base_of, partial, series_mul
from domain_morphisms import (DomainMorphism, classify, compose, differential_matrices,
                              differential_of_function, graded_rank, independent_at, invert_morphism,
                              pullback)
from object_codec import function_from_text
from sample_objects import SAMPLE_SYSTEMS, make_rng, random_function, random_morphism

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('domain_morphisms_test')

SYSTEMS = ['odd', 'mixed', 'negative']
SEEDS = range(10)
# per-seed draws; over 3 systems and 10 seeds: 210 pullback and chain rule
# checks, 120 compositions and 60 inversions
PULLBACK_SAMPLES = 7
COMPOSE_SAMPLES = 4
INVERSE_SAMPLES = 2


def _morphism(cs, target, texts, name='phi'):
    return DomainMorphism.from_pullbacks(cs, target, [function_from_text(t, cs) for t in texts], name)


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_pullback_is_an_algebra_morphism(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    rng = make_rng(seed)
    for _ in range(PULLBACK_SAMPLES):
        phi = random_morphism(rng, cs, cs, max_weight=2)
        f = random_function(rng, cs, int(rng.integers(-1, 2)), max_weight=2)
        g = random_function(rng, cs, int(rng.integers(-1, 2)), max_weight=2)
        left = pullback(phi, series_mul(f, g))
        right = series_mul(pullback(phi, f), pullback(phi, g))
        assert left.agrees_with(right)
        assert pullback(phi, f + f).agrees_with(pullback(phi, f).scale(2))


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_composition_is_functorial(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    rng = make_rng(50 + seed)
    identity = DomainMorphism.identity(cs)
    for _ in range(COMPOSE_SAMPLES):
        phi = random_morphism(rng, cs, cs, max_weight=2)
        psi = random_morphism(rng, cs, cs, max_weight=2)
        f = random_function(rng, cs, 0, max_weight=2)
        both = compose(phi, psi)
        assert pullback(both, f).agrees_with(pullback(phi, pullback(psi, f)))
        assert compose(identity, phi).agrees_with(phi)
        assert compose(phi, identity).agrees_with(phi)


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_chain_rule(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    rng = make_rng(80 + seed)
    for _ in range(PULLBACK_SAMPLES):
        phi = random_morphism(rng, cs, cs, max_weight=2)
        f = random_function(rng, cs, int(rng.integers(-1, 2)), max_weight=2)
        pulled = pullback(phi, f)
        coordinates = phi.pullbacks()
        for A in range(len(cs.names)):
            expected = GradedFunction.zero(cs, pulled.degree - cs.degrees[A])
            for K in range(len(cs.names)):
                expected = expected + series_mul(partial(coordinates[K], A), pullback(phi, partial(f, K)))
            assert partial(pulled, A).agrees_with(expected), cs.names[A]


def test_pullback_through_rational_underlying_map():
    source = CoordinateSystem(('t',), (('s', 1),), 4, 'S')
    target = CoordinateSystem(('x',), (('xi', 1),), 4, 'T')
    phi = _morphism(source, target, ['t^2 + 1', 't*s'])
    f = function_from_text('xi/x + x^2*xi', target)
    expected = function_from_text('t*s/(t^2 + 1) + (t^2 + 1)^2*t*s', source)
    assert pullback(phi, f) == expected
    with pytest.raises(CoordinateMismatch):
        pullback(phi, function_from_text('t', source))


def test_even_nilpotent_shift_is_inverted():
    cs = CoordinateSystem(('x',), (('s1', -2), ('s2', 2)), 6, 'shifted')
    phi = _morphism(cs, cs, ['x + s1*s2', 's1', 's2'])
    psi = invert_morphism(phi, [base_of(cs).gen(0)])
    expected = _morphism(cs, cs, ['x - s1*s2', 's1', 's2'])
    assert psi.agrees_with(expected)
    assert compose(phi, psi).agrees_with(DomainMorphism.identity(cs))


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_inverse_round_trip(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    rng = make_rng(120 + seed)
    for _ in range(INVERSE_SAMPLES):
        phi = random_morphism(rng, cs, cs, max_weight=2, identity_body=True)
        psi = invert_morphism(phi, list(base_of(cs).gens))
        assert compose(psi, phi).agrees_with(DomainMorphism.identity(cs))
        assert compose(phi, psi).agrees_with(DomainMorphism.identity(cs))


def test_inverse_rejects_wrong_underlying_inverse():
    cs = SAMPLE_SYSTEMS['odd']
    phi = _morphism(cs, cs, ['2*x + 1', 'xi', 'eta + x*xi'])
    x = base_of(cs).gen(0)
    with pytest.raises(BadUnderlyingInverse):
        invert_morphism(phi, [x - 1])
    psi = invert_morphism(phi, [(x - 1) / 2])
    assert compose(phi, psi).agrees_with(DomainMorphism.identity(cs))


def test_inverse_rejects_singular_blocks():
    cs = SAMPLE_SYSTEMS['odd']
    phi = _morphism(cs, cs, ['x', 'xi + eta', 'x*xi + x*eta'])
    with pytest.raises(SingularDifferential):
        invert_morphism(phi, [base_of(cs).gen(0)])
    other = CoordinateSystem(('x',), (('xi', 1),), 4, 'small')
    projection = _morphism(cs, other, ['x', 'xi'])
    with pytest.raises(SingularDifferential):
        invert_morphism(projection, [base_of(other).gen(0)])


def test_degree_matrices_and_rank():
    cs = SAMPLE_SYSTEMS['odd']
    phi = _morphism(cs, cs, ['x^2', '2*xi + x*eta', 'eta'])
    dm = differential_matrices(phi, (3,))
    assert dm.blocks[0] == [[Fraction(6)]]
    assert dm.blocks[1] == [[Fraction(2), Fraction(3)], [Fraction(0), Fraction(1)]]
    assert dm.ranks() == {0: 1, 1: 2}
    assert graded_rank(phi, (0,)) == {0: 0, 1: 2}


def test_classify():
    small = CoordinateSystem(('x',), (('xi', 1),), 4, 'small')
    large = CoordinateSystem(('x', 'y'), (('xi', 1),), 4, 'large')
    projection = _morphism(large, small, ['x', 'xi'])
    inclusion = _morphism(small, large, ['x', '0', 'xi'])
    square = _morphism(small, small, ['x^2', 'xi'])
    assert classify(projection, (1, 2)) == 'submersion'
    assert classify(inclusion, (1,)) == 'immersion'
    assert classify(square, (1,)) == 'local-diffeo'
    assert classify(square, (0,)) == 'none'
    assert classify(DomainMorphism.identity(large), (0, 0)) == 'local-diffeo'


def test_differential_and_independence():
    cs = SAMPLE_SYSTEMS['odd']
    f = function_from_text('x^3 - x', cs)
    assert differential_of_function(f, (2,)) == {'x': Fraction(11), 'xi': Fraction(0), 'eta': Fraction(0)}
    x = function_from_text('x', cs)
    xi = function_from_text('xi', cs)
    assert independent_at([x, xi], (0,))
    assert not independent_at([x, function_from_text('3*x', cs)], (1,))
    assert not independent_at([function_from_text('x^2', cs)], (0,))


def main():
    """Main function"""
    return pytest.main([__file__, '-q'])


if __name__ == "__main__":
    sys.exit(main())
