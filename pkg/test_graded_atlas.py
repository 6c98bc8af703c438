#!/usr/bin/env python3
"""
Test Script for Graded Atlases
This script tests gluing checks, global functions and products of domains.
"""

import sys
import logging

import pytest

from calc_errors import CoordinateMismatch, MissingOverlap
from graded_degrees import CoordinateSystem
from graded_series import GradedFunction
from domain_morphisms import DomainMorphism, pullback
from graded_atlas import (GlobalFunction, GluingData, check_global_function, product_morphism, product_system,
                          projections, trivial_gluing, verify_gluing)
from object_codec import function_from_text

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('graded_atlas_test')

U = CoordinateSystem(('x',), (('xi', 1),), 4, 'U')
V = CoordinateSystem(('y',), (('eta', 1),), 4, 'V')


def _morphism(source, target, texts, name):
    return DomainMorphism.from_pullbacks(source, target, [function_from_text(t, source) for t in texts], name)


def _projective_line(scale='1'):
    phi_UV = _morphism(V, U, ['1/y', 'eta/y'], 'phiUV')
    phi_VU = _morphism(U, V, ['1/x', f"{scale}*xi/x"], 'phiVU')
    return GluingData({'U': U, 'V': V}, {('U', 'V'): phi_UV, ('V', 'U'): phi_VU}, 'P1')


def test_consistent_gluing_passes():
    report = verify_gluing(_projective_line())
    assert report.passed
    assert [r.triple for r in report.results] == [('U', 'V', 'U'), ('V', 'U', 'V')]
    assert report.summary() == 'PASS (0 triples failed)'


def test_inconsistent_gluing_is_reported():
    report = verify_gluing(_projective_line(scale='2'))
    assert report.passed is False
    assert report.summary() == 'FAIL (2 triples failed)'
    assert 'pullback of' in report.failed[0].witness
    assert report.lines()[0] == report.summary()


def test_missing_overlap():
    identity = DomainMorphism.identity(U)
    atlas = GluingData({'a': U, 'b': U, 'c': U}, {('a', 'b'): identity, ('b', 'c'): identity})
    with pytest.raises(MissingOverlap):
        verify_gluing(atlas)
    with pytest.raises(MissingOverlap):
        atlas.transition('a', 'c')


def test_transition_must_match_charts():
    phi_UV = _morphism(V, U, ['1/y', 'eta/y'], 'phiUV')
    with pytest.raises(CoordinateMismatch):
        GluingData({'U': U, 'V': V}, {('V', 'U'): phi_UV})
    with pytest.raises(CoordinateMismatch):
        GluingData({'U': U}, {('U', 'V'): phi_UV})


def test_global_function_compatibility():
    atlas = _projective_line()
    good = GlobalFunction(1, {
        'U': function_from_text('x*xi', U),
        'V': function_from_text('eta/y^2', V),
    }, 'P1')
    assert check_global_function(atlas, good).passed is True
    bad = GlobalFunction(1, {
        'U': function_from_text('x*xi', U),
        'V': function_from_text('eta/y', V),
    }, 'P1')
    report = check_global_function(atlas, bad)
    assert report.passed is False
    assert report.failed[0].triple == ('U', 'V', 'V')
    with pytest.raises(CoordinateMismatch):
        check_global_function(atlas, GlobalFunction(1, {'U': function_from_text('xi', U)}))


def test_trivial_gluing():
    atlas = trivial_gluing(U, ['a', 'b', 'c'])
    report = verify_gluing(atlas)
    assert report.passed
    assert len(report.results) == 12


def test_products():
    P = product_system(U, V, 'UxV')
    assert P.names == ('x', 'y', 'xi', 'eta')
    pr1, pr2 = projections(U, V, P)
    f = function_from_text('x^2*xi', U)
    assert pullback(pr1, f) == function_from_text('x^2*xi', P)
    assert pullback(pr2, function_from_text('y*eta', V)) == function_from_text('y*eta', P)
    phi = _morphism(U, U, ['2*x', 'x*xi'], 'phi')
    psi = _morphism(V, V, ['y + 1', '-eta'], 'psi')
    both = product_morphism(phi, psi)
    expected = [function_from_text(t, P) for t in ['2*x', 'y + 1', 'x*xi', '-eta']]
    for K, g in enumerate(expected):
        assert both.coordinate_pullback(K) == g
    assert both.name == 'phixpsi'


def test_product_functions_commute_with_sign():
    P = product_system(U, V)
    pr1, pr2 = projections(U, V, P)
    xi = pullback(pr1, GradedFunction.coordinate(U, 'xi'))
    eta = pullback(pr2, GradedFunction.coordinate(V, 'eta'))
    assert (xi * eta) == -(eta * xi)


def main():
    """Main function"""
    return pytest.main([__file__, '-q'])


if __name__ == "__main__":
    sys.exit(main())
