#!/usr/bin/env python3
"""
Test Script for the Object Codec
This script tests canonical rendering, reading expressions back from text and
the JSON encoding of calculation results.
"""

import sys
import json
import logging
from fractions import Fraction

import pytest

from calc_errors import DegreeError, ScriptError, ScriptSyntaxError
from graded_series import GradedFunction, base_of, series_invert, series_mul, taylor_split
from domain_morphisms import DomainMorphism, differential_matrices
from vector_fields import VectorField, euler, vf_value_at
from differential_forms import Form, ShiftedSystem, d
from vector_bundles import FiberBasis, TransitionData, check_cocycle
from rational_coefficients import coefficient_from_json
from object_codec import (document, function_from_text, object_from_json, object_to_json, render_field,
                          render_function, render_morphism, render_object)
from sample_objects import (SAMPLE_SYSTEMS, make_rng, random_field, random_form, random_function,
                            random_morphism, random_transition_matrices)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('object_codec_test')

SYSTEMS = ['odd', 'mixed', 'negative', 'wide']
SEEDS = range(8)


def _through_json(obj):
    """Encode, serialize to a string and decode again"""
    return object_from_json(json.loads(json.dumps(object_to_json(obj))))


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_rendered_text_reads_back(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    rng = make_rng(seed)
    for degree in (-1, 0, 1, 2):
        f = random_function(rng, cs, degree, max_weight=3, rational=bool(seed % 2))
        text = render_function(f)
        assert function_from_text(text, cs) == f, text


def test_render_examples():
    cs = SAMPLE_SYSTEMS['odd']
    assert render_function(GradedFunction.zero(cs, 1)) == '0'
    assert render_function(function_from_text('x^2 - 3/2*x', cs)) == 'x^2 - 3/2*x'
    assert render_function(function_from_text('xi*x/(x + 1)', cs)) == '(x)/(x + 1) * xi'
    assert render_function(function_from_text('(x + 1)*xi*eta', cs)) == '(x + 1) * xi*eta'
    phi = DomainMorphism.from_pullbacks(cs, cs, [function_from_text(t, cs) for t in ['2*x', 'xi', 'eta + x*xi']],
                                        'phi')
    assert render_morphism(phi) == 'x = 2*x; xi = xi; eta = eta + x * xi;'
    X = VectorField.from_mapping(cs, {'x': function_from_text('x^2', cs), 'xi': function_from_text('x*xi', cs)})
    assert render_field(X) == 'x: x^2; xi: x * xi;'
    assert render_field(VectorField.zero(cs, 0)) == '0'
    assert render_object(vf_value_at(X, (3,))) == ['at (3): x: 9']


def test_render_compound_results():
    cs = SAMPLE_SYSTEMS['odd']
    phi = DomainMorphism.from_pullbacks(cs, cs, [function_from_text(t, cs) for t in ['x^2', '2*xi + x*eta', 'eta']],
                                        'phi')
    assert render_object(differential_matrices(phi, (3,))) == ['D(0) = [[6]]', 'D(1) = [[2, 3], [0, 1]]']
    split = taylor_split(function_from_text('x^3', cs), (0,), 2)
    assert render_object(split) == ['T = 0', 'R = x^3']
    assert render_object(True) == ['true']
    assert render_object(Fraction(-3, 4)) == ['-3/4']
    assert render_object({'x': Fraction(2), 'xi': Fraction(0)}) == ['x: 2', 'xi: 0']


def test_reading_errors_carry_positions():
    cs = SAMPLE_SYSTEMS['odd']
    with pytest.raises(DegreeError) as info:
        function_from_text('x + xi', cs)
    assert (info.value.line, info.value.column) == (1, 3)
    with pytest.raises(ScriptError) as info:
        function_from_text('x*y', cs)
    assert info.value.column == 3
    with pytest.raises(ScriptSyntaxError):
        function_from_text('x +', cs)
    with pytest.raises(ScriptSyntaxError):
        function_from_text('x x', cs)


def test_bound_names_shadow_coordinates():
    cs = SAMPLE_SYSTEMS['odd']
    f = function_from_text('x^2', cs)
    g = function_from_text('f*xi + x', cs, {'f': f, 'x': GradedFunction.coordinate(cs, 'xi')})
    assert g.degree == 1
    assert g == function_from_text('x^2*xi + xi', cs)


@pytest.mark.parametrize('system', SYSTEMS)
@pytest.mark.parametrize('seed', SEEDS)
def test_json_round_trip_of_functions_and_morphisms(system, seed):
    cs = SAMPLE_SYSTEMS[system]
    rng = make_rng(30 + seed)
    f = random_function(rng, cs, int(rng.integers(-1, 2)), max_weight=3, rational=True)
    assert _through_json(f) == f
    phi = random_morphism(rng, cs, cs, max_weight=2)
    decoded = _through_json(phi)
    assert decoded.agrees_with(phi)
    assert decoded.name == phi.name
    X = random_field(rng, cs, 1, max_weight=2)
    assert _through_json(X).agrees_with(X)


@pytest.mark.parametrize('system', ['odd', 'mixed', 'negative'])
def test_json_round_trip_of_forms(system):
    cs = SAMPLE_SYSTEMS[system]
    shifted = ShiftedSystem(cs)
    rng = make_rng(60)
    omega = random_form(rng, shifted, 1, 0, max_weight=2)
    decoded = _through_json(omega)
    assert decoded.shifted.shift == shifted.shift
    assert (decoded.p, decoded.deg) == (omega.p, omega.deg)
    assert decoded.agrees_with(omega)
    assert _through_json(d(omega)).agrees_with(d(omega))


def test_json_round_trip_of_transitions_and_reports():
    cs = SAMPLE_SYSTEMS['odd']
    charts = ['1', '2']
    matrices = random_transition_matrices(make_rng(3), cs, (0, 1), charts, max_weight=2)
    T = TransitionData(charts, FiberBasis((0, 1)), matrices, system=cs, name='E')
    decoded = _through_json(T)
    assert decoded.fiber == T.fiber
    assert decoded.name == 'E'
    for pair in T.matrices:
        for row, expected in zip(decoded.matrix(*pair), T.matrix(*pair)):
            assert row == expected
    report = check_cocycle(T)
    assert _through_json(report).summary() == report.summary()


def test_json_values_and_document():
    cs = SAMPLE_SYSTEMS['mixed']
    assert _through_json(Fraction(5, 3)) == Fraction(5, 3)
    assert _through_json(False) is False
    E = euler(cs)
    encoded = object_to_json(E)
    assert encoded['type'] == 'field'
    assert encoded['degree'] == 0
    text = object_to_json(function_from_text('x*xi', cs))['text']
    assert text == 'x * xi'
    doc = document([{'command': 'show f', 'result': object_to_json(Fraction(1))}])
    assert doc['schema'] == 1
    assert doc['results'][0]['result'] == {'type': 'rational', 'value': '1'}


def test_morphism_json_keeps_its_parts():
    cs = SAMPLE_SYSTEMS['odd']
    phi = DomainMorphism.from_pullbacks(cs, cs, [function_from_text(t, cs) for t in ['2*x', 'xi', 'eta + x*xi']],
                                        'phi')
    encoded = object_to_json(phi)
    assert 'pullbacks' not in encoded
    assert coefficient_from_json(encoded['underlying'][0], base_of(cs)) == 2 * base_of(cs).gen(0)
    assert [y['text'] for y in encoded['ybar']] == ['0']
    assert [t['text'] for t in encoded['thetabar']] == ['xi', 'eta + x * xi']
    decoded = _through_json(phi)
    assert render_morphism(decoded) == render_morphism(phi)


def test_truncated_series_keep_their_weight_in_json_only():
    cs = SAMPLE_SYSTEMS['wide']
    f = function_from_text('1 - u*b', cs)
    g = series_invert(f)
    assert g.trunc == cs.trunc
    decoded = _through_json(g)
    assert decoded.trunc == g.trunc
    assert decoded == g
    # text carries the terms but not the weight, and reads back as an exact series
    read = function_from_text(render_function(g), cs)
    assert read.trunc is None
    assert read.agrees_with(g)
    assert not series_mul(read, f).agrees_with(GradedFunction.constant(cs, 1), cs.trunc + 2)


def main():
    """Main function"""
    return pytest.main([__file__, '-q'])


if __name__ == "__main__":
    sys.exit(main())
