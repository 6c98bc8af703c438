#!/usr/bin/env python3
"""
Object Codec Module for the Graded Calculus Tool
This module renders every calculation object as canonical text, reads
canonical expressions back into functions, and encodes and decodes objects as
versioned JSON documents.
"""

import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from calc_errors import GradedCalcError, ScriptError
from graded_degrees import CoordinateSystem
from graded_series import (
    GradedFunction, TaylorSplit, base_of, body, render_function, series_invert, series_mul
)
from domain_morphisms import DegreeMatrices, DomainMorphism
from vector_fields import TangentVector, VectorField
from differential_forms import Form, ShiftedSystem
from vector_bundles import FiberBasis, ShiftedBundle, TransitionData
from graded_atlas import CocycleReport, GluingData, TripleResult
from rational_coefficients import (
    coeff_invert, coefficient_from_json, coefficient_to_json, format_point, format_rational, parse_rational
)
from script_parser import Expr, Name, Neg, Num, Pow, parse_expression

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('object_codec')

SCHEMA_VERSION = 1


# Reading expressions

class ExpressionEvaluator:
    """
    Evaluates expression trees to functions on one coordinate system.
    Names resolve to previously bound functions first, then to coordinates.
    """

    def __init__(self, cs: CoordinateSystem, bound: Optional[Dict[str, GradedFunction]] = None):
        self.cs = cs
        self.bound = dict(bound or {})

    def evaluate(self, node: Expr) -> GradedFunction:
        try:
            return self._evaluate(node)
        except GradedCalcError as e:
            raise e.at(node.line, node.column)

    def _evaluate(self, node: Expr) -> GradedFunction:
        if isinstance(node, Num):
            return GradedFunction.constant(self.cs, node.value)
        if isinstance(node, Name):
            return self._name(node)
        if isinstance(node, Neg):
            return -self.evaluate(node.operand)
        if isinstance(node, Pow):
            return self._power(self.evaluate(node.base), node.exponent, node)
        left = self.evaluate(node.left)
        right = self.evaluate(node.right)
        try:
            if node.op == '+':
                return left + right
            if node.op == '-':
                return left - right
            if node.op == '*':
                return series_mul(left, right)
            return self._divide(left, right)
        except GradedCalcError as e:
            raise e.at(node.line, node.column)

    def _name(self, node: Name) -> GradedFunction:
        if node.ident in self.bound:
            return self.bound[node.ident]
        if node.ident in self.cs.names:
            return GradedFunction.coordinate(self.cs, node.ident)
        raise ScriptError(f"Unknown name {node.ident!r} on {self.cs.label}", node.line, node.column)

    def _divide(self, left: GradedFunction, right: GradedFunction) -> GradedFunction:
        if right.degree == 0 and set(right.terms) <= {self.cs.zero_index} and right.trunc is None:
            return left.scale(coeff_invert(body(right)))
        return series_mul(left, series_invert(right))

    def _power(self, base: GradedFunction, exponent: int, node: Pow) -> GradedFunction:
        if exponent < 0:
            base = self._divide(GradedFunction.constant(self.cs, 1), base)
            exponent = -exponent
        result = GradedFunction.constant(self.cs, 1)
        square = base
        while exponent:
            if exponent & 1:
                result = series_mul(result, square)
            exponent >>= 1
            if exponent:
                square = series_mul(square, square)
        return result


def function_from_text(text: str, cs: CoordinateSystem,
                       bound: Optional[Dict[str, GradedFunction]] = None) -> GradedFunction:
    """Read a canonical expression back into a function on cs"""
    return ExpressionEvaluator(cs, bound).evaluate(parse_expression(text))


# Canonical text

def render_form(omega: Form) -> str:
    return render_function(omega.value)


def render_field(X: VectorField) -> str:
    """Nonzero components as 'z: expr;' pairs, or 0"""
    pieces = [f"{name}: {render_function(C)};" for name, C in zip(X.cs.names, X.components) if not C.is_zero()]
    return ' '.join(pieces) if pieces else '0'


def render_morphism(phi: DomainMorphism) -> str:
    """Pullbacks of all target coordinates as 'w = expr;' pairs"""
    return ' '.join(f"{name} = {render_function(g)};" for name, g in zip(phi.target.names, phi.pullbacks()))


def render_matrix(rows: Sequence[Sequence[GradedFunction]]) -> str:
    return '[' + ', '.join('[' + ', '.join(render_function(e) for e in row) + ']' for row in rows) + ']'


def render_rational_matrix(rows: Sequence[Sequence[Fraction]]) -> str:
    return '[' + ', '.join('[' + ', '.join(format_rational(v) for v in row) + ']' for row in rows) + ']'


def render_transitions(T: TransitionData) -> List[str]:
    lines = ['fiber: ' + ', '.join(str(d) for d in T.fiber.degrees)]
    for (a, b) in sorted(T.matrices):
        lines.append(f"G({a}, {b}) = {render_matrix(T.matrices[(a, b)])}")
    return lines


def render_gluing(atlas: GluingData) -> List[str]:
    lines = [f"chart {label}: {cs.label}" for label, cs in atlas.charts.items()]
    for (a, b) in sorted(atlas.transitions):
        lines.append(f"phi({a}, {b}): {render_morphism(atlas.transitions[(a, b)])}")
    return lines


def render_degree_matrices(dm: DegreeMatrices) -> List[str]:
    return [f"D({j}) = {render_rational_matrix(dm.blocks[j])}" for j in sorted(dm.blocks)]


def render_tangent_vector(v: TangentVector) -> str:
    pieces = [f"{name}: {format_rational(value)}" for name, value in v.components.items() if value != 0]
    return f"at {format_point(v.point)}: " + (', '.join(pieces) if pieces else '0')


def render_object(obj: Any) -> List[str]:
    """Canonical text lines of any command result"""
    if isinstance(obj, GradedFunction):
        return [render_function(obj)]
    if isinstance(obj, Form):
        return [render_form(obj)]
    if isinstance(obj, VectorField):
        return [render_field(obj)]
    if isinstance(obj, DomainMorphism):
        return [render_morphism(obj)]
    if isinstance(obj, TaylorSplit):
        return [f"T = {render_function(obj.T)}", f"R = {render_function(obj.R)}"]
    if isinstance(obj, DegreeMatrices):
        return render_degree_matrices(obj)
    if isinstance(obj, TangentVector):
        return [render_tangent_vector(obj)]
    if isinstance(obj, CocycleReport):
        return obj.lines()
    if isinstance(obj, TransitionData):
        return render_transitions(obj)
    if isinstance(obj, GluingData):
        return render_gluing(obj)
    if isinstance(obj, ShiftedBundle):
        return render_transitions(obj.transitions) + render_gluing(obj.total_space) + obj.report.lines()
    if isinstance(obj, bool):
        return ['true' if obj else 'false']
    if isinstance(obj, (int, Fraction)):
        return [format_rational(obj)]
    if isinstance(obj, dict):
        return [f"{key}: {render_object(value)[0]}" for key, value in obj.items()]
    if isinstance(obj, (list, tuple)):
        return [line for item in obj for line in render_object(item)]
    return [str(obj)]


# JSON

def system_to_json(cs: CoordinateSystem) -> Dict[str, Any]:
    return {
        'name': cs.name,
        'even': list(cs.even_names),
        'graded': [[name, degree] for name, degree in cs.graded],
        'trunc': cs.trunc,
    }


def system_from_json(data: Dict[str, Any]) -> CoordinateSystem:
    return CoordinateSystem(tuple(data['even']), tuple((n, d) for n, d in data['graded']),
                            data['trunc'], data.get('name', ''))


def function_to_json(f: GradedFunction) -> Dict[str, Any]:
    base = f.base
    return {
        'type': 'function',
        'system': system_to_json(f.cs),
        'degree': f.degree,
        'trunc': f.trunc,
        'terms': [{'index': list(p), 'coeff': coefficient_to_json(c, base)} for p, c in f.sorted_terms()],
        'text': render_function(f),
    }


def function_from_json(data: Dict[str, Any], cs: Optional[CoordinateSystem] = None) -> GradedFunction:
    cs = cs or system_from_json(data['system'])
    base = base_of(cs)
    terms = {tuple(t['index']): coefficient_from_json(t['coeff'], base) for t in data['terms']}
    return GradedFunction(cs, data['degree'], terms, data['trunc'])


def morphism_to_json(phi: DomainMorphism) -> Dict[str, Any]:
    """Morphism as its stored parts: underlying map, even corrections and graded pullbacks"""
    base = base_of(phi.source)
    return {
        'type': 'morphism',
        'name': phi.name,
        'source': system_to_json(phi.source),
        'target': system_to_json(phi.target),
        'underlying': [coefficient_to_json(u, base) for u in phi.underlying],
        'ybar': [function_to_json(y) for y in phi.ybar],
        'thetabar': [function_to_json(t) for t in phi.thetabar],
    }


def morphism_from_json(data: Dict[str, Any]) -> DomainMorphism:
    source = system_from_json(data['source'])
    target = system_from_json(data['target'])
    base = base_of(source)
    underlying = [coefficient_from_json(u, base) for u in data['underlying']]
    ybar = [function_from_json(y, source) for y in data['ybar']]
    thetabar = [function_from_json(t, source) for t in data['thetabar']]
    return DomainMorphism(source, target, underlying, ybar, thetabar, data.get('name', ''))


def field_to_json(X: VectorField) -> Dict[str, Any]:
    return {
        'type': 'field',
        'system': system_to_json(X.cs),
        'degree': X.degree,
        'components': [function_to_json(C) for C in X.components],
    }


def field_from_json(data: Dict[str, Any]) -> VectorField:
    cs = system_from_json(data['system'])
    return VectorField(cs, data['degree'], [function_from_json(C, cs) for C in data['components']])


def form_to_json(omega: Form) -> Dict[str, Any]:
    return {
        'type': 'form',
        'system': system_to_json(omega.shifted.base),
        'shift': omega.shifted.shift,
        'p': omega.p,
        'deg': omega.deg,
        'value': function_to_json(omega.value),
    }


def form_from_json(data: Dict[str, Any]) -> Form:
    shifted = ShiftedSystem(system_from_json(data['system']), data['shift'])
    return Form(shifted, data['p'], function_from_json(data['value'], shifted.doubled))


def _matrix_to_json(rows) -> List[List[Dict[str, Any]]]:
    return [[function_to_json(e) for e in row] for row in rows]


def transitions_to_json(T: TransitionData) -> Dict[str, Any]:
    return {
        'type': 'transitions',
        'name': T.name,
        'charts': list(T.charts),
        'fiber': list(T.fiber.degrees),
        'atlas': gluing_to_json(T.atlas) if T.atlas is not None else None,
        'system': system_to_json(T.system) if T.system is not None else None,
        'matrices': [{'pair': [a, b], 'entries': _matrix_to_json(T.matrices[(a, b)])}
                     for (a, b) in sorted(T.matrices)],
    }


def transitions_from_json(data: Dict[str, Any]) -> TransitionData:
    atlas = gluing_from_json(data['atlas']) if data.get('atlas') else None
    system = system_from_json(data['system']) if data.get('system') else None
    matrices = {}
    for item in data['matrices']:
        a, b = item['pair']
        cs = atlas.charts[b] if atlas is not None else system
        matrices[(a, b)] = [[function_from_json(e, cs) for e in row] for row in item['entries']]
    return TransitionData(data['charts'], FiberBasis(tuple(data['fiber'])), matrices, atlas, system,
                          data.get('name', ''))


def gluing_to_json(atlas: GluingData) -> Dict[str, Any]:
    return {
        'type': 'atlas',
        'name': atlas.name,
        'charts': {label: system_to_json(cs) for label, cs in atlas.charts.items()},
        'transitions': [{'pair': [a, b], 'morphism': morphism_to_json(atlas.transitions[(a, b)])}
                        for (a, b) in sorted(atlas.transitions)],
    }


def gluing_from_json(data: Dict[str, Any]) -> GluingData:
    charts = {label: system_from_json(cs) for label, cs in data['charts'].items()}
    transitions = {}
    for item in data['transitions']:
        a, b = item['pair']
        transitions[(a, b)] = morphism_from_json(item['morphism'])
    return GluingData(charts, transitions, data.get('name', ''))


def report_to_json(report: CocycleReport) -> Dict[str, Any]:
    return {
        'type': 'report',
        'passed': report.passed,
        'summary': report.summary(),
        'triples': [{'triple': list(r.triple), 'passed': r.passed, 'witness': r.witness} for r in report.results],
    }


def report_from_json(data: Dict[str, Any]) -> CocycleReport:
    return CocycleReport([TripleResult(tuple(r['triple']), r['passed'], r['witness']) for r in data['triples']])


def object_to_json(obj: Any) -> Any:
    """JSON-ready value for any command result"""
    if isinstance(obj, GradedFunction):
        return function_to_json(obj)
    if isinstance(obj, Form):
        return form_to_json(obj)
    if isinstance(obj, VectorField):
        return field_to_json(obj)
    if isinstance(obj, DomainMorphism):
        return morphism_to_json(obj)
    if isinstance(obj, TaylorSplit):
        return {'type': 'taylor', 'center': [format_rational(a) for a in obj.center], 'order': obj.order,
                'T': function_to_json(obj.T), 'R': function_to_json(obj.R)}
    if isinstance(obj, DegreeMatrices):
        return {'type': 'differential', 'point': [format_rational(a) for a in obj.point],
                'blocks': {str(j): [[format_rational(v) for v in row] for row in obj.blocks[j]]
                           for j in sorted(obj.blocks)}}
    if isinstance(obj, TangentVector):
        return {'type': 'tangent', 'point': [format_rational(a) for a in obj.point], 'degree': obj.degree,
                'components': {k: format_rational(v) for k, v in obj.components.items()}}
    if isinstance(obj, CocycleReport):
        return report_to_json(obj)
    if isinstance(obj, TransitionData):
        return transitions_to_json(obj)
    if isinstance(obj, GluingData):
        return gluing_to_json(obj)
    if isinstance(obj, ShiftedBundle):
        return {'type': 'shifted-bundle', 'transitions': transitions_to_json(obj.transitions),
                'total_space': gluing_to_json(obj.total_space), 'report': report_to_json(obj.report)}
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, Fraction)):
        return {'type': 'rational', 'value': format_rational(obj)}
    if isinstance(obj, dict):
        return {str(k): object_to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [object_to_json(v) for v in obj]
    return str(obj)


DECODERS = {
    'function': function_from_json,
    'morphism': morphism_from_json,
    'field': field_from_json,
    'form': form_from_json,
    'transitions': transitions_from_json,
    'atlas': gluing_from_json,
    'report': report_from_json,
    'rational': lambda data: parse_rational(data['value']),
}


def object_from_json(data: Any) -> Any:
    """Decode a value produced by object_to_json; untyped values pass through"""
    if isinstance(data, dict) and data.get('type') in DECODERS:
        return DECODERS[data['type']](data)
    if isinstance(data, dict) and 'type' not in data:
        return {k: object_from_json(v) for k, v in data.items()}
    if isinstance(data, list):
        return [object_from_json(v) for v in data]
    return data


def document(results: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Top-level JSON document of one script run"""
    return {'schema': SCHEMA_VERSION, 'results': results}
