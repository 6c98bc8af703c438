#!/usr/bin/env python3
"""
Script Runner Module for the Graded Calculus Tool
This module builds the symbol table of a parsed script, type-checks every
declaration and runs the commands, collecting one result or positioned error
per command.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from calc_errors import DegreeError, GradedCalcError, ScriptError
from graded_degrees import CoordinateSystem, default_trunc
from graded_series import (
    GradedFunction, body, partial, series_invert, series_mul, taylor_split, value_at
)
from domain_morphisms import (
    DomainMorphism, classify, compose, differential_matrices, differential_of_function, graded_rank,
    independent_at, invert_morphism, pullback
)
from vector_fields import VectorField, bracket, euler, related_check, vf_apply, vf_value_at
from differential_forms import (
    Form, ShiftedSystem, d, i_X, lie, poincare_homotopy, primitive, pullback_form
)
from vector_bundles import (
    FiberBasis, TransitionData, check_cocycle, dual_transitions, pullback_transitions, shift_transitions,
    shifted_bundle_Ek
)
from graded_atlas import GlobalFunction, GluingData, check_global_function, verify_gluing
from object_codec import ExpressionEvaluator
from script_parser import (
    AtlasDecl, BundleDecl, Command, DomainDecl, FieldDecl, FnDecl, FormDecl, GlobalDecl, ListArg,
    MorphismDecl, PointArg, Script, Statement
)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('script_runner')


@dataclass
class CommandResult:
    """Outcome of one command or failed declaration"""
    command: str
    line: int
    column: int
    value: Any = None
    error: Optional[GradedCalcError] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class Domain:
    system: CoordinateSystem
    shift: Optional[int] = None


# Argument kinds accepted by commands; a trailing '?' marks an optional
# argument and a leading '*' a variadic tail.
KIND_TYPES = {
    'fn': (GradedFunction,),
    'morphism': (DomainMorphism,),
    'field': (VectorField,),
    'form': (Form, GradedFunction),
    'bundle': (TransitionData,),
    'atlas': (GluingData,),
    'global': (GlobalFunction,),
    'product': (GradedFunction, Form),
}


@dataclass
class CommandSpec:
    handler: Callable
    kinds: List[str] = field(default_factory=list)


class ScriptRunner:
    """Symbol table and command loop for one script"""

    def __init__(self, trunc: Optional[int] = None):
        self.trunc = trunc if trunc is not None else default_trunc()
        self.domains: Dict[str, Domain] = {}
        self.objects: Dict[str, Any] = {}
        self.current_domain: Optional[str] = None
        self.commands = self._command_table()

    # symbol table

    def _claim(self, name: str, line: int, column: int):
        if name in self.domains or name in self.objects:
            raise ScriptError(f"Name {name!r} is already declared", line, column)

    def domain(self, name: str, line: int = 0, column: int = 0) -> Domain:
        if name not in self.domains:
            raise ScriptError(f"Unknown domain {name!r}", line, column)
        return self.domains[name]

    def lookup(self, name: str, kind: str, line: int = 0, column: int = 0) -> Any:
        if kind == 'domain':
            return self.domain(name, line, column).system
        if kind == 'any':
            if name in self.objects:
                return self.objects[name]
            raise ScriptError(f"Unknown object {name!r}", line, column)
        if name not in self.objects:
            raise ScriptError(f"Unknown {kind} {name!r}", line, column)
        value = self.objects[name]
        if not isinstance(value, KIND_TYPES[kind]):
            raise ScriptError(f"{name!r} is a {describe(value)}, expected a {kind}", line, column)
        return value

    def functions_on(self, cs: CoordinateSystem) -> Dict[str, GradedFunction]:
        return {n: v for n, v in self.objects.items() if isinstance(v, GradedFunction) and v.cs == cs}

    def evaluator(self, cs: CoordinateSystem) -> ExpressionEvaluator:
        return ExpressionEvaluator(cs, self.functions_on(cs))

    def as_form(self, value, shift: Optional[int] = None) -> Form:
        if isinstance(value, Form):
            return value
        owner = [dom for dom in self.domains.values() if dom.system == value.cs]
        if shift is None and owner:
            shift = owner[0].shift
        return Form.from_function(ShiftedSystem(value.cs, shift), value)

    # declarations

    def declare(self, stmt: Statement):
        handler = getattr(self, f"_declare_{type(stmt).__name__}")
        try:
            handler(stmt)
        except GradedCalcError as e:
            raise e.at(stmt.line, stmt.column)
        logger.debug(f"Declared {stmt.name}")

    def _declare_DomainDecl(self, decl: DomainDecl):
        self._claim(decl.name, decl.line, decl.column)
        trunc = decl.trunc if decl.trunc is not None else self.trunc
        cs = CoordinateSystem(tuple(decl.evens), tuple(decl.coords), trunc, decl.name)
        if decl.shift is not None:
            ShiftedSystem(cs, decl.shift)
        self.domains[decl.name] = Domain(cs, decl.shift)
        self.current_domain = decl.name

    def _declare_FnDecl(self, decl: FnDecl):
        self._claim(decl.name, decl.line, decl.column)
        name = decl.domain or self.current_domain
        if name is None:
            raise ScriptError(f"Function {decl.name!r} needs a domain ('in D')", decl.line, decl.column)
        cs = self.domain(name, decl.line, decl.column).system
        f = self.evaluator(cs).evaluate(decl.expr)
        if decl.degree is not None:
            if f.terms and f.degree != decl.degree:
                raise DegreeError(f"Function {decl.name!r} is declared of degree {decl.degree} "
                                  f"but has degree {f.degree}", decl.line, decl.column)
            f = f.with_degree(decl.degree)
        self.objects[decl.name] = f

    def _declare_MorphismDecl(self, decl: MorphismDecl):
        self._claim(decl.name, decl.line, decl.column)
        source = self.domain(decl.source, decl.line, decl.column).system
        target = self.domain(decl.target, decl.line, decl.column).system
        assigned: Dict[str, GradedFunction] = {}
        evaluator = self.evaluator(source)
        for coordinate, expr in decl.assignments:
            if coordinate not in target.names:
                raise ScriptError(f"{coordinate!r} is not a coordinate of {target.label}", expr.line, expr.column)
            if coordinate in assigned:
                raise ScriptError(f"Coordinate {coordinate!r} is assigned twice", expr.line, expr.column)
            assigned[coordinate] = evaluator.evaluate(expr)
        missing = [n for n in target.names if n not in assigned]
        if missing:
            raise ScriptError(f"Morphism {decl.name!r} does not assign {', '.join(missing)}")
        self.objects[decl.name] = DomainMorphism.from_pullbacks(
            source, target, [assigned[n] for n in target.names], decl.name)

    def _declare_FieldDecl(self, decl: FieldDecl):
        self._claim(decl.name, decl.line, decl.column)
        cs = self.domain(decl.domain, decl.line, decl.column).system
        if decl.euler:
            X = euler(cs)
            if decl.degree not in (None, 0):
                raise DegreeError(f"The Euler field has degree 0, not {decl.degree}")
        else:
            evaluator = self.evaluator(cs)
            components = {}
            for coordinate, expr in decl.components:
                if coordinate not in cs.names:
                    raise ScriptError(f"{coordinate!r} is not a coordinate of {cs.label}", expr.line, expr.column)
                components[coordinate] = evaluator.evaluate(expr)
            X = VectorField.from_mapping(cs, components, decl.degree)
        self.objects[decl.name] = X

    def _declare_FormDecl(self, decl: FormDecl):
        self._claim(decl.name, decl.line, decl.column)
        domain = self.domain(decl.domain, decl.line, decl.column)
        shifted = ShiftedSystem(domain.system, decl.shift if decl.shift is not None else domain.shift)
        bound = {n: shifted.lift(f) for n, f in self.functions_on(domain.system).items()}
        value = ExpressionEvaluator(shifted.doubled, bound).evaluate(decl.expr)
        p = shifted.form_degree(next(iter(value.terms))) if value.terms else 0
        self.objects[decl.name] = Form(shifted, p, value)

    def _declare_AtlasDecl(self, decl: AtlasDecl):
        self._claim(decl.name, decl.line, decl.column)
        charts = {label: self.domain(name, decl.line, decl.column).system for label, name in decl.charts}
        transitions = {(a, b): self.lookup(name, 'morphism', decl.line, decl.column)
                       for a, b, name in decl.transitions}
        self.objects[decl.name] = GluingData(charts, transitions, decl.name)

    def _declare_BundleDecl(self, decl: BundleDecl):
        self._claim(decl.name, decl.line, decl.column)
        if not decl.fiber:
            raise ScriptError(f"Bundle {decl.name!r} needs a 'fiber' line")
        atlas, system = None, None
        if decl.base in self.domains:
            system = self.domains[decl.base].system
            charts = decl.charts or sorted({c for a, b, _ in decl.transitions for c in (a, b)})
        else:
            atlas = self.lookup(decl.base, 'atlas', decl.line, decl.column)
            charts = decl.charts or atlas.labels
        matrices = {}
        for a, b, rows in decl.transitions:
            for label in (a, b):
                if label not in charts:
                    raise ScriptError(f"Unknown chart {label!r} in bundle {decl.name!r}")
            cs = atlas.charts[b] if atlas is not None else system
            evaluator = self.evaluator(cs)
            matrices[(a, b)] = [[evaluator.evaluate(e) for e in row] for row in rows]
        self.objects[decl.name] = TransitionData(charts, FiberBasis(tuple(decl.fiber)), matrices,
                                                 atlas, system, decl.name)

    def _declare_GlobalDecl(self, decl: GlobalDecl):
        self._claim(decl.name, decl.line, decl.column)
        atlas = self.lookup(decl.atlas, 'atlas', decl.line, decl.column)
        representatives = {}
        for label, expr in decl.representatives:
            if label not in atlas.charts:
                raise ScriptError(f"Unknown chart {label!r} in atlas {decl.atlas!r}", expr.line, expr.column)
            representatives[label] = self.evaluator(atlas.charts[label]).evaluate(expr)
        self.objects[decl.name] = GlobalFunction(decl.degree, representatives, decl.atlas)

    # commands

    def _command_table(self) -> Dict[str, CommandSpec]:
        return {
            'simplify': CommandSpec(lambda x: x, ['any']),
            'mul': CommandSpec(self._mul, ['product', 'product']),
            'invert': CommandSpec(lambda f, W=None: series_invert(f, W), ['fn', 'int?']),
            'partial': CommandSpec(lambda f, z: partial(f, f.cs.index_of(z)), ['fn', 'ident']),
            'taylor': CommandSpec(self._taylor, ['fn', 'point', 'int']),
            'value': CommandSpec(self._value, ['fn', 'point']),
            'body': CommandSpec(lambda f: GradedFunction.from_coefficient(f.cs, body(f)), ['fn']),
            'differential': CommandSpec(self._differential, ['fn', 'point']),
            'independent': CommandSpec(self._independent, ['point', '*fn']),
            'pullback': CommandSpec(pullback, ['morphism', 'fn']),
            'compose': CommandSpec(compose, ['morphism', 'morphism']),
            'dmat': CommandSpec(self._dmat, ['morphism', 'point']),
            'rank': CommandSpec(self._rank, ['morphism', 'point']),
            'classify': CommandSpec(self._classify, ['morphism', 'point']),
            'invert-morphism': CommandSpec(self._invert_morphism, ['morphism', 'list', 'int?']),
            'bracket': CommandSpec(bracket, ['field', 'field']),
            'apply': CommandSpec(vf_apply, ['field', 'fn']),
            'euler': CommandSpec(euler, ['domain']),
            'related': CommandSpec(related_check, ['field', 'field', 'morphism']),
            'field-at': CommandSpec(self._field_at, ['field', 'point']),
            'd': CommandSpec(lambda w: d(self.as_form(w)), ['form']),
            'ix': CommandSpec(lambda X, w: i_X(self.as_form(w), X), ['field', 'form']),
            'lie': CommandSpec(lambda X, w: lie(self.as_form(w), X), ['field', 'form']),
            'pullback-form': CommandSpec(lambda phi, w: pullback_form(phi, self.as_form(w)), ['morphism', 'form']),
            'primitive': CommandSpec(lambda w: primitive(self.as_form(w)), ['form']),
            'homotopy': CommandSpec(self._homotopy, ['form', 'ident']),
            'cocycle': CommandSpec(check_cocycle, ['bundle']),
            'dual': CommandSpec(dual_transitions, ['bundle']),
            'shift': CommandSpec(shift_transitions, ['bundle', 'int']),
            'pullback-bundle': CommandSpec(pullback_transitions, ['bundle', 'morphism']),
            'ek': CommandSpec(self._ek, ['bundle', 'int']),
            'verify-atlas': CommandSpec(verify_gluing, ['atlas']),
            'check-global': CommandSpec(self._check_global, ['global']),
        }

    def resolve(self, cmd: Command) -> List[Any]:
        """
        Resolve command arguments against the symbol table.

        Raises:
            ScriptError: unknown command, wrong arity or argument kinds
        """
        if cmd.name not in self.commands:
            raise ScriptError(f"Unknown command {cmd.name!r}", cmd.line, cmd.column)
        kinds = self.commands[cmd.name].kinds
        required = [k for k in kinds if not k.endswith('?') and not k.startswith('*')]
        variadic = bool(kinds) and kinds[-1].startswith('*')
        if len(cmd.args) < len(required) or (not variadic and len(cmd.args) > len(kinds)):
            raise ScriptError(f"{cmd.name} expects {len(required)} argument(s), got {len(cmd.args)}",
                              cmd.line, cmd.column)
        values = []
        for i, arg in enumerate(cmd.args):
            kind = kinds[min(i, len(kinds) - 1)].strip('*?')
            line, column = cmd.arg_positions[i]
            values.append(self._argument(arg, kind, line, column))
        return values

    def _argument(self, arg, kind: str, line: int, column: int):
        if kind in ('int', 'rational'):
            if not isinstance(arg, Fraction):
                raise ScriptError(f"Expected a number, got {arg!r}", line, column)
            if kind == 'int':
                if arg.denominator != 1:
                    raise ScriptError(f"Expected an integer, got {arg}", line, column)
                return int(arg)
            return arg
        if kind == 'point':
            if not isinstance(arg, PointArg):
                raise ScriptError("Expected a point such as (1, 1/2)", line, column)
            return tuple(arg.values)
        if kind == 'list':
            if not isinstance(arg, ListArg):
                raise ScriptError("Expected a list such as [x, y]", line, column)
            return arg
        if not isinstance(arg, str):
            raise ScriptError(f"Expected a name, got {arg}", line, column)
        if kind == 'ident':
            return arg
        return self.lookup(arg, kind, line, column)

    def execute(self, cmd: Command) -> CommandResult:
        result = CommandResult(cmd.text, cmd.line, cmd.column)
        try:
            values = self.resolve(cmd)
            result.value = self.commands[cmd.name].handler(*values)
        except GradedCalcError as e:
            result.error = e.at(cmd.line, cmd.column)
            logger.error(f"Command '{cmd.text}' failed: {str(result.error)}")
        return result

    def _mul(self, first, second):
        if isinstance(first, Form) or isinstance(second, Form):
            return self.as_form(first) * self.as_form(second)
        return series_mul(first, second)

    @staticmethod
    def _check_point(cs: CoordinateSystem, point: Sequence[Fraction]):
        if len(point) != cs.n0:
            raise ScriptError(f"{cs.label} needs a point with {cs.n0} coordinates, got {len(point)}")

    def _taylor(self, f: GradedFunction, point, q: int):
        self._check_point(f.cs, point)
        return taylor_split(f, point, q)

    def _value(self, f: GradedFunction, point):
        self._check_point(f.cs, point)
        return value_at(f, point)

    def _differential(self, f: GradedFunction, point):
        self._check_point(f.cs, point)
        return differential_of_function(f, point)

    def _independent(self, point, *fs: GradedFunction):
        for f in fs:
            self._check_point(f.cs, point)
        return independent_at(fs, point)

    def _field_at(self, X: VectorField, point):
        self._check_point(X.cs, point)
        return vf_value_at(X, point)

    def _dmat(self, phi: DomainMorphism, point):
        self._check_point(phi.source, point)
        return differential_matrices(phi, point)

    def _rank(self, phi: DomainMorphism, point):
        self._check_point(phi.source, point)
        summary: Dict[str, Any] = {f"rank({j})": r for j, r in graded_rank(phi, point).items()}
        summary['class'] = classify(phi, point)
        return summary

    def _classify(self, phi: DomainMorphism, point):
        self._check_point(phi.source, point)
        return classify(phi, point)

    def _invert_morphism(self, phi: DomainMorphism, h: ListArg, W: Optional[int] = None):
        target = phi.target
        if len(h.items) != phi.source.n0:
            raise ScriptError(f"The underlying inverse needs {phi.source.n0} components, got {len(h.items)}")
        evaluator = self.evaluator(target)
        underlying = []
        for expr in h.items:
            g = evaluator.evaluate(expr)
            if g.degree != 0 or set(g.terms) - {target.zero_index}:
                raise DegreeError("Underlying inverse components must be ordinary functions", expr.line, expr.column)
            underlying.append(body(g))
        return invert_morphism(phi, underlying, W)

    def _homotopy(self, omega, name: str):
        form = self.as_form(omega)
        return poincare_homotopy(form, form.shifted.base.graded_index(name))

    def _ek(self, T: TransitionData, k: int):
        if any(T.fiber.degrees):
            raise DegreeError("E[k] starts from an ordinary bundle with fiber degrees 0")
        matrices = {pair: [[body(e) for e in row] for row in rows] for pair, rows in T.matrices.items()}
        return shifted_bundle_Ek(T.gluing(), matrices, k, T.fiber.rank)

    def _check_global(self, g: GlobalFunction):
        return check_global_function(self.lookup(g.atlas, 'atlas'), g)

    # whole scripts

    def check(self, script: Script) -> List[CommandResult]:
        """Declare everything and resolve command arguments without running them"""
        failures = []
        for stmt in script.statements:
            if isinstance(stmt, Command):
                continue
            try:
                self.declare(stmt)
            except GradedCalcError as e:
                keyword = type(stmt).__name__[:-len('Decl')].lower()
                failures.append(CommandResult(f"{keyword} {stmt.name}", stmt.line, stmt.column, error=e))
        for cmd in script.commands:
            try:
                self.resolve(cmd)
            except GradedCalcError as e:
                failures.append(CommandResult(cmd.text, cmd.line, cmd.column, error=e.at(cmd.line, cmd.column)))
        return failures

    def run(self, script: Script) -> List[CommandResult]:
        """Type-check the script, then run its commands in order"""
        failures = self.check(script)
        if failures:
            logger.warning(f"Script has {len(failures)} problems; no commands were run")
            return failures
        results = [self.execute(cmd) for cmd in script.commands]
        failed = sum(1 for r in results if not r.ok)
        logger.info(f"Ran {len(results)} commands, {failed} failed")
        return results


def describe(value: Any) -> str:
    names = {
        GradedFunction: 'function', DomainMorphism: 'morphism', VectorField: 'field', Form: 'form',
        TransitionData: 'bundle', GluingData: 'atlas', GlobalFunction: 'global function',
    }
    return names.get(type(value), type(value).__name__)
