#!/usr/bin/env python3
"""
Test Script for the Script Parser and Runner
This script tests parsing of calculation scripts, declaration checks and the
command loop with its positioned diagnostics.
"""

import sys
import logging
from fractions import Fraction

import pytest

from calc_errors import DegreeError, NotInvertible, ScriptError, ScriptSyntaxError
from graded_series import GradedFunction
from differential_forms import Form
from script_parser import Command, FnDecl, ListArg, PointArg, parse_script, tokenize
from script_runner import ScriptRunner
from object_codec import render_object

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('script_runner_test')

HEADER = """
domain M { even x; coord xi, eta: 1; trunc 4; }
fn f = x^2;
fn g : 1 = x*xi;
"""


def _run(body, trunc=None):
    return ScriptRunner(trunc).run(parse_script(HEADER + body))


def _lines(results):
    return [line for r in results for line in render_object(r.value)]


def test_tokenizer_positions():
    tokens = tokenize("fn f = x^2; # comment\n  d f;")
    kinds = [t.kind for t in tokens]
    assert kinds == ['ident', 'ident', '=', 'ident', '^', 'int', ';', 'ident', 'ident', ';', 'eof']
    d_token = tokens[7]
    assert (d_token.line, d_token.column) == (2, 3)
    with pytest.raises(ScriptSyntaxError) as info:
        tokenize('fn f = x $ 1;')
    assert (info.value.line, info.value.column) == (1, 10)


def test_parse_declarations_and_commands():
    script = parse_script(HEADER + "field-at X (1, -1/2);\ninvert-morphism phi [x, 2*y] 3;\n")
    assert [type(s).__name__ for s in script.declarations] == ['DomainDecl', 'FnDecl', 'FnDecl']
    g = script.declarations[2]
    assert isinstance(g, FnDecl) and g.degree == 1 and g.domain is None
    first, second = script.commands
    assert isinstance(first, Command)
    assert first.name == 'field-at'
    assert first.args[0] == 'X'
    assert isinstance(first.args[1], PointArg)
    assert first.args[1].values == [Fraction(1), Fraction(-1, 2)]
    assert first.text == 'field-at X (1, -1/2)'
    assert second.name == 'invert-morphism'
    assert isinstance(second.args[1], ListArg)
    assert len(second.args[1].items) == 2
    assert second.args[2] == Fraction(3)


@pytest.mark.parametrize('text, position, expected', [
    ('domain M { even x }', (1, 19), ["';'"]),
    ('fn f = (x + 1;', (1, 14), ["')'"]),
    ('fn = x;', (1, 4), ['function name']),
    ('domain M { odd y; }', (1, 12), ["'even'", "'coord'", "'trunc'", "'shift'", "'}'"]),
])
def test_syntax_errors_are_positioned(text, position, expected):
    with pytest.raises(ScriptSyntaxError) as info:
        parse_script(text)
    assert (info.value.line, info.value.column) == position
    assert info.value.expected == expected


def test_commands_produce_canonical_results():
    results = _run("d f;\nmul f g;\npartial g xi;\nvalue f (3);\nbody g;\n")
    assert all(r.ok for r in results)
    assert [r.command for r in results] == ['d f', 'mul f g', 'partial g xi', 'value f (3)', 'body g']
    assert isinstance(results[0].value, Form)
    assert _lines(results) == ['2*x * dx', 'x^3 * xi', 'x', '9', '0']


def test_declared_degree_must_match():
    results = _run("fn h : 1 = xi*eta;\nd f;\n")
    assert len(results) == 1
    error = results[0].error
    assert isinstance(error, DegreeError)
    assert results[0].command == 'fn h'
    assert error.line == 5


def test_argument_checks_stop_the_script():
    results = _run("bracket f f;\nfoo f;\npartial nothing x;\n")
    assert [type(r.error) for r in results] == [ScriptError, ScriptError, ScriptError]
    assert 'expected a field' in results[0].error.message
    assert "Unknown command 'foo'" in results[1].error.message
    assert (results[2].error.line, results[2].error.column) == (7, 9)


def test_runtime_errors_do_not_stop_later_commands():
    results = _run("invert g;\nmul g g;\n")
    assert isinstance(results[0].error, NotInvertible)
    assert (results[0].error.line, results[0].error.column) == (5, 1)
    assert results[1].ok
    assert results[1].value.is_zero()


def test_names_are_declared_once():
    results = _run("fn f = x;\n")
    assert isinstance(results[0].error, ScriptError)
    assert 'already declared' in results[0].error.message


def test_runner_truncation_default():
    runner = ScriptRunner(3)
    runner.run(parse_script("domain N { even x; coord u: 2; coord b: -2; }\nfn f = 1 + u*b;\ninvert f;\n"))
    assert runner.domains['N'].system.trunc == 3
    assert isinstance(runner.objects['f'], GradedFunction)


def test_check_resolves_without_running():
    runner = ScriptRunner()
    failures = runner.check(parse_script(HEADER + "invert g;\nrank g (0);\n"))
    assert len(failures) == 1
    assert failures[0].command == 'rank g (0)'
    assert 'expected a morphism' in failures[0].error.message


def test_morphism_declaration_checks():
    results = _run("morphism phi : M -> M { x = 2*x; xi = xi; }\n")
    assert isinstance(results[0].error, ScriptError)
    assert 'does not assign eta' in results[0].error.message
    results = _run("morphism phi : M -> M { x = 2*x; xi = xi; eta = eta; zeta = xi; }\n")
    assert "'zeta' is not a coordinate" in results[0].error.message


def main():
    """Main function"""
    return pytest.main([__file__, '-q'])


if __name__ == "__main__":
    sys.exit(main())
