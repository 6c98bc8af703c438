#!/usr/bin/env python3
"""
Test Script for the Graded Calculus Tool
This script runs the example scripts under scripts/ through the tool and
compares the canonical text against the recorded .out files. It also tests
the JSON document, the configuration layer and the check-only mode.
"""

import os
import sys
import json
import glob
import logging

import pytest

from gradedcalc import DEFAULT_CONFIG_FILE, GradedCalcTool
from object_codec import object_from_json

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('cli_scripts_test')

SCRIPT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'scripts')
SCRIPTS = sorted(glob.glob(os.path.join(SCRIPT_DIR, '*.gcs')))

SAMPLE = """domain D { even x; coord xi : 1; coord eta : 1; }
fn f = x^2 + x*xi*eta;
fn g = 1/x;
d f;
value g (0);
"""


def _contains_in_order(actual, expected):
    position = 0
    for line in expected:
        try:
            position = actual.index(line, position) + 1
        except ValueError:
            return False
    return True


@pytest.fixture
def tool(monkeypatch):
    monkeypatch.delenv('GRADEDCALC_TRUNC', raising=False)
    return GradedCalcTool(DEFAULT_CONFIG_FILE, trunc=8)


def test_scripts_are_present():
    assert len(SCRIPTS) >= 20


@pytest.mark.parametrize('path', SCRIPTS, ids=[os.path.basename(p) for p in SCRIPTS])
def test_script_output_matches_recording(tool, path):
    text = tool.read_script(path)
    with open(path[:-len('.gcs')] + '.out', 'r', encoding='utf-8') as f:
        expected = [line for line in f.read().splitlines() if line.strip()]
    actual = tool.format_text(tool.run_text(text)).splitlines()
    logger.info(f"{os.path.basename(path)}: {len(actual)} lines")
    assert _contains_in_order(actual, expected), '\n'.join(actual)


def test_json_document(tool):
    results = tool.run_text(SAMPLE)
    doc = json.loads(tool.format_json(results))
    assert doc['schema'] == 1
    first, second = doc['results']
    assert first == {'command': 'd f', 'line': 4, 'ok': True, 'result': first['result']}
    assert first['result']['type'] == 'form'
    assert object_from_json(first['result']).agrees_with(results[0].value)
    assert second['ok'] is False
    assert second['error']['kind'] == 'EvalPole'
    assert (second['error']['line'], second['error']['column']) == (5, 1)
    assert second['error']['expected'] == []


def test_json_syntax_error_lists_expected_tokens(tool):
    doc = json.loads(tool.format_json(tool.run_text("fn f = (x + 1;\n")))
    entry, = doc['results']
    assert entry['command'] == 'parse'
    assert entry['error']['kind'] == 'ScriptSyntaxError'
    assert entry['error']['expected'] == ["')'"]


def test_check_only_runs_nothing(tool):
    assert tool.run_text(SAMPLE, check_only=True) == []
    failures = tool.run_text(SAMPLE + "apply f f;\n", check_only=True)
    assert [r.command for r in failures] == ['apply f f']


def test_config_merges_with_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv('GRADEDCALC_TRUNC', raising=False)
    config_file = tmp_path / 'config.json'
    config_file.write_text(json.dumps({'truncation': {'default_weight': 5}, 'extra': {'flag': True}}))
    tool = GradedCalcTool(str(config_file))
    assert tool.config['truncation']['default_weight'] == 5
    assert tool.config['output']['json_indent'] == 2
    assert tool.config['extra'] == {'flag': True}
    assert tool.trunc == 5


def test_missing_or_broken_config_falls_back(tmp_path, monkeypatch):
    monkeypatch.delenv('GRADEDCALC_TRUNC', raising=False)
    broken = tmp_path / 'broken.json'
    broken.write_text('{not json')
    assert GradedCalcTool(str(broken)).trunc == 8
    assert GradedCalcTool(str(tmp_path / 'absent.json')).trunc == 8


def test_truncation_precedence(tmp_path, monkeypatch):
    config_file = tmp_path / 'config.json'
    config_file.write_text(json.dumps({'truncation': {'default_weight': 5}}))
    monkeypatch.setenv('GRADEDCALC_TRUNC', '6')
    assert GradedCalcTool(str(config_file)).trunc == 6
    assert GradedCalcTool(str(config_file), trunc=3).trunc == 3
    monkeypatch.setenv('GRADEDCALC_TRUNC', 'many')
    assert GradedCalcTool(str(config_file)).trunc == 5


def test_runner_uses_tool_truncation(monkeypatch):
    monkeypatch.delenv('GRADEDCALC_TRUNC', raising=False)
    tool = GradedCalcTool(DEFAULT_CONFIG_FILE, trunc=2)
    results = tool.run_text("domain N { even x; coord u : 2; coord b : -2; }\nfn f = 1 + u*b;\ninvert f;\n")
    assert tool.format_text(results).splitlines() == ["> invert f", "1 - u*b"]


def main():
    """Main function"""
    return pytest.main([__file__, '-q'])


if __name__ == "__main__":
    sys.exit(main())
