#!/usr/bin/env python3
"""
Graded Calculus Tool - Main Integration Module
This module loads the configuration, reads calculation scripts and runs them,
printing canonical text or a JSON document.
"""

import os
import sys
import json
import logging
import argparse
from typing import Any, Dict, List, Optional

from calc_errors import ScriptSyntaxError
from graded_degrees import DEFAULT_TRUNC
from object_codec import document, object_to_json, render_object
from script_parser import parse_script
from script_runner import CommandResult, ScriptRunner

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('gradedcalc')

DEFAULT_CONFIG_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'config.json')


class GradedCalcTool:
    """Main class tying together the parser, the runner and the output codecs"""

    def __init__(self, config_file: Optional[str] = None, trunc: Optional[int] = None):
        """
        Initialize the tool

        Args:
            config_file: Optional path to configuration file
            trunc: Truncation weight from the command line, if given
        """
        self.config = self._load_config(config_file)
        self.trunc = self._resolve_trunc(trunc)
        level = self.config['logging'].get('level', 'INFO')
        logging.getLogger().setLevel(getattr(logging, str(level).upper(), logging.INFO))

    def _load_config(self, config_file: Optional[str]) -> Dict[str, Dict[str, Any]]:
        """
        Load configuration from file

        Args:
            config_file: Path to configuration file

        Returns:
            Configuration dictionary
        """
        default_config = {
            'truncation': {
                'default_weight': DEFAULT_TRUNC
            },
            'output': {
                'json_indent': 2
            },
            'logging': {
                'level': 'INFO'
            }
        }

        if config_file and os.path.exists(config_file):
            try:
                with open(config_file, 'r') as f:
                    user_config = json.load(f)

                # Merge user config with default config
                for section, values in user_config.items():
                    if section in default_config:
                        default_config[section].update(values)
                    else:
                        default_config[section] = values

                logger.info(f"Loaded configuration from {config_file}")
            except Exception as e:
                logger.error(f"Error loading configuration: {str(e)}")

        return default_config

    def _resolve_trunc(self, trunc: Optional[int]) -> int:
        """Command line, then GRADEDCALC_TRUNC, then the config file"""
        if trunc is not None:
            return trunc
        env = os.environ.get('GRADEDCALC_TRUNC')
        if env:
            try:
                return int(env)
            except ValueError:
                logger.warning(f"Ignoring non-integer GRADEDCALC_TRUNC={env!r}")
        return int(self.config['truncation']['default_weight'])

    def read_script(self, path: str) -> str:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()

    def run_text(self, text: str, check_only: bool = False) -> List[CommandResult]:
        """
        Parse and run (or only check) one script

        Args:
            text: Script source
            check_only: Stop after declarations and argument checks

        Returns:
            One result per command, or the diagnostics that stopped the script
        """
        try:
            script = parse_script(text)
        except ScriptSyntaxError as e:
            logger.error(f"Syntax error: {str(e)}")
            return [CommandResult('parse', e.line, e.column, error=e)]
        logger.info(f"Parsed script with {len(script.statements)} statements")
        runner = ScriptRunner(self.trunc)
        if check_only:
            return runner.check(script)
        return runner.run(script)

    @staticmethod
    def format_text(results: List[CommandResult]) -> str:
        lines = []
        for result in results:
            lines.append(f"> {result.command}")
            if result.ok:
                lines.extend(render_object(result.value))
            else:
                lines.append(f"error [{result.error.kind}] {str(result.error)}")
        return '\n'.join(lines)

    def format_json(self, results: List[CommandResult]) -> str:
        entries = []
        for result in results:
            entry: Dict[str, Any] = {'command': result.command, 'line': result.line, 'ok': result.ok}
            if result.ok:
                entry['result'] = object_to_json(result.value)
            else:
                error = result.error
                entry['error'] = {
                    'kind': error.kind,
                    'message': error.message,
                    'line': error.line,
                    'column': error.column,
                    'expected': getattr(error, 'expected', []),
                }
            entries.append(entry)
        return json.dumps(document(entries), indent=self.config['output']['json_indent'])


def main():
    """Main function"""
    parser = argparse.ArgumentParser(description='Exact calculus on graded domains, bundles and atlases')
    parser.add_argument('--config', default=DEFAULT_CONFIG_FILE, help='Path to configuration file')
    parser.add_argument('--verbose', action='store_true', help='Log at DEBUG level')
    subparsers = parser.add_subparsers(dest='action', required=True)

    run_parser = subparsers.add_parser('run', help='Run a calculation script')
    run_parser.add_argument('script', help='Path to the script')
    run_parser.add_argument('--json', action='store_true', help='Print a JSON document')
    run_parser.add_argument('--trunc', type=int, help='Default truncation weight')

    check_parser = subparsers.add_parser('check', help='Parse and type-check a script without running it')
    check_parser.add_argument('script', help='Path to the script')
    check_parser.add_argument('--trunc', type=int, help='Default truncation weight')

    args = parser.parse_args()

    tool = GradedCalcTool(args.config, args.trunc)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        text = tool.read_script(args.script)
    except OSError as e:
        logger.error(f"Cannot read script: {str(e)}")
        sys.exit(2)

    results = tool.run_text(text, check_only=args.action == 'check')
    if args.action == 'check':
        for result in results:
            print(f"error [{result.error.kind}] {str(result.error)}")
        if not results:
            print("OK")
    elif args.json:
        print(tool.format_json(results))
    else:
        print(tool.format_text(results))

    if any(not r.ok for r in results):
        sys.exit(1)


if __name__ == "__main__":
    main()
