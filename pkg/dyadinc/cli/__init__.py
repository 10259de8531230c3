import argparse
import json
import logging
import sys

import yaml
from schematics.exceptions import BaseError

from ..entities.objects import ExperimentConfig
from ..enums import Command
from .constants import EXIT_ASSERTION, EXIT_CONFIG, EXIT_OK
from .exceptions import CommandFailure, ConfigError
from .handlers import handle

logger = logging.getLogger(__name__)


def build_parser():
    parser = argparse.ArgumentParser(prog='dyadinc', description='Discretized incidence experiments at dyadic scales.')
    parser.add_argument('command', choices=[command.name for command in Command])
    parser.add_argument('--config', help='YAML experiment file; flags override its values.')
    parser.add_argument('--kind', help='Generator kind.')
    parser.add_argument('--scale', type=int, help='Exponent k of δ = 2^-k.')
    parser.add_argument('--s', help='Dimension parameter, as a decimal or fraction.')
    parser.add_argument('--t', help='Second dimension parameter.')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--dimension', type=int, choices=[1, 2])
    parser.add_argument('--sweep', type=int, nargs='+', help='Scale exponents to sweep.')
    parser.add_argument('--seeds', type=int, nargs='+')
    parser.add_argument('--coarse', type=int, help='Exponent of the coarse scale Δ.')
    parser.add_argument('--epsilon')
    parser.add_argument('--epsilon-good')
    parser.add_argument('--budget', action='append', default=[], metavar='NAME=VALUE')
    parser.add_argument('--option', action='append', default=[], metavar='KEY=VALUE', help='Generator option.')
    parser.add_argument('--output', help='Output directory.')
    parser.add_argument('--verbose', '-v', action='store_true')
    return parser


def _pairs(values: list):
    pairs = {}
    for value in values:
        key, sep, item = value.partition('=')
        if not sep or not key:
            raise ConfigError('expected KEY=VALUE, got {!r}'.format(value))
        pairs[key] = item
    return pairs


def load_experiment(args):
    """Merge the YAML file named by --config with the command-line flags.

    Returns

        experiment : `dyadinc.entities.ExperimentConfig`
            The validated experiment.
    """

    data = {}
    if args.config:
        try:
            with open(args.config) as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as ex:
            raise ConfigError(ex)
        if not isinstance(data, dict):
            raise ConfigError('{} does not hold a mapping'.format(args.config))
    data['command'] = args.command

    generator = dict(data.get('generator') or {})
    for key, value in [
            ('kind', args.kind),
            ('scale_exponent', args.scale),
            ('s', args.s),
            ('t', args.t),
            ('seed', args.seed),
            ('dimension', args.dimension)]:
        if value is not None:
            generator[key] = value
    if args.option:
        generator['options'] = dict(generator.get('options') or {}, **_pairs(args.option))
    if generator:
        data['generator'] = generator

    for key, value in [
            ('sweep', args.sweep),
            ('seeds', args.seeds),
            ('coarse_exponent', args.coarse),
            ('epsilon', args.epsilon),
            ('epsilon_good', args.epsilon_good),
            ('output', args.output)]:
        if value is not None:
            data[key] = value
    if args.budget:
        budgets = dict(data.get('budgets') or {})
        for key, value in _pairs(args.budget).items():
            try:
                budgets[key] = int(value)
            except ValueError:
                raise ConfigError('budget {} is not an integer: {!r}'.format(key, value))
        data['budgets'] = budgets

    try:
        experiment = ExperimentConfig(data)
        experiment.validate()
    except BaseError as ex:
        raise ConfigError(ex.to_primitive() if hasattr(ex, 'to_primitive') else str(ex))
    return experiment


def main(argv: list = None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(name)s %(levelname)s %(message)s')
    try:
        experiment = load_experiment(args)
        logger.info('Running %s into %s', experiment.command, experiment.output)
        handle(experiment)
    except ConfigError as ex:
        logger.error(ex.message)
        sys.stderr.write(json.dumps({'error': 'ConfigError', 'message': ex.message}, default=repr) + '\n')
        return EXIT_CONFIG
    except CommandFailure as ex:
        logger.error('%s failed: %s', ex.command, ex.message)
        sys.stderr.write(json.dumps(ex.to_primitive(), default=repr) + '\n')
        return EXIT_ASSERTION
    return EXIT_OK
