import csv
import json
import logging
import math
from collections import Counter
from fractions import Fraction
from importlib import import_module
from pathlib import Path

from .. import config, deltaset, dyadic, generators, incidence, multiscale, projections, refine, tubes
from ..dyadic import Scale
from ..entities.objects import ExperimentConfig, GeneratorSpec
from ..enums import Command, Convention
from ..exponents import s_proxy
from ..incidence import NiceConfiguration
from .constants import *
from .exceptions import CommandFailure, ConfigError

logger = logging.getLogger(__name__)

COMMAND_MAPPINGS = {
    Command.gen: 'handle_gen',
    Command.certify: 'handle_certify',
    Command.incidence: 'handle_incidence',
    Command.refine: 'handle_refine',
    Command.decompose: 'handle_decompose',
    Command.uniformize: 'handle_uniformize',
    Command.project: 'handle_project',
    Command.suite: 'handle_suite'
}

# Errors raised by a post-condition check; a run stopping on one exits with EXIT_ASSERTION.
ASSERTION_ERRORS = (
    deltaset.CertificateInvariantError,
    deltaset.CertificateBudgetError,
    deltaset.NotDeltaSetError,
    tubes.RescaleCoverError,
    tubes.SlopeFiberError,
    tubes.SlopeSpreadError,
    tubes.TubeMissError,
    tubes.DualityError,
    incidence.InvalidConfigurationError,
    incidence.IncidenceBoundError,
    incidence.TubeLowerBoundError,
    incidence.MissingTubeError,
    refine.EmptyBucketError,
    refine.RefinementAssertionError,
    refine.MissingRepresentativeError,
    multiscale.NonUniformError,
    multiscale.KaufmanHypothesisError,
    multiscale.LeftoverBoundError,
    multiscale.DecompositionError,
    multiscale.ScaleClassError,
    multiscale.UniformizationBoundError,
    multiscale.ContainmentError,
    projections.DirectionBoundError,
    projections.ProductStructureError,
    projections.DirectionCertificateError,
    generators.CertificateBudgetError,
    generators.DimensionProxyError)

CONFIG_ERRORS = (
    generators.InfeasibleBranchingError,
    incidence.ExponentRangeError,
    multiscale.ScaleListError,
    multiscale.IntervalError,
    dyadic.FamilyFormatError,
    ValueError,
    KeyError,
    ZeroDivisionError)


def handle(experiment: ExperimentConfig):
    """Run the command an experiment names and write its summary.

    Returns

        summary : `dict`
            The JSON summary also written to `summary.json`.
    """

    output = Path(experiment.output)
    output.mkdir(parents=True, exist_ok=True)
    try:
        summary = getattr(
            import_module(__name__),
            COMMAND_MAPPINGS[Command[experiment.command]])(experiment, output)
    except (ConfigError, CommandFailure):
        raise
    except ASSERTION_ERRORS as ex:
        raise CommandFailure(experiment.command, ex)
    except CONFIG_ERRORS as ex:
        raise ConfigError(getattr(ex, 'message', str(ex)))
    summary['command'] = experiment.command
    write_json(output / SUMMARY_FILE, summary)
    return summary


def write_csv(path: Path, columns: list, rows: list):
    """Write rows in canonical order so reruns produce identical files."""

    ordered = sorted(([row[column] for column in columns] for row in rows), key=lambda values: [str(v) for v in values])
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for values in ordered:
            writer.writerow(values)
    logger.debug('Wrote %i rows to %s', len(ordered), path)


def write_json(path: Path, data):
    with open(path, 'w') as f:
        f.write(json.dumps(data, sort_keys=True, indent=2, default=str))
        f.write('\n')


def specs(experiment: ExperimentConfig):
    """One generator spec per sweep point and seed."""

    if experiment.generator is None:
        raise ConfigError('command {} needs a generator'.format(experiment.command))
    base = experiment.generator
    for k in experiment.sweep or [base.scale_exponent]:
        for seed in experiment.seeds or [base.seed]:
            data = base.to_primitive()
            data.update({'scale_exponent': k, 'seed': seed})
            yield GeneratorSpec(data)


def split(result):
    """(squares, tubes or None) out of any generator result."""

    if not isinstance(result, tuple):
        return result, None
    first, second = result[0], result[1]
    if isinstance(first, NiceConfiguration):
        return first.P, second
    return first, second


def _furstenberg(spec: GeneratorSpec):
    if spec.kind != 'furstenberg':
        raise ConfigError('this command needs a furstenberg generator, got {}'.format(spec.kind))
    return generators.generate(spec)


def _coarse(experiment: ExperimentConfig, spec: GeneratorSpec):
    return Scale(experiment.coarse_exponent if experiment.coarse_exponent is not None else spec.scale_exponent // 2)


def _stem(spec: GeneratorSpec):
    return '{}_{}_{}'.format(spec.kind, spec.scale_exponent, spec.seed)


def handle_gen(experiment: ExperimentConfig, output: Path):
    rows = []
    for spec in specs(experiment):
        family, family_tubes = split(generators.generate(spec))
        (output / '{}.{}'.format(_stem(spec), FAMILY_FILE)).write_text(dyadic.dumps(family))
        if family_tubes is not None:
            (output / '{}.{}'.format(_stem(spec), TUBES_FILE)).write_text(tubes.dumps(family_tubes))
        rows.append({
            'kind': spec.kind,
            'delta': spec.scale_exponent,
            'seed': spec.seed,
            'count': len(family),
            'dimension_proxy': round(generators.dimension_proxy(family), 6)})
    write_csv(output / 'gen.csv', GEN_COLUMNS, rows)
    return {'families': len(rows)}


def handle_certify(experiment: ExperimentConfig, output: Path):
    rows = []
    for spec in specs(experiment):
        family, _ = split(generators.generate(spec))
        s = s_proxy(Fraction(spec.s))
        certificate = deltaset.spread_certificate(family, s)
        half, K = '', ''
        if family.scale.k % 2 == 0:
            regularity = deltaset.regularity_certificate(family, s)
            half, K = regularity.half_count, float(regularity.K)
        rows.append({
            'delta': spec.scale_exponent,
            's': str(s),
            'seed': spec.seed,
            'C': float(certificate.constant()),
            'witness_k': certificate.witness.k,
            'witness_ix': certificate.witness.ix,
            'witness_iy': '' if certificate.witness.iy is None else certificate.witness.iy,
            'count': certificate.count,
            'total': certificate.total,
            'half_count': half,
            'K': K})
    write_csv(output / 'certify.csv', CERTIFY_COLUMNS, rows)
    return {'certificates': len(rows), 'largest_C': max(row['C'] for row in rows)}


def handle_incidence(experiment: ExperimentConfig, output: Path):
    budget = experiment.budgets.get('incidence', config.INCIDENCE_LOG_BUDGET)
    rows, lower = [], []
    for spec in specs(experiment):
        configuration, family_tubes = _furstenberg(spec)
        t = Fraction(spec.t or spec.s)
        rows.append(incidence.incidence_report_row(configuration, family_tubes, t, budget).to_primitive())
        lower.append(incidence.check_tube_lower_bound(configuration, family_tubes, t, budget))
    write_csv(output / 'incidence.csv', INCIDENCE_COLUMNS, rows)
    return {'rows': len(rows), 'worst_ratio': max(row['ratio'] for row in rows), 'lower_bound_ratios': lower}


def handle_refine(experiment: ExperimentConfig, output: Path):
    rows = []
    for spec in specs(experiment):
        configuration, _ = _furstenberg(spec)
        coarse = _coarse(experiment, spec)
        thick = refine.thick_tube_refine(configuration, coarse)
        induction = refine.induction_on_scales(configuration, coarse)
        write_json(output / ('refine_' + _stem(spec) + TRACE_SUFFIX), {
            'thick': thick.trace.to_primitive(),
            'induction': induction.trace.to_primitive(),
            'product_bound': multiscale.measured_product_bound(configuration, [coarse])})
        rows.append({
            'delta': spec.scale_exponent,
            'coarse': coarse.k,
            'seed': spec.seed,
            'P_count': len(configuration.P),
            'P_bar_count': len(thick.P_bar),
            'T_Delta_count': len(thick.T_Delta),
            'H': thick.H,
            'C2': float(thick.C2),
            'refined_count': len(induction.P),
            'budget': float(induction.budget),
            'budget_limit': induction.trace.budget_limit})
    write_csv(output / 'refine.csv', REFINE_COLUMNS, rows)
    return {'runs': len(rows), 'largest_budget': max(row['budget'] for row in rows)}


def handle_decompose(experiment: ExperimentConfig, output: Path):
    epsilon = Fraction(experiment.epsilon)
    epsilon_good = Fraction(experiment.epsilon_good)
    base = Scale(config.CANTOR_BASE_EXPONENT)
    rows, good = [], {}
    for spec in specs(experiment):
        family, _ = split(generators.generate(spec))
        t = s_proxy(Fraction(spec.s))
        s = Fraction((spec.options or {}).get('floor', t - Fraction(DECOMPOSE_SLOPE_GAP)))
        decomposition = multiscale.multiscale_decompose(family, s, t, base, epsilon)
        classes, good_exponent = multiscale.classify_scales(decomposition, t, epsilon_good)
        record = decomposition.to_record().to_primitive()
        record['good_exponent'] = str(good_exponent)
        write_json(output / ('decompose_' + _stem(spec) + TRACE_SUFFIX), record)
        good[_stem(spec)] = float(good_exponent)
        for j, kind in classes.items():
            rows.append({
                'delta': spec.scale_exponent,
                'seed': spec.seed,
                'j': j,
                'start': decomposition.scales[j - 1],
                'end': decomposition.scales[j],
                'kind': kind.name,
                'exponent': str(decomposition.exponents.get(j, ''))})
    write_csv(output / 'decompose.csv', DECOMPOSE_COLUMNS, rows)
    return {'windows': len(rows), 'good_exponents': good}


def handle_uniformize(experiment: ExperimentConfig, output: Path):
    rows = []
    for spec in specs(experiment):
        family, _ = split(generators.generate(spec))
        k = family.scale.k
        levels = (spec.options or {}).get('levels')
        for n in [int(v) for v in levels.split(',')] if levels else UNIFORMIZE_LEVELS:
            if not 1 <= n <= k:
                continue
            scales = [math.floor(i * k / n) for i in range(1, n + 1)]
            uniform, numbers = multiscale.uniformize(family, scales)
            # Re-read the branching numbers from P′ itself.
            if multiscale.branching_numbers(uniform, scales) != numbers:
                raise multiscale.NonUniformError(k, numbers, None)
            rows.append({
                'delta': k,
                'seed': spec.seed,
                'n': n,
                'P_count': len(family),
                'uniform_count': len(uniform),
                'numbers': '-'.join(str(N) for N in numbers)})
    write_csv(output / 'uniformize.csv', UNIFORMIZE_COLUMNS, rows)
    return {'runs': len(rows)}


def _popular_thick_tube(family_tubes, coarse: Scale):
    counts = Counter(T.ancestor(coarse) for T in family_tubes)
    return min(counts, key=lambda T: (-counts[T], T.sort_key()))


def handle_project(experiment: ExperimentConfig, output: Path):
    summary = {}
    rows = []
    for spec in specs(experiment):
        result = generators.generate(spec)
        family, family_tubes = split(result)
        coarse = _coarse(experiment, spec)
        s = s_proxy(Fraction(spec.s))
        n = 2 ** coarse.k
        slopes = [Fraction(i, n) for i in range(-n, n)]
        selected, energies = projections.good_directions(family, slopes, s)
        rows.extend(row.to_primitive() for row in projections.energy_rows(energies, selected))
        entry = {
            'selected': len(selected),
            'slopes': len(slopes),
            'counter_assumption': projections.counter_assumption_report(family, selected, s)}
        if isinstance(result, tuple) and isinstance(result[0], NiceConfiguration) \
                and family_tubes.convention == Convention.appendix and family.scale.k == 2 * coarse.k:
            T0 = _popular_thick_tube(family_tubes, coarse)
            structure = projections.product_structure(T0, result[0])
            entry['product_structure'] = structure.report(s)
        summary[_stem(spec)] = entry
    write_csv(output / 'energy.csv', ENERGY_COLUMNS, rows)
    return summary


def _check_duality(output: Path):
    return {'pairs': tubes.duality_check(Scale(SUITE_DUALITY_EXPONENT))}


def _check_fibers(output: Path):
    return {str(k): tubes.fiber_check(Scale(k)) for k in SUITE_FIBER_EXPONENTS}


def _check_target(output: Path):
    K, lines, _ = generators.cantor_target(Scale(SUITE_TARGET_EXPONENT), Fraction(1, 2))
    (output / 'cantor_target.{}'.format(FAMILY_FILE)).write_text(dyadic.dumps(K))
    return {'squares': len(K), 'lines': len(lines), 'dimension_proxy': generators.check_dimension(K, 1)}


def _check_kaufman(output: Path):
    splits = {}
    for m in SUITE_ROOF_LENGTHS:
        for s in ('1/4', '1/2', '3/4'):
            splits['{}_{}'.format(m, s)] = str(multiscale.check_roof(m, Fraction(s)))
    s, t, epsilon = Fraction(1, 2), Fraction(1), Fraction(1, 8)
    windows = 0
    for seed in range(SUITE_KAUFMAN_INPUTS):
        f = generators.random_branching_function(SUITE_KAUFMAN_LENGTH, t, epsilon, seed)
        windows += multiscale.verify_tags(f, multiscale.kaufman_decompose(f, s, t, epsilon).intervals, s, epsilon)
    return {'roof_splits': splits, 'random_inputs': SUITE_KAUFMAN_INPUTS, 'windows': windows}


def _check_directions(output: Path):
    family = generators.product_set(Scale(SUITE_DIRECTION_EXPONENT), Fraction(1, 2), Fraction(1, 2))
    n = 2 ** (SUITE_DIRECTION_EXPONENT // 2)
    rows, passed = projections.direction_certificates(family, [Fraction(i, n) for i in range(-n, n)], Fraction(1, 2))
    write_json(output / 'directions.json', rows)
    return {'directions': len(rows), 'passed': str(passed)}


def _check_determinism(output: Path):
    """Run the same small experiments twice and require byte-identical CSV output."""

    experiments = [
        {'command': 'incidence', 'seeds': [0, 1],
         'generator': {'kind': 'furstenberg', 'scale_exponent': 6, 's': '1/2', 't': '1'}},
        {'command': 'uniformize', 'seeds': [0, 1],
         'generator': {'kind': 'random_frostman', 'scale_exponent': 6, 's': '1'}}]
    compared = 0
    for data in experiments:
        runs = []
        for attempt in ('first', 'second'):
            target = output / data['command'] / attempt
            handle(ExperimentConfig(dict(data, output=str(target))))
            runs.append({path.name: path.read_bytes() for path in sorted(target.glob('*.csv'))})
        if runs[0] != runs[1]:
            raise DeterminismError(data['command'], sorted(name for name in runs[0] if runs[0][name] != runs[1].get(name)))
        compared += len(runs[0])
    return {'compared': compared}


def _battery():
    """The acceptance battery run by `suite`: experiment configs and check functions."""

    seeds = list(range(SUITE_SEED_COUNT))
    battery = [
        ('certify_full_grid', {'command': 'certify', 'generator': {'kind': 'cantor', 'scale_exponent': 4, 's': '2'}}),
        ('duality', _check_duality),
        ('slope_fibers', _check_fibers)]
    for s, t, construction in SUITE_INCIDENCE_EXPONENTS:
        battery.append(('incidence_{}_{}_{}'.format(s.replace('/', '_'), t.replace('/', '_'), construction), {
            'command': 'incidence',
            'sweep': SUITE_INCIDENCE_SCALES,
            'seeds': seeds,
            'generator': {'kind': 'furstenberg', 'scale_exponent': SUITE_INCIDENCE_SCALES[0], 's': s, 't': t,
                          'options': {'construction': construction}}}))
    battery.extend([
        ('cantor_target', _check_target),
        ('refine', {'command': 'refine', 'coarse_exponent': 4,
                    'generator': {'kind': 'furstenberg', 'scale_exponent': 8, 's': '1/2', 't': '1'}}),
        ('uniformize', {'command': 'uniformize', 'seeds': list(range(SUITE_UNIFORMIZE_SETS)),
                        'generator': {'kind': 'random_frostman', 'scale_exponent': 8, 's': '1'}}),
        ('kaufman', _check_kaufman),
        ('directions', _check_directions),
        ('product_structure', {'command': 'project', 'coarse_exponent': 4,
                               'generator': {'kind': 'furstenberg', 'scale_exponent': 8, 's': '1/2', 't': '1',
                                             'options': {'convention': 'appendix'}}})])
    for t in ('3/5', '1', '7/5'):
        battery.append(('decompose_{}'.format(t.replace('/', '_')), {
            'command': 'decompose',
            'epsilon': '1/8',
            'generator': {'kind': 'cantor', 'scale_exponent': 16, 's': t}}))
    battery.append(('determinism', _check_determinism))
    return battery


def _run(name: str, data, output: Path):
    if not callable(data):
        return handle(ExperimentConfig(dict(data, output=str(output / name))))
    target = output / name
    target.mkdir(parents=True, exist_ok=True)
    try:
        summary = data(target)
    except ASSERTION_ERRORS + (DeterminismError,) as ex:
        raise CommandFailure(name, ex)
    except CONFIG_ERRORS as ex:
        raise ConfigError(getattr(ex, 'message', str(ex)))
    write_json(target / SUMMARY_FILE, summary)
    return summary


def handle_suite(experiment: ExperimentConfig, output: Path):
    rows = []
    for name, data in _battery():
        try:
            summary = _run(name, data, output)
            rows.append({'check': name, 'status': 'pass', 'detail': json.dumps(summary, sort_keys=True, default=str)})
        except (CommandFailure, ConfigError) as ex:
            logger.warning('Suite check %s failed: %s', name, ex.message)
            rows.append({'check': name, 'status': 'fail', 'detail': ex.message})
    write_csv(output / 'suite.csv', SUITE_COLUMNS, rows)
    failed = [row['check'] for row in rows if row['status'] == 'fail']
    if failed:
        raise CommandFailure('suite', SuiteError(failed))
    return {'checks': len(rows)}


class SuiteError(Exception):
    def __init__(self, failed):
        self.witness = failed
        self.message = 'Suite checks failed: {}'.format(', '.join(failed))
        super().__init__(self.message)


class DeterminismError(Exception):
    def __init__(self, command, files):
        self.witness = files
        self.message = 'Rerunning {} changed {}.'.format(command, ', '.join(files) or 'the set of output files')
        super().__init__(self.message)
