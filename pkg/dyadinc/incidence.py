import logging
import math
from collections import Counter
from fractions import Fraction

from . import config
from .deltaset import spread_certificate
from .dyadic import Scale, SquareFamily
from .entities.objects import IncidenceRow, NiceReport
from .exponents import Monomial, s_proxy
from .tubes import TubeFamily, tube_meets_square

logger = logging.getLogger(__name__)


class NiceConfiguration(object):
    """A (δ,s,C,M)-nice configuration: squares 𝒫 each carrying M incident tubes 𝒯(p).

    Properties

        scale : `dyadinc.dyadic.Scale`
            The scale δ.
        s : `Fraction`
            Non-concentration exponent of the tube families.
        C : `dyadinc.exponents.Monomial`
            Spread constant every 𝒯(p) must respect.
        M : `int`
            Common size of the 𝒯(p).
        P : `dyadinc.dyadic.SquareFamily`
            The squares.
        assignment : `dict[dyadinc.dyadic.DyadicSquare, dyadinc.tubes.TubeFamily]`
            The tube family of every square.

    Methods

        tubes : `dyadinc.tubes.TubeFamily`
            The union of every 𝒯(p).
        restrict : `dyadinc.incidence.NiceConfiguration`
            The configuration over a subfamily of squares.
    """

    def __init__(self, scale: Scale, s, C, M: int, P: SquareFamily, assignment: dict):
        if M < 1:
            raise InvalidConfigurationError('M must be at least 1, got {}'.format(M))
        self.scale = scale
        self.s = s_proxy(s)
        self.C = C if isinstance(C, Monomial) else Monomial(Fraction(C))
        self.M = M
        self.P = P
        self.assignment = dict(assignment)

    def __repr__(self):
        return 'NiceConfiguration(2^-{}, s={}, C={}, M={}, |P|={})'.format(self.scale.k, self.s, float(self.C), self.M, len(self.P))

    def tubes(self):
        convention = None
        members = []
        for p in self.P:
            family = self.assignment.get(p)
            if family is None:
                continue
            convention = family.convention
            members.extend(family)
        return TubeFamily(self.scale, members, convention)

    def restrict(self, squares):
        squares = list(squares)
        return NiceConfiguration(self.scale, self.s, self.C, self.M, self.P.derive(squares), {p: self.assignment[p] for p in squares})


class IncidenceCount(object):
    """|ℐ(𝒫,𝒯)| with its per-tube histogram.

    Properties

        total : `int`
            Number of incident pairs.
        histogram : `collections.Counter`
            Tube to number of squares listing it.
    """

    def __init__(self, histogram: Counter):
        self.histogram = histogram
        self.total = sum(histogram.values())

    def __repr__(self):
        return 'IncidenceCount(total={}, tubes={})'.format(self.total, len(self.histogram))


def count_incidences(configuration: NiceConfiguration, T: TubeFamily, strict: bool = False):
    """Count ℐ(𝒫,𝒯) = {(p,T) ∈ 𝒫 × 𝒯 : T ∈ 𝒯(p)}.

    Parameters

        configuration : `dyadinc.incidence.NiceConfiguration`
            The squares and their tube families.
        T : `dyadinc.tubes.TubeFamily`
            The tube universe.

    Optional Arguments

        strict : `bool`
            Reject assignments naming a tube outside T.
    """

    index = {}
    for tube in T:
        index.setdefault(tube.slope_index, set()).add(tube)
    histogram = Counter()
    for p in configuration.P:
        for tube in configuration.assignment.get(p, []):
            if tube in index.get(tube.slope_index, ()):
                histogram[tube] += 1
            elif strict:
                raise MissingTubeError(p, tube)
    return IncidenceCount(histogram)


def _check_exponents(s, t, upper=1):
    if not 0 <= s <= t <= upper:
        raise ExponentRangeError(s, t, upper)


def theta(s, t):
    """θ(s,t) = (1 − t)/(1 − s), with θ(1,1) = 0."""

    s, t = s_proxy(s), s_proxy(t)
    _check_exponents(s, t)
    if s == 1:
        return Fraction(0)
    return (1 - t) / (1 - s)


def log_factor(scale: Scale, power: int = None):
    if power is None:
        power = config.INCIDENCE_LOG_POWER
    return max(scale.k, 1) ** power


def incidence_upper_bound(C_P, C_T, M: int, scale: Scale, s, t, T_count: int, P_count: int, power: int = None):
    """The incidence bound max{√(C_P C_T)·(Mδ^s)^(θ/2)·|𝒯|^(1/2)·|𝒫|, |𝒯|}.

    Returns

        value : `dyadinc.exponents.Monomial`
            The bound without its log factor.
        log_factor : `int`
            ⌈log2(1/δ)⌉^power.
    """

    s, t = s_proxy(s), s_proxy(t)
    exponent = theta(s, t)
    mass = Monomial(M) * scale.power(s)
    first = (Monomial(C_P) * Monomial(C_T)).sqrt() * mass ** (exponent / 2) * Monomial(T_count).sqrt() * P_count
    value = max(first, Monomial(T_count))
    return value, log_factor(scale, power)


def tube_lower_bound(C_P, C_T, M: int, scale: Scale, s, t):
    """|𝒯| ≳ (C_P C_T)^-1·Mδ^-s·(Mδ^s)^((t−s)/(1−s)), the exponent being 1 when s = t = 1."""

    s, t = s_proxy(s), s_proxy(t)
    _check_exponents(s, t)
    if M < 1:
        raise ExponentRangeError(s, t, 1)
    exponent = Fraction(1) if s == 1 else (t - s) / (1 - s)
    mass = Monomial(M) * scale.power(s)
    return Monomial(M) * scale.power(-s) * mass ** exponent / (Monomial(C_P) * Monomial(C_T))


def validate_nice(configuration: NiceConfiguration):
    """Check the three conditions of a nice configuration, stopping at the first violation."""

    worst = Monomial(0)
    for p in configuration.P:
        witness = {'ix': p.ix, 'iy': p.iy}
        family = configuration.assignment.get(p)
        if family is None or len(family) != configuration.M:
            size = 0 if family is None else len(family)
            return NiceReport({'valid': False, 'reason': 'family size {} differs from M = {}'.format(size, configuration.M), 'witness': witness})
        for tube in family:
            if not tube_meets_square(tube, p):
                witness.update({'tube_ix': tube.slope_index, 'tube_iy': tube.intercept_index})
                return NiceReport({'valid': False, 'reason': 'tube does not meet its square', 'witness': witness})
        constant = spread_certificate(family.params(), configuration.s).constant()
        worst = max(worst, constant)
        if constant > configuration.C:
            return NiceReport({'valid': False, 'reason': 'spread constant {} exceeds C = {}'.format(float(constant), float(configuration.C)), 'witness': witness, 'worst_constant': float(constant)})
    return NiceReport({'valid': True, 'worst_constant': float(worst)})


def require_nice(configuration: NiceConfiguration):
    report = validate_nice(configuration)
    if not report.valid:
        raise InvalidConfigurationError(report.reason, report.witness)
    return report


def elementary_exponents(s, t):
    """The elementary Furstenberg exponents and the improvement target (ε unspecified)."""

    s, t = s_proxy(s), s_proxy(t)
    if not (0 < s < 1 and s < t <= 2):
        raise ExponentRangeError(s, t, 2)
    return {'wolff': max(Fraction(1, 2) + s, 2 * s), 'elementary_furstenberg': 2 * s, 'target': None}


def tube_constant(configuration: NiceConfiguration):
    """The largest spread constant among the 𝒯(p)."""

    return max(spread_certificate(configuration.assignment[p].params(), configuration.s).constant() for p in configuration.P)


def incidence_report_row(configuration: NiceConfiguration, T: TubeFamily, t, budget: int = None):
    """Measure |ℐ| against the incidence bound with certified constants.

    Raises `IncidenceBoundError` when the measured count exceeds budget·log-factor·bound.
    """

    if budget is None:
        budget = config.INCIDENCE_LOG_BUDGET
    t = s_proxy(t)
    C_P = spread_certificate(configuration.P, t).constant()
    C_T = tube_constant(configuration)
    count = count_incidences(configuration, T)
    value, factor = incidence_upper_bound(C_P, C_T, configuration.M, configuration.scale, configuration.s, t, len(T), len(configuration.P))
    if Monomial(count.total) > value * budget * factor:
        raise IncidenceBoundError(count.total, float(value), budget * factor)
    row = IncidenceRow({
        'delta': configuration.scale.k,
        's': float(configuration.s),
        't': float(t),
        'M': configuration.M,
        'C_P': float(C_P),
        'C_T': float(C_T),
        'P_count': len(configuration.P),
        'T_count': len(T),
        'incidences': count.total,
        'bound': float(value),
        'ratio': count.total / float(value)})
    logger.info('Incidences %i against bound %f at scale 2^-%i', count.total, float(value), configuration.scale.k)
    return row


def check_tube_lower_bound(configuration: NiceConfiguration, T: TubeFamily, t, budget: int = None):
    """Verify |𝒯| ≥ lower bound / (budget·log-factor); returns the measured ratio."""

    if budget is None:
        budget = config.INCIDENCE_LOG_BUDGET
    t = s_proxy(t)
    C_P = spread_certificate(configuration.P, t).constant()
    C_T = tube_constant(configuration)
    bound = tube_lower_bound(C_P, C_T, configuration.M, configuration.scale, configuration.s, t)
    factor = log_factor(configuration.scale)
    if Monomial(len(T)) * budget * factor < bound:
        raise TubeLowerBoundError(len(T), float(bound), budget * factor)
    return len(T) / float(bound)


def alternative_report(T: TubeFamily, s):
    """Compare |𝒯| with δ^-2s and |𝒯|_{δ^(1/2)} with δ^-s, as log ratios."""

    scale = T.scale
    s = s_proxy(s)
    half = len(T.cover_at(scale.sqrt())) if scale.k % 2 == 0 else None
    logarithm = scale.k if scale.k else 1
    report = {
        'T_count': len(T),
        'T_exponent': math.log2(len(T)) / logarithm if len(T) else 0.0,
        'target_exponent': float(2 * s),
        'half_count': half,
        'half_exponent': math.log2(half) / logarithm if half else None,
        'half_target_exponent': float(s) if half else None}
    return report


class ExponentRangeError(Exception):
    def __init__(self, s, t, upper):
        self.message = 'Exponents (s, t) = ({}, {}) out of range for upper limit {}.'.format(s, t, upper)
        super().__init__(self.message)


class MissingTubeError(Exception):
    def __init__(self, square, tube):
        self.witness = (square, tube)
        self.message = 'Square {} lists tube {} absent from the tube family.'.format(square, tube)
        super().__init__(self.message)


class InvalidConfigurationError(Exception):
    def __init__(self, reason, witness = None):
        self.witness = witness
        self.message = 'Invalid nice configuration: {}'.format(reason)
        super().__init__(self.message)


class IncidenceBoundError(Exception):
    def __init__(self, count, bound, budget):
        self.witness = {'incidences': count, 'bound': bound, 'budget': budget}
        self.message = 'Measured {} incidences exceed {} times the bound {}.'.format(count, budget, bound)
        super().__init__(self.message)


class TubeLowerBoundError(Exception):
    def __init__(self, count, bound, budget):
        self.witness = {'tubes': count, 'bound': bound, 'budget': budget}
        self.message = 'Measured {} tubes fall below the bound {} divided by {}.'.format(count, bound, budget)
        super().__init__(self.message)
