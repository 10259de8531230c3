import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from . import config
from .dyadic import DyadicInterval, DyadicSquare, IntervalFamily, Scale, SquareFamily, ScaleOrderError, full_grid
from .entities.base import BaseFamily
from .enums import Convention

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Line(object):
    """The line 𝐃(a,b): y = ax + b (main text) or x = ay + b (appendix)."""

    slope: Fraction
    intercept: Fraction
    convention: Convention

    def contains(self, x, y):
        if self.convention == Convention.appendix:
            return x == self.slope * y + self.intercept
        return y == self.slope * x + self.intercept


@dataclass(frozen=True)
class DyadicTube(object):
    """A dyadic δ-tube T = ∪{𝐃(a,b) : (a,b) ∈ param}.

    Properties

        param : `dyadinc.dyadic.DyadicSquare`
            The parameter square; its x-extent holds the slopes.
        convention : `dyadinc.enums.Convention`
            Which duality 𝐃 the parameters refer to.
    """

    param: DyadicSquare
    convention: Convention = Convention.main_text

    def __post_init__(self):
        n = 2 ** self.param.k
        if not -n <= self.param.ix < n:
            raise SlopeRangeError(self.param)

    @property
    def k(self):
        return self.param.k

    @property
    def scale(self):
        return self.param.scale

    @property
    def slope_index(self):
        return self.param.ix

    @property
    def intercept_index(self):
        return self.param.iy

    @property
    def sigma(self):
        """σ(T), the left endpoint of the slope interval."""

        return Fraction(self.param.ix, 2 ** self.param.k)

    def slope_interval(self):
        return DyadicInterval(self.param.k, self.param.ix)

    def sort_key(self):
        return (self.param.ix, self.param.iy)

    def ancestor(self, coarser: Scale):
        """The thick tube 𝒯^Δ(T) containing T."""

        return DyadicTube(self.param.parent(coarser), self.convention)

    def contains(self, other):
        return self.convention == other.convention and self.param.contains(other.param)

    def to_line(self):
        return '{} {} {} {}'.format(self.param.k, self.param.ix, self.param.iy, self.convention.name)


class TubeFamily(BaseFamily):
    """A deduplicated family of dyadic tubes sharing one scale and one convention.

    Properties

        scale : `dyadinc.dyadic.Scale`
            The tube width δ.
        convention : `dyadinc.enums.Convention`
            The duality convention shared by all tubes.
        tubes : `tuple[dyadinc.tubes.DyadicTube]`
            The members ordered by (slope index, intercept index).
    """

    _type = DyadicTube

    def __init__(self, scale, values: list = [], convention: Convention = None):
        values = list(values)
        if convention is None:
            convention = values[0].convention if values else Convention.main_text
        self.convention = convention
        super(TubeFamily, self).__init__(scale, values)

    def _check(self, value):
        if value.k != self.scale.k:
            raise ScaleOrderError(value.k, self.scale.k)
        if value.convention != self.convention:
            raise ConventionMismatchError(self.convention, value.convention)

    def derive(self, values):
        return TubeFamily(self.scale, values, self.convention)

    def __eq__(self, other):
        return super(TubeFamily, self).__eq__(other) and self.convention == other.convention

    def __hash__(self):
        return hash((self.convention, super(TubeFamily, self).__hash__()))

    @property
    def tubes(self):
        return self.values

    def params(self):
        return SquareFamily(self.scale, [T.param for T in self])

    def slopes(self):
        """σ(𝒯) as a family of δ-intervals."""

        return IntervalFamily(self.scale, [T.slope_interval() for T in self])

    def cover_at(self, coarser: Scale):
        """𝒯^Δ(𝒯), the thick tubes containing the members."""

        return TubeFamily(coarser, [T.ancestor(coarser) for T in self], self.convention)


def dual_line(a, b, convention: Convention = Convention.main_text):
    """The line 𝐃(a,b) under the given convention."""

    return Line(Fraction(a), Fraction(b), convention)


def _square_axes(p: DyadicSquare, convention: Convention):
    """Bounds of p ordered as (free variable, dependent variable) for the convention."""

    x0, x1, y0, y1 = p.bounds()
    if convention == Convention.appendix:
        return y0, y1, x0, x1
    return x0, x1, y0, y1


def tube_meets_square(T: DyadicTube, p: DyadicSquare):
    """Exact test of T ∩ p ≠ ∅.

    With u the free and v the dependent coordinate, the question is whether a·u takes a value
    in the open range of v − b. The products a·u over the box attain every value strictly
    between their corner extremes, so the test reduces to comparing two intervals.
    """

    a0, a1, b0, b1 = T.param.bounds()
    u0, u1, v0, v1 = _square_axes(p, T.convention)
    corners = (a0 * u0, a0 * u1, a1 * u0, a1 * u1)
    low, high = min(corners), max(corners)
    return max(low, v0 - b1) < min(high, v1 - b0)


def tube_contains_point(T: DyadicTube, x, y):
    """Exact test of (x, y) ∈ T."""

    a0, a1, b0, b1 = T.param.bounds()
    u, v = (y, x) if T.convention == Convention.appendix else (x, y)
    if u == 0:
        return b0 <= v < b1
    g0, g1 = v - a0 * u, v - a1 * u
    if u > 0:
        return b0 <= g0 and g1 < b1
    return g0 < b1 and b0 < g1


def tubes_with_slope(slope_index: int, p: DyadicSquare, scale: Scale, convention: Convention = Convention.main_text):
    """The dyadic tubes of one slope index meeting p, ordered by intercept."""

    d = scale.value
    u0, u1, v0, v1 = _square_axes(p, convention)
    a0, a1 = slope_index * d, (slope_index + 1) * d
    corners = (a0 * u0, a0 * u1, a1 * u0, a1 * u1)
    first = math.floor((v0 - max(corners)) / d) - 1
    last = math.ceil((v1 - min(corners)) / d) + 1
    found = []
    for iy in range(first, last + 1):
        T = DyadicTube(DyadicSquare(scale.k, slope_index, iy), convention)
        if tube_meets_square(T, p):
            found.append(T)
    return found


def tubes_through(p: DyadicSquare, scale: Scale, convention: Convention = Convention.main_text):
    """Every dyadic tube of the given scale with slope in [-1,1) meeting p."""

    n = 2 ** scale.k
    found = []
    for ix in range(-n, n):
        found.extend(tubes_with_slope(ix, p, scale, convention))
    return TubeFamily(scale, found, convention)


def dual_star(T: DyadicTube):
    """𝐃*(T) = {(-a, b) : (a, b) ∈ param}, with boundaries rearranged to a half-open dyadic square."""

    if T.convention != Convention.main_text:
        raise ConventionMismatchError(Convention.main_text, T.convention)
    return DyadicSquare(T.param.k, -T.param.ix - 1, T.param.iy)


def dual_star_incidence(p: DyadicSquare, T: DyadicTube):
    """Whether 𝐃(p) ∩ 𝐃*(T) ≠ ∅; holds for every incident pair with p ⊂ [0,1)²."""

    return tube_meets_square(DyadicTube(p, Convention.main_text), dual_star(T))


def slope_fibers(tubes: TubeFamily, p: DyadicSquare, bound: int = None):
    """Group tubes through p by σ(T).

    Returns

        fibers : `dict[int, dyadinc.tubes.TubeFamily]`
            Slope index to the tubes with that slope.
        largest : `int`
            The largest fiber size.
    """

    groups = {}
    for T in tubes:
        if not tube_meets_square(T, p):
            raise TubeMissError(T, p)
        groups.setdefault(T.slope_index, []).append(T)
    fibers = {ix: tubes.derive(members) for ix, members in sorted(groups.items())}
    largest = max((len(f) for f in fibers.values()), default=0)
    if bound is None:
        bound = config.SLOPE_FIBER_BOUND
    if largest > bound:
        raise SlopeFiberError(p, largest, bound)
    logger.debug('%i slope fibers through %s, largest %i', len(fibers), p, largest)
    return fibers, largest


def duality_check(scale: Scale):
    """Require 𝐃(p) ∩ 𝐃*(T) ≠ ∅ for every p ∈ 𝒟_δ([0,1)²) and every main-text tube T meeting p.

    Returns the number of incident pairs checked.
    """

    pairs = 0
    for p in full_grid(scale):
        for T in tubes_through(p, scale, Convention.main_text):
            if not dual_star_incidence(p, T):
                raise DualityError(p, T)
            pairs += 1
    logger.info('Dual incidence holds for %i pairs at scale 2^-%i', pairs, scale.k)
    return pairs


def fiber_check(scale: Scale, bound: int = None, convention: Convention = Convention.main_text):
    """The largest slope fiber over every square of [0,1)² and all tubes through it."""

    largest = 0
    for p in full_grid(scale):
        _, size = slope_fibers(tubes_through(p, scale, convention), p, bound)
        largest = max(largest, size)
    logger.info('Largest slope fiber at scale 2^-%i holds %i tubes', scale.k, largest)
    return largest


def rescale_tube_cover(T: DyadicTube, Q: DyadicSquare, limit: int = None):
    """Cover S_Q(T) by dyadic (δ/Δ)-tubes.

    S_Q maps the line with parameters (a, b) to the line with parameters
    (a, (a·u_Q + b − v_Q)/Δ), where (u_Q, v_Q) is the corner of Q in (free, dependent)
    order. The slopes stay in the ancestor interval of T's slopes; the intercepts are covered
    by the dyadic intervals meeting the image range.
    """

    if limit is None:
        limit = config.RESCALE_COVER_LIMIT
    if Q.k > T.k:
        raise ScaleOrderError(T.k, Q.k)
    relative = T.scale / Q.scale
    width = relative.value
    a0, a1, b0, b1 = T.param.bounds()
    u0, _, v0, _ = _square_axes(Q, T.convention)
    size = Q.scale.value
    lows = [(a * u0 + b0 - v0) / size for a in (a0, a1)]
    highs = [(a * u0 + b1 - v0) / size for a in (a0, a1)]
    first = math.floor(min(lows) / width)
    last = math.ceil(max(highs) / width) - 1
    slope = T.param.ix >> Q.k
    cover = [DyadicTube(DyadicSquare(relative.k, slope, iy), T.convention) for iy in range(first, last + 1)]
    if len(cover) > limit:
        raise RescaleCoverError(T, Q, len(cover), limit)
    return TubeFamily(relative, cover, T.convention)


def rescale_point(Q: DyadicSquare, x, y):
    """S_Q applied to a point."""

    x0, _, y0, _ = Q.bounds()
    size = Q.scale.value
    return (x - x0) / size, (y - y0) / size


def slope_spread_check(tubes: TubeFamily, p: DyadicSquare, s):
    """Compare the spread constants of σ(𝒯) and of 𝒯 for tubes through a common square.

    Returns

        slope_constant : `dyadinc.exponents.Monomial`
            The spread constant of σ(𝒯).
        tube_constant : `dyadinc.exponents.Monomial`
            The spread constant of the parameter squares.
    """

    from .deltaset import spread_certificate

    slope_fibers(tubes, p)
    slope_constant = spread_certificate(tubes.slopes(), s).constant()
    tube_constant = spread_certificate(tubes.params(), s).constant()
    if tube_constant > slope_constant * config.SLOPE_SPREAD_FACTOR:
        raise SlopeSpreadError('tube', tube_constant, slope_constant, config.SLOPE_SPREAD_FACTOR)
    if p.in_unit_square() and slope_constant > tube_constant * config.SLOPE_SPREAD_CONVERSE:
        raise SlopeSpreadError('slope', slope_constant, tube_constant, config.SLOPE_SPREAD_CONVERSE)
    return slope_constant, tube_constant


def dumps(family: TubeFamily):
    header = {'scale_exponent': family.scale.k, 'convention': family.convention.name, 'count': len(family)}
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(T.to_line() for T in family)
    return '\n'.join(lines) + '\n'


def loads(text: str):
    lines = [line for line in text.splitlines() if line.strip()]
    header = json.loads(lines[0])
    convention = Convention[header['convention']]
    tubes = []
    for line in lines[1:]:
        k, ix, iy, name = line.split()
        if Convention[name] != convention:
            raise ConventionMismatchError(convention, Convention[name])
        tubes.append(DyadicTube(DyadicSquare(int(k), int(ix), int(iy)), convention))
    return TubeFamily(Scale(int(header['scale_exponent'])), tubes, convention)


class ConventionMismatchError(Exception):
    def __init__(self, expected, actual):
        self.message = 'Expected tubes in the {} convention, got {} instead.'.format(expected.name, actual.name)
        super().__init__(self.message)


class SlopeRangeError(Exception):
    def __init__(self, param):
        self.message = 'Parameter square {} has slope outside [-1,1).'.format(param)
        super().__init__(self.message)


class TubeMissError(Exception):
    def __init__(self, tube, square):
        self.witness = (tube, square)
        self.message = 'Tube {} does not meet square {}.'.format(tube, square)
        super().__init__(self.message)


class RescaleCoverError(Exception):
    def __init__(self, tube, square, count, limit):
        self.witness = (tube, square)
        self.message = 'Rescaling {} by {} needed {} tubes, more than {}.'.format(tube, square, count, limit)
        super().__init__(self.message)


class SlopeSpreadError(Exception):
    def __init__(self, side, larger, smaller, factor):
        self.message = 'The {} spread constant {} exceeds {} times {}.'.format(side, float(larger), factor, float(smaller))
        super().__init__(self.message)


class SlopeFiberError(Exception):
    def __init__(self, square, largest, bound):
        self.witness = square
        self.message = 'A slope fiber through {} holds {} tubes, more than {}.'.format(square, largest, bound)
        super().__init__(self.message)


class DualityError(Exception):
    def __init__(self, square, tube):
        self.witness = (square, tube)
        self.message = 'The dual of {} misses the dual star of {}.'.format(square, tube)
        super().__init__(self.message)
