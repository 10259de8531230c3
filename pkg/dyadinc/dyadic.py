import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .entities.base import BaseFamily
from .exponents import Monomial

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scale(object):
    """A dyadic scale δ = 2^-k.

    Properties

        k : `int`
            The non-negative exponent.
        value : `Fraction`
            The side length 2^-k.
    """

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise ValueError('scale exponent must be a non-negative integer, got {}'.format(self.k))

    @classmethod
    def from_value(cls, value):
        value = Fraction(value)
        if value.numerator != 1 or value.denominator & (value.denominator - 1):
            raise ValueError('{} is not a dyadic scale'.format(value))
        return cls(value.denominator.bit_length() - 1)

    @property
    def value(self):
        return Fraction(1, 2 ** self.k)

    @property
    def inverse(self):
        return 2 ** self.k

    def __lt__(self, other):
        return self.k > other.k

    def __le__(self, other):
        return self.k >= other.k

    def __gt__(self, other):
        return self.k < other.k

    def __ge__(self, other):
        return self.k <= other.k

    def __truediv__(self, other):
        """The relative scale δ/Δ."""

        if self.k < other.k:
            raise ScaleOrderError(self.k, other.k)
        return Scale(self.k - other.k)

    def __mul__(self, other):
        return Scale(self.k + other.k)

    def sqrt(self):
        if self.k % 2:
            raise ValueError('scale 2^-{} has no dyadic square root'.format(self.k))
        return Scale(self.k // 2)

    def power(self, exponent: Fraction):
        """δ^exponent as an exact Monomial."""

        return Monomial.power(2, -self.k * Fraction(exponent))

    def __repr__(self):
        return 'Scale(2^-{})'.format(self.k)


@dataclass(frozen=True)
class DyadicSquare(object):
    """The half-open square [ix·δ, (ix+1)δ) × [iy·δ, (iy+1)δ) at δ = 2^-k."""

    k: int
    ix: int
    iy: int

    @property
    def scale(self):
        return Scale(self.k)

    def sort_key(self):
        return (self.ix, self.iy)

    def parent(self, coarser: Scale):
        if coarser.k > self.k:
            raise ScaleOrderError(self.k, coarser.k)
        shift = self.k - coarser.k
        return DyadicSquare(coarser.k, self.ix >> shift, self.iy >> shift)

    def children(self, finer: Scale = None):
        if finer is None:
            finer = Scale(self.k + 1)
        if finer.k < self.k:
            raise ScaleOrderError(finer.k, self.k)
        n = 2 ** (finer.k - self.k)
        return [DyadicSquare(finer.k, self.ix * n + a, self.iy * n + b) for a in range(n) for b in range(n)]

    def contains(self, other):
        return other.k >= self.k and other.parent(self.scale) == self

    def bounds(self):
        """(x0, x1, y0, y1) as exact Fractions."""

        d = Fraction(1, 2 ** self.k)
        return (self.ix * d, (self.ix + 1) * d, self.iy * d, (self.iy + 1) * d)

    def center(self):
        d = Fraction(1, 2 ** self.k)
        return ((2 * self.ix + 1) * d / 2, (2 * self.iy + 1) * d / 2)

    def in_unit_square(self):
        n = 2 ** self.k
        return 0 <= self.ix < n and 0 <= self.iy < n

    def to_line(self):
        return '{} {} {}'.format(self.k, self.ix, self.iy)


@dataclass(frozen=True)
class DyadicInterval(object):
    """The half-open interval [i·δ, (i+1)δ) at δ = 2^-k."""

    k: int
    i: int

    @property
    def scale(self):
        return Scale(self.k)

    def sort_key(self):
        return (self.i,)

    def parent(self, coarser: Scale):
        if coarser.k > self.k:
            raise ScaleOrderError(self.k, coarser.k)
        return DyadicInterval(coarser.k, self.i >> (self.k - coarser.k))

    def children(self, finer: Scale = None):
        if finer is None:
            finer = Scale(self.k + 1)
        n = 2 ** (finer.k - self.k)
        return [DyadicInterval(finer.k, self.i * n + a) for a in range(n)]

    def contains(self, other):
        return other.k >= self.k and other.parent(self.scale) == self

    def bounds(self):
        d = Fraction(1, 2 ** self.k)
        return (self.i * d, (self.i + 1) * d)

    def center(self):
        return Fraction(2 * self.i + 1, 2 ** (self.k + 1))

    def to_line(self):
        return '{} {}'.format(self.k, self.i)


class SquareFamily(BaseFamily):
    """A finite family 𝒫 ⊂ 𝒟_δ of dyadic squares sharing one scale.

    Properties

        scale : `dyadinc.dyadic.Scale`
            The common scale δ.
        squares : `tuple[dyadinc.dyadic.DyadicSquare]`
            The members ordered by (ix, iy).
    """

    _type = DyadicSquare

    def _check(self, value):
        if value.k != self.scale.k:
            raise ScaleMismatchError(self.scale.k, value.k)

    @property
    def squares(self):
        return self.values

    def intersect(self, Q: DyadicSquare):
        """The members contained in Q."""

        return self.derive([p for p in self if Q.contains(p)])


class IntervalFamily(BaseFamily):
    """A finite family of dyadic intervals sharing one scale."""

    _type = DyadicInterval

    def _check(self, value):
        if value.k != self.scale.k:
            raise ScaleMismatchError(self.scale.k, value.k)

    @property
    def intervals(self):
        return self.values

    def intersect(self, Q: DyadicInterval):
        return self.derive([p for p in self if Q.contains(p)])


def full_grid(scale: Scale):
    """𝒟_δ([0,1)²)."""

    n = scale.inverse
    return SquareFamily(scale, [DyadicSquare(scale.k, ix, iy) for ix in range(n) for iy in range(n)])


def cover_at(family, coarser: Scale):
    """Compute 𝒟_Δ(𝒫), the coarser dyadic cells meeting the family.

    Parameters

        family : `dyadinc.dyadic.SquareFamily | dyadinc.dyadic.IntervalFamily`
            The family at scale δ.
        coarser : `dyadinc.dyadic.Scale`
            The scale Δ ≥ δ.

    Returns

        cover : same family type at scale Δ; its length is |𝒫|_Δ.
    """

    if coarser < family.scale:
        raise ScaleOrderError(family.scale.k, coarser.k)
    return family.__class__(coarser, [p.parent(coarser) for p in family])


def group_by_parent(family, coarser: Scale):
    """Map each coarser cell to the list of members it contains, in canonical order."""

    groups = {}
    for p in family:
        groups.setdefault(p.parent(coarser), []).append(p)
    return groups


def renormalize(family, Q):
    """Apply the homothety S_Q taking Q to the unit cell to 𝒫 ∩ Q."""

    if Q.k > family.scale.k:
        raise ScaleOrderError(family.scale.k, Q.k)
    relative = family.scale / Q.scale
    n = 2 ** relative.k
    if isinstance(Q, DyadicSquare):
        members = [DyadicSquare(relative.k, p.ix - Q.ix * n, p.iy - Q.iy * n) for p in family if Q.contains(p)]
        return SquareFamily(relative, members)
    members = [DyadicInterval(relative.k, p.i - Q.i * n) for p in family if Q.contains(p)]
    return IntervalFamily(relative, members)


def unrenormalize(family, Q):
    """Inverse of `renormalize`: place a family living in the unit cell inside Q."""

    n = 2 ** family.scale.k
    scale = Scale(family.scale.k + Q.k)
    if isinstance(Q, DyadicSquare):
        return SquareFamily(scale, [DyadicSquare(scale.k, Q.ix * n + p.ix, Q.iy * n + p.iy) for p in family])
    return IntervalFamily(scale, [DyadicInterval(scale.k, Q.i * n + p.i) for p in family])


def midpoint_distance(p: DyadicSquare, q: DyadicSquare):
    """Euclidean distance of the centers, as an exact Monomial."""

    if p.k != q.k:
        raise ScaleMismatchError(p.k, q.k)
    squared = (p.ix - q.ix) ** 2 + (p.iy - q.iy) ** 2
    if squared == 0:
        return Monomial(0)
    root = isqrt(squared)
    delta = Fraction(1, 2 ** p.k)
    if root * root == squared:
        return Monomial(root * delta)
    return Monomial(squared).sqrt() * delta


def dumps(family):
    """Serialize a family: a JSON header followed by one `k ix iy` (or `k i`) line per member."""

    header = {'scale_exponent': family.scale.k, 'count': len(family)}
    if isinstance(family, IntervalFamily):
        header['dimension'] = 1
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(p.to_line() for p in family)
    return '\n'.join(lines) + '\n'


def loads(text: str):
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise FamilyFormatError('empty document')
    try:
        header = json.loads(lines[0])
        k = int(header['scale_exponent'])
        count = int(header['count'])
    except (ValueError, KeyError, TypeError) as ex:
        raise FamilyFormatError('bad header: {}'.format(ex))
    scale = Scale(k)
    members = []
    one_dimensional = header.get('dimension') == 1
    for line in lines[1:]:
        fields = [int(v) for v in line.split()]
        if one_dimensional and len(fields) == 2:
            members.append(DyadicInterval(*fields))
        elif not one_dimensional and len(fields) == 3:
            members.append(DyadicSquare(*fields))
        else:
            raise FamilyFormatError('bad line: {}'.format(line))
    family = IntervalFamily(scale, members) if one_dimensional else SquareFamily(scale, members)
    if len(family) != count:
        raise FamilyFormatError('header count {} does not match {} members'.format(count, len(family)))
    logger.debug('Loaded %i members at scale 2^-%i', count, k)
    return family


class ScaleOrderError(Exception):
    def __init__(self, fine, coarse):
        self.message = 'Scale 2^-{} is not coarser than 2^-{}.'.format(coarse, fine)
        super().__init__(self.message)


class ScaleMismatchError(Exception):
    def __init__(self, expected, actual):
        self.message = 'Expected scale 2^-{}, got 2^-{} instead.'.format(expected, actual)
        super().__init__(self.message)


class FamilyFormatError(Exception):
    def __init__(self, reason):
        self.message = 'Unable to read dyadic family: {}'.format(reason)
        super().__init__(self.message)
