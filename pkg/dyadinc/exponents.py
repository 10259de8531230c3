import math
from fractions import Fraction
from functools import lru_cache, total_ordering
from numbers import Rational

from . import config


def s_proxy(s, bits: int = None):
    """Replace a real exponent by its nearest rational with denominator 2^bits.

    Parameters

        s : `float | Fraction | str`
            The exponent supplied by the caller.
        bits : `int`
            Denominator exponent (defaults to `dyadinc.config.S_PROXY_BITS`).

    Returns

        proxy : `Fraction`
            The rational exponent used by every exact comparison.
    """

    if bits is None:
        bits = config.S_PROXY_BITS
    if isinstance(s, Rational):
        value = Fraction(s)
        if (value * 2 ** bits).denominator == 1:
            return value
    else:
        value = Fraction(s)
    return Fraction(round(value * 2 ** bits), 2 ** bits)


def log2_proxy(n: int, bits: int = None, ceil: bool = False):
    """Rational stand-in for log2(n); exact when n is a power of two."""

    if bits is None:
        bits = config.LOG_PROXY_BITS
    if n < 1:
        raise ValueError('log2 proxy needs a positive integer, got {}'.format(n))
    if n & (n - 1) == 0:
        return Fraction(n.bit_length() - 1)
    scaled = math.log2(n) * 2 ** bits
    rounded = math.ceil(scaled) if ceil else round(scaled)
    return Fraction(rounded, 2 ** bits)


@lru_cache(maxsize=None)
def floor_pow2(e: Fraction):
    """Exact floor of 2^e for a rational exponent e."""

    e = Fraction(e)
    whole, part = divmod(e.numerator, e.denominator)
    if part == 0:
        return 2 ** whole if whole >= 0 else 0
    # 2^e = 2^whole * 2^(part/den); search the integer floor of the fractional root.
    return Monomial.power(2, e).floor()


@lru_cache(maxsize=4096)
def factor(n: int):
    """Prime factorization of a positive integer as a tuple of (prime, multiplicity)."""

    if n < 1:
        raise ValueError('cannot factor {}'.format(n))
    factors = []
    count = 0
    while n % 2 == 0:
        n //= 2
        count += 1
    if count:
        factors.append((2, count))
    p = 3
    while p * p <= n:
        count = 0
        while n % p == 0:
            n //= p
            count += 1
        if count:
            factors.append((p, count))
        p += 2
    if n > 1:
        factors.append((n, 1))
    return tuple(factors)


@total_ordering
class Monomial(object):
    """An exact non-negative real of the form Π p^e (p prime, e rational).

    Products, quotients and rational powers stay exact. Comparisons use a float
    fast path and fall back to integer arithmetic when the float gap is too small.

    Properties

        powers : `dict[int, Fraction]`
            Prime base to rational exponent.
        is_zero : `bool`
            True for the value 0.
    """

    __slots__ = ('powers', 'is_zero')

    def __init__(self, value=1):
        self.is_zero = False
        self.powers = {}
        if isinstance(value, Monomial):
            self.is_zero = value.is_zero
            self.powers = dict(value.powers)
            return
        value = Fraction(value)
        if value < 0:
            raise ValueError('Monomial values are non-negative, got {}'.format(value))
        if value == 0:
            self.is_zero = True
            return
        for prime, count in factor(value.numerator):
            self.powers[prime] = Fraction(count)
        for prime, count in factor(value.denominator):
            self.powers[prime] = self.powers.get(prime, 0) - count

    @classmethod
    def power(cls, base, exponent):
        return cls(base) ** exponent

    @classmethod
    def _from_powers(cls, powers: dict):
        result = cls()
        result.powers = {p: e for p, e in powers.items() if e != 0}
        return result

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return Monomial(0)
        powers = dict(self.powers)
        for p, e in other.powers.items():
            powers[p] = powers.get(p, 0) + e
        return Monomial._from_powers(powers)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError('division by a zero Monomial')
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, exponent):
        exponent = Fraction(exponent)
        if self.is_zero:
            if exponent <= 0:
                raise ZeroDivisionError('0 raised to a non-positive power')
            return Monomial(0)
        return Monomial._from_powers({p: e * exponent for p, e in self.powers.items()})

    def inverse(self):
        return self ** -1

    def sqrt(self):
        return self ** Fraction(1, 2)

    def log2(self):
        if self.is_zero:
            return float('-inf')
        return sum(float(e) * math.log2(p) for p, e in self.powers.items())

    def __float__(self):
        if self.is_zero:
            return 0.0
        return 2.0 ** self.log2()

    def is_rational(self):
        return self.is_zero or all(e.denominator == 1 for e in self.powers.values())

    def as_fraction(self):
        if not self.is_rational():
            raise ValueError('{} is irrational'.format(self))
        if self.is_zero:
            return Fraction(0)
        value = Fraction(1)
        for p, e in self.powers.items():
            value *= Fraction(p) ** int(e)
        return value

    def to_fraction(self, bits: int = None):
        """Exact value when rational, otherwise rounded to 2^-bits relative to its magnitude."""

        if self.is_rational():
            return self.as_fraction()
        if bits is None:
            bits = config.ENERGY_PROXY_BITS
        shift = math.floor(self.log2())
        scale = bits - shift
        scaled = self * Monomial.power(2, scale)
        return Fraction(scaled.round(), 1) / Fraction(2) ** scale

    def floor(self):
        """Exact integer floor."""

        if self.is_rational():
            value = self.as_fraction()
            return value.numerator // value.denominator
        guess = math.floor(float(self))
        while guess > 0 and self < guess:
            guess -= 1
        while self >= guess + 1:
            guess += 1
        return guess

    def ceil(self):
        value = self.floor()
        return value if self == value else value + 1

    def round(self):
        low = self.floor()
        return low + 1 if self >= Fraction(2 * low + 1, 2) else low

    def _compare(self, other):
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return (not self.is_zero) - (not other.is_zero)
        ratio = self / other
        if not ratio.powers:
            return 0
        gap = ratio.log2()
        if abs(gap) > config.FLOAT_DECISION_GAP * max(1.0, abs(self.log2())):
            return 1 if gap > 0 else -1
        denominator = 1
        for e in ratio.powers.values():
            denominator = denominator * e.denominator // math.gcd(denominator, e.denominator)
        upper, lower = 1, 1
        for p, e in ratio.powers.items():
            scaled = int(e * denominator)
            if scaled > 0:
                upper *= p ** scaled
            else:
                lower *= p ** -scaled
        return (upper > lower) - (upper < lower)

    def __eq__(self, other):
        try:
            return self._compare(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._compare(other) < 0

    def __hash__(self):
        if self.is_zero:
            return hash(0)
        if self.is_rational():
            return hash(self.as_fraction())
        return hash(tuple(sorted(self.powers.items())))

    def __repr__(self):
        if self.is_zero:
            return 'Monomial(0)'
        terms = ['{}^{}'.format(p, e) for p, e in sorted(self.powers.items())]
        return 'Monomial({})'.format(' * '.join(terms) or '1')

    def split(self):
        """Split into (rational coefficient, exponent of two) with the remainder folded into the exponent.

        Only exact when every odd prime carries an integer exponent; otherwise the odd part is
        rounded into the coefficient at ENERGY_PROXY_BITS.
        """

        if self.is_zero:
            return Fraction(0), Fraction(0)
        exponent = self.powers.get(2, Fraction(0))
        rest = Monomial._from_powers({p: e for p, e in self.powers.items() if p != 2})
        return rest.to_fraction(), exponent


def _coerce(value):
    if isinstance(value, Monomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Monomial(value)
    if isinstance(value, float):
        return Monomial(Fraction(value))
    raise TypeError('cannot compare Monomial with {}'.format(value.__class__.__name__))


def pow2(exponent):
    """2^exponent as an exact Monomial."""

    return Monomial.power(2, exponent)
