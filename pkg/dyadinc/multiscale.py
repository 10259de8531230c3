import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from . import config
from .deltaset import spread_certificate
from .dyadic import Scale
from .entities.objects import DecompositionInterval, ScaleDecompositionRecord
from .enums import IntervalKind, ScaleClass
from .exponents import Monomial, log2_proxy, pow2, s_proxy

logger = logging.getLogger(__name__)


class PiecewiseLinear(object):
    """A continuous piecewise-linear function through exact breakpoints.

    Properties

        xs : `list[Fraction]`
            Strictly increasing breakpoints.
        ys : `list[Fraction]`
            Values at the breakpoints.
    """

    def __init__(self, xs: list, ys: list):
        xs = [Fraction(x) for x in xs]
        ys = [Fraction(y) for y in ys]
        if len(xs) != len(ys) or len(xs) < 2:
            raise IntervalError('a piecewise-linear function needs at least two matching breakpoints')
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise IntervalError('breakpoints must increase strictly')
        self.xs = xs
        self.ys = ys

    @property
    def start(self):
        return self.xs[0]

    @property
    def end(self):
        return self.xs[-1]

    def __call__(self, x):
        x = Fraction(x)
        if not self.start <= x <= self.end:
            raise IntervalError('{} lies outside [{}, {}]'.format(x, self.start, self.end))
        i = min(bisect_right(self.xs, x), len(self.xs) - 1)
        x0, x1 = self.xs[i - 1], self.xs[i]
        y0, y1 = self.ys[i - 1], self.ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def breakpoints(self, a, b):
        """Breakpoints strictly inside (a, b)."""

        return [x for x in self.xs if a < x < b]

    def segments(self):
        return list(zip(self.xs, self.xs[1:]))

    def __repr__(self):
        return 'PiecewiseLinear({})'.format(list(zip(self.xs, self.ys)))


class BranchingFunction(PiecewiseLinear):
    """The branching function f(j) = Σ_{i≤j} log N_i / log(1/Δ) of a uniform set.

    Logarithms of branching numbers that are not powers of two are replaced by their
    `dyadinc.exponents.log2_proxy`, rounded up.

    Properties

        base : `dyadinc.dyadic.Scale`
            The step Δ.
        numbers : `list[int]`
            The branching numbers N_1..N_m.
    """

    def __init__(self, base: Scale, numbers: list):
        if base.k < 1:
            raise ScaleListError('the branching base must be finer than 1')
        values = [Fraction(0)]
        for N in numbers:
            values.append(values[-1] + log2_proxy(N, ceil=True) / base.k)
        super(BranchingFunction, self).__init__(range(len(numbers) + 1), values)
        self.base = base
        self.numbers = list(numbers)

    @property
    def m(self):
        return len(self.numbers)

    def __repr__(self):
        return 'BranchingFunction(2^-{}, {})'.format(self.base.k, self.numbers)


@dataclass(frozen=True)
class TaggedInterval(object):
    """A window [c, d] with its tag and slope."""

    c: Fraction
    d: Fraction
    kind: IntervalKind
    slope: Fraction

    @property
    def length(self):
        return self.d - self.c

    def to_record(self):
        return DecompositionInterval({
            'c_num': self.c.numerator,
            'c_den': self.c.denominator,
            'd_num': self.d.numerator,
            'd_den': self.d.denominator,
            'kind': self.kind.name,
            'slope_num': self.slope.numerator,
            'slope_den': self.slope.denominator})


class IntervalDecomposition(object):
    """Non-overlapping tagged windows of [start, end] and the measure they leave out.

    Properties

        intervals : `list[dyadinc.multiscale.TaggedInterval]`
        leftover : `Fraction`
        tau : `Fraction`
            Shortest window over the domain length.
        epsilon : `Fraction`
            The precision the windows were certified at.
    """

    def __init__(self, intervals, start, end, epsilon, tau=None):
        self.intervals = sorted(intervals, key=lambda interval: interval.c)
        self.start = Fraction(start)
        self.end = Fraction(end)
        self.epsilon = Fraction(epsilon)
        self.leftover = self.end - self.start - sum(interval.length for interval in self.intervals)
        if tau is None and self.intervals:
            tau = min(interval.length for interval in self.intervals) / (self.end - self.start)
        self.tau = tau

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        for interval in self.intervals:
            yield interval

    def __repr__(self):
        return 'IntervalDecomposition({} windows, leftover {})'.format(len(self.intervals), self.leftover)


def _check_interval(f, a, b):
    a, b = Fraction(a), Fraction(b)
    if a >= b:
        raise IntervalError('expected a < b, got [{}, {}]'.format(a, b))
    if a < f.start or b > f.end:
        raise IntervalError('[{}, {}] leaves the domain [{}, {}]'.format(a, b, f.start, f.end))
    return a, b


def slope(f, a, b):
    """s_f(a, b) = (f(b) − f(a)) / (b − a)."""

    a, b = _check_interval(f, a, b)
    return (f(b) - f(a)) / (b - a)


def _deviations(f, a, b):
    a, b = _check_interval(f, a, b)
    rate = (f(b) - f(a)) / (b - a)
    return [f(x) - (f(a) + rate * (x - a)) for x in f.breakpoints(a, b)], b - a


def is_eps_linear(f, a, b, epsilon):
    """Whether |f − L_{f,a,b}| ≤ ε(b − a) on [a, b]."""

    deviations, length = _deviations(f, a, b)
    return all(abs(d) <= Fraction(epsilon) * length for d in deviations)


def is_eps_superlinear(f, a, b, epsilon):
    """Whether f ≥ L_{f,a,b} − ε(b − a) on [a, b]."""

    deviations, length = _deviations(f, a, b)
    return all(d >= -Fraction(epsilon) * length for d in deviations)


def _depth(epsilon):
    return max(1, math.ceil(2 * math.log2(4 / float(epsilon))))


def linear_decompose(f, epsilon, a=None, b=None, retries: int = None):
    """Cover [a, b] by ε-linear windows using recursive bisection.

    Windows failing the ε-linear test are halved until a depth D = ⌈2·log2(4/ε)⌉; windows
    still failing at that depth are left out. When the leftover measure exceeds ε(b − a),
    the depth schedule is recomputed at ε/2 and the bisection rerun.

    Returns

        decomposition : `dyadinc.multiscale.IntervalDecomposition`
            Linear windows, each at least 2^-D·(b − a) long.
    """

    if retries is None:
        retries = config.DECOMPOSITION_RETRIES
    epsilon = Fraction(epsilon)
    a = f.start if a is None else Fraction(a)
    b = f.end if b is None else Fraction(b)
    _check_interval(f, a, b)
    schedule = epsilon
    for attempt in range(retries + 1):
        depth = _depth(schedule)
        accepted = []
        leftover = Fraction(0)
        stack = [(a, b, 0)]
        while stack:
            low, high, level = stack.pop()
            if is_eps_linear(f, low, high, epsilon):
                accepted.append(TaggedInterval(low, high, IntervalKind.linear, slope(f, low, high)))
            elif level < depth:
                middle = (low + high) / 2
                stack.append((middle, high, level + 1))
                stack.append((low, middle, level + 1))
            else:
                leftover += high - low
        if leftover <= epsilon * (b - a):
            logger.debug('Linear decomposition: %i windows at depth %i, leftover %s', len(accepted), depth, leftover)
            return IntervalDecomposition(accepted, a, b, epsilon, Fraction(1, 2 ** depth))
        schedule /= 2
    raise LeftoverBoundError(leftover, epsilon * (b - a))


def _largest_root(f, target, s, below):
    """The largest x in (0, below) with f(x) − s·x = target."""

    for x0, x1 in reversed(f.segments()):
        if x0 >= below:
            continue
        x1 = min(x1, below)
        h0, h1 = f(x0) - s * x0, f(x1) - s * x1
        if h0 <= target < h1:
            return x0 + (target - h0) * (x1 - x0) / (h1 - h0)
    raise KaufmanHypothesisError('no root of s_f(c, d) = {} below {}'.format(s, below))


def verify_tags(f, intervals, s, epsilon):
    """Re-check each tagged window against f: linear ones are ε-linear with slope ≥ s,
    superlinear ones ε-superlinear with slope exactly s. Windows must not overlap."""

    s, epsilon = s_proxy(s), Fraction(epsilon)
    ordered = sorted(intervals, key=lambda interval: interval.c)
    for left, right in zip(ordered, ordered[1:]):
        if left.d > right.c:
            raise DecompositionError('windows [{}, {}] and [{}, {}] overlap'.format(left.c, left.d, right.c, right.d))
    for interval in ordered:
        if interval.kind == IntervalKind.linear:
            valid = is_eps_linear(f, interval.c, interval.d, epsilon) and slope(f, interval.c, interval.d) >= s
        else:
            valid = is_eps_superlinear(f, interval.c, interval.d, epsilon) and slope(f, interval.c, interval.d) == s
        if not valid:
            raise DecompositionError('window [{}, {}] fails its {} tag'.format(interval.c, interval.d, interval.kind.name))
    return len(ordered)


def kaufman_decompose(f, s, t, epsilon, slack=None, precision=None):
    """Windows that are ε-linear with slope ≥ s or ε-superlinear with slope exactly s.

    Starts from a linear decomposition at `precision` (ε²/2 unless given) and scans it from
    the right. Each window of slope below s is merged leftwards into [c′, d_k], where c′ is the
    largest point with s_f(c′, d_k) = s, unless d_k ≤ slack·m/(t − s), in which case every
    window up to k is dropped. The window holding c′ is then kept, dropped or truncated to
    [c_ℓ, c′] according to how much of it lies left of c′.

    Parameters

        f : `dyadinc.multiscale.PiecewiseLinear`
            A 2-Lipschitz function on [0, m] with f(0) = 0.
        s : `Fraction`
            The slope floor, in (0, t).
        t : `Fraction`
            The hypothesis slope, in (s, 2].
        epsilon : `Fraction`
            The precision of the tags.

    Optional Arguments

        slack : `Fraction`
            The ε in the hypothesis f(x) ≥ tx − εm; defaults to `epsilon`.
        precision : `Fraction`
            Precision of the underlying linear decomposition.

    Returns

        decomposition : `dyadinc.multiscale.IntervalDecomposition`
    """

    s, t, epsilon = s_proxy(s), s_proxy(t), Fraction(epsilon)
    if not 0 < s < t <= 2:
        raise KaufmanHypothesisError('exponents s = {}, t = {} out of range'.format(s, t))
    slack = epsilon if slack is None else Fraction(slack)
    precision = epsilon ** 2 / 2 if precision is None else Fraction(precision)
    m = f.end
    if f.start != 0 or f(0) != 0:
        raise KaufmanHypothesisError('f must start at f(0) = 0')
    for x in f.xs:
        if f(x) < t * x - slack * m:
            raise KaufmanHypothesisError('f({}) = {} is below {}·x − {}·m'.format(x, f(x), t, slack))

    pieces = [(interval.c, interval.d) for interval in linear_decompose(f, precision)]
    output = []
    i = len(pieces) - 1
    while i >= 0:
        c, d = pieces[i]
        if slope(f, c, d) >= s:
            output.append(TaggedInterval(c, d, IntervalKind.linear, slope(f, c, d)))
            i -= 1
            continue
        if d <= slack * m / (t - s):
            logger.debug('Dropping the windows below %s', d)
            break
        prime = _largest_root(f, f(d) - s * d, s, c)
        output.append(TaggedInterval(prime, d, IntervalKind.superlinear, s))
        holder = [j for j in range(i) if pieces[j][0] <= prime <= pieces[j][1]]
        if not holder:
            i = max((j for j in range(i) if pieces[j][1] < prime), default=-1)
            continue
        l = holder[-1]
        low, high = pieces[l]
        if prime - low <= epsilon * (high - low):
            i = l - 1
        else:
            pieces[l] = (low, prime)
            i = l

    output = [interval for interval in output if interval.length > 0]
    verify_tags(f, output, s, epsilon)
    decomposition = IntervalDecomposition(output, 0, m, epsilon)
    bound = 8 * (1 + 1 / (t - s)) * max(epsilon, slack) * m
    if decomposition.leftover > bound:
        raise LeftoverBoundError(decomposition.leftover, bound)
    logger.debug('Kaufman decomposition: %i windows, leftover %s', len(output), decomposition.leftover)
    return decomposition


def roof(m):
    """Slope 2 on [0, m/2], flat on [m/2, m]."""

    m = Fraction(m)
    return PiecewiseLinear([0, m / 2, m], [0, m, m])


def roof_split(m, s):
    """m(1 − s)/(2 − s), where the superlinear window of `roof(m)` starts."""

    s = s_proxy(s)
    return Fraction(m) * (1 - s) / (2 - s)


def check_roof(m, s, t=1, epsilon=Fraction(1, 8)):
    """Decompose `roof(m)` and require exactly [0, split] linear and [split, m] superlinear."""

    decomposition = kaufman_decompose(roof(m), s, t, epsilon)
    split = roof_split(m, s)
    found = [(interval.c, interval.d, interval.kind) for interval in decomposition]
    expected = [(0, split, IntervalKind.linear), (split, Fraction(m), IntervalKind.superlinear)]
    if found != expected:
        raise DecompositionError('the roof of length {} splits as {}, not at {}'.format(m, found, split))
    return split


def _as_exponents(scales):
    return [scale.k if isinstance(scale, Scale) else int(scale) for scale in scales]


def _check_scales(family, scales):
    exponents = _as_exponents(scales)
    if not exponents:
        raise ScaleListError('no scales given')
    if exponents[-1] != family.scale.k:
        raise ScaleListError('the last scale 2^-{} is not the family scale 2^-{}'.format(exponents[-1], family.scale.k))
    if any(b <= a for a, b in zip([0] + exponents, exponents)):
        raise ScaleListError('scales must decrease strictly from 1: {}'.format(exponents))
    return exponents


def branching_numbers(family, scales):
    """The branching numbers N_j of a (Δ_j)-uniform family, or `NonUniformError` with a witness pair."""

    exponents = _check_scales(family, scales)
    numbers = []
    previous = 0
    for k in exponents:
        children = {}
        for cell in family:
            children.setdefault(cell.parent(Scale(previous)), set()).add(cell.parent(Scale(k)))
        counts = {Q: len(members) for Q, members in children.items()}
        ordered = sorted(counts, key=lambda Q: Q.sort_key())
        first = ordered[0]
        for Q in ordered[1:]:
            if counts[Q] != counts[first]:
                raise NonUniformError(k, (first, counts[first]), (Q, counts[Q]))
        numbers.append(counts[first])
        previous = k
    return numbers


def branching_function(family, base: Scale):
    """The branching function of a (Δ^i)-uniform family, δ = Δ^m."""

    if base.k < 1 or family.scale.k % base.k:
        raise ScaleListError('scale 2^-{} is not a power of 2^-{}'.format(family.scale.k, base.k))
    m = family.scale.k // base.k
    return BranchingFunction(base, branching_numbers(family, [base.k * i for i in range(1, m + 1)]))


def window_constant(numbers, exponents, a: int, b: int, t):
    """Smallest C making a uniform family a (t, C)-set between scales Δ_b and Δ_a.

    `exponents` lists k_0 = 0, k_1, …, k_n with Δ_j = 2^-k_j and `numbers` the N_1..N_n.
    """

    t = s_proxy(t)
    worst = Monomial(1)
    mass = 1
    for level in range(a + 1, b + 1):
        mass *= numbers[level - 1]
        worst = max(worst, pow2((exponents[level] - exponents[a]) * t) / mass)
    return worst


class ScaleDecomposition(object):
    """Scales Δ_j = Δ^(x_j), the partition into structured and bad indices, and the exponents t_j.

    Properties

        base : `dyadinc.dyadic.Scale`
        m : `int`
        scales : `list[int]`
            x_0 = 0 < x_1 < … < x_n = m.
        structured : `list[int]`
        bad : `list[int]`
        exponents : `dict[int, Fraction]`
            t_j for j in structured.
        tau : `Fraction`
        epsilon : `Fraction`
        attempts : `int`
        decomposition : `dyadinc.multiscale.IntervalDecomposition`
    """

    def __init__(self, base, m, scales, structured, bad, exponents, tau, epsilon, attempts, decomposition):
        self.base = base
        self.m = m
        self.scales = scales
        self.structured = structured
        self.bad = bad
        self.exponents = exponents
        self.tau = tau
        self.epsilon = epsilon
        self.attempts = attempts
        self.decomposition = decomposition

    def length(self, j: int):
        return self.scales[j] - self.scales[j - 1]

    def to_record(self):
        return ScaleDecompositionRecord({
            'base_exponent': self.base.k,
            'm': self.m,
            'scales': self.scales,
            'structured': self.structured,
            'bad': self.bad,
            'exponents': {str(j): str(value) for j, value in self.exponents.items()},
            'tau': str(self.tau),
            'epsilon': str(self.epsilon),
            'attempts': self.attempts,
            'intervals': [interval.to_record() for interval in self.decomposition]})

    def __repr__(self):
        return str(self.to_record().to_primitive())


def _snap(x):
    return math.floor(x + Fraction(1, 2))


def _assemble(f, decomposition, s):
    windows = []
    moved = Fraction(0)
    for interval in decomposition:
        a, b = _snap(interval.c), _snap(interval.d)
        moved += abs(a - interval.c) + abs(b - interval.d)
        if a < b:
            windows.append((a, b))
    scales = sorted({0, f.m} | {x for window in windows for x in window})
    structured, bad, exponents = [], [], {}
    starts = dict(windows)
    for j in range(1, len(scales)):
        a, b = scales[j - 1], scales[j]
        if starts.get(a) == b:
            structured.append(j)
            exponents[j] = min(Fraction(2), max(s, slope(f, a, b)))
        else:
            bad.append(j)
    return scales, structured, bad, exponents, moved


def multiscale_decompose(family, s, t, base: Scale, epsilon, retries: int = None):
    """Choose scales Δ_j = Δ^(x_j) splitting a uniform (δ,t,δ^-ε)-set into structured and bad windows.

    Each attempt runs `kaufman_decompose` at ε/2^r, snaps the window endpoints to the nearest
    integers and checks: the bad windows have total length at most εm plus the measured
    hypothesis slack and snapping; each structured window is a (t_j, Δ^-4·(Δ_{j-1}/Δ_j)^ε)-set;
    Σ_𝒮 (x_j − x_{j-1})·t_j ≥ m(t − ε); and no two bad windows are adjacent.

    Returns

        decomposition : `dyadinc.multiscale.ScaleDecomposition`
    """

    if retries is None:
        retries = config.DECOMPOSITION_RETRIES
    s, t, epsilon = s_proxy(s), s_proxy(t), Fraction(epsilon)
    constant = spread_certificate(family, t).constant()
    if constant > family.scale.power(-epsilon):
        raise DecompositionError('the family is not a (δ,{},δ^-{})-set: C = {}'.format(t, epsilon, float(constant)))
    f = branching_function(family, base)
    m = f.m
    slack = max(Fraction(0), max((t * i - f(i)) / m for i in range(m + 1)))
    exponents_k = [base.k * i for i in range(m + 1)]
    reason = 'no attempt made'
    for attempt in range(retries + 1):
        precision = epsilon / 2 ** attempt
        try:
            decomposition = kaufman_decompose(f, s, t, precision, slack=slack)
        except LeftoverBoundError as ex:
            reason = ex.message
            continue
        scales, structured, bad, exponents, moved = _assemble(f, decomposition, s)
        if not structured:
            reason = 'no structured window'
            continue
        bad_length = sum(scales[j] - scales[j - 1] for j in bad)
        allowance = epsilon * m + slack * m / (t - s) + moved
        if bad_length > allowance:
            reason = 'bad windows cover {} > {}'.format(bad_length, allowance)
            continue
        failed = None
        for j in structured:
            a, b = scales[j - 1], scales[j]
            C = window_constant(f.numbers, exponents_k, a, b, exponents[j])
            limit = pow2(base.k * config.WINDOW_SLACK_POWER) * pow2(base.k * (b - a) * epsilon)
            if C > limit:
                failed = 'window [{}, {}] has constant {} above {}'.format(a, b, float(C), float(limit))
                break
        if failed:
            reason = failed
            continue
        mass = sum((scales[j] - scales[j - 1]) * exponents[j] for j in structured)
        if mass < m * (t - epsilon):
            reason = 'structured exponent mass {} below {}'.format(mass, m * (t - epsilon))
            continue
        if any(j + 1 in bad for j in bad):
            reason = 'adjacent bad windows'
            continue
        tau = min(scales[j] - scales[j - 1] for j in structured) / Fraction(m)
        logger.info('Multiscale decomposition after %i attempts: %i structured, %i bad windows', attempt + 1, len(structured), len(bad))
        return ScaleDecomposition(base, m, scales, structured, bad, exponents, tau, precision, attempt + 1, decomposition)
    raise DecompositionError(reason)


def classify_scales(decomposition: ScaleDecomposition, t, epsilon_good):
    """Split the structured indices into good (t_j ≥ t − ε_G/2) and normal ones.

    The classes depend only on the exponents t_j already stored on the decomposition, so
    neither the family P nor s is taken; bad indices are carried over unchanged.

    Returns

        classes : `dict[int, dyadinc.enums.ScaleClass]`
            Class of every index 1..n.
        good_exponent : `Fraction`
            Σ_𝒢 (x_j − x_{j-1}) / m.
    """

    t, epsilon_good = s_proxy(t), Fraction(epsilon_good)
    classes = {j: ScaleClass.bad for j in decomposition.bad}
    for j in decomposition.structured:
        classes[j] = ScaleClass.good if decomposition.exponents[j] >= t - epsilon_good / 2 else ScaleClass.normal
    good_length = sum(decomposition.length(j) for j, kind in classes.items() if kind == ScaleClass.good)
    if good_length < decomposition.m * epsilon_good / 8:
        raise ScaleClassError(good_length, decomposition.m * epsilon_good / 8)
    return dict(sorted(classes.items())), Fraction(good_length, decomposition.m)


def uniformize(family, scales):
    """A (Δ_j)-uniform subfamily P′ ⊂ P with |P′|·(4·log2(1/δ))^n ≥ |P|·n^n.

    The bound uses log2 rather than the natural log, so for δ ≤ 1/2 the enforced check is the
    weaker of the two.

    Levels are processed from the finest up. At level j the parents at Δ_{j-1} are classed by
    the dyadic N with |P ∩ Q|_{Δ_j} ∈ [N, 2N); the class keeping the most δ-squares after
    trimming each parent to its N heaviest children wins, ties going to the smaller N.

    Returns

        uniform : same family type
            P′.
        numbers : `list[int]`
            The branching numbers N_1..N_n of P′.
    """

    exponents = _check_scales(family, scales)
    current = list(family)
    numbers = [None] * len(exponents)
    for index in range(len(exponents) - 1, -1, -1):
        k = exponents[index]
        above = Scale(exponents[index - 1] if index else 0)
        weights = {}
        for cell in current:
            weights.setdefault(cell.parent(above), {}).setdefault(cell.parent(Scale(k)), []).append(cell)
        classes = {}
        for Q, children in weights.items():
            N = 2 ** (len(children).bit_length() - 1)
            ordered = sorted(children, key=lambda child: (-len(children[child]), child.sort_key()))
            kept = [cell for child in ordered[:N] for cell in children[child]]
            classes.setdefault(N, []).append(kept)
        N = min(classes, key=lambda n: (-sum(len(kept) for kept in classes[n]), n))
        current = [cell for kept in classes[N] for cell in kept]
        numbers[index] = N
        logger.debug('Uniformization at 2^-%i keeps N = %i, %i squares', k, N, len(current))
    uniform = family.derive(current)
    if branching_numbers(uniform, exponents) != numbers:
        raise NonUniformError(exponents[-1], None, None)
    n = len(exponents)
    k = family.scale.k
    if len(uniform) * (4 * k) ** n < len(family) * n ** n:
        raise UniformizationBoundError(len(uniform), len(family), n, k)
    logger.info('Uniformized %i of %i squares over %i scales', len(uniform), len(family), n)
    return uniform, numbers


def uniform_refine(family, subfamily, scales, claims: list = None):
    """Uniformize P′ ⊂ P while keeping every branching number within a factor M of P's.

    M = L·(4·log2(1/δ))^n where L = |P|/|P′|. Each claim (j, t_j, C_j) asserting that P is a
    (t_j, C_j)-set between Δ_j and Δ_{j-1} is re-certified on P″ with constant M·C_j.

    Returns

        refined : same family type
            P″.
        numbers : `list[int]`
            The branching numbers of P″.
        M : `Fraction`
            The loss factor.
    """

    exponents = _check_scales(family, scales)
    original = branching_numbers(family, exponents)
    if not subfamily.issubset(family):
        raise ContainmentError(len(subfamily.difference(family)))
    L = Fraction(len(family), len(subfamily))
    M = L * (4 * family.scale.k) ** len(exponents)
    refined, numbers = uniformize(subfamily, exponents)
    for j, (before, after) in enumerate(zip(original, numbers), start=1):
        if after * M < before:
            raise UniformizationBoundError(after, before, j, family.scale.k)
    ladder = [0] + exponents
    for j, exponent, constant in claims or []:
        before = window_constant(original, ladder, j - 1, j, exponent)
        if before > Monomial(Fraction(constant)):
            raise ScaleClassError(before, constant)
        after = window_constant(numbers, ladder, j - 1, j, exponent)
        if after > Monomial(M) * Monomial(Fraction(constant)):
            raise UniformizationBoundError(float(after), float(M) * constant, j, family.scale.k)
    return refined, numbers, M


def measured_product_bound(configuration, scales):
    """Report the factors of the product inequality along a list of coarse scales.

    Runs `dyadinc.refine.induction_on_scales` at every scale and reports |𝒯₀|/M,
    |𝒯^Δ(𝒯)|/M_Δ, max_Q |𝒯_Q|/M_Q and the measured budget; nothing is asserted.
    """

    from .refine import induction_on_scales

    rows = []
    total = Fraction(len(configuration.tubes()), configuration.M)
    for scale in scales:
        coarse = scale if isinstance(scale, Scale) else Scale(int(scale))
        result = induction_on_scales(configuration, coarse)
        rows.append({
            'delta_exponent': coarse.k,
            'tubes_over_M': float(total),
            'coarse_over_M': len(result.coarse.tubes()) / result.coarse.M,
            'fine_over_M': max(len(f.tubes()) / f.M for f in result.fine.values()),
            'budget': float(result.budget)})
    return rows


class IntervalError(Exception):
    def __init__(self, reason):
        self.message = 'Invalid interval: {}'.format(reason)
        super().__init__(self.message)


class NonUniformError(Exception):
    def __init__(self, k, first, second):
        self.witness = (first, second)
        self.message = 'Family is not uniform at scale 2^-{}: {} and {} differ.'.format(k, first, second)
        super().__init__(self.message)


class KaufmanHypothesisError(Exception):
    def __init__(self, reason):
        self.message = 'Kaufman decomposition hypothesis fails: {}'.format(reason)
        super().__init__(self.message)


class LeftoverBoundError(Exception):
    def __init__(self, leftover, bound):
        self.witness = {'leftover': str(leftover), 'bound': str(bound)}
        self.message = 'Uncovered measure {} exceeds {}.'.format(leftover, bound)
        super().__init__(self.message)


class DecompositionError(Exception):
    def __init__(self, reason):
        self.message = 'Multiscale decomposition failed: {}'.format(reason)
        super().__init__(self.message)


class ScaleClassError(Exception):
    def __init__(self, value, bound):
        self.witness = {'value': str(value), 'bound': str(bound)}
        self.message = 'Scale classification bound fails: {} against {}.'.format(value, bound)
        super().__init__(self.message)


class ScaleListError(Exception):
    def __init__(self, reason):
        self.message = 'Invalid scale list: {}'.format(reason)
        super().__init__(self.message)


class ContainmentError(Exception):
    def __init__(self, outside):
        self.message = '{} members of the subfamily lie outside the family.'.format(outside)
        super().__init__(self.message)


class UniformizationBoundError(Exception):
    def __init__(self, kept, total, n, k):
        self.witness = {'kept': kept, 'total': total, 'n': n, 'k': k}
        self.message = 'Uniformization kept {} of {} (n = {}, k = {}), below its bound.'.format(kept, total, n, k)
        super().__init__(self.message)
