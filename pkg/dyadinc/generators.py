import logging
import math
from fractions import Fraction
from importlib import import_module

import numpy as np

from . import config
from .deltaset import spread_certificate
from .dyadic import DyadicInterval, DyadicSquare, IntervalFamily, Scale, SquareFamily
from .enums import Construction, Convention, GeneratorKind
from .exponents import pow2, s_proxy
from .incidence import NiceConfiguration, require_nice, tube_constant
from .multiscale import PiecewiseLinear
from .tubes import DyadicTube, TubeFamily, dual_star, tube_meets_square

logger = logging.getLogger(__name__)

# Branch id of the stream drawing per-level branching numbers; level streams use 0..m-1.
BRANCHING_STREAM = 2 ** 32
GENERATOR_KIND_MAPPINGS = {
    GeneratorKind.cantor: 'generate_cantor',
    GeneratorKind.product: 'generate_product',
    GeneratorKind.random_frostman: 'generate_random_frostman',
    GeneratorKind.cantor_target: 'generate_cantor_target',
    GeneratorKind.furstenberg: 'generate_furstenberg'
}


def rng(seed: int, *branch):
    """The PCG64 stream for a seed and a branch path.

    Streams are split by `numpy.random.SeedSequence([seed, *branch])`, so each branch
    is reproducible on its own.
    """

    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *branch])))


def _levels(scale: Scale):
    step = config.CANTOR_BASE_EXPONENT
    if scale.k % step:
        raise InfeasibleBranchingError('scale 2^-{} is not a power of 2^-{}'.format(scale.k, step))
    return scale.k // step


def branching_number(s, dimension: int = 2):
    """⌈(1/Δ)^s⌉ children per node, Δ = 2^-CANTOR_BASE_EXPONENT."""

    s = s_proxy(s)
    N = pow2(config.CANTOR_BASE_EXPONENT * s).ceil()
    if N > 2 ** (config.CANTOR_BASE_EXPONENT * dimension):
        raise InfeasibleBranchingError('{} children exceed the {} available'.format(N, 2 ** (config.CANTOR_BASE_EXPONENT * dimension)))
    return max(N, 1)


def uniform_set(scale: Scale, branching: list, seed: int, dimension: int = 2):
    """A seeded set whose dyadic tree keeps branching[ℓ] children per node at level ℓ.

    Levels are powers of Δ = 2^-CANTOR_BASE_EXPONENT; level ℓ draws from the stream
    `rng(seed, ℓ)`, visiting nodes in canonical order.
    """

    m = _levels(scale)
    if len(branching) != m:
        raise InfeasibleBranchingError('expected {} branching numbers, got {}'.format(m, len(branching)))
    step = config.CANTOR_BASE_EXPONENT
    side = 2 ** step
    available = side ** dimension
    nodes = [(0,) * dimension]
    for level, N in enumerate(branching):
        if not 1 <= N <= available:
            raise InfeasibleBranchingError('{} children of {} at level {}'.format(N, available, level))
        stream = rng(seed, level)
        following = []
        for node in sorted(nodes):
            chosen = stream.permutation(available)[:N]
            for code in sorted(int(c) for c in chosen):
                offsets = (code // side, code % side) if dimension == 2 else (code,)
                following.append(tuple(n * side + o for n, o in zip(node, offsets)))
        nodes = following
    if dimension == 2:
        return SquareFamily(scale, [DyadicSquare(scale.k, ix, iy) for ix, iy in nodes])
    return IntervalFamily(scale, [DyadicInterval(scale.k, i) for (i,) in nodes])


def cantor_set(scale: Scale, s, seed: int = 0, dimension: int = 2):
    """A seeded Cantor s-set keeping ⌈(1/Δ)^s⌉ children per node at every level."""

    N = branching_number(s, dimension)
    family = uniform_set(scale, [N] * _levels(scale), seed, dimension)
    certificate = spread_certificate(family, s)
    if certificate.constant() > config.CANTOR_CERTIFICATE_BUDGET:
        raise CertificateBudgetError(certificate.to_primitive(), config.CANTOR_CERTIFICATE_BUDGET)
    logger.debug('Cantor set with %i members, %i children per node', len(family), N)
    return family


def product_set(scale: Scale, s_a, s_b, seed: int = 0):
    """A × B for two seeded one-dimensional Cantor sets."""

    A = cantor_set(scale, s_a, seed, dimension=1)
    B = cantor_set(scale, s_b, seed + 1, dimension=1)
    return SquareFamily(scale, [DyadicSquare(scale.k, a.i, b.i) for a in A for b in B])


def random_frostman(scale: Scale, s, seed: int = 0, dimension: int = 2):
    """A uniform set whose per-level branching is drawn between ⌈(1/Δ)^s⌉ and the maximum."""

    low = branching_number(s, dimension)
    high = 2 ** (config.CANTOR_BASE_EXPONENT * dimension)
    stream = rng(seed, BRANCHING_STREAM)
    branching = [int(n) for n in stream.integers(low, high + 1, size=_levels(scale))]
    return uniform_set(scale, branching, seed, dimension)


def sample_subset(family, count: int, seed: int = 0):
    """`count` members of a family chosen by a seeded permutation."""

    order = rng(seed, len(family)).permutation(len(family))[:count]
    return family.derive([family[int(i)] for i in sorted(order)])


def cantor_target(scale: Scale, s, seed: int = 0):
    """Lines through the origin with Cantor slopes, cut at Cantor radii.

    Radii R ⊂ [1/2, 1) and slopes Θ ⊂ [0, 1) are one-dimensional Cantor s-sets; K holds the
    δ-squares containing the points (r, θr), all inside [0, 1)². Radii are halved onto
    [1/2, 1), so two radii (or two slopes at the same radius) may share a δ-square and
    |K ∩ ℓ| can fall below |R|.

    Returns

        K : `dyadinc.dyadic.SquareFamily`
            The target set.
        lines : `dyadinc.tubes.TubeFamily`
            One δ-tube per slope, containing the line y = θx.
        incidences : `dict[dyadinc.tubes.DyadicTube, dyadinc.dyadic.SquareFamily]`
            The squares of K along each line.
    """

    radii = cantor_set(scale, s, seed, dimension=1)
    slopes = cantor_set(scale, s, seed + 1, dimension=1)
    delta = scale.value
    incidences = {}
    for interval in slopes:
        theta = interval.i * delta
        line = DyadicTube(DyadicSquare(scale.k, interval.i, 0), Convention.main_text)
        squares = []
        for radius in radii:
            r = Fraction(1, 2) + radius.center() / 2
            squares.append(DyadicSquare(scale.k, math.floor(r / delta), math.floor(theta * r / delta)))
        incidences[line] = SquareFamily(scale, squares)
    K = SquareFamily(scale, [p for family in incidences.values() for p in family])
    lines = TubeFamily(scale, list(incidences), Convention.main_text)
    logger.info('Cantor target with %i squares on %i lines', len(K), len(lines))
    return K, lines, incidences


def dimension_proxy(family):
    """log|K|_δ / log(1/δ)."""

    return math.log2(len(family)) / family.scale.k if family.scale.k else 0.0


def check_dimension(family, target, tolerance=None):
    """`dimension_proxy` of the family, required within `tolerance` of `target`."""

    if tolerance is None:
        tolerance = config.DIMENSION_PROXY_TOLERANCE
    proxy = dimension_proxy(family)
    if abs(proxy - float(target)) > float(tolerance):
        raise DimensionProxyError(proxy, target, tolerance)
    return proxy


def random_branching_function(m: int, t, slack, seed: int = 0):
    """A seeded 2-Lipschitz function on [0, m] with f(0) = 0 and f(x) ≥ tx − slack·m.

    Slopes are drawn from the multiples of 1/4 in [0, 2]; a draw that would cross below the
    line tx − slack·m at the next integer is replaced by slope 2.
    """

    t, slack = s_proxy(t), Fraction(slack)
    if not 0 < t <= 2:
        raise InfeasibleBranchingError('slope bound t = {} outside (0, 2]'.format(t))
    ys = [Fraction(0)]
    for x, draw in enumerate(rng(seed, BRANCHING_STREAM, m).integers(0, 9, size=m), start=1):
        y = ys[-1] + Fraction(int(draw), 4)
        ys.append(y if y >= t * x - slack * m else ys[-1] + 2)
    return PiecewiseLinear(range(m + 1), ys)


def _slope_selection(scale: Scale, s, M: int, seed: int):
    slopes = [interval.i for interval in cantor_set(scale, s, seed, dimension=1)]
    if len(slopes) < M:
        raise InfeasibleBranchingError('{} slopes cannot provide M = {}'.format(len(slopes), M))
    return [slopes[(i * len(slopes)) // M] for i in range(M)]


def tube_through_center(p: DyadicSquare, slope_index: int, scale: Scale, convention: Convention = Convention.main_text):
    """The δ-tube with the given slope containing the line through the center of p."""

    x, y = p.center()
    sigma = Fraction(slope_index, scale.inverse)
    intercept = x - sigma * y if convention == Convention.appendix else y - sigma * x
    return DyadicTube(DyadicSquare(scale.k, slope_index, math.floor(intercept * scale.inverse)), convention)


def _center_construction(scale: Scale, s, t, seed: int, shared_slopes: bool, single_square: bool, convention: Convention):
    if single_square:
        P = SquareFamily(scale, [DyadicSquare(scale.k, scale.inverse // 2, scale.inverse // 2)])
    else:
        P = cantor_set(scale, t, seed)
    M = scale.power(-s).ceil()
    assignment = {}
    shared = _slope_selection(scale, s, M, seed) if shared_slopes else None
    for position, p in enumerate(P):
        selection = shared or _slope_selection(scale, s, M, seed + 1 + position)
        tubes = [tube_through_center(p, ix, scale, convention) for ix in selection]
        if not all(tube_meets_square(T, p) for T in tubes):
            raise InfeasibleBranchingError('a constructed tube misses {}'.format(p))
        assignment[p] = TubeFamily(scale, tubes, convention)
    return P, assignment, M


def _dual_swap(scale: Scale, incidences: dict):
    """Squares 𝐃*(T) carrying the tubes 𝐃(p), p ∈ 𝒫(T)."""

    assignment = {}
    for T, squares in sorted(incidences.items(), key=lambda item: item[0].sort_key()):
        missed = [p for p in squares if not tube_meets_square(T, p)]
        if missed:
            raise InfeasibleBranchingError('tube {} misses {}'.format(T, missed[0]))
        assignment[dual_star(T)] = TubeFamily(scale, [DyadicTube(p, Convention.main_text) for p in squares], Convention.main_text)
    return SquareFamily(scale, list(assignment)), assignment


def _dual_construction(scale: Scale, s, t, seed: int):
    """𝒯 = 𝐃(A × B) with A an s-set and B a (t − s)-set of slopes and intercepts in [0, 1/4).

    A and B are Cantor sets one base level coarser, read at scale δ, so every line of 𝒯 stays
    below y = 1/2 over [0, 1). Each tube carries the M squares its central line crosses on a
    Cantor s-set of columns.
    """

    if not s < t <= s + 1:
        raise InfeasibleBranchingError('the dual construction needs s < t <= s + 1, got s = {}, t = {}'.format(s, t))
    if scale.k <= config.CANTOR_BASE_EXPONENT:
        raise InfeasibleBranchingError('scale 2^-{} leaves no room for the dual construction'.format(scale.k))
    inner = Scale(scale.k - config.CANTOR_BASE_EXPONENT)
    A = cantor_set(inner, s, seed, dimension=1)
    B = cantor_set(inner, t - s, seed + 1, dimension=1)
    M = scale.power(-s).ceil()
    columns = _slope_selection(scale, s, M, seed + 2)
    delta = scale.value
    incidences = {}
    for a in A:
        for b in B:
            T = DyadicTube(DyadicSquare(scale.k, a.i, b.i), Convention.main_text)
            slope, intercept = T.param.center()
            incidences[T] = [DyadicSquare(scale.k, i, math.floor((slope * (i + Fraction(1, 2)) * delta + intercept) / delta)) for i in columns]
    logger.debug('Dual construction: %i tubes with %i squares each', len(incidences), M)
    return _dual_swap(scale, incidences) + (M,)


def _target_construction(scale: Scale, s, t, seed: int):
    """The lines and squares of `cantor_target`, swapped by 𝐃*; M is capped by the shortest line."""

    if t != s:
        raise InfeasibleBranchingError('the target construction needs t = s, got s = {}, t = {}'.format(s, t))
    _, _, incidences = cantor_target(scale, s, seed)
    M = min(scale.power(-s).ceil(), min(len(squares) for squares in incidences.values()))
    chosen = {T: [squares[(i * len(squares)) // M] for i in range(M)] for T, squares in incidences.items()}
    return _dual_swap(scale, chosen) + (M,)


def furstenberg_config(scale: Scale, s, t, seed: int = 0, shared_slopes: bool = False, single_square: bool = False,
                      convention: Convention = Convention.main_text, construction: Construction = Construction.centers):
    """A (δ,s,C,M)-nice configuration over a (δ,t)-set, with M = ⌈δ^-s⌉.

    With the centers construction the squares form a Cantor t-set and each square receives
    M tubes through its center whose slopes form a Cantor s-set, so the tube family inherits
    the slope set's spread up to the 10-to-1 fiber loss.

    The dual construction builds a (δ,t)-set of tubes 𝐃(A × B) with M squares along each, then
    swaps roles with 𝐃*: the squares 𝐃*(T) lie in [-1/4, 0) × [0, 1/4). With t = 2s this is the
    product case. The target construction (t = s) swaps the lines of `cantor_target` the same
    way. Both swaps need main-text tubes.

    Parameters

        scale : `dyadinc.dyadic.Scale`
        s : `Fraction`
        t : `Fraction`

    Optional Arguments

        seed : `int`
        shared_slopes : `bool`
            Centers only; every square uses the same slope selection.
        single_square : `bool`
            Centers only; 𝒫 is the square at (1/2, 1/2).
        convention : `dyadinc.enums.Convention`
        construction : `dyadinc.enums.Construction`

    Returns

        configuration : `dyadinc.incidence.NiceConfiguration`
        tubes : `dyadinc.tubes.TubeFamily`
            The union of the 𝒯(p).
    """

    s, t = s_proxy(s), s_proxy(t)
    if not (0 < s <= min(1, t) and t <= 2):
        raise InfeasibleBranchingError('exponents s = {}, t = {} out of range'.format(s, t))
    if construction == Construction.centers:
        P, assignment, M = _center_construction(scale, s, t, seed, shared_slopes, single_square, convention)
    elif convention != Convention.main_text:
        raise InfeasibleBranchingError('the {} construction needs main_text tubes'.format(construction.name))
    elif construction == Construction.dual:
        P, assignment, M = _dual_construction(scale, s, t, seed)
    else:
        P, assignment, M = _target_construction(scale, s, t, seed)
    configuration = NiceConfiguration(scale, s, 1, M, P, assignment)
    C = tube_constant(configuration)
    if C > config.FURSTENBERG_CERTIFICATE_BUDGET:
        raise CertificateBudgetError({'C': float(C)}, config.FURSTENBERG_CERTIFICATE_BUDGET)
    configuration.C = C
    require_nice(configuration)
    logger.info('Furstenberg configuration: %i squares, M = %i, C = %f', len(P), M, float(C))
    return configuration, configuration.tubes()


def generate_cantor(spec):
    return cantor_set(Scale(spec.scale_exponent), Fraction(spec.s), spec.seed, spec.dimension)


def generate_product(spec):
    return product_set(Scale(spec.scale_exponent), Fraction(spec.s), Fraction(spec.t or spec.s), spec.seed)


def generate_random_frostman(spec):
    return random_frostman(Scale(spec.scale_exponent), Fraction(spec.s), spec.seed, spec.dimension)


def generate_cantor_target(spec):
    return cantor_target(Scale(spec.scale_exponent), Fraction(spec.s), spec.seed)


def generate_furstenberg(spec):
    options = spec.options or {}
    return furstenberg_config(
        Scale(spec.scale_exponent),
        Fraction(spec.s),
        Fraction(spec.t or spec.s),
        spec.seed,
        shared_slopes=options.get('shared_slopes') == 'true',
        single_square=options.get('single_square') == 'true',
        convention=Convention[options.get('convention', 'main_text')],
        construction=Construction[options.get('construction', 'centers')])


def generate(spec):
    """Run the generator a `dyadinc.entities.GeneratorSpec` names.

    Parameters

        spec : `dyadinc.entities.GeneratorSpec`
            The generator inputs.
    """

    spec.validate()
    return getattr(
        import_module(__name__),
        GENERATOR_KIND_MAPPINGS[GeneratorKind[spec.kind]])(spec)


class InfeasibleBranchingError(Exception):
    def __init__(self, reason):
        self.message = 'Infeasible construction: {}'.format(reason)
        super().__init__(self.message)


class CertificateBudgetError(Exception):
    def __init__(self, witness, budget):
        self.witness = witness
        self.message = 'Generated family exceeds its certificate budget {}: {}'.format(budget, witness)
        super().__init__(self.message)


class DimensionProxyError(Exception):
    def __init__(self, proxy, target, tolerance):
        self.witness = {'proxy': proxy, 'target': float(target)}
        self.message = 'Dimension proxy {:.4f} is more than {} away from {}.'.format(proxy, tolerance, target)
        super().__init__(self.message)
