import logging
from collections import Counter
from fractions import Fraction

from . import config
from .deltaset import spread_certificate
from .dyadic import DyadicSquare, Scale, ScaleOrderError, SquareFamily, group_by_parent
from .entities.objects import ExactValue, InductionTrace, ThickCoverTrace
from .incidence import NiceConfiguration, log_factor, require_nice, tube_constant
from .tubes import DyadicTube, TubeFamily, rescale_tube_cover, tube_meets_square, tubes_with_slope

logger = logging.getLogger(__name__)

UNIT_SQUARE = DyadicSquare(0, 0, 0)


def _level(count: int):
    """The dyadic level j with 2^(j-1) < count ≤ 2^j."""

    return (count - 1).bit_length()


def _bucket(counts: dict):
    buckets = {}
    for key, count in counts.items():
        buckets.setdefault(_level(count), []).append(key)
    return buckets


def _popular_level(buckets: dict, weight, floor=0):
    """The level maximizing weight(j, members) among levels with 2^j ≥ floor; ties go to the smaller level."""

    candidates = [j for j in buckets if 2 ** j >= floor]
    if not candidates:
        raise EmptyBucketError('no dyadic level reaches the floor {}'.format(float(floor)))
    return min(candidates, key=lambda j: (-weight(j, buckets[j]), j))


def _key(cell):
    return '{},{}'.format(cell.ix, cell.iy)


class ThickCoverResult(object):
    """Output of the thick-tube refinement.

    Properties

        P_bar : `dyadinc.dyadic.SquareFamily`
            The squares sharing the popular pair (m1, m2).
        T_Delta : `dyadinc.tubes.TubeFamily`
            The selected Δ-tubes.
        H : `int`
            Uniform incidence floor 2^j·m1.
        C2 : `dyadinc.exponents.Monomial`
            Spread constant of T_Delta.
        thick : `dict[dyadinc.dyadic.DyadicSquare, list]`
            The Δ-tubes 𝒯_Δ(p) selected for each square of P_bar.
        trace : `dyadinc.entities.ThickCoverTrace`
            The pigeonhole trace.
    """

    def __init__(self, P_bar, T_Delta, H, C2, thick, trace):
        self.P_bar = P_bar
        self.T_Delta = T_Delta
        self.H = H
        self.C2 = C2
        self.thick = thick
        self.trace = trace

    def __repr__(self):
        return 'ThickCoverResult(|P_bar|={}, |T_Delta|={}, H={})'.format(len(self.P_bar), len(self.T_Delta), self.H)


def thick_tube_refine(configuration: NiceConfiguration, coarse: Scale, fraction=None, spread_budget: int = None, spread_power: int = None):
    """Cover a nice configuration by Δ-tubes carrying a uniform number of incidences.

    The pigeonholing runs in four passes: the Δ-cover of every 𝒯(p) is bucketed by how many
    tubes of 𝒯(p) each Δ-tube holds, the level j(p) maximizing 2^j·|bucket| is kept, the most
    frequent pair (m1, m2) selects 𝒫̄, and finally the Δ-tubes are bucketed by the number of
    squares of 𝒫̄ selecting them.

    Parameters

        configuration : `dyadinc.incidence.NiceConfiguration`
            A nice configuration at scale δ.
        coarse : `dyadinc.dyadic.Scale`
            The scale Δ ≥ δ.

    Optional Arguments

        fraction : `Fraction`
            The constant c in the level floors c·M·Δ² and c·|𝒫̄|·Δ².
        spread_budget : `int`
            Allowed ratio C2 / (C1·log-factor).
        spread_power : `int`
            Power of log2(1/δ) in the spread allowance.

    Returns

        result : `dyadinc.refine.ThickCoverResult`
    """

    if fraction is None:
        fraction = config.PIGEONHOLE_FRACTION
    if spread_budget is None:
        spread_budget = config.THICK_SPREAD_BUDGET
    if spread_power is None:
        spread_power = config.THICK_SPREAD_POWER
    scale = configuration.scale
    if coarse < scale:
        raise ScaleOrderError(scale.k, coarse.k)
    if not len(configuration.P):
        raise EmptyBucketError('the configuration has no squares')
    area = coarse.value ** 2
    C1 = tube_constant(configuration)

    selected, pairs, levels = {}, {}, {}
    for p in configuration.P:
        family = configuration.assignment[p]
        buckets = _bucket(Counter(T.ancestor(coarse) for T in family))
        j = _popular_level(buckets, lambda j, members: 2 ** j * len(members), fraction * len(family) * area)
        selected[p] = sorted(buckets[j], key=lambda T: T.sort_key())
        levels[p] = j
        pairs[p] = (2 ** j, len(buckets[j]))
    tally = Counter(pairs.values())
    (m1, m2), _ = min(tally.items(), key=lambda item: (-item[1], item[0]))
    P_bar = configuration.P.derive([p for p in configuration.P if pairs[p] == (m1, m2)])
    logger.debug('Pigeonholed (m1, m2) = (%i, %i) among %i pairs, keeping %i of %i squares', m1, m2, len(tally), len(P_bar), len(configuration.P))

    owners = Counter(thick for p in P_bar for thick in selected[p])
    buckets = _bucket(owners)
    j = _popular_level(buckets, lambda j, members: 2 ** j * len(members), fraction * len(P_bar) * area)
    convention = configuration.assignment[P_bar[0]].convention
    T_Delta = TubeFamily(coarse, buckets[j], convention)
    H = 2 ** j * m1

    incidences = Counter()
    for p in P_bar:
        for T in configuration.assignment[p]:
            thick = T.ancestor(coarse)
            if thick in T_Delta:
                incidences[thick] += 1
    for thick in T_Delta:
        if incidences[thick] * config.THICK_INCIDENCE_FLOOR < H:
            raise RefinementAssertionError('thick tube {} carries {} incidences, below H/{} with H = {}'.format(
                thick, incidences[thick], config.THICK_INCIDENCE_FLOOR, H), {'ix': thick.slope_index, 'iy': thick.intercept_index})
        if all(p.in_unit_square() for p in P_bar) and not tube_meets_square(thick, UNIT_SQUARE):
            raise RefinementAssertionError('thick tube {} misses the unit square'.format(thick))
    C2 = spread_certificate(T_Delta.params(), configuration.s).constant()
    if C2 > C1 * spread_budget * log_factor(scale, spread_power):
        raise RefinementAssertionError('thick spread constant {} exceeds {}·log^{}·{}'.format(float(C2), spread_budget, spread_power, float(C1)))

    trace = ThickCoverTrace({
        'delta_exponent': coarse.k,
        'm1': m1,
        'm2': m2,
        'square_level': j,
        'H': H,
        'pairs': len(tally),
        'C1': ExactValue.of(C1),
        'C2': ExactValue.of(C2),
        'levels': {_key(p): levels[p] for p in P_bar}})
    logger.info('Thick cover at 2^-%i: %i squares, %i thick tubes, H = %i', coarse.k, len(P_bar), len(T_Delta), H)
    return ThickCoverResult(P_bar, T_Delta, H, C2, {p: selected[p] for p in P_bar}, trace)


class TubePacket(object):
    """The tubes of 𝒯(p) inside one thick tube, with the tube representing them.

    Properties

        owner : `dyadinc.dyadic.DyadicSquare`
            The square p.
        parent : `dyadinc.tubes.DyadicTube`
            The common ancestor at the packet scale.
        members : `dyadinc.tubes.TubeFamily`
            The tubes of the packet.
        representative : `dyadinc.tubes.DyadicTube`
            A tube meeting p whose slope is σ(parent).
        inside : `bool`
            Whether the representative lies inside the parent.
    """

    def __init__(self, owner, parent, members, representative, inside=True):
        self.owner = owner
        self.parent = parent
        self.members = members
        self.representative = representative
        self.inside = inside

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return 'TubePacket(parent={}, size={}, representative={})'.format(self.parent, len(self.members), self.representative)


def _representative(parent: DyadicTube, p: DyadicSquare, scale: Scale, lowest: int):
    shift = scale.k - parent.k
    slope_index = parent.slope_index << shift
    first = parent.intercept_index << shift
    last = first + 2 ** shift
    candidates = tubes_with_slope(slope_index, p, scale, parent.convention)
    if not candidates:
        raise MissingRepresentativeError(parent, p)
    inside = [T for T in candidates if first <= T.intercept_index < last]
    if inside:
        below = [T for T in inside if T.intercept_index <= lowest]
        return (below[-1] if below else inside[0]), True
    # The re-sloped tube left the parent's intercept range; take the nearest one meeting p.
    nearest = min(candidates, key=lambda T: (min(abs(T.intercept_index - first), abs(T.intercept_index - last + 1)), T.intercept_index))
    return nearest, False


def tube_packets(Tp: TubeFamily, p: DyadicSquare, coarse: Scale):
    """Partition the tubes through p by their ancestor at the packet scale and pick representatives.

    A representative keeps the slope σ(parent), meets p and, when possible, lies inside the
    parent, sliding the intercept down to the nearest index not above the packet's lowest member.
    """

    if coarse < Tp.scale:
        raise ScaleOrderError(Tp.scale.k, coarse.k)
    groups = {}
    for T in Tp:
        if not tube_meets_square(T, p):
            raise RefinementAssertionError('tube {} does not meet {}'.format(T, p))
        groups.setdefault(T.ancestor(coarse), []).append(T)
    packets = []
    for parent in sorted(groups, key=lambda T: T.sort_key()):
        members = Tp.derive(groups[parent])
        representative, inside = _representative(parent, p, Tp.scale, members[0].intercept_index)
        if not inside:
            logger.debug('Representative of %s lies outside its parent', parent)
        packets.append(TubePacket(p, parent, members, representative, inside))
    return packets


def separation_gap(constant: int = None):
    """Intercept gap, in δ units, making two equal-slope tubes separated."""

    if constant is None:
        constant = config.SEPARATION_CONSTANT
    return 3 * constant + 3


def are_separated(first: DyadicTube, second: DyadicTube, constant: int = None):
    return first.slope_index != second.slope_index or abs(first.intercept_index - second.intercept_index) >= separation_gap(constant)


def separated_subset(tubes: TubeFamily, constant: int = None):
    """A pairwise separated subfamily keeping at least |tubes|/gap members.

    Within each slope class the tubes are scanned by intercept and a tube is kept when its
    intercept is at least the gap above the last kept one.
    """

    gap = separation_gap(constant)
    kept = []
    last = {}
    for T in tubes:
        previous = last.get(T.slope_index)
        if previous is None or T.intercept_index - previous >= gap:
            kept.append(T)
            last[T.slope_index] = T.intercept_index
    return tubes.derive(kept)


class InductionResult(object):
    """Output of the induction-on-scales refinement.

    Properties

        P : `dyadinc.dyadic.SquareFamily`
            The refined squares.
        families : `dict[dyadinc.dyadic.DyadicSquare, dyadinc.tubes.TubeFamily]`
            𝒯(p) for every p in P.
        coarse : `dyadinc.incidence.NiceConfiguration`
            The nice configuration (𝒟_Δ(𝒫), 𝒯^Δ(𝒯)).
        fine : `dict[dyadinc.dyadic.DyadicSquare, dyadinc.incidence.NiceConfiguration]`
            The rescaled configuration (S_Q(𝒫∩Q), 𝒯_Q) of every coarse square.
        budget : `Fraction`
            Measured budget of the product inequality.
        trace : `dyadinc.entities.InductionTrace`
    """

    def __init__(self, P, families, coarse, fine, budget, trace):
        self.P = P
        self.families = families
        self.coarse = coarse
        self.fine = fine
        self.budget = budget
        self.trace = trace

    def tubes(self):
        members = [T for family in self.families.values() for T in family]
        return TubeFamily(self.P.scale, members, self.coarse.tubes().convention)

    def __repr__(self):
        return 'InductionResult(|P|={}, coarse={}, budget={})'.format(len(self.P), len(self.coarse.P), float(self.budget))


def _trim(family, size: int):
    return family.derive(list(family)[:size])


def _rescaled_square(p: DyadicSquare, Q: DyadicSquare, relative: Scale):
    n = 2 ** relative.k
    return DyadicSquare(relative.k, p.ix - Q.ix * n, p.iy - Q.iy * n)


def _fine_configuration(squares, families, Q, coarse, configuration):
    relative = configuration.scale / coarse
    convention = configuration.tubes().convention
    representatives = {}
    for p in squares:
        packets = tube_packets(families[p], p, relative)
        buckets = _bucket({packet: len(packet) for packet in packets})
        j = _popular_level(buckets, lambda j, members: 2 ** j * len(members))
        representatives[p] = [packet.representative for packet in buckets[j]]
    # M(p) pigeonhole: keep the squares whose packet count sits in the most populated level.
    levels = _bucket({p: len(representatives[p]) for p in squares})
    j = _popular_level(levels, lambda j, members: len(members))
    kept = sorted(levels[j], key=lambda p: p.sort_key())
    chosen = TubeFamily(configuration.scale, [T for p in kept for T in representatives[p]], convention)
    separated = separated_subset(chosen)
    allowed = set(separated)
    representatives = {p: [T for T in representatives[p] if T in allowed] for p in kept}
    # M(p) pigeonhole again, over the separated representatives only.
    levels = _bucket({p: len(reps) for p, reps in representatives.items() if reps})
    j = _popular_level(levels, lambda j, members: len(members))
    kept = sorted(levels[j], key=lambda p: p.sort_key())
    logger.debug('Separation kept %i of %i representatives over %i squares', len(separated), len(chosen), len(kept))

    assignment = {}
    for p in kept:
        q = _rescaled_square(p, Q, relative)
        picks = []
        for T in representatives[p]:
            cover = [S for S in rescale_tube_cover(T, Q) if tube_meets_square(S, q)]
            if not cover:
                raise RefinementAssertionError('no rescaled tube of {} meets {}'.format(T, q))
            picks.append(cover[0])
        assignment[q] = TubeFamily(relative, picks, convention)
    M_Q = min(len(family) for family in assignment.values())
    assignment = {q: _trim(family, M_Q) for q, family in assignment.items()}
    fine = NiceConfiguration(relative, configuration.s, 1, M_Q, SquareFamily(relative, list(assignment)), assignment)
    fine.C = tube_constant(fine)
    require_nice(fine)
    return kept, fine, len(separated)


def induction_on_scales(configuration: NiceConfiguration, coarse: Scale):
    """Split a nice configuration into a coarse configuration at Δ and rescaled configurations at δ/Δ.

    Every coarse square Q runs the thick-tube refinement on 𝒫∩Q; the coarse squares are
    pigeonholed on |𝒯̄_Δ(Q)|, the Δ-tubes on |𝒯₀ ∩ 𝐓|, and each 𝒯(p) is cut down to the tubes
    inside the surviving Δ-tubes. Tube packets at δ/Δ then yield the rescaled families 𝒯_Q.
    All four conclusions and the product inequality
    |𝒯₀|/M ≥ budget⁻¹·(|𝒯^Δ(𝒯)|/M_Δ)·max_Q(|𝒯_Q|/M_Q) are checked before returning.

    Parameters

        configuration : `dyadinc.incidence.NiceConfiguration`
            A nice configuration at scale δ.
        coarse : `dyadinc.dyadic.Scale`
            The scale Δ ≥ δ.

    Returns

        result : `dyadinc.refine.InductionResult`
    """

    scale = configuration.scale
    if coarse < scale:
        raise ScaleOrderError(scale.k, coarse.k)
    require_nice(configuration)
    C1 = tube_constant(configuration)
    T0 = configuration.tubes()
    count_allowance = config.INDUCTION_CONCLUSION_BUDGET * log_factor(scale, config.INDUCTION_CONCLUSION_POWER)
    constant_allowance = C1 * config.THICK_SPREAD_BUDGET * log_factor(scale, config.INDUCTION_BUDGET_POWER)

    original = group_by_parent(configuration.P, coarse)
    covers = {Q: thick_tube_refine(configuration.restrict(members), coarse) for Q, members in sorted(original.items(), key=lambda item: item[0].sort_key())}

    levels = _bucket({Q: len(result.T_Delta) for Q, result in covers.items()})
    j = _popular_level(levels, lambda j, members: len(members))
    M_bar = 2 ** j
    squares = levels[j]

    inside = Counter(T.ancestor(coarse) for T in T0)
    candidates = {thick for Q in squares for thick in covers[Q].T_Delta}
    thick_levels = _bucket({thick: inside[thick] for thick in candidates})
    pairs = Counter(thick for Q in squares for thick in covers[Q].T_Delta)
    j = _popular_level(thick_levels, lambda j, members: sum(pairs[thick] for thick in members))
    N = 2 ** j
    selected = set(thick_levels[j])
    restricted = {Q: covers[Q].T_Delta.derive([thick for thick in covers[Q].T_Delta if thick in selected]) for Q in squares}
    restricted = {Q: family for Q, family in restricted.items() if len(family)}
    sizes = _bucket({Q: len(family) for Q, family in restricted.items()})
    j = _popular_level(sizes, lambda j, members: sum(len(restricted[Q]) for Q in members))
    squares = sorted(sizes[j], key=lambda Q: Q.sort_key())
    M_delta = min(len(restricted[Q]) for Q in squares)
    coarse_assignment = {Q: _trim(restricted[Q], M_delta) for Q in squares}
    logger.debug('Coarse pigeonhole: M_bar = %i, N = %i, M_delta = %i over %i squares', M_bar, N, M_delta, len(squares))

    families, fine, M_Q, C_Q, separated = {}, {}, {}, {}, {}
    for Q in squares:
        allowed = set(coarse_assignment[Q])
        candidates = {}
        for p in covers[Q].P_bar:
            family = configuration.assignment[p]
            kept = family.derive([T for T in family if T.ancestor(coarse) in allowed])
            if len(kept):
                candidates[p] = kept
        if not candidates:
            raise EmptyBucketError('no square of {} keeps a tube'.format(Q))
        buckets = _bucket({p: len(family) for p, family in candidates.items()})
        j = _popular_level(buckets, lambda j, members: 2 ** j * len(members))
        kept, fine[Q], separated[_key(Q)] = _fine_configuration(sorted(buckets[j], key=lambda p: p.sort_key()), candidates, Q, coarse, configuration)
        for p in kept:
            families[p] = candidates[p]
        M_Q[_key(Q)] = fine[Q].M
        C_Q[_key(Q)] = float(fine[Q].C)
        if len(kept) * count_allowance < len(original[Q]):
            raise RefinementAssertionError('square {} kept {} of {} squares'.format(Q, len(kept), len(original[Q])), {'ix': Q.ix, 'iy': Q.iy})
        if fine[Q].C > constant_allowance:
            raise RefinementAssertionError('rescaled spread constant {} at {} exceeds {}'.format(float(fine[Q].C), Q, float(constant_allowance)))

    P = configuration.P.derive(list(families))
    for p, family in families.items():
        if len(family) * count_allowance < configuration.M:
            raise RefinementAssertionError('square {} kept {} of {} tubes'.format(p, len(family), configuration.M), {'ix': p.ix, 'iy': p.iy})

    coarse_squares = SquareFamily(coarse, squares)
    coarse_configuration = NiceConfiguration(coarse, configuration.s, 1, M_delta, coarse_squares, coarse_assignment)
    coarse_configuration.C = tube_constant(coarse_configuration)
    require_nice(coarse_configuration)
    if coarse_configuration.C > constant_allowance:
        raise RefinementAssertionError('coarse spread constant {} exceeds {}'.format(float(coarse_configuration.C), float(constant_allowance)))

    coarse_ratio = Fraction(len(coarse_configuration.tubes()), M_delta)
    fine_ratio = max(Fraction(len(f.tubes()), f.M) for f in fine.values())
    budget = coarse_ratio * fine_ratio / Fraction(len(T0), configuration.M)
    limit = log_factor(scale, config.INDUCTION_BUDGET_POWER)
    if budget > limit:
        raise RefinementAssertionError('product inequality needs budget {} above {}'.format(float(budget), limit))

    trace = InductionTrace({
        'delta_exponent': coarse.k,
        'M_bar': M_bar,
        'N': N,
        'M_delta': M_delta,
        'M_Q': M_Q,
        'C_delta': ExactValue.of(coarse_configuration.C),
        'C_Q': C_Q,
        'separated': separated,
        'budget': float(budget),
        'budget_limit': limit})
    logger.info('Induction on scales at 2^-%i: %i coarse squares, %i squares, budget %f', coarse.k, len(squares), len(P), float(budget))
    return InductionResult(P, families, coarse_configuration, fine, budget, trace)


class EmptyBucketError(Exception):
    def __init__(self, reason):
        self.message = 'Pigeonholing found no admissible bucket: {}'.format(reason)
        super().__init__(self.message)


class RefinementAssertionError(Exception):
    def __init__(self, reason, witness = None):
        self.witness = witness
        self.message = 'Refinement check failed: {}'.format(reason)
        super().__init__(self.message)


class MissingRepresentativeError(Exception):
    def __init__(self, parent, square):
        self.witness = (parent, square)
        self.message = 'No tube with the slope of {} meets {}.'.format(parent, square)
        super().__init__(self.message)
