import logging
import math
from collections import Counter
from fractions import Fraction

from . import config
from .deltaset import CertificateBudgetError, frostman_extract, spread_certificate
from .dyadic import DyadicInterval, DyadicSquare, IntervalFamily, Scale, SquareFamily, renormalize
from .entities.objects import EnergyRow
from .enums import Convention
from .exponents import Monomial, s_proxy
from .tubes import DyadicTube, TubeFamily, tube_contains_point, tube_meets_square

logger = logging.getLogger(__name__)


class DiscreteMeasure(object):
    """Finitely many dyadic atoms with positive rational weights.

    Properties

        scale : `dyadinc.dyadic.Scale`
            The common side of the atoms.
        atoms : `dict[DyadicSquare | DyadicInterval, Fraction]`
            Atom to weight.
    """

    def __init__(self, scale: Scale, atoms: dict):
        self.scale = scale
        self.atoms = {}
        for cell, weight in atoms.items():
            weight = Fraction(weight)
            if weight <= 0:
                raise ValueError('atom {} has non-positive weight {}'.format(cell, weight))
            if cell.k != scale.k:
                raise ValueError('atom {} is not at scale 2^-{}'.format(cell, scale.k))
            self.atoms[cell] = weight

    @classmethod
    def counting(cls, family):
        """The normalized counting measure on a family."""

        weight = Fraction(1, len(family))
        return cls(family.scale, {cell: weight for cell in family})

    @property
    def mass(self):
        return sum(self.atoms.values(), Fraction(0))

    def normalized(self):
        mass = self.mass
        return DiscreteMeasure(self.scale, {cell: weight / mass for cell, weight in self.atoms.items()})

    def support(self):
        cells = list(self.atoms)
        if cells and isinstance(cells[0], DyadicSquare):
            return SquareFamily(self.scale, cells)
        return IntervalFamily(self.scale, cells)

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return 'DiscreteMeasure(2^-{}, {} atoms, mass {})'.format(self.scale.k, len(self.atoms), self.mass)


def projection_value(sigma, x, y, convention: Convention = Convention.appendix):
    """π_σ(x, y): x − σy in the appendix convention, σx + y in the main text."""

    if convention == Convention.appendix:
        return x - sigma * y
    return sigma * x + y


def _check_slope(sigma):
    sigma = Fraction(sigma)
    if not -1 <= sigma < 1:
        raise ValueError('projection slope {} outside [-1,1)'.format(sigma))
    return sigma


def _projected_cell(cell: DyadicSquare, sigma, convention):
    x, y = cell.center()
    value = projection_value(sigma, x, y, convention)
    return DyadicInterval(cell.k, math.floor(value * 2 ** cell.k))


def project(source, sigma, convention: Convention = Convention.appendix):
    """Push a measure, or a family of squares, forward under π_σ onto the δ-grid of the line.

    Atom centers are projected and floored onto dyadic δ-intervals; mass is preserved.

    Returns

        image : `dyadinc.projections.DiscreteMeasure | dyadinc.dyadic.IntervalFamily`
    """

    sigma = _check_slope(sigma)
    if isinstance(source, DiscreteMeasure):
        atoms = {}
        for cell, weight in source.atoms.items():
            image = _projected_cell(cell, sigma, convention)
            atoms[image] = atoms.get(image, Fraction(0)) + weight
        return DiscreteMeasure(source.scale, atoms)
    return IntervalFamily(source.scale, [_projected_cell(cell, sigma, convention) for cell in source])


def _distance(a, b):
    if isinstance(a, DyadicInterval):
        return Monomial(abs(a.center() - b.center()))
    (ax, ay), (bx, by) = a.center(), b.center()
    squared = (ax - bx) ** 2 + (ay - by) ** 2
    return Monomial(squared).sqrt()


def _interval_energy(measure: DiscreteMeasure, s, delta: Monomial):
    # Atoms on one δ-grid: the kernel depends only on the index gap.
    denominator = 1
    for weight in measure.atoms.values():
        denominator = math.lcm(denominator, weight.denominator)
    counts = {cell.i: int(weight * denominator) for cell, weight in measure.atoms.items()}
    gaps = Counter()
    for a, count_a in counts.items():
        for b, count_b in counts.items():
            gaps[abs(a - b)] += count_a * count_b
    energy = Fraction(0)
    for gap, weight in gaps.items():
        energy += weight * ((Monomial(max(gap, 1)) * delta) ** -s).to_fraction()
    return energy / denominator ** 2


def riesz_energy(measure: DiscreteMeasure, s):
    """I_s(μ) = Σ_{i,j} w_i·w_j·max(|c_i − c_j|, δ)^-s over atom centers.

    Kernel values are exact when rational and rounded at ENERGY_PROXY_BITS otherwise.

    Returns

        energy : `Fraction`
    """

    s = s_proxy(s)
    if not 0 < s < 2:
        raise ValueError('energy exponent {} outside (0,2)'.format(s))
    delta = Monomial(measure.scale.value)
    if measure.atoms and isinstance(next(iter(measure.atoms)), DyadicInterval):
        return _interval_energy(measure, s, delta)
    kernels = {}
    atoms = list(measure.atoms.items())
    energy = Fraction(0)
    for a, weight_a in atoms:
        for b, weight_b in atoms:
            distance = _distance(a, b)
            if distance not in kernels:
                kernels[distance] = (max(distance, delta) ** -s).to_fraction()
            energy += weight_a * weight_b * kernels[distance]
    return energy


def direction_energies(family, slopes, s, convention: Convention = Convention.appendix):
    """I_s(π_σ μ) for each σ, with μ the normalized counting measure on `family`."""

    measure = DiscreteMeasure.counting(family)
    return {Fraction(sigma): riesz_energy(project(measure, sigma, convention), s) for sigma in slopes}


def good_directions(family, slopes, s, Q: DyadicSquare = None, factor: int = None, convention: Convention = Convention.appendix):
    """The slopes whose projected energy is at most `factor` times the mean.

    Parameters

        family : `dyadinc.dyadic.SquareFamily`
            P_Q; renormalized through Q first when Q is given.
        slopes : `iterable[Fraction]`
            σ(Q), nonempty.
        s : `Fraction`
            The energy exponent.

    Optional Arguments

        Q : `dyadinc.dyadic.DyadicSquare`
            The square P_Q lives in.
        factor : `int`
            Multiple of the mean energy allowed (defaults to GOOD_DIRECTION_FACTOR).

    Returns

        selected : `list[Fraction]`
            Σ, in increasing order; at least half of `slopes`.
        energies : `dict[Fraction, Fraction]`
    """

    if factor is None:
        factor = config.GOOD_DIRECTION_FACTOR
    slopes = sorted({_check_slope(sigma) for sigma in slopes})
    if not slopes:
        raise DirectionBoundError(0, 0)
    if Q is not None:
        family = renormalize(family, Q)
    energies = direction_energies(family, slopes, s, convention)
    mean = sum(energies.values(), Fraction(0)) / len(energies)
    selected = [sigma for sigma in slopes if energies[sigma] <= factor * mean]
    if 2 * len(selected) < len(slopes):
        raise DirectionBoundError(len(selected), len(slopes))
    logger.debug('Kept %i of %i directions below %i times the mean energy %f', len(selected), len(slopes), factor, float(mean))
    return selected, energies


def energy_rows(energies: dict, selected: list):
    return [EnergyRow({
        'sigma': str(sigma),
        'energy_num': energy.numerator,
        'energy_den': energy.denominator,
        'selected': sigma in selected}) for sigma, energy in sorted(energies.items())]


def counter_assumption_report(family, slopes, s, Q: DyadicSquare = None, convention: Convention = Convention.appendix):
    """For each good direction, |π_σ(P)| and the spread constant of the projection against δ^-s."""

    selected, energies = good_directions(family, slopes, s, Q=Q, convention=convention)
    if Q is not None:
        family = renormalize(family, Q)
    s = s_proxy(s)
    target = family.scale.power(-s)
    rows = []
    for sigma in selected:
        image = project(family, sigma, convention)
        constant = spread_certificate(image, s).constant()
        rows.append({
            'sigma': str(sigma),
            'covering': len(image),
            'target': float(target),
            'ratio': len(image) / float(target),
            'spread_constant': float(constant),
            'within_budget': constant <= config.DIRECTION_CERTIFICATE_BUDGET,
            'energy': float(energies[sigma])})
    return rows


def direction_certificates(family, slopes, s, share=None, budget: int = None, convention: Convention = Convention.appendix):
    """Frostman-extract π_σ(P) at exponent s for every σ and certify the extracted set.

    A direction passes when the extraction succeeds and the spread constant of the extracted
    set is at most `budget`. Raises `DirectionCertificateError` when fewer than `share` of the
    directions pass.

    Returns

        rows : `list[dict]`
            One row per direction.
        passed : `Fraction`
            The passing share.
    """

    if share is None:
        share = config.GOOD_DIRECTION_SHARE
    if budget is None:
        budget = config.DIRECTION_CERTIFICATE_BUDGET
    s = s_proxy(s)
    slopes = sorted({_check_slope(sigma) for sigma in slopes})
    if not slopes:
        raise DirectionBoundError(0, 0)
    rows = []
    for sigma in slopes:
        image = project(family, sigma, convention)
        try:
            extracted = frostman_extract(image, s)
            constant = float(spread_certificate(extracted, s).constant())
        except CertificateBudgetError:
            extracted, constant = (), None
        rows.append({
            'sigma': str(sigma),
            'covering': len(image),
            'extracted': len(extracted),
            'spread_constant': constant,
            'passed': constant is not None and constant <= budget})
    passed = Fraction(sum(1 for row in rows if row['passed']), len(rows))
    if passed < Fraction(share):
        raise DirectionCertificateError(passed, share)
    logger.debug('%i of %i directions certify within %i', sum(1 for row in rows if row['passed']), len(rows), budget)
    return rows, passed


class ProductStructure(object):
    """The sets Z, 𝐙 = ∪_y X_y × {y} and the Δ-tube families 𝒯(𝐳).

    Properties

        scale : `dyadinc.dyadic.Scale`
            Δ.
        Y : `dyadinc.dyadic.IntervalFamily`
            The heights y_Q as Δ-intervals.
        slices : `dict[int, dyadinc.dyadic.IntervalFamily]`
            Height index to X_y = Δ^-1·Π_y, as Δ-intervals inside [0,3).
        Z : `list[tuple[Fraction, Fraction]]`
            The points (x_p, y_Q).
        points : `list[tuple[Fraction, Fraction]]`
            The points 𝐳 = (Δ^-1·x_p, y_Q).
        tubes : `dict[tuple, dyadinc.tubes.TubeFamily]`
            𝐳 to 𝒯(𝐳).
        fine_count : `int`
            |𝒯 ∩ 𝐓₀| over the retained squares.
        squares : `dict[DyadicSquare, DyadicSquare]`
            Original Δ-square to its re-dyadicized image.
    """

    def __init__(self, scale, Y, slices, Z, points, tubes, fine_count, squares):
        self.scale = scale
        self.Y = Y
        self.slices = slices
        self.Z = Z
        self.points = points
        self.tubes = tubes
        self.fine_count = fine_count
        self.squares = squares

    def all_tubes(self):
        """𝒯(𝐙)."""

        return TubeFamily(self.scale, [T for family in self.tubes.values() for T in family], Convention.appendix)

    def report(self, s=None):
        union = len(self.all_tubes())
        row = {
            'delta_exponent': self.scale.k,
            'heights': len(self.Y),
            'points': len(self.points),
            'tubes': union,
            'fine_tubes': self.fine_count,
            'tube_exponent': math.log2(union) / self.scale.k if union and self.scale.k else 0.0}
        if s is not None:
            row['target_exponent'] = float(2 * s_proxy(s))
        return row

    def __repr__(self):
        return 'ProductStructure(2^-{}, {} heights, {} points)'.format(self.scale.k, len(self.Y), len(self.points))


def shear_tube(T: DyadicTube, T0: DyadicTube):
    """F(T) for F(x,y) = (x − σ₀y − h₀, y), which shifts tube parameters by (σ₀, h₀)."""

    shift = 2 ** (T.k - T0.k)
    return DyadicTube(DyadicSquare(T.k, T.param.ix - T0.param.ix * shift, T.param.iy - T0.param.iy * shift), T.convention)


def _shear_candidates(p: DyadicSquare, T0: DyadicTube):
    x0, x1, y0, y1 = p.bounds()
    sigma0 = T0.sigma
    h0 = Fraction(T0.param.iy, 2 ** T0.k)
    xs = [x - sigma0 * y - h0 for x in (x0, x1) for y in (y0, y1)]
    n = 2 ** p.k
    first, last = math.floor(min(xs) * n), math.ceil(max(xs) * n) - 1
    return [DyadicSquare(p.k, ix, p.iy) for ix in range(first, last + 1)]


def _redyadicize(p: DyadicSquare, tubes: list, T0: DyadicTube):
    """p̄: among the δ-squares meeting F(p), the one met by most of the sheared tubes."""

    best, kept = None, []
    for candidate in _shear_candidates(p, T0):
        meeting = [T for T in tubes if tube_meets_square(T, candidate)]
        if len(meeting) > len(kept) or best is None:
            best, kept = candidate, meeting
    return best, kept


def product_structure(T0: DyadicTube, configuration, squares=None):
    """Assemble Z, 𝐙 and 𝒯(𝐳) from the squares met by a thick tube 𝐓₀.

    Parameters

        T0 : `dyadinc.tubes.DyadicTube`
            A Δ-tube in the appendix convention.
        configuration : `dyadinc.incidence.NiceConfiguration`
            Squares and tubes at δ = Δ².

    Optional Arguments

        squares : `iterable[dyadinc.dyadic.DyadicSquare]`
            The Δ-squares Q to use; defaults to every Δ-square holding a member of 𝒫.

    Returns

        structure : `dyadinc.projections.ProductStructure`
    """

    Delta = T0.scale
    delta = configuration.scale
    if delta.k != 2 * Delta.k:
        raise ProductStructureError('tube scale 2^-{} is not the square root of 2^-{}'.format(Delta.k, delta.k))
    if T0.convention != Convention.appendix:
        raise ProductStructureError('the thick tube must use the appendix convention')
    if squares is None:
        squares = sorted({p.parent(Delta) for p in configuration.P}, key=lambda Q: Q.sort_key())
    vertical = DyadicTube(DyadicSquare(Delta.k, 0, 0), Convention.appendix)
    sheared = T0 != vertical

    chosen = {}
    images = {}
    fine = set()
    for Q in squares:
        relocated = []
        for p in configuration.P:
            if not Q.contains(p):
                continue
            tubes = [T for T in configuration.assignment.get(p, []) if T0.contains(T)]
            if not tubes:
                continue
            if sheared:
                bar, kept = _redyadicize(p, [shear_tube(T, T0) for T in tubes], T0)
            else:
                bar, kept = p, [T for T in tubes if tube_meets_square(T, p)]
            if kept:
                relocated.append((bar, kept))
        if not relocated:
            continue
        counts = {}
        for bar, _ in relocated:
            counts[bar.parent(Delta)] = counts.get(bar.parent(Delta), 0) + 1
        image = min(counts, key=lambda cell: (-counts[cell], cell.sort_key()))
        members = sorted(((bar, kept) for bar, kept in relocated if image.contains(bar)), key=lambda item: item[0].sort_key())
        if image.iy in chosen:
            continue
        images[Q] = image
        columns = {}
        for bar, kept in members:
            columns.setdefault(bar.ix, (bar, kept))
        chosen[image.iy] = (image, list(columns.values()))
    if not chosen:
        raise ProductStructureError('no square carries a tube inside the thick tube')

    Z, points, tubes, slices = [], [], {}, {}
    for height, (image, members) in sorted(chosen.items()):
        y = Fraction(height, 2 ** Delta.k)
        column = []
        for bar, kept in members:
            x = Fraction(bar.ix, 2 ** delta.k)
            z = (x * 2 ** Delta.k, y)
            if not 0 <= z[0] <= 3:
                raise ProductStructureError('slice point {} leaves [0,3]'.format(z[0]))
            Z.append((x, y))
            points.append(z)
            column.append(DyadicInterval(Delta.k, bar.ix))
            family = []
            for T in kept:
                if not vertical.contains(T):
                    raise ProductStructureError('tube {} is not inside the vertical thick tube'.format(T))
                fine.add(T)
                candidates = [DyadicTube(DyadicSquare(Delta.k, T.param.ix, T.param.iy + d), Convention.appendix) for d in (-1, 0, 1)]
                covering = [candidate for candidate in candidates if tube_contains_point(candidate, *z)]
                if not covering:
                    raise ProductStructureError('no covering tube of {} contains {}'.format(T, z))
                family.append(covering[0])
            tubes[z] = TubeFamily(Delta, family, Convention.appendix)
        slices[height] = IntervalFamily(Delta, column)
    Y = IntervalFamily(Delta, [DyadicInterval(Delta.k, height) for height in chosen])
    structure = ProductStructure(Delta, Y, slices, Z, points, tubes, len(fine), images)
    union = len(structure.all_tubes())
    if union > 3 * len(fine):
        raise ProductStructureError('{} tubes exceed three times the {} fine tubes'.format(union, len(fine)))
    logger.info('Product structure: %i heights, %i points, %i tubes', len(Y), len(points), union)
    return structure


class DirectionBoundError(Exception):
    def __init__(self, selected, total):
        self.witness = {'selected': selected, 'total': total}
        self.message = 'Only {} of {} directions were selected.'.format(selected, total)
        super().__init__(self.message)


class ProductStructureError(Exception):
    def __init__(self, reason):
        self.message = 'Product structure failed: {}'.format(reason)
        super().__init__(self.message)


class DirectionCertificateError(Exception):
    def __init__(self, passed, share):
        self.witness = {'passed': str(passed), 'share': str(share)}
        self.message = 'Only {} of the directions certify, below the required {}.'.format(passed, share)
        super().__init__(self.message)
