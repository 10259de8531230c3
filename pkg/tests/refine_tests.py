from fractions import Fraction

from nose.tools import ok_, eq_, raises

from dyadinc import refine
from dyadinc.dyadic import DyadicSquare, Scale, ScaleOrderError, SquareFamily
from dyadinc.generators import furstenberg_config, tube_through_center
from dyadinc.incidence import NiceConfiguration, tube_constant
from dyadinc.tubes import DyadicTube, TubeFamily, tube_meets_square


SCALE = Scale(4)
COARSE = Scale(2)
SQUARE = DyadicSquare(4, 8, 8)


def separated_slope_configuration():
    """One square whose four tubes sit in four different Δ-slope intervals."""

    family = TubeFamily(SCALE, [tube_through_center(SQUARE, ix, SCALE) for ix in (-16, -8, 0, 8)])
    P = SquareFamily(SCALE, [SQUARE])
    configuration = NiceConfiguration(SCALE, Fraction(1, 2), 1, 4, P, {SQUARE: family})
    configuration.C = tube_constant(configuration)
    return configuration


def test_should_spread_incidences_evenly_over_separated_thick_tubes():

    # Arrange
    configuration = separated_slope_configuration()

    # Act
    result = refine.thick_tube_refine(configuration, COARSE)

    # Assert
    eq_(len(result.T_Delta), 4)
    eq_(result.H, 1)
    eq_(result.H, configuration.M * len(configuration.P) // len(result.T_Delta))
    eq_(result.trace.m1, 1)
    eq_(result.trace.m2, 4)
    eq_(result.P_bar, configuration.P)


@raises(ScaleOrderError)
def test_should_need_a_coarser_scale_for_thick_tubes():

    # Act
    refine.thick_tube_refine(separated_slope_configuration(), Scale(6))


def test_should_partition_tubes_into_packets():

    # Arrange
    family = TubeFamily(SCALE, [tube_through_center(SQUARE, ix, SCALE) for ix in (0, 1, 2, 5)])

    # Act
    packets = refine.tube_packets(family, SQUARE, COARSE)

    # Assert
    eq_(sum(len(packet) for packet in packets), 4)
    ok_(all(tube_meets_square(packet.representative, SQUARE) for packet in packets))
    ok_(all(packet.representative.slope_index == packet.parent.slope_index << 2 for packet in packets))


@raises(refine.RefinementAssertionError)
def test_should_reject_a_packet_tube_missing_the_square():

    # Arrange
    family = TubeFamily(SCALE, [DyadicTube(DyadicSquare(4, 0, 0))])

    # Act
    refine.tube_packets(family, DyadicSquare(4, 0, 15), COARSE)


def test_should_keep_separated_tubes_per_slope():

    # Arrange
    tubes = TubeFamily(Scale(6), [DyadicTube(DyadicSquare(6, 3, iy)) for iy in (0, 5, 27, 30)] + [DyadicTube(DyadicSquare(6, 4, 1))])

    # Act
    kept = refine.separated_subset(tubes)

    # Assert
    eq_(refine.separation_gap(), 27)
    eq_(len(kept), 3)
    ok_(refine.are_separated(kept[0], kept[1]))


def test_should_split_a_configuration_across_scales():

    # Arrange
    configuration = separated_slope_configuration()

    # Act
    result = refine.induction_on_scales(configuration, COARSE)

    # Assert
    eq_(result.P, configuration.P)
    eq_(result.budget, 1)
    eq_(result.trace.M_bar, 4)
    eq_(result.trace.N, 1)
    eq_(result.trace.M_delta, 4)
    eq_(result.coarse.P, SquareFamily(COARSE, [DyadicSquare(2, 2, 2)]))
    eq_(result.trace.M_Q, {'2,2': 4})
    eq_(len(result.tubes()), 4)


def test_should_rescale_only_separated_representatives():

    # Arrange
    lower, upper = DyadicSquare(4, 8, 8), DyadicSquare(4, 8, 10)
    P = SquareFamily(SCALE, [lower, upper])
    assignment = {p: TubeFamily(SCALE, [tube_through_center(p, ix, SCALE) for ix in (-16, -8, 0, 8)]) for p in P}
    configuration = NiceConfiguration(SCALE, Fraction(1, 2), 1, 4, P, assignment)
    configuration.C = tube_constant(configuration)
    Q = DyadicSquare(2, 2, 2)

    # Act
    result = refine.induction_on_scales(configuration, COARSE)

    # Assert
    eq_(list(result.P), [lower])
    eq_(result.trace.separated, {'2,2': 4})
    eq_(list(result.fine[Q].P), [DyadicSquare(2, 0, 0)])
    eq_(result.fine[Q].M, 4)
    kept = list(result.tubes())
    ok_(all(refine.are_separated(a, b) for a in kept for b in kept if a != b))


def test_should_refine_a_seeded_configuration_across_scales():

    # Arrange
    configuration, _ = furstenberg_config(Scale(8), Fraction(1, 2), 1, seed=0)
    coarse = Scale(4)

    # Act
    thick = refine.thick_tube_refine(configuration, coarse)
    result = refine.induction_on_scales(configuration, coarse)

    # Assert
    ok_(all(p in configuration.P for p in thick.P_bar))
    eq_(thick.T_Delta.scale, coarse)
    ok_(thick.H >= 1)
    ok_(all(p in configuration.P for p in result.P))
    eq_(result.coarse.scale, coarse)
    ok_(all(fine.scale == coarse for fine in result.fine.values()))
    ok_(all(tube_meets_square(T, p) for p, family in result.families.items() for T in family))
    ok_(result.budget <= result.trace.budget_limit)
