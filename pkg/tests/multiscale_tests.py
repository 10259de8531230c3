from fractions import Fraction
from unittest.mock import patch

from nose.tools import ok_, eq_, raises

from dyadinc import multiscale
from dyadinc.dyadic import DyadicSquare, Scale, SquareFamily, full_grid
from dyadinc.enums import IntervalKind, ScaleClass
from dyadinc.generators import random_branching_function, sample_subset, tube_through_center
from dyadinc.incidence import NiceConfiguration, tube_constant
from dyadinc.multiscale import BranchingFunction, PiecewiseLinear, TaggedInterval
from dyadinc.tubes import TubeFamily


def roof():
    """Slope 2 on [0, 3], flat on [3, 6]."""

    return PiecewiseLinear([0, 3, 6], [0, 6, 6])


def roof_family():
    """Full branching for two levels of Δ = 2^-2, then a single child per node."""

    return SquareFamily(Scale(8), [DyadicSquare(8, 16 * ix, 16 * iy) for ix in range(16) for iy in range(16)])


def test_should_evaluate_a_piecewise_linear_function():

    # Arrange
    f = roof()

    # Assert
    eq_(f(Fraction(3, 2)), 3)
    eq_(f(5), 6)
    eq_(multiscale.slope(f, 2, 6), Fraction(1, 2))


@raises(multiscale.IntervalError)
def test_should_reject_points_outside_the_domain():

    # Act
    roof()(7)


@raises(multiscale.IntervalError)
def test_should_reject_an_empty_interval():

    # Act
    multiscale.slope(roof(), 2, 2)


def test_should_tell_linear_from_superlinear():

    # Arrange
    concave = roof()
    convex = PiecewiseLinear([0, 1, 2], [0, 0, 2])

    # Assert
    ok_(multiscale.is_eps_superlinear(concave, 0, 6, 0))
    ok_(not multiscale.is_eps_linear(concave, 0, 6, Fraction(1, 4)))
    ok_(multiscale.is_eps_linear(concave, 0, 6, Fraction(1, 2)))
    ok_(not multiscale.is_eps_superlinear(convex, 0, 2, 0))


def test_should_keep_a_linear_function_in_one_window():

    # Arrange
    f = PiecewiseLinear([0, 8], [0, 4])

    # Act
    decomposition = multiscale.linear_decompose(f, Fraction(1, 8))

    # Assert
    eq_(decomposition.intervals, [TaggedInterval(Fraction(0), Fraction(8), IntervalKind.linear, Fraction(1, 2))])
    eq_(decomposition.leftover, 0)


def test_should_bisect_the_roof_at_its_corner():

    # Act
    decomposition = multiscale.linear_decompose(roof(), Fraction(1, 8))

    # Assert
    eq_([(interval.c, interval.d) for interval in decomposition], [(0, 3), (3, 6)])
    eq_([interval.slope for interval in decomposition], [2, 0])


def test_should_tag_a_linear_function_once():

    # Arrange
    f = PiecewiseLinear([0, 8], [0, 8])

    # Act
    decomposition = multiscale.kaufman_decompose(f, Fraction(1, 2), 1, Fraction(1, 8))

    # Assert
    eq_(len(decomposition), 1)
    eq_(decomposition.intervals[0].kind, IntervalKind.linear)
    eq_(decomposition.intervals[0].slope, 1)


def test_should_split_the_roof_where_the_slope_floor_is_met():

    # Act
    decomposition = multiscale.kaufman_decompose(roof(), Fraction(1, 2), 1, Fraction(1, 8))

    # Assert
    eq_(decomposition.intervals, [
        TaggedInterval(Fraction(0), Fraction(2), IntervalKind.linear, Fraction(2)),
        TaggedInterval(Fraction(2), Fraction(6), IntervalKind.superlinear, Fraction(1, 2))])
    eq_(decomposition.leftover, 0)


@raises(multiscale.KaufmanHypothesisError)
def test_should_refuse_a_function_below_the_hypothesis_line():

    # Act
    multiscale.kaufman_decompose(PiecewiseLinear([0, 4], [0, 0]), Fraction(1, 2), 1, Fraction(1, 8))


@raises(multiscale.KaufmanHypothesisError)
def test_should_refuse_a_floor_above_t():

    # Act
    multiscale.kaufman_decompose(roof(), 1, Fraction(1, 2), Fraction(1, 8))


def test_should_build_the_branching_function():

    # Act
    f = BranchingFunction(Scale(2), [16, 16, 1, 1])

    # Assert
    eq_(f.m, 4)
    eq_(f.ys, [0, 2, 4, 4, 4])
    ok_(BranchingFunction(Scale(2), [3]).ys[1] >= Fraction(79, 100))


def test_should_read_branching_numbers_of_a_uniform_family():

    # Act
    f = multiscale.branching_function(roof_family(), Scale(2))

    # Assert
    eq_(f.numbers, [16, 16, 1, 1])


@raises(multiscale.NonUniformError)
def test_should_report_a_non_uniform_family():

    # Arrange
    family = SquareFamily(Scale(2), [DyadicSquare(2, 0, 0), DyadicSquare(2, 0, 1), DyadicSquare(2, 3, 3)])

    # Act
    multiscale.branching_numbers(family, [1, 2])


@raises(multiscale.ScaleListError)
def test_should_reject_scales_ending_off_the_family_scale():

    # Act
    multiscale.branching_numbers(full_grid(Scale(2)), [1])


def test_should_compute_window_constants():

    # Arrange
    numbers = [16, 16, 1, 1]
    exponents = [0, 2, 4, 6, 8]

    # Assert
    ok_(multiscale.window_constant(numbers, exponents, 0, 4, 1) == 1)
    ok_(multiscale.window_constant(numbers, exponents, 2, 4, 2) == 256)


def test_should_decompose_the_roof_family():

    # Act
    decomposition = multiscale.multiscale_decompose(roof_family(), Fraction(1, 2), 1, Scale(2), Fraction(1, 8))

    # Assert
    eq_(decomposition.m, 4)
    eq_(decomposition.scales, [0, 1, 4])
    eq_(decomposition.structured, [1, 2])
    eq_(decomposition.bad, [])
    eq_(decomposition.exponents, {1: 2, 2: Fraction(2, 3)})
    eq_(decomposition.tau, Fraction(1, 4))
    eq_(decomposition.to_record().scales, [0, 1, 4])


@raises(multiscale.DecompositionError)
def test_should_refuse_a_concentrated_family():

    # Arrange
    family = SquareFamily(Scale(8), [DyadicSquare(8, 0, 0)])

    # Act
    multiscale.multiscale_decompose(family, Fraction(1, 2), 1, Scale(2), Fraction(1, 8))


def test_should_classify_good_and_normal_scales():

    # Arrange
    decomposition = multiscale.multiscale_decompose(roof_family(), Fraction(1, 2), 1, Scale(2), Fraction(1, 8))

    # Act
    classes, good = multiscale.classify_scales(decomposition, 1, Fraction(1, 2))

    # Assert
    eq_(classes, {1: ScaleClass.good, 2: ScaleClass.normal})
    eq_(good, Fraction(1, 4))


@raises(multiscale.ScaleClassError)
def test_should_flag_too_few_good_scales():

    # Arrange
    decomposition = multiscale.multiscale_decompose(roof_family(), Fraction(1, 2), 1, Scale(2), Fraction(1, 8))

    # Act
    multiscale.classify_scales(decomposition, 3, Fraction(1, 2))


def test_should_uniformize_by_the_heaviest_class():

    # Arrange
    family = SquareFamily(Scale(2), [DyadicSquare(2, 0, 0), DyadicSquare(2, 0, 1), DyadicSquare(2, 3, 3)])

    # Act
    uniform, numbers = multiscale.uniformize(family, [1, 2])

    # Assert
    eq_(numbers, [1, 2])
    eq_(list(uniform), [DyadicSquare(2, 0, 0), DyadicSquare(2, 0, 1)])


def test_should_uniformize_a_random_sample():

    # Arrange
    family = sample_subset(full_grid(Scale(4)), 100, seed=4)

    # Act
    uniform, numbers = multiscale.uniformize(family, [1, 2, 3, 4])

    # Assert
    ok_(uniform.issubset(family))
    eq_(multiscale.branching_numbers(uniform, [1, 2, 3, 4]), numbers)
    ok_(len(uniform) * 16 ** 4 >= len(family) * 4 ** 4)


def test_should_refine_a_subfamily_within_its_loss_factor():

    # Arrange
    family = full_grid(Scale(2))
    subfamily = family.intersect(DyadicSquare(1, 1, 0))

    # Act
    refined, numbers, M = multiscale.uniform_refine(family, subfamily, [1, 2], claims=[(1, 2, 1)])

    # Assert
    eq_(refined, subfamily)
    eq_(numbers, [1, 4])
    eq_(M, 256)


@raises(multiscale.ContainmentError)
def test_should_need_a_subfamily_to_refine():

    # Arrange
    family = full_grid(Scale(2)).intersect(DyadicSquare(1, 0, 0))
    other = full_grid(Scale(2)).intersect(DyadicSquare(1, 1, 1))

    # Act
    multiscale.uniform_refine(family, other, [1, 2])


def test_should_measure_the_product_bound_factors():

    # Arrange
    p = DyadicSquare(4, 8, 8)
    family = TubeFamily(Scale(4), [tube_through_center(p, ix, Scale(4)) for ix in (-16, -8, 0, 8)])
    configuration = NiceConfiguration(Scale(4), Fraction(1, 2), 1, 4, SquareFamily(Scale(4), [p]), {p: family})
    configuration.C = tube_constant(configuration)

    # Act
    rows = multiscale.measured_product_bound(configuration, [2])

    # Assert
    eq_(len(rows), 1)
    eq_(rows[0]['delta_exponent'], 2)
    eq_(rows[0]['tubes_over_M'], 1.0)
    eq_(rows[0]['coarse_over_M'], 1.0)
    eq_(rows[0]['budget'], 1.0)


def test_should_split_every_roof_where_its_oracle_says():

    for m in (6, 12, 24):
        for s in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            # Act
            split = multiscale.check_roof(m, s)

            # Assert
            eq_(split, Fraction(m) * (1 - s) / (2 - s))


@raises(multiscale.DecompositionError)
def test_should_reject_a_roof_split_off_the_oracle():

    # Arrange
    with patch('dyadinc.multiscale.roof_split', return_value=Fraction(3)):

        # Act
        multiscale.check_roof(6, Fraction(1, 2))


def test_should_reverify_decompositions_of_random_branching_functions():

    # Arrange
    s, t, epsilon = Fraction(1, 2), Fraction(1), Fraction(1, 8)

    for seed in range(20):
        f = random_branching_function(16, t, epsilon, seed)

        # Act
        decomposition = multiscale.kaufman_decompose(f, s, t, epsilon)

        # Assert
        eq_(multiscale.verify_tags(f, decomposition.intervals, s, epsilon), len(decomposition))
        ok_(decomposition.leftover <= 8 * (1 + 1 / (t - s)) * epsilon * 16)


@raises(multiscale.DecompositionError)
def test_should_reject_a_mistagged_window():

    # Arrange
    windows = [TaggedInterval(Fraction(0), Fraction(6), IntervalKind.linear, Fraction(1))]

    # Act
    multiscale.verify_tags(roof(), windows, Fraction(1, 2), Fraction(1, 8))


@raises(multiscale.DecompositionError)
def test_should_reject_overlapping_windows():

    # Arrange
    f = PiecewiseLinear([0, 8], [0, 8])
    windows = [
        TaggedInterval(Fraction(0), Fraction(5), IntervalKind.linear, Fraction(1)),
        TaggedInterval(Fraction(4), Fraction(8), IntervalKind.linear, Fraction(1))]

    # Act
    multiscale.verify_tags(f, windows, Fraction(1, 2), Fraction(1, 8))
