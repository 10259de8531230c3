from fractions import Fraction
from unittest.mock import patch

from nose.tools import ok_, eq_, raises

from dyadinc import tubes
from dyadinc.dyadic import DyadicSquare, Scale, full_grid
from dyadinc.enums import Convention
from dyadinc.tubes import DyadicTube, TubeFamily


def test_should_decide_point_membership_exactly():

    # Arrange
    T = DyadicTube(DyadicSquare(2, 0, 0))

    # Assert
    ok_(tubes.tube_contains_point(T, 0, 0))
    ok_(tubes.tube_contains_point(T, 1, Fraction(1, 4)))
    ok_(not tubes.tube_contains_point(T, 1, Fraction(1, 2)))
    ok_(not tubes.tube_contains_point(T, 0, Fraction(1, 4)))


def test_should_swap_axes_in_the_appendix_convention():

    # Arrange
    T = DyadicTube(DyadicSquare(2, 0, 0), Convention.appendix)

    # Assert
    ok_(tubes.tube_contains_point(T, Fraction(1, 4), 1))
    ok_(not tubes.tube_contains_point(T, 1, Fraction(1, 4)))


def test_should_decide_whether_a_tube_meets_a_square():

    # Arrange
    T = DyadicTube(DyadicSquare(2, 0, 0))

    # Assert
    ok_(tubes.tube_meets_square(T, DyadicSquare(2, 0, 0)))
    ok_(tubes.tube_meets_square(T, DyadicSquare(2, 3, 0)))
    ok_(not tubes.tube_meets_square(T, DyadicSquare(2, 0, 3)))


def test_should_find_tubes_of_every_slope_through_a_square():

    # Arrange
    p = DyadicSquare(3, 2, 5)
    scale = Scale(3)

    # Act
    found = tubes.tubes_through(p, scale)

    # Assert
    eq_(len({T.slope_index for T in found}), 16)
    ok_(all(tubes.tube_meets_square(T, p) for T in found))


def test_should_bound_slope_fibers_through_every_square():

    # Arrange
    scale = Scale(3)

    # Act
    largest = [tubes.slope_fibers(tubes.tubes_through(p, scale), p)[1] for p in full_grid(scale)]

    # Assert
    ok_(all(1 <= size <= 10 for size in largest))


@raises(tubes.SlopeFiberError)
def test_should_flag_a_fiber_above_the_bound():

    # Arrange
    p = DyadicSquare(2, 1, 1)

    # Act
    tubes.slope_fibers(tubes.tubes_through(p, Scale(2)), p, bound=0)


def test_should_build_dual_lines_in_both_conventions():

    # Act
    main = tubes.dual_line(Fraction(1, 2), Fraction(1, 4))
    appendix = tubes.dual_line(Fraction(1, 2), Fraction(1, 4), Convention.appendix)

    # Assert
    ok_(main.contains(1, Fraction(3, 4)))
    ok_(appendix.contains(Fraction(3, 4), 1))
    ok_(not appendix.contains(1, Fraction(3, 4)))


def test_should_compare_slope_and_tube_spread_constants():

    # Arrange
    p = DyadicSquare(3, 2, 5)
    found = tubes.tubes_through(p, Scale(3))

    # Act
    slope_constant, tube_constant = tubes.slope_spread_check(found, p, 1)

    # Assert
    ok_(tube_constant <= slope_constant * 10)


@raises(tubes.SlopeRangeError)
def test_should_reject_slopes_outside_the_unit_range():

    # Act
    DyadicTube(DyadicSquare(2, 4, 0))


def test_should_find_the_thick_ancestor_of_a_tube():

    # Arrange
    T = DyadicTube(DyadicSquare(4, 5, 9))

    # Act
    ancestor = T.ancestor(Scale(2))

    # Assert
    eq_(ancestor, DyadicTube(DyadicSquare(2, 1, 2)))
    ok_(ancestor.contains(T))


def test_should_cover_a_rescaled_tube():

    # Arrange
    T = DyadicTube(DyadicSquare(4, 0, 0))
    Q = DyadicSquare(2, 0, 0)

    # Act
    cover = tubes.rescale_tube_cover(T, Q)

    # Assert
    eq_(cover.scale, Scale(2))
    eq_(list(cover), [DyadicTube(DyadicSquare(2, 0, 0))])


def test_should_reflect_slopes_in_the_dual_star():

    # Act
    star = tubes.dual_star(DyadicTube(DyadicSquare(2, 1, 2)))

    # Assert
    eq_(star, DyadicSquare(2, -2, 2))


@raises(tubes.TubeMissError)
def test_should_report_a_tube_missing_the_common_square():

    # Arrange
    family = TubeFamily(Scale(2), [DyadicTube(DyadicSquare(2, 0, 0))])

    # Act
    tubes.slope_fibers(family, DyadicSquare(2, 0, 3))


@raises(tubes.ConventionMismatchError)
def test_should_reject_mixed_conventions():

    # Act
    TubeFamily(Scale(2), [
        DyadicTube(DyadicSquare(2, 0, 0), Convention.main_text),
        DyadicTube(DyadicSquare(2, 1, 0), Convention.appendix)])


def test_should_read_back_written_tubes():

    # Arrange
    family = TubeFamily(Scale(2), [DyadicTube(DyadicSquare(2, -3, 1), Convention.appendix)])

    # Act
    restored = tubes.loads(tubes.dumps(family))

    # Assert
    eq_(restored, family)
    eq_(restored.convention, Convention.appendix)


def sampled_hit(T, p, mesh=16):
    """Whether some line of T with slope and abscissa on a midpoint mesh crosses the interior of p."""

    a0, a1, b0, b1 = T.param.bounds()
    x0, x1, y0, y1 = p.bounds()
    for i in range(mesh):
        a = a0 + (a1 - a0) * Fraction(2 * i + 1, 2 * mesh)
        for j in range(mesh):
            x = x0 + (x1 - x0) * Fraction(2 * j + 1, 2 * mesh)
            if max(y0, a * x + b0) < min(y1, a * x + b1):
                return True
    return False


def test_should_agree_with_dense_sampling_on_tube_square_meetings():

    # Arrange
    squares = [DyadicSquare(2, 0, 0), DyadicSquare(2, 3, 0), DyadicSquare(2, 1, 2), DyadicSquare(2, 3, 3)]
    candidates = [DyadicTube(DyadicSquare(2, ix, iy)) for ix in range(-4, 4) for iy in range(-4, 8)]

    # Act
    disagreements = [(T, p) for p in squares for T in candidates if tubes.tube_meets_square(T, p) != sampled_hit(T, p)]

    # Assert
    eq_(disagreements, [])


def test_should_cover_every_sampled_line_of_a_rescaled_tube():

    # Arrange
    candidates = [DyadicTube(DyadicSquare(4, ix, iy)) for ix in (-16, -5, 0, 7, 15) for iy in (-3, 0, 9)]
    squares = [DyadicSquare(2, 0, 0), DyadicSquare(2, 3, 1)]

    for T in candidates:
        for Q in squares:
            # Act
            cover = tubes.rescale_tube_cover(T, Q)

            # Assert
            a0, a1, b0, b1 = T.param.bounds()
            x0, _, y0, _ = Q.bounds()
            size = Q.scale.value
            for i in range(4):
                a = a0 + (a1 - a0) * Fraction(2 * i + 1, 8)
                for j in range(4):
                    b = b0 + (b1 - b0) * Fraction(2 * j + 1, 8)
                    image = (a * x0 + b - y0) / size
                    ok_(any(C.param.bounds()[0] <= a < C.param.bounds()[1] and C.param.bounds()[2] <= image < C.param.bounds()[3]
                            for C in cover))
                    x = x0 + size / 3
                    u, v = tubes.rescale_point(Q, x, a * x + b)
                    eq_(v, a * u + image)


def test_should_undo_the_dual_star_by_applying_it_twice():

    # Arrange
    params = [DyadicSquare(3, ix, iy) for ix in range(-8, 8) for iy in range(-8, 16)]

    # Assert
    ok_(all(tubes.dual_star(DyadicTube(tubes.dual_star(DyadicTube(param)))) == param for param in params))


def test_should_meet_the_dual_star_for_every_incident_pair():

    # Arrange
    scale = Scale(3)
    expected = sum(len(tubes.tubes_through(p, scale)) for p in full_grid(scale))

    # Act
    pairs = tubes.duality_check(scale)

    # Assert
    eq_(pairs, expected)
    ok_(all(tubes.dual_star_incidence(p, T) for p in full_grid(scale) for T in tubes.tubes_through(p, scale)))


@raises(tubes.DualityError)
@patch('dyadinc.tubes.dual_star_incidence', return_value=False)
def test_should_report_a_pair_missing_its_dual_star(dual_star_incidence):

    # Act
    tubes.duality_check(Scale(1))


def test_should_bound_slope_fibers_on_a_finer_grid():

    # Act
    largest = tubes.fiber_check(Scale(4))
    appendix = tubes.fiber_check(Scale(4), convention=Convention.appendix)

    # Assert
    ok_(2 <= largest <= 10)
    ok_(2 <= appendix <= 10)


@raises(tubes.SlopeFiberError)
def test_should_flag_a_fiber_check_over_its_bound():

    # Act
    tubes.fiber_check(Scale(3), bound=1)
