from fractions import Fraction

from nose.tools import ok_, eq_, raises

from dyadinc import dyadic
from dyadinc.dyadic import DyadicInterval, DyadicSquare, IntervalFamily, Scale, SquareFamily
from dyadinc.generators import random_frostman, sample_subset


def test_should_order_scales_by_size():

    # Arrange
    fine = Scale(6)
    coarse = Scale(3)

    # Assert
    ok_(fine < coarse)
    eq_(fine / coarse, Scale(3))
    eq_(Scale.from_value(Fraction(1, 16)), Scale(4))
    eq_(fine.sqrt(), Scale(3))


@raises(ValueError)
def test_should_reject_a_non_dyadic_scale_value():

    # Act
    Scale.from_value(Fraction(1, 3))


def test_should_find_parent_and_children_of_a_square():

    # Arrange
    p = DyadicSquare(4, 13, 6)

    # Act
    parent = p.parent(Scale(2))
    children = parent.children(Scale(4))

    # Assert
    eq_(parent, DyadicSquare(2, 3, 1))
    eq_(len(children), 16)
    ok_(p in children)
    ok_(parent.contains(p))


def test_should_deduplicate_and_order_a_family():

    # Arrange
    members = [DyadicSquare(2, 1, 0), DyadicSquare(2, 0, 3), DyadicSquare(2, 1, 0)]

    # Act
    family = SquareFamily(Scale(2), members)

    # Assert
    eq_(len(family), 2)
    eq_(family[0], DyadicSquare(2, 0, 3))


@raises(dyadic.ScaleMismatchError)
def test_should_reject_a_member_at_another_scale():

    # Act
    SquareFamily(Scale(2), [DyadicSquare(3, 0, 0)])


def test_should_cover_a_family_at_a_coarser_scale():

    # Arrange
    family = dyadic.full_grid(Scale(3))

    # Act
    cover = dyadic.cover_at(family, Scale(1))

    # Assert
    eq_(len(cover), 4)
    eq_(cover.scale, Scale(1))


@raises(dyadic.ScaleOrderError)
def test_should_not_cover_at_a_finer_scale():

    # Act
    dyadic.cover_at(dyadic.full_grid(Scale(1)), Scale(2))


def test_should_renormalize_into_the_unit_square_and_back():

    # Arrange
    family = dyadic.full_grid(Scale(3))
    Q = DyadicSquare(1, 1, 0)

    # Act
    local = dyadic.renormalize(family, Q)
    restored = dyadic.unrenormalize(local, Q)

    # Assert
    eq_(local.scale, Scale(2))
    eq_(len(local), 16)
    eq_(restored, family.intersect(Q))


def test_should_measure_exact_midpoint_distance():

    # Arrange
    p = DyadicSquare(2, 0, 0)
    q = DyadicSquare(2, 1, 1)

    # Act
    distance = dyadic.midpoint_distance(p, q)

    # Assert
    ok_(distance * distance == Fraction(2, 16))
    eq_(dyadic.midpoint_distance(p, DyadicSquare(2, 3, 0)), Fraction(3, 4))


def test_should_read_back_a_written_interval_family():

    # Arrange
    family = IntervalFamily(Scale(3), [DyadicInterval(3, 1), DyadicInterval(3, 6)])

    # Act
    text = dyadic.dumps(family)

    # Assert
    eq_(dyadic.loads(text), family)
    ok_(text.startswith('{'))


@raises(dyadic.FamilyFormatError)
def test_should_reject_a_count_mismatch():

    # Act
    dyadic.loads('{"count": 3, "scale_exponent": 2}\n2 0 0\n')


def test_should_compose_covers_through_an_intermediate_scale():

    # Arrange
    family = random_frostman(Scale(6), 1, seed=2)

    for fine in range(7):
        for coarse in range(fine + 1):
            # Act
            direct = dyadic.cover_at(family, Scale(coarse))
            composed = dyadic.cover_at(dyadic.cover_at(family, Scale(fine)), Scale(coarse))

            # Assert
            eq_(direct, composed)


def test_should_shrink_covers_at_coarser_scales():

    # Arrange
    family = random_frostman(Scale(6), 1, seed=2)
    subfamily = sample_subset(family, len(family) // 3, seed=1)

    # Act
    counts = [len(dyadic.cover_at(family, Scale(k))) for k in range(7)]

    # Assert
    eq_(counts[0], 1)
    eq_(counts[-1], len(family))
    ok_(all(a <= b for a, b in zip(counts, counts[1:])))
    for k in range(7):
        cover = dyadic.cover_at(family, Scale(k))
        ok_(all(Q in cover for Q in dyadic.cover_at(subfamily, Scale(k))))
