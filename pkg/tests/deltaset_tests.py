from fractions import Fraction

from nose.tools import ok_, eq_, raises

from dyadinc import deltaset
from dyadinc.dyadic import DyadicSquare, Scale, SquareFamily, full_grid


def test_should_certify_the_full_grid_with_constant_one():

    # Arrange
    P = full_grid(Scale(3))

    # Act
    certificate = deltaset.spread_certificate(P, 2)

    # Assert
    ok_(certificate.constant() == 1)
    eq_(certificate.witness.k, 0)
    eq_(certificate.total, 64)


def test_should_certify_a_single_square_with_inverse_delta():

    # Arrange
    P = SquareFamily(Scale(4), [DyadicSquare(4, 7, 2)])

    # Act
    certificate = deltaset.spread_certificate(P, 1)

    # Assert
    ok_(certificate.constant() == 16)
    eq_(certificate.witness.k, 4)
    ok_(certificate.witness_ratio() == certificate.constant())


@raises(deltaset.EmptyFamilyError)
def test_should_refuse_to_certify_an_empty_family():

    # Act
    deltaset.spread_certificate(SquareFamily(Scale(2), []), 1)


def test_should_decide_delta_set_membership():

    # Arrange
    P = full_grid(Scale(3))

    # Assert
    ok_(deltaset.is_delta_set(P, 2, 1))
    ok_(not deltaset.is_delta_set(SquareFamily(Scale(3), [DyadicSquare(3, 0, 0)]), 2, 1))


def test_should_lose_at_most_the_density_ratio_on_a_subset():

    # Arrange
    P = full_grid(Scale(4))
    subset = P.intersect(DyadicSquare(1, 0, 1))

    # Act
    before = deltaset.spread_certificate(P, 1).constant()
    after = deltaset.spread_certificate(subset, 1).constant()

    # Assert
    ok_(after <= before * Fraction(len(P), len(subset)))


def test_should_compute_the_regularity_constant():

    # Arrange
    P = full_grid(Scale(4))

    # Act
    certificate = deltaset.regularity_certificate(P, 1)

    # Assert
    eq_(certificate.half_count, 16)
    ok_(certificate.K.value() == 4)


@raises(deltaset.OddScaleError)
def test_should_need_an_even_exponent_for_regularity():

    # Act
    deltaset.regularity_certificate(full_grid(Scale(3)), 1)


def test_should_match_the_frostman_constant_to_the_spread_constant():

    # Arrange
    P = SquareFamily(Scale(3), [DyadicSquare(3, 0, 0), DyadicSquare(3, 7, 7)])

    # Assert
    ok_(deltaset.frostman_measure_constant(P, 1) == deltaset.spread_certificate(P, 1).constant())


def test_should_extract_the_whole_grid_at_full_dimension():

    # Arrange
    B = full_grid(Scale(3))

    # Act
    P = deltaset.frostman_extract(B, 2)

    # Assert
    eq_(P, B)
    ok_(deltaset.dyadic_content(B, 2) == 1)


def test_should_extract_a_row_at_dimension_one():

    # Arrange
    B = SquareFamily(Scale(4), [DyadicSquare(4, ix, 0) for ix in range(16)])

    # Act
    P = deltaset.frostman_extract(B, 1)

    # Assert
    eq_(P, B)


def test_should_thin_the_full_grid_to_inverse_delta_squares():

    # Arrange
    P = full_grid(Scale(4))

    # Act
    thinned = deltaset.thin_subset(P, 1, 1)

    # Assert
    ok_(len(thinned) <= 16)
    ok_(thinned.issubset(P))
    ok_(deltaset.spread_certificate(thinned, 1).constant() <= 64)


def test_should_keep_a_family_that_is_already_thin():

    # Arrange
    P = SquareFamily(Scale(4), [DyadicSquare(4, ix, ix) for ix in range(16)])

    # Act
    thinned = deltaset.thin_subset(P, 1, 4)

    # Assert
    eq_(thinned, P)


@raises(deltaset.NotDeltaSetError)
def test_should_refuse_to_thin_a_concentrated_family():

    # Act
    deltaset.thin_subset(SquareFamily(Scale(4), [DyadicSquare(4, 0, 0)]), 1, 1)
