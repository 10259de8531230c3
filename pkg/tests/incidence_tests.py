from fractions import Fraction

from nose.tools import ok_, eq_, raises

from dyadinc import incidence
from dyadinc.dyadic import DyadicSquare, Scale, SquareFamily
from dyadinc.incidence import NiceConfiguration
from dyadinc.tubes import DyadicTube, TubeFamily


SCALE = Scale(2)
TUBE = DyadicTube(DyadicSquare(2, 0, 0))


def shared_tube_configuration():
    P = SquareFamily(SCALE, [DyadicSquare(2, 0, 0), DyadicSquare(2, 1, 0)])
    family = TubeFamily(SCALE, [TUBE])
    return NiceConfiguration(SCALE, Fraction(1, 2), 2, 1, P, {p: family for p in P})


def test_should_compute_theta():

    # Assert
    eq_(incidence.theta(Fraction(1, 2), 1), 0)
    eq_(incidence.theta(1, 1), 0)
    eq_(incidence.theta(Fraction(1, 2), Fraction(3, 4)), Fraction(1, 2))


def test_should_give_the_elementary_exponents():

    # Act
    exponents = incidence.elementary_exponents(Fraction(1, 2), 1)

    # Assert
    eq_(exponents, {'wolff': 1, 'elementary_furstenberg': 1, 'target': None})


@raises(incidence.ExponentRangeError)
def test_should_need_s_below_one_for_elementary_exponents():

    # Act
    incidence.elementary_exponents(1, Fraction(3, 2))


@raises(incidence.ExponentRangeError)
def test_should_reject_s_above_t():

    # Act
    incidence.theta(Fraction(3, 4), Fraction(1, 2))


def test_should_validate_a_nice_configuration():

    # Arrange
    configuration = shared_tube_configuration()

    # Act
    report = incidence.validate_nice(configuration)

    # Assert
    ok_(report.valid)
    eq_(report.worst_constant, 2.0)


def test_should_report_a_family_of_the_wrong_size():

    # Arrange
    configuration = shared_tube_configuration()
    configuration.M = 2

    # Act
    report = incidence.validate_nice(configuration)

    # Assert
    ok_(not report.valid)
    eq_(report.witness, {'ix': 0, 'iy': 0})


def test_should_report_a_tube_missing_its_square():

    # Arrange
    p = DyadicSquare(2, 0, 3)
    configuration = NiceConfiguration(SCALE, Fraction(1, 2), 2, 1, SquareFamily(SCALE, [p]), {p: TubeFamily(SCALE, [TUBE])})

    # Act
    report = incidence.validate_nice(configuration)

    # Assert
    ok_(not report.valid)
    eq_(report.witness['tube_ix'], 0)


@raises(incidence.InvalidConfigurationError)
def test_should_require_a_nice_configuration():

    # Arrange
    configuration = shared_tube_configuration()
    configuration.C = configuration.C / 4

    # Act
    incidence.require_nice(configuration)


def test_should_count_shared_incidences():

    # Arrange
    configuration = shared_tube_configuration()

    # Act
    count = incidence.count_incidences(configuration, TubeFamily(SCALE, [TUBE]))

    # Assert
    eq_(count.total, 2)
    eq_(count.histogram[TUBE], 2)


@raises(incidence.MissingTubeError)
def test_should_reject_an_unlisted_tube_when_strict():

    # Act
    incidence.count_incidences(shared_tube_configuration(), TubeFamily(SCALE, []), strict=True)


def test_should_evaluate_the_incidence_bound():

    # Act
    value, factor = incidence.incidence_upper_bound(1, 1, 4, SCALE, Fraction(1, 2), 1, 4, 3)

    # Assert
    ok_(value == 6)
    eq_(factor, 4)


def test_should_evaluate_the_tube_lower_bound_at_full_dimension():

    # Act
    bound = incidence.tube_lower_bound(1, 1, 4, Scale(3), 1, 1)

    # Assert
    ok_(bound == 16)


def test_should_report_incidences_below_the_bound():

    # Arrange
    configuration = shared_tube_configuration()

    # Act
    row = incidence.incidence_report_row(configuration, TubeFamily(SCALE, [TUBE]), Fraction(1, 2))

    # Assert
    eq_(row.incidences, 2)
    eq_(row.P_count, 2)
    ok_(row.ratio < 1)
    ok_(abs(row.C_P - 2 ** 0.5) < 1e-9)


def test_should_check_the_tube_lower_bound():

    # Act
    ratio = incidence.check_tube_lower_bound(shared_tube_configuration(), TubeFamily(SCALE, [TUBE]), Fraction(1, 2))

    # Assert
    ok_(abs(ratio - 2 ** 0.5) < 1e-9)


@raises(incidence.IncidenceBoundError)
def test_should_flag_a_count_beyond_its_budget():

    # Arrange
    configuration = shared_tube_configuration()

    # Act
    incidence.incidence_report_row(configuration, TubeFamily(SCALE, [TUBE]), Fraction(1, 2), budget=Fraction(1, 100))


def test_should_compare_tubes_with_the_alternative_targets():

    # Act
    report = incidence.alternative_report(TubeFamily(SCALE, [TUBE]), Fraction(1, 2))

    # Assert
    eq_(report['T_count'], 1)
    eq_(report['half_count'], 1)
    eq_(report['target_exponent'], 1.0)
