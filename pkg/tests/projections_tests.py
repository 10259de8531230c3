from fractions import Fraction

from nose.tools import ok_, eq_, raises

from dyadinc import projections
from dyadinc.dyadic import DyadicInterval, DyadicSquare, IntervalFamily, Scale, SquareFamily, full_grid
from dyadinc.enums import Convention
from dyadinc.generators import product_set, random_frostman
from dyadinc.incidence import NiceConfiguration, tube_constant
from dyadinc.projections import DiscreteMeasure
from dyadinc.tubes import DyadicTube, TubeFamily


def vertical_configuration():
    p = DyadicSquare(2, 0, 0)
    T = DyadicTube(DyadicSquare(2, 0, 0), Convention.appendix)
    configuration = NiceConfiguration(Scale(2), Fraction(1, 2), 1, 1, SquareFamily(Scale(2), [p]), {p: TubeFamily(Scale(2), [T])})
    configuration.C = tube_constant(configuration)
    return configuration


def test_should_give_a_single_atom_energy_delta_to_the_minus_s():

    # Arrange
    measure = DiscreteMeasure(Scale(4), {DyadicInterval(4, 5): 1})

    # Act
    energy = projections.riesz_energy(measure, Fraction(1, 2))

    # Assert
    eq_(energy, 4)


def test_should_sum_the_kernel_over_two_atoms():

    # Arrange
    measure = DiscreteMeasure(Scale(4), {DyadicInterval(4, 0): Fraction(1, 2), DyadicInterval(4, 3): Fraction(1, 2)})

    # Act
    energy = projections.riesz_energy(measure, 1)

    # Assert
    eq_(energy, Fraction(32, 3))


def test_should_measure_distances_between_square_atoms():

    # Arrange
    measure = DiscreteMeasure(Scale(2), {DyadicSquare(2, 0, 0): Fraction(1, 2), DyadicSquare(2, 3, 0): Fraction(1, 2)})

    # Act
    energy = projections.riesz_energy(measure, 1)

    # Assert
    eq_(energy, Fraction(8, 3))


@raises(ValueError)
def test_should_reject_an_energy_exponent_of_two():

    # Act
    projections.riesz_energy(DiscreteMeasure(Scale(2), {DyadicInterval(2, 0): 1}), 2)


@raises(ValueError)
def test_should_reject_non_positive_weights():

    # Act
    DiscreteMeasure(Scale(2), {DyadicInterval(2, 0): 0})


def test_should_project_columns_onto_their_abscissa():

    # Arrange
    family = full_grid(Scale(2))

    # Act
    image = projections.project(family, 0)
    measure = projections.project(DiscreteMeasure.counting(family), 0)

    # Assert
    eq_(image, IntervalFamily(Scale(2), [DyadicInterval(2, i) for i in range(4)]))
    eq_(measure.mass, 1)
    eq_(measure.atoms[DyadicInterval(2, 1)], Fraction(1, 4))


def test_should_follow_the_convention_in_projection_values():

    # Assert
    eq_(projections.projection_value(Fraction(1, 2), 1, 1), Fraction(1, 2))
    eq_(projections.projection_value(Fraction(1, 2), 1, 1, Convention.main_text), Fraction(3, 2))


@raises(ValueError)
def test_should_reject_a_slope_of_one():

    # Act
    projections.project(full_grid(Scale(2)), 1)


def test_should_select_at_least_half_of_the_directions():

    # Arrange
    family = full_grid(Scale(3))
    slopes = [Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2)]

    # Act
    selected, energies = projections.good_directions(family, slopes, Fraction(1, 2))
    rows = projections.energy_rows(energies, selected)

    # Assert
    ok_(2 * len(selected) >= len(slopes))
    eq_(selected, sorted(selected))
    eq_(len(energies), 4)
    eq_(sum(1 for row in rows if row.selected), len(selected))


def test_should_report_projections_in_good_directions():

    # Arrange
    family = full_grid(Scale(3))
    slopes = [Fraction(-1, 2), Fraction(0), Fraction(1, 4)]

    # Act
    rows = projections.counter_assumption_report(family, slopes, 1)

    # Assert
    ok_(len(rows) >= 2)
    ok_(all(row['covering'] >= 8 for row in rows))
    eq_(rows[0]['target'], 8.0)


def test_should_shift_tube_parameters_under_the_shear():

    # Act
    sheared = projections.shear_tube(DyadicTube(DyadicSquare(4, 5, 6), Convention.appendix), DyadicTube(DyadicSquare(2, 1, 1), Convention.appendix))

    # Assert
    eq_(sheared.param, DyadicSquare(4, 1, 2))


def test_should_assemble_a_product_structure_in_the_vertical_tube():

    # Arrange
    T0 = DyadicTube(DyadicSquare(1, 0, 0), Convention.appendix)

    # Act
    structure = projections.product_structure(T0, vertical_configuration())
    report = structure.report(Fraction(1, 2))

    # Assert
    eq_(structure.points, [(0, 0)])
    eq_(structure.fine_count, 1)
    eq_(list(structure.all_tubes()), [T0])
    eq_(report['heights'], 1)
    eq_(report['tubes'], 1)
    eq_(report['target_exponent'], 1.0)


@raises(projections.ProductStructureError)
def test_should_need_the_thick_scale_to_be_the_square_root():

    # Act
    projections.product_structure(DyadicTube(DyadicSquare(2, 0, 0), Convention.appendix), vertical_configuration())


@raises(projections.ProductStructureError)
def test_should_need_the_appendix_convention():

    # Act
    projections.product_structure(DyadicTube(DyadicSquare(1, 0, 0)), vertical_configuration())


def test_should_select_good_directions_of_a_cantor_product():

    # Arrange
    family = product_set(Scale(6), Fraction(1, 2), Fraction(1, 2), seed=1)
    slopes = [Fraction(i, 8) for i in range(-8, 8)]

    # Act
    selected, energies = projections.good_directions(family, slopes, Fraction(1, 2))

    # Assert
    mean = sum(energies.values(), Fraction(0)) / len(energies)
    ok_(2 * len(selected) >= len(slopes))
    ok_(all(energies[sigma] <= 2 * mean for sigma in selected))
    ok_(all(energies[sigma] > 2 * mean for sigma in slopes if sigma not in selected))


def test_should_select_good_directions_of_a_random_frostman_set():

    # Arrange
    family = random_frostman(Scale(6), 1, seed=4)
    slopes = [Fraction(i, 4) for i in range(-4, 4)]

    # Act
    selected, _ = projections.good_directions(family, slopes, Fraction(1, 2), convention=Convention.main_text)

    # Assert
    ok_(2 * len(selected) >= len(slopes))


def test_should_certify_most_projections_of_a_cantor_product():

    # Arrange
    family = product_set(Scale(6), Fraction(1, 2), Fraction(1, 2))
    slopes = [Fraction(i, 8) for i in range(-8, 8)]

    # Act
    rows, passed = projections.direction_certificates(family, slopes, Fraction(1, 2))

    # Assert
    eq_(len(rows), 16)
    ok_(passed >= Fraction(9, 10))
    ok_(all(row['extracted'] <= row['covering'] for row in rows))


@raises(projections.DirectionCertificateError)
def test_should_fail_directions_over_the_certificate_budget():

    # Act
    projections.direction_certificates(full_grid(Scale(3)), [Fraction(0), Fraction(1, 2)], Fraction(1, 2), budget=0)
