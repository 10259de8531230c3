from fractions import Fraction

from schematics.models import Model
from schematics.types import StringType, BooleanType, IntType, FloatType, DictType, ListType, ModelType

from ..exponents import Monomial, pow2


def exact_fields(value: Monomial):
    """Split an exact constant into coefficient and power-of-two exponent fields."""

    coefficient, exponent = value.split()
    return {
        'num': coefficient.numerator,
        'den': coefficient.denominator,
        'exp_num': exponent.numerator,
        'exp_den': exponent.denominator}


class ExactValue(Model):
    """A non-negative constant written as (num/den)·2^(exp_num/exp_den).

    Properties

        num : `int`
            Coefficient numerator.
        den : `int`
            Coefficient denominator.
        exp_num : `int`
            Exponent of two, numerator.
        exp_den : `int`
            Exponent of two, denominator.
    """

    num = IntType(required=True)
    den = IntType(default=1)
    exp_num = IntType(default=0)
    exp_den = IntType(default=1)

    @classmethod
    def of(cls, value):
        return cls(exact_fields(value if isinstance(value, Monomial) else Monomial(value)))

    def value(self):
        return Monomial(Fraction(self.num, self.den)) * pow2(Fraction(self.exp_num, self.exp_den))

    def __float__(self):
        return float(self.value())

    def __repr__(self):
        return str(self.to_primitive())


class Witness(Model):
    """A dyadic cell: k is the scale exponent, iy is absent for intervals."""

    k = IntType(required=True)
    ix = IntType(required=True)
    iy = IntType()

    def __repr__(self):
        return str(self.to_primitive())


class SpreadCertificate(Model):
    """The smallest C making a family a (δ,s,C)-set.

    C = count·2^(k·s)/total where k is the witness level, so C is stored as the rational
    coefficient count/total times 2 to a rational power.

    Properties

        s_num : `int`
            Numerator of the exponent proxy.
        s_den : `int`
            Denominator of the exponent proxy (a power of two).
        C_num : `int`
            Numerator of the rational part of C.
        C_den : `int`
            Denominator of the rational part of C.
        C_exp_num : `int`
            Numerator of the power of two in C.
        C_exp_den : `int`
            Denominator of the power of two in C.
        witness : `dyadinc.entities.Witness`
            The dyadic cell achieving the maximum.
        count : `int`
            |P ∩ witness|.
        total : `int`
            |P|.
        scale_exponent : `int`
            The exponent of δ.
    """

    s_num = IntType(required=True)
    s_den = IntType(required=True)
    C_num = IntType(required=True)
    C_den = IntType(required=True)
    C_exp_num = IntType(required=True)
    C_exp_den = IntType(required=True)
    witness = ModelType(Witness, required=True)
    count = IntType(required=True)
    total = IntType(required=True)
    scale_exponent = IntType(required=True)

    def __repr__(self):
        return str(self.to_primitive())

    @property
    def s(self):
        return Fraction(self.s_num, self.s_den)

    def constant(self):
        return Monomial(Fraction(self.C_num, self.C_den)) * pow2(Fraction(self.C_exp_num, self.C_exp_den))

    def witness_ratio(self):
        """Recompute |P∩Q|/(|P|·r^s) at the witness."""

        return Monomial(Fraction(self.count, self.total)) * pow2(self.witness.k * self.s)


class RegularityCertificate(Model):
    """Spread certificate plus the covering constant at δ^(1/2).

    Properties

        spread : `dyadinc.entities.SpreadCertificate`
            The certificate at (δ, s).
        half_count : `int`
            |P|_{δ^(1/2)}.
        K : `dyadinc.entities.ExactValue`
            |P|_{δ^(1/2)}·δ^(s/2).
    """

    spread = ModelType(SpreadCertificate, required=True)
    half_count = IntType(required=True)
    K = ModelType(ExactValue, required=True)

    def __repr__(self):
        return str(self.to_primitive())


class NiceReport(Model):
    """Outcome of a nice-configuration validation.

    Properties

        valid : `bool`
            Whether every condition holds.
        reason : `str`
            The first failing condition, if any.
        witness : `dict`
            The square (and tube) at fault.
        worst_constant : `float`
            The largest spread constant met among the 𝒯(p).
    """

    valid = BooleanType(required=True)
    reason = StringType()
    witness = DictType(IntType)
    worst_constant = FloatType()

    def __repr__(self):
        return str(self.to_primitive())


class BoundValue(Model):
    """An incidence bound without its log factor, plus the log factor.

    Properties

        value : `dyadinc.entities.ExactValue`
            The algebraic part of the bound.
        log_factor : `int`
            ⌈log2(1/δ)⌉^c.
        budget : `int`
            The test budget multiplier applied to the log factor.
    """

    value = ModelType(ExactValue, required=True)
    log_factor = IntType(required=True)
    budget = IntType(default=1)

    def __repr__(self):
        return str(self.to_primitive())


class IncidenceRow(Model):
    """One row of an incidence report."""

    delta = IntType(required=True)
    s = FloatType(required=True)
    t = FloatType(required=True)
    M = IntType(required=True)
    C_P = FloatType(required=True)
    C_T = FloatType(required=True)
    P_count = IntType(required=True)
    T_count = IntType(required=True)
    incidences = IntType(required=True)
    bound = FloatType(required=True)
    ratio = FloatType(required=True)

    def __repr__(self):
        return str(self.to_primitive())


class ThickCoverTrace(Model):
    """Pigeonhole trace of the thick-tube refinement.

    Properties

        delta_exponent : `int`
            Exponent of the coarse scale Δ.
        m1 : `int`
            Fine tubes per thick tube through each retained square (a power of two).
        m2 : `int`
            Thick tubes per retained square.
        square_level : `int`
            The dyadic level j selecting thick tubes by square count.
        H : `int`
            The incidence floor 2^j·m1.
        pairs : `int`
            Number of distinct (m1, m2) pairs met while pigeonholing.
        C1 : `dyadinc.entities.ExactValue`
            Spread constant bound of the input families.
        C2 : `dyadinc.entities.ExactValue`
            Spread constant of the thick tubes.
        levels : `dict[str, int]`
            Selected per-square level j(p), keyed by `ix,iy`.
    """

    delta_exponent = IntType(required=True)
    m1 = IntType(required=True)
    m2 = IntType(required=True)
    square_level = IntType(required=True)
    H = IntType(required=True)
    pairs = IntType(required=True)
    C1 = ModelType(ExactValue)
    C2 = ModelType(ExactValue)
    levels = DictType(IntType, default={})

    def __repr__(self):
        return str(self.to_primitive())


class InductionTrace(Model):
    """Constants logged by the induction-on-scales refinement.

    Properties

        delta_exponent : `int`
            Exponent of Δ.
        M_bar : `int`
            Popular number of thick tubes per coarse square.
        N : `int`
            Popular number of fine tubes per thick tube (a power of two).
        M_delta : `int`
            Common number of thick tubes per coarse square after trimming.
        M_Q : `dict[str, int]`
            Per coarse square, the common size of the rescaled families.
        C_delta : `dyadinc.entities.ExactValue`
            Spread constant of the coarse configuration.
        C_Q : `dict[str, float]`
            Per coarse square, the spread constant of the fine configuration.
        separated : `dict[str, int]`
            Per coarse square, the size of a separated subfamily of the representatives.
        budget : `float`
            Measured budget of the product inequality.
        budget_limit : `int`
            The allowed budget.
    """

    delta_exponent = IntType(required=True)
    M_bar = IntType(required=True)
    N = IntType(required=True)
    M_delta = IntType(required=True)
    M_Q = DictType(IntType, default={})
    C_delta = ModelType(ExactValue)
    C_Q = DictType(FloatType, default={})
    separated = DictType(IntType, default={})
    budget = FloatType()
    budget_limit = IntType()

    def __repr__(self):
        return str(self.to_primitive())


class DecompositionInterval(Model):
    """A tagged window [c, d] of a branching function."""

    c_num = IntType(required=True)
    c_den = IntType(required=True)
    d_num = IntType(required=True)
    d_den = IntType(required=True)
    kind = StringType(required=True, choices=['linear', 'superlinear'])
    slope_num = IntType(required=True)
    slope_den = IntType(required=True)

    def __repr__(self):
        return str(self.to_primitive())


class ScaleDecompositionRecord(Model):
    """Serializable form of a multiscale decomposition.

    Properties

        base_exponent : `int`
            Δ = 2^-base_exponent.
        m : `int`
            δ = Δ^m.
        scales : `list[int]`
            Exponents x_j with Δ_j = Δ^(x_j), from 0 to m.
        structured : `list[int]`
            Indices j in 𝒮.
        bad : `list[int]`
            Indices j in ℬ.
        exponents : `dict[str, str]`
            t_j as rational strings, keyed by j.
        tau : `str`
            Shortest structured window over m.
        epsilon : `str`
            The decomposition precision that succeeded.
        attempts : `int`
            Number of refinements tried.
        intervals : `list[dyadinc.entities.DecompositionInterval]`
            The interval decomposition before snapping.
    """

    base_exponent = IntType(required=True)
    m = IntType(required=True)
    scales = ListType(IntType, required=True)
    structured = ListType(IntType, default=[])
    bad = ListType(IntType, default=[])
    exponents = DictType(StringType, default={})
    tau = StringType()
    epsilon = StringType()
    attempts = IntType()
    intervals = ListType(ModelType(DecompositionInterval), default=[])

    def __repr__(self):
        return str(self.to_primitive())


class EnergyRow(Model):
    """Energy of one projection, as written to the energy table."""

    sigma = StringType(required=True)
    energy_num = IntType(required=True)
    energy_den = IntType(required=True)
    selected = BooleanType(required=True)

    def __repr__(self):
        return str(self.to_primitive())


class GeneratorSpec(Model):
    """Inputs of a seeded generator.

    Properties

        kind : `str`
            cantor | product | random_frostman | cantor_target | furstenberg.
        scale_exponent : `int`
            δ = 2^-scale_exponent.
        s : `str`
            Primary exponent, as a decimal or rational string.
        t : `str`
            Secondary exponent.
        seed : `int`
            64-bit seed.
        dimension : `int`
            1 or 2 for Cantor sets.
        options : `dict`
            Generator specific options; furstenberg reads shared_slopes, single_square,
            convention and construction (centers | dual | target).
    """

    kind = StringType(required=True, choices=['cantor', 'product', 'random_frostman', 'cantor_target', 'furstenberg'])
    scale_exponent = IntType(required=True, min_value=0)
    s = StringType(required=True)
    t = StringType()
    seed = IntType(default=0, min_value=0, max_value=2 ** 64 - 1)
    dimension = IntType(default=2, choices=[1, 2])
    options = DictType(StringType, default={})

    def __repr__(self):
        return str(self.to_primitive())


class ExperimentConfig(Model):
    """A complete, serializable experiment run.

    Properties

        version : `int`
            Config schema version.
        command : `str`
            The sub-command to run.
        generator : `dyadinc.entities.GeneratorSpec`
            The input generator.
        sweep : `list[int]`
            Scale exponents to sweep.
        seeds : `list[int]`
            Seeds to sweep.
        coarse_exponent : `int`
            Exponent of the coarse scale Δ where a command needs one.
        epsilon : `str`
            Precision for decompositions.
        epsilon_good : `str`
            Threshold for good scales.
        budgets : `dict[str, int]`
            Overrides for report budgets.
        output : `str`
            Output directory.
    """

    version = IntType(default=1)
    command = StringType(required=True, choices=['gen', 'certify', 'incidence', 'refine', 'decompose', 'uniformize', 'project', 'suite'])
    generator = ModelType(GeneratorSpec)
    sweep = ListType(IntType, default=[])
    seeds = ListType(IntType, default=[])
    coarse_exponent = IntType()
    epsilon = StringType(default='1/16')
    epsilon_good = StringType(default='1/2')
    budgets = DictType(IntType, default={})
    output = StringType(default='.')

    def __repr__(self):
        return str(self.to_primitive())
