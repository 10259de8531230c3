from fractions import Fraction


## Exact arithmetic
# Real exponents are replaced by their nearest multiple of 2^-S_PROXY_BITS.
S_PROXY_BITS = 16
# Rounding granularity of log2 proxies in branching functions.
LOG_PROXY_BITS = 32
# Irrational kernel values are rounded to this many fractional bits.
ENERGY_PROXY_BITS = 48
# Relative gap above which float log2 decides a comparison without the exact fallback.
FLOAT_DECISION_GAP = 1e-9


## Tubes
SLOPE_FIBER_BOUND = 10
SLOPE_SPREAD_FACTOR = 10
SLOPE_SPREAD_CONVERSE = 40
RESCALE_COVER_LIMIT = 4


## Delta sets
FROSTMAN_CONSTANT = 64
THIN_CONSTANT = 64


## Incidences
INCIDENCE_LOG_BUDGET = 10
INCIDENCE_LOG_POWER = 2


## Refinement
PIGEONHOLE_FRACTION = Fraction(1, 200)
THICK_INCIDENCE_FLOOR = 8
THICK_SPREAD_BUDGET = 64
THICK_SPREAD_POWER = 4
SEPARATION_CONSTANT = 8
INDUCTION_BUDGET_POWER = 8
INDUCTION_CONCLUSION_BUDGET = 4
INDUCTION_CONCLUSION_POWER = 4


## Multiscale
DECOMPOSITION_RETRIES = 6
# Structured windows may lose this power of 1/Δ in their window certificate.
WINDOW_SLACK_POWER = 4


## Projections
GOOD_DIRECTION_FACTOR = 2
DIRECTION_CERTIFICATE_BUDGET = 256
# Share of directions whose Frostman-extracted projection must certify within the budget.
GOOD_DIRECTION_SHARE = Fraction(9, 10)


## Generators
PRNG = 'PCG64'
CANTOR_BASE_EXPONENT = 2
CANTOR_CERTIFICATE_BUDGET = 16
FURSTENBERG_CERTIFICATE_BUDGET = 640
DIMENSION_PROXY_TOLERANCE = Fraction(1, 5)
