## Exit codes
EXIT_OK = 0
EXIT_ASSERTION = 2
EXIT_CONFIG = 3

## Output names
SUMMARY_FILE = 'summary.json'
FAMILY_FILE = 'family.txt'
TUBES_FILE = 'tubes.txt'
TRACE_SUFFIX = '.trace.json'

## CSV schemas
GEN_COLUMNS = ['kind', 'delta', 'seed', 'count', 'dimension_proxy']
CERTIFY_COLUMNS = ['delta', 's', 'seed', 'C', 'witness_k', 'witness_ix', 'witness_iy', 'count', 'total', 'half_count', 'K']
INCIDENCE_COLUMNS = ['delta', 's', 't', 'M', 'C_P', 'C_T', 'P_count', 'T_count', 'incidences', 'bound', 'ratio']
REFINE_COLUMNS = ['delta', 'coarse', 'seed', 'P_count', 'P_bar_count', 'T_Delta_count', 'H', 'C2', 'refined_count', 'budget', 'budget_limit']
DECOMPOSE_COLUMNS = ['delta', 'seed', 'j', 'start', 'end', 'kind', 'exponent']
UNIFORMIZE_COLUMNS = ['delta', 'seed', 'n', 'P_count', 'uniform_count', 'numbers']
ENERGY_COLUMNS = ['sigma', 'energy_num', 'energy_den', 'selected']
SUITE_COLUMNS = ['check', 'status', 'detail']

## Defaults
# Slope floor s = t − DECOMPOSE_SLOPE_GAP when a decompose run names none.
DECOMPOSE_SLOPE_GAP = '1/5'
UNIFORMIZE_LEVELS = [2, 3, 4]

## Suite
SUITE_SEED_COUNT = 100
SUITE_INCIDENCE_SCALES = [6, 8, 10]
# (s, t, furstenberg construction); Cantor families need even scale exponents.
SUITE_INCIDENCE_EXPONENTS = [('1/2', '1', 'centers'), ('1/2', '1', 'dual'), ('1/2', '1/2', 'target'), ('3/4', '9/10', 'centers')]
SUITE_DUALITY_EXPONENT = 4
SUITE_FIBER_EXPONENTS = [3, 4, 5]
SUITE_TARGET_EXPONENT = 12
SUITE_UNIFORMIZE_SETS = 50
SUITE_ROOF_LENGTHS = [6, 12, 24]
SUITE_KAUFMAN_INPUTS = 200
SUITE_KAUFMAN_LENGTH = 16
SUITE_DIRECTION_EXPONENT = 8
