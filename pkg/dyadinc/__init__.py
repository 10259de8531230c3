from .enums import *
from .config import *
from . import entities
from .exponents import Monomial, s_proxy, log2_proxy, pow2
from .dyadic import Scale, DyadicSquare, DyadicInterval, SquareFamily, IntervalFamily
from .tubes import DyadicTube, TubeFamily
from .incidence import NiceConfiguration
from . import deltaset, incidence, refine, multiscale, projections, generators
