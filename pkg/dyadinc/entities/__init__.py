from .base import BaseFamily
from .objects import *
