from enum import Enum

class Convention(Enum):
    main_text = 1
    appendix = 2


class IntervalKind(Enum):
    linear = 1
    superlinear = 2


class ScaleClass(Enum):
    structured = 1
    bad = 2
    normal = 3
    good = 4


class GeneratorKind(Enum):
    cantor = 1
    product = 2
    random_frostman = 3
    cantor_target = 4
    furstenberg = 5


class Command(Enum):
    gen = 1
    certify = 2
    incidence = 3
    refine = 4
    decompose = 5
    uniformize = 6
    project = 7
    suite = 8


class Construction(Enum):
    centers = 1
    dual = 2
    target = 3
