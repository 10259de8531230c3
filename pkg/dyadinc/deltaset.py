import logging
from collections import Counter
from fractions import Fraction

from . import config
from .dyadic import DyadicSquare, Scale, cover_at
from .entities.objects import ExactValue, RegularityCertificate, SpreadCertificate, Witness
from .exponents import Monomial, floor_pow2, pow2, s_proxy

logger = logging.getLogger(__name__)


def _witness(cell):
    if isinstance(cell, DyadicSquare):
        return Witness({'k': cell.k, 'ix': cell.ix, 'iy': cell.iy})
    return Witness({'k': cell.k, 'ix': cell.i})


def spread_certificate(P, s):
    """Certify P as a (δ,s,C)-set with the smallest possible C.

    Scans every dyadic level r = 2^-j, j = 0..k, and every r-cell meeting P for the ratio
    |P ∩ Q| / (|P|·r^s). Ties keep the coarsest level, then the first cell in canonical order.

    Parameters

        P : `dyadinc.dyadic.SquareFamily | dyadinc.dyadic.IntervalFamily`
            A nonempty family at scale δ.
        s : `Fraction | float | str`
            The exponent; replaced by its 2^-16 proxy.

    Returns

        certificate : `dyadinc.entities.SpreadCertificate`
    """

    if not len(P):
        raise EmptyFamilyError('spread certificate')
    s = s_proxy(s)
    total = len(P)
    best = None
    for j in range(P.scale.k + 1):
        counts = Counter(p.parent(Scale(j)) for p in P)
        top = max(counts.values())
        cell = min((q for q, c in counts.items() if c == top), key=lambda q: q.sort_key())
        ratio = Monomial(Fraction(top, total)) * pow2(j * s)
        if best is None or ratio > best[0]:
            best = (ratio, j, cell, top)
    ratio, j, cell, top = best
    coefficient = Fraction(top, total)
    exponent = j * s
    certificate = SpreadCertificate({
        's_num': s.numerator,
        's_den': s.denominator,
        'C_num': coefficient.numerator,
        'C_den': coefficient.denominator,
        'C_exp_num': exponent.numerator,
        'C_exp_den': exponent.denominator,
        'witness': _witness(cell),
        'count': top,
        'total': total,
        'scale_exponent': P.scale.k})
    # Lower cardinality bound: |P| ≥ C^-1·δ^-s.
    if Monomial(total) * certificate.constant() < P.scale.power(-s):
        raise CertificateInvariantError(certificate)
    logger.debug('Spread constant %f for %i members at scale 2^-%i (witness level %i)', float(ratio), total, P.scale.k, j)
    return certificate


def is_delta_set(P, s, C):
    """Whether P is a (δ,s,C)-set."""

    return spread_certificate(P, s).constant() <= C


def frostman_measure_constant(P, s):
    """Ball constant of the normalized counting measure on P: μ(Q) ≤ C·r^s for every dyadic r-cell Q.

    With μ = |P|^-1 Σ δ-cells, μ(Q) = |P ∩ Q|/|P|, so the constant is the spread constant of P.
    """

    return spread_certificate(P, s).constant()


def regularity_certificate(P, s):
    """Certify the covering number of P at δ^(1/2): K = |P|_{δ^(1/2)}·δ^(s/2)."""

    if P.scale.k % 2:
        raise OddScaleError(P.scale.k)
    s_value = s_proxy(s)
    spread = spread_certificate(P, s_value)
    half = len(cover_at(P, P.scale.sqrt()))
    K = Monomial(half) * P.scale.power(s_value / 2)
    return RegularityCertificate({'spread': spread, 'half_count': half, 'K': ExactValue.of(K)})


def _capped_tree(B, s):
    """Bottom-up capped counts over the dyadic tree of B.

    cnt(Q) = min(Σ cnt(children), ⌊(r/δ)^s⌋) for a cell of side r, with leaves counting one.
    Returns the per-level counts, the children lists and the capped root count.
    """

    k = B.scale.k
    counts = {p: 1 for p in B}
    children = {}
    levels = [counts]
    for j in range(k - 1, -1, -1):
        cap = floor_pow2((k - j) * s)
        upper = {}
        for cell, value in levels[-1].items():
            parent = cell.parent(Scale(j))
            upper[parent] = upper.get(parent, 0) + value
            children.setdefault(parent, []).append(cell)
        levels.append({cell: min(value, cap) for cell, value in upper.items()})
    root = min(sum(levels[-1].values()), floor_pow2(k * s))
    children[None] = list(levels[-1].keys())
    merged = {}
    for level in levels:
        merged.update(level)
    return merged, children, root


def dyadic_content(B, s):
    """Dyadic content of B with floored weights: min over dyadic covers of Σ ⌊(r/δ)^s⌋·δ^s."""

    if not len(B):
        raise EmptyFamilyError('content')
    s = s_proxy(s)
    _, _, root = _capped_tree(B, s)
    return Monomial(root) * B.scale.power(s)


def frostman_extract(B, s, constant: int = None):
    """Extract a δ-separated (δ,s,A/κ̂)-set P ⊂ B with |P| ≤ δ^-s.

    Counts are capped bottom-up so that no r-cell keeps more than (r/δ)^s members, then the
    capped root budget is distributed top-down, always serving the child with the largest
    capped count first (canonical order on ties).
    """

    if not len(B):
        raise EmptyFamilyError('Frostman extraction')
    if constant is None:
        constant = config.FROSTMAN_CONSTANT
    s = s_proxy(s)
    counts, children, root = _capped_tree(B, s)
    selected = []
    stack = [(None, root)]
    while stack:
        cell, budget = stack.pop()
        if cell is not None and cell in B and cell.k == B.scale.k:
            if budget:
                selected.append(cell)
            continue
        ordered = sorted(children.get(cell, []), key=lambda c: (-counts[c], c.sort_key()))
        remaining = budget
        for child in ordered:
            share = min(counts[child], remaining)
            remaining -= share
            if share:
                stack.append((child, share))
    P = B.derive(selected)
    content = Monomial(root) * B.scale.power(s)
    certificate = spread_certificate(P, s)
    if certificate.constant() * content > constant:
        raise CertificateBudgetError(certificate, constant)
    logger.info('Frostman extraction kept %i of %i cells (content %f)', len(P), len(B), float(content))
    return P


def thin_subset(P, s, C, constant: int = None):
    """A subset P′ ⊂ P with |P′| ≤ δ^-s that is still a (δ,s,A·C)-set."""

    if constant is None:
        constant = config.THIN_CONSTANT
    s = s_proxy(s)
    if not is_delta_set(P, s, C):
        raise NotDeltaSetError(P.scale.k, s, C)
    if Monomial(len(P)) <= P.scale.power(-s):
        return P
    thinned = frostman_extract(P, s)
    certificate = spread_certificate(thinned, s)
    if certificate.constant() > Monomial(C) * constant:
        raise CertificateBudgetError(certificate, constant)
    return thinned


class EmptyFamilyError(Exception):
    def __init__(self, operation):
        self.message = 'Cannot compute the {} of an empty family.'.format(operation)
        super().__init__(self.message)


class OddScaleError(Exception):
    def __init__(self, k):
        self.message = 'Regularity needs an even scale exponent, got {}.'.format(k)
        super().__init__(self.message)


class NotDeltaSetError(Exception):
    def __init__(self, k, s, C):
        self.message = 'Family at scale 2^-{} is not a (δ,{},{})-set.'.format(k, s, C)
        super().__init__(self.message)


class CertificateInvariantError(Exception):
    def __init__(self, certificate):
        self.witness = certificate.to_primitive()
        self.message = 'Certificate violates |P| ≥ C^-1·δ^-s: {}'.format(self.witness)
        super().__init__(self.message)


class CertificateBudgetError(Exception):
    def __init__(self, certificate, constant):
        self.witness = certificate.to_primitive()
        self.message = 'Certificate exceeds its budget {}: {}'.format(constant, self.witness)
        super().__init__(self.message)
