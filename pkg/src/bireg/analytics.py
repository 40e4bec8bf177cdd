"""Closed-form probability oracles for the biregular model.

Everything here is a pure function of the parameters.  Binomial-ratio
quantities are exact `Fraction`s when the sides are small (n, kn <= 1000)
and log-gamma sums in double precision otherwise; where both paths run they
agree to ~1e-9 relative and tests pin that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExpFormOrderingError, HypothesisViolated, OutOfRange
from .params import GraphParams

#: above this side size, binomial ratios switch to log-space evaluation
EXACT_SIDE_LIMIT = 1000

#: tolerance for the product-vs-exponential ordering self-check
EXP_FORM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ThresholdValue:
    """The matching threshold parameter c = k d^2 / n - ln(kd)."""

    c: float


@dataclass(frozen=True)
class ProbabilityBound:
    """Bounds on a probability; exact rational forms attached when computed.

    `exact` is the exact probability itself when known.  `exp_form` carries
    the looser closed form exp(-d s t / n) for the no-edge bound.
    """

    upper: float
    lower: float | None = None
    exact: Fraction | None = None
    lower_exact: Fraction | None = None
    upper_exact: Fraction | None = None
    exp_form: float | None = None


@dataclass(frozen=True)
class CommutativeDegreeBounds:
    """Degree window for the layered construction: non-commutative whp below
    d_low, commutative whp above d_high.  feasible is False when d_high
    exceeds m, i.e. no admissible d satisfies the upper branch."""

    d_low: float
    d_high: float
    feasible: bool


def threshold_c(params: GraphParams) -> ThresholdValue:
    """c = k d^2 / n - ln(kd); the matching dichotomy pivots on its sign and growth."""
    kd2_over_n = Fraction(params.k_num * params.d * params.d, params.k_den * params.n)
    return ThresholdValue(float(kd2_over_n) - math.log(params.kd))


def overlap_expectations(
    params: GraphParams, b_size: int | None = None
) -> tuple[Fraction | None, Fraction | None]:
    """Exact expectations (E|Gamma(y) ∩ Gamma(y')|, E|Gamma(y) ∩ B|).

    The pair term is kd(d-1)/(n-1) (None when n < 2, where no pair y != y'
    exists); the set term is d|B|/n, included when b_size is given.
    """
    pair = None
    if params.n >= 2:
        pair = Fraction(
            params.k_num * params.d * (params.d - 1), params.k_den * (params.n - 1)
        )
    against_set = None
    if b_size is not None:
        if not 0 <= b_size <= params.kn:
            raise OutOfRange(f"b_size = {b_size} outside 0..{params.kn}")
        against_set = Fraction(params.d * b_size, params.n)
    return pair, against_set


def _ratio(a_top: int, b_top: int, a_bot: int, b_bot: int) -> Fraction:
    """C(a_top, b_top) / C(a_bot, b_bot), exact."""
    den = math.comb(a_bot, b_bot)
    if den == 0:
        raise OutOfRange(f"C({a_bot},{b_bot}) = 0 in denominator")
    return Fraction(math.comb(a_top, b_top), den)


def no_edge_exact(
    s: int, params: GraphParams, side: str = "in", conditioned: bool = False
) -> Fraction:
    """Exact probability that one vertex has no neighbor in a fixed s-set.

    side="in": the in-neighborhood of a z avoids S subset Y, ratio
    C(n-s, d)/C(n, d); conditioned on the implicit edge y->z (with
    S avoiding y) it is C(n-1-s, d-1)/C(n-1, d-1).  side="out" is the dual
    with (kn, kd) in place of (n, d).
    """
    if side not in ("in", "out"):
        raise ValueError(f"side must be 'in' or 'out', got {side!r}")
    size, deg = (params.n, params.d) if side == "in" else (params.kn, params.kd)
    limit = size - 1 if conditioned else size
    if not 0 <= s <= limit:
        raise OutOfRange(
            f"s = {s} outside 0..{limit} ({side}-side, conditioned={conditioned})"
        )
    if conditioned:
        return _ratio(size - 1 - s, deg - 1, size - 1, deg - 1)
    return _ratio(size - s, deg, size, deg)


def no_edge_upper(
    s: int, t: int, params: GraphParams, conditioned: bool = True
) -> ProbabilityBound:
    """Upper bound on Pr(no edges from an s-set of Y to a t-set of Z).

    upper = (single-vertex no-edge probability)^t; the looser closed form
    exp(-d s t / n) is attached and the ordering product <= exp-form is
    asserted to 1e-12.  That ordering carries an asymptotic 1+o(1) factor,
    so at small (d, s, n) it can genuinely fail, in which case
    ExpFormOrderingError is raised rather than silently reporting it.
    """
    if s + params.d > params.n:
        raise HypothesisViolated(
            f"requires s + d <= n, got {s} + {params.d} > {params.n}"
        )
    if t < 0 or t > params.kn:
        raise OutOfRange(f"t = {t} outside 0..{params.kn}")
    single = no_edge_exact(s, params, side="in", conditioned=conditioned)
    product = single**t
    exp_form = math.exp(-params.d * s * t / params.n)
    product_f = float(product)
    if product_f > exp_form * (1.0 + EXP_FORM_TOLERANCE) + EXP_FORM_TOLERANCE:
        raise ExpFormOrderingError(
            f"product form {product_f:.6g} exceeds exp form {exp_form:.6g}; "
            "the exponential comparison only holds asymptotically"
        )
    return ProbabilityBound(upper=product_f, upper_exact=product, exp_form=exp_form)


def isolated_prob_asymptotic(params: GraphParams) -> tuple[float, bool]:
    """Leading-order probability exp(-k d^2 / n) that a neighbor of y has no
    other in-edge from a kd-set containing y.

    The flag marks the asymptotic regime d <= n^0.6 (informational only)."""
    value = math.exp(
        -float(Fraction(params.k_num * params.d * params.d, params.k_den * params.n))
    )
    return value, params.d <= params.n**0.6


def er_matching_prob(c: float) -> float:
    """Limiting perfect-matching probability exp(-2 e^{-c}) of the
    independent-edge bipartite model at edge probability (ln n + c)/n."""
    return math.exp(-2.0 * math.exp(-c))


def commutative_d_bounds(k: Fraction | int, m: int, h: int) -> CommutativeDegreeBounds:
    """Degree window of the random layered construction.

    d_low = sqrt(k^{h-2} m ln(k m) / 3);  d_high = 3 sqrt(k^{h-2} m ln(h k^{h+1} m)).
    """
    k = Fraction(k)
    if k < 1:
        raise OutOfRange(f"k must be >= 1, got {k}")
    if m < 2 or h < 1:
        raise OutOfRange(f"need m >= 2 and h >= 1, got m={m}, h={h}")
    kf = float(k)
    d_low = math.sqrt(kf ** (h - 2) * m * math.log(kf * m) / 3.0)
    d_high = 3.0 * math.sqrt(kf ** (h - 2) * m * math.log(h * kf ** (h + 1) * m))
    return CommutativeDegreeBounds(d_low, d_high, feasible=d_high <= m)


def _log_comb(a: int, b: int) -> float:
    if b < 0 or b > a:
        return float("-inf")
    return (
        math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)
    )


def _log_ratio(a_top: int, b_top: int, a_bot: int, b_bot: int) -> float:
    return _log_comb(a_top, b_top) - _log_comb(a_bot, b_bot)


def disjoint_neighborhood_bounds(params: GraphParams) -> ProbabilityBound:
    """Sandwich on Pr(Gamma(y) ∩ Gamma(y') = empty) for distinct y, y'.

    lower = C(kn-kd, kd)/C(kn, kd) (the independent-neighborhood value; the
    dependence only pushes the probability up), upper =
    (C(n-2, d-1)/C(n-1, d-1))^{kd}.  Exact rationals for small sides,
    log-space floats for large ones.
    """
    n, d, kn, kd = params.n, params.d, params.kn, params.kd
    if 2 * kd > kn:
        raise OutOfRange(f"needs 2kd <= kn, got 2*{kd} > {kn}")
    if max(n, kn) <= EXACT_SIDE_LIMIT:
        lower = _ratio(kn - kd, kd, kn, kd)
        upper = _ratio(n - 2, d - 1, n - 1, d - 1) ** kd
        return ProbabilityBound(
            upper=float(upper),
            lower=float(lower),
            lower_exact=lower,
            upper_exact=upper,
        )
    lower_f = math.exp(_log_ratio(kn - kd, kd, kn, kd))
    upper_f = math.exp(kd * _log_ratio(n - 2, d - 1, n - 1, d - 1))
    return ProbabilityBound(upper=upper_f, lower=lower_f)


def matching_failure_bound(params: GraphParams) -> float:
    """Diagnostic k^2 d^2 exp(-k d^2 / 2n): order of the union bound on the
    no-matching probability in the large-threshold regime."""
    kf = params.k_num / params.k_den
    expo = -float(
        Fraction(params.k_num * params.d * params.d, 2 * params.k_den * params.n)
    )
    return kf * kf * params.d * params.d * math.exp(expo)
