"""
Closed-form rate, distance and alphabet trade-offs.

Everything rational is computed with Fractions and compared exactly. The
distance bound and the R thresholds of the encodable construction need
square roots; those are floats, compared with ROOT_TOLERANCE.

Conditions are reported by name:

    rate_above_half              R > eps + 1/2
    subfield_share_cap           p <= eps / (1 - alpha)
    rm_at_least_kappa            r_m >= kappa
    redundancy_below_kappa_eps   1 - r0 < kappa * eps

With strict=True a failing condition raises; sweep passes strict=False and
records the flags instead.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass
from enum import StrEnum
from fractions import Fraction

import galois

from .errors import NmdsError
from .util import Rat, as_fraction, ceil_fraction, floor_fraction

ROOT_TOLERANCE = 1e-12

RATE_ABOVE_HALF = "rate_above_half"
SUBFIELD_SHARE_CAP = "subfield_share_cap"
RM_AT_LEAST_KAPPA = "rm_at_least_kappa"
REDUNDANCY_BELOW_KAPPA_EPS = "redundancy_below_kappa_eps"


class TradeoffError(NmdsError):
    """Raised when a bound cannot be evaluated."""


class DegenerateDenominator(TradeoffError):
    """Raised when p(alpha - 1) + r is not positive."""


class InvalidParameter(TradeoffError):
    """Raised when a parameter is outside its range."""


class ConditionViolated(TradeoffError):
    """Raised when a design condition fails; .condition names it."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class ConstraintViolated(ConditionViolated):
    """Raised when a constraint of the encodable construction fails."""


def _in_range(name: str, value: Fraction, low, high, *, open_low=False, open_high=False):
    below = value <= low if open_low else value < low
    above = value >= high if open_high else value > high
    if below or above:
        left = "(" if open_low else "["
        right = ")" if open_high else "]"
        raise InvalidParameter(f"{name} = {value} is outside {left}{low}, {high}{right}")


# ---- rate and distance of the outer code ----------------------------------


def outer_rate_bound(R: Rat, r: Rat, p: Rat, alpha: Rat) -> Fraction:
    """1 + (R - 1) / (p(alpha - 1) + r)"""
    R, r, p, alpha = map(as_fraction, (R, r, p, alpha))
    denominator = p * (alpha - 1) + r
    if denominator <= 0:
        raise DegenerateDenominator(f"p(alpha - 1) + r = {denominator}")
    return 1 + (R - 1) / denominator


def code_rate_bound(R: Rat, r: Rat, p: Rat, alpha: Rat) -> Fraction:
    """r' + R' - 1 with R' taken at p: the rate of C itself is at least this."""
    R, r, p, alpha = map(as_fraction, (R, r, p, alpha))
    shift = p * (alpha - 1)
    if shift + 1 <= 0:
        raise DegenerateDenominator(f"p(alpha - 1) + 1 = {shift + 1}")
    return (shift + r + R - 1) / (shift + 1)


@dataclass(frozen=True)
class DistanceBound:
    value: float
    vacuous: bool


def outer_distance_bound(delta: Rat | float, theta: Rat | float, gamma: float) -> DistanceBound:
    """(delta - gamma sqrt(delta / theta)) / (1 - gamma), never clamped."""
    delta, theta, gamma = float(delta), float(theta), float(gamma)
    if theta <= 0:
        raise InvalidParameter(f"theta must be positive, got {theta}")
    if not 0 <= gamma < 1:
        raise InvalidParameter(f"gamma must lie in [0, 1), got {gamma}")

    value = (delta - gamma * math.sqrt(delta / theta)) / (1 - gamma)
    return DistanceBound(value, value <= 0)


# ---- the decodable construction ----------------------------------------------


def smallest_field_above(bound: Fraction, alpha: Fraction, characteristic: int = 2) -> tuple[int, int]:
    """Smallest (q2, q1) with q2 = characteristic**k > bound and q1 = q2**alpha a field."""
    if not galois.is_prime(characteristic):
        raise InvalidParameter(f"{characteristic} is not a prime")

    step = alpha.denominator
    k = step
    while characteristic**k <= bound:
        k += step
    return characteristic**k, characteristic ** (k * alpha.numerator // step)


def _alpha(alpha: Rat) -> Fraction:
    alpha = as_fraction(alpha)
    _in_range("alpha", alpha, 0, 1, open_low=True, open_high=True)
    return alpha


@dataclass(frozen=True)
class DecodableDesignPoint:
    eps: Fraction
    R: Fraction
    alpha: Fraction
    c_q: Fraction
    Delta: int
    q1: int
    q2: int
    theta: Fraction
    r: Fraction
    p: Fraction
    p_delta: int
    gamma: float
    delta_rel: Fraction
    rate_bound: Fraction
    chain_bound: Fraction | None
    realized_rate_bound: Fraction
    dist_bound: float
    dist_vacuous: bool
    phi_exp: Fraction
    phi_exp_cap: Fraction
    rate_above_half: bool
    subfield_share_cap: bool
    rate_beats_target: bool
    distance_beats_target: bool
    phi_within_cap: bool

    def as_record(self) -> dict[str, object]:
        return asdict(self)


def decodable_design_point(
    eps: Rat, R: Rat, alpha: Rat, c_q: Rat = 1, *, p: Rat | None = None, strict: bool = True
) -> DecodableDesignPoint:
    """theta = eps, r = 1 - eps, delta = ceil(4 / eps**3), a Ramanujan gamma.

    p defaults to the largest share allowed by subfield_share_cap (and by
    p <= r, p <= R). The realized values at integer Delta are reported next
    to the idealized ones.
    """
    eps, R, alpha, c_q = as_fraction(eps), as_fraction(R), _alpha(alpha), as_fraction(c_q)
    _in_range("eps", eps, 0, 1, open_low=True, open_high=True)
    _in_range("R", R, 0, 1, open_low=True)
    if c_q < 1:
        raise InvalidParameter(f"c_q must be at least 1, got {c_q}")

    share_cap = eps / (1 - alpha)
    r = 1 - eps
    if p is None:
        p = min(share_cap, r, R)
    p = as_fraction(p)
    _in_range("p", p, 0, min(r, R))

    rate_above_half = R > eps + Fraction(1, 2)
    within_share = p <= share_cap
    if strict and not rate_above_half:
        raise ConditionViolated(RATE_ABOVE_HALF, f"R = {R} <= eps + 1/2 = {eps + Fraction(1, 2)}")
    if strict and not within_share:
        raise ConditionViolated(SUBFIELD_SHARE_CAP, f"p = {p} > eps / (1 - alpha) = {share_cap}")

    delta = ceil_fraction(4 / eps**3)
    q2, q1 = smallest_field_above(c_q * delta, alpha)

    # Realized constituents: left distance ceil(eps*Delta), right dimension floor(R*Delta).
    k_left = delta - ceil_fraction(eps * delta) + 1
    k_right = floor_fraction(R * delta)
    p_delta = min(floor_fraction(p * delta), k_left, k_right)
    theta_real = Fraction(delta - k_left + 1, delta)
    delta_rel = Fraction(delta - k_right + 1, delta)

    gamma = 2 * math.sqrt(delta - 1) / delta
    dist = outer_distance_bound(delta_rel, theta_real, gamma)

    rate_bound = outer_rate_bound(R, r, p, alpha)
    chain_bound = (R - 2 * eps) / (1 - 2 * eps) if eps < Fraction(1, 2) else None
    phi_exp = 1 - p * (1 - alpha) / r
    phi_exp_cap = 1 - eps / (1 + eps**3 / 4 - eps)

    return DecodableDesignPoint(
        eps=eps,
        R=R,
        alpha=alpha,
        c_q=c_q,
        Delta=delta,
        q1=q1,
        q2=q2,
        theta=eps,
        r=r,
        p=p,
        p_delta=p_delta,
        gamma=gamma,
        delta_rel=delta_rel,
        rate_bound=rate_bound,
        chain_bound=chain_bound,
        realized_rate_bound=outer_rate_bound(
            R, Fraction(k_left, delta), Fraction(p_delta, delta), alpha
        ),
        dist_bound=dist.value,
        dist_vacuous=dist.vacuous,
        phi_exp=phi_exp,
        phi_exp_cap=phi_exp_cap,
        rate_above_half=rate_above_half,
        subfield_share_cap=within_share,
        rate_beats_target=rate_bound > R - eps,
        distance_beats_target=dist.value > float(1 - R - eps),
        phi_within_cap=phi_exp <= phi_exp_cap <= 1 - eps,
    )


@dataclass(frozen=True)
class SingleAlphabetComparison:
    eps: Fraction
    R: Fraction
    Delta: int
    q2: int
    single_rate_bound: Fraction
    single_beats_half_eps: bool
    rate_loss: Fraction
    rate_loss_cap: Fraction
    rate_loss_below_eps: bool
    alphabet_ratio: float
    # log10(1 - alphabet_ratio), exact where alphabet_ratio rounds to 1.0
    alphabet_deficit_log10: float
    rate_above_half: bool

    def as_record(self) -> dict[str, object]:
        return asdict(self)


def compare_single_alphabet(eps: Rat, R: Rat, Delta: int, q2: int) -> SingleAlphabetComparison:
    """The mixed construction against the single-alphabet one at the same eps and R."""
    eps, R = as_fraction(eps), as_fraction(R)
    _in_range("eps", eps, 0, 1, open_low=True, open_high=True)
    _in_range("R", R, 0, 1, open_low=True)
    if Delta < 1 or q2 < 2:
        raise InvalidParameter(f"Need Delta >= 1 and q2 >= 2, got {Delta}, {q2}")
    if 2 * R <= eps:
        raise DegenerateDenominator(f"2R - eps = {2 * R - eps}")

    single = (R - eps) / (1 - eps)
    rate_loss = eps / (2 * R - eps)
    exponent = float(Delta * eps) * math.log(q2)

    return SingleAlphabetComparison(
        eps=eps,
        R=R,
        Delta=Delta,
        q2=q2,
        single_rate_bound=single,
        single_beats_half_eps=single > R - eps / 2,
        rate_loss=rate_loss,
        rate_loss_cap=eps / (1 + eps),
        rate_loss_below_eps=rate_loss < eps,
        alphabet_ratio=-math.expm1(-exponent),
        alphabet_deficit_log10=-exponent / math.log(10),
        rate_above_half=R > eps + Fraction(1, 2),
    )


# ---- the encodable construction ----------------------------------------------


@dataclass(frozen=True)
class EncodableDesignPoint:
    eps: Fraction
    R: Fraction
    r0: Fraction
    r_m: Fraction
    kappa: Fraction
    Delta1: Fraction
    Delta2: Fraction
    delta2_integral: bool
    p: Fraction
    alpha: Fraction
    s: Fraction
    Gamma_exp: Fraction
    gamma_exp: Fraction
    exp_ratio: Fraction
    exp_ratio_cap: Fraction
    exp_ratio_below_cap: bool
    exp_bracket_low: Fraction
    exp_bracket_high: Fraction
    exp_in_bracket: bool
    rate_display: Fraction
    rate_bound: Fraction
    rate_beats_target: bool
    residual: Fraction
    s_cap: Fraction
    discriminant: Fraction
    disc_threshold: Fraction
    s_in_interval: bool
    R_upper: float | None
    R_lower: float | None
    R_above_upper: bool
    R_below_lower: bool
    original_rate_bound: Fraction
    rate_gap: Fraction
    rate_gap_positive: bool
    relative_loss: Fraction
    relative_loss_cap: Fraction
    relative_loss_below_cap: bool
    q2: int | None
    alphabet_ratio: float | None
    alphabet_deficit_log10: float | None
    alpha_R: Fraction | None
    Delta1_schedule: Fraction | None
    s_delta1_floor: Fraction | None
    rm_at_least_kappa: bool
    redundancy_below_kappa_eps: bool

    def as_record(self) -> dict[str, object]:
        return asdict(self)


def encodable_tradeoff(
    eps: Rat,
    R: Rat,
    r0: Rat,
    r_m: Rat,
    kappa: Rat,
    Delta1: Rat,
    p: Rat,
    alpha: Rat,
    *,
    q2: int | None = None,
    alpha_R: Rat | None = None,
    strict: bool = True,
) -> EncodableDesignPoint:
    """Alphabet exponents, rate bound and rate gap with s = p(1 - alpha).

    Delta2 is derived from (1 - r0) Delta1 = r_m R Delta2.
    """
    eps, R, r0, r_m, kappa, Delta1, p = map(as_fraction, (eps, R, r0, r_m, kappa, Delta1, p))
    alpha = _alpha(alpha)
    _in_range("eps", eps, 0, 1, open_low=True)
    _in_range("R", R, 0, 1, open_low=True)
    _in_range("r0", r0, 0, 1)
    _in_range("p", p, 0, 1)
    for name, value in (("r_m", r_m), ("kappa", kappa), ("Delta1", Delta1)):
        if value <= 0:
            raise InvalidParameter(f"{name} must be positive, got {value}")

    rm_ok = r_m >= kappa
    redundancy_ok = 1 - r0 < kappa * eps
    if strict and not rm_ok:
        raise ConstraintViolated(RM_AT_LEAST_KAPPA, f"r_m = {r_m} < kappa = {kappa}")
    if strict and not redundancy_ok:
        raise ConstraintViolated(
            REDUNDANCY_BELOW_KAPPA_EPS, f"1 - r0 = {1 - r0} >= kappa * eps = {kappa * eps}"
        )

    s = p * (1 - alpha)
    a = (1 - r0) / (r_m * R)
    Delta2 = a * Delta1

    Gamma_exp = 1 - s + a
    gamma_exp = 1 + a
    exp_ratio = Gamma_exp / gamma_exp
    exp_ratio_cap = 1 - R * s / (R + eps)
    bracket_low = 1 - eps**2 / ((R + eps) * (1 + eps - R))
    bracket_high = 1 - 4 * R * eps**2 / ((R + eps) * (1 + eps) ** 2)

    rate_display = (R - s) / (1 - s + a)
    rate_bound = (R - s) / (1 - s + eps / R)
    residual = s * R**2 - s * (1 + eps) * R + eps**2
    s_cap = eps**2 / (R * (1 + eps - R))
    discriminant = s**2 * (1 + eps) ** 2 - 4 * s * eps**2
    disc_threshold = 4 * eps**2 / (1 + eps) ** 2

    R_upper = R_lower = None
    if s > 0 and (under := (1 + eps) ** 2 - 4 * eps**2 / s) >= 0:
        root = math.sqrt(under)
        R_upper = (float(1 + eps) + root) / 2
        R_lower = (float(1 + eps) - root) / 2

    original = R / (1 + eps / R)
    gap = original - rate_bound
    relative_loss = gap / original

    alphabet_ratio = deficit = None
    if q2 is not None:
        exponent = float(s * Delta1) * math.log(q2)
        alphabet_ratio = -math.expm1(-exponent)
        deficit = -exponent / math.log(10)

    schedule = floor = None
    if alpha_R is not None:
        alpha_R = as_fraction(alpha_R)
        schedule = alpha_R / eps**3
        floor = 4 * alpha_R / (eps * (1 + eps) ** 2)

    return EncodableDesignPoint(
        eps=eps,
        R=R,
        r0=r0,
        r_m=r_m,
        kappa=kappa,
        Delta1=Delta1,
        Delta2=Delta2,
        delta2_integral=Delta2.denominator == 1,
        p=p,
        alpha=alpha,
        s=s,
        Gamma_exp=Gamma_exp,
        gamma_exp=gamma_exp,
        exp_ratio=exp_ratio,
        exp_ratio_cap=exp_ratio_cap,
        exp_ratio_below_cap=exp_ratio < exp_ratio_cap,
        exp_bracket_low=bracket_low,
        exp_bracket_high=bracket_high,
        exp_in_bracket=bracket_low <= exp_ratio_cap <= bracket_high,
        rate_display=rate_display,
        rate_bound=rate_bound,
        rate_beats_target=rate_bound >= R - eps,
        residual=residual,
        s_cap=s_cap,
        discriminant=discriminant,
        disc_threshold=disc_threshold,
        s_in_interval=disc_threshold <= s <= s_cap,
        R_upper=R_upper,
        R_lower=R_lower,
        R_above_upper=R_upper is not None and float(R) >= R_upper - ROOT_TOLERANCE,
        R_below_lower=R_lower is not None and float(R) <= R_lower + ROOT_TOLERANCE,
        original_rate_bound=original,
        rate_gap=gap,
        rate_gap_positive=gap > 0,
        relative_loss=relative_loss,
        relative_loss_cap=s / R,
        relative_loss_below_cap=relative_loss < s / R,
        q2=q2,
        alphabet_ratio=alphabet_ratio,
        alphabet_deficit_log10=deficit,
        alpha_R=alpha_R,
        Delta1_schedule=schedule,
        s_delta1_floor=floor,
        rm_at_least_kappa=rm_ok,
        redundancy_below_kappa_eps=redundancy_ok,
    )


# ---- sweeps -------------------------------------------------------------------


class SweepKind(StrEnum):
    DECODABLE = "decodable"
    ENCODABLE = "encodable"


def _decodable_record(**params) -> dict[str, object]:
    point = decodable_design_point(**params, strict=False)
    record = point.as_record()
    if point.eps < 1 and 2 * point.R > point.eps:
        comparison = compare_single_alphabet(point.eps, point.R, point.Delta, point.q2)
        for key, value in comparison.as_record().items():
            record.setdefault(key, value)
    return record


def _encodable_record(**params) -> dict[str, object]:
    return encodable_tradeoff(**params, strict=False).as_record()


_SWEEPERS = {
    SweepKind.DECODABLE: _decodable_record,
    SweepKind.ENCODABLE: _encodable_record,
}


def sweep(kind: SweepKind | str, grid: Mapping[str, Sequence]) -> list[dict[str, object]]:
    """One record per point of the cartesian grid, in grid order.

    The grid maps parameter names of the matching design function to lists
    of values; an empty grid gives an empty table.
    """
    if not grid:
        return []

    make_record = _SWEEPERS[SweepKind(kind)]
    names = list(grid)
    return [
        make_record(**dict(zip(names, values, strict=True)))
        for values in itertools.product(*(grid[name] for name in names))
    ]
