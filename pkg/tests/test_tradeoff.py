"""Tests for closed-form rate, distance and alphabet trade-offs."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from nmds_expander.tradeoff import (
    RATE_ABOVE_HALF,
    REDUNDANCY_BELOW_KAPPA_EPS,
    RM_AT_LEAST_KAPPA,
    SUBFIELD_SHARE_CAP,
    ConditionViolated,
    ConstraintViolated,
    DegenerateDenominator,
    InvalidParameter,
    code_rate_bound,
    compare_single_alphabet,
    decodable_design_point,
    encodable_tradeoff,
    outer_distance_bound,
    outer_rate_bound,
    smallest_field_above,
    sweep,
)

F = Fraction


def _example_encodable(**overrides):
    params = dict(
        eps=F(1, 10),
        R=F(9, 10),
        r0=F(24, 25),
        r_m=F(1, 2),
        kappa=F(1, 2),
        Delta1=100,
        p=F(1, 10),
        alpha=F(1, 2),
    )
    params.update(overrides)
    return encodable_tradeoff(**params)


def test_outer_rate_full_right_code():
    assert outer_rate_bound(1, F(1, 3), F(1, 5), F(1, 2)) == 1


def test_outer_rate_single_alphabet():
    assert outer_rate_bound(F(4, 5), F(9, 10), 0, F(1, 2)) == F(7, 9)


def test_outer_rate_degenerate():
    with pytest.raises(DegenerateDenominator):
        outer_rate_bound(F(1, 2), F(1, 4), 1, 0)


def test_outer_rate_is_code_rate_over_left_rate():
    rng = random.Random(17)
    for _ in range(200):
        r = F(rng.randint(1, 20), 20)
        R = F(rng.randint(1, 20), 20)
        p = F(rng.randint(0, 20), 20) * min(r, R)
        alpha = F(rng.randint(1, 9), 10)
        shift = p * (alpha - 1)
        left_rate = (shift + r) / (shift + 1)
        assert code_rate_bound(R, r, p, alpha) / left_rate == outer_rate_bound(R, r, p, alpha)


def test_code_rate_repetition():
    assert code_rate_bound(F(1, 2), F(1, 2), 0, F(1, 2)) == 0


def test_distance_bound_gamma_zero():
    bound = outer_distance_bound(F(1, 3), F(1, 2), 0.0)
    assert bound.value == pytest.approx(1 / 3)
    assert not bound.vacuous


def test_distance_bound_vacuous():
    bound = outer_distance_bound(0.25, 0.25, 0.5)
    assert bound.value == pytest.approx(-0.5)
    assert bound.vacuous


def test_distance_bound_rejects_gamma():
    with pytest.raises(InvalidParameter):
        outer_distance_bound(0.5, 0.5, 1.0)
    with pytest.raises(InvalidParameter):
        outer_distance_bound(0.5, 0, 0.1)


def test_smallest_field_above():
    assert smallest_field_above(F(4000), F(1, 2)) == (4096, 64)
    assert smallest_field_above(F(500), F(1, 2)) == (1024, 32)
    assert smallest_field_above(F(10), F(1, 3)) == (64, 4)
    assert smallest_field_above(F(10), F(1, 2), characteristic=3) == (81, 9)
    with pytest.raises(InvalidParameter):
        smallest_field_above(F(10), F(1, 2), characteristic=4)


def test_design_point():
    point = decodable_design_point(F(1, 10), F(7, 10), F(1, 2))
    assert point.p == F(1, 5)
    assert point.Delta == 4000
    assert (point.q2, point.q1) == (4096, 64)
    assert point.rate_bound == point.chain_bound == F(5, 8)
    assert point.phi_exp == F(8, 9)
    assert point.rate_above_half
    assert point.subfield_share_cap
    assert point.rate_beats_target
    assert point.distance_beats_target
    assert point.phi_within_cap
    assert not point.dist_vacuous


def test_design_point_rate_below_half():
    with pytest.raises(ConditionViolated) as info:
        decodable_design_point(F(1, 10), F(55, 100), F(1, 2))
    assert info.value.condition == RATE_ABOVE_HALF

    point = decodable_design_point(F(1, 10), F(55, 100), F(1, 2), strict=False)
    assert not point.rate_above_half


def test_design_point_share_cap():
    with pytest.raises(ConditionViolated) as info:
        decodable_design_point(F(1, 10), F(7, 10), F(1, 2), p=F(3, 10))
    assert info.value.condition == SUBFIELD_SHARE_CAP


def test_design_point_rejects_eps():
    for eps in (0, 1):
        with pytest.raises(InvalidParameter):
            decodable_design_point(eps, F(7, 10), F(1, 2))


def test_design_point_chain():
    for eps, R in itertools.product((F(1, 20), F(1, 10), F(1, 5)), (F(7, 10), F(4, 5), F(9, 10))):
        if R <= eps + F(1, 2):
            continue
        point = decodable_design_point(eps, R, F(1, 2))
        assert point.rate_bound >= point.chain_bound > R - eps


def test_compare_single_alphabet():
    result = compare_single_alphabet(F(1, 10), F(7, 10), 4000, 4096)
    assert result.rate_loss == F(1, 13)
    assert result.rate_loss_cap == F(1, 11)
    assert result.rate_loss_below_eps
    assert result.single_rate_bound == F(2, 3)
    assert result.single_beats_half_eps


def test_compare_alphabet_ratio():
    result = compare_single_alphabet(F(1, 2), F(9, 10), 32, 64)
    assert result.alphabet_ratio == pytest.approx(1.0)
    assert result.alphabet_deficit_log10 == pytest.approx(-16 * math.log10(64))


def test_encodable_example():
    point = _example_encodable()
    assert point.s == F(1, 20)
    assert point.s_cap == F(1, 18)
    assert point.disc_threshold == F(4, 121)
    assert point.s_in_interval
    assert point.residual == F(1, 1000)
    assert point.rate_bound == F(85, 100) / (F(19, 20) + F(1, 9))
    assert point.rate_beats_target
    assert point.Gamma_exp < point.gamma_exp
    assert point.exp_ratio_below_cap
    assert point.exp_in_bracket
    assert point.rate_gap_positive
    assert point.relative_loss_below_cap
    assert point.R_upper == pytest.approx((1.1 + math.sqrt(0.41)) / 2)
    assert point.R_above_upper
    assert point.Delta2 == F(80, 9)
    assert not point.delta2_integral


def test_encodable_alphabet_and_schedule():
    point = _example_encodable(q2=2**16, alpha_R=F(1, 2))
    assert point.alphabet_deficit_log10 == pytest.approx(-5 * math.log10(2**16))
    assert point.Delta1_schedule == 500
    assert point.s_delta1_floor == F(2) / (F(1, 10) * F(121, 100))


def test_encodable_rm_below_kappa():
    with pytest.raises(ConstraintViolated) as info:
        _example_encodable(r_m=F(1, 4))
    assert info.value.condition == RM_AT_LEAST_KAPPA


def test_encodable_redundancy():
    with pytest.raises(ConstraintViolated) as info:
        _example_encodable(r0=F(9, 10))
    assert info.value.condition == REDUNDANCY_BELOW_KAPPA_EPS

    point = _example_encodable(r0=F(9, 10), strict=False)
    assert not point.redundancy_below_kappa_eps


def test_sweep_empty():
    assert sweep("decodable", {}) == []


def test_sweep_single_point():
    (record,) = sweep("decodable", {"eps": [0.1], "R": [0.7], "alpha": [0.5]})
    point = decodable_design_point(F(1, 10), F(7, 10), F(1, 2), strict=False)
    assert point.as_record().items() <= record.items()
    assert record["rate_loss"] == F(1, 13)


def test_sweep_grid_order():
    records = sweep("decodable", {"eps": [F(1, 10), F(1, 20)], "R": [F(7, 10), F(9, 10)], "alpha": [F(1, 2)]})
    assert [(r["eps"], r["R"]) for r in records] == [
        (F(1, 10), F(7, 10)),
        (F(1, 10), F(9, 10)),
        (F(1, 20), F(7, 10)),
        (F(1, 20), F(9, 10)),
    ]


def test_sweep_trends_with_eps():
    records = sweep("decodable", {"eps": [F(1, 5), F(1, 10), F(1, 20)], "R": [F(9, 10)], "alpha": [F(1, 2)]})
    losses = [r["rate_loss"] for r in records]
    deficits = [r["alphabet_deficit_log10"] for r in records]
    assert losses == sorted(losses, reverse=True)
    assert deficits == sorted(deficits, reverse=True)


def test_sweep_encodable_records_flags():
    (record,) = sweep(
        "encodable",
        {
            "eps": [F(1, 10)],
            "R": [F(9, 10)],
            "r0": [F(9, 10)],
            "r_m": [F(1, 4)],
            "kappa": [F(1, 2)],
            "Delta1": [100],
            "p": [F(1, 10)],
            "alpha": [F(1, 2)],
        },
    )
    assert record["rm_at_least_kappa"] is False
    assert record["redundancy_below_kappa_eps"] is False


def test_sweep_unknown_kind():
    with pytest.raises(ValueError):
        sweep("nope", {"eps": [0.1]})
