"""Tests for the iterative decoder, the channel and Monte-Carlo curves."""

import itertools
import math

import numpy as np
import pytest

from nmds_expander.decode import (
    DecodeError,
    DecodeOutcome,
    TooManyPositions,
    channel_apply,
    default_max_rounds,
    iter_decode,
    monte_carlo_curve,
    nearest_codewords,
    received_from,
)
from nmds_expander.expander import contains, random_codeword


def _constant(inst, value):
    return (value,) * inst.num_edges


def test_received_from_checks_f1(k33_mixed):
    inst = k33_mixed
    word = [0] * inst.num_edges
    e = int(np.flatnonzero(inst.f1_mask)[0])
    word[e] = inst.tower.generator
    with pytest.raises(DecodeError):
        received_from(inst, word)
    # An erased coordinate may hold anything.
    assert received_from(inst, word, [e]).erased == {e}


def test_received_from_length(k33_repetition):
    with pytest.raises(DecodeError):
        received_from(k33_repetition, [0, 0])


def test_decode_codeword(k33_repetition):
    inst = k33_repetition
    word = _constant(inst, 7)
    decoded, report = iter_decode(inst, received_from(inst, word))
    assert decoded == word
    assert report.outcome == DecodeOutcome.SUCCESS
    assert report.rounds_used == 1
    assert report.changed_blocks == [0]


def _single_error_patterns(inst, word):
    """Every word at distance one from word, with F1 coordinates kept in F1."""
    subfield = inst.tower.subfield_elements
    for e in range(inst.num_edges):
        pool = subfield if inst.f1_mask[e] else range(inst.tower.q2)
        for value in pool:
            if value != word[e]:
                received = list(word)
                received[e] = int(value)
                yield received


def _assert_agrees_with_nearest(inst, word, radius_covers_errors):
    for received in _single_error_patterns(inst, word):
        rw = received_from(inst, received)
        decoded, report = iter_decode(inst, rw)
        distance, ties = nearest_codewords(inst, rw)
        assert (distance, ties) == (1, [word])

        if radius_covers_errors:
            assert report.ok
        if report.ok:
            assert decoded == word
        else:
            assert report.outcome == DecodeOutcome.FAILURE
            assert decoded == tuple(received)


def test_single_errors_match_nearest(k33_repetition):
    inst = k33_repetition
    rng = np.random.default_rng(21)
    for _ in range(3):
        _assert_agrees_with_nearest(inst, random_codeword(inst, rng), True)


def test_single_errors_match_nearest_mixed(k33_mixed):
    inst = k33_mixed
    rng = np.random.default_rng(22)
    for _ in range(3):
        _assert_agrees_with_nearest(inst, random_codeword(inst, rng), False)


def test_double_erasures(k33_repetition):
    inst = k33_repetition
    word = _constant(inst, 5)
    patterns = list(itertools.combinations(range(inst.num_edges), 2))
    assert len(patterns) == 36
    for erased in patterns:
        received = [0 if e in erased else x for e, x in enumerate(word)]
        decoded, report = iter_decode(inst, received_from(inst, received, erased))
        assert report.ok
        assert decoded == word


def test_beyond_radius_returns_input(k33_repetition):
    inst = k33_repetition
    # A latin square: every block holds three distinct symbols.
    received = (0, 1, 2, 1, 2, 0, 2, 0, 1)
    decoded, report = iter_decode(inst, received_from(inst, received))
    assert report.outcome == DecodeOutcome.FAILURE
    assert decoded == received
    assert report.changed_blocks == [0]


def test_miscorrection_against_truth(k33_repetition):
    inst = k33_repetition
    received = _constant(inst, 9)
    _, report = iter_decode(inst, received_from(inst, received), truth=_constant(inst, 0))
    assert report.outcome == DecodeOutcome.MISCORRECTION
    assert not report.ok


def test_channel_noiseless(k33_mixed):
    word = random_codeword(k33_mixed, np.random.default_rng(0))
    rw = channel_apply(k33_mixed, word, 0, 0, seed=1)
    assert rw.symbols == word
    assert not rw.erased


def test_channel_counts(k33_mixed):
    inst = k33_mixed
    word = random_codeword(inst, np.random.default_rng(3))
    for t, rho in ((1, 0), (2, 3), (4, 5), (0, 9)):
        rw = channel_apply(inst, word, t, rho, seed=t * 10 + rho)
        assert len(rw.erased) == rho
        wrong = [e for e in range(inst.num_edges) if e not in rw.erased and rw.symbols[e] != word[e]]
        assert len(wrong) == t


def test_channel_is_seeded(k33_mixed):
    word = random_codeword(k33_mixed, np.random.default_rng(3))
    assert channel_apply(k33_mixed, word, 2, 2, seed=42) == channel_apply(k33_mixed, word, 2, 2, seed=42)


def test_channel_keeps_f1(k33_mixed):
    inst = k33_mixed
    subfield = set(inst.tower.subfield_elements)
    word = random_codeword(inst, np.random.default_rng(6))
    for seed in range(50):
        rw = channel_apply(inst, word, 5, 0, seed=seed)
        assert all(rw.symbols[e] in subfield for e in np.flatnonzero(inst.f1_mask))


def test_channel_too_many_positions(k33_repetition):
    word = _constant(k33_repetition, 0)
    with pytest.raises(TooManyPositions):
        channel_apply(k33_repetition, word, 5, 5, seed=0)


def test_monte_carlo_noiseless(k33_mixed):
    (row,) = monte_carlo_curve(k33_mixed, [0], [0], trials=20, seed=0)
    assert (row.t, row.rho, row.successes) == (0, 0, 20)
    assert row.rate == 1.0


def test_monte_carlo_correctable_cells(k33_repetition):
    rows = monte_carlo_curve(k33_repetition, range(2), range(3), trials=30, seed=7)
    assert [(row.t, row.rho) for row in rows] == list(itertools.product(range(2), range(3)))
    rates = {(row.t, row.rho): row.rate for row in rows}
    for cell in ((0, 0), (1, 0), (0, 1), (0, 2), (1, 1)):
        assert rates[cell] == 1.0


def test_monte_carlo_cells_are_independent(k33_repetition):
    both = monte_carlo_curve(k33_repetition, [1, 2], [0], trials=10, seed=3)
    alone = monte_carlo_curve(k33_repetition, [2], [0], trials=10, seed=3)
    assert both[1] == alone[0]


def _assert_rates_non_increasing(rows):
    for before, after in itertools.pairwise(rows):
        spread = math.sqrt(
            before.rate * (1 - before.rate) / before.trials + after.rate * (1 - after.rate) / after.trials
        )
        assert after.rate <= before.rate + 3 * spread


def test_monte_carlo_rates_fall_with_errors(k33_repetition, k33_mixed):
    for inst in (k33_repetition, k33_mixed):
        rows = monte_carlo_curve(inst, range(4), [0], trials=40, seed=11)
        assert [row.t for row in rows] == [0, 1, 2, 3]
        assert rows[0].rate == 1.0
        _assert_rates_non_increasing(rows)


def test_monte_carlo_needs_trials(k33_repetition):
    with pytest.raises(DecodeError):
        monte_carlo_curve(k33_repetition, [0], [0], trials=0, seed=0)


def test_decoded_words_are_codewords(k33_mixed):
    inst = k33_mixed
    rng = np.random.default_rng(12)
    for seed in range(30):
        word = random_codeword(inst, rng)
        decoded, report = iter_decode(inst, channel_apply(inst, word, 1, 1, seed))
        if report.ok:
            assert contains(inst, decoded)


def test_default_max_rounds():
    assert default_max_rounds(1) == 4
    assert default_max_rounds(3) == 6
    assert default_max_rounds(1000) == 2 * 10 + 2


def test_k22_single_error_is_reported(k22_repetition):
    inst = k22_repetition
    received = list(_constant(inst, 6))
    received[0] = 1
    decoded, report = iter_decode(inst, received_from(inst, received))
    # [2,1,2] constituents have decoding radius 0.
    assert report.outcome == DecodeOutcome.FAILURE
    assert decoded == tuple(received)
