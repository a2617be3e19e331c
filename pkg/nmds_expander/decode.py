"""
Iterative decoding of an expander code, seeded channels and Monte-Carlo curves.

Each round decodes every right block with the parent decoder of C''_v, then
every left block with the parent decoder of C'_u. A block result that breaks
its F1 positions is discarded. Decoding stops after a round that changes
nothing; it succeeds if the word is then a codeword with no erasures left.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from .debug import debug_print
from .errors import NmdsError
from .expander import ExpanderCodeInstance, contains, enumerate_codewords, random_codeword
from .fields import Fe
from .mds_codes import DecodeFailure, MixedMdsCode, decode_ee


class DecodeError(NmdsError):
    """Raised when a channel or decoder is called with impossible arguments."""


class TooManyPositions(DecodeError):
    """Raised when t + rho exceeds the code length."""


class DecodeOutcome(StrEnum):
    SUCCESS = "success"
    FAILURE = "failure"
    MISCORRECTION = "miscorrection"


@dataclass(frozen=True)
class ReceivedWord:
    symbols: tuple[Fe, ...]
    # True where the coordinate carries an F1 symbol.
    f1_mask: tuple[bool, ...]
    erased: frozenset[int] = frozenset()

    def __len__(self):
        return len(self.symbols)


@dataclass
class DecodeReport:
    outcome: DecodeOutcome = DecodeOutcome.FAILURE
    rounds_used: int = 0
    changed_blocks: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.outcome == DecodeOutcome.SUCCESS


@dataclass(frozen=True)
class McRow:
    t: int
    rho: int
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    def as_record(self) -> dict[str, object]:
        return {
            "t": self.t,
            "rho": self.rho,
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
        }


def received_from(inst: ExpanderCodeInstance, word: Sequence[Fe], erased: Iterable[int] = ()) -> ReceivedWord:
    if len(word) != inst.num_edges:
        raise DecodeError(f"Word has {len(word)} symbols, expected {inst.num_edges}")

    erased = frozenset(int(e) for e in erased)
    mask = tuple(bool(b) for b in inst.f1_mask)
    for e, value in enumerate(word):
        if mask[e] and e not in erased and not inst.tower.in_subfield(int(value)):
            raise DecodeError(f"Coordinate {e} is tagged F1 but holds {value}")

    return ReceivedWord(tuple(int(x) for x in word), mask, erased)


def default_max_rounds(n: int) -> int:
    return 2 * math.ceil(math.log2(n + 1)) + 2


def _decode_side(
    word: list[Fe],
    erased: set[int],
    codes: Sequence[MixedMdsCode],
    views: Sequence[Sequence[int]],
) -> int:
    changed = 0
    for code, edges in zip(codes, views, strict=True):
        local = [word[e] for e in edges]
        local_erasures = [pos for pos, e in enumerate(edges) if e in erased]
        if not local_erasures and code.contains(local):
            continue

        result = decode_ee(code.parent, local, local_erasures)
        if isinstance(result, DecodeFailure) or not code.contains(result):
            continue

        for e, value in zip(edges, result, strict=True):
            word[e] = value
        erased.difference_update(edges)
        changed += 1

    return changed


def iter_decode(
    inst: ExpanderCodeInstance,
    rw: ReceivedWord,
    max_rounds: int | None = None,
    truth: Sequence[Fe] | None = None,
) -> tuple[tuple[Fe, ...], DecodeReport]:
    """Returns the decoded word, or the received symbols unchanged on failure."""
    if len(rw) != inst.num_edges:
        raise DecodeError(f"Received {len(rw)} symbols, expected {inst.num_edges}")
    if max_rounds is None:
        max_rounds = default_max_rounds(inst.n)

    word = list(rw.symbols)
    erased = set(rw.erased)
    report = DecodeReport()
    graph = inst.graph

    for _ in range(max_rounds):
        changed = _decode_side(word, erased, inst.right_codes, graph.right_edges)
        changed += _decode_side(word, erased, inst.left_codes, graph.left_edges)
        report.rounds_used += 1
        report.changed_blocks.append(changed)
        debug_print(f"round {report.rounds_used}: {changed} blocks changed")
        if not changed:
            break

    if erased or not contains(inst, word):
        report.outcome = DecodeOutcome.FAILURE
        return rw.symbols, report

    decoded = tuple(word)
    if truth is not None and decoded != tuple(int(x) for x in truth):
        report.outcome = DecodeOutcome.MISCORRECTION
    else:
        report.outcome = DecodeOutcome.SUCCESS

    return decoded, report


def channel_apply(
    inst: ExpanderCodeInstance, codeword: Sequence[Fe], t: int, rho: int, seed: int
) -> ReceivedWord:
    """t wrong symbols from the right alphabet, then rho erasures, on distinct positions."""
    total = inst.num_edges
    if t < 0 or rho < 0 or t + rho > total:
        raise TooManyPositions(f"t + rho = {t + rho} positions on a word of length {total}")

    rng = np.random.default_rng(seed)
    positions = rng.permutation(total)[: t + rho]
    word = [int(x) for x in codeword]
    subfield = inst.tower.subfield
    full = np.arange(inst.tower.q2)

    for e in positions[:t]:
        pool = subfield if inst.f1_mask[e] else full
        wrong = pool[pool != word[e]]
        word[e] = int(wrong[rng.integers(len(wrong))])

    erased = frozenset(int(e) for e in positions[t:])
    for e in erased:
        word[e] = 0

    return received_from(inst, word, erased)


def monte_carlo_curve(
    inst: ExpanderCodeInstance,
    t_range: Iterable[int],
    rho_range: Iterable[int],
    trials: int,
    seed: int,
    max_rounds: int | None = None,
) -> list[McRow]:
    """Success rate of iter_decode per (t, rho) cell, t-major.

    Every cell draws from its own generator seeded by (seed, t, rho), so a
    cell's result does not depend on which other cells are run.
    """
    if trials < 1:
        raise DecodeError(f"Need at least one trial, got {trials}")

    rho_values = list(rho_range)
    rows = []
    for t in t_range:
        for rho in rho_values:
            rng = np.random.default_rng(np.random.SeedSequence([seed, t, rho]))
            successes = 0
            for _ in range(trials):
                codeword = random_codeword(inst, rng)
                rw = channel_apply(inst, codeword, t, rho, int(rng.integers(2**63)))
                _, report = iter_decode(inst, rw, max_rounds, truth=codeword)
                successes += report.ok

            rows.append(McRow(t, rho, trials, successes))
            debug_print(f"t={t} rho={rho}: {successes}/{trials}")

    return rows


def nearest_codewords(inst: ExpanderCodeInstance, rw: ReceivedWord) -> tuple[int, list[tuple[Fe, ...]]]:
    """Smallest distance over non-erased positions and every codeword attaining it."""
    codewords = enumerate_codewords(inst)
    keep = np.array([e not in rw.erased for e in range(inst.num_edges)])
    received = np.asarray(rw.symbols)

    distances = ((codewords != received[None, :]) & keep[None, :]).sum(axis=1)
    best = int(distances.min())
    ties = [tuple(int(x) for x in row) for row in codewords[distances == best]]
    return best, ties
