"""LCS decoding with symbol-count filtering and early termination."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .codebook import Codebook
from .seqcore import BitSeq, lcs_len, symbol_counts


class DecodeError(ValueError):
    pass


class LengthOutOfRange(DecodeError):
    """Received word is longer than n or shorter than n - d."""


class NoCandidates(DecodeError):
    """Filtering left nothing, so the word cannot come from this codebook."""


@dataclass(frozen=True)
class DecodeOutcome:
    decoded: BitSeq
    lcs_evaluations: int
    candidates_after_filter: int
    codebook_size: int
    early_exit: bool
    best_score: int

    def to_dict(self, received: BitSeq | None = None) -> dict:
        out = asdict(self)
        out["decoded"] = str(self.decoded)
        if received is not None:
            out = {"received": str(received), **out}
        return out

    def to_json(self, received: BitSeq | None = None) -> str:
        return json.dumps(self.to_dict(received), indent=2) + "\n"


def _check_length(c: Codebook, y: BitSeq) -> None:
    if not c.n - c.d <= len(y) <= c.n:
        raise LengthOutOfRange(
            f"received length {len(y)} outside [{c.n - c.d}, {c.n}] for n={c.n}, d={c.d}"
        )


def filter_candidates(c: Codebook, y: BitSeq) -> list[BitSeq]:
    """Codewords with at least as many ones and as many zeros as ``y``."""
    cy = symbol_counts(y)
    return [
        w
        for w, cw in zip(c.words, c.counts)
        if cw.ones >= cy.ones and cw.zeros >= cy.zeros
    ]


def _scan(c: Codebook, y: BitSeq, candidates: list[BitSeq], early: bool) -> DecodeOutcome:
    if not candidates:
        raise NoCandidates(f"no codeword can produce {y}")
    target = len(y)
    best, best_score = candidates[0], -1
    evals = 0
    for w in candidates:
        score = lcs_len(w, y)
        evals += 1
        if early and score == target:
            return DecodeOutcome(w, evals, len(candidates), len(c.words), True, score)
        if score > best_score:
            best, best_score = w, score
    return DecodeOutcome(best, evals, len(candidates), len(c.words), False, best_score)


def decode(c: Codebook, y: BitSeq) -> DecodeOutcome:
    """Decode ``y`` to the codeword with maximal LCS.

    Candidates are pre-filtered by symbol counts and scanned in codebook
    order; the scan stops at the first candidate that contains ``y`` as a
    subsequence, which is unique for a valid codebook. If nothing reaches
    LCS = |y| the first candidate with the highest score is returned.
    """
    _check_length(c, y)
    return _scan(c, y, filter_candidates(c, y), early=True)


def decode_unfiltered(c: Codebook, y: BitSeq) -> DecodeOutcome:
    """Plain argmax over every codeword, no filtering and no early exit."""
    _check_length(c, y)
    return _scan(c, y, list(c.words), early=False)
