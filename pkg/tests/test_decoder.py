from __future__ import annotations

import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delclique.clique import bron_kerbosch_max
from delclique.codebook import Codebook, from_clique, vt_codebook
from delclique.decoder import (
    LengthOutOfRange,
    NoCandidates,
    decode,
    decode_unfiltered,
    filter_candidates,
)
from delclique.graph import common_neighbors, members
from delclique.seqcore import BitSeq, delete_at, deletion_ball, is_subsequence, lcs_len

from .conftest import bs, cached_graph, pgcs_codebook

SENT = "1000111110110"
RECEIVED = "10011111010"


def greedy_codebook_with(n: int, d: int, word: str) -> Codebook:
    """Maximal clique grown greedily from ``word`` (lowest id first)."""
    g = cached_graph(n, d)
    clique = [int(word, 2)]
    while True:
        cand = members(common_neighbors(g, clique), g.num_vertices)
        if len(cand) == 0:
            return from_clique(g, clique)
        clique.append(int(cand[0]))


def exact_codebook(n: int, d: int) -> Codebook:
    g = cached_graph(n, d)
    return from_clique(g, bron_kerbosch_max(g).best_clique)


def check_outcome(c: Codebook, y: BitSeq, out) -> None:
    assert out.lcs_evaluations <= out.candidates_after_filter <= out.codebook_size == len(c)
    if out.early_exit:
        assert out.best_score == len(y)


def test_worked_example():
    c = greedy_codebook_with(13, 2, SENT)
    assert bs(SENT) in c.words
    out = decode(c, bs(RECEIVED))
    assert out.decoded == bs(SENT)
    assert out.early_exit and out.best_score == 11
    check_outcome(c, bs(RECEIVED), out)
    assert out.candidates_after_filter < len(c)


def test_codeword_decodes_to_itself():
    c = pgcs_codebook(10, 2, 20_000)
    for x in c.words:
        out = decode(c, x)
        assert out.decoded == x and out.best_score == 10 and out.early_exit
        assert decode_unfiltered(c, x).decoded == x


def test_filter_examples():
    c = vt_codebook(6)
    assert filter_candidates(c, bs("111111")) == [w for w in c.words if str(w) == "111111"]
    assert filter_candidates(c, bs("")) == list(c.words)
    x = c.words[3]
    assert x in filter_candidates(c, x)
    assert filter_candidates(c, bs("1010")) == [
        w for w in c.words if str(w).count("1") >= 2 and str(w).count("0") >= 2
    ]


@pytest.mark.parametrize(
    "n, d, source",
    [(8, 2, "exact"), (9, 2, "pgcs"), (10, 2, "pgcs"), (7, 1, "pgcs"), (8, 3, "exact")],
)
def test_exhaustive_ball_decoding(n, d, source):
    c = exact_codebook(n, d) if source == "exact" else pgcs_codebook(n, d, 50_000)
    for x in c.words:
        for y in deletion_ball(x, d):
            out = decode(c, y)
            assert out.decoded == x, (str(x), str(y))
            check_outcome(c, y, out)
            # early exit is only possible on the true source
            assert out.early_exit
            assert [w for w in c.words if lcs_len(w, y) == len(y)] == [x]
            assert decode_unfiltered(c, y).decoded == x


def test_filter_never_drops_source():
    c = pgcs_codebook(12, 2, 50_000)
    rng = random.Random(5)
    for _ in range(2000):
        x = rng.choice(c.words)
        t = rng.randint(0, 2)
        y = delete_at(x, rng.sample(range(12), t))
        survivors = filter_candidates(c, y)
        assert x in survivors
        assert all(w in survivors for w in c.words if is_subsequence(y, w))


def test_unfiltered_counts_every_word():
    c = vt_codebook(8)
    out = decode_unfiltered(c, c.words[5])
    assert out.lcs_evaluations == len(c) == out.candidates_after_filter
    assert not out.early_exit


def test_length_errors():
    c = vt_codebook(6)
    for y in ("1" * 7, "1010", ""):
        with pytest.raises(LengthOutOfRange):
            decode(c, bs(y))
        with pytest.raises(LengthOutOfRange):
            decode_unfiltered(c, bs(y))


def test_no_candidates():
    c = Codebook.of(4, 1, [bs("0000"), bs("1111")])
    with pytest.raises(NoCandidates):
        decode(c, bs("011"))
    # without filtering the argmax still answers, ties go to the lower index
    out = decode_unfiltered(c, bs("011"))
    assert out.decoded == bs("1111") and out.best_score == 2


def test_tie_break_lowest_index():
    c = Codebook.of(4, 1, [bs("0011"), bs("1100")])
    out = decode(c, bs("010"))
    assert not out.early_exit
    assert out.decoded == bs("0011") and out.best_score == 2


def test_outcome_json():
    c = vt_codebook(5)
    y = delete_at(c.words[2], [1])
    doc = json.loads(decode(c, y).to_json(y))
    assert doc["received"] == str(y) and doc["decoded"] == str(c.words[2])
    assert set(doc) == {
        "received", "decoded", "lcs_evaluations", "candidates_after_filter",
        "codebook_size", "early_exit", "best_score",
    }


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2), st.randoms(use_true_random=False))
def test_decode_properties_sampled(idx, t, rnd):
    c = pgcs_codebook(11, 2, 50_000)
    x = c.words[idx % len(c)]
    y = delete_at(x, rnd.sample(range(11), t))
    a, b = decode(c, y), decode_unfiltered(c, y)
    assert a.decoded == b.decoded == x
    assert b.lcs_evaluations == len(c)
    check_outcome(c, y, a)


def test_decode_on_arbitrary_inputs_is_consistent():
    # outside the valid set filtering may discard the unfiltered argmax, but a full match is exact
    c = vt_codebook(7)
    rng = np.random.default_rng(0)
    for _ in range(500):
        k = int(rng.integers(6, 8))
        y = BitSeq.from_int(int(rng.integers(0, 1 << k)), k)
        b = decode_unfiltered(c, y)
        try:
            a = decode(c, y)
        except NoCandidates:
            continue
        check_outcome(c, y, a)
        assert a.best_score <= b.best_score
        if a.early_exit:
            assert a.decoded == b.decoded and b.best_score == len(y)
