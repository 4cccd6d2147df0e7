from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import pytest

from delclique.clique import PgcsParams, default_params, pgcs
from delclique.codebook import Codebook, from_clique
from delclique.graph import build_graph
from delclique.seqcore import BitSeq


@lru_cache(maxsize=None)
def cached_graph(n: int, d: int):
    return build_graph(n, d)


@pytest.fixture(scope="session")
def graph():
    return cached_graph


@lru_cache(maxsize=None)
def pgcs_codebook(n: int, d: int, iterations: int = 200_000, seed: int = 0) -> Codebook:
    g = cached_graph(n, d)
    inc, dec = default_params(n, d)
    r = pgcs(g, PgcsParams(pen_inc=inc, pen_dec=dec, iterations=iterations, seed=seed))
    return from_clique(g, r.best_clique)


def bs(text: str) -> BitSeq:
    return BitSeq.from_str(text)


def all_subsequences(s: str) -> set[str]:
    """Every subsequence of ``s`` by explicit index-subset enumeration."""
    return {
        "".join(s[i] for i in idx)
        for k in range(len(s) + 1)
        for idx in combinations(range(len(s)), k)
    }


def lcs_bruteforce(a: str, b: str) -> int:
    return max(len(c) for c in all_subsequences(a) & all_subsequences(b))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
