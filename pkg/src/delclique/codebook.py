"""Codebooks: encoder, validity checks, VT construction and the text file format."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, TextIO

from .clique import is_clique
from .graph import CompatGraph
from .seqcore import BitSeq, SymbolCounts, deletion_ball, lcs_len, symbol_counts

FORMAT_TAG = "delcode v1"
BALL_CHECK_MAX_N = 10

_HEADER = re.compile(r"^delcode v1 n=(\d+) d=(\d+) M=(\d+)$")


class CodebookFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class CodebookValidationError(ValueError):
    def __init__(self, msg: str, pair: tuple[BitSeq, BitSeq] | None = None):
        super().__init__(msg)
        self.pair = pair


@dataclass(frozen=True)
class Codebook:
    """An ordered set of length-``n`` words claimed to correct ``d`` deletions.

    Words are kept in ascending integer order; message ``i`` (1-based) maps
    to ``words[i - 1]``.
    """

    n: int
    d: int
    words: tuple[BitSeq, ...]

    def __post_init__(self) -> None:
        if self.n < 1 or not 0 <= self.d < self.n:
            raise CodebookValidationError(f"invalid parameters n={self.n} d={self.d}")
        for w in self.words:
            if len(w) != self.n:
                raise CodebookValidationError(f"word {w} has length {len(w)}, expected {self.n}")
        values = [w.value for w in self.words]
        for a, b in zip(values, values[1:]):
            if a == b:
                raise CodebookValidationError(f"duplicate word {BitSeq.from_int(a, self.n)}")
            if a > b:
                raise CodebookValidationError("words are not in ascending order")

    @classmethod
    def of(cls, n: int, d: int, words: Iterable[BitSeq]) -> Codebook:
        """Build from words in any order; duplicates are rejected."""
        ws = sorted(words, key=lambda w: (len(w), w.value))
        return cls(n, d, tuple(ws))

    def __len__(self) -> int:
        return len(self.words)

    @cached_property
    def counts(self) -> tuple[SymbolCounts, ...]:
        return tuple(symbol_counts(w) for w in self.words)

    @cached_property
    def _index(self) -> dict[BitSeq, int]:
        return {w: i + 1 for i, w in enumerate(self.words)}

    def index_of(self, word: BitSeq) -> int:
        """Inverse of :func:`encode`."""
        try:
            return self._index[word]
        except KeyError:
            raise KeyError(f"{word} is not a codeword") from None


def from_clique(g: CompatGraph, s: Iterable[int]) -> Codebook:
    vs = sorted(set(s))
    if g.n is None or g.d is None:
        raise ValueError("graph carries no (n, d); cannot map vertices to words")
    if not is_clique(g, vs):
        raise CodebookValidationError("vertex set is not a clique of the graph")
    return Codebook(g.n, g.d, tuple(BitSeq.from_int(v, g.n) for v in vs))


def find_lcs_violation(c: Codebook) -> tuple[BitSeq, BitSeq] | None:
    """First pair (in codebook order) with LCS above n - d - 1, if any."""
    limit = c.n - c.d - 1
    for u, v in combinations(c.words, 2):
        if lcs_len(u, v) > limit:
            return u, v
    return None


def verify_lcs(c: Codebook) -> bool:
    return find_lcs_violation(c) is None


def verify_balls(c: Codebook, *, max_n: int = BALL_CHECK_MAX_N) -> bool:
    """Check pairwise disjointness of the d-deletion balls directly.

    Independent of the LCS criterion; used as its oracle. A single pass over
    the balls suffices: a received word claimed by two codewords is a clash.
    """
    if c.n > max_n:
        raise ValueError(f"ball check limited to n <= {max_n}")
    owner: dict[BitSeq, BitSeq] = {}
    for w in c.words:
        for y in deletion_ball(w, c.d):
            if owner.setdefault(y, w) != w:
                return False
    return True


def encode(c: Codebook, index: int) -> BitSeq:
    if not 1 <= index <= len(c.words):
        raise IndexError(f"message index {index} outside [1, {len(c.words)}]")
    return c.words[index - 1]


def vt_checksum(x: BitSeq) -> int:
    """Sum of i * x_i over 1-based positions, position 1 leftmost."""
    return sum(i + 1 for i in range(len(x)) if x[i])


def vt_codebook(n: int, residue: int = 0) -> Codebook:
    """Varshamov-Tenengolts code VT_residue(n): checksum = residue mod n + 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= residue <= n:
        raise ValueError(f"residue must be in [0, {n}]")
    words = (BitSeq.from_int(v, n) for v in range(1 << n))
    return Codebook.of(n, 1, (w for w in words if vt_checksum(w) % (n + 1) == residue))


def save(c: Codebook, sink: TextIO) -> None:
    sink.write(f"{FORMAT_TAG} n={c.n} d={c.d} M={len(c.words)}\n")
    for w in c.words:
        sink.write(f"{w}\n")


def load(source: TextIO | Iterable[str]) -> Codebook:
    """Parse a codebook file and re-verify it.

    Raises :class:`CodebookFormatError` for malformed lines and
    :class:`CodebookValidationError` when the contents do not form a
    d-deletion-correcting code of the declared shape.
    """
    lines = iter(source)
    header = next(lines, None)
    if header is None:
        raise CodebookFormatError(1, "empty file")
    m = _HEADER.match(header.rstrip("\n"))
    if not m:
        raise CodebookFormatError(1, f"bad header {header.rstrip()!r}")
    n, d, count = (int(g) for g in m.groups())
    words = []
    for lineno, raw in enumerate(lines, start=2):
        text = raw.rstrip("\n")
        if len(text) != n or text.strip("01"):
            raise CodebookFormatError(lineno, f"expected a {n}-bit word, got {text!r}")
        words.append(BitSeq.from_str(text))
    if len(words) != count:
        raise CodebookValidationError(f"header declares M={count}, file has {len(words)} words")
    c = Codebook(n, d, tuple(words))
    bad = find_lcs_violation(c)
    if bad is not None:
        u, v = bad
        raise CodebookValidationError(
            f"pair {u} / {v} has LCS {lcs_len(u, v)} > {n - d - 1}; "
            f"not {d}-deletion-correcting",
            pair=bad,
        )
    return c
