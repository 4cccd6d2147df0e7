"""Binary sequence primitives: LCS, indel distance, subsequences and deletion balls."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

MAX_LEN = 32


@dataclass(frozen=True)
class BitSeq:
    """A binary word of at most 32 symbols packed into one integer.

    Bit ``i`` of ``bits`` holds symbol ``i``, where symbol 0 is the leftmost
    character of the textual form. Note that this is the reverse of the
    vertex-id convention (see :meth:`from_int`), where the leftmost symbol is
    the most significant bit.
    """

    length: int
    bits: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.length <= MAX_LEN:
            raise ValueError(f"length must be in [0, {MAX_LEN}], got {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits set beyond the sequence length")

    @classmethod
    def from_str(cls, text: str) -> BitSeq:
        if len(text) > MAX_LEN:
            raise ValueError(f"sequence longer than {MAX_LEN} symbols")
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid symbol {ch!r} at position {i}")
        return cls(len(text), bits)

    @classmethod
    def from_int(cls, value: int, n: int) -> BitSeq:
        """Sequence whose n-bit big-endian expansion of ``value`` is the text."""
        if not 0 <= value < (1 << n):
            raise ValueError(f"value {value} does not fit in {n} bits")
        return cls.from_str(format(value, f"0{n}b") if n else "")

    @cached_property
    def symbols(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.length))

    @property
    def value(self) -> int:
        """Big-endian integer value; equals the compatibility-graph vertex id."""
        return int(self.symbols, 2) if self.length else 0

    def __str__(self) -> str:
        return self.symbols

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def complement(self) -> BitSeq:
        return BitSeq(self.length, ~self.bits & ((1 << self.length) - 1))

    def reverse(self) -> BitSeq:
        return BitSeq.from_str(self.symbols[::-1])


@dataclass(frozen=True)
class SymbolCounts:
    ones: int
    zeros: int


def lcs_len(x: BitSeq, y: BitSeq) -> int:
    """Length of a longest common subsequence of ``x`` and ``y``.

    Classic O(|x|·|y|) dynamic program, keeping only two rows of the table.
    """
    a, b = x.symbols, y.symbols
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        left = 0
        for j, cb in enumerate(b):
            if ca == cb:
                left = prev[j] + 1
            else:
                up = prev[j + 1]
                if up > left:
                    left = up
            cur.append(left)
        prev = cur
    return prev[-1]


def indel_distance(x: BitSeq, y: BitSeq) -> int:
    """|x| + |y| - 2·LCS(x, y); twice the (possibly half-integral) LCS distance."""
    return len(x) + len(y) - 2 * lcs_len(x, y)


def lcs_distance_equal(x: BitSeq, y: BitSeq) -> int:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")
    return len(x) - lcs_len(x, y)


def is_subsequence(y: BitSeq, x: BitSeq) -> bool:
    """True iff ``y`` is obtained from ``x`` by deleting zero or more symbols."""
    if len(y) > len(x):
        return False
    it = iter(x.symbols)
    return all(ch in it for ch in y.symbols)


def delete_at(x: BitSeq, positions: Iterable[int]) -> BitSeq:
    drop = set(positions)
    for p in drop:
        if not 0 <= p < len(x):
            raise IndexError(f"position {p} out of range for length {len(x)}")
    return BitSeq.from_str("".join(ch for i, ch in enumerate(x.symbols) if i not in drop))


def deletion_ball(x: BitSeq, d: int) -> set[BitSeq]:
    """All subsequences of ``x`` reachable by at most ``d`` deletions.

    Expands level by level, deduplicating each level before the next.
    """
    if not 0 <= d <= len(x):
        raise ValueError(f"d must be in [0, {len(x)}], got {d}")
    ball = {x}
    level = {x.symbols}
    for _ in range(d):
        level = {s[:i] + s[i + 1 :] for s in level for i in range(len(s))}
        ball.update(BitSeq.from_str(s) for s in level)
    return ball


def symbol_counts(x: BitSeq) -> SymbolCounts:
    ones = x.bits.bit_count()
    return SymbolCounts(ones=ones, zeros=len(x) - ones)
