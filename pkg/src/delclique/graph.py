"""Deletion-compatibility graphs stored as dense bit rows, plus DIMACS I/O."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from . import _kernels

DEFAULT_MAX_N = 14
DEFAULT_MEMORY_CAP = 2 * 1024**3


class GraphResourceError(RuntimeError):
    """Requested graph exceeds the configured size or memory cap."""


class DimacsParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _words(num_vertices: int) -> int:
    return max(1, (num_vertices + 63) // 64)


@dataclass(frozen=True, eq=False)
class CompatGraph:
    """Undirected graph with adjacency as ``(V, ceil(V/64))`` uint64 bit rows.

    Bit ``v`` of row ``u`` lives in word ``v // 64`` at position ``v % 64``.
    ``n`` and ``d`` are set for graphs built from a code length and deletion
    budget; graphs imported from elsewhere may leave them ``None``.
    """

    num_vertices: int
    rows: np.ndarray
    n: int | None = None
    d: int | None = None

    def __post_init__(self) -> None:
        if self.rows.shape != (self.num_vertices, _words(self.num_vertices)):
            raise ValueError(f"row array has shape {self.rows.shape}")
        self.rows.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompatGraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.n == other.n
            and self.d == other.d
            and np.array_equal(self.rows, other.rows)
        )

    __hash__ = None  # type: ignore[assignment]

    def _check(self, v: int) -> None:
        if not 0 <= v < self.num_vertices:
            raise IndexError(f"vertex {v} out of range [0, {self.num_vertices})")

    def neighbors(self, u: int) -> list[int]:
        self._check(u)
        return members(self.rows[u], self.num_vertices)

    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self.rows).sum(axis=1, dtype=np.int64)

    def num_edges(self) -> int:
        return int(self.degrees().sum()) // 2

    def density(self) -> float:
        v = self.num_vertices
        return 0.0 if v < 2 else 2 * self.num_edges() / (v * (v - 1))

    def label(self, v: int) -> str:
        """Textual sequence for a vertex when ``n`` is known, else the id."""
        return format(v, f"0{self.n}b") if self.n is not None else str(v)


def members(row: np.ndarray, num_vertices: int) -> list[int]:
    """Vertex ids whose bits are set in ``row``."""
    bits = np.unpackbits(row.view(np.uint8), bitorder="little")[:num_vertices]
    return np.flatnonzero(bits).tolist()


def _empty_rows(num_vertices: int) -> np.ndarray:
    return np.zeros((num_vertices, _words(num_vertices)), dtype=np.uint64)


def build_graph(
    n: int,
    d: int,
    *,
    parallel: bool = False,
    max_n: int = DEFAULT_MAX_N,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> CompatGraph:
    """Graph on all 2^n words with an edge iff LCS(u, v) <= n - d - 1.

    The parallel path gives every worker whole rows, so the result is
    identical to the sequential build regardless of scheduling.
    """
    if not 1 <= n <= max_n:
        raise ValueError(f"n must be in [1, {max_n}], got {n}")
    if not 1 <= d < n:
        raise ValueError(f"d must be in [1, {n - 1}], got {d}")
    num_vertices = 1 << n
    need = num_vertices * _words(num_vertices) * 8
    if need > memory_cap:
        raise GraphResourceError(
            f"adjacency for n={n} needs {need} bytes, cap is {memory_cap}"
        )
    rows = _empty_rows(num_vertices)
    if parallel:
        _kernels.build_rows_parallel(n, n - d - 1, rows)
    else:
        _kernels.build_rows_sequential(n, n - d - 1, rows)
    return CompatGraph(num_vertices, rows, n=n, d=d)


def from_edges(
    num_vertices: int,
    edges: Iterable[tuple[int, int]],
    *,
    n: int | None = None,
    d: int | None = None,
) -> CompatGraph:
    rows = _empty_rows(num_vertices)
    for u, v in edges:
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise IndexError(f"edge ({u}, {v}) out of range")
        if u == v:
            raise ValueError(f"self-loop at {u}")
        rows[u, v >> 6] |= np.uint64(1 << (v & 63))
        rows[v, u >> 6] |= np.uint64(1 << (u & 63))
    return CompatGraph(num_vertices, rows, n=n, d=d)


def complete_graph(k: int) -> CompatGraph:
    return from_edges(k, ((u, v) for u in range(k) for v in range(u + 1, k)))


def has_edge(g: CompatGraph, u: int, v: int) -> bool:
    g._check(u)
    g._check(v)
    return bool((int(g.rows[u, v >> 6]) >> (v & 63)) & 1)


def common_neighbors(g: CompatGraph, vertices: Iterable[int]) -> np.ndarray:
    """AND of the rows of ``vertices``, with the vertices themselves cleared."""
    vs = list(vertices)
    if not vs:
        raise ValueError("common_neighbors needs at least one vertex")
    for v in vs:
        g._check(v)
    row = np.bitwise_and.reduce(g.rows[vs], axis=0)
    for v in vs:
        row[v >> 6] &= ~np.uint64(1 << (v & 63))
    return row


def degree_histogram(g: CompatGraph) -> dict[int, int]:
    return dict(sorted(Counter(g.degrees().tolist()).items()))


def export_dimacs(g: CompatGraph, sink: TextIO) -> None:
    if g.n is not None:
        sink.write(f"c delclique n={g.n} d={g.d}\n")
    sink.write(f"p edge {g.num_vertices} {g.num_edges()}\n")
    for u in range(g.num_vertices):
        later = [v for v in members(g.rows[u], g.num_vertices) if v > u]
        if later:
            sink.write("".join(f"e {u + 1} {v + 1}\n" for v in later))


def _parse_tag(line: str) -> tuple[int | None, int | None]:
    fields = dict(tok.split("=", 1) for tok in line.split()[2:] if "=" in tok)
    try:
        return int(fields["n"]), int(fields["d"])
    except (KeyError, ValueError):
        return None, None


def import_dimacs(source: TextIO | Iterable[str]) -> CompatGraph:
    """Read a DIMACS ``p edge`` graph; vertex k in the file becomes id k-1."""
    n = d = None
    num_vertices = declared = None
    rows = None
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        kind = line[0]
        if kind == "c":
            if line.startswith("c delclique"):
                n, d = _parse_tag(line)
            continue
        parts = line.split()
        if kind == "p":
            if rows is not None:
                raise DimacsParseError(lineno, "duplicate problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise DimacsParseError(lineno, f"bad problem line {line!r}")
            try:
                num_vertices, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsParseError(lineno, f"bad problem line {line!r}") from None
            if num_vertices < 0 or declared < 0:
                raise DimacsParseError(lineno, "negative counts")
            rows = _empty_rows(num_vertices)
        elif kind == "e":
            if rows is None:
                raise DimacsParseError(lineno, "edge before problem line")
            try:
                i, j = int(parts[1]), int(parts[2])
            except (IndexError, ValueError):
                raise DimacsParseError(lineno, f"bad edge line {line!r}") from None
            if len(parts) != 3:
                raise DimacsParseError(lineno, f"bad edge line {line!r}")
            if not (1 <= i <= num_vertices and 1 <= j <= num_vertices):
                raise DimacsParseError(lineno, f"endpoint out of range in {line!r}")
            if i == j:
                raise DimacsParseError(lineno, f"self-loop in {line!r}")
            u, v = i - 1, j - 1
            rows[u, v >> 6] |= np.uint64(1 << (v & 63))
            rows[v, u >> 6] |= np.uint64(1 << (u & 63))
        else:
            raise DimacsParseError(lineno, f"unknown line type {kind!r}")
    if rows is None:
        raise DimacsParseError(0, "missing problem line")
    g = CompatGraph(num_vertices, rows, n=n, d=d)
    if g.num_edges() != declared:
        raise DimacsParseError(
            lineno, f"problem line declares {declared} edges, found {g.num_edges()}"
        )
    if n is not None and num_vertices != 1 << n:
        raise DimacsParseError(lineno, f"tag n={n} disagrees with {num_vertices} vertices")
    return g
