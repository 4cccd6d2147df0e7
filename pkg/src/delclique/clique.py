"""Clique search: exact Bron-Kerbosch and Penalty-Guided Clique Search (PGCS)."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .graph import CompatGraph, common_neighbors, has_edge, members

EXACT_VERTEX_LIMIT = 1 << 10
RNG_NAME = "PCG64"
TIE_BREAK = "uniform-random"

# iterations per compiled call when the budget is wall-clock time
_TIME_CHUNK = 4096


class BudgetExceeded(RuntimeError):
    """An exact search hit its time cap before proving optimality."""


@dataclass(frozen=True)
class PgcsParams:
    """PGCS configuration.

    Exactly one of ``iterations`` and ``seconds`` must be given. ``target``
    is optional: the run stops as soon as a clique of that size is found.
    """

    pen_inc: float = 0.95
    pen_dec: float = 0.8
    iterations: int | None = None
    seconds: float | None = None
    seed: int = 0
    target: int | None = None

    def __post_init__(self) -> None:
        if self.pen_inc < 0:
            raise ValueError("pen_inc must be >= 0")
        if not 0 < self.pen_dec <= 1:
            raise ValueError("pen_dec must be in (0, 1]")
        if (self.iterations is None) == (self.seconds is None):
            raise ValueError("give exactly one of iterations or seconds")
        if self.iterations is not None and self.iterations <= 0:
            raise ValueError("iterations must be > 0")
        if self.seconds is not None and self.seconds <= 0:
            raise ValueError("seconds must be > 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def budget(self) -> dict:
        if self.iterations is not None:
            return {"kind": "iterations", "value": self.iterations}
        return {"kind": "seconds", "value": self.seconds}


def default_params(n: int, d: int) -> tuple[float, float]:
    """(pen_inc, pen_dec) used for table sweeps.

    (0.95, 0.8) for the sparse d >= 2 graphs and (0.4, 0.95) for the dense
    d = 1 graphs.
    """
    return (0.4, 0.95) if d == 1 else (0.95, 0.8)


@dataclass
class SolveReport:
    best_clique: list[int]
    best_size: int
    iterations: int
    elapsed: float
    size_trace: list[tuple[int, int]]
    seed: int | None
    solver: str
    params: dict = field(default_factory=dict)

    def to_dict(self, g: CompatGraph | None = None, *, timing: bool = True) -> dict:
        label = g.label if g is not None else str
        out = {
            "solver": self.solver,
            "best_size": self.best_size,
            "best_clique": [label(v) for v in sorted(self.best_clique)],
            "iterations": self.iterations,
            "size_trace": [list(p) for p in self.size_trace],
            "seed": self.seed,
            "params": self.params,
        }
        if self.solver == "pgcs":
            out["rng"] = RNG_NAME
            out["tie_break"] = TIE_BREAK
        if timing:
            out["elapsed"] = self.elapsed
        return out

    def to_json(self, g: CompatGraph | None = None, *, timing: bool = True) -> str:
        return json.dumps(self.to_dict(g, timing=timing), indent=2) + "\n"


def is_clique(g: CompatGraph, s: Iterable[int]) -> bool:
    vs = list(s)
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            if u == v or not has_edge(g, u, v):
                return False
    return True


def _int_rows(g: CompatGraph) -> list[int]:
    return [int.from_bytes(g.rows[u].tobytes(), "little") for u in range(g.num_vertices)]


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _color_bound(p: int, nbr: list[int]) -> int:
    """Number of colours in a greedy colouring of ``p``; bounds its clique number."""
    colors = 0
    while p:
        colors += 1
        q = p
        while q:
            low = q & -q
            p ^= low
            q &= ~nbr[low.bit_length() - 1] & ~low
    return colors


def bron_kerbosch_max(
    g: CompatGraph,
    *,
    time_limit: float | None = None,
    force: bool = False,
) -> SolveReport:
    """Maximum clique by Bron-Kerbosch with Tomita pivoting.

    Branches whose ``|R| + |P|`` cannot beat the incumbent are cut, which
    keeps the enumeration focused on the maximum rather than on every
    maximal clique. Deterministic: vertices are branched in ascending order
    and pivot ties go to the lowest id.
    """
    if g.num_vertices > EXACT_VERTEX_LIMIT and not force:
        raise ValueError(
            f"{g.num_vertices} vertices exceeds the exact-solver limit "
            f"{EXACT_VERTEX_LIMIT}; pass force=True to override"
        )
    t0 = time.perf_counter()
    nbr = _int_rows(g)
    best: list[int] = [0] if g.num_vertices else []
    trace: list[tuple[int, int]] = [(0, len(best))] if best else []
    nodes = 0

    def expand(r: list[int], p: int, x: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if time_limit is not None and nodes % 1024 == 0:
            if time.perf_counter() - t0 > time_limit:
                raise BudgetExceeded(f"exact search exceeded {time_limit} s")
        if not p:
            if len(r) > len(best):
                best = list(r)
                trace.append((nodes, len(best)))
            return
        if len(r) + p.bit_count() <= len(best):
            return
        if len(r) + _color_bound(p, nbr) <= len(best):
            return
        pivot, most = -1, -1
        for u in _bits(p | x):
            c = (p & nbr[u]).bit_count()
            if c > most:
                pivot, most = u, c
        for v in _bits(p & ~nbr[pivot]):
            r.append(v)
            expand(r, p & nbr[v], x & nbr[v])
            r.pop()
            p &= ~(1 << v)
            x |= 1 << v
            if len(r) + p.bit_count() <= len(best):
                return

    if g.num_vertices:
        expand([], (1 << g.num_vertices) - 1, 0)
    return SolveReport(
        best_clique=sorted(best),
        best_size=len(best),
        iterations=nodes,
        elapsed=time.perf_counter() - t0,
        size_trace=trace,
        seed=None,
        solver="bron-kerbosch",
    )


class PenaltyState:
    """Per-vertex penalties with the global decay applied lazily.

    Each vertex keeps ``(value, stamp)``; its penalty after iteration ``it``
    is ``value * pen_dec ** (it - stamp)``. Only vertices in the current
    clique are written each iteration.
    """

    def __init__(self, num_vertices: int, pen_dec: float):
        self.pen_dec = pen_dec
        self.value = np.zeros(num_vertices)
        self.stamp = np.zeros(num_vertices, dtype=np.int64)

    def get(self, v: int, it: int) -> float:
        return float(self.value[v]) * self.pen_dec ** float(it - int(self.stamp[v]))

    def bump(self, vs: Iterable[int], it: int, pen_inc: float) -> None:
        """Apply iteration ``it``: add ``pen_inc`` to ``vs`` then decay everything."""
        for v in vs:
            self.value[v] = (self.get(v, it - 1) + pen_inc) * self.pen_dec
            self.stamp[v] = it

    def materialize(self, it: int) -> np.ndarray:
        return self.value * self.pen_dec ** (it - self.stamp).astype(float)


class _RunState:
    def __init__(self, g: CompatGraph, params: PgcsParams):
        nv = g.num_vertices
        self.rng = np.random.default_rng(params.seed)
        self.val = np.zeros(nv)
        self.stamp = np.zeros(nv, dtype=np.int64)
        self.members = np.zeros(nv, dtype=np.int64)
        self.best = np.zeros(nv, dtype=np.int64)
        self.trace = np.zeros((nv + 1, 2), dtype=np.int64)
        v0 = int(self.rng.integers(0, nv))
        self.members[0] = v0
        self.best[0] = v0
        self.trace[0] = (0, 1)
        self.cand = g.rows[v0].copy()
        # [clique size, best size, trace length]
        self.meta = np.array([1, 1, 1], dtype=np.int64)
        self.it = 0


def _steps_compiled(g: CompatGraph, params: PgcsParams, st: _RunState, stop: int, target: int):
    st.it = int(
        _kernels.pgcs_steps(
            g.rows, float(params.pen_inc), float(params.pen_dec), st.rng,
            st.val, st.stamp, st.members, st.cand, st.best, st.trace, st.meta,
            st.it, stop, target,
        )
    )


def _steps_python(
    g: CompatGraph,
    params: PgcsParams,
    st: _RunState,
    stop: int,
    target: int,
    checked: bool,
    on_iteration: Callable[[int, Sequence[int], PenaltyState], None] | None,
) -> None:
    """Reference implementation of the compiled loop, step for step.

    Consumes the RNG identically, so both paths produce the same run.
    """
    nv = g.num_vertices
    pen = PenaltyState(nv, params.pen_dec)
    pen.value, pen.stamp = st.val, st.stamp
    k, bk, tl = (int(x) for x in st.meta)
    clique = [int(v) for v in st.members[:k]]
    rng = st.rng
    it = st.it
    while it < stop:
        it += 1
        prev = it - 1
        pick, low_p, ties = -1, np.inf, 0
        for v in members(st.cand, nv):
            p = pen.get(v, prev)
            if p < low_p:
                pick, low_p, ties = v, p, 1
            elif p == low_p:
                ties += 1
                if rng.integers(0, ties) == 0:
                    pick = v
        if pick >= 0:
            clique.append(pick)
            st.cand &= g.rows[pick]
        elif len(clique) > 1:
            at, high_p, ties = -1, -1.0, 0
            for i, v in enumerate(clique):
                p = pen.get(v, prev)
                if p > high_p:
                    at, high_p, ties = i, p, 1
                elif p == high_p:
                    ties += 1
                    if rng.integers(0, ties) == 0:
                        at = i
            clique[at] = clique[-1]
            clique.pop()
            st.cand = np.bitwise_and.reduce(g.rows[clique], axis=0)
        else:
            v = int(rng.integers(0, nv))
            clique[0] = v
            st.cand = g.rows[v].copy()
        pen.bump(clique, it, params.pen_inc)
        if checked:
            if not is_clique(g, clique):
                raise AssertionError(f"working set is not a clique at iteration {it}")
            expect = common_neighbors(g, clique)
            if not np.array_equal(expect, st.cand):
                raise AssertionError(f"candidate row out of sync at iteration {it}")
        if on_iteration is not None:
            on_iteration(it, tuple(clique), pen)
        if len(clique) > bk:
            bk = len(clique)
            st.best[:bk] = clique
            st.trace[tl] = (it, bk)
            tl += 1
            if bk >= target:
                break
    k = len(clique)
    st.members[:k] = clique
    st.meta[:] = (k, bk, tl)
    st.it = it


def pgcs(
    g: CompatGraph,
    params: PgcsParams,
    *,
    engine: str = "auto",
    checked: bool = False,
    on_iteration: Callable[[int, Sequence[int], PenaltyState], None] | None = None,
) -> SolveReport:
    """Penalty-Guided Clique Search.

    Each iteration grows the working clique by the lowest-penalty common
    neighbour; when none exists it drops the highest-penalty member, or
    restarts from a random vertex if only one member is left. Members then
    gain ``pen_inc`` and every penalty decays by ``pen_dec``.

    ``engine`` is ``"compiled"``, ``"python"`` or ``"auto"`` (compiled
    unless ``checked``/``on_iteration`` need the Python loop). Both engines
    produce identical reports for the same seed and iteration budget.
    """
    if g.num_vertices < 1:
        raise ValueError("graph has no vertices")
    if engine == "auto":
        engine = "python" if checked or on_iteration is not None else "compiled"
    if engine not in ("compiled", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "compiled" and (checked or on_iteration is not None):
        raise ValueError("checked mode and callbacks need engine='python'")

    t0 = time.perf_counter()
    st = _RunState(g, params)
    target = params.target if params.target is not None else g.num_vertices + 1

    def run_to(stop: int) -> None:
        if engine == "compiled":
            _steps_compiled(g, params, st, stop, target)
        else:
            _steps_python(g, params, st, stop, target, checked, on_iteration)

    if st.meta[1] < target:
        if params.iterations is not None:
            run_to(params.iterations)
        else:
            while time.perf_counter() - t0 < params.seconds and st.meta[1] < target:
                run_to(st.it + _TIME_CHUNK)

    bk, tl = int(st.meta[1]), int(st.meta[2])
    return SolveReport(
        best_clique=sorted(int(v) for v in st.best[:bk]),
        best_size=bk,
        iterations=st.it,
        elapsed=time.perf_counter() - t0,
        size_trace=[(int(a), int(b)) for a, b in st.trace[:tl]],
        seed=params.seed,
        solver="pgcs",
        params={
            "pen_inc": params.pen_inc,
            "pen_dec": params.pen_dec,
            "budget": params.budget,
            "target": params.target,
        },
    )


@dataclass
class MultiReport:
    best: SolveReport
    sizes: list[int]
    reports: list[SolveReport]


def pgcs_multi(
    g: CompatGraph,
    params: PgcsParams,
    runs: int,
    *,
    workers: int = 1,
    engine: str = "auto",
) -> MultiReport:
    """Independent PGCS runs with seeds ``seed .. seed + runs - 1``.

    The best run is the largest clique, ties going to the lowest seed.
    Runs may execute on threads (the compiled loop releases the GIL); the
    merge is by seed order so the result does not depend on scheduling.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    seeds = [params.seed + i for i in range(runs)]
    configs = [replace(params, seed=s) for s in seeds]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(lambda p: pgcs(g, p, engine=engine), configs))
    else:
        reports = [pgcs(g, p, engine=engine) for p in configs]
    best = max(reports, key=lambda r: (r.best_size, -r.seed))
    return MultiReport(best=best, sizes=[r.best_size for r in reports], reports=reports)

