"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 resource cap,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import codebook as cb
from .channel import CSV_COLUMNS, CapExceeded, ChannelConfigError, ChannelModel, simulate
from .clique import (
    EXACT_VERTEX_LIMIT,
    BudgetExceeded,
    PgcsParams,
    bron_kerbosch_max,
    default_params,
    pgcs_multi,
)
from .decoder import DecodeError, LengthOutOfRange, decode
from .graph import DimacsParseError, GraphResourceError, build_graph, export_dimacs, import_dimacs
from .seqcore import BitSeq

log = logging.getLogger("delclique")

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3, 4

DEFAULT_ITERATIONS = 200_000
DEFAULT_RUNS = 3

# (d, n) cells of the two benchmark tables
TABLE_1 = [(2, n) for n in range(3, 15)]
TABLE_2 = (
    [(1, n) for n in range(2, 12)]
    + [(3, n) for n in range(4, 12)]
    + [(4, n) for n in range(5, 12)]
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    n: int | None = None
    d: int | None = None
    solver: str = "pgcs"
    pen_inc: float | None = None
    pen_dec: float | None = None
    iterations: int | None = None
    seconds: float | None = None
    runs: int = DEFAULT_RUNS
    seed: int = 0
    target: int | None = None
    exact_cap: int = EXACT_VERTEX_LIMIT
    force: bool = False
    paths: dict[str, str] = field(default_factory=dict)

    def pgcs_params(self) -> PgcsParams:
        inc, dec = default_params(self.n, self.d)
        iterations, seconds = self.iterations, self.seconds
        if iterations is None and seconds is None:
            iterations = DEFAULT_ITERATIONS
        return PgcsParams(
            pen_inc=inc if self.pen_inc is None else self.pen_inc,
            pen_dec=dec if self.pen_dec is None else self.pen_dec,
            iterations=iterations,
            seconds=seconds,
            seed=self.seed,
            target=self.target,
        )


def _budget_text(p: PgcsParams) -> str:
    b = p.budget
    return f"{b['kind']}:{b['value']}"


def _open_out(path: str | None):
    return open(path, "w", encoding="utf-8") if path and path != "-" else None


def _write_text(path: str | None, text: str) -> None:
    if not path or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_codebook(path: str) -> cb.Codebook:
    with open(path, encoding="utf-8") as fh:
        return cb.load(fh)


def _require_nd(cfg: RunConfig) -> None:
    if cfg.n is None or cfg.d is None:
        raise UsageError("--n and --d are required")


def cmd_build_graph(args) -> int:
    cfg = args.cfg
    _require_nd(cfg)
    g = build_graph(cfg.n, cfg.d, parallel=args.parallel, max_n=args.max_n)
    out = _open_out(args.output)
    try:
        export_dimacs(g, out or sys.stdout)
    finally:
        if out:
            out.close()
    print(
        f"n={g.n} d={g.d} vertices={g.num_vertices} edges={g.num_edges()} "
        f"density={g.density():.6f}",
        file=sys.stderr,
    )
    return EXIT_OK


def _load_or_build(cfg: RunConfig, graph_path: str | None, max_n: int):
    if graph_path:
        with open(graph_path, encoding="utf-8") as fh:
            g = import_dimacs(fh)
        if g.n is None:
            raise UsageError(f"{graph_path} carries no n/d tag; it was not written by build-graph")
        cfg.n, cfg.d = g.n, g.d
        return g
    _require_nd(cfg)
    return build_graph(cfg.n, cfg.d, max_n=max_n)


def cmd_solve(args) -> int:
    cfg = args.cfg
    g = _load_or_build(cfg, args.graph, args.max_n)
    if cfg.solver == "exact":
        if g.num_vertices > cfg.exact_cap and not cfg.force:
            raise GraphResourceError(
                f"exact solver limited to {cfg.exact_cap} vertices; use --force to override"
            )
        report = bron_kerbosch_max(g, time_limit=args.time_limit, force=True)
        doc = report.to_dict(g, timing=True)
        timing = report.elapsed
    else:
        params = cfg.pgcs_params()
        multi = pgcs_multi(g, params, cfg.runs, workers=args.workers)
        report = multi.best
        # wall-clock fields only in time-budget mode, so iteration runs are byte-reproducible
        doc = report.to_dict(g, timing=params.seconds is not None)
        doc["runs"] = cfg.runs
        doc["run_sizes"] = multi.sizes
        timing = sum(r.elapsed for r in multi.reports)
    doc = {"n": g.n, "d": g.d, **doc}
    book = cb.from_clique(g, report.best_clique)
    out = _open_out(args.output)
    try:
        cb.save(book, out or sys.stdout)
    finally:
        if out:
            out.close()
    if args.report:
        _write_text(args.report, json.dumps(doc, indent=2) + "\n")
    print(f"solver={cfg.solver} n={g.n} d={g.d} M={len(book)} elapsed={timing:.2f}s", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        c = _read_codebook(args.path)
    except cb.CodebookValidationError as exc:
        print("lcs: fail")
        if exc.pair is not None:
            print(f"violating pair: {exc.pair[0]} {exc.pair[1]}")
        print(f"detail: {exc}")
        return EXIT_INVALID
    print(f"M={len(c)} n={c.n} d={c.d}")
    print("lcs: pass")
    if c.n > args.ball_max_n:
        print("balls: skipped")
        return EXIT_OK
    balls = cb.verify_balls(c, max_n=args.ball_max_n)
    print(f"balls: {'pass' if balls else 'fail'}")
    return EXIT_OK if balls else EXIT_INVALID


def cmd_decode(args) -> int:
    c = _read_codebook(args.path)
    try:
        y = BitSeq.from_str(args.received)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = decode(c, y)
    sys.stdout.write(out.to_json(y))
    return EXIT_OK


def _parse_probs(text: str | None) -> tuple[float, ...] | None:
    if not text:
        return None
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"bad --t-probs {text!r}") from None


def cmd_simulate(args) -> int:
    c = _read_codebook(args.path)
    probs = _parse_probs(args.t_probs)
    d_max = c.d if args.d_max is None else args.d_max
    model = ChannelModel(d_max, probs, seed=args.cfg.seed)
    report = simulate(c, model, args.trials)
    _write_text(args.json, report.to_json())
    if args.csv:
        path = Path(args.csv)
        fresh = not path.exists() or path.stat().st_size == 0
        with path.open("a", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            if fresh:
                w.writerow(CSV_COLUMNS)
            w.writerow(report.csv_row())
    return EXIT_OK


def _cell_rows(cfg: RunConfig, table: int, d: int, n: int, methods: list[str], cells: Path, args):
    for method in methods:
        cell = cells / f"t{table}-n{n}-d{d}-{method}.json"
        if cell.exists():
            row = json.loads(cell.read_text())
            if row.get("status") == "ok":
                yield row
                continue
        row = {"table": table, "n": n, "d": d, "method": method, "size": None,
               "runs": "", "budget": "", "seed": ""}
        t0 = time.perf_counter()
        try:
            if method == "vt":
                row["size"] = len(cb.vt_codebook(n, 0))
            else:
                g = build_graph(n, d, max_n=args.max_n)
                if method == "exact":
                    row["size"] = bron_kerbosch_max(g, time_limit=args.time_limit).best_size
                else:
                    local = RunConfig(**{**cfg.__dict__, "n": n, "d": d, "target": None})
                    params = local.pgcs_params()
                    multi = pgcs_multi(g, params, cfg.runs, workers=args.workers)
                    row.update(size=multi.best.best_size, runs=cfg.runs,
                               budget=_budget_text(params), seed=params.seed,
                               run_sizes=multi.sizes, pen_inc=params.pen_inc,
                               pen_dec=params.pen_dec)
            row["status"] = "ok"
        except Exception as exc:  # one bad cell must not abort the sweep
            row["status"] = "error"
            row["error"] = f"{type(exc).__name__}: {exc}"
            log.warning("cell table=%s n=%s d=%s %s failed: %s", table, n, d, method, exc)
        row["elapsed"] = time.perf_counter() - t0
        cell.write_text(json.dumps(row, indent=2) + "\n")
        yield row


def _methods(d: int, n: int, args) -> list[str]:
    out = []
    if d == 1:
        out.append("vt")
    exact_limit = args.exact_max_n_dense if d == 1 else args.exact_max_n
    if n <= exact_limit:
        out.append("exact")
    out.append("pgcs")
    return out


def cmd_reproduce_tables(args) -> int:
    cfg = args.cfg
    outdir = Path(args.out)
    cells = outdir / "cells"
    cells.mkdir(parents=True, exist_ok=True)
    tables = {1: TABLE_1, 2: TABLE_2}
    failed = 0
    for table in sorted(set(args.tables)):
        rows = []
        for d, n in tables[table]:
            if n > args.max_n:
                continue
            for row in _cell_rows(cfg, table, d, n, _methods(d, n, args), cells, args):
                rows.append(row)
                failed += row["status"] != "ok"
                log.info("table %d n=%d d=%d %s -> %s", table, n, d, row["method"], row["size"])
        rows.sort(key=lambda r: (r["n"], r["d"], r["method"]))
        with open(outdir / f"table-{table}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "d", "method", "size", "runs", "budget", "seed"])
            for r in rows:
                size = "" if r["size"] is None else r["size"]
                w.writerow([r["n"], r["d"], r["method"], size, r["runs"], r["budget"], r["seed"]])
    if failed:
        print(f"{failed} cell(s) failed; see {cells}", file=sys.stderr)
    return EXIT_OK


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file of option defaults (flags win)")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--seed", type=int)


def _add_pgcs_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pen-inc", type=float)
    p.add_argument("--pen-dec", type=float)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--iterations", type=int, help=f"per run (default {DEFAULT_ITERATIONS})")
    budget.add_argument("--seconds", type=float, help="wall-clock budget per run")
    p.add_argument("--runs", type=int)
    p.add_argument("--workers", type=int, default=1, help="threads for independent runs")
    p.add_argument("--max-n", type=int, default=14, help="largest n the graph builder accepts")
    p.add_argument("--time-limit", type=float, help="cap on the exact solver, seconds")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="delclique", description="Deletion-correcting codes via maximum cliques.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-graph", help="write the compatibility graph as DIMACS")
    _add_run_options(p)
    p.add_argument("-o", "--output", help="DIMACS file (default stdout)")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--max-n", type=int, default=14)
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("solve", help="find a large codebook")
    _add_run_options(p)
    _add_pgcs_options(p)
    p.add_argument("--solver", choices=["exact", "pgcs"])
    p.add_argument("--target", type=int, help="stop a PGCS run once this size is reached")
    p.add_argument("--exact-cap", type=int, help=f"max vertices for exact (default {EXACT_VERTEX_LIMIT})")
    p.add_argument("--force", action="store_true", help="ignore the exact-solver cap")
    p.add_argument("--graph", help="DIMACS file from build-graph instead of building")
    p.add_argument("-o", "--output", help="codebook file (default stdout)")
    p.add_argument("--report", help="SolveReport JSON path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a codebook file")
    p.add_argument("path")
    p.add_argument("--ball-max-n", type=int, default=cb.BALL_CHECK_MAX_N,
                   help="run the deletion-ball check up to this n")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decode", help="decode one received word")
    p.add_argument("path")
    p.add_argument("received")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo deletion-channel run")
    p.add_argument("path")
    p.add_argument("--config")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--d-max", type=int, help="max deletions (default: codebook d)")
    p.add_argument("--t-probs", help="comma-separated P(t) for t = 0..d_max (default uniform)")
    p.add_argument("--json", help="report path (default stdout)")
    p.add_argument("--csv", help="append a summary row to this CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce-tables", help="sweep the table cells")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    _add_pgcs_options(p)
    p.add_argument("--out", default="tables")
    p.add_argument("--tables", type=int, nargs="+", choices=[1, 2], default=[1, 2])
    p.add_argument("--exact-max-n", type=int, default=8)
    p.add_argument("--exact-max-n-dense", type=int, default=7, help="exact limit for d = 1")
    p.set_defaults(func=cmd_reproduce_tables)
    return parser


_CFG_KEYS = {f for f in RunConfig.__dataclass_fields__} - {"paths"}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return {k.replace("-", "_"): v for k, v in data.items()}


def _resolve(args: argparse.Namespace) -> RunConfig:
    """Merge config-file values under the explicit flags."""
    file_values = _load_config(getattr(args, "config", None))
    unknown = set(file_values) - _CFG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = RunConfig(**file_values)
    for key in _CFG_KEYS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            setattr(cfg, key, value)
    if cfg.iterations is not None and cfg.seconds is not None:
        if getattr(args, "seconds", None) is not None:
            cfg.iterations = None
        else:
            cfg.seconds = None
    if cfg.solver not in ("exact", "pgcs"):
        raise UsageError(f"unknown solver {cfg.solver!r}")
    if cfg.runs < 1:
        raise UsageError("runs must be >= 1")
    for key in ("path", "graph", "output", "report", "json", "csv", "out"):
        if getattr(args, key, None):
            cfg.paths[key] = getattr(args, key)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        args.cfg = _resolve(args)
        return args.func(args)
    except (UsageError, ChannelConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (cb.CodebookFormatError, cb.CodebookValidationError, DimacsParseError,
            DecodeError) as exc:
        kind = "length" if isinstance(exc, LengthOutOfRange) else "invalid"
        print(f"{kind}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (GraphResourceError, CapExceeded, BudgetExceeded, MemoryError) as exc:
        print(f"resource: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
