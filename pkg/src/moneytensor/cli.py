"""Command-line entry point.

Subcommands: ingest (transactions CSV -> tensor JSON), decompose
(tensor JSON -> rank-1 factors JSON), simulate (scenario -> indicator
CSV), report (scenario or CSV -> CSV + figure), serve (HTTP API).

Exit codes: 0 success, 1 validation error, 2 I/O error. Diagnostics go
to stderr; data goes to stdout unless --out/--out-dir is given. Output
files are written to a temp file and renamed, so failures never leave
partial artifacts behind.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from pathlib import Path

from . import api_server
from .errors import ValidationError
from .io_formats import (
    read_scenario,
    read_taxonomy_json,
    read_tensor_json,
    write_indicator_csv,
    write_tensor_json,
)
from .ledger import build_tensor, parse_transactions_csv
from .sim import run
from .tensor_core import AlsConfig, rank1_approx

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="moneytensor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="classify a transactions CSV into a tensor JSON")
    p.add_argument("--transactions", required=True, help="transactions CSV path")
    p.add_argument("--taxonomy", required=True, help="taxonomy JSON path")
    p.add_argument("--out", required=True, help="output tensor JSON path")

    p = sub.add_parser("decompose", help="rank-1 factors of a tensor JSON")
    p.add_argument("--tensor", required=True, help="tensor JSON path")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--pretty", action="store_true", help="human-readable table")

    p = sub.add_parser("simulate", help="run a scenario to an indicator CSV")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", help="write CSV here instead of stdout")

    p = sub.add_parser("report", help="indicator CSV plus rendered figure")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="scenario JSON path (runs the simulation)")
    src.add_argument("--from-csv", help="existing indicator CSV to render")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out-dir", required=True, help="directory for indicators.csv/.png")
    p.add_argument("--title", help="figure title")

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--port", type=int, default=api_server.DEFAULT_PORT)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--allow-origin", help="CORS origin for the browser console")
    p.add_argument("--max-sessions", type=int, default=api_server.DEFAULT_MAX_SESSIONS)

    return parser


def _read_file(path: str) -> bytes:
    return Path(path).read_bytes()


def _write_atomic(path: str, data: bytes) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(data: bytes, out: str | None) -> None:
    if out:
        _write_atomic(out, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _cmd_ingest(args) -> int:
    txns = parse_transactions_csv(_read_file(args.transactions))
    tax = read_taxonomy_json(_read_file(args.taxonomy))
    tensor = build_tensor(txns, tax)
    _write_atomic(args.out, write_tensor_json(tensor, tax))
    print(
        f"ingested {len(txns)} transactions into a "
        f"{tensor.n_sectors}x{tensor.n_agents}x{tensor.n_periods} tensor "
        f"(total {tensor.total():g}) -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_decompose(args) -> int:
    tensor, _ = read_tensor_json(_read_file(args.tensor))
    cfg = AlsConfig(max_iters=args.max_iters, tol=args.tol)
    factors, residual = rank1_approx(tensor, cfg)
    if args.pretty:
        lines = [
            f"weight    {factors.weight:.9g}",
            f"residual  {residual:.9g}",
            "x (sectors)  " + " ".join(f"{v:.6f}" for v in factors.x),
            "y (agents)   " + " ".join(f"{v:.6f}" for v in factors.y),
            "z (periods)  " + " ".join(f"{v:.6f}" for v in factors.z),
        ]
        data = ("\n".join(lines) + "\n").encode("utf-8")
    else:
        doc = {
            "weight": factors.weight,
            "x": [float(v) for v in factors.x],
            "y": [float(v) for v in factors.y],
            "z": [float(v) for v in factors.z],
            "residual": residual,
        }
        data = (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    _emit(data, args.out)
    return EXIT_OK


def _load_scenario_file(path: str, seed_override: int | None):
    cfg, shocks, schedule = read_scenario(_read_file(path))
    if seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=seed_override)
    return cfg, shocks, schedule


def _cmd_simulate(args) -> int:
    cfg, shocks, schedule = _load_scenario_file(args.scenario, args.seed)
    frames = run(cfg, shocks, schedule)
    _emit(write_indicator_csv(frames), args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    from . import report as report_mod  # defers the matplotlib import

    out_dir = Path(args.out_dir)
    if args.from_csv:
        out_dir.mkdir(parents=True, exist_ok=True)
        png = report_mod.report_from_csv(
            _read_file(args.from_csv), out_dir / "indicators.png", args.title
        )
        print(f"wrote {png}", file=sys.stderr)
        return EXIT_OK
    cfg, shocks, schedule = _load_scenario_file(args.scenario, args.seed)
    frames = run(cfg, shocks, schedule)
    title = args.title or Path(args.scenario).stem
    csv_path, png_path = report_mod.write_report(frames, out_dir, title)
    print(f"wrote {csv_path} and {png_path}", file=sys.stderr)
    return EXIT_OK


def _cmd_serve(args) -> int:
    print(
        f"serving policy sandbox on http://{args.host}:{args.port}",
        file=sys.stderr,
    )
    api_server.serve(
        host=args.host,
        port=args.port,
        allow_origin=args.allow_origin,
        max_sessions=args.max_sessions,
    )
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "decompose": _cmd_decompose,
    "simulate": _cmd_simulate,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def run_command(argv) -> int:
    """Dispatch one invocation; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        name = getattr(exc, "filename", None)
        detail = f"{exc.strerror}: {name}" if name else str(exc)
        print(f"i/o error: {detail}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        return EXIT_OK


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
