"""Command-line entry points.

    emu serve --listen <addr> --world <file> --snapshot <file> [--seed-id <n>]
    eml repl  [--connect <addr>] [--pretty]
    eml run   <script> [--connect <addr>]

Without ``--connect`` the console runs an in-process EMU built from
``--world`` (default: the bundled E-learning world).
"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime
from importlib import resources
from pathlib import Path

from .console import prettify, repl, run_line, run_script
from .emu import Emu
from .errors import EmlError
from .persist import load_config, load_snapshot, save_snapshot
from .wire import EmuServer, RemoteEmu, parse_address

log = logging.getLogger("eml")


def default_world_path() -> Path:
    return Path(str(resources.files("eml").joinpath("data/elearning.json")))


def _add_world_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--world", type=Path, help="world bootstrap JSON (default: bundled E-learning world)")
    p.add_argument("--seed-id", type=int, help="next service ID to allocate")
    p.add_argument("--config", type=Path, help="SAP step / permission table JSON")
    p.add_argument("--clock", type=datetime.fromisoformat,
                   help="frozen clock, ISO format (e.g. 2011-12-07T20:15:21)")


def build_emu(args, snapshot: Path | None = None) -> Emu:
    steps, permissions = load_config(args.config) if args.config else (None, None)
    source = snapshot if snapshot is not None and snapshot.exists() else (args.world or default_world_path())
    emu = load_snapshot(source, steps, permissions)
    if args.seed_id is not None:
        emu.registry.allocator.next_id = args.seed_id
    if args.clock is not None:
        emu.set_clock(args.clock)
    return emu


def _open_backend(args):
    if args.connect:
        client = RemoteEmu(*parse_address(args.connect))
        return client.send, client.close
    emu = build_emu(args)
    return (lambda line: run_line(line, emu)), (lambda: None)


def _cmd_run(args) -> int:
    send, close = _open_backend(args)
    try:
        transcript, status = run_script(args.script, send)
    finally:
        close()
    for out in transcript.outputs:
        print(prettify(out) if args.pretty else out)
    return status


def _cmd_repl(args) -> int:
    send, close = _open_backend(args)
    try:
        return repl(send, pretty=args.pretty)
    finally:
        close()


def eml_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="eml", description="EML administrator console")
    sub = parser.add_subparsers(dest="command", required=True)

    p_repl = sub.add_parser("repl", help="interactive console")
    p_run = sub.add_parser("run", help="execute a script, one command per line")
    p_run.add_argument("script", type=Path)
    for p in (p_repl, p_run):
        p.add_argument("--connect", metavar="ADDR", help="remote EMU host:port")
        p.add_argument("--pretty", action="store_true", help="indent XML reports in output")
        _add_world_options(p)

    args = parser.parse_args(argv)
    handler = _cmd_run if args.command == "run" else _cmd_repl
    try:
        return handler(args)
    except ConnectionError as exc:
        print(f"eml: {exc}", file=sys.stderr)
        return 1
    except EmlError as exc:
        print(f"eml: {exc.code}: {exc}", file=sys.stderr)
        return 1


def emu_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="emu", description="Ecosystem Management Unit server")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("serve", help="serve the EML line protocol over TCP")
    p.add_argument("--listen", default="127.0.0.1:7070", metavar="ADDR")
    p.add_argument("--snapshot", type=Path, help="state file: loaded if present, saved on shutdown")
    p.add_argument("-v", "--verbose", action="store_true")
    _add_world_options(p)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        emu = build_emu(args, args.snapshot)
        host, port = parse_address(args.listen)
        on_shutdown = (lambda e: save_snapshot(e, args.snapshot)) if args.snapshot else None
        server = EmuServer(emu, host, port, on_shutdown=on_shutdown)
        server.serve_forever(
            announce=lambda a: print(f"emu: listening on {a[0]}:{a[1]}", file=sys.stderr, flush=True)
        )
    except EmlError as exc:
        print(f"emu: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"emu: {exc}", file=sys.stderr)
        return 1
    return 0
