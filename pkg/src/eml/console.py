"""Administrator console: single-line execution, script runner and REPL."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, TextIO

from .emu import Emu
from .errors import EmlSyntaxError, IoFailure
from .report import pretty_xml
from .syntax import XmlPayload, parse_ack, parse_command, render_ack

Sender = Callable[[str], str]


def run_line(line: str, emu: Emu) -> str:
    """Execute one command line; parse failures become ``error: <code>``."""
    try:
        cmd = parse_command(line)
    except EmlSyntaxError as exc:
        return f"error: {exc.code}"
    return render_ack(emu.dispatch(cmd).ack)


def line_succeeded(output: str) -> bool:
    if output.startswith("error:"):
        return False
    try:
        return parse_ack(output).success
    except EmlSyntaxError:
        return False


@dataclass
class SessionTranscript:
    entries: list[tuple[str, str]] = field(default_factory=list)

    @property
    def outputs(self) -> list[str]:
        return [out for _, out in self.entries]

    @property
    def ok(self) -> bool:
        return all(line_succeeded(out) for out in self.outputs)


def read_script(path) -> list[str]:
    """Command lines of a script, skipping blanks and ``#`` comments."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    lines = []
    for raw in text.split("\n"):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        lines.append(line)
    return lines


def run_lines(lines, send: Sender) -> SessionTranscript:
    transcript = SessionTranscript()
    for line in lines:
        transcript.entries.append((line, send(line)))
    return transcript


def run_script(path, send: Sender | Emu) -> tuple[SessionTranscript, int]:
    """Run every command in ``path``; exit status 0 iff every ack succeeded."""
    if isinstance(send, Emu):
        emu = send
        send = lambda line: run_line(line, emu)  # noqa: E731
    transcript = run_lines(read_script(path), send)
    return transcript, 0 if transcript.ok else 1


def prettify(output: str) -> str:
    """Expand an embedded XML report to indented form for display."""
    if not output.startswith("getInfo-ack:"):
        return output
    try:
        ack = parse_ack(output)
    except EmlSyntaxError:
        return output
    payload = ack.params[1]
    if not isinstance(payload, XmlPayload):
        return output
    return output.replace(payload.text, "\n" + pretty_xml(payload.text) + "\n", 1)


def repl(send: Sender, pretty: bool = False, stdin: TextIO | None = None,
         stdout: TextIO | None = None, prompt: str = "eml> ") -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    interactive = stdin.isatty()
    while True:
        if interactive:
            stdout.write(prompt)
            stdout.flush()
        raw = stdin.readline()
        if not raw:
            return 0
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.strip() in ("exit", "quit"):
            return 0
        out = send(line)
        stdout.write((prettify(out) if pretty else out) + "\n")
        stdout.flush()
