"""Lexing, parsing and canonical rendering of EML commands and acks.

An EML line has the shape ``name: p1, p2, ..., pN``.  Parameters are typed
by a fixed per-command signature; at the Python level they are plain values:

* ``int`` for service IDs and counts (``-1`` is the failure sentinel)
* ``str`` for URLs, WSDLs and IPs
* ``bool`` for the ``True``/``False`` literals
* :class:`PermissionList` for ``tok:allow;tok:deny`` (or ``tok:True`` in acks)
* :class:`SapCall` for ``Name()``
* :class:`XmlPayload` or ``None`` (rendered ``null``) for the getInfo report

Text parameters run verbatim to the next top-level comma.  A text value that
would not survive that rule is written in double quotes with backslash
escapes (``\\"``, ``\\\\``, ``\\n``, ``\\r``, ``\\t``).  A parameter starting
with ``<`` and forming a balanced element is taken whole, commas included, so
an XML report can ride inside an ack.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Any, NamedTuple

from .errors import (
    ArityMismatch,
    EmptyCommandName,
    MalformedPermissionList,
    MalformedQuote,
    MalformedSapCall,
    MalformedXmlPayload,
    MissingColon,
    TypeMismatch,
    UnknownAck,
    UnknownCommand,
)

INT = "int"
TEXT = "text"
BOOL = "bool"
PERMS = "perms"  # tok:allow|deny
GRANTS = "grants"  # tok:True|False
SAP = "sap"
XML = "xml"

COMMAND_SIGNATURES: dict[str, tuple[str, ...]] = {
    "bind": (TEXT, TEXT),
    "unbind": (INT,),
    "update": (INT, TEXT),
    "delete": (INT,),
    "enable": (INT, BOOL),
    "getClients": (INT,),
    "grant": (INT, PERMS),
    "createReplica": (INT, TEXT),
    "getInfo": (INT,),
    "executeSAP": (INT, SAP),
}

# Parameters before the trailing success flag.  grant-ack has no trailing flag.
ACK_SIGNATURES: dict[str, tuple[str, ...]] = {
    "bind-ack": (INT,),
    "unbind-ack": (INT,),
    "update-ack": (INT,),
    "delete-ack": (INT,),
    "enable-ack": (INT,),
    "getClients-ack": (INT, INT),
    "grant-ack": (INT, GRANTS),
    "createReplica-ack": (INT, INT),
    "getInfo-ack": (INT, XML),
    "executeSAP-ack": (INT,),
}

COMMAND_NAMES = frozenset(COMMAND_SIGNATURES)
ACK_NAMES = frozenset(ACK_SIGNATURES)

_INT_RE = re.compile(r"-?[0-9]+")
_PERM_TOKEN = r"[a-z][a-z0-9_]*"
_PERMS_RE = re.compile(rf"{_PERM_TOKEN}:(?:allow|deny)(?:;{_PERM_TOKEN}:(?:allow|deny))*")
_GRANTS_RE = re.compile(rf"{_PERM_TOKEN}:(?:True|False)(?:;{_PERM_TOKEN}:(?:True|False))*")
_SAP_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)\(\)")
PERMISSION_TOKEN_RE = re.compile(_PERM_TOKEN)

# Characters outside the XML 1.0 Char production cannot appear in a report.
_NON_XML_CHAR = re.compile("[^\t\n\r\x20-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r", "t": "\t"}
_UNESCAPES = {v: "\\" + k for k, v in _ESCAPES.items()}


@dataclass(frozen=True)
class PermissionList:
    """Ordered ``(token, value)`` pairs.

    Values are ``"allow"``/``"deny"`` in a grant command and booleans in a
    grant-ack.
    """

    pairs: tuple[tuple[str, Any], ...]

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class SapCall:
    name: str


@dataclass(frozen=True)
class XmlPayload:
    text: str


@dataclass(frozen=True)
class Command:
    name: str
    params: tuple[Any, ...]


@dataclass(frozen=True)
class Ack:
    """One acknowledgment.

    ``params`` excludes the trailing success literal.  For ``grant-ack`` the
    success flag is derived from the per-permission outcomes.
    """

    name: str
    params: tuple[Any, ...]
    success: bool = False

    def __post_init__(self) -> None:
        if self.name == "grant-ack" and len(self.params) == 2:
            perms = self.params[1]
            object.__setattr__(self, "success", all(v is True for _, v in perms))

    @property
    def service_id(self) -> int:
        return self.params[0]


class Token(NamedTuple):
    kind: str  # KEYWORD, PARAM, QUOTED or XML
    value: str


# -- lexing ----------------------------------------------------------------

def tokenize(line: str) -> list[Token]:
    """Split one line into a keyword token followed by parameter tokens."""
    colon = line.find(":")
    if colon < 0:
        raise MissingColon(line)
    head = line[:colon].lstrip()
    if not head.strip():
        raise EmptyCommandName(line)
    if any(c.isspace() for c in head):
        raise MissingColon(line)
    tokens = [Token("KEYWORD", head)]
    rest = line[colon + 1:]
    if rest.strip():
        tokens.extend(_scan_params(rest))
    return tokens


def _skip_ws(s: str, i: int) -> int:
    while i < len(s) and s[i].isspace():
        i += 1
    return i


def _scan_params(s: str) -> list[Token]:
    out: list[Token] = []
    i = 0
    while True:
        i = _skip_ws(s, i)
        if i < len(s) and s[i] == '"':
            value, i = _scan_quoted(s, i)
            i = _skip_ws(s, i)
            if i < len(s) and s[i] != ",":
                raise MalformedQuote(s)
            out.append(Token("QUOTED", value))
        else:
            end = _scan_element(s, i) if i < len(s) and s[i] == "<" else None
            if end is not None:
                out.append(Token("XML", s[i:end]))
                i = _skip_ws(s, end)
            else:
                j = s.find(",", i)
                j = len(s) if j < 0 else j
                out.append(Token("PARAM", s[i:j].strip()))
                i = j
        if i >= len(s):
            return out
        i += 1  # the comma


def _scan_quoted(s: str, i: int) -> tuple[str, int]:
    buf = []
    i += 1
    while i < len(s):
        c = s[i]
        if c == '"':
            return "".join(buf), i + 1
        if c == "\\":
            if i + 1 >= len(s) or s[i + 1] not in _ESCAPES:
                raise MalformedQuote(s)
            buf.append(_ESCAPES[s[i + 1]])
            i += 2
        else:
            buf.append(c)
            i += 1
    raise MalformedQuote(s)


def _scan_element(s: str, i: int) -> int | None:
    """End index of a balanced element starting at ``s[i]``, if it is one.

    Only counts when the element is followed by a comma or the end of line;
    otherwise the caller falls back to plain slicing.
    """
    depth = 0
    opened = False
    pos = i
    while True:
        lt = s.find("<", pos)
        if lt < 0 or (lt > pos and depth == 0 and opened):
            return None
        gt = s.find(">", lt)
        if gt < 0:
            return None
        tag = s[lt + 1:gt]
        pos = gt + 1
        if tag.startswith("/"):
            depth -= 1
        elif tag.startswith(("?", "!")):
            continue
        elif tag.endswith("/"):
            opened = True
        else:
            depth += 1
            opened = True
        if depth < 0:
            return None
        if depth == 0 and opened:
            j = _skip_ws(s, pos)
            if j < len(s) and s[j] != ",":
                return None
            return pos


# -- parsing ---------------------------------------------------------------

def _convert(tok: Token, kind: str) -> Any:
    plain = tok.kind == "PARAM"
    v = tok.value
    if kind == INT:
        if plain and _INT_RE.fullmatch(v):
            return int(v)
        raise TypeMismatch(f"expected integer, got {v!r}")
    if kind == TEXT:
        if plain and not v:
            raise TypeMismatch("missing text parameter")
        if _NON_XML_CHAR.search(v):
            raise TypeMismatch("text contains characters not representable in XML")
        return v
    if kind == BOOL:
        if plain and v in ("True", "False"):
            return v == "True"
        raise TypeMismatch(f"expected True or False, got {v!r}")
    if kind in (PERMS, GRANTS):
        pattern = _PERMS_RE if kind == PERMS else _GRANTS_RE
        if not (plain and pattern.fullmatch(v)):
            raise MalformedPermissionList(v)
        pairs = []
        for item in v.split(";"):
            token, value = item.split(":")
            pairs.append((token, value if kind == PERMS else value == "True"))
        return PermissionList(tuple(pairs))
    if kind == SAP:
        m = _SAP_RE.fullmatch(v) if plain else None
        if m is None:
            raise MalformedSapCall(v)
        return SapCall(m.group(1))
    if kind == XML:
        if plain and v == "null":
            return None
        if tok.kind == "QUOTED" or not v.startswith("<"):
            raise MalformedXmlPayload(v)
        try:
            ET.fromstring(v)
        except ET.ParseError as exc:
            raise MalformedXmlPayload(str(exc)) from None
        return XmlPayload(v)
    raise AssertionError(kind)


def _convert_all(tokens: list[Token], signature: tuple[str, ...]) -> tuple[Any, ...]:
    if len(tokens) != len(signature):
        raise ArityMismatch(f"expected {len(signature)} parameters, got {len(tokens)}")
    return tuple(_convert(t, k) for t, k in zip(tokens, signature))


def parse_command(line: str) -> Command:
    tokens = tokenize(line)
    name = tokens[0].value
    signature = COMMAND_SIGNATURES.get(name)
    if signature is None:
        raise UnknownCommand(name)
    return Command(name, _convert_all(tokens[1:], signature))


def parse_ack(line: str) -> Ack:
    tokens = tokenize(line)
    name = tokens[0].value
    signature = ACK_SIGNATURES.get(name)
    if signature is None:
        raise UnknownAck(name)
    if name == "grant-ack":
        return Ack(name, _convert_all(tokens[1:], signature))
    values = _convert_all(tokens[1:], signature + (BOOL,))
    return Ack(name, values[:-1], values[-1])


# -- rendering -------------------------------------------------------------

def _needs_quotes(s: str) -> bool:
    return (
        not s
        or s != s.strip()
        or s[0] in '"<'
        or "," in s
        or not s.isprintable()
    )


def quote_text(s: str) -> str:
    if not _needs_quotes(s):
        return s
    return '"' + "".join(_UNESCAPES.get(c, c) for c in s) + '"'


def _render(value: Any, kind: str) -> str:
    if kind == INT:
        return str(int(value))
    if kind == BOOL:
        return "True" if value else "False"
    if kind == TEXT:
        return quote_text(value)
    if kind == PERMS:
        return ";".join(f"{t}:{v}" for t, v in value)
    if kind == GRANTS:
        return ";".join(f"{t}:{'True' if v else 'False'}" for t, v in value)
    if kind == SAP:
        return f"{value.name}()"
    if kind == XML:
        if value is None:
            return "null"
        if "\n" in value.text or "\r" in value.text:
            raise ValueError("XML payload must be single-line")
        return value.text
    raise AssertionError(kind)


def _render_line(name: str, values, signature) -> str:
    return f"{name}: " + ", ".join(_render(v, k) for v, k in zip(values, signature))


def render_command(cmd: Command) -> str:
    return _render_line(cmd.name, cmd.params, COMMAND_SIGNATURES[cmd.name])


def render_ack(ack: Ack) -> str:
    signature = ACK_SIGNATURES[ack.name]
    if ack.name == "grant-ack":
        return _render_line(ack.name, ack.params, signature)
    return _render_line(ack.name, ack.params + (ack.success,), signature + (BOOL,))
