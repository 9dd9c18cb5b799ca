"""The getInfo XML report: build, serialize, parse back and validate.

The validator enforces the fixed content model shipped in ``data/report.dtd``
directly instead of going through a general DTD engine.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime
from importlib import resources

from .errors import EmlError, NotWellFormed

REPORT_VERSION = "1.0"
CHILD_ORDER = (
    "serviceID",
    "serviceIP",
    "serviceWSDL",
    "isEnabled",
    "isReplica",
    "grantedPermissions",
    "stamp",
    "version",
)
BOOLEAN_ELEMENTS = ("isEnabled", "isReplica")

_STAMP_RE = re.compile(r"(\d{1,2})/(\d{1,2})/(\d{4}) (\d{2}):(\d{2}):(\d{2})(AM|PM)")


def report_dtd() -> str:
    return resources.files("eml").joinpath("data/report.dtd").read_text()


def format_stamp(t: datetime) -> str:
    """``M/D/YYYY hh:mm:ssAM`` with a 12-hour clock, e.g. ``12/7/2011 08:15:21PM``."""
    hour = t.hour % 12 or 12
    suffix = "AM" if t.hour < 12 else "PM"
    return f"{t.month}/{t.day}/{t.year} {hour:02d}:{t.minute:02d}:{t.second:02d}{suffix}"


def parse_stamp(text: str) -> datetime:
    m = _STAMP_RE.fullmatch(text)
    if m is None:
        raise ValueError(f"bad stamp {text!r}")
    month, day, year, hour, minute, second = (int(g) for g in m.groups()[:6])
    if not 1 <= hour <= 12:
        raise ValueError(f"bad stamp hour {text!r}")
    hour = hour % 12 + (12 if m.group(7) == "PM" else 0)
    return datetime(year, month, day, hour, minute, second)


@dataclass(frozen=True)
class Report:
    service_id: int
    service_ip: str
    service_wsdl: str
    is_enabled: bool
    is_replica: bool
    granted_permissions: tuple[str, ...]
    stamp: datetime
    version: str = REPORT_VERSION


@dataclass(frozen=True)
class Violation:
    kind: str  # order, missing, duplicate, unknown-element, attribute, content, boolean, root
    element: str
    message: str


class ReportInvalid(EmlError):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = violations


def build_report(rec, now: datetime, display_names: dict[str, str]) -> Report:
    return Report(
        service_id=rec.id,
        service_ip=rec.ip,
        service_wsdl=rec.wsdl or "",
        is_enabled=rec.enabled,
        is_replica=rec.is_replica,
        granted_permissions=tuple(display_names.get(p, p) for p in rec.permissions),
        stamp=now.replace(microsecond=0),
    )


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace("\r", "&#13;")
        .replace("\n", "&#10;")
    )


def serialize_report(r: Report, pretty: bool = False) -> str:
    def leaf(tag: str, text: str) -> str:
        return f"<{tag}>{_escape(text)}</{tag}>"

    perms = [leaf("permission", p) for p in r.granted_permissions]
    children = [
        leaf("serviceID", str(r.service_id)),
        leaf("serviceIP", r.service_ip),
        leaf("serviceWSDL", r.service_wsdl),
        leaf("isEnabled", "True" if r.is_enabled else "False"),
        leaf("isReplica", "True" if r.is_replica else "False"),
        None,
        leaf("stamp", format_stamp(r.stamp)),
        leaf("version", r.version),
    ]
    if not pretty:
        children[5] = "<grantedPermissions>" + "".join(perms) + "</grantedPermissions>"
        return "<report>" + "".join(children) + "</report>"
    if perms:
        children[5] = "\n".join(
            ["<grantedPermissions>"] + ["  " + p for p in perms] + ["</grantedPermissions>"]
        )
    else:
        children[5] = "<grantedPermissions></grantedPermissions>"
    body = "\n".join("  " + line for c in children for line in c.split("\n"))
    return f"<report>\n{body}\n</report>"


def pretty_xml(single_line: str) -> str:
    """Re-indent a single-line report; returns the input if it is not one."""
    try:
        return serialize_report(parse_report(single_line), pretty=True)
    except (EmlError, ValueError):
        return single_line


def _parse(doc: str) -> ET.Element:
    try:
        return ET.fromstring(doc)
    except ET.ParseError as exc:
        raise NotWellFormed(str(exc)) from None


def _blank(text: str | None) -> bool:
    return text is None or not text.strip()


def _check_leaf(el: ET.Element, out: list[Violation]) -> None:
    if el.attrib:
        out.append(Violation("attribute", el.tag, f"<{el.tag}> carries attributes"))
    for child in el:
        out.append(Violation("content", el.tag, f"<{el.tag}> must hold text only, found <{child.tag}>"))


def validate_report(doc: str) -> list[Violation]:
    """Return every content-model violation in ``doc`` (empty when valid).

    Raises :class:`NotWellFormed` if ``doc`` is not XML at all.
    """
    root = _parse(doc)
    out: list[Violation] = []
    if root.tag != "report":
        return [Violation("root", root.tag, f"root element must be <report>, found <{root.tag}>")]
    if root.attrib:
        out.append(Violation("attribute", "report", "<report> carries attributes"))
    if not _blank(root.text):
        out.append(Violation("content", "report", "text directly inside <report>"))

    seen: list[str] = []
    for child in root:
        if not _blank(child.tail):
            out.append(Violation("content", "report", f"text after <{child.tag}>"))
        if child.tag not in CHILD_ORDER:
            out.append(Violation("unknown-element", child.tag, f"unexpected element <{child.tag}>"))
            continue
        if child.tag in seen:
            out.append(Violation("duplicate", child.tag, f"<{child.tag}> appears more than once"))
            continue
        seen.append(child.tag)
        if child.tag == "grantedPermissions":
            _check_permissions(child, out)
        else:
            _check_leaf(child, out)
            if child.tag in BOOLEAN_ELEMENTS and child.text not in ("True", "False"):
                out.append(Violation(
                    "boolean", child.tag, f"<{child.tag}> must be True or False, found {child.text!r}"
                ))

    for tag in CHILD_ORDER:
        if tag not in seen:
            out.append(Violation("missing", tag, f"required element <{tag}> is missing"))
    expected = [t for t in CHILD_ORDER if t in seen]
    if seen != expected:
        out.append(Violation("order", "report", f"children out of order: {', '.join(seen)}"))
    return out


def _check_permissions(el: ET.Element, out: list[Violation]) -> None:
    if el.attrib:
        out.append(Violation("attribute", el.tag, "<grantedPermissions> carries attributes"))
    if not _blank(el.text):
        out.append(Violation("content", el.tag, "text directly inside <grantedPermissions>"))
    for child in el:
        if not _blank(child.tail):
            out.append(Violation("content", el.tag, f"text after <{child.tag}>"))
        if child.tag != "permission":
            out.append(Violation("unknown-element", child.tag, f"unexpected element <{child.tag}>"))
        else:
            _check_leaf(child, out)


def parse_report(doc: str) -> Report:
    violations = validate_report(doc)
    if violations:
        raise ReportInvalid(violations)
    root = _parse(doc)

    def text(tag: str) -> str:
        return root.find(tag).text or ""

    return Report(
        service_id=int(text("serviceID")),
        service_ip=text("serviceIP"),
        service_wsdl=text("serviceWSDL"),
        is_enabled=text("isEnabled") == "True",
        is_replica=text("isReplica") == "True",
        granted_permissions=tuple(p.text or "" for p in root.find("grantedPermissions")),
        stamp=parse_stamp(text("stamp")),
        version=text("version"),
    )
