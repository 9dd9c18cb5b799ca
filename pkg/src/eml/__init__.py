"""Ecosystem Management Language: command grammar, management unit, XML
service reports, self-adaptation procedures, console and TCP line protocol."""

from .emu import Emu, ExecOutcome
from .errors import EmlError, EmlSyntaxError
from .persist import load_config, load_snapshot, save_snapshot
from .registry import Registry, ServiceRecord
from .report import Report, build_report, parse_report, serialize_report, validate_report
from .sap import CATALOG, SapSteps, apply_sap, lookup_sap
from .sim import NodeResources, Printer, SimWorld
from .syntax import (
    Ack,
    Command,
    PermissionList,
    SapCall,
    XmlPayload,
    parse_ack,
    parse_command,
    render_ack,
    render_command,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Ack", "CATALOG", "Command", "EmlError", "EmlSyntaxError", "Emu", "ExecOutcome",
    "NodeResources", "PermissionList", "Printer", "Registry", "Report", "SapCall",
    "SapSteps", "ServiceRecord", "SimWorld", "XmlPayload", "apply_sap", "build_report",
    "load_config", "load_snapshot", "lookup_sap", "parse_ack", "parse_command",
    "parse_report", "render_ack", "render_command", "save_snapshot", "serialize_report",
    "tokenize", "validate_report",
]
