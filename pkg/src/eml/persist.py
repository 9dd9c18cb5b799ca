"""JSON snapshot, world bootstrap and SAP configuration files.

Snapshot / world schema (one JSON object)::

    {
      "version": 1,
      "nextId": 2,
      "hostTable": {"mydomain.info": "192.168.1.6"},
      "services": [{"id", "ip", "url", "wsdl", "enabled", "isReplica",
                    "permissions", "hostNode"}, ...],
      "nodes": [{"nodeId": "192.168.1.6", "bwTotalMbps": 1000, ...}, ...],
      "clock": "2011-12-07T20:15:21",     # optional
      "connections": {"14": 3}            # optional
    }

A world bootstrap file is a snapshot written by hand; omitted node fields
take their defaults.  The config file is ``{"version": 1, "sapSteps": {...},
"permissions": {token: display name}}`` with both sections optional.
"""

from __future__ import annotations

import json
import os
from datetime import datetime
from pathlib import Path

from .emu import DEFAULT_PERMISSIONS, Emu
from .errors import CorruptSnapshot, IoFailure
from .registry import Registry, ServiceRecord
from .sap import SapSteps
from .sim import NodeResources, SimWorld
from .syntax import PERMISSION_TOKEN_RE

SNAPSHOT_VERSION = 1


def state_to_dict(emu: Emu) -> dict:
    return {"version": SNAPSHOT_VERSION, **emu.state()}


def state_from_dict(d: dict, steps: SapSteps | None = None,
                    permissions: dict[str, str] | None = None) -> Emu:
    if not isinstance(d, dict) or d.get("version") != SNAPSHOT_VERSION:
        raise CorruptSnapshot("missing or unsupported snapshot version")
    try:
        registry = Registry(int(d.get("nextId", 1)), d.get("hostTable", {}))
        world = SimWorld()
        if "clock" in d:
            world.clock = datetime.fromisoformat(d["clock"])
        for nd in d.get("nodes", []):
            node = NodeResources.from_dict(nd)
            world.add_node(node.node_id, node)
        for sd in d.get("services", []):
            registry.insert(ServiceRecord.from_dict(sd))
        world.connections = {int(k): int(v) for k, v in d.get("connections", {}).items()}
    except CorruptSnapshot:
        raise
    except Exception as exc:  # noqa: BLE001 - any schema breakage is corruption
        raise CorruptSnapshot(f"{type(exc).__name__}: {exc}") from exc
    if registry.next_id < 1:
        raise CorruptSnapshot("nextId must be >= 1")
    for rec in registry:
        if rec.host_node not in world.nodes:
            raise CorruptSnapshot(f"service {rec.id} references missing node {rec.host_node}")
    return Emu(registry, world, steps, permissions)


def _read_json(path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    try:
        return json.loads(text)
    except ValueError as exc:
        raise CorruptSnapshot(str(exc)) from exc


def save_snapshot(emu: Emu, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(json.dumps(state_to_dict(emu), indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_snapshot(path, steps: SapSteps | None = None,
                  permissions: dict[str, str] | None = None) -> Emu:
    return state_from_dict(_read_json(path), steps, permissions)


def load_config(path) -> tuple[SapSteps, dict[str, str]]:
    d = _read_json(path)
    if not isinstance(d, dict) or d.get("version") != SNAPSHOT_VERSION:
        raise CorruptSnapshot("missing or unsupported config version")
    try:
        steps = SapSteps.from_dict(d.get("sapSteps", {}))
    except (TypeError, ValueError) as exc:
        raise CorruptSnapshot(str(exc)) from exc
    permissions = dict(d.get("permissions", DEFAULT_PERMISSIONS))
    bad = [t for t in permissions if not PERMISSION_TOKEN_RE.fullmatch(t)]
    if bad:
        raise CorruptSnapshot(f"invalid permission tokens: {bad}")
    return steps, permissions
