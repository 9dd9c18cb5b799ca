"""Deterministic simulated ecosystem: machines, client connections, printers
and a frozen clock."""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field
from datetime import datetime

from ._keys import camel_keys, snake_keys
from .errors import (
    DuplicateNode,
    NoClients,
    ServiceDisabled,
    ServiceUnknown,
    UnknownNode,
    UnknownPrinter,
)

PRINTER_STATES = ("ok", "out_of_ink", "jammed", "busy")
POWER_SOURCES = ("primary", "ups")
DEFAULT_CLOCK = datetime(2011, 12, 7, 20, 15, 21)


@dataclass
class Printer:
    name: str
    state: str = "ok"
    assigned_services: set[int] = field(default_factory=set)

    def __post_init__(self) -> None:
        if self.state not in PRINTER_STATES:
            raise ValueError(f"bad printer state {self.state!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "state": self.state,
            "assignedServices": sorted(self.assigned_services),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Printer":
        return cls(d["name"], d.get("state", "ok"), set(d.get("assignedServices", [])))


@dataclass
class NodeResources:
    node_id: str
    power_draw_watts: float = 300.0
    power_idle_watts: float = 120.0
    power_source: str = "primary"
    primary_available: bool = True
    ups_available: bool = True
    clock_multiplier: float = 1.0
    cores_total: int = 8
    cores_allocated: int = 2
    # per-service extra cores handed out by AllocateExtraCores
    core_assignments: dict[int, int] = field(default_factory=dict)
    fan_rpm: int = 1500
    fan_rpm_max: int = 5000
    disk_total_mb: int = 500_000
    disk_allocated_mb: int = 100_000
    mem_total_mb: int = 16_384
    mem_allocated_mb: int = 4_096
    bw_total_mbps: int = 1000
    bw_allocated_mbps: int = 400
    printers: list[Printer] = field(default_factory=list)

    def copy(self) -> "NodeResources":
        return copy.deepcopy(self)

    def printer(self, name: str) -> Printer:
        for p in self.printers:
            if p.name == name:
                return p
        raise UnknownPrinter(name)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["core_assignments"] = {str(k): v for k, v in sorted(self.core_assignments.items())}
        d["printers"] = [p.to_dict() for p in self.printers]
        return camel_keys(d)

    @classmethod
    def from_dict(cls, d: dict) -> "NodeResources":
        d = snake_keys(d)
        d["core_assignments"] = {int(k): int(v) for k, v in d.get("core_assignments", {}).items()}
        d["printers"] = [Printer.from_dict(p) for p in d.get("printers", [])]
        return cls(**d)


class SimWorld:
    """Nodes keyed by IPv4, live client counts per service, and the clock."""

    def __init__(self, clock: datetime = DEFAULT_CLOCK):
        self.nodes: dict[str, NodeResources] = {}
        self.connections: dict[int, int] = {}
        self.clock = clock

    def add_node(self, ip: str, resources: NodeResources | None = None) -> NodeResources:
        if ip in self.nodes:
            raise DuplicateNode(ip)
        node = resources if resources is not None else NodeResources(ip)
        node.node_id = ip
        self.nodes[ip] = node
        return node

    def node(self, ip: str) -> NodeResources:
        try:
            return self.nodes[ip]
        except KeyError:
            raise UnknownNode(ip) from None

    def client_count(self, service_id: int) -> int:
        return self.connections.get(service_id, 0)

    def connect_client(self, registry, service_id: int) -> int:
        if service_id not in registry:
            raise ServiceUnknown(service_id)
        if not registry.get(service_id).enabled:
            raise ServiceDisabled(service_id)
        self.connections[service_id] = self.client_count(service_id) + 1
        return self.connections[service_id]

    def disconnect_client(self, registry, service_id: int) -> int:
        if service_id not in registry:
            raise ServiceUnknown(service_id)
        count = self.client_count(service_id)
        if count <= 0:
            raise NoClients(service_id)
        if count == 1:
            del self.connections[service_id]
        else:
            self.connections[service_id] = count - 1
        return count - 1

    def forget_service(self, service_id: int) -> None:
        self.connections.pop(service_id, None)

    def set_clock(self, t: datetime) -> None:
        self.clock = t

    def set_printer_state(self, ip: str, printer: str, state: str) -> None:
        if state not in PRINTER_STATES:
            raise ValueError(f"bad printer state {state!r}")
        self.node(ip).printer(printer).state = state

    def to_dict(self) -> dict:
        return {
            "clock": self.clock.isoformat(),
            "connections": {str(k): v for k, v in sorted(self.connections.items())},
            "nodes": [self.nodes[ip].to_dict() for ip in sorted(self.nodes)],
        }
