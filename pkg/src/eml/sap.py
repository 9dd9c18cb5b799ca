"""Self-adaptation procedures acting on simulated node resources.

One built-in procedure per category.  Each has a feasibility predicate and a
deterministic effect; :func:`apply_sap` never mutates its input node.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Callable

from ._keys import camel_keys, snake_keys
from .errors import Infeasible, UnknownSap
from .sim import NodeResources


@dataclass(frozen=True)
class SapSteps:
    power_step_watts: float = 10.0
    clock_step: float = 1.1
    clock_ceiling: float = 1.5
    fan_step_rpm: int = 500
    disk_step_mb: int = 256
    mem_step_mb: int = 256
    bw_step_mbps: int = 100

    @classmethod
    def from_dict(cls, d: dict) -> "SapSteps":
        d = snake_keys(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown SAP step keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return camel_keys(asdict(self))


Predicate = Callable[[NodeResources, int, SapSteps], bool]
Effect = Callable[[NodeResources, int, SapSteps], None]


@dataclass(frozen=True)
class SapProcedure:
    name: str
    category: str
    feasible: Predicate
    effect: Effect


def _reduce_power(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.power_draw_watts = max(n.power_draw_watts - s.power_step_watts, n.power_idle_watts)


def _switch_target(n: NodeResources) -> str:
    return "ups" if n.power_source == "primary" else "primary"


def _can_switch_power(n: NodeResources, sid: int, s: SapSteps) -> bool:
    if _switch_target(n) == "ups":
        return n.ups_available
    return n.primary_available


def _switch_power(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.power_source = _switch_target(n)


def _overclock(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.clock_multiplier = min(round(n.clock_multiplier * s.clock_step, 9), s.clock_ceiling)


def _allocate_core(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.cores_allocated += 1
    n.core_assignments[sid] = n.core_assignments.get(sid, 0) + 1


def _fan_up(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.fan_rpm = min(n.fan_rpm + s.fan_step_rpm, n.fan_rpm_max)


def _disk_up(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.disk_allocated_mb += s.disk_step_mb


def _mem_up(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.mem_allocated_mb += s.mem_step_mb


def _bw_up(n: NodeResources, sid: int, s: SapSteps) -> None:
    n.bw_allocated_mbps += s.bw_step_mbps


def _has_ok_printer(n: NodeResources, sid: int, s: SapSteps) -> bool:
    return any(p.state == "ok" for p in n.printers)


def _switch_printer(n: NodeResources, sid: int, s: SapSteps) -> None:
    target = next(p for p in n.printers if p.state == "ok")
    for p in n.printers:
        p.assigned_services.discard(sid)
    target.assigned_services.add(sid)


CATALOG: dict[str, SapProcedure] = {
    p.name: p
    for p in [
        SapProcedure(
            "ReducePowerConsumption", "Dynamic Power Management",
            lambda n, sid, s: n.power_draw_watts > n.power_idle_watts, _reduce_power,
        ),
        SapProcedure("SwitchPowerSource", "Dynamic Power Supply", _can_switch_power, _switch_power),
        SapProcedure(
            "OverclockCPU", "Dynamic CPU Overclocking",
            lambda n, sid, s: n.clock_multiplier < s.clock_ceiling, _overclock,
        ),
        SapProcedure(
            "AllocateExtraCores", "Dynamic CPU Cores Allocation",
            lambda n, sid, s: n.cores_allocated < n.cores_total, _allocate_core,
        ),
        SapProcedure(
            "IncreaseFanSpeed", "Dynamic Fans Allocation",
            lambda n, sid, s: n.fan_rpm < n.fan_rpm_max, _fan_up,
        ),
        SapProcedure(
            "IncreaseDiskQuota", "Dynamic Disk-Space Allocation",
            lambda n, sid, s: n.disk_total_mb - n.disk_allocated_mb >= s.disk_step_mb, _disk_up,
        ),
        SapProcedure(
            "IncreaseMemory", "Dynamic Memory-Space Allocation",
            lambda n, sid, s: n.mem_total_mb - n.mem_allocated_mb >= s.mem_step_mb, _mem_up,
        ),
        SapProcedure(
            "IncreaseNetBandwidth", "Dynamic Network Bandwidth Allocation",
            lambda n, sid, s: n.bw_total_mbps - n.bw_allocated_mbps >= s.bw_step_mbps, _bw_up,
        ),
        SapProcedure("SwitchPrinter", "Dynamic Printers Allocation", _has_ok_printer, _switch_printer),
    ]
}

CATEGORIES = tuple(p.category for p in CATALOG.values())


def lookup_sap(name: str) -> SapProcedure:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownSap(name) from None


def apply_sap(
    proc: SapProcedure,
    node: NodeResources,
    service_id: int,
    steps: SapSteps = SapSteps(),
) -> NodeResources:
    """Return the node state after running ``proc`` for ``service_id``.

    Raises :class:`Infeasible` when the procedure's predicate fails; the
    input node is left as it was either way.
    """
    if not proc.feasible(node, service_id, steps):
        raise Infeasible(f"{proc.name} on {node.node_id}")
    updated = node.copy()
    proc.effect(updated, service_id, steps)
    return updated
