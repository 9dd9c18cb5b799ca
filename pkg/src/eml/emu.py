"""The Ecosystem Management Unit: applies parsed commands to the registry and
the simulated world, producing exactly one ack per command."""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from datetime import datetime

from .errors import EmlError, Infeasible, UnknownNode, UnknownSap
from .registry import Registry, ServiceRecord, replace_url_host
from .report import build_report, serialize_report
from .sap import SapSteps, apply_sap, lookup_sap
from .syntax import Ack, Command, PermissionList, XmlPayload, parse_command, render_ack
from .sim import SimWorld

DEFAULT_PERMISSIONS = {
    "disk": "Disk Access",
    "process": "Process Spawn",
    "network": "Network Access",
}


@dataclass(frozen=True)
class ExecOutcome:
    ack: Ack
    state_changed: bool


class Emu:
    """Executor over one registry and one simulated world.

    All mutation goes through :meth:`dispatch`, which holds a lock so that
    commands from concurrent callers are applied whole and in a total order.
    """

    def __init__(
        self,
        registry: Registry | None = None,
        world: SimWorld | None = None,
        steps: SapSteps | None = None,
        permissions: dict[str, str] | None = None,
    ):
        self.registry = registry if registry is not None else Registry()
        self.world = world if world is not None else SimWorld()
        self.steps = steps or SapSteps()
        self.permissions = dict(permissions or DEFAULT_PERMISSIONS)
        self._lock = threading.RLock()

    # -- convenience ------------------------------------------------------

    def execute(self, line: str) -> str:
        """Parse, dispatch and render one command line.  Syntax errors raise."""
        return render_ack(self.dispatch(parse_command(line)).ack)

    def connect_client(self, service_id: int) -> int:
        with self._lock:
            return self.world.connect_client(self.registry, service_id)

    def disconnect_client(self, service_id: int) -> int:
        with self._lock:
            return self.world.disconnect_client(self.registry, service_id)

    def set_clock(self, t: datetime) -> None:
        with self._lock:
            self.world.set_clock(t)

    def state(self) -> dict:
        d = self.registry.to_dict()
        d.update(self.world.to_dict())
        return d

    def state_hash(self) -> str:
        blob = json.dumps(self.state(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    # -- dispatch ---------------------------------------------------------

    def dispatch(self, cmd: Command) -> ExecOutcome:
        handler = getattr(self, f"_exec_{cmd.name}")
        with self._lock:
            ack, changed = handler(*cmd.params)
        return ExecOutcome(ack, changed)

    def _find(self, service_id: int) -> ServiceRecord | None:
        if service_id in self.registry:
            return self.registry.get(service_id)
        return None

    def _exec_bind(self, url: str, wsdl: str):
        fail = Ack("bind-ack", (-1,), False)
        if self.registry.find_by_url(url) is not None:
            return fail, False
        try:
            ip = self.registry.resolve_ip(url)
            self.world.node(ip)
        except EmlError:
            return fail, False
        new_id = self.registry.allocate_id()
        self.registry.insert(ServiceRecord(new_id, ip, url, wsdl, host_node=ip))
        return Ack("bind-ack", (new_id,), True), True

    def _exec_unbind(self, service_id: int):
        if self._find(service_id) is None:
            return Ack("unbind-ack", (service_id,), False), False
        self.registry.remove(service_id)
        self.world.forget_service(service_id)
        return Ack("unbind-ack", (service_id,), True), True

    def _exec_update(self, service_id: int, wsdl: str):
        rec = self._find(service_id)
        if rec is None:
            return Ack("update-ack", (service_id,), False), False
        changed = rec.wsdl != wsdl
        rec.wsdl = wsdl
        return Ack("update-ack", (service_id,), True), changed

    def _exec_delete(self, service_id: int):
        rec = self._find(service_id)
        if rec is None or rec.wsdl is None:
            return Ack("delete-ack", (service_id,), False), False
        rec.wsdl = None
        return Ack("delete-ack", (service_id,), True), True

    def _exec_enable(self, service_id: int, flag: bool):
        rec = self._find(service_id)
        if rec is None:
            return Ack("enable-ack", (service_id,), False), False
        changed = rec.enabled != flag
        rec.enabled = flag
        return Ack("enable-ack", (service_id,), True), changed

    def _exec_getClients(self, service_id: int):
        if self._find(service_id) is None:
            return Ack("getClients-ack", (service_id, -1), False), False
        count = self.world.client_count(service_id)
        return Ack("getClients-ack", (service_id, count), True), False

    def _exec_grant(self, service_id: int, perms: PermissionList):
        rec = self._find(service_id)
        if rec is None:
            denied = PermissionList(tuple((t, False) for t, _ in perms))
            return Ack("grant-ack", (service_id, denied)), False
        before = list(rec.permissions)
        results = []
        for token, verb in perms:
            if token not in self.permissions:
                results.append((token, False))
                continue
            if verb == "allow" and token not in rec.permissions:
                rec.permissions.append(token)
            elif verb == "deny" and token in rec.permissions:
                rec.permissions.remove(token)
            results.append((token, True))
        ack = Ack("grant-ack", (service_id, PermissionList(tuple(results))))
        changed = rec.permissions != before
        return ack, changed

    def _exec_createReplica(self, service_id: int, replica_ip: str):
        fail = Ack("createReplica-ack", (service_id, -1), False)
        src = self._find(service_id)
        if src is None or src.wsdl is None or replica_ip not in self.world.nodes:
            return fail, False
        new_id = self.registry.allocate_id()
        self.registry.insert(ServiceRecord(
            id=new_id,
            ip=replica_ip,
            url=replace_url_host(src.url, replica_ip),
            wsdl=src.wsdl,
            enabled=src.enabled,
            is_replica=True,
            permissions=list(src.permissions),
            host_node=replica_ip,
        ))
        return Ack("createReplica-ack", (service_id, new_id), True), True

    def _exec_getInfo(self, service_id: int):
        rec = self._find(service_id)
        if rec is None:
            return Ack("getInfo-ack", (service_id, None), False), False
        report = build_report(rec, self.world.clock, self.permissions)
        return Ack("getInfo-ack", (service_id, XmlPayload(serialize_report(report))), True), False

    def _exec_executeSAP(self, service_id: int, call):
        fail = Ack("executeSAP-ack", (service_id,), False)
        rec = self._find(service_id)
        if rec is None:
            return fail, False
        try:
            proc = lookup_sap(call.name)
            node = self.world.node(rec.host_node)
            updated = apply_sap(proc, node, service_id, self.steps)
        except (UnknownSap, UnknownNode, Infeasible):
            return fail, False
        self.world.nodes[rec.host_node] = updated
        return Ack("executeSAP-ack", (service_id,), True), updated != node
