"""The discovery registry: service records, ID allocation and host lookup."""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from typing import Iterator

from .errors import DuplicateId, NotFound, UnknownHost


@dataclass
class ServiceRecord:
    id: int
    ip: str
    url: str
    wsdl: str | None
    enabled: bool = False
    is_replica: bool = False
    # insertion-ordered, no duplicates
    permissions: list[str] = field(default_factory=list)
    host_node: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "ip": self.ip,
            "url": self.url,
            "wsdl": self.wsdl,
            "enabled": self.enabled,
            "isReplica": self.is_replica,
            "permissions": list(self.permissions),
            "hostNode": self.host_node,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ServiceRecord":
        return cls(
            id=int(d["id"]),
            ip=str(d["ip"]),
            url=str(d["url"]),
            wsdl=d.get("wsdl"),
            enabled=bool(d.get("enabled", False)),
            is_replica=bool(d.get("isReplica", False)),
            permissions=list(d.get("permissions", [])),
            host_node=str(d.get("hostNode") or d["ip"]),
        )


@dataclass
class IdAllocator:
    next_id: int = 1

    def allocate(self, taken=()) -> int:
        """Return the next ID and advance.

        IDs in ``taken`` (live records loaded from a bootstrap file) are
        skipped so a seeded allocator never collides with them.
        """
        while self.next_id in taken:
            self.next_id += 1
        value = self.next_id
        self.next_id += 1
        return value


def url_host(url: str) -> str:
    rest = url.split("://", 1)[1] if "://" in url else url
    return rest.split("/", 1)[0]


def replace_url_host(url: str, host: str) -> str:
    scheme, sep, rest = url.partition("://") if "://" in url else ("", "", url)
    _, slash, path = rest.partition("/")
    return f"{scheme}{sep}{host}{slash}{path}"


def is_ipv4(text: str) -> bool:
    try:
        ipaddress.IPv4Address(text)
    except ValueError:
        return False
    return True


class Registry:
    """Service records keyed by ID, plus the hostname table used by bind."""

    def __init__(self, next_id: int = 1, host_table: dict[str, str] | None = None):
        self._records: dict[int, ServiceRecord] = {}
        self.allocator = IdAllocator(next_id)
        self.host_table: dict[str, str] = dict(host_table or {})

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[ServiceRecord]:
        return iter(sorted(self._records.values(), key=lambda r: r.id))

    def __contains__(self, service_id: int) -> bool:
        return service_id in self._records

    @property
    def next_id(self) -> int:
        return self.allocator.next_id

    def allocate_id(self) -> int:
        return self.allocator.allocate(self._records)

    def insert(self, rec: ServiceRecord) -> None:
        if rec.id in self._records:
            raise DuplicateId(rec.id)
        self._records[rec.id] = rec

    def upsert(self, rec: ServiceRecord) -> None:
        self._records[rec.id] = rec

    def get(self, service_id: int) -> ServiceRecord:
        try:
            return self._records[service_id]
        except KeyError:
            raise NotFound(service_id) from None

    def remove(self, service_id: int) -> None:
        if self._records.pop(service_id, None) is None:
            raise NotFound(service_id)

    def find_by_url(self, url: str) -> ServiceRecord | None:
        for rec in self._records.values():
            if rec.url == url:
                return rec
        return None

    def resolve_ip(self, url: str) -> str:
        host = url_host(url)
        if is_ipv4(host):
            return host
        try:
            return self.host_table[host]
        except KeyError:
            raise UnknownHost(host) from None

    def to_dict(self) -> dict:
        return {
            "nextId": self.next_id,
            "hostTable": dict(sorted(self.host_table.items())),
            "services": [r.to_dict() for r in self],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Registry):
            return NotImplemented
        return self.to_dict() == other.to_dict()
