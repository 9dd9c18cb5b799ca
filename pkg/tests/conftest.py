from datetime import datetime

import pytest

from eml.emu import Emu
from eml.registry import Registry, ServiceRecord
from eml.sim import NodeResources, SimWorld

TABLE1_CLOCK = datetime(2011, 12, 7, 20, 15, 21)

# criterion label -> "PASS" / "FAIL", filled by test_acceptance
ACCEPTANCE_RESULTS: dict[str, str] = {}


def make_table1_emu() -> Emu:
    """Node 192.168.1.6 for mydomain.info, next ID 2, clock frozen at the report stamp."""
    registry = Registry(next_id=2, host_table={"mydomain.info": "192.168.1.6"})
    world = SimWorld(clock=TABLE1_CLOCK)
    world.add_node("192.168.1.6")
    return Emu(registry, world)


def make_three_node_emu() -> Emu:
    registry = Registry(
        next_id=1,
        host_table={"alpha.net": "10.0.0.1", "beta.net": "10.0.0.2", "gamma.net": "10.0.0.3"},
    )
    world = SimWorld(clock=TABLE1_CLOCK)
    for ip in ("10.0.0.1", "10.0.0.2", "10.0.0.3"):
        world.add_node(ip)
    return Emu(registry, world)


def make_search_emu() -> Emu:
    """Service 14 (SEARCH) on a node with 600 Mbps of bandwidth headroom."""
    registry = Registry(next_id=15, host_table={"elearning.edu": "192.168.1.20"})
    world = SimWorld(clock=TABLE1_CLOCK)
    world.add_node("192.168.1.20", NodeResources("192.168.1.20", bw_total_mbps=1000, bw_allocated_mbps=400))
    registry.insert(ServiceRecord(14, "192.168.1.20", "elearning.edu/SEARCH", "SEARCH-WSDL",
                                  enabled=True, host_node="192.168.1.20"))
    return Emu(registry, world)


@pytest.fixture
def table1_emu() -> Emu:
    return make_table1_emu()


@pytest.fixture
def three_node_emu() -> Emu:
    return make_three_node_emu()


@pytest.fixture
def search_emu() -> Emu:
    return make_search_emu()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in sorted(ACCEPTANCE_RESULTS.items(), key=lambda kv: int(kv[0].split()[0][2:])):
        terminalreporter.write_line(f"{status}  {label}")
