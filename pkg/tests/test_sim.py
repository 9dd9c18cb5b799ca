from datetime import datetime

import pytest

from eml.emu import Emu
from eml.errors import DuplicateNode, NoClients, ServiceDisabled, ServiceUnknown, UnknownPrinter
from eml.registry import Registry
from eml.report import format_stamp
from eml.sap import apply_sap, lookup_sap
from eml.sim import NodeResources, Printer, SimWorld
from eml.syntax import parse_ack


def test_add_node():
    w = SimWorld()
    w.add_node("192.168.1.6")
    assert "192.168.1.6" in w.nodes
    with pytest.raises(DuplicateNode):
        w.add_node("192.168.1.6")


def test_added_node_usable_as_replica_target(table1_emu):
    table1_emu.execute("bind: mydomain.info/DICTIONARY, WSDL")
    assert table1_emu.execute("createReplica: 2, 192.168.1.9") == "createReplica-ack: 2, -1, False"
    table1_emu.world.add_node("192.168.1.9")
    assert table1_emu.execute("createReplica: 2, 192.168.1.9") == "createReplica-ack: 2, 3, True"


@pytest.fixture
def bound(table1_emu):
    table1_emu.execute("bind: mydomain.info/DICTIONARY, WSDL")
    return table1_emu


def test_connect_requires_enabled(bound):
    with pytest.raises(ServiceDisabled):
        bound.connect_client(2)
    with pytest.raises(ServiceUnknown):
        bound.connect_client(77)


def test_connect_counts(bound):
    bound.execute("enable: 2, True")
    for _ in range(3):
        bound.connect_client(2)
    assert bound.world.client_count(2) == 3


def test_disconnect_floor(bound):
    with pytest.raises(NoClients):
        bound.disconnect_client(2)


def test_get_clients_tracks_events(bound):
    assert bound.execute("getClients: 2") == "getClients-ack: 2, 0, True"
    bound.execute("enable: 2, True")
    for _ in range(3):
        bound.connect_client(2)
    bound.disconnect_client(2)
    assert bound.execute("getClients: 2") == "getClients-ack: 2, 2, True"


def test_unbind_forgets_connections(bound):
    bound.execute("enable: 2, True")
    bound.connect_client(2)
    bound.execute("unbind: 2")
    assert bound.world.connections == {}


def _stamp_oracle(t: datetime) -> str:
    # independent formatter: strftime for the time, unpadded date by hand
    return f"{t.month}/{t.day}/{t.year} " + t.strftime("%I:%M:%S%p")


@pytest.mark.parametrize(
    "t",
    [
        datetime(2011, 12, 7, 20, 15, 21),
        datetime(2020, 1, 2, 9, 5, 7),
        datetime(1999, 12, 31, 0, 0, 0),
        datetime(2000, 6, 15, 12, 0, 0),
        datetime(2024, 2, 29, 23, 59, 59),
    ],
)
def test_stamp_matches_oracle(t):
    assert format_stamp(t) == _stamp_oracle(t)


def test_stamp_known_values():
    assert format_stamp(datetime(2011, 12, 7, 20, 15, 21)) == "12/7/2011 08:15:21PM"
    assert format_stamp(datetime(2020, 1, 2, 9, 5, 7)) == "1/2/2020 09:05:07AM"


def test_set_clock_drives_report(bound):
    bound.set_clock(datetime(2020, 1, 2, 9, 5, 7))
    assert "<stamp>1/2/2020 09:05:07AM</stamp>" in bound.execute("getInfo: 2")


def test_frozen_clock(bound):
    assert bound.execute("getInfo: 2") == bound.execute("getInfo: 2")


def _printer_world():
    w = SimWorld()
    w.add_node("10.0.0.1", NodeResources("10.0.0.1", printers=[
        Printer("P1", "ok", {5}), Printer("P2", "ok"),
    ]))
    return w


def test_printer_switch_after_out_of_ink():
    w = _printer_world()
    w.set_printer_state("10.0.0.1", "P1", "out_of_ink")
    node = apply_sap(lookup_sap("SwitchPrinter"), w.node("10.0.0.1"), 5)
    assert 5 in node.printer("P2").assigned_services
    assert 5 not in node.printer("P1").assigned_services


def test_unknown_printer():
    with pytest.raises(UnknownPrinter):
        _printer_world().set_printer_state("10.0.0.1", "P9", "jammed")


def test_printer_restored_is_a_target():
    w = _printer_world()
    w.set_printer_state("10.0.0.1", "P1", "jammed")
    w.set_printer_state("10.0.0.1", "P1", "ok")
    node = apply_sap(lookup_sap("SwitchPrinter"), w.node("10.0.0.1"), 5)
    assert node.printer("P1").assigned_services == {5}


def test_node_dict_roundtrip():
    n = NodeResources("10.0.0.1", core_assignments={3: 2}, printers=[Printer("P1", "busy", {1, 2})])
    assert NodeResources.from_dict(n.to_dict()) == n
    assert "bwAllocatedMbps" in n.to_dict()


def test_identical_replays_give_identical_worlds():
    def replay():
        emu = Emu(Registry(host_table={"a.net": "10.0.0.1"}), _printer_world())
        for line in ["bind: a.net/x, W", "enable: 1, True", "executeSAP: 1, IncreaseMemory()",
                     "executeSAP: 1, SwitchPrinter()", "grant: 1, disk:allow"]:
            parse_ack(emu.execute(line))
        emu.connect_client(1)
        return emu.state()

    assert replay() == replay()
