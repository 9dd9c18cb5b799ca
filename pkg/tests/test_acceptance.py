"""Acceptance criteria AC1-AC8; each test records a PASS/FAIL line for the summary."""

import random
import re
import threading
import time
from contextlib import contextmanager

from eml.cli import eml_main
from eml.console import run_line
from eml.errors import EmlSyntaxError, Infeasible
from eml.persist import load_snapshot
from eml.report import serialize_report, validate_report
from eml.sap import CATALOG, SapSteps, apply_sap
from eml.syntax import parse_ack, parse_command, render_ack, render_command
from eml.wire import EmuServer, RemoteEmu

import gen
from conftest import ACCEPTANCE_RESULTS, make_search_emu, make_table1_emu, make_three_node_emu
from reference import ReferenceEmu
from test_sap import conserved, random_node


@contextmanager
def criterion(label):
    ACCEPTANCE_RESULTS[label] = "FAIL"
    yield
    ACCEPTANCE_RESULTS[label] = "PASS"


TABLE1_SCRIPT = [
    "bind: mydomain.info/DICTIONARY, WSDL",
    "enable: 2, True",
    "grant: 2, disk:allow",
    "getInfo: 2",
]

TABLE1_REPORT = (
    "<report><serviceID>2</serviceID><serviceIP>192.168.1.6</serviceIP>"
    "<serviceWSDL>WSDL</serviceWSDL><isEnabled>True</isEnabled><isReplica>False</isReplica>"
    "<grantedPermissions><permission>Disk Access</permission></grantedPermissions>"
    "<stamp>12/7/2011 08:15:21PM</stamp><version>1.0</version></report>"
)

TABLE1_ACKS = [
    "bind-ack: 2, True",
    "enable-ack: 2, True",
    "grant-ack: 2, disk:True",
    f"getInfo-ack: 2, {TABLE1_REPORT}, True",
]


def test_ac1_table1_transcript():
    with criterion("AC1 DICTIONARY transcript replay (exact, < 1 s)"):
        start = time.perf_counter()
        emu = make_table1_emu()
        acks = [run_line(line, emu) for line in TABLE1_SCRIPT]
        elapsed = time.perf_counter() - start
        assert acks == TABLE1_ACKS
        assert elapsed < 1.0


def test_ac2_sap_replay():
    with criterion("AC2 executeSAP IncreaseNetBandwidth replay (exact, < 1 s)"):
        start = time.perf_counter()
        emu = make_search_emu()
        node = emu.world.node("192.168.1.20")
        assert node.bw_total_mbps - node.bw_allocated_mbps >= SapSteps().bw_step_mbps
        before = node.bw_allocated_mbps
        ack = run_line("executeSAP: 14, IncreaseNetBandwidth()", emu)
        elapsed = time.perf_counter() - start
        assert ack == "executeSAP-ack: 14, True"
        assert emu.world.node("192.168.1.20").bw_allocated_mbps - before == 100
        assert elapsed < 1.0


def test_ac3_sentinels():
    with criterion("AC3 failure sentinels (-1 / null, exact strings)"):
        emu = make_table1_emu()
        assert run_line("bind: nosuch.host/x, WSDL", emu) == "bind-ack: -1, False"
        assert run_line("createReplica: 99, 192.168.1.6", emu) == "createReplica-ack: 99, -1, False"
        assert run_line("getClients: 99", emu) == "getClients-ack: 99, -1, False"
        assert run_line("getInfo: 99", emu) == "getInfo-ack: 99, null, False"


def _loaded_emu():
    emu = make_three_node_emu()
    for line in ["bind: alpha.net/A, W", "bind: beta.net/B, W", "enable: 1, True",
                 "grant: 2, disk:allow", "createReplica: 1, 10.0.0.3"]:
        emu.execute(line)
    return emu


def test_ac4_grammar_properties():
    with criterion("AC4 grammar round-trip x10000 and mutation rejection x1000 (< 30 s)"):
        start = time.perf_counter()
        rng = random.Random(20111207)
        for _ in range(5000):
            cmd = gen.rand_command(rng)
            assert parse_command(render_command(cmd)) == cmd
            ack = gen.rand_ack(rng)
            assert parse_ack(render_ack(ack)) == ack

        emu = _loaded_emu()
        baseline = emu.state_hash()
        for i in range(1000):
            is_ack = i % 2 == 1
            ast = gen.rand_ack(rng) if is_ack else gen.rand_command(rng)
            line = gen.mutate_line(rng, ast, is_ack)
            parser = parse_ack if is_ack else parse_command
            try:
                parser(line)
            except EmlSyntaxError:
                pass
            else:
                raise AssertionError(f"accepted mutated line {line!r}")
            if not is_ack:
                out = run_line(line, emu)
                assert out.startswith("error: "), (line, out)
                assert emu.state_hash() == baseline
        assert time.perf_counter() - start < 30.0


def test_ac5_oracle_equivalence():
    with criterion("AC5 1000 random sequences match the reference interpreter"):
        rng = random.Random(5)
        for _ in range(1000):
            emu = make_three_node_emu()
            ref = ReferenceEmu(1, emu.registry.host_table, list(emu.world.nodes))
            for _ in range(rng.randint(0, 50)):
                cmd = gen.rand_sequence_command(rng, [r.id for r in emu.registry])
                name, sid, ok = ref.run(cmd)
                ack = emu.dispatch(cmd).ack
                assert (ack.name, ack.params[0]) == (name, sid)
                if cmd.name != "executeSAP":
                    assert ack.success == ok, cmd
            assert emu.registry.to_dict() == ref.state()


def test_ac6_resource_conservation():
    with criterion("AC6 10000 SAP applications conserve resources; Infeasible is pure"):
        rng = random.Random(6)
        steps = SapSteps()
        names = sorted(CATALOG)
        applied = infeasible = 0
        while applied + infeasible < 10_000:
            node = random_node(rng)
            assert conserved(node, steps)
            for _ in range(rng.randint(1, 25)):
                before = node.to_dict()
                try:
                    node = apply_sap(CATALOG[rng.choice(names)], node, rng.randint(1, 5), steps)
                    applied += 1
                except Infeasible:
                    infeasible += 1
                    assert node.to_dict() == before
                assert conserved(node, steps)

        # the same purity through the executor, by state hash
        emu = make_search_emu()
        emu.world.node("192.168.1.20").bw_allocated_mbps = 1000
        h = emu.state_hash()
        assert run_line("executeSAP: 14, IncreaseNetBandwidth()", emu) == "executeSAP-ack: 14, False"
        assert emu.state_hash() == h
        assert applied > 0 and infeasible > 0


def _split_children(doc: str) -> list[str]:
    """Top-level child elements of a compact report, as raw text."""
    body = doc[len("<report>"):-len("</report>")]
    out, depth, start = [], 0, 0
    for m in re.finditer(r"<(/?)[^<>]*?(/?)>", body):
        if m.group(1):
            depth -= 1
        elif not m.group(2):
            depth += 1
        if depth == 0:
            out.append(body[start:m.end()])
            start = m.end()
    assert "".join(out) == body
    return out


def _join(children) -> str:
    return "<report>" + "".join(children) + "</report>"


def test_ac7_validator_mutations():
    with criterion("AC7 validator flags every deletion, swap and injection in 100 reports"):
        rng = random.Random(7)
        for _ in range(100):
            doc = serialize_report(gen.rand_report(rng))
            assert validate_report(doc) == []
            kids = _split_children(doc)
            assert len(kids) == 8
            for i in range(len(kids)):
                assert validate_report(_join(kids[:i] + kids[i + 1:])), ("delete", i, doc)
            for i in range(len(kids) - 1):
                swapped = kids[:i] + [kids[i + 1], kids[i]] + kids[i + 2:]
                assert validate_report(_join(swapped)), ("swap", i, doc)
            for i in range(len(kids) + 1):
                tag = rng.choice(["extra", "serviceid", "note", "permission"])
                injected = kids[:i] + [f"<{tag}>x</{tag}>"] + kids[i:]
                assert validate_report(_join(injected)), ("inject", i, doc)
            # an unknown element inside grantedPermissions is also rejected
            gp = kids.index(next(k for k in kids if k.startswith("<grantedPermissions>")))
            inner = kids[gp].replace("<grantedPermissions>", "<grantedPermissions><extra/>", 1)
            assert validate_report(_join(kids[:gp] + [inner] + kids[gp + 1:]))


def test_ac8_wire_transparency(tmp_path, capsys):
    with criterion("AC8 eml run --connect equals local; 8 concurrent clients get their own acks"):
        script = tmp_path / "table1.eml"
        script.write_text("\n".join(TABLE1_SCRIPT) + "\n")

        assert eml_main(["run", str(script)]) == 0
        local = capsys.readouterr().out

        from eml.cli import default_world_path

        server = EmuServer(load_snapshot(default_world_path()))
        host, port = server.start()
        try:
            assert eml_main(["run", str(script), "--connect", f"{host}:{port}"]) == 0
            remote = capsys.readouterr().out
            assert remote == local
            assert remote.splitlines() == TABLE1_ACKS

            # each client binds its own service, then hammers getInfo on it
            results: dict[int, list[tuple[int, str]]] = {}
            barrier = threading.Barrier(8)
            errors = []

            def client(tag):
                try:
                    with RemoteEmu(host, port) as c:
                        bound = c.send(f"bind: 192.168.1.9/client{tag}, WSDL{tag}")
                        sid = int(bound.split(":")[1].split(",")[0])
                        barrier.wait()
                        results[tag] = [(sid, c.send(f"getInfo: {sid}")) for _ in range(50)]
                except Exception as exc:  # surface in the main thread
                    errors.append(exc)

            threads = [threading.Thread(target=client, args=(t,)) for t in range(8)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert not errors
            assert len({pairs[0][0] for pairs in results.values()}) == 8
            for tag, pairs in results.items():
                for sid, out in pairs:
                    assert out.startswith(f"getInfo-ack: {sid}, <report><serviceID>{sid}</serviceID>")
                    assert f"<serviceWSDL>WSDL{tag}</serviceWSDL>" in out
                    assert out.endswith(", True")
        finally:
            server.stop()
