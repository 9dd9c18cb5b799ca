"""Line protocol over TCP.

Each inbound line is one EML command; the server answers with exactly one
LF-terminated line (an ack or ``error: <code>``).  No greeting, no framing.
Lines from all connections go through a single consumer queue, so commands
are applied whole and in one total order.
"""

from __future__ import annotations

import asyncio
import logging
import signal
import socket
import threading

from .console import run_line
from .emu import Emu
from .errors import BindFailure, ConnectFailure

log = logging.getLogger(__name__)

MAX_LINE = 1 << 20


def parse_address(addr: str, default_host: str = "127.0.0.1") -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep:
        host, port = default_host, addr
    host = host.strip("[]") or default_host
    try:
        return host, int(port)
    except ValueError:
        raise ValueError(f"bad address {addr!r}, expected host:port") from None


class EmuServer:
    def __init__(self, emu: Emu, host: str = "127.0.0.1", port: int = 0, on_shutdown=None):
        self.emu = emu
        self.host = host
        self.port = port
        self.on_shutdown = on_shutdown
        self._loop: asyncio.AbstractEventLoop | None = None
        self._server: asyncio.base_events.Server | None = None
        self._queue: asyncio.Queue | None = None
        self._stopped: asyncio.Event | None = None
        self._thread: threading.Thread | None = None
        self._ready = threading.Event()
        self._startup_error: BaseException | None = None
        self._handlers: set[asyncio.Task] = set()

    @property
    def address(self) -> tuple[str, int]:
        return self.host, self.port

    async def _consume(self) -> None:
        while True:
            line, fut = await self._queue.get()
            try:
                result = run_line(line, self.emu)
            except Exception as exc:  # keep serving other clients
                log.exception("command failed: %r", line)
                result = f"error: {type(exc).__name__}"
            if not fut.cancelled():
                fut.set_result(result)

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        peer = writer.get_extra_info("peername")
        task = asyncio.current_task()
        self._handlers.add(task)
        log.info("connection from %s", peer)
        try:
            while True:
                try:
                    raw = await reader.readline()
                except (asyncio.LimitOverrunError, ValueError):
                    log.warning("line too long from %s", peer)
                    break
                if not raw:
                    break
                if not raw.endswith(b"\n"):
                    break  # partial line at EOF
                try:
                    line = raw.decode("utf-8").rstrip("\r\n")
                except UnicodeDecodeError:
                    out = "error: InvalidUtf8"
                else:
                    fut = asyncio.get_running_loop().create_future()
                    await self._queue.put((line, fut))
                    out = await fut
                writer.write(out.encode("utf-8") + b"\n")
                await writer.drain()
        except (ConnectionError, OSError) as exc:
            log.info("connection %s dropped: %s", peer, exc)
        finally:
            self._handlers.discard(task)
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionError, OSError, asyncio.CancelledError):
                pass

    async def _main(self) -> None:
        self._queue = asyncio.Queue()
        self._stopped = asyncio.Event()
        try:
            self._server = await asyncio.start_server(
                self._handle, self.host, self.port, limit=MAX_LINE
            )
        except OSError as exc:
            self._startup_error = BindFailure(str(exc))
            self._ready.set()
            return
        self.port = self._server.sockets[0].getsockname()[1]
        consumer = asyncio.create_task(self._consume())
        self._ready.set()
        log.info("EMU listening on %s:%d", self.host, self.port)
        try:
            await self._stopped.wait()
        finally:
            self._server.close()
            await asyncio.sleep(0)  # let in-flight accepts spawn their handlers
            while self._handlers:
                handlers = list(self._handlers)
                for task in handlers:
                    task.cancel()
                await asyncio.gather(*handlers, return_exceptions=True)
            await self._server.wait_closed()
            consumer.cancel()
            await asyncio.gather(consumer, return_exceptions=True)
            if self.on_shutdown is not None:
                self.on_shutdown(self.emu)

    def _run(self) -> None:
        self._loop = asyncio.new_event_loop()
        try:
            self._loop.run_until_complete(self._main())
        finally:
            self._loop.close()

    def start(self) -> tuple[str, int]:
        """Serve from a background thread; returns the bound address."""
        self._thread = threading.Thread(target=self._run, name="emu-server", daemon=True)
        self._thread.start()
        self._ready.wait()
        if self._startup_error is not None:
            raise self._startup_error
        return self.address

    def stop(self) -> None:
        if self._loop is not None and self._stopped is not None and not self._loop.is_closed():
            self._loop.call_soon_threadsafe(self._stopped.set)
        if self._thread is not None:
            self._thread.join()

    def serve_forever(self, announce=None) -> None:
        """Block until SIGINT/SIGTERM, then shut down cleanly."""
        self.start()
        if announce is not None:
            announce(self.address)
        done = threading.Event()
        previous = {}
        for sig in (signal.SIGINT, signal.SIGTERM):
            previous[sig] = signal.signal(sig, lambda *_: done.set())
        try:
            while not done.wait(0.5):
                if not self._thread.is_alive():
                    break
        finally:
            for sig, handler in previous.items():
                signal.signal(sig, handler)
            self.stop()


class RemoteEmu:
    """Blocking client: one line out, one line back."""

    def __init__(self, host: str, port: int, timeout: float | None = 30.0):
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise ConnectFailure(f"{host}:{port}: {exc}") from exc
        self._file = self._sock.makefile("rwb")

    def send(self, line: str) -> str:
        if "\n" in line:
            raise ValueError("one command per line")
        try:
            self._file.write(line.encode("utf-8") + b"\n")
            self._file.flush()
            raw = self._file.readline()
        except OSError as exc:
            raise ConnectionError(f"connection lost: {exc}") from exc
        if not raw.endswith(b"\n"):
            raise ConnectionError("server closed the connection")
        return raw.decode("utf-8").rstrip("\r\n")

    __call__ = send

    def close(self) -> None:
        try:
            self._file.close()
        finally:
            self._sock.close()

    def __enter__(self) -> "RemoteEmu":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
