"""Interactive pad session service over newline-delimited JSON.

One TCP connection owns one simulated pad session. Messages are JSON
objects, one per line, with a ``type`` and a ``payload``:

client to server:
    {"type": "stroke", "payload": {"events": [{"x", "y", "force", "t"}]}}
    {"type": "clear",  "payload": {}}
    {"type": "config", "payload": {<flat SessionConfig keys>}}

server to client:
    {"type": "config", "payload": {<full config echo>}}   on connect and after changes
    {"type": "frame",  "payload": {"capture_id", "timestamp", "stage",
                                   "rows", "cols", "values"}}
    {"type": "report", "payload": {"capture_id", "crosstalk", "stimulated"}}
    {"type": "error",  "payload": {"message"}}

Strokes and config changes are applied in arrival order. The emitter sends
every pipeline stage for each capture at the configured cadence; malformed
messages get an error reply and the connection stays up.
"""

from __future__ import annotations

import json
import socketserver
import threading

from .geometry import StrokeEvent
from .session import CaptureResult, PadSession, SessionConfig

MESSAGE_TYPES = ("stroke", "clear", "config", "frame", "report", "error")
STAGE_ORDER = ("sum", "sn", "blur", "binary")


def _frame_payloads(result: CaptureResult) -> list[dict]:
    staged = result.staged
    frames = {
        "sum": staged.raw,
        "sn": staged.squared_normalized,
        "blur": staged.blurred,
        "binary": staged.binary,
    }
    payloads = []
    for stage in STAGE_ORDER:
        f = frames[stage]
        rows, cols = f.shape
        payloads.append(
            {
                "capture_id": result.capture_id,
                "timestamp": result.timestamp,
                "stage": stage,
                "rows": rows,
                "cols": cols,
                "values": f.values.reshape(-1).tolist(),
            }
        )
    return payloads


class _SessionHandler(socketserver.StreamRequestHandler):
    def setup(self) -> None:
        super().setup()
        self.session = PadSession(self.server.session_config)  # type: ignore[attr-defined]
        self.session_lock = threading.Lock()
        self.write_lock = threading.Lock()
        self.closing = threading.Event()

    def send(self, msg_type: str, payload: dict) -> None:
        line = json.dumps({"type": msg_type, "payload": payload}) + "\n"
        with self.write_lock:
            self.wfile.write(line.encode("utf-8"))
            self.wfile.flush()

    def _emitter(self) -> None:
        while not self.closing.is_set():
            with self.session_lock:
                period = self.session.config.readout.capture_period
                try:
                    result = self.session.capture()
                except Exception as exc:  # keep the session alive
                    try:
                        self.send("error", {"message": f"capture failed: {exc}"})
                    except OSError:
                        return
                    self.closing.wait(1.0)
                    continue
            try:
                for payload in _frame_payloads(result):
                    self.send("frame", payload)
                self.send(
                    "report",
                    {
                        "capture_id": result.capture_id,
                        "crosstalk": result.crosstalk,
                        "stimulated": list(result.stimulated) if result.stimulated else None,
                    },
                )
            except OSError:
                return
            self.closing.wait(period)

    def _handle_message(self, msg: dict) -> None:
        msg_type = msg.get("type")
        payload = msg.get("payload", {})
        if msg_type == "stroke":
            events = []
            for item in payload.get("events", []):
                events.append(
                    StrokeEvent(
                        x=float(item["x"]),
                        y=float(item["y"]),
                        force=float(item["force"]),
                        timestamp=float(item.get("t", 0.0)),
                    )
                )
            with self.session_lock:
                self.session.add_strokes(events)
        elif msg_type == "clear":
            with self.session_lock:
                self.session.clear()
        elif msg_type == "config":
            with self.session_lock:
                echo = self.session.set_config(dict(payload))
            self.send("config", echo)
        else:
            raise ValueError(f"unknown message type: {msg_type!r}")

    def handle(self) -> None:
        self.send("config", self.session.config.to_dict())
        emitter = threading.Thread(target=self._emitter, daemon=True)
        emitter.start()
        try:
            for raw in self.rfile:
                line = raw.strip()
                if not line:
                    continue
                try:
                    msg = json.loads(line)
                    if not isinstance(msg, dict):
                        raise ValueError("message must be a JSON object")
                    self._handle_message(msg)
                except (ValueError, KeyError, TypeError) as exc:
                    self.send("error", {"message": str(exc)})
        except (OSError, ConnectionError):
            pass
        finally:
            self.closing.set()
            emitter.join(timeout=5.0)


class PadServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], config: SessionConfig) -> None:
        super().__init__(address, _SessionHandler)
        self.session_config = config


def serve(config: SessionConfig, host: str, port: int) -> None:
    """Run the session service until interrupted; prints the bound address."""
    with PadServer((host, port), config) as server:
        bound_host, bound_port = server.server_address[:2]
        print(f"listening on {bound_host}:{bound_port}", flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
