import json
import socket
import threading
import time

import numpy as np
import pytest

from velopad.service import PadServer
from velopad.session import SessionConfig

FAST = {
    "rows": 8,
    "cols": 8,
    "frames_n": 2,
    "frame_period_s": 0.01,
    "mechanisms": [],
    "noise_sigma_v": 0.0,
    "seed": 7,
}


class Client:
    def __init__(self, port: int):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=10)
        self.sock.settimeout(10)
        self.file = self.sock.makefile("rwb")

    def send(self, msg_type: str, payload: dict) -> None:
        self.file.write((json.dumps({"type": msg_type, "payload": payload}) + "\n").encode())
        self.file.flush()

    def recv(self) -> dict:
        line = self.file.readline()
        if not line:
            raise ConnectionError("server closed")
        return json.loads(line)

    def recv_until(self, predicate, deadline_s: float = 15.0) -> dict:
        end = time.monotonic() + deadline_s
        while time.monotonic() < end:
            msg = self.recv()
            if predicate(msg):
                return msg
        raise TimeoutError("no matching message")

    def close(self) -> None:
        try:
            self.file.close()
        finally:
            self.sock.close()


@pytest.fixture
def server():
    config = SessionConfig().apply_delta(FAST)
    srv = PadServer(("127.0.0.1", 0), config)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv.server_address[1]
    srv.shutdown()
    srv.server_close()


def stage_frame(msg, stage):
    return msg["type"] == "frame" and msg["payload"]["stage"] == stage


class TestService:
    def test_config_echo_on_connect(self, server):
        client = Client(server)
        msg = client.recv()
        assert msg["type"] == "config"
        assert msg["payload"]["rows"] == 8
        client.close()

    def test_clear_yields_all_zero_binary(self, server):
        client = Client(server)
        client.recv()
        client.send("clear", {})
        msg = client.recv_until(lambda m: stage_frame(m, "binary"))
        assert all(v == 0.0 for v in msg["payload"]["values"])
        client.close()

    def test_stroke_shows_up_in_raw_stage(self, server):
        client = Client(server)
        client.recv()
        client.send(
            "stroke",
            {"events": [{"x": 0.012, "y": 0.012, "force": 5.0, "t": 0.0}]},
        )
        # Wait for a capture taken after the stroke was applied.
        deadline = time.monotonic() + 15
        while time.monotonic() < deadline:
            msg = client.recv_until(lambda m: stage_frame(m, "sum"))
            values = np.asarray(msg["payload"]["values"]).reshape(8, 8)
            if values.max() > 0:
                break
        assert values.max() > 0
        row, col = np.unravel_index(values.argmax(), values.shape)
        assert (row, col) == (4, 4)  # 12 mm / 3 mm pitch
        client.close()

    def test_sessions_isolated(self, server):
        a = Client(server)
        b = Client(server)
        a.recv(), b.recv()
        a.send("stroke", {"events": [{"x": 0.012, "y": 0.012, "force": 5.0, "t": 0.0}]})
        a.recv_until(
            lambda m: stage_frame(m, "sum") and max(m["payload"]["values"]) > 0
        )
        # B keeps reading all-zero sums even after A's stroke landed.
        msg = b.recv_until(lambda m: stage_frame(m, "sum"))
        assert max(msg["payload"]["values"]) == 0.0
        a.close(), b.close()

    def test_malformed_message_keeps_connection(self, server):
        client = Client(server)
        client.recv()
        client.file.write(b"this is not json\n")
        client.file.flush()
        msg = client.recv_until(lambda m: m["type"] == "error")
        assert "message" in msg["payload"]
        client.send("stroke", {"events": []})  # still alive
        client.recv_until(lambda m: m["type"] == "frame")
        client.close()

    def test_unknown_type_rejected(self, server):
        client = Client(server)
        client.recv()
        client.send("teleport", {})
        msg = client.recv_until(lambda m: m["type"] == "error")
        assert "unknown message type" in msg["payload"]["message"]
        client.close()

    def test_capture_ids_monotone_no_gaps(self, server):
        client = Client(server)
        client.recv()
        ids = []
        while len(ids) < 4:
            msg = client.recv_until(lambda m: stage_frame(m, "binary"))
            ids.append(msg["payload"]["capture_id"])
        assert ids == list(range(ids[0], ids[0] + 4))
        client.close()

    def test_zero_blur_makes_blur_equal_sn(self, server):
        client = Client(server)
        client.recv()
        client.send("config", {"blur_sigma": 0.0})
        client.recv_until(lambda m: m["type"] == "config" and m["payload"]["blur_sigma"] == 0.0)
        client.send(
            "stroke",
            {"events": [{"x": 0.009, "y": 0.015, "force": 4.0, "t": 0.0}]},
        )
        deadline = time.monotonic() + 15
        sn, blur = None, None
        while time.monotonic() < deadline:
            msg = client.recv_until(lambda m: m["type"] == "frame")
            payload = msg["payload"]
            if payload["stage"] == "sn" and max(payload["values"]) > 0:
                sn = payload
            if payload["stage"] == "blur" and sn and payload["capture_id"] == sn["capture_id"]:
                blur = payload
                break
        assert blur is not None
        assert blur["values"] == sn["values"]
        client.close()

    def test_mechanisms_off_crosstalk_indicator_zero(self, server):
        client = Client(server)
        client.recv()
        client.send(
            "stroke",
            {"events": [{"x": 0.012, "y": 0.012, "force": 5.0, "t": 0.0}]},
        )
        msg = client.recv_until(
            lambda m: m["type"] == "report" and m["payload"]["crosstalk"] is not None
        )
        assert msg["payload"]["crosstalk"] == 0.0
        assert msg["payload"]["stimulated"] == [4, 4]
        client.close()

    def test_mechanisms_on_crosstalk_indicator_positive(self, server):
        client = Client(server)
        client.recv()
        client.send("config", {"mechanisms": ["sheet_paths", "finite_off", "diffusion"]})
        client.recv_until(lambda m: m["type"] == "config")
        client.send(
            "stroke",
            {"events": [{"x": 0.012, "y": 0.012, "force": 5.0, "t": 0.0}]},
        )
        msg = client.recv_until(
            lambda m: m["type"] == "report"
            and m["payload"]["crosstalk"] is not None
            and m["payload"]["crosstalk"] > 0
        )
        assert msg["payload"]["crosstalk"] > 0.0
        client.close()

    def test_invalid_config_key_answered_with_error(self, server):
        client = Client(server)
        client.recv()
        client.send("config", {"warp_factor": 9})
        msg = client.recv_until(lambda m: m["type"] == "error")
        assert "unknown config key" in msg["payload"]["message"]
        client.close()
