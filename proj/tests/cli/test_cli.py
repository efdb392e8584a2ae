"""End-to-end checks of the pcvkit executable.

The binary comes from $PCVKIT (set by ctest).
"""

import base64
import json
import math
import os
import re
import signal
import socket
import struct
import subprocess
import time
from pathlib import Path

import pytest

PCVKIT = os.environ.get("PCVKIT", "pcvkit")


def run(*args, cwd=None, timeout=120):
    return subprocess.run([PCVKIT, *map(str, args)], cwd=cwd, capture_output=True, text=True, timeout=timeout)


def write_config(tmp_path, **sections):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(sections))
    return p


def test_check_kinematics_report(tmp_path):
    r = run("--out", tmp_path, "check-kinematics", "--samples", "500")
    assert r.returncode == 0, r.stderr
    rep = json.loads((tmp_path / "check-kinematics.json").read_text())
    assert rep["pass"] is True
    assert rep["max_round_trip_error"] < 1e-9


def test_bench_odometry_noise_off_closes(tmp_path):
    r = run("--out", tmp_path, "--noise", "off", "bench-odometry", "--shape", "square", "--seeds", "2")
    assert r.returncode == 0, r.stderr
    rep = json.loads((tmp_path / "bench-odometry-square.json").read_text())
    assert rep["all_goals_reached"] is True
    assert rep["mean"]["translation_drift_cm_per_m"] < 1e-7


def test_bench_seed_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run("--out", d, "--seed", "9", "bench-odometry", "--shape", "spin", "--seeds", "1").returncode == 0
    assert (a / "bench-odometry-spin.json").read_text() == (b / "bench-odometry-spin.json").read_text()


def test_compare_drive(tmp_path):
    r = run("--out", tmp_path, "compare-drive", "--goal", "0", "1", "0")
    assert r.returncode == 0, r.stderr
    rep = json.loads((tmp_path / "compare-drive.json").read_text())
    assert rep["holonomic_path_m"] <= 1.05
    assert rep["diff_time_s"] > rep["holonomic_time_s"]


@pytest.mark.parametrize("goal,lo,hi", [((0, 0, 0), 1.0, 1.0), ((1, 0, 0), 0.95, 1.05)])
def test_compare_drive_easy_goals(tmp_path, goal, lo, hi):
    assert run("--out", tmp_path, "compare-drive", "--goal", *goal).returncode == 0
    rep = json.loads((tmp_path / "compare-drive.json").read_text())
    assert lo <= rep["ratio"] <= hi
    if goal == (0, 0, 0):
        assert rep["holonomic_path_m"] == rep["diff_path_m"] == 0.0


@pytest.mark.parametrize("n", [1, 100, 10000])
def test_check_kinematics_sizes(tmp_path, n):
    assert run("--out", tmp_path, "check-kinematics", "--samples", n).returncode == 0


def test_exit_codes(tmp_path):
    assert run("--bogus-flag", "check-kinematics").returncode == 64
    assert run().returncode == 64
    assert run("--noise", "loud", "check-kinematics").returncode == 2
    cfg = write_config(tmp_path, sim={"dt": -1})
    assert run("--config", cfg, "check-kinematics").returncode == 2

    corners = [(0.2, 0.18), (0.2, -0.18), (-0.2, 0.18), (-0.2, -0.18)]
    casters = [{"h": math.hypot(x, y), "beta": math.atan2(y, x)} for x, y in corners]
    casters[2]["b_x"] = 0.0
    cfg = write_config(tmp_path, base={"casters": casters})
    r = run("--config", cfg, "check-kinematics")
    assert r.returncode == 3
    assert "2" in r.stderr


def test_replay_of_missing_file_is_an_error(tmp_path):
    r = run("replay", tmp_path / "nothing.jsonl")
    assert r.returncode != 0


# Minimal websocket client over a raw socket (text frames only).
class WsClient:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=5)
        key = base64.b64encode(os.urandom(16)).decode()
        self.sock.sendall((f"GET / HTTP/1.1\r\nHost: localhost\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                           f"Sec-WebSocket-Key: {key}\r\nSec-WebSocket-Version: 13\r\n\r\n").encode())
        head = b""
        while b"\r\n\r\n" not in head:
            head += self.sock.recv(1)
        assert b" 101 " in head.split(b"\r\n")[0]

    def send(self, obj):
        data = json.dumps(obj).encode()
        mask = os.urandom(4)
        n = len(data)
        header = bytes([0x81]) + (bytes([0x80 | n]) if n < 126 else bytes([0x80 | 126]) + struct.pack("!H", n))
        self.sock.sendall(header + mask + bytes(b ^ mask[i % 4] for i, b in enumerate(data)))

    def close(self):
        self.sock.close()


def start_server(tmp_path):
    cfg = write_config(tmp_path, paths={"episode_dir": str(tmp_path / "episodes")})
    proc = subprocess.Popen([PCVKIT, "--config", str(cfg), "--noise", "off", "--port", "0", "serve", "--ui-dir", str(tmp_path / "ui")],
                            stdout=subprocess.PIPE, text=True)
    line = proc.stdout.readline()
    m = re.search(r":(\d+)/", line)
    assert m, line
    return proc, int(m.group(1))


def test_sigterm_while_recording_closes_the_episode(tmp_path):
    proc, port = start_server(tmp_path)
    try:
        ws = WsClient(port)
        ws.send({"type": "episode", "action": "start", "name": "sigterm"})
        ws.send({"type": "pose", "t_ms": 1, "position": [0, 0, 1], "quaternion": [1, 0, 0, 0]})
        ws.send({"type": "clutch", "engaged": True})
        for k in range(2, 20):
            ws.send({"type": "pose", "t_ms": k * 20, "position": [0.01 * k, 0, 1], "quaternion": [1, 0, 0, 0]})
            time.sleep(0.02)
        proc.send_signal(signal.SIGTERM)
        assert proc.wait(timeout=10) == 0
        ws.close()
    finally:
        if proc.poll() is None:
            proc.kill()

    files = list((tmp_path / "episodes").glob("sigterm-*.jsonl"))
    assert len(files) == 1
    meta = json.loads(Path(str(files[0])[: -len(".jsonl")] + ".meta.json").read_text())
    assert meta["closed"] is True
    lines = files[0].read_text().splitlines()
    assert len(lines) == meta["ticks"] > 0
    json.loads(lines[-1])

    r = run("--out", tmp_path, "replay", files[0])
    assert r.returncode == 0, r.stdout + r.stderr


def test_port_in_use_exit_code(tmp_path):
    proc, port = start_server(tmp_path)
    try:
        r = run("--port", port, "serve", timeout=10)
        assert r.returncode == 5
    finally:
        proc.send_signal(signal.SIGINT)
        proc.wait(timeout=10)
