import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from velopad import SensorGeometry, decode_stream, read_frame_log
from velopad.cli import main

DATA = Path(__file__).parent / "data"


def run_cli(*args) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "velopad", *args],
        capture_output=True,
        text=False,
        timeout=120,
    )


class TestSimulate:
    def test_blank_stimulus_all_zero_stages(self, tmp_path):
        # An ideal pad (mechanisms off) with nothing on it logs zero
        # everywhere; with finite off-resistance enabled the baseline is a
        # uniform nonzero reading instead, which is the faithful default.
        out = tmp_path / "blank.log"
        code = main([
            "simulate", "--mechanisms", "none", "--frames-n", "5",
            "--output", str(out),
        ])
        assert code == 0
        records, errors = read_frame_log(out)
        assert errors == []
        assert {r.stage for r in records} == {"sum", "sn", "blur", "binary"}
        for record in records:
            assert all(v == 0.0 for v in record.values)

    def test_golden_log_byte_identical(self, tmp_path):
        out = tmp_path / "l.log"
        code = main([
            "simulate", "--stimulus", str(DATA / "l_stroke_4cm.json"),
            "--seed", "1234", "--noise-sigma", "0.01",
            "--output", str(out),
        ])
        assert code == 0
        assert out.read_bytes() == (DATA / "l_stroke_golden.log").read_bytes()

    def test_binary_stage_covers_stroke_mask(self, tmp_path):
        out = tmp_path / "l.log"
        main([
            "simulate", "--stimulus", str(DATA / "l_stroke_4cm.json"),
            "--seed", "1234", "--noise-sigma", "0.01",
            "--output", str(out),
        ])
        records, _ = read_frame_log(out)
        binary = next(r for r in records if r.stage == "binary")
        values = np.asarray(binary.values).reshape(16, 16)

        g = SensorGeometry.writing_pad()
        mask = np.zeros((16, 16), dtype=bool)
        for s in json.loads((DATA / "l_stroke_4cm.json").read_text())["strokes"]:
            mask[g.nearest_pixel(s["x_mm"] * 1e-3, s["y_mm"] * 1e-3)] = True
        overlap = (values.astype(bool) & mask).sum() / mask.sum()
        assert overlap >= 0.8

    def test_wire_format_output(self, tmp_path):
        out = tmp_path / "capture.wire"
        code = main([
            "simulate", "--mechanisms", "none", "--frames-n", "4",
            "--format", "wire", "--output", str(out),
        ])
        assert code == 0
        frames, diag = decode_stream(out.read_bytes())
        assert len(frames) == 4
        assert [f.seq for f in frames] == [0, 1, 2, 3]
        assert diag.crc_failures == 0

    def test_bad_flag_nonzero_exit_with_usage(self):
        proc = run_cli("simulate", "--frames-per-second", "9")
        assert proc.returncode != 0
        assert b"usage" in proc.stderr.lower()

    def test_invalid_config_nonzero_exit(self, tmp_path):
        code = main(["simulate", "--adc-bits", "40", "--output", str(tmp_path / "x.log")])
        assert code != 0


class TestCrosstalkCommand:
    def test_corner_fixture_value(self, capsys):
        code = main(["crosstalk", "--input", str(DATA / "corner_stimulus.log"), "--at", "4,0"])
        assert code == 0
        out = capsys.readouterr().out
        assert "0.02869" in out or "0.02868" in out

    def test_corner_fixture_json(self, capsys):
        code = main([
            "crosstalk", "--input", str(DATA / "corner_stimulus.log"),
            "--at", "4,0", "--json",
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload[0]["crosstalk"] == pytest.approx(0.02868, abs=1e-4)

    def test_missing_at_flag_is_an_error(self):
        code = main(["crosstalk", "--input", str(DATA / "corner_stimulus.log")])
        assert code != 0

    def test_per_pixel_sweep_counts(self, capsys):
        code = main([
            "crosstalk", "--rows", "5", "--cols", "5", "--per-pixel",
            "--pitches-cm", "0.4", "--weights-kg", "0.5", "--json",
        ])
        assert code == 0
        reports = json.loads(capsys.readouterr().out)
        assert len(reports) == 1
        assert len(reports[0]["per_pixel"]) == 25

    def test_pitch_sweep_monotone_means(self, capsys):
        code = main([
            "crosstalk", "--rows", "3", "--cols", "3",
            "--pitches-cm", "1,2,3,4,5", "--weights-kg", "0.5",
            "--diffusion-sigma-mm", "8", "--json",
        ])
        assert code == 0
        reports = json.loads(capsys.readouterr().out)
        means = [r["mean"] for r in reports]
        assert len(means) == 5
        assert all(b < a for a, b in zip(means, means[1:]))


class TestReplay:
    def test_replay_reconstructs_pipeline(self, tmp_path, capsys):
        wire = tmp_path / "capture.wire"
        main([
            "simulate", "--mechanisms", "none", "--frames-n", "4",
            "--stimulus", str(DATA / "l_stroke_4cm.json"),
            "--format", "wire", "--output", str(wire),
        ])
        log = tmp_path / "replay.log"
        code = main([
            "replay", "--input", str(wire), "--frames-n", "4",
            "--output", str(log),
        ])
        assert code == 0
        records, errors = read_frame_log(log)
        assert errors == []
        assert {r.stage for r in records} == {"sum", "sn", "blur", "binary"}

    def test_replay_corrupt_stream_reports_diagnostics(self, tmp_path, capsys):
        wire = tmp_path / "capture.wire"
        main([
            "simulate", "--mechanisms", "none", "--frames-n", "2",
            "--format", "wire", "--output", str(wire),
        ])
        blob = bytearray(wire.read_bytes())
        blob[len(blob) // 2] ^= 0xFF
        corrupt = tmp_path / "corrupt.wire"
        corrupt.write_bytes(bytes([0x13, 0x37]) + bytes(blob))
        code = main(["replay", "--input", str(corrupt), "--frames-n", "1", "--output", "-"])
        assert code == 0
        err = capsys.readouterr().err
        assert "resyncs=" in err and "crc_failures=" in err


class TestConfigFile:
    def test_config_file_overridden_by_flags(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"rows": 4, "cols": 4, "frames_n": 3, "mechanisms": []}))
        out = tmp_path / "out.log"
        code = main([
            "simulate", "--config", str(cfg), "--frames-n", "2",
            "--output", str(out),
        ])
        assert code == 0
        records, _ = read_frame_log(out)
        assert records[0].rows == 4
        sums = [r for r in records if r.stage == "sum"]
        assert len(sums) == 1
