"""Command-line entry points: simulate, crosstalk, serve, replay.

Configuration resolves in three layers: built-in defaults, then a JSON
config file (--config, same keys as the flags), then explicit flags.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .crosstalk import (
    UndefinedMetricError,
    characterize,
    crosstalk_frame,
    report_dict,
    report_lines,
)
from .framelog import ingest_external, staged_records, write_frame_log
from .geometry import StrokeEvent, WeightStimulus
from .pipeline import run_pipeline
from .session import PadSession, SessionConfig
from .wire import decode_stream, encode_wire

CONFIG_FLAGS = {
    # flag dest -> session config key
    "rows": "rows",
    "cols": "cols",
    "pitch_mm": "pitch_mm",
    "line_width_mm": "line_width_mm",
    "bias_ohm": "bias_ohm",
    "vdd": "vdd",
    "adc_bits": "adc_bits",
    "frames_n": "frames_n",
    "frame_period": "frame_period_s",
    "blur_sigma": "blur_sigma",
    "seed": "seed",
    "bend_radius_cm": "bend_radius_cm",
    "bend_axis": "bend_axis",
    "bend_scale": "bend_scale",
    "diffusion_sigma_mm": "diffusion_sigma_mm",
    "noise_sigma": "noise_sigma_v",
    "r_off": "r_off",
    "r_on": "r_on",
    "p_half": "p_half",
    "gamma": "gamma",
    "r_sheet": "r_sheet",
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file (same keys as flags)")
    parser.add_argument("--rows", type=int)
    parser.add_argument("--cols", type=int)
    parser.add_argument("--pitch-mm", dest="pitch_mm", type=float)
    parser.add_argument("--line-width-mm", dest="line_width_mm", type=float)
    parser.add_argument("--bias-ohm", dest="bias_ohm", type=float)
    parser.add_argument("--vdd", type=float)
    parser.add_argument("--adc-bits", dest="adc_bits", type=int)
    parser.add_argument("--frames-n", dest="frames_n", type=int)
    parser.add_argument("--frame-period", dest="frame_period", type=float)
    parser.add_argument("--blur-sigma", dest="blur_sigma", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument(
        "--mechanisms",
        help="comma list of sheet_paths,finite_off,diffusion or 'all'/'none'",
    )
    parser.add_argument("--ground-unused", dest="ground_unused", action="store_true", default=None)
    parser.add_argument("--use-softmax", dest="use_softmax", action="store_true", default=None)
    parser.add_argument("--bend-radius-cm", dest="bend_radius_cm", type=float)
    parser.add_argument("--bend-axis", dest="bend_axis", choices=("horizontal", "vertical"))
    parser.add_argument("--bend-scale", dest="bend_scale", type=float)
    parser.add_argument("--diffusion-sigma-mm", dest="diffusion_sigma_mm", type=float)
    parser.add_argument("--noise-sigma", dest="noise_sigma", type=float)
    parser.add_argument("--r-off", dest="r_off", type=float)
    parser.add_argument("--r-on", dest="r_on", type=float)
    parser.add_argument("--p-half", dest="p_half", type=float)
    parser.add_argument("--gamma", dest="gamma", type=float)
    parser.add_argument("--r-sheet", dest="r_sheet", type=float)


def build_session_config(args: argparse.Namespace) -> SessionConfig:
    delta: dict = {}
    if getattr(args, "config", None):
        delta.update(json.loads(Path(args.config).read_text()))
    for dest, key in CONFIG_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            delta[key] = value
    if getattr(args, "mechanisms", None) is not None:
        delta["mechanisms"] = [m for m in args.mechanisms.split(",") if m]
    for flag in ("ground_unused", "use_softmax"):
        if getattr(args, flag, None) is not None:
            delta[flag] = True
    return SessionConfig().apply_delta(delta)


def _load_stimulus(path: Path) -> tuple[list[StrokeEvent], list[WeightStimulus]]:
    data = json.loads(path.read_text())
    strokes = [
        StrokeEvent(
            x=float(s["x_mm"]) * 1e-3,
            y=float(s["y_mm"]) * 1e-3,
            force=float(s["force"]),
            timestamp=float(s.get("t", 0.0)),
        )
        for s in data.get("strokes", [])
    ]
    weights = [
        WeightStimulus(target_pixel=(int(w["row"]), int(w["col"])), mass=float(w["kg"]))
        for w in data.get("weights", [])
    ]
    return strokes, weights


def cmd_simulate(args: argparse.Namespace) -> int:
    config = build_session_config(args)
    session = PadSession(config)
    if args.stimulus is not None:
        strokes, weights = _load_stimulus(args.stimulus)
        session.add_strokes(strokes)
        session.add_weights(weights)
    result = session.capture()
    if args.format == "log":
        records = staged_records(result.staged, result.capture_id, result.timestamp)
        if args.output == "-":
            write_frame_log(records, sys.stdout)
        else:
            write_frame_log(records, args.output)
    else:
        blob = b"".join(encode_wire(f, seq) for seq, f in enumerate(result.frames))
        if args.output == "-":
            sys.stdout.buffer.write(blob)
        else:
            Path(args.output).write_bytes(blob)
    return 0


def cmd_crosstalk(args: argparse.Namespace) -> int:
    if args.input is not None:
        frames, errors = ingest_external(args.input)
        for err in errors:
            print(f"line {err.line_no}: {err.reason}", file=sys.stderr)
        if args.at is None:
            raise ValueError("--at ROW,COL is required with --input")
        r, c = (int(v) for v in args.at.split(","))
        out = []
        for idx, frame in enumerate(frames):
            try:
                value = crosstalk_frame(frame, (r, c))
                out.append({"frame": idx, "pixel": [r, c], "crosstalk": value})
            except UndefinedMetricError:
                out.append({"frame": idx, "pixel": [r, c], "crosstalk": None})
        if args.json:
            print(json.dumps(out))
        else:
            for row in out:
                value = row["crosstalk"]
                print(f"frame {row['frame']} ({r},{c}): "
                      f"{'undefined' if value is None else format(value, '.5f')}")
        return 0

    config = build_session_config(args)
    pitches = [float(p) * 1e-2 for p in args.pitches_cm.split(",")] if args.pitches_cm else [
        config.geometry.pitch
    ]
    weights = [float(w) for w in args.weights_kg.split(",")] if args.weights_kg else [0.5]
    reports = characterize(
        config.geometry,
        config.model,
        config.readout,
        weights_kg=weights,
        pitches=pitches,
        per_pixel=args.per_pixel,
        diffusion_sigma=config.diffusion_sigma,
    )
    if args.json:
        print(json.dumps([report_dict(rep) for rep in reports]))
    else:
        for rep in reports:
            for line in report_lines(rep):
                print(line)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    config = build_session_config(args)
    if args.fast:
        config = config.apply_delta({"frames_n": 5})
    host, _, port = args.bind.rpartition(":")
    serve(config, host or "127.0.0.1", int(port))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    config = build_session_config(args)
    data = Path(args.input).read_bytes()
    frames, diagnostics = decode_stream(data)
    print(
        f"decoded {len(frames)} frames "
        f"(resyncs={diagnostics.resyncs}, crc_failures={diagnostics.crc_failures}, "
        f"truncated_bytes={diagnostics.truncated_bytes})",
        file=sys.stderr,
    )
    n = config.pipeline.frames_per_capture
    period = config.readout.frame_period
    records = []
    for capture_id in range(len(frames) // n):
        batch = frames[capture_id * n : (capture_id + 1) * n]
        if args.speed > 0:
            time.sleep(period * n / args.speed)
        staged = run_pipeline([wf.to_frame() for wf in batch], config.pipeline)
        records.extend(staged_records(staged, capture_id, capture_id * period * n))
    leftover = len(frames) % n
    if leftover:
        print(f"{leftover} trailing frames short of a capture, ignored", file=sys.stderr)
    if args.output == "-":
        write_frame_log(records, sys.stdout)
    else:
        write_frame_log(records, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="velopad",
        description="Crossbar velostat pressure-pad simulator and tooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one capture and write a frame log or wire stream")
    _add_config_flags(p_sim)
    p_sim.add_argument("--stimulus", type=Path, help="JSON stimulus file (strokes and weights)")
    p_sim.add_argument("--output", default="-", help="output path, '-' for stdout")
    p_sim.add_argument("--format", choices=("log", "wire"), default="log")
    p_sim.set_defaults(func=cmd_simulate)

    p_ct = sub.add_parser("crosstalk", help="metric of a frame log or a live simulation sweep")
    _add_config_flags(p_ct)
    p_ct.add_argument("--input", type=Path, help="frame log to ingest instead of simulating")
    p_ct.add_argument("--at", help="ROW,COL of the stimulated pixel (with --input)")
    p_ct.add_argument("--pitches-cm", dest="pitches_cm", help="comma list for the sweep")
    p_ct.add_argument("--weights-kg", dest="weights_kg", help="comma list for the sweep")
    p_ct.add_argument("--per-pixel", dest="per_pixel", action="store_true")
    p_ct.add_argument("--json", action="store_true", help="structured output")
    p_ct.set_defaults(func=cmd_crosstalk)

    p_srv = sub.add_parser("serve", help="run the interactive pad session service")
    _add_config_flags(p_srv)
    p_srv.add_argument("--bind", default="127.0.0.1:7353", help="HOST:PORT (port 0 picks one)")
    p_srv.add_argument("--fast", action="store_true", help="5 frames per capture for snappy UIs")
    p_srv.set_defaults(func=cmd_serve)

    p_rep = sub.add_parser("replay", help="decode a wire capture and re-run the pipeline")
    _add_config_flags(p_rep)
    p_rep.add_argument("--input", type=Path, required=True, help="wire stream file")
    p_rep.add_argument("--speed", type=float, default=0.0, help="cadence scale; 0 replays instantly")
    p_rep.add_argument("--output", default="-", help="frame log path, '-' for stdout")
    p_rep.set_defaults(func=cmd_replay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
