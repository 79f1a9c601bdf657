"""Simulated pad session: configuration, stimulus state, capture loop.

A session owns one virtual pad. Strokes accumulate into a persistent
pressure field (the written ink) until a clear; each capture scans the
current field for a batch of frames, quantizes them, and runs the
reconstruction pipeline. Captures are numbered without gaps and the
simulated clock advances one capture period per capture, so a fixed seed
gives byte-identical logs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .circuit import (
    Frame,
    MechanismFlags,
    ReadoutConfig,
    VOLTS,
    VelostatModel,
    adc_quantize,
    scan_frame,
)
from .crosstalk import CrosstalkAboveUnityWarning, UndefinedMetricError, crosstalk_frame
from .geometry import (
    BendState,
    FLAT,
    PressureField,
    SensorGeometry,
    StrokeEvent,
    WeightStimulus,
    bend_stress_field,
    diffuse_field,
    rasterize_stimulus,
)
from .pipeline import PipelineConfig, StagedOutput, run_pipeline


@dataclass(frozen=True)
class SessionConfig:
    """Everything one pad session needs, JSON round-trippable."""

    geometry: SensorGeometry = field(default_factory=SensorGeometry.writing_pad)
    model: VelostatModel = field(default_factory=VelostatModel)
    readout: ReadoutConfig = field(default_factory=ReadoutConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    bend: BendState = field(default_factory=BendState.flat)
    diffusion_sigma: float = 1.5e-3  # meters
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        bend_radius_cm = None if self.bend.is_flat else self.bend.bending_radius * 100.0
        return {
            "rows": self.geometry.rows,
            "cols": self.geometry.cols,
            "pitch_mm": self.geometry.pitch * 1e3,
            "line_width_mm": self.geometry.line_width * 1e3,
            "r_off": self.model.r_off,
            "r_on": self.model.r_on,
            "p_half": self.model.p_half,
            "gamma": self.model.gamma,
            "r_sheet": None if math.isinf(self.model.r_sheet) else self.model.r_sheet,
            "vdd": self.readout.v_dd,
            "bias_ohm": self.readout.r_bias,
            "adc_bits": self.readout.adc_bits,
            "frame_period_s": self.readout.frame_period,
            "frames_n": self.readout.frames_per_capture,
            "mechanisms": self.readout.mechanisms.names(),
            "ground_unused": self.readout.ground_unused,
            "noise_sigma_v": self.readout.noise_sigma_v,
            "blur_sigma": self.pipeline.blur_sigma,
            "kernel_radius": self.pipeline.kernel_radius,
            "use_softmax": self.pipeline.use_softmax,
            "bend_radius_cm": bend_radius_cm,
            "bend_axis": self.bend.axis,
            "bend_scale": self.bend.stress_profile_scale,
            "diffusion_sigma_mm": self.diffusion_sigma * 1e3,
            "seed": self.seed,
        }

    def apply_delta(self, delta: dict) -> "SessionConfig":
        """New config with the given flat keys changed; unknown keys raise."""
        merged = self.to_dict()
        for key, value in delta.items():
            if key not in merged:
                raise ValueError(f"unknown config key: {key}")
            merged[key] = value
        return SessionConfig.from_dict(merged)

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        base = cls()
        ref = base.to_dict()
        unknown = set(d) - set(ref)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged = {**ref, **d}
        geometry = SensorGeometry(
            rows=int(merged["rows"]),
            cols=int(merged["cols"]),
            pitch=float(merged["pitch_mm"]) * 1e-3,
            line_width=float(merged["line_width_mm"]) * 1e-3,
        )
        mech = merged["mechanisms"]
        mechanisms = mech if isinstance(mech, MechanismFlags) else MechanismFlags.from_names(mech)
        model = VelostatModel(
            r_off=float(merged["r_off"]),
            r_on=float(merged["r_on"]),
            p_half=float(merged["p_half"]),
            gamma=float(merged["gamma"]),
            r_sheet=math.inf if merged["r_sheet"] is None else float(merged["r_sheet"]),
        )
        readout = ReadoutConfig(
            v_dd=float(merged["vdd"]),
            r_bias=float(merged["bias_ohm"]),
            adc_bits=int(merged["adc_bits"]),
            frame_period=float(merged["frame_period_s"]),
            frames_per_capture=int(merged["frames_n"]),
            mechanisms=mechanisms,
            ground_unused=bool(merged["ground_unused"]),
            noise_sigma_v=float(merged["noise_sigma_v"]),
        )
        pipeline = PipelineConfig(
            frames_per_capture=int(merged["frames_n"]),
            blur_sigma=float(merged["blur_sigma"]),
            kernel_radius=None if merged["kernel_radius"] is None else int(merged["kernel_radius"]),
            use_softmax=bool(merged["use_softmax"]),
        )
        radius_cm = merged["bend_radius_cm"]
        bend = BendState(
            bending_radius=FLAT if radius_cm is None else float(radius_cm) / 100.0,
            axis=merged["bend_axis"],
            stress_profile_scale=float(merged["bend_scale"]),
        )
        return cls(
            geometry=geometry,
            model=model,
            readout=readout,
            pipeline=pipeline,
            bend=bend,
            diffusion_sigma=float(merged["diffusion_sigma_mm"]) * 1e-3,
            seed=None if merged["seed"] is None else int(merged["seed"]),
        )


@dataclass(frozen=True)
class CaptureResult:
    capture_id: int
    timestamp: float
    staged: StagedOutput
    frames: tuple[Frame, ...]  # the quantized per-frame scans of this capture
    crosstalk: Optional[float]
    stimulated: Optional[tuple[int, int]]


class PadSession:
    """Mutable session state; one owner at a time (the service handler)."""

    def __init__(self, config: SessionConfig) -> None:
        self.config = config
        self._stimulus = PressureField.zeros(config.geometry)
        self._capture_index = 0

    @property
    def capture_index(self) -> int:
        return self._capture_index

    def add_strokes(self, events: list[StrokeEvent]) -> int:
        """Deposit stroke events into the persistent field; returns #rejected.

        Deposits are stored undiffused; force diffusion is a property of
        the mat, applied at capture time, so toggling the mechanism also
        affects ink that is already on the pad.
        """
        batch, rejected = rasterize_stimulus(events, self.config.geometry, 0.0)
        self._stimulus = self._stimulus + batch
        return len(rejected)

    def add_weights(self, weights: list[WeightStimulus]) -> int:
        batch, rejected = rasterize_stimulus(weights, self.config.geometry, 0.0)
        self._stimulus = self._stimulus + batch
        return len(rejected)

    def clear(self) -> None:
        self._stimulus = PressureField.zeros(self.config.geometry)

    def set_config(self, delta: dict) -> dict:
        """Apply a config delta; a geometry change resets the field."""
        new = self.config.apply_delta(delta)
        if new.geometry != self.config.geometry:
            self._stimulus = PressureField.zeros(new.geometry)
        self.config = new
        return new.to_dict()

    def total_field(self) -> PressureField:
        sigma = self.config.diffusion_sigma if self.config.readout.mechanisms.diffusion else 0.0
        spread = diffuse_field(self._stimulus, self.config.geometry, sigma)
        return spread + bend_stress_field(self.config.bend, self.config.geometry)

    def capture(self) -> CaptureResult:
        """Scan one capture's worth of frames and run the pipeline.

        The field is static during a capture, so the network is solved once
        and per-frame measurement noise is drawn on top; this matches n
        independent scans of the same field exactly.
        """
        cfg = self.config
        n = cfg.readout.frames_per_capture
        field_now = self.total_field()
        quiet = replace(cfg.readout, noise_sigma_v=0.0)
        base = scan_frame(cfg.geometry, field_now, cfg.model, quiet)

        sigma_v = cfg.readout.noise_sigma_v
        if sigma_v > 0.0:
            seed = [0 if cfg.seed is None else cfg.seed, self._capture_index]
            rng = np.random.default_rng(seed if cfg.seed is not None else None)
            noise = rng.normal(0.0, sigma_v, (n,) + base.shape)
        else:
            noise = np.zeros((n,) + base.shape)
        frames = [
            adc_quantize(Frame(base.values + noise[k], VOLTS), cfg.readout)
            for k in range(n)
        ]
        staged = run_pipeline(frames, cfg.pipeline)

        stimulated = None
        metric = None
        if self._stimulus.total() > 0.0 and cfg.geometry.rows >= 2 and cfg.geometry.cols >= 2:
            flat_idx = int(np.argmax(self._stimulus.values))
            stimulated = (flat_idx // cfg.geometry.cols, flat_idx % cfg.geometry.cols)
            try:
                with warnings.catch_warnings():
                    # Multi-pixel strokes can out-read the peak stimulus
                    # pixel; the indicator reports the value regardless.
                    warnings.simplefilter("ignore", CrosstalkAboveUnityWarning)
                    metric = crosstalk_frame(staged.raw, stimulated)
            except UndefinedMetricError:
                metric = None

        capture_id = self._capture_index
        timestamp = capture_id * cfg.readout.capture_period
        self._capture_index += 1
        return CaptureResult(
            capture_id=capture_id,
            timestamp=timestamp,
            staged=staged,
            frames=tuple(frames),
            crosstalk=metric,
            stimulated=stimulated,
        )
