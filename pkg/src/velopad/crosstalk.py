"""Distance-weighted crosstalk metric and characterization sweeps.

The per-pixel metric is the normalized sum of neighbor readings weighted
by their Euclidean distance from the stimulated pixel:

    C = sum(d_i * p_i) / (p0 * sum(d_i))

computed over a neighborhood of the stimulated pixel. It is dimensionless,
0 when the neighbors read nothing and 1 when they all read p0, and it
penalizes far-away pixels that show a significantly high reading.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .circuit import (
    Frame,
    MechanismFlags,
    ReadoutConfig,
    VelostatModel,
    scan_frame,
)
from .geometry import SensorGeometry, WeightStimulus, rasterize_stimulus

CORNER = "corner"
EDGE = "edge"
CENTER = "center"

_KIND_BY_COUNT = {3: CORNER, 5: EDGE, 8: CENTER}


class UndefinedMetricError(ValueError):
    """The stimulated pixel reads nothing, so the metric is undefined."""


class CrosstalkAboveUnityWarning(UserWarning):
    """Some neighbor read more than the stimulated pixel; C exceeds 1."""


@dataclass(frozen=True)
class Neighborhood:
    """The adjacent ring around a stimulated pixel with member distances."""

    stimulated: tuple[int, int]
    members: tuple[tuple[tuple[int, int], float], ...]
    kind: str


def neighborhood(s: tuple[int, int], rows: int, cols: int) -> Neighborhood:
    """All in-grid cells within Chebyshev distance 1 of s.

    Distances are Euclidean in pixel units (1 or sqrt(2)); the kind follows
    from the member count: 3 corner, 5 edge, 8 center.
    """
    if rows < 2 or cols < 2:
        raise ValueError("neighborhoods need a grid of at least 2x2")
    r, c = s
    if not (0 <= r < rows and 0 <= c < cols):
        raise IndexError(f"pixel {s} outside {rows}x{cols} grid")
    members = []
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols:
                members.append(((nr, nc), math.hypot(dr, dc)))
    return Neighborhood(stimulated=(r, c), members=tuple(members), kind=_KIND_BY_COUNT[len(members)])


@dataclass(frozen=True)
class CrosstalkInput:
    """Stimulated reading p0 and (distance, reading) pairs for the neighbors."""

    p0: float
    neighbors: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "neighbors", tuple((float(d), float(p)) for d, p in self.neighbors))
        for d, p in self.neighbors:
            if d <= 0.0:
                raise ValueError("neighbor distances must be positive")
            if p < 0.0:
                raise ValueError("neighbor readings must be nonnegative")


def crosstalk(inp: CrosstalkInput) -> float:
    """Evaluate the metric for one stimulated pixel.

    Raises UndefinedMetricError when p0 <= 0. When some neighbor reads more
    than p0 the value exceeds 1 and is returned unclamped with a
    CrosstalkAboveUnityWarning; clamping would hide a real anomaly.
    """
    if not inp.neighbors:
        raise ValueError("crosstalk needs at least one neighbor")
    if inp.p0 <= 0.0:
        raise UndefinedMetricError("stimulated pixel reading must be positive")
    num = sum(d * p for d, p in inp.neighbors)
    den = inp.p0 * sum(d for d, _ in inp.neighbors)
    value = num / den
    if any(p > inp.p0 for _, p in inp.neighbors):
        warnings.warn(
            f"neighbor reading exceeds the stimulated pixel; C = {value:.4g} > 1",
            CrosstalkAboveUnityWarning,
            stacklevel=2,
        )
    return value


def crosstalk_frame(
    frame: Frame,
    s: tuple[int, int],
    members: Optional[Sequence[tuple[tuple[int, int], float]]] = None,
) -> float:
    """Metric of a frame at stimulated pixel s over the adjacent ring.

    ``members`` may override the ring with any ((row, col), distance)
    neighborhood, up to the whole matrix.
    """
    rows, cols = frame.shape
    if members is None:
        members = neighborhood(s, rows, cols).members
    p0 = float(frame.values[s])
    if p0 <= 0.0:
        raise UndefinedMetricError(f"stimulated pixel {s} reads {p0}")
    pairs = tuple((d, float(frame.values[pix])) for pix, d in members)
    return crosstalk(CrosstalkInput(p0=p0, neighbors=pairs))


@dataclass(frozen=True)
class CrosstalkReport:
    """Per-pixel metric values for one (pitch, weight) sweep point.

    Entries are ((row, col), C) with NaN marking pixels where the metric
    was undefined; statistics cover the defined entries. ``std`` is the
    population standard deviation.
    """

    pitch: float
    weight_kg: float
    mechanisms: MechanismFlags
    per_pixel: tuple[tuple[tuple[int, int], float], ...]
    mean: float
    std: float
    min: float
    max: float

    @classmethod
    def from_values(
        cls,
        pitch: float,
        weight_kg: float,
        mechanisms: MechanismFlags,
        per_pixel: Sequence[tuple[tuple[int, int], float]],
    ) -> "CrosstalkReport":
        values = np.asarray([v for _, v in per_pixel], dtype=np.float64)
        defined = values[~np.isnan(values)]
        if defined.size == 0:
            stats = (math.nan,) * 4
        else:
            stats = (
                float(defined.mean()),
                float(defined.std()),
                float(defined.min()),
                float(defined.max()),
            )
        return cls(
            pitch=pitch,
            weight_kg=weight_kg,
            mechanisms=mechanisms,
            per_pixel=tuple((tuple(pix), float(v)) for pix, v in per_pixel),
            mean=stats[0],
            std=stats[1],
            min=stats[2],
            max=stats[3],
        )


def characterize(
    geometry: SensorGeometry,
    model: VelostatModel,
    config: ReadoutConfig,
    weights_kg: Sequence[float],
    pitches: Sequence[float],
    per_pixel: bool = False,
    diffusion_sigma: float = 0.0,
) -> list[CrosstalkReport]:
    """Sweep pitches and weights, stimulating one pixel at a time.

    For each (pitch, weight) the center pixel (or every pixel when
    per_pixel) carries the weight, the matrix is scanned, and the metric is
    evaluated at the stimulated pixel. The diffusion sigma is a fixed
    length in meters, applied only when the diffusion mechanism is on.
    Reports come back sorted by pitch, then weight.
    """
    if not weights_kg or not pitches:
        raise ValueError("sweep lists must be nonempty")
    if geometry.rows < 2 or geometry.cols < 2:
        raise ValueError("characterization needs a grid of at least 2x2")
    sigma = diffusion_sigma if config.mechanisms.diffusion else 0.0
    reports = []
    for pitch in sorted(pitches):
        grid = replace(geometry, pitch=pitch)
        for weight in sorted(weights_kg):
            if per_pixel:
                targets = [(r, c) for r in range(grid.rows) for c in range(grid.cols)]
            else:
                targets = [(grid.rows // 2, grid.cols // 2)]
            values = []
            for target in targets:
                stim = WeightStimulus(target_pixel=target, mass=weight)
                field, _ = rasterize_stimulus([stim], grid, sigma)
                frame = scan_frame(grid, field, model, config)
                try:
                    c = crosstalk_frame(frame, target)
                except UndefinedMetricError:
                    c = math.nan
                values.append((target, c))
            reports.append(CrosstalkReport.from_values(pitch, weight, config.mechanisms, values))
    return reports


def report_lines(report: CrosstalkReport) -> list[str]:
    """Line-oriented tabular rendering of one report."""
    head = (
        f"pitch_mm={report.pitch * 1e3:g} weight_kg={report.weight_kg:g} "
        f"mechanisms={','.join(report.mechanisms.names()) or 'none'}"
    )
    lines = [head]
    for (r, c), v in report.per_pixel:
        lines.append(f"  ({r},{c})\t{'undefined' if math.isnan(v) else format(v, '.6f')}")
    lines.append(
        f"  mean={report.mean:.6f} std={report.std:.6f} min={report.min:.6f} max={report.max:.6f}"
    )
    return lines


def report_dict(report: CrosstalkReport) -> dict:
    """Structured-object rendering of one report (JSON friendly)."""
    return {
        "pitch_m": report.pitch,
        "weight_kg": report.weight_kg,
        "mechanisms": report.mechanisms.names(),
        "per_pixel": [
            {"pixel": list(pix), "value": None if math.isnan(v) else v}
            for pix, v in report.per_pixel
        ],
        "mean": None if math.isnan(report.mean) else report.mean,
        "std": None if math.isnan(report.std) else report.std,
        "min": None if math.isnan(report.min) else report.min,
        "max": None if math.isnan(report.max) else report.max,
    }
