"""Sensor grid geometry, stimulus rasterization, and mechanical effects.

Coordinate convention: origin at the outer corner of the first crossover,
x runs along columns, y along rows, both in meters. Pixel (row, col) is the
crossover of row electrode `row` with column electrode `col`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GRAVITY = 9.80665  # N per kg, weight-to-force conversion

FLAT = math.inf  # bending radius of an unbent pad

BEND_AXES = ("horizontal", "vertical")


@dataclass(frozen=True)
class SensorGeometry:
    """Crossbar grid: electrode counts, pitch, line width, layer stack."""

    rows: int
    cols: int
    pitch: float
    line_width: float
    velostat_thickness: float = 106e-6
    pcb_thickness: float = 180e-6

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must be at least 1x1")
        if not (self.pitch > self.line_width > 0.0):
            raise ValueError("require pitch > line_width > 0")
        if self.velostat_thickness <= 0.0 or self.pcb_thickness <= 0.0:
            raise ValueError("layer thicknesses must be positive")

    @classmethod
    def writing_pad(cls) -> "SensorGeometry":
        """The 16x16 pad with 3 mm pitch and 0.254 mm copper lines."""
        return cls(rows=16, cols=16, pitch=3e-3, line_width=0.254e-3)

    @property
    def extent(self) -> tuple[float, float]:
        """Sensing extent (x, y) in meters: (n-1)*pitch + line_width per axis."""
        ex = (self.cols - 1) * self.pitch + self.line_width
        ey = (self.rows - 1) * self.pitch + self.line_width
        return ex, ey

    def pixel_center(self, row: int, col: int) -> tuple[float, float]:
        """Center of pixel (row, col) in pad coordinates (meters)."""
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(
                f"pixel ({row}, {col}) outside {self.rows}x{self.cols} grid"
            )
        half = self.line_width / 2.0
        return col * self.pitch + half, row * self.pitch + half

    def contains(self, x: float, y: float) -> bool:
        ex, ey = self.extent
        return 0.0 <= x <= ex and 0.0 <= y <= ey

    def nearest_pixel(self, x: float, y: float) -> tuple[int, int]:
        """Pixel whose center is closest to (x, y); caller checks contains()."""
        half = self.line_width / 2.0
        col = int(round((x - half) / self.pitch))
        row = int(round((y - half) / self.pitch))
        return min(max(row, 0), self.rows - 1), min(max(col, 0), self.cols - 1)


@dataclass(frozen=True)
class StrokeEvent:
    """One stylus sample: pad position in meters, force in newtons."""

    x: float
    y: float
    force: float
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.force < 0.0:
            raise ValueError("stroke force must be nonnegative")


@dataclass(frozen=True)
class WeightStimulus:
    """A calibration weight resting on one pixel."""

    target_pixel: tuple[int, int]
    mass: float  # kg
    contact_area: float = 1e-4  # m^2, 10 mm x 10 mm block

    def __post_init__(self) -> None:
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.contact_area <= 0.0:
            raise ValueError("contact area must be positive")

    @property
    def force(self) -> float:
        return self.mass * GRAVITY


@dataclass(frozen=True)
class PressureField:
    """Per-pixel applied force (newtons), rows x cols, nonnegative."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("pressure field must be a 2-D matrix")
        if not np.all(np.isfinite(arr)):
            raise ValueError("pressure field must be finite")
        if np.any(arr < 0.0):
            raise ValueError("pressure field must be nonnegative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, geometry: SensorGeometry) -> "PressureField":
        return cls(np.zeros((geometry.rows, geometry.cols)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    def total(self) -> float:
        return float(self.values.sum())

    def __add__(self, other: "PressureField") -> "PressureField":
        if self.shape != other.shape:
            raise ValueError("pressure field dimensions differ")
        return PressureField(self.values + other.values)


@dataclass(frozen=True)
class BendState:
    """Flex state of the pad. bending_radius may be math.inf (flat)."""

    bending_radius: float = FLAT
    axis: str = "horizontal"
    stress_profile_scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.bending_radius > 0.0:
            raise ValueError("bending radius must be positive (inf for flat)")
        if self.axis not in BEND_AXES:
            raise ValueError(f"bend axis must be one of {BEND_AXES}")
        if self.stress_profile_scale < 0.0:
            raise ValueError("stress profile scale must be nonnegative")

    @classmethod
    def flat(cls) -> "BendState":
        return cls()

    @property
    def is_flat(self) -> bool:
        return math.isinf(self.bending_radius)


def _gaussian_kernel_2d(sigma_px: float) -> np.ndarray:
    # Radius 4*sigma keeps the tail mass negligible; the kernel is normalized
    # to sum exactly 1 so interior deposits conserve force.
    radius = int(math.ceil(4.0 * sigma_px))
    ks = np.arange(-radius, radius + 1, dtype=np.float64)
    with np.errstate(over="ignore"):  # vanishing sigma degenerates to a delta
        w = np.exp(-0.5 * (ks / sigma_px) ** 2)
    k2 = np.outer(w, w)
    return k2 / k2.sum()


def _diffuse(deposits: np.ndarray, sigma_px: float) -> np.ndarray:
    """Spread point deposits with a normalized Gaussian.

    Near the boundary the kernel is truncated to the grid and renormalized
    per source pixel, so every deposit keeps its total force and the field
    stays nonnegative.
    """
    if sigma_px == 0.0:
        return deposits.copy()
    kernel = _gaussian_kernel_2d(sigma_px)
    radius = kernel.shape[0] // 2
    rows, cols = deposits.shape
    out = np.zeros_like(deposits)
    for i, j in zip(*np.nonzero(deposits)):
        r0, r1 = max(i - radius, 0), min(i + radius + 1, rows)
        c0, c1 = max(j - radius, 0), min(j + radius + 1, cols)
        sub = kernel[r0 - i + radius : r1 - i + radius, c0 - j + radius : c1 - j + radius]
        out[r0:r1, c0:c1] += deposits[i, j] * sub / sub.sum()
    return out


def diffuse_field(
    field: PressureField,
    geometry: SensorGeometry,
    diffusion_sigma: float,
) -> PressureField:
    """Spread a deposit field with the normalized Gaussian.

    ``diffusion_sigma`` is a length in meters, converted to pixel units by
    the pitch. Linear in the field, so diffusing a sum of deposits equals
    summing diffused deposits.
    """
    if diffusion_sigma < 0.0:
        raise ValueError("diffusion sigma must be nonnegative")
    if field.shape != (geometry.rows, geometry.cols):
        raise ValueError("field dimensions do not match geometry")
    sigma_px = diffusion_sigma / geometry.pitch
    return PressureField(_diffuse(field.values, sigma_px))


def rasterize_stimulus(
    stimuli,
    geometry: SensorGeometry,
    diffusion_sigma: float = 0.0,
) -> tuple[PressureField, list]:
    """Convert strokes and weights into a per-pixel force field.

    Each stimulus deposits its force at the nearest pixel, then the deposits
    are spread with a Gaussian of standard deviation ``diffusion_sigma``
    (meters, converted to pixel units by the pitch). Stimuli outside the
    sensing extent are rejected individually; the rest are processed.

    Returns (field, rejected_stimuli).
    """
    if diffusion_sigma < 0.0:
        raise ValueError("diffusion sigma must be nonnegative")
    deposits = np.zeros((geometry.rows, geometry.cols))
    rejected = []
    for stim in stimuli:
        if isinstance(stim, StrokeEvent):
            if not geometry.contains(stim.x, stim.y):
                rejected.append(stim)
                continue
            row, col = geometry.nearest_pixel(stim.x, stim.y)
            deposits[row, col] += stim.force
        elif isinstance(stim, WeightStimulus):
            row, col = stim.target_pixel
            if not (0 <= row < geometry.rows and 0 <= col < geometry.cols):
                rejected.append(stim)
                continue
            deposits[row, col] += stim.force
        else:
            raise TypeError(f"unsupported stimulus type: {type(stim).__name__}")
    return diffuse_field(PressureField(deposits), geometry, diffusion_sigma), rejected


def curvature(samples, at: float) -> float:
    """Curvature of a sampled curve y = f(x) at x = ``at``.

    Uses central finite-difference estimates of y' and y''. Needs at least
    five strictly increasing samples with two on each side of ``at``.
    """
    pts = list(samples)
    if len(pts) < 5:
        raise ValueError("need at least 5 samples")
    xs = np.asarray([p[0] for p in pts], dtype=np.float64)
    ys = np.asarray([p[1] for p in pts], dtype=np.float64)
    if not np.all(np.diff(xs) > 0.0):
        raise ValueError("sample x values must be strictly increasing")
    if np.count_nonzero(xs < at) < 2 or np.count_nonzero(xs > at) < 2:
        raise ValueError("evaluation point must be bracketed by two samples per side")
    # Divided differences rather than np.gradient: slopes of a constant
    # curve are exactly zero, so flat input gives exactly zero curvature.
    dx = np.diff(xs)
    slopes = np.diff(ys) / dx
    span = dx[:-1] + dx[1:]
    d1 = (slopes[:-1] * dx[1:] + slopes[1:] * dx[:-1]) / span
    d2 = 2.0 * (slopes[1:] - slopes[:-1]) / span
    interior = xs[1:-1]
    yp = float(np.interp(at, interior, d1))
    ypp = float(np.interp(at, interior, d2))
    return abs(ypp) / (1.0 + yp * yp) ** 1.5


def bending_radius(kappa: float) -> float:
    """Bending radius R = 1/kappa; kappa = 0 maps to the flat sentinel."""
    if kappa < 0.0:
        raise ValueError("curvature must be nonnegative")
    if kappa == 0.0:
        return FLAT
    return 1.0 / kappa


def bend_stress_field(bend: BendState, geometry: SensorGeometry) -> PressureField:
    """Additive baseline pressure from flexing the pad.

    Amplitude is stress_profile_scale / bending_radius, applied as a linear
    ramp along the bend axis with its maximum at the far edge (the flexed
    pad presses hardest there). A flat pad contributes nothing.
    """
    if bend.is_flat:
        return PressureField.zeros(geometry)
    amplitude = bend.stress_profile_scale / bend.bending_radius
    if bend.axis == "horizontal":
        n = geometry.rows
        ramp = np.arange(n) / (n - 1) if n > 1 else np.ones(1)
        values = np.repeat((amplitude * ramp)[:, None], geometry.cols, axis=1)
    else:
        n = geometry.cols
        ramp = np.arange(n) / (n - 1) if n > 1 else np.ones(1)
        values = np.repeat((amplitude * ramp)[None, :], geometry.rows, axis=0)
    return PressureField(values)
