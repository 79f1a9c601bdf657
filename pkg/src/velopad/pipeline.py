"""Frame reconstruction chain: accumulate, square-and-normalize, blur, threshold.

The stages run in fixed order and every intermediate is kept so a UI can
show them side by side. All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .circuit import ADC_COUNTS, NORMALIZED, Frame


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for one capture's post-processing.

    kernel_radius None means ceil(3 * blur_sigma). use_softmax swaps the
    square-and-normalize stage for a softmax sharpening, which works better
    for small glyphs; off by default for consistency.
    """

    frames_per_capture: int = 100
    blur_sigma: float = 0.6
    kernel_radius: Optional[int] = None
    use_softmax: bool = False
    softmax_temperature: float = 0.05  # fraction of the frame maximum

    def __post_init__(self) -> None:
        if self.frames_per_capture < 1:
            raise ValueError("frames_per_capture must be at least 1")
        if self.blur_sigma < 0.0:
            raise ValueError("blur sigma must be nonnegative")
        if self.kernel_radius is not None and self.kernel_radius < 0:
            raise ValueError("kernel radius must be nonnegative")
        if self.softmax_temperature <= 0.0:
            raise ValueError("softmax temperature must be positive")


@dataclass(frozen=True)
class StagedOutput:
    """All four stages of one capture, same dimensions throughout."""

    raw: Frame
    squared_normalized: Frame
    blurred: Frame
    binary: Frame


def accumulate(frames: Sequence[Frame], n: int) -> Frame:
    """Elementwise sum of exactly n frames of equal shape and unit."""
    if len(frames) != n:
        raise ValueError(f"expected exactly {n} frames, got {len(frames)}")
    first = frames[0]
    for f in frames[1:]:
        if f.shape != first.shape:
            raise ValueError("frame dimensions differ")
        if f.unit != first.unit:
            raise ValueError("frame units differ")
    total = np.sum([f.values for f in frames], axis=0)
    return Frame(total, first.unit, provenance=first.provenance)


def square_and_normalize(frame: Frame) -> Frame:
    """Square every value, then divide by the maximum squared value.

    Gives preference to the positions with higher pressure and shrinks
    every sub-maximal ratio, which is what suppresses crosstalk. An
    all-zero frame stays all-zero.
    """
    if np.any(frame.values < 0.0):
        raise ValueError("square_and_normalize expects a nonnegative frame")
    peak = float(frame.values.max(initial=0.0))
    if peak == 0.0:
        return Frame(np.zeros_like(frame.values), NORMALIZED, provenance=frame.provenance)
    # (v/max)^2 equals v^2 / max(v^2) exactly and cannot under/overflow.
    ratio = frame.values / peak
    return Frame(ratio * ratio, NORMALIZED, provenance=frame.provenance)


def softmax_normalize(frame: Frame, temperature: float = 0.05) -> Frame:
    """Softmax sharpening as an optional stand-in for square-and-normalize.

    Temperature is relative to the frame maximum so the operation is scale
    invariant; the output is rescaled to peak at 1.
    """
    if np.any(frame.values < 0.0):
        raise ValueError("softmax_normalize expects a nonnegative frame")
    peak = float(frame.values.max(initial=0.0))
    if peak == 0.0:
        return Frame(frame.values, NORMALIZED, provenance=frame.provenance)
    scaled = (frame.values - peak) / (temperature * peak)
    weights = np.exp(scaled)
    return Frame(weights / weights.max(), NORMALIZED, provenance=frame.provenance)


def _gaussian_kernel_1d(sigma: float, radius: int) -> np.ndarray:
    ks = np.arange(-radius, radius + 1, dtype=np.float64)
    with np.errstate(over="ignore"):  # vanishing sigma degenerates to a delta
        w = np.exp(-0.5 * (ks / sigma) ** 2)
    return w / w.sum()


def gaussian_blur(frame: Frame, sigma: float, kernel_radius: Optional[int] = None) -> Frame:
    """Separable Gaussian blur with replicate borders.

    The 1-D kernel is sampled discretely and normalized to sum 1, so
    constant frames are fixed points and the maximum never grows. sigma 0
    is the identity.
    """
    if sigma < 0.0:
        raise ValueError("blur sigma must be nonnegative")
    if frame.unit == ADC_COUNTS:
        raise ValueError("blur quantized frames after normalization, not before")
    if sigma == 0.0:
        return frame
    radius = int(math.ceil(3.0 * sigma)) if kernel_radius is None else kernel_radius
    if radius == 0:
        return frame
    kernel = _gaussian_kernel_1d(sigma, radius)
    padded = np.pad(frame.values, radius, mode="edge")
    rows, cols = frame.shape
    horiz = np.zeros((rows + 2 * radius, cols))
    for k, w in enumerate(kernel):
        horiz += w * padded[:, k : k + cols]
    out = np.zeros((rows, cols))
    for k, w in enumerate(kernel):
        out += w * horiz[k : k + rows, :]
    # Guard float drift: a convex combination cannot exceed the input range.
    out = np.clip(out, 0.0, float(frame.values.max(initial=0.0)))
    return Frame(out, frame.unit, provenance=frame.provenance)


def adaptive_threshold(frame: Frame) -> Frame:
    """Binarize at the arithmetic mean; strictly greater wins.

    Strict comparison keeps constant frames all-zero instead of all-on.
    """
    mean = float(frame.values.mean())
    binary = (frame.values > mean).astype(np.float64)
    return Frame(binary, NORMALIZED, provenance=frame.provenance)


def run_pipeline(frames: Sequence[Frame], config: PipelineConfig) -> StagedOutput:
    """Chain the stages in order: accumulate, S&N (or softmax), blur, threshold."""
    raw = accumulate(frames, config.frames_per_capture)
    if config.use_softmax:
        sharpened = softmax_normalize(raw, config.softmax_temperature)
    else:
        sharpened = square_and_normalize(raw)
    blurred = gaussian_blur(sharpened, config.blur_sigma, config.kernel_radius)
    binary = adaptive_threshold(blurred)
    return StagedOutput(raw=raw, squared_normalized=sharpened, blurred=blurred, binary=binary)
