"""Crossbar electrical model and raster-scan readout.

Pressure-to-resistance law for velostat pixels, resistor-network
construction including both electrical crosstalk causes (finite
off-resistance sneak paths and lateral sheet conduction), per-pixel
readout by nodal analysis of a bias-resistor divider, and ADC
quantization.

All operations are pure; independent read_pixel solves may run in
parallel. Measurement noise is drawn as one seeded matrix per frame, so
parallel and serial scans agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import PressureField, SensorGeometry

# Lateral sheet resistance is specified between adjacent crossovers at this
# pitch; other pitches scale it linearly (longer gap, larger resistance).
REFERENCE_PITCH = 3e-3

VOLTS = "volts"
ADC_COUNTS = "adc_counts"
NORMALIZED = "normalized"
FRAME_UNITS = (VOLTS, ADC_COUNTS, NORMALIZED)


@dataclass(frozen=True)
class VelostatModel:
    """Pressure-to-resistance law plus the two electrical crosstalk causes.

    R(p) = r_on + (r_off - r_on) / (1 + (p/p_half)^gamma), strictly
    decreasing from r_off at rest to r_on under saturation. Defaults are
    calibration knobs: p_half is chosen so a 0.5 kg weight on one pixel
    lands the divider near its sensitive region.
    """

    r_off: float = 100e3
    r_on: float = 200.0
    p_half: float = 0.44
    gamma: float = 2.0
    r_sheet: float = 10e3  # ohms between adjacent crossovers; math.inf disables

    def __post_init__(self) -> None:
        if not (self.r_off > self.r_on > 0.0):
            raise ValueError("require r_off > r_on > 0")
        if self.p_half <= 0.0 or self.gamma <= 0.0:
            raise ValueError("p_half and gamma must be positive")
        if not self.r_sheet > 0.0:
            raise ValueError("r_sheet must be positive (inf to disable)")


def velostat_resistance(p, model: VelostatModel):
    """Pixel resistance in ohms for applied pressure p (scalar or array)."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0.0):
        raise ValueError("pressure must be nonnegative")
    r = model.r_on + (model.r_off - model.r_on) / (1.0 + (arr / model.p_half) ** model.gamma)
    return float(r) if np.isscalar(p) or arr.ndim == 0 else r


@dataclass(frozen=True)
class MechanismFlags:
    """Ideal on/off switches for the three crosstalk causes."""

    sheet_paths: bool = True
    finite_off: bool = True
    diffusion: bool = True

    @classmethod
    def none(cls) -> "MechanismFlags":
        return cls(sheet_paths=False, finite_off=False, diffusion=False)

    @classmethod
    def all_on(cls) -> "MechanismFlags":
        return cls()

    def names(self) -> list[str]:
        out = []
        if self.sheet_paths:
            out.append("sheet_paths")
        if self.finite_off:
            out.append("finite_off")
        if self.diffusion:
            out.append("diffusion")
        return out

    @classmethod
    def from_names(cls, names) -> "MechanismFlags":
        allowed = {"sheet_paths", "finite_off", "diffusion"}
        chosen = set(names)
        if chosen == {"all"}:
            return cls.all_on()
        if chosen in ({"none"}, set()):
            return cls.none()
        unknown = chosen - allowed
        if unknown:
            raise ValueError(f"unknown mechanism names: {sorted(unknown)}")
        return cls(
            sheet_paths="sheet_paths" in chosen,
            finite_off="finite_off" in chosen,
            diffusion="diffusion" in chosen,
        )


@dataclass(frozen=True)
class ReadoutConfig:
    """Divider drive, ADC, and capture parameters.

    The supply and ADC resolution are knobs, defaulted to the 3.3 V /
    10-bit microcontroller class used for this kind of readout. Unselected
    electrodes float by default; ground_unused is an optional mitigation
    experiment, off by default.
    """

    v_dd: float = 3.3
    r_bias: float = 1000.0
    adc_bits: int = 10
    frame_period: float = 0.1
    frames_per_capture: int = 100
    mechanisms: MechanismFlags = field(default_factory=MechanismFlags)
    ground_unused: bool = False
    noise_sigma_v: float = 0.0

    def __post_init__(self) -> None:
        if self.v_dd <= 0.0:
            raise ValueError("v_dd must be positive")
        if self.r_bias <= 0.0:
            raise ValueError("r_bias must be positive")
        if not 1 <= self.adc_bits <= 16:
            raise ValueError("adc_bits must be in [1, 16]")
        if self.frame_period <= 0.0:
            raise ValueError("frame_period must be positive")
        if self.frames_per_capture < 1:
            raise ValueError("frames_per_capture must be at least 1")
        if self.noise_sigma_v < 0.0:
            raise ValueError("noise sigma must be nonnegative")

    @property
    def capture_period(self) -> float:
        return self.frame_period * self.frames_per_capture

    @property
    def adc_full_scale(self) -> int:
        return (1 << self.adc_bits) - 1


@dataclass(frozen=True)
class Frame:
    """One rows x cols matrix of readings, the currency of the pipeline."""

    values: np.ndarray
    unit: str = VOLTS
    provenance: str = "sim"

    def __post_init__(self) -> None:
        if self.unit not in FRAME_UNITS:
            raise ValueError(f"unit must be one of {FRAME_UNITS}")
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("frame values must be a 2-D matrix")
        if not np.all(np.isfinite(arr)):
            raise ValueError("frame values must be finite")
        if self.unit == ADC_COUNTS:
            if np.any(arr < 0.0) or np.any(arr != np.round(arr)):
                raise ValueError("adc_counts frames must hold nonnegative integers")
        elif self.unit == NORMALIZED:
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ValueError("normalized frames must lie in [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]


@dataclass(frozen=True)
class ResistorNetwork:
    """Assembled crossbar resistor graph for one pressure field.

    Node order: row electrodes, then column electrodes, then (with sheet
    paths) one junction node per crossover. The Laplacian and connected
    component labels are precomputed. Junction nodes never carry boundary
    conditions, so readout eliminates them once per component (exact block
    Gaussian elimination) and then reduces the small electrode system per
    selection, because the driven/grounded electrode set changes with each
    one.
    """

    rows: int
    cols: int
    node_count: int
    branch_a: np.ndarray
    branch_b: np.ndarray
    conductance: np.ndarray
    pixel_count: int
    lateral_count: int
    laplacian: np.ndarray
    component: np.ndarray

    def __post_init__(self) -> None:
        # Per-component electrode-condensed systems, filled on first use.
        # Entries are deterministic, so a racing recompute is harmless.
        object.__setattr__(self, "_condensed", {})

    def row_node(self, i: int) -> int:
        return i

    def col_node(self, j: int) -> int:
        return self.rows + j

    def junction_node(self, i: int, j: int) -> int:
        return self.rows + self.cols + i * self.cols + j

    def condensed_component(self, comp_id: int) -> tuple[np.ndarray, np.ndarray]:
        """Electrode nodes of one component and their condensed Laplacian.

        Junction unknowns are eliminated exactly: S = L_ee - L_ej L_jj^-1 L_je.
        L_jj is positive definite because the component is connected and
        contains at least one electrode.
        """
        cached = self._condensed.get(comp_id)  # type: ignore[attr-defined]
        if cached is not None:
            return cached
        members = np.flatnonzero(self.component == comp_id)
        n_elec = self.rows + self.cols
        elec = members[members < n_elec]
        junc = members[members >= n_elec]
        lap = self.laplacian
        if junc.size:
            ljj = lap[np.ix_(junc, junc)]
            lje = lap[np.ix_(junc, elec)]
            condensed = lap[np.ix_(elec, elec)] - lap[np.ix_(elec, junc)] @ np.linalg.solve(ljj, lje)
        else:
            condensed = lap[np.ix_(elec, elec)].copy()
        out = (elec, condensed)
        self._condensed[comp_id] = out  # type: ignore[attr-defined]
        return out


def _connected_components(n_nodes: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    labels = np.full(n_nodes, -1, dtype=np.int64)
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    for u, v in zip(a.tolist(), b.tolist()):
        adj[u].append(v)
        adj[v].append(u)
    current = 0
    for start in range(n_nodes):
        if labels[start] != -1:
            continue
        stack = [start]
        labels[start] = current
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if labels[v] == -1:
                    labels[v] = current
                    stack.append(v)
        current += 1
    return labels


def build_network(
    geometry: SensorGeometry,
    field_: PressureField,
    model: VelostatModel,
    mechanisms: MechanismFlags,
) -> ResistorNetwork:
    """Assemble the resistor network for one pressure field.

    Every crossover with a conducting vertical path contributes one pixel
    resistor R(p). With finite_off disabled, unpressed pixels are open
    circuits. With sheet paths enabled, each crossover gains a junction
    node in the velostat: the pixel resistance splits into two halves
    around it and lateral resistors connect adjacent junctions.
    """
    rows, cols = geometry.rows, geometry.cols
    if field_.shape != (rows, cols):
        raise ValueError("pressure field dimensions do not match geometry")
    p = field_.values
    sheet_on = mechanisms.sheet_paths and math.isfinite(model.r_sheet)
    node_count = rows + cols + (rows * cols if sheet_on else 0)

    conducting = np.ones((rows, cols), dtype=bool) if mechanisms.finite_off else p > 0.0
    resistance = velostat_resistance(p, model)

    a: list[int] = []
    b: list[int] = []
    g: list[float] = []
    pixel_count = 0
    lateral_count = 0

    def row_node(i: int) -> int:
        return i

    def col_node(j: int) -> int:
        return rows + j

    def junction(i: int, j: int) -> int:
        return rows + cols + i * cols + j

    for i in range(rows):
        for j in range(cols):
            if not conducting[i, j]:
                continue
            r = float(resistance[i, j])
            pixel_count += 1
            if sheet_on:
                half_g = 2.0 / r
                a.append(row_node(i)), b.append(junction(i, j)), g.append(half_g)
                a.append(junction(i, j)), b.append(col_node(j)), g.append(half_g)
            else:
                a.append(row_node(i)), b.append(col_node(j)), g.append(1.0 / r)

    if sheet_on:
        lateral_g = 1.0 / (model.r_sheet * geometry.pitch / REFERENCE_PITCH)
        for i in range(rows):
            for j in range(cols):
                if j + 1 < cols:
                    a.append(junction(i, j)), b.append(junction(i, j + 1)), g.append(lateral_g)
                    lateral_count += 1
                if i + 1 < rows:
                    a.append(junction(i, j)), b.append(junction(i + 1, j)), g.append(lateral_g)
                    lateral_count += 1

    branch_a = np.asarray(a, dtype=np.int64)
    branch_b = np.asarray(b, dtype=np.int64)
    conductance = np.asarray(g, dtype=np.float64)

    lap = np.zeros((node_count, node_count))
    np.add.at(lap, (branch_a, branch_a), conductance)
    np.add.at(lap, (branch_b, branch_b), conductance)
    np.add.at(lap, (branch_a, branch_b), -conductance)
    np.add.at(lap, (branch_b, branch_a), -conductance)

    component = _connected_components(node_count, branch_a, branch_b)

    return ResistorNetwork(
        rows=rows,
        cols=cols,
        node_count=node_count,
        branch_a=branch_a,
        branch_b=branch_b,
        conductance=conductance,
        pixel_count=pixel_count,
        lateral_count=lateral_count,
        laplacian=lap,
        component=component,
    )


def read_pixel(
    network: ResistorNetwork,
    selected: tuple[int, int],
    config: ReadoutConfig,
) -> float:
    """Voltage across the bias resistor when pixel ``selected`` is scanned.

    The selected row electrode is driven at v_dd, the selected column is
    tied to ground through r_bias, and all other electrodes float (or are
    grounded when config.ground_unused). Sneak paths through unselected
    pixels and sheet resistors contribute exactly as the network dictates.
    A network with no conducting path to the selected column reads 0 V by
    convention.
    """
    i, j = selected
    if not (0 <= i < network.rows and 0 <= j < network.cols):
        raise IndexError(f"pixel ({i}, {j}) outside {network.rows}x{network.cols} grid")
    drive = network.row_node(i)
    sense = network.col_node(j)
    if network.component[drive] != network.component[sense]:
        return 0.0

    elec, condensed = network.condensed_component(int(network.component[drive]))
    pos = {int(n): k for k, n in enumerate(elec)}
    fixed = {pos[drive]}
    if config.ground_unused:
        # Grounded electrodes sit at 0 V: they drop out of the unknowns and
        # contribute nothing to the right-hand side.
        for node in elec:
            if node != drive and node != sense:
                fixed.add(pos[int(node)])

    keep = [k for k in range(len(elec)) if k not in fixed]
    kidx = {k: m for m, k in enumerate(keep)}
    A = condensed[np.ix_(keep, keep)].copy()
    A[kidx[pos[sense]], kidx[pos[sense]]] += 1.0 / config.r_bias
    rhs = -config.v_dd * condensed[keep, pos[drive]]
    x = np.linalg.solve(A, rhs)
    v = float(x[kidx[pos[sense]]])
    return min(max(v, 0.0), config.v_dd)


def scan_frame(
    geometry: SensorGeometry,
    field_: PressureField,
    model: VelostatModel,
    config: ReadoutConfig,
    noise_seed: Optional[int] = None,
) -> Frame:
    """Raster-scan every pixel in row-major order into a volts frame.

    The diffusion mechanism flag is consumed upstream at rasterization;
    here only sheet_paths and finite_off shape the network. Additive
    Gaussian measurement noise (config.noise_sigma_v) is drawn once per
    frame from the seed, so equal seeds give bit-identical frames.
    """
    network = build_network(geometry, field_, model, config.mechanisms)
    values = np.zeros((geometry.rows, geometry.cols))
    for i in range(geometry.rows):
        for j in range(geometry.cols):
            values[i, j] = read_pixel(network, (i, j), config)
    if config.noise_sigma_v > 0.0:
        rng = np.random.default_rng(noise_seed)
        values = values + rng.normal(0.0, config.noise_sigma_v, values.shape)
    return Frame(values, VOLTS)


def adc_quantize(frame: Frame, config: ReadoutConfig) -> Frame:
    """Quantize a volts frame to ADC counts, rounding half up."""
    if frame.unit != VOLTS:
        raise ValueError("adc_quantize expects a volts frame")
    full_scale = config.adc_full_scale
    clamped = np.clip(frame.values, 0.0, config.v_dd)
    counts = np.floor(clamped / config.v_dd * full_scale + 0.5)
    return Frame(counts, ADC_COUNTS, provenance=frame.provenance)
