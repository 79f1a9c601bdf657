import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from velopad import (
    CrosstalkAboveUnityWarning,
    CrosstalkInput,
    Frame,
    MechanismFlags,
    ReadoutConfig,
    SensorGeometry,
    UndefinedMetricError,
    VelostatModel,
    WeightStimulus,
    characterize,
    crosstalk,
    crosstalk_frame,
    neighborhood,
    rasterize_stimulus,
    scan_frame,
)
from velopad.crosstalk import CrosstalkReport, report_dict, report_lines

SQRT2 = math.sqrt(2.0)


class TestNeighborhood:
    def test_corner_members(self):
        hood = neighborhood((0, 0), 5, 5)
        assert hood.kind == "corner"
        members = dict(hood.members)
        assert members == {(0, 1): 1.0, (1, 0): 1.0, (1, 1): pytest.approx(SQRT2)}

    def test_edge_pixel(self):
        hood = neighborhood((0, 2), 5, 5)
        assert hood.kind == "edge"
        assert len(hood.members) == 5

    def test_center_pixel(self):
        hood = neighborhood((2, 2), 5, 5)
        assert hood.kind == "center"
        assert len(hood.members) == 8

    def test_excludes_stimulated(self):
        hood = neighborhood((1, 1), 3, 3)
        assert (1, 1) not in {pix for pix, _ in hood.members}

    def test_out_of_grid_rejected(self):
        with pytest.raises(IndexError):
            neighborhood((5, 0), 5, 5)

    def test_tiny_grid_rejected(self):
        with pytest.raises(ValueError):
            neighborhood((0, 0), 1, 5)

    @given(rows=st.integers(3, 20), cols=st.integers(3, 20))
    def test_census_matches_closed_form(self, rows, cols):
        counts = {"corner": 0, "edge": 0, "center": 0}
        for r in range(rows):
            for c in range(cols):
                counts[neighborhood((r, c), rows, cols).kind] += 1
        assert counts["corner"] == 4
        assert counts["edge"] == 2 * (rows - 2) + 2 * (cols - 2)
        assert counts["center"] == (rows - 2) * (cols - 2)


class TestCrosstalkMetric:
    def test_worked_corner_example(self):
        inp = CrosstalkInput(p0=1.94, neighbors=((1.0, 0.15), (SQRT2, 0.0), (1.0, 0.04)))
        assert crosstalk(inp) == pytest.approx(0.02868, abs=1e-4)

    def test_all_neighbors_zero(self):
        inp = CrosstalkInput(p0=2.0, neighbors=((1.0, 0.0), (SQRT2, 0.0)))
        assert crosstalk(inp) == 0.0

    def test_all_neighbors_equal_p0(self):
        inp = CrosstalkInput(p0=2.0, neighbors=((1.0, 2.0), (SQRT2, 2.0), (1.0, 2.0)))
        assert crosstalk(inp) == pytest.approx(1.0)

    @given(r=st.floats(0.0, 1.0), p0=st.floats(1e-3, 1e3))
    def test_uniform_ratio(self, r, p0):
        inp = CrosstalkInput(p0=p0, neighbors=tuple((d, r * p0) for d in (1, 1, SQRT2)))
        assert crosstalk(inp) == pytest.approx(r, rel=1e-9, abs=1e-12)

    def test_undefined_for_zero_p0(self):
        with pytest.raises(UndefinedMetricError):
            crosstalk(CrosstalkInput(p0=0.0, neighbors=((1.0, 0.5),)))

    def test_empty_neighborhood_rejected(self):
        with pytest.raises(ValueError):
            crosstalk(CrosstalkInput(p0=1.0, neighbors=()))

    def test_above_unity_unclamped_with_warning(self):
        inp = CrosstalkInput(p0=1.0, neighbors=((1.0, 3.0),))
        with pytest.warns(CrosstalkAboveUnityWarning):
            value = crosstalk(inp)
        assert value == pytest.approx(3.0)

    @pytest.mark.filterwarnings("ignore::velopad.CrosstalkAboveUnityWarning")
    @given(
        k=st.floats(1e-6, 1e6),
        p0=st.floats(1e-3, 1e3),
        readings=st.lists(st.floats(0.0, 1e3), min_size=1, max_size=8),
    )
    def test_scale_invariance(self, k, p0, readings):
        dists = [1.0 + (i % 2) * (SQRT2 - 1.0) for i in range(len(readings))]
        base = CrosstalkInput(p0=p0, neighbors=tuple(zip(dists, readings)))
        scaled = CrosstalkInput(p0=k * p0, neighbors=tuple((d, k * p) for d, p in zip(dists, readings)))
        assert crosstalk(scaled) == pytest.approx(crosstalk(base), rel=1e-9, abs=1e-12)

    @given(
        p0=st.floats(0.5, 100.0),
        readings=st.lists(st.floats(0.0, 0.999), min_size=1, max_size=8),
    )
    def test_bounds_when_neighbors_below_p0(self, p0, readings):
        pairs = tuple((1.0, r * p0) for r in readings)
        value = crosstalk(CrosstalkInput(p0=p0, neighbors=pairs))
        assert 0.0 <= value <= 1.0

    def test_monotone_in_neighbor_reading_and_p0(self):
        base = CrosstalkInput(p0=2.0, neighbors=((1.0, 0.2), (SQRT2, 0.1)))
        more = CrosstalkInput(p0=2.0, neighbors=((1.0, 0.5), (SQRT2, 0.1)))
        stronger = CrosstalkInput(p0=3.0, neighbors=((1.0, 0.2), (SQRT2, 0.1)))
        assert crosstalk(more) > crosstalk(base)
        assert crosstalk(stronger) < crosstalk(base)

    def test_distance_weighting_strict(self):
        # The same reading further out is worse: the measure penalizes
        # distant pixels that light up.
        near = CrosstalkInput(p0=1.0, neighbors=((1.0, 0.3), (SQRT2, 0.0)))
        far = CrosstalkInput(p0=1.0, neighbors=((1.0, 0.0), (SQRT2, 0.3)))
        assert crosstalk(far) > crosstalk(near)

    def test_input_invariants(self):
        with pytest.raises(ValueError):
            CrosstalkInput(p0=1.0, neighbors=((0.0, 0.5),))
        with pytest.raises(ValueError):
            CrosstalkInput(p0=1.0, neighbors=((1.0, -0.5),))


class TestCrosstalkFrame:
    def test_unit_impulse(self):
        values = np.zeros((5, 5))
        values[2, 2] = 1.0
        assert crosstalk_frame(Frame(values, "volts"), (2, 2)) == 0.0

    def test_uniform_frame(self):
        frame = Frame(np.full((4, 4), 0.7), "volts")
        assert crosstalk_frame(frame, (1, 1)) == pytest.approx(1.0)

    def test_zero_stimulated_pixel_rejected(self):
        frame = Frame(np.ones((3, 3)), "volts")
        values = frame.values.copy()
        values[1, 1] = 0.0
        with pytest.raises(UndefinedMetricError):
            crosstalk_frame(Frame(values, "volts"), (1, 1))

    def test_simulated_center_matches_direct_recomputation(self):
        # Spreadsheet-style oracle: rebuild the metric from the frame's nine
        # entries by hand and compare.
        g = SensorGeometry(rows=5, cols=5, pitch=4e-3, line_width=0.254e-3)
        model = VelostatModel()
        cfg = ReadoutConfig()
        field, _ = rasterize_stimulus([WeightStimulus((2, 2), 0.5)], g, 0.5 * g.pitch)
        frame = scan_frame(g, field, model, cfg)
        got = crosstalk_frame(frame, (2, 2))

        v = frame.values
        num = 0.0
        den = 0.0
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == dc == 0:
                    continue
                d = math.hypot(dr, dc)
                num += d * v[2 + dr, 2 + dc]
                den += d
        expected = num / (v[2, 2] * den)
        assert got == pytest.approx(expected, rel=1e-12)
        assert 0.0 < got < 1.0

    def test_custom_neighborhood_override(self):
        values = np.zeros((4, 4))
        values[0, 0] = 2.0
        values[3, 3] = 1.0
        frame = Frame(values, "volts")
        members = (((3, 3), math.hypot(3, 3)),)
        assert crosstalk_frame(frame, (0, 0), members=members) == pytest.approx(0.5)


class TestCharacterize:
    def test_per_pixel_counts(self, model):
        g = SensorGeometry(rows=5, cols=5, pitch=4e-3, line_width=0.254e-3)
        cfg = ReadoutConfig()
        reports = characterize(g, model, cfg, weights_kg=[0.5], pitches=[4e-3],
                               per_pixel=True, diffusion_sigma=1e-3)
        assert len(reports) == 1
        assert len(reports[0].per_pixel) == 25

    def test_mechanisms_off_gives_zero(self, model):
        g = SensorGeometry(rows=3, cols=3, pitch=4e-3, line_width=0.254e-3)
        cfg = ReadoutConfig(mechanisms=MechanismFlags.none())
        reports = characterize(g, model, cfg, weights_kg=[0.5], pitches=[4e-3],
                               per_pixel=True, diffusion_sigma=2e-3)
        report = reports[0]
        assert report.mean == 0.0
        assert all(v == 0.0 for _, v in report.per_pixel)

    def test_pitch_trend_strictly_decreasing(self, model):
        g = SensorGeometry(rows=3, cols=3, pitch=1e-2, line_width=0.254e-3)
        cfg = ReadoutConfig()
        pitches = [0.01, 0.02, 0.03, 0.04, 0.05]
        reports = characterize(g, model, cfg, weights_kg=[0.5], pitches=pitches,
                               diffusion_sigma=8e-3)
        means = [r.mean for r in reports]
        assert [r.pitch for r in reports] == pitches
        assert all(b < a for a, b in zip(means, means[1:]))

    def test_reports_sorted_by_pitch_then_weight(self, model):
        g = SensorGeometry(rows=3, cols=3, pitch=3e-3, line_width=0.254e-3)
        cfg = ReadoutConfig()
        reports = characterize(g, model, cfg, weights_kg=[1.0, 0.5],
                               pitches=[5e-3, 3e-3], diffusion_sigma=1e-3)
        keys = [(r.pitch, r.weight_kg) for r in reports]
        assert keys == sorted(keys)

    def test_statistics_recomputable(self, model):
        g = SensorGeometry(rows=3, cols=3, pitch=4e-3, line_width=0.254e-3)
        cfg = ReadoutConfig()
        report = characterize(g, model, cfg, weights_kg=[0.5], pitches=[4e-3],
                              per_pixel=True, diffusion_sigma=2e-3)[0]
        values = np.array([v for _, v in report.per_pixel])
        assert report.mean == pytest.approx(values.mean(), abs=1e-12)
        assert report.std == pytest.approx(values.std(), abs=1e-12)
        assert report.min == pytest.approx(values.min(), abs=1e-12)
        assert report.max == pytest.approx(values.max(), abs=1e-12)

    def test_empty_sweep_rejected(self, model):
        g = SensorGeometry(rows=3, cols=3, pitch=4e-3, line_width=0.254e-3)
        with pytest.raises(ValueError):
            characterize(g, model, ReadoutConfig(), weights_kg=[], pitches=[4e-3])


class TestReportRendering:
    def _report(self):
        return CrosstalkReport.from_values(
            pitch=4e-3,
            weight_kg=0.5,
            mechanisms=MechanismFlags(),
            per_pixel=[((0, 0), 0.1), ((0, 1), 0.3)],
        )

    def test_lines_contain_stats(self):
        lines = report_lines(self._report())
        assert any("mean=0.2" in line for line in lines)
        assert lines[0].startswith("pitch_mm=4")

    def test_dict_round_trips_values(self):
        d = report_dict(self._report())
        assert d["mean"] == pytest.approx(0.2)
        assert len(d["per_pixel"]) == 2
