import json
import math
import time

import numpy as np
import pytest
from scipy import ndimage

from config.benchmark_config import BenchmarkConfig, load_config, load_detector_params
from detectors import detect_mser
from errors import BenchmarkFailedError, ConfigError, DatasetNotFoundError, InvalidInputError
from evaluation import repeatability
from harness import (
    RESULT_COLUMNS,
    BenchmarkReport,
    CellFailure,
    ConditionSpec,
    downscale,
    ensure_success,
    generate_exposure_series,
    generate_rotation_series,
    generate_scale_series,
    generate_series,
    generate_viewpoint_series,
    load_aloi_subset,
    read_manifest,
    rescale_homography,
    results_csv,
    run_benchmark,
    textured_image,
    viewpoint_homography,
    write_report,
)
from harness.conditions import rotation_homography, scaled_size
from imaging import GrayImage, Homography

SMALL_GRID = {
    "detectors": ["fast_hessian", "brisk"],
    "descriptors": ["surf", "brisk"],
    "families": ["exposure", "rotation"],
    "exposure_evs": [-4.0, 4.0],
    "rotation_angles": [90.0, 180.0],
    "synthetic_subjects": 1,
}


def touch(path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"")
    return path


class TestExposure:
    def test_four_variants_with_identity(self, textured):
        series = generate_exposure_series(textured)
        assert [spec.parameter for spec, _ in series] == [-7.0, -4.0, 4.0, 7.0]
        assert all(spec.ground_truth.allclose(Homography.identity()) for spec, _ in series)

    def test_mid_gray_clamps(self):
        img = GrayImage(np.full((8, 8), 128.0))
        (spec_dark, dark), (spec_bright, bright) = generate_exposure_series(img, [-4.0, 4.0])
        assert np.all(dark.data == 64.0)
        assert np.all(bright.data == 255.0)
        assert spec_bright.label == "exposure=4"


class TestViewpoint:
    @pytest.mark.parametrize("degrees", [-60.0, 20.0, 40.0])
    def test_matches_camera_model(self, degrees):
        w, h = 200, 150
        H = viewpoint_homography(w, h, degrees)
        t = math.radians(degrees)
        cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
        K = np.array([[w, 0.0, cx], [0.0, w, cy], [0.0, 0.0, 1.0]])
        R = np.array([[math.cos(t), 0.0, math.sin(t)], [0.0, 1.0, 0.0], [-math.sin(t), 0.0, math.cos(t)]])
        recentre = np.array([[1.0, 0.0, -w * math.tan(t)], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        expected = recentre @ K @ R @ np.linalg.inv(K)
        assert H.allclose(Homography(expected), atol=1e-9)

    def test_twenty_degrees_reference_values(self):
        H = viewpoint_homography(200, 150, 20.0)
        expected = [[0.8055, 0.0, 4.094], [-0.1148, 0.9010, 7.374], [-0.00154, 0.0, 1.0]]
        assert H.matrix == pytest.approx(np.array(expected), abs=2e-3)

    def test_centre_is_fixed(self):
        H = viewpoint_homography(64, 48, 40.0)
        x, y, _ = H.apply(31.5, 23.5)
        assert (float(x), float(y)) == pytest.approx((31.5, 23.5))

    def test_same_canvas(self, textured):
        series = generate_viewpoint_series(textured, [20.0, -20.0])
        assert all(img.shape == textured.shape for _, img in series)


class TestRotation:
    def test_quarter_turn_is_exact(self):
        data = np.arange(9.0).reshape(3, 3)
        ((spec, out),) = generate_rotation_series(GrayImage(data), [90.0])
        assert out.shape == (3, 3)
        assert np.array_equal(out.data, np.rot90(data, -1))
        x, y, _ = spec.ground_truth.apply(0.0, 0.0)
        assert (float(x), float(y)) == pytest.approx((2.0, 0.0))

    def test_canvas_holds_rotated_image(self):
        H, out_w, out_h = rotation_homography(256, 256, 45.0)
        assert (out_w, out_h) == (362, 362)
        x, y, _ = H.apply(127.5, 127.5)
        assert (float(x), float(y)) == pytest.approx((180.5, 180.5))

    def test_mser_survives_quarter_turn(self, textured):
        ((spec, rotated),) = generate_rotation_series(textured, [90.0])
        kps_a = detect_mser(textured)
        kps_b = detect_mser(rotated)
        size = (textured.width, textured.height)
        assert repeatability(kps_a, kps_b, spec.ground_truth, size, (rotated.width, rotated.height)) >= 0.9


class TestScale:
    @pytest.mark.parametrize("factor,expected", [(0.5, 128), (0.71, 182), (1.41, 360), (2.0, 511)])
    def test_canvas_size(self, factor, expected):
        assert scaled_size(256, 256, factor) == (expected, expected)

    def test_series_homography(self, textured):
        ((spec, out),) = generate_scale_series(textured, [0.5])
        assert spec.ground_truth.allclose(Homography.scaling(0.5))
        assert out.shape == (64, 64)

    def test_generate_series_dispatch(self, textured):
        assert [s.parameter for s, _ in generate_series(textured, "scale", [2.0])] == [2.0]


class TestSyntheticConsistency:
    @pytest.mark.parametrize("family", ["viewpoint", "rotation", "scale"])
    def test_reference_under_ground_truth_reproduces_test(self, family, textured):
        for spec, out in generate_series(textured, family):
            ys, xs = np.mgrid[0:out.height, 0:out.width].astype(np.float64)
            sx, sy, _ = spec.ground_truth.inverse().apply(xs, ys)
            inside = (sx >= 1) & (sx <= textured.width - 2) & (sy >= 1) & (sy <= textured.height - 2)
            assert inside.sum() > 0.2 * out.data.size
            expected = ndimage.map_coordinates(textured.data, [sy[inside], sx[inside]], order=1)
            assert np.max(np.abs(out.data[inside] - expected)) <= 2.0, spec.label


class TestResolution:
    def test_downscale_size(self, textured):
        assert downscale(textured, 0.5).shape == (64, 64)
        assert downscale(textured, 1.0) is textured

    def test_rescaled_homography(self):
        H = Homography.translation(8.0, 4.0)
        assert rescale_homography(H, 0.5).allclose(Homography.translation(4.0, 2.0))
        assert rescale_homography(None, 0.5) is None


class TestConditionSpec:
    def test_labels_and_order(self):
        a = ConditionSpec("rotation", 90.0, None)
        b = ConditionSpec("rotation", 15.0, None)
        c = ConditionSpec("aloi_stereo", "c-l", None)
        assert a.label == "rotation=90"
        assert c.label == "aloi_stereo=c-l"
        assert sorted([a, b, c], key=ConditionSpec.sort_key) == [c, b, a]


class TestSyntheticSubjects:
    def test_deterministic(self):
        assert textured_image(3, size=64) == textured_image(3, size=64)
        assert textured_image(3, size=64) != textured_image(4, size=64)

    def test_range(self):
        img = textured_image(0, size=64)
        assert img.data.min() >= 0.0 and img.data.max() <= 255.0


class TestAloi:
    def test_illumination_direction(self, tmp_path):
        for light in range(1, 9):
            for cam in range(1, 4):
                touch(tmp_path / "aloi" / "1" / f"1_l{light}c{cam}.png")
        touch(tmp_path / "aloi" / "1" / "1_i110.png")
        pairs = load_aloi_subset(tmp_path, "aloi_illum_dir")
        assert len(pairs) == 24
        assert all(p.reference.condition_code == "l8c1" for p in pairs)
        with_truth = [p for p in pairs if p.ground_truth is not None]
        assert sorted(p.parameter for p in with_truth) == [f"l{i}c1" for i in range(1, 9)]

    def test_stereo(self, tmp_path):
        for code in "lcr":
            touch(tmp_path / f"7_{code}.png")
        pairs = load_aloi_subset(tmp_path, "aloi_stereo")
        assert [p.parameter for p in pairs] == ["c-l", "c-r", "l-r"]
        assert all(p.ground_truth is None for p in pairs)

    def test_view_skips_reference(self, tmp_path):
        for code in ("r0", "r5", "r10"):
            touch(tmp_path / f"2_{code}.png")
        pairs = load_aloi_subset(tmp_path, "aloi_view")
        assert [p.parameter for p in pairs] == ["r5", "r10"]

    def test_object_filter(self, tmp_path):
        for obj in ("1", "2"):
            touch(tmp_path / f"{obj}_i250.png")
            touch(tmp_path / f"{obj}_i110.png")
        pairs = load_aloi_subset(tmp_path, "aloi_illum_color", object_ids=["2"])
        assert {p.reference.object_id for p in pairs} == {"2"}

    def test_missing_reference(self, tmp_path):
        touch(tmp_path / "3_r5.png")
        with pytest.raises(DatasetNotFoundError):
            load_aloi_subset(tmp_path, "aloi_view")

    def test_missing_root(self, tmp_path):
        with pytest.raises(DatasetNotFoundError):
            load_aloi_subset(tmp_path / "absent", "aloi_view")

    def test_manifest(self, tmp_path):
        touch(tmp_path / "img" / "4_i250.png")
        touch(tmp_path / "img" / "4_i110.png")
        rows = [
            {"path": "img/4_i250.png", "object_id": "4", "family": "aloi_illum_color",
             "condition_code": "i250", "role": "reference"},
            {"path": "img/4_i110.png", "object_id": "4", "family": "aloi_illum_color",
             "condition_code": "i110", "role": "test"},
            {"path": "img/4_i170.png", "object_id": "4", "family": "aloi_illum_color",
             "condition_code": "i170", "role": "test"},
        ]
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps(rows))
        assert len(read_manifest(manifest)) == 3
        pairs = load_aloi_subset(None, "aloi_illum_color", manifest=manifest)
        assert [p.parameter for p in pairs] == ["i110"]
        assert pairs[0].ground_truth.allclose(Homography.identity())

    def test_manifest_rejects_bad_code(self, tmp_path):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps([{"path": "x.png", "object_id": "1", "family": "aloi_view",
                                         "condition_code": "l1c1", "role": "test"}]))
        with pytest.raises(InvalidInputError):
            read_manifest(manifest)


class TestBenchmarkConfig:
    def test_needs_inputs(self):
        with pytest.raises(ConfigError):
            BenchmarkConfig.from_mapping({})

    def test_aloi_families_need_a_source(self):
        with pytest.raises(ConfigError):
            BenchmarkConfig.from_mapping({"families": ["aloi_view"]})

    @pytest.mark.parametrize("bad", [
        {"detectors": ["dog", "dog"]},
        {"detectors": []},
        {"resolutions": [0.3]},
        {"scale_factors": [-1.0]},
        {"ratio": 1.0},
        {"colour": "red"},
    ])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            BenchmarkConfig.from_mapping({"synthetic_subjects": 1, **bad})

    def test_digest_is_stable(self):
        a = BenchmarkConfig.from_mapping({"synthetic_subjects": 1})
        b = BenchmarkConfig.from_mapping({"synthetic_subjects": 1})
        c = BenchmarkConfig.from_mapping({"synthetic_subjects": 2})
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()
        assert len(a.digest()) == 64

    def test_load_toml_and_json(self, tmp_path):
        toml = tmp_path / "bench.toml"
        toml.write_text('detectors = ["dog"]\nsynthetic_subjects = 1\n\n[detector_params.dog]\noctaves = 3\n')
        cfg = load_config(toml)
        assert cfg.detectors == ["dog"]
        assert cfg.detector_params.dog.octaves == 3

        js = tmp_path / "bench.json"
        js.write_text(json.dumps({"synthetic_subjects": 1, "families": ["scale"]}))
        assert load_config(js).families == ["scale"]

    def test_load_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.toml")
        bad = tmp_path / "bench.yaml"
        bad.write_text("a: 1")
        with pytest.raises(ConfigError):
            load_config(bad)
        broken = tmp_path / "bench.json"
        broken.write_text("{")
        with pytest.raises(ConfigError):
            load_config(broken)

    def test_detector_params_file(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text(json.dumps({"mser": {"delta": 3}}))
        assert load_detector_params(path).mser.delta == 3
        path.write_text(json.dumps({"mser": {"delta": 0}}))
        with pytest.raises(ConfigError):
            load_detector_params(path)

    def test_thread_override(self, monkeypatch):
        cfg = BenchmarkConfig.from_mapping({"synthetic_subjects": 1, "threads": 2})
        monkeypatch.delenv("FEATBENCH_THREADS", raising=False)
        assert cfg.effective_threads() == 2
        monkeypatch.setenv("FEATBENCH_THREADS", "5")
        assert cfg.effective_threads() == 5
        monkeypatch.setenv("FEATBENCH_THREADS", "many")
        with pytest.raises(ConfigError):
            cfg.effective_threads()


@pytest.fixture(scope="module")
def small_report():
    with pytest.MonkeyPatch.context() as mp:
        mp.delenv("FEATBENCH_THREADS", raising=False)
        return run_benchmark(BenchmarkConfig.from_mapping(SMALL_GRID))


class TestRunBenchmark:
    def test_grid_size(self, small_report):
        assert len(small_report.records) + len(small_report.failures) == 16
        assert small_report.failures == []
        assert len(small_report.subject_records) == 16

    def test_records_sorted(self, small_report):
        keys = [r.sort_key() for r in small_report.records]
        assert keys == sorted(keys)

    def test_every_cell_has_ground_truth(self, small_report):
        for r in small_report.records:
            assert r.record.repeatability is not None
            assert 0.0 <= r.record.repeatability <= 1.0
            assert r.record.n_correct_matches <= r.record.n_matches

    def test_unchanged_exposure_is_fully_repeatable(self, monkeypatch):
        monkeypatch.delenv("FEATBENCH_THREADS", raising=False)
        cfg = BenchmarkConfig.from_mapping({**SMALL_GRID, "families": ["exposure"], "exposure_evs": [0.0]})
        report = run_benchmark(cfg)
        assert report.records
        assert all(r.record.repeatability == 1.0 for r in report.records)

    def test_thread_count_does_not_change_results(self, small_report, monkeypatch):
        monkeypatch.delenv("FEATBENCH_THREADS", raising=False)
        parallel = run_benchmark(BenchmarkConfig.from_mapping({**SMALL_GRID, "threads": 8}))
        assert results_csv(parallel.records) == results_csv(small_report.records)
        assert results_csv(parallel.subject_records, by_subject=True) == \
            results_csv(small_report.subject_records, by_subject=True)


@pytest.mark.slow
def test_desk_benchmark_runs_single_threaded_in_five_minutes(monkeypatch):
    monkeypatch.delenv("FEATBENCH_THREADS", raising=False)
    cfg = BenchmarkConfig.from_mapping({
        "families": ["exposure", "rotation", "scale"],
        "synthetic_subjects": 3,
        "resolutions": [1.0, 0.5, 0.25],
        "threads": 1,
    })
    started = time.perf_counter()
    report = run_benchmark(cfg)
    elapsed = time.perf_counter() - started
    assert report.failures == []
    assert report.records
    assert elapsed < 300.0


class TestEnsureSuccess:
    def failure(self, i):
        return CellFailure("rotation", float(i), "dog", "sift", 1.0, "boom")

    def test_majority_failed(self):
        report = BenchmarkReport([], [], [self.failure(i) for i in range(3)], "d", 0.0)
        with pytest.raises(BenchmarkFailedError) as exc:
            ensure_success(report)
        assert exc.value.failed == 3 and exc.value.total == 3

    def test_half_failed_is_fine(self, small_report):
        report = BenchmarkReport(small_report.records[:2], [], [self.failure(0), self.failure(1)], "d", 0.0)
        ensure_success(report)


class TestWriteReport:
    def test_empty_report(self, tmp_path):
        written = write_report(BenchmarkReport([], [], [], "d", 0.0), tmp_path)
        assert {p.name for p in written} == {"results.csv", "results_by_subject.csv", "run_metadata.json"}
        assert (tmp_path / "results.csv").read_text() == ",".join(RESULT_COLUMNS) + "\n"
        assert not list(tmp_path.glob("*.svg"))

    def test_full_report(self, small_report, tmp_path):
        write_report(small_report, tmp_path)
        lines = (tmp_path / "results.csv").read_text().splitlines()
        assert lines[0] == ",".join(RESULT_COLUMNS)
        assert len(lines) == 17
        assert all(line.endswith(",") for line in lines[1:])
        assert (tmp_path / "exposure.svg").is_file()
        assert (tmp_path / "rotation.svg").is_file()
        meta = json.loads((tmp_path / "run_metadata.json").read_text())
        assert meta["cells"] == 16
        assert meta["failed_cells"] == []
        assert len(meta["config_digest"]) == 64
