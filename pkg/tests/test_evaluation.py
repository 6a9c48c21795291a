import math

import numpy as np
import pytest

from detectors import DETECTORS, Keypoint
from errors import InvalidInputError, InvalidParameterError, ProjectionError
from evaluation import (
    evaluate_image_pair,
    find_correspondences,
    find_correspondences_with_counts,
    project_keypoint,
    repeatability,
    score_matches,
    visible,
)
from harness.synthetic import textured_image
from imaging import GrayImage, Homography
from matching import MatchPair

SIZE = (100, 100)


def grid_keypoints(n=4, scale=2.0, step=15.0, origin=20.0):
    return [Keypoint(origin + step * i, origin + step * j, scale) for j in range(n) for i in range(n)]


class TestProjection:
    def test_identity(self):
        kp = Keypoint(12.0, 7.0, 3.0, 0.4)
        assert project_keypoint(kp, Homography.identity()) == kp

    def test_translation(self):
        kp = project_keypoint(Keypoint(12.0, 7.0, 3.0), Homography.translation(5.0, -3.0))
        assert (kp.x, kp.y, kp.scale) == pytest.approx((17.0, 4.0, 3.0))

    def test_scaling(self):
        kp = project_keypoint(Keypoint(10.0, 20.0, 1.5), Homography.scaling(2.0))
        assert (kp.x, kp.y, kp.scale) == pytest.approx((20.0, 40.0, 3.0))

    def test_perspective_scale(self):
        H = Homography(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.001, 0.0, 1.0]]))
        kp = project_keypoint(Keypoint(100.0, 50.0, 2.0), H)
        assert kp.x == pytest.approx(100.0 / 1.1)
        assert kp.y == pytest.approx(50.0 / 1.1)
        assert kp.scale == pytest.approx(2.0 * math.sqrt(1.0 / 1.1 ** 3))

    def test_point_at_infinity(self):
        H = Homography(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 10.0]]))
        with pytest.raises(ProjectionError):
            project_keypoint(Keypoint(10.0, 5.0, 1.0), H)

    @pytest.mark.parametrize("matrix", [
        [[1.3, 0.4, 5.0], [-0.2, 0.8, -3.0], [0.0, 0.0, 1.0]],
        [[0.7, -0.5, 12.0], [0.6, 1.1, 2.0], [0.0, 0.0, 1.0]],
        [[1.0, 0.1, 0.0], [0.05, 0.9, 0.0], [0.0008, -0.0005, 1.0]],
    ])
    def test_scale_matches_finite_difference_jacobian(self, matrix):
        H = Homography(np.array(matrix))
        x, y, h = 37.0, 52.0, 1e-4

        def at(px, py):
            u, v, _ = H.apply(px, py)
            return np.array([float(u), float(v)])

        J = np.column_stack([(at(x + h, y) - at(x - h, y)) / (2 * h), (at(x, y + h) - at(x, y - h)) / (2 * h)])
        kp = project_keypoint(Keypoint(x, y, 2.0), H)
        assert kp.scale == pytest.approx(2.0 * math.sqrt(abs(np.linalg.det(J))), rel=1e-6)


class TestVisibility:
    def test_margin_scales_with_keypoint(self):
        assert visible(Keypoint(4.0, 50.0, 2.0), SIZE)
        assert not visible(Keypoint(3.9, 50.0, 2.0), SIZE)
        assert not visible(Keypoint(50.0, 96.0, 2.0), SIZE)
        assert visible(Keypoint(50.0, 95.0, 2.0), SIZE)


class TestCorrespondences:
    def test_identical_sets(self):
        kps = grid_keypoints()
        assert repeatability(kps, kps, Homography.identity(), SIZE, SIZE) == 1.0

    def test_disjoint_sets(self):
        a = grid_keypoints()
        b = grid_keypoints(origin=27.0)
        assert find_correspondences(a, b, Homography.identity(), SIZE, SIZE) == []
        assert repeatability(a, b, Homography.identity(), SIZE, SIZE) == 0.0

    def test_three_of_four(self):
        a = [Keypoint(20.0, 20.0, 2.0), Keypoint(40.0, 20.0, 2.0), Keypoint(20.0, 40.0, 2.0), Keypoint(40.0, 40.0, 2.0)]
        b = a[:3] + [Keypoint(70.0, 70.0, 2.0)]
        assert repeatability(a, b, Homography.identity(), SIZE, SIZE) == pytest.approx(0.75)

    def test_under_translation(self):
        a = grid_keypoints()
        b = [Keypoint(kp.x + 4.0, kp.y - 2.0, kp.scale) for kp in a]
        H = Homography.translation(4.0, -2.0)
        result = find_correspondences_with_counts(a, b, H, SIZE, SIZE)
        assert len(result.correspondences) == 16
        assert all(c.index_a == c.index_b for c in result.correspondences)
        assert all(c.projection_error == pytest.approx(0.0, abs=1e-9) for c in result.correspondences)

    def test_scale_ratio_bound(self):
        a = [Keypoint(50.0, 50.0, 2.0)]
        b = [Keypoint(50.0, 50.0, 4.5)]
        assert find_correspondences(a, b, Homography.identity(), SIZE, SIZE) == []
        assert len(find_correspondences(a, b, Homography.identity(), SIZE, SIZE, tau=2.5)) == 1

    def test_greedy_prefers_smaller_error(self):
        a = [Keypoint(50.0, 50.0, 2.0)]
        b = [Keypoint(52.0, 50.0, 2.0), Keypoint(51.0, 50.0, 2.0)]
        (c,) = find_correspondences(a, b, Homography.identity(), SIZE, SIZE)
        assert c.index_b == 1
        assert c.projection_error == pytest.approx(1.0)

    def test_one_to_one(self):
        a = [Keypoint(50.0, 50.0, 2.0), Keypoint(50.5, 50.0, 2.0)]
        b = [Keypoint(50.2, 50.0, 2.0)]
        result = find_correspondences_with_counts(a, b, Homography.identity(), SIZE, SIZE)
        assert len(result.correspondences) == 1
        assert result.repeatability == 1.0

    def test_invisible_keypoints_excluded(self):
        a = [Keypoint(50.0, 50.0, 2.0), Keypoint(1.0, 1.0, 2.0)]
        result = find_correspondences_with_counts(a, a, Homography.identity(), SIZE, SIZE)
        assert result.visible_a == result.visible_b == 1
        assert result.repeatability == 1.0

    def test_empty_sets(self):
        result = find_correspondences_with_counts([], grid_keypoints(), Homography.identity(), SIZE, SIZE)
        assert result.correspondences == []
        assert result.repeatability == 0.0

    def test_symmetry(self, rng):
        a = [Keypoint(float(x), float(y), 2.0) for x, y in rng.uniform(10, 90, size=(40, 2))]
        b = [Keypoint(float(x), float(y), 2.0) for x, y in rng.uniform(10, 90, size=(40, 2))]
        H = Homography.translation(1.0, 0.5)
        forward = find_correspondences(a, b, H, SIZE, SIZE)
        backward = find_correspondences(b, a, H.inverse(), SIZE, SIZE)
        assert len(forward) == len(backward)

    def test_tolerance_monotone(self, rng):
        a = [Keypoint(float(x), float(y), 2.0) for x, y in rng.uniform(10, 90, size=(60, 2))]
        b = [Keypoint(float(x), float(y), 2.0) for x, y in rng.uniform(10, 90, size=(60, 2))]
        counts = [len(find_correspondences(a, b, Homography.identity(), SIZE, SIZE, eps_pos=e))
                  for e in (0.5, 1.0, 2.5, 5.0)]
        assert counts[0] <= counts[-1]
        assert counts[0] == len(find_correspondences(a, b, Homography.identity(), SIZE, SIZE, eps_pos=0.5))

    @pytest.mark.parametrize("eps_pos,tau", [(-1.0, 2.0), (2.5, 0.5)])
    def test_parameter_range(self, eps_pos, tau):
        with pytest.raises(InvalidParameterError):
            find_correspondences([], [], Homography.identity(), SIZE, SIZE, eps_pos, tau)


class TestScoreMatches:
    def test_seven_of_ten(self):
        kps_a = grid_keypoints(n=4)[:10]
        kps_b = list(kps_a)
        pairs = [MatchPair(i, i, 0.0) for i in range(7)] + [MatchPair(7, 0, 1.0), MatchPair(8, 1, 1.0), MatchPair(9, 2, 1.0)]
        assert score_matches(pairs, kps_a, kps_b, Homography.identity()) == (7, 10)

    def test_uses_homography(self):
        kps_a = [Keypoint(10.0, 10.0, 1.0)]
        kps_b = [Keypoint(20.0, 30.0, 1.0)]
        H = Homography.scaling(2.0, 3.0)
        assert score_matches([MatchPair(0, 0, 0.0)], kps_a, kps_b, H) == (1, 1)

    def test_no_matches(self):
        assert score_matches([], [], [], Homography.identity()) == (0, 0)

    def test_index_out_of_range(self):
        with pytest.raises(InvalidInputError):
            score_matches([MatchPair(0, 3, 0.0)], grid_keypoints(), grid_keypoints(n=1), Homography.identity())


class TestEvaluateImagePair:
    def test_identical_images(self, textured):
        summary = evaluate_image_pair(textured, textured, Homography.identity(), "fast_hessian", "surf")
        assert summary["n_kp_a"] == summary["n_kp_b"] > 0
        assert summary["repeatability"] == 1.0
        assert summary["n_matches"] > 0
        assert summary["n_correct"] == summary["n_matches"]

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("detector", sorted(DETECTORS))
    def test_identical_textured_images_fully_repeatable(self, detector, seed):
        img = textured_image(seed, size=256)
        summary = evaluate_image_pair(img, img, Homography.identity(), detector)
        assert summary["n_kp_a"] == summary["n_kp_b"] > 0
        assert summary["repeatability"] == 1.0

    def test_detector_only(self, textured):
        shifted = GrayImage(np.roll(textured.data, 8, axis=1))
        summary = evaluate_image_pair(textured, shifted, Homography.translation(8.0, 0.0), "mser")
        assert "n_matches" not in summary
        assert 0.0 <= summary["repeatability"] <= 1.0
