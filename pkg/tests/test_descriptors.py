import math

import numpy as np
import pytest

from descriptors import (
    BRISK_PATTERN,
    FREAK_PATTERN,
    BinaryDescriptor,
    DescriptorSet,
    FloatDescriptor,
    assign_orientation,
    clamp_normalize,
    decode_descriptors,
    describe_brisk,
    describe_freak,
    describe_keypoints,
    describe_sift,
    describe_surf,
    encode_descriptors,
    haar_subregion_vector,
    read_descriptors,
    write_descriptors,
)
from descriptors.patterns import binary_tests, pattern_angle
from detectors import Keypoint, detect_dog
from errors import (
    DegenerateDescriptorError,
    ImageLoadError,
    IncompatibleDescriptorError,
    InvalidParameterError,
    OutOfBoundsError,
)
from harness.conditions import rotation_homography
from imaging import GrayImage, integral_image, warp_homography
from matching.matcher import distance_matrix


def ramp(angle_deg: float, slope: float = 3.0, size: int = 64) -> GrayImage:
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    a = math.radians(angle_deg)
    return GrayImage(100.0 + slope * (math.cos(a) * xs + math.sin(a) * ys))


def constant(size: int = 64) -> GrayImage:
    return GrayImage(np.full((size, size), 90.0))


class TestOrientation:
    def test_horizontal_ramp(self):
        oriented = assign_orientation(ramp(0.0), Keypoint(32.0, 32.0, 2.0))
        assert len(oriented) == 1
        assert oriented[0].orientation == pytest.approx(0.0, abs=1e-6)

    def test_rotated_ramp(self):
        oriented = assign_orientation(ramp(130.0), Keypoint(32.0, 32.0, 2.0))
        assert len(oriented) == 1
        assert oriented[0].orientation == pytest.approx(math.radians(130.0), abs=1e-6)

    def test_constant_patch_has_no_orientation(self):
        assert assign_orientation(constant(), Keypoint(32.0, 32.0, 2.0)) == []

    def test_window_outside_image(self):
        assert assign_orientation(ramp(0.0), Keypoint(3.0, 3.0, 2.0)) == []

    def test_octave_factor_scales_coordinates(self):
        level = ramp(90.0, size=32)
        oriented = assign_orientation(level, Keypoint(32.0, 32.0, 4.0), octave_factor=2.0)
        assert len(oriented) == 1
        assert oriented[0].x == 32.0
        assert oriented[0].orientation == pytest.approx(math.pi / 2, abs=1e-6)


class TestClampNormalize:
    def test_uniform_vector(self):
        out = clamp_normalize(np.ones(128))
        assert np.allclose(out, 1.0 / math.sqrt(128))

    def test_peak_is_clamped(self):
        v = np.ones(128)
        v[0] = 1000.0
        out = clamp_normalize(v)
        assert np.linalg.norm(out) == pytest.approx(1.0)
        assert out.max() <= 0.2 + 1e-9
        assert out[0] == pytest.approx(out.max())

    def test_too_few_nonzero_bins(self):
        v = np.zeros(128)
        v[:10] = 1.0
        with pytest.raises(DegenerateDescriptorError):
            clamp_normalize(v)


class TestSift:
    def test_unit_norm_and_clamp(self, textured):
        d = describe_sift(textured, Keypoint(64.0, 64.0, 2.0))
        assert d.dim == 128
        assert np.linalg.norm(d.values) == pytest.approx(1.0)
        assert d.values.max() <= 0.2 + 1e-9
        assert d.values.min() >= 0.0

    def test_constant_patch_is_degenerate(self):
        with pytest.raises(DegenerateDescriptorError):
            describe_sift(constant(), Keypoint(32.0, 32.0, 1.5))

    def test_window_outside_image(self, textured):
        with pytest.raises(OutOfBoundsError):
            describe_sift(textured, Keypoint(5.0, 64.0, 2.0))

    def test_quarter_turn_self_match(self, textured):
        rotated = GrayImage(np.rot90(textured.data))
        kp = Keypoint(64.0, 50.0, 2.0)
        # np.rot90 sends (x, y) to (y, W - 1 - x)
        kp_rot = Keypoint(50.0, textured.width - 1 - 64.0, 2.0)
        a = describe_keypoints(textured, [kp], "sift").descriptors.data
        b = describe_keypoints(rotated, [kp_rot], "sift").descriptors.data
        assert len(a) and len(b)
        best = min(np.linalg.norm(x - y) for x in a for y in b)
        assert best < 0.1

        elsewhere = describe_keypoints(textured, [Keypoint(40.0, 80.0, 2.0)], "sift").descriptors.data
        assert best < min(np.linalg.norm(x - y) for x in a for y in elsewhere)


class TestSurf:
    def test_ramp_subregion(self):
        assert haar_subregion_vector(np.ones(25), np.zeros(25)).tolist() == [25.0, 0.0, 25.0, 0.0]

    def test_signed_and_absolute_sums(self):
        v = haar_subregion_vector([1.0, -2.0], [3.0, -1.0])
        assert v.tolist() == [-1.0, 2.0, 3.0, 4.0]

    def test_unit_norm(self, textured):
        d = describe_surf(integral_image(textured), Keypoint(64.0, 64.0, 2.0, orientation=0.3))
        assert d.dim == 64
        assert np.linalg.norm(d.values) == pytest.approx(1.0)

    def test_constant_patch_is_degenerate(self):
        with pytest.raises(DegenerateDescriptorError):
            describe_surf(integral_image(constant()), Keypoint(32.0, 32.0, 1.0))

    def test_window_outside_image(self, textured):
        with pytest.raises(OutOfBoundsError):
            describe_surf(integral_image(textured), Keypoint(10.0, 64.0, 2.0))

    def test_mirror_flips_columns_and_signs(self, textured):
        kp = Keypoint(60.0, 64.0, 2.0)
        mirrored = GrayImage(textured.data[:, ::-1].copy())
        kp_mirror = Keypoint(textured.width - 1 - 60.0, 64.0, 2.0)
        a = describe_surf(integral_image(textured), kp).values.reshape(4, 4, 4)
        b = describe_surf(integral_image(mirrored), kp_mirror).values.reshape(4, 4, 4)
        # subregion column j swaps with 3 - j; the signed x sum changes sign
        expected = a[:, ::-1, :] * np.array([-1.0, 1.0, 1.0, 1.0])
        assert np.allclose(b, expected, atol=1e-12)


class TestBinary:
    def test_comparison_rule(self):
        bits = binary_tests(np.array([1.0, 2.0, 2.0]), np.array([[0, 1], [1, 2], [1, 0]]))
        assert bits.tolist() == [True, False, False]

    def test_pattern_angle_zero_gradient(self):
        assert pattern_angle(0.0, 0.0) == 0.0
        assert pattern_angle(0.0, 1.0) == pytest.approx(math.pi / 2)

    def test_pattern_sizes(self):
        assert BRISK_PATTERN.size == 60
        assert FREAK_PATTERN.size == 43
        assert BRISK_PATTERN.short_pairs.shape == (512, 2)
        assert FREAK_PATTERN.short_pairs.shape == (512, 2)

    def test_brisk_short_and_long_pairs_are_disjoint(self):
        short = {frozenset(map(int, p)) for p in BRISK_PATTERN.short_pairs}
        long = {frozenset(map(int, p)) for p in BRISK_PATTERN.long_pairs}
        assert len(short) == len(BRISK_PATTERN.short_pairs)
        assert long
        assert short.isdisjoint(long)

    @pytest.mark.parametrize("describe", [describe_brisk, describe_freak])
    def test_constant_patch_gives_zero_bits(self, describe):
        d = describe(GrayImage(np.zeros((64, 64))), Keypoint(32.0, 32.0, 2.0))
        assert d.dim == 512
        assert not d.bits.any()

    @pytest.mark.parametrize("describe", [describe_brisk, describe_freak])
    def test_gain_invariance(self, describe, textured):
        kp = Keypoint(64.0, 64.0, 2.0)
        brighter = GrayImage(2.0 * textured.data)
        assert describe(textured, kp) == describe(brighter, kp)

    @pytest.mark.parametrize("describe", [describe_brisk, describe_freak])
    def test_deterministic(self, describe, textured):
        kp = Keypoint(60.0, 70.0, 1.5)
        assert describe(textured, kp) == describe(textured, kp)

    @pytest.mark.parametrize("describe", [describe_brisk, describe_freak])
    def test_pattern_outside_image(self, describe, textured):
        with pytest.raises(OutOfBoundsError):
            describe(textured, Keypoint(2.0, 64.0, 2.0))


class TestDescriptorSet:
    def test_binary_row_round_trip(self, rng):
        bits = rng.integers(0, 2, size=512).astype(bool)
        dset = DescriptorSet.from_descriptors([BinaryDescriptor(bits, "brisk")])
        assert dset.data.shape == (1, 64)
        assert dset.row(0) == BinaryDescriptor(bits, "brisk")

    def test_mixed_kinds_rejected(self):
        a = BinaryDescriptor(np.zeros(512, dtype=bool), "brisk")
        b = BinaryDescriptor(np.zeros(512, dtype=bool), "freak")
        with pytest.raises(IncompatibleDescriptorError):
            DescriptorSet.from_descriptors([a, b])

    def test_wrong_dimension(self):
        with pytest.raises(InvalidParameterError):
            FloatDescriptor(np.zeros(64), "sift")

    def test_empty_needs_kind(self):
        with pytest.raises(InvalidParameterError):
            DescriptorSet.from_descriptors([])
        assert len(DescriptorSet.from_descriptors([], "surf")) == 0


class TestContainer:
    def test_float_round_trip(self, rng, tmp_path):
        dset = DescriptorSet("sift", rng.random((5, 128)).astype(np.float32))
        path = tmp_path / "a.fdsc"
        write_descriptors(dset, path)
        back = read_descriptors(path)
        assert back.kind == "sift"
        assert np.array_equal(back.data, dset.data)

    def test_binary_round_trip(self, rng):
        dset = DescriptorSet("freak", rng.integers(0, 256, size=(3, 64)).astype(np.uint8))
        raw = encode_descriptors(dset)
        assert len(raw) == 12 + 3 * 64
        back = decode_descriptors(raw)
        assert back.kind == "freak"
        assert np.array_equal(back.data, dset.data)

    def test_header_layout(self):
        raw = encode_descriptors(DescriptorSet.empty("surf"))
        assert raw == b"FDSC" + bytes([1, 2]) + (0).to_bytes(4, "little") + (64).to_bytes(2, "little")

    def test_bad_magic(self):
        raw = bytearray(encode_descriptors(DescriptorSet.empty("sift")))
        raw[0:4] = b"XXXX"
        with pytest.raises(ImageLoadError):
            decode_descriptors(bytes(raw))

    def test_truncated_payload(self, rng):
        raw = encode_descriptors(DescriptorSet("sift", rng.random((2, 128)).astype(np.float32)))
        with pytest.raises(ImageLoadError):
            decode_descriptors(raw[:-1])

    def test_dimension_mismatch(self):
        raw = bytearray(encode_descriptors(DescriptorSet.empty("sift")))
        raw[10:12] = (64).to_bytes(2, "little")
        with pytest.raises(ImageLoadError):
            decode_descriptors(bytes(raw))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageLoadError):
            read_descriptors(tmp_path / "nope.fdsc")


class TestExtraction:
    @pytest.mark.parametrize("kind", ["sift", "surf", "brisk", "freak"])
    def test_rows_align_with_keypoints(self, kind, textured):
        keypoints = detect_dog(textured)
        extraction = describe_keypoints(textured, keypoints, kind)
        assert len(extraction.keypoints) == len(extraction.descriptors)
        assert extraction.descriptors.kind == kind
        assert extraction.dropped <= len(keypoints)

    def test_border_keypoint_dropped(self, textured):
        extraction = describe_keypoints(textured, [Keypoint(1.0, 1.0, 2.0)], "brisk")
        assert extraction.dropped == 1
        assert len(extraction.descriptors) == 0

    def test_unknown_kind(self, textured):
        with pytest.raises(InvalidParameterError):
            describe_keypoints(textured, [], "orb")


ROTATION_POINTS = [(64.0, 64.0), (54.0, 70.0), (72.0, 58.0), (60.0, 76.0), (76.0, 68.0)]


class TestRotationSelfMatch:
    @pytest.mark.parametrize("angle", [15.0, 30.0, 45.0])
    @pytest.mark.parametrize("kind", ["sift", "brisk", "freak"])
    def test_rotated_patch_beats_random_patches(self, kind, angle, textured):
        H, out_w, out_h = rotation_homography(textured.width, textured.height, angle)
        rotated = warp_homography(textured, H, out_w, out_h).image

        def moved(points):
            px, py, _ = H.apply([p[0] for p in points], [p[1] for p in points])
            return [Keypoint(float(x), float(y), 2.0) for x, y in zip(px, py)]

        rng = np.random.default_rng(int(angle))
        random_rows = describe_keypoints(rotated, moved(rng.uniform(30.0, 98.0, size=(50, 2)).tolist()), kind)
        assert len(random_rows.descriptors) >= 25

        matched = 0
        for point in ROTATION_POINTS:
            a = describe_keypoints(textured, [Keypoint(point[0], point[1], 2.0)], kind).descriptors
            b = describe_keypoints(rotated, moved([point]), kind).descriptors
            assert len(a) and len(b)
            own = distance_matrix(a, b).min()
            to_random = distance_matrix(a, random_rows.descriptors).min(axis=0)
            matched += bool(own < np.median(to_random))
        assert matched >= len(ROTATION_POINTS) - 1
