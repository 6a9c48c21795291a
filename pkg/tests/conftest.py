"""Shared synthetic images for the test suite"""
import numpy as np
import pytest

from imaging.image import GrayImage


def gaussian_blob(size: int, cx: float, cy: float, sigma: float, amplitude: float = 200.0,
                  background: float = 20.0) -> GrayImage:
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    blob = np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2.0 * sigma * sigma))
    return GrayImage(background + amplitude * blob)


def square_image(size: int, x0: int, y0: int, side: int, inside: float = 0.0, outside: float = 255.0) -> GrayImage:
    data = np.full((size, size), outside)
    data[y0:y0 + side, x0:x0 + side] = inside
    return GrayImage(data)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_image(rng):
    return GrayImage(rng.integers(0, 256, size=(64, 64)).astype(np.float64))


@pytest.fixture(scope="session")
def textured():
    from harness.synthetic import textured_image
    return textured_image(7, size=128)


@pytest.fixture
def checkerboard():
    ys, xs = np.mgrid[0:64, 0:64]
    return GrayImage(np.where(((xs // 8) + (ys // 8)) % 2 == 0, 40.0, 210.0))
