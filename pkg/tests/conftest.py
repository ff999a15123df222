import numpy as np
import pytest


def _houses(w=160, h=120):
    """Sky gradient over a row of high-contrast 'buildings' on the right half."""
    img = np.zeros((h, w, 3), dtype=np.uint8)
    sky = np.linspace(180, 120, h).astype(np.uint8)
    img[:] = sky[:, None, None]
    rng = np.random.default_rng(7)
    x = w // 2
    while x < w - 8:
        bw = int(rng.integers(8, 18))
        bh = int(rng.integers(h // 3, int(h * 0.7)))
        color = rng.integers(30, 220, size=3)
        img[h - bh :, x : min(x + bw, w)] = color
        x += bw + 2
    return img


def _portrait(w=160, h=120):
    """Bright centered blob on a textured dark background."""
    rng = np.random.default_rng(11)
    img = (rng.random((h, w, 3)) * 60).astype(np.uint8)
    yy, xx = np.mgrid[0:h, 0:w]
    blob = np.exp(-(((xx - w / 2) / (w / 6)) ** 2 + ((yy - h / 2) / (h / 5)) ** 2))
    img = np.clip(img + (blob[..., None] * 200), 0, 255).astype(np.uint8)
    return img


def _flat(w=160, h=120):
    return np.full((h, w, 3), 128, dtype=np.uint8)


@pytest.fixture(scope="session")
def fixture_images():
    return {"houses": _houses(), "portrait": _portrait(), "flat": _flat()}


@pytest.fixture(scope="session")
def houses_image(fixture_images):
    return fixture_images["houses"]
