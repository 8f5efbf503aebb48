"""Binary PPM and CSV dumps of linear radiance images."""
from __future__ import annotations

import csv

import numpy as np

GAMMA = 2.2


def encode_8bit(image: np.ndarray) -> np.ndarray:
    """Gamma-encode linear radiance to 8-bit; values clip to [0, 1] first."""
    lin = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.rint(255.0 * lin ** (1.0 / GAMMA)).astype(np.uint8)


def ppm_bytes(image: np.ndarray) -> bytes:
    h, w, _ = image.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + encode_8bit(image).tobytes()


def write_ppm(path, image: np.ndarray):
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(image))


def read_ppm(path) -> np.ndarray:
    """Read back a P6 file written by :func:`write_ppm` as ``uint8`` (H, W, 3)."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, w, h, maxval, pixels = data.split(maxsplit=4)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit binary PPM")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(int(h), int(w), 3)


def write_image_csv(path, image: np.ndarray):
    h, w, _ = image.shape
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x", "y", "r", "g", "b"])
        for y in range(h):
            for x in range(w):
                out.writerow([x, y, *(repr(float(v)) for v in image[y, x])])


def read_image_csv(path) -> np.ndarray:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    w, h = int(rows[:, 0].max()) + 1, int(rows[:, 1].max()) + 1
    img = np.zeros((h, w, 3))
    img[rows[:, 1].astype(int), rows[:, 0].astype(int)] = rows[:, 2:5]
    return img
