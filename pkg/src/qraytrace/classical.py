"""Monte Carlo path tracer used as the classical baseline.

Each path sample ``j`` of pixel ``p`` consumes exactly ``2 * max_depth``
uniforms, taken at positions ``[2Dj, 2D(j+1))`` of the Philox stream keyed by
``(seed, PIXEL_SAMPLES, p)``: the first pair jitters the primary ray, the rest
drive the bounces. A sample therefore depends only on ``(seed, p, j)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import ConfigError
from .scene import Ray, Scene, primary_rays
from .transport import TWO_PI, equal_area_local, orthonormal_frames, trace_batch

CHUNK = 1 << 16


@dataclass(frozen=True)
class TracerConfig:
    max_depth: int = 2
    rays_per_pixel: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1 or self.rays_per_pixel < 1:
            raise ConfigError("max_depth and rays_per_pixel must be >= 1")


@dataclass(frozen=True)
class RadianceSample:
    value: tuple[float, float, float]


def sample_direction_uniform(normal, rng: np.random.Generator):
    """Uniform direction on the hemisphere around ``normal``; returns ``(direction, pdf)``."""
    n = np.asarray(normal, dtype=np.float64).reshape(1, 3)
    u, v = rng.random(2)
    local = equal_area_local(np.array([u]), np.array([v]))
    t, s = orthonormal_frames(n)
    d = local[:, :1] * t + local[:, 1:2] * s + local[:, 2:] * n
    return d[0], 1.0 / TWO_PI


def trace_paths_mc(origins, directions, scene: Scene, depth: int, rng: np.random.Generator):
    """Radiance of one random path per input ray, shape ``(M, 3)``."""
    m = len(origins)
    uv = rng.random((m, max(depth - 1, 0), 2))
    return trace_batch(origins, directions, scene, depth, uv)


def trace_path_mc(ray: Ray, scene: Scene, cfg: TracerConfig, rng: np.random.Generator) -> RadianceSample:
    value = trace_paths_mc(ray.origin[None], ray.direction[None], scene, cfg.max_depth, rng)[0]
    return RadianceSample(tuple(float(x) for x in value))


def pixel_index(scene: Scene, pixel: tuple[int, int]) -> int:
    x, y = pixel
    return y * scene.camera.width + x


def pixel_samples(scene: Scene, cfg: TracerConfig, pixel: tuple[int, int], n: int | None = None,
                  chunk: int = CHUNK) -> np.ndarray:
    """The first ``n`` (default ``rays_per_pixel``) path samples of one pixel, shape ``(n, 3)``."""
    n = cfg.rays_per_pixel if n is None else n
    d = cfg.max_depth
    gen = rngmod.stream(cfg.seed, rngmod.PIXEL_SAMPLES, pixel_index(scene, pixel))
    out = np.empty((n, 3))
    x, y = pixel
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        u = gen.random((m, 2 * d))
        o, dirs = primary_rays(scene.camera, np.full(m, x), np.full(m, y), u[:, 0], u[:, 1])
        out[start:start + m] = trace_batch(o, dirs, scene, d, u[:, 2:].reshape(m, d - 1, 2))
    return out


def pixel_mean_and_error(scene: Scene, cfg: TracerConfig, pixel: tuple[int, int]):
    """Sample mean and its standard error per channel, accumulated chunk-wise."""
    s = pixel_samples(scene, cfg, pixel)
    return s.mean(axis=0), s.std(axis=0, ddof=1) / np.sqrt(len(s))


def render_classical(scene: Scene, cfg: TracerConfig) -> np.ndarray:
    """Per-pixel mean radiance, shape ``(height, width, 3)``; no clamping."""
    w, h = scene.camera.resolution
    img = np.empty((h, w, 3))
    for y in range(h):
        for x in range(w):
            img[y, x] = pixel_samples(scene, cfg, (x, y)).mean(axis=0)
    return img
