"""Deterministic enumeration of the fixed-depth superposed path tree.

A raw path id packs one lattice index per depth, depth 1 in the most
significant bits. Each depth's ``d_k`` bits split evenly into a ``u`` index
(high half) and a ``v`` index (low half). Depth 1 drives the sub-pixel
jitter and deeper ones drive the hemisphere direction of each bounce.
Evaluating every id yields the oracle table ``color_id``. The quantum arm
counts over it and the reference arm averages it.
"""
from __future__ import annotations

import csv
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .scene import Scene, primary_rays
from .transport import JACOBIAN, equal_area_local, trace_batch

MAX_PATH_BITS = 20


@dataclass(frozen=True)
class PathIdLayout:
    bits_per_depth: tuple[int, ...]
    comparator_bits: int = 0

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits_per_depth)
        if not bits:
            raise ConfigError("layout needs at least one depth")
        if any(b < 0 or b % 2 for b in bits):
            raise ConfigError(f"bits per depth must be even and non-negative, got {bits}")
        if self.comparator_bits < 0:
            raise ConfigError("comparator_bits must be non-negative")
        object.__setattr__(self, "bits_per_depth", bits)

    @classmethod
    def equal_split(cls, path_bits: int, depth: int, comparator_bits: int = 0) -> "PathIdLayout":
        """Spread ``path_bits`` over ``depth`` levels in pairs, earlier depths first."""
        if path_bits < 0 or path_bits % 2:
            raise ConfigError(f"path bits must be even and non-negative, got {path_bits}")
        if depth < 1:
            raise ConfigError("depth must be >= 1")
        pairs, extra = divmod(path_bits // 2, depth)
        return cls(tuple(2 * (pairs + (k < extra)) for k in range(depth)), comparator_bits)

    @property
    def depth(self) -> int:
        return len(self.bits_per_depth)

    @property
    def path_bits(self) -> int:
        return sum(self.bits_per_depth)

    @property
    def id_bits(self) -> int:
        return self.path_bits + self.comparator_bits

    @property
    def n_paths(self) -> int:
        return 1 << self.path_bits

    def decompose(self, raw):
        """Per-depth ``(u_index, v_index)`` pairs; works elementwise on arrays."""
        raw = np.asarray(raw, dtype=np.int64)
        out = []
        shift = self.path_bits
        for d in self.bits_per_depth:
            shift -= d
            idx = (raw >> shift) & ((1 << d) - 1)
            half = d // 2
            out.append((idx >> half, idx & ((1 << half) - 1)))
        return out

    def compose(self, indices) -> np.ndarray:
        raw = np.zeros_like(np.asarray(indices[0][0], dtype=np.int64))
        for d, (a, b) in zip(self.bits_per_depth, indices):
            half = d // 2
            raw = (raw << d) | (np.asarray(a, dtype=np.int64) << half) | np.asarray(b, dtype=np.int64)
        return raw


@dataclass(frozen=True)
class PathId:
    raw: int
    layout: PathIdLayout

    def __post_init__(self):
        if not 0 <= self.raw < self.layout.n_paths:
            raise ValueError(f"path id {self.raw} outside [0, {self.layout.n_paths})")

    @property
    def per_depth_indices(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in self.layout.decompose(self.raw)]

    def lattice_uv(self) -> list[tuple[float, float]]:
        return [(float(lattice_point(a, d // 2)), float(lattice_point(b, d // 2)))
                for (a, b), d in zip(self.per_depth_indices, self.layout.bits_per_depth)]


def lattice_point(index, axis_bits: int):
    """Cell-centred lattice coordinate ``(index + 0.5) / 2**axis_bits``."""
    return (np.asarray(index, dtype=np.float64) + 0.5) / (1 << axis_bits)


def map_hemisphere(u: float, v: float, frame) -> tuple[np.ndarray, float]:
    """Equal-area map of ``(u, v)`` onto the hemisphere of ``frame = (tangent, bitangent, normal)``.

    Returns the world direction and the constant Jacobian determinant ``2 pi``.
    Array ``u`` and ``v`` give directions of shape ``u.shape + (3,)``.
    """
    t, s, n = (np.asarray(a, dtype=np.float64) for a in frame)
    local = equal_area_local(u, v)
    return local[..., :1] * t + local[..., 1:2] * s + local[..., 2:] * n, JACOBIAN


def _lattice_inputs(layout: PathIdLayout, raw: np.ndarray):
    """Jitter pair and bounce ``(u, v)`` array for an array of raw ids."""
    parts = layout.decompose(raw)
    uv = [(lattice_point(a, d // 2), lattice_point(b, d // 2))
          for (a, b), d in zip(parts, layout.bits_per_depth)]
    jitter = uv[0]
    bounces = np.zeros((len(raw), layout.depth - 1, 2))
    for k, (u, v) in enumerate(uv[1:]):
        bounces[:, k, 0] = u
        bounces[:, k, 1] = v
    return jitter, bounces


def trace_paths_deterministic(raw, pixel, scene: Scene, layout: PathIdLayout) -> np.ndarray:
    """RGB colour of each raw path id in ``raw`` for one pixel, shape ``(M, 3)``."""
    raw = np.atleast_1d(np.asarray(raw, dtype=np.int64))
    (ju, jv), bounces = _lattice_inputs(layout, raw)
    x, y = pixel
    o, d = primary_rays(scene.camera, np.full(len(raw), x), np.full(len(raw), y), ju, jv)
    return trace_batch(o, d, scene, layout.depth, bounces)


def trace_path_deterministic(path_id: PathId, pixel, scene: Scene, layout: PathIdLayout | None = None,
                             depth: int | None = None) -> np.ndarray:
    layout = path_id.layout if layout is None else layout
    if depth is not None and depth != layout.depth:
        raise ConfigError(f"depth {depth} does not match layout depth {layout.depth}")
    return trace_paths_deterministic([path_id.raw], pixel, scene, layout)[0]


def check_cap(layout: PathIdLayout, cap: int = MAX_PATH_BITS):
    if layout.path_bits > cap:
        raise ConfigError(f"path register of r={layout.path_bits} bits exceeds the cap of {cap}")


class _TableCache:
    def __init__(self, maxsize: int = 256):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            val = self._data.get(key)
            if val is not None:
                self._data.move_to_end(key)
            return val

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()


table_cache = _TableCache()


def pixel_color_table(pixel, scene: Scene, layout: PathIdLayout, depth: int | None = None,
                      cap: int = MAX_PATH_BITS, chunk: int = 1 << 16, use_cache: bool = True) -> np.ndarray:
    """All-channel oracle table for one pixel, shape ``(2**r, 3)``, read-only."""
    if depth is not None and depth != layout.depth:
        raise ConfigError(f"depth {depth} does not match layout depth {layout.depth}")
    check_cap(layout, cap)
    key = (scene.key, tuple(pixel), layout.bits_per_depth)
    if use_cache and (hit := table_cache.get(key)) is not None:
        return hit
    n = layout.n_paths
    table = np.empty((n, 3))
    for start in range(0, n, chunk):
        ids = np.arange(start, min(n, start + chunk), dtype=np.int64)
        table[start:start + len(ids)] = trace_paths_deterministic(ids, pixel, scene, layout)
    table.setflags(write=False)
    if use_cache:
        table_cache.put(key, table)
    return table


def evaluate_oracle_table(pixel, channel: int, scene: Scene, layout: PathIdLayout, depth: int | None = None,
                          cap: int = MAX_PATH_BITS) -> np.ndarray:
    """``color_id`` of one channel for every raw path id, in id order."""
    return pixel_color_table(pixel, scene, layout, depth, cap)[:, channel]


def dump_table_csv(table, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "color"])
        for i, c in enumerate(np.asarray(table)):
            w.writerow([i, repr(float(c))])
