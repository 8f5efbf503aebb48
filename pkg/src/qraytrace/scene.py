"""Geometry, camera, materials and the plain-text scene format.

Everything here is immutable once built. The scalar functions
(:func:`intersect_triangle`, :func:`nearest_chain`, :func:`primary_ray`) mirror
the per-ray procedure one primitive at a time; :func:`intersect_rays` and
:func:`primary_rays` are the batched equivalents the tracers run on.
"""
from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SceneError

EPS_RAY = 1e-4
FAR = sys.float_info.max
_DET_EPS = 1e-12


def _vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64).reshape(3)
    v.setflags(write=False)
    return v


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        d = _vec(self.direction)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError(f"ray direction must be unit length, got |d|={np.linalg.norm(d)!r}")
        object.__setattr__(self, "origin", _vec(self.origin))
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class Material:
    albedo: tuple[float, float, float]
    emission: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        albedo = tuple(float(a) for a in self.albedo)
        emission = tuple(float(e) for e in self.emission)
        if len(albedo) != 3 or len(emission) != 3:
            raise ValueError("albedo and emission must be RGB triples")
        if any(not 0.0 <= a <= 1.0 for a in albedo):
            raise ValueError(f"albedo channels must lie in [0, 1], got {albedo}")
        if any(e < 0.0 for e in emission):
            raise ValueError(f"emission channels must be non-negative, got {emission}")
        object.__setattr__(self, "albedo", albedo)
        object.__setattr__(self, "emission", emission)


@dataclass(frozen=True)
class Triangle:
    v0: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    material_id: int = 0

    def __post_init__(self):
        for name in ("v0", "v1", "v2"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        area2 = np.linalg.norm(np.cross(self.v1 - self.v0, self.v2 - self.v0))
        if not area2 > 1e-12:
            raise ValueError("degenerate triangle")


@dataclass(frozen=True)
class Intersection:
    exists: bool
    distance: float = FAR
    position: np.ndarray = field(default_factory=lambda: _vec((0.0, 0.0, 0.0)))
    normal: np.ndarray = field(default_factory=lambda: _vec((0.0, 0.0, 0.0)))
    material_id: int = -1


NO_HIT = Intersection(exists=False)


@dataclass(frozen=True)
class Camera:
    """Pinhole camera. ``forward`` is ``right x up``, so the identity frame looks down +z."""

    position: np.ndarray
    right: np.ndarray
    up: np.ndarray
    vertical_fov: float
    resolution: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "position", _vec(self.position))
        right, up = _vec(normalize(self.right)), _vec(normalize(self.up))
        if abs(float(right @ up)) > 1e-9:
            raise ValueError("camera right and up vectors must be orthogonal")
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "up", up)
        if not 0.0 < self.vertical_fov < np.pi:
            raise ValueError("vertical_fov must lie in (0, pi)")
        w, h = (int(x) for x in self.resolution)
        if w < 1 or h < 1:
            raise ValueError("resolution must be positive")
        object.__setattr__(self, "resolution", (w, h))

    @property
    def forward(self) -> np.ndarray:
        return np.cross(self.right, self.up)

    @property
    def width(self) -> int:
        return self.resolution[0]

    @property
    def height(self) -> int:
        return self.resolution[1]


@dataclass(frozen=True, eq=False)
class Scene:
    triangles: tuple[Triangle, ...]
    materials: tuple[Material, ...]
    camera: Camera
    background_emission: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "triangles", tuple(self.triangles))
        object.__setattr__(self, "materials", tuple(self.materials))
        bg = tuple(float(x) for x in self.background_emission)
        if len(bg) != 3 or any(x < 0 for x in bg):
            raise ValueError("background emission must be a non-negative RGB triple")
        object.__setattr__(self, "background_emission", bg)
        for k, tri in enumerate(self.triangles):
            if not 0 <= tri.material_id < len(self.materials):
                raise ValueError(f"triangle {k} references missing material {tri.material_id}")
        # packed arrays for the batched kernels
        p = len(self.triangles)
        v0 = np.array([t.v0 for t in self.triangles]).reshape(p, 3)
        e1 = np.array([t.v1 - t.v0 for t in self.triangles]).reshape(p, 3)
        e2 = np.array([t.v2 - t.v0 for t in self.triangles]).reshape(p, 3)
        mats = np.array([t.material_id for t in self.triangles], dtype=np.int64)
        albedo = np.array([m.albedo for m in self.materials]).reshape(-1, 3)
        emission = np.array([m.emission for m in self.materials]).reshape(-1, 3)
        normals = normalize(np.cross(e1, e2)) if p else np.zeros((0, 3))
        for name, arr in dict(_v0=v0, _e1=e1, _e2=e2, _mat=mats, _albedo=albedo,
                              _emission=emission, _normals=normals).items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_primitives(self) -> int:
        return len(self.triangles)

    @property
    def key(self) -> str:
        """Content hash, stable across processes; used to key oracle-table caches."""
        cached = self.__dict__.get("_key")
        if cached is None:
            h = hashlib.sha256()
            cam = self.camera
            for arr in (self._v0, self._e1, self._e2, self._mat, self._albedo, self._emission,
                        np.array(self.background_emission), cam.position, cam.right, cam.up,
                        np.array([cam.vertical_fov, *cam.resolution], dtype=np.float64)):
                h.update(np.ascontiguousarray(arr).tobytes())
            cached = h.hexdigest()
            object.__setattr__(self, "_key", cached)
        return cached


# --------------------------------------------------------------------------- rays

def _moller_trumbore(origin, direction, v0, e1, e2):
    """Return hit distance or None. Boundary hits count; t must exceed EPS_RAY."""
    pvec = np.cross(direction, e2)
    det = float(e1 @ pvec)
    if abs(det) < _DET_EPS:
        return None
    inv = 1.0 / det
    tvec = origin - v0
    u = float(tvec @ pvec) * inv
    if u < 0.0 or u > 1.0:
        return None
    qvec = np.cross(tvec, e1)
    v = float(direction @ qvec) * inv
    if v < 0.0 or u + v > 1.0:
        return None
    t = float(e2 @ qvec) * inv
    return t if t > EPS_RAY else None


def intersect_triangle(ray: Ray, tri: Triangle) -> Intersection:
    e1, e2 = tri.v1 - tri.v0, tri.v2 - tri.v0
    t = _moller_trumbore(ray.origin, ray.direction, tri.v0, e1, e2)
    if t is None:
        return NO_HIT
    n = normalize(np.cross(e1, e2))
    if n @ ray.direction > 0:
        n = -n
    return Intersection(True, t, _vec(ray.origin + t * ray.direction), _vec(n), tri.material_id)


def nearest_chain(ray: Ray, scene: Scene) -> Intersection:
    """Fold over primitives in order, keeping the nearer of ``intersect_k`` and ``nearest_{k-1}``."""
    nearest = NO_HIT
    for tri in scene.triangles:
        hit = intersect_triangle(ray, tri)
        if hit.distance < nearest.distance:
            nearest = hit
    return nearest


def intersect_rays(origins: np.ndarray, directions: np.ndarray, scene: Scene):
    """Batched nearest hit for ``M`` rays.

    Returns ``(hit, t, normal, material)`` arrays of shapes ``(M,)``, ``(M,)``,
    ``(M, 3)``, ``(M,)``. Normals face against the ray; misses carry ``t = FAR``
    and material ``-1``. Primitives are folded in order, as in :func:`nearest_chain`.
    """
    m = origins.shape[0]
    ox, oy, oz = (np.ascontiguousarray(c) for c in origins.T)
    dx, dy, dz = (np.ascontiguousarray(c) for c in directions.T)
    best_t = np.full(m, FAR)
    best_k = np.full(m, -1, dtype=np.int64)
    for k in range(scene.n_primitives):
        (ax, ay, az), (e1x, e1y, e1z), (e2x, e2y, e2z) = scene._v0[k], scene._e1[k], scene._e2[k]
        px = dy * e2z - dz * e2y
        py = dz * e2x - dx * e2z
        pz = dx * e2y - dy * e2x
        det = e1x * px + e1y * py + e1z * pz
        ok = np.abs(det) >= _DET_EPS
        inv = np.divide(1.0, det, out=np.zeros(m), where=ok)
        tx, ty, tz = ox - ax, oy - ay, oz - az
        u = (tx * px + ty * py + tz * pz) * inv
        qx = ty * e1z - tz * e1y
        qy = tz * e1x - tx * e1z
        qz = tx * e1y - ty * e1x
        v = (dx * qx + dy * qy + dz * qz) * inv
        t = (e2x * qx + e2y * qy + e2z * qz) * inv
        ok &= (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > EPS_RAY) & (t < best_t)
        best_t[ok] = t[ok]
        best_k[ok] = k
    hit = best_k >= 0
    normal = np.zeros((m, 3))
    material = np.full(m, -1, dtype=np.int64)
    if hit.any():
        kk = best_k[hit]
        n = scene._normals[kk]
        flip = np.einsum("ij,ij->i", n, directions[hit]) > 0
        n[flip] *= -1.0
        normal[hit] = n
        material[hit] = scene._mat[kk]
    return hit, best_t, normal, material


def primary_rays(camera: Camera, px: np.ndarray, py: np.ndarray, ju: np.ndarray, jv: np.ndarray):
    """Origins and unit directions through screen positions ``(px + ju, py + jv)``.

    Pixel ``(0, 0)`` is the top-left corner of the image.
    """
    w, h = camera.resolution
    half = np.tan(0.5 * camera.vertical_fov)
    sx = (2.0 * (np.asarray(px) + ju) / w - 1.0) * half * (w / h)
    sy = (1.0 - 2.0 * (np.asarray(py) + jv) / h) * half
    d = camera.forward + sx[:, None] * camera.right + sy[:, None] * camera.up
    d = normalize(d)
    return np.broadcast_to(camera.position, d.shape).copy(), d


def primary_ray(camera: Camera, pixel: tuple[int, int], jitter: tuple[float, float] = (0.5, 0.5)) -> Ray:
    x, y = pixel
    if not (0 <= x < camera.width and 0 <= y < camera.height):
        raise ValueError(f"pixel {pixel} outside resolution {camera.resolution}")
    u, v = jitter
    if not (0.0 <= u < 1.0 and 0.0 <= v < 1.0):
        raise ValueError("jitter must lie in [0, 1)^2")
    o, d = primary_rays(camera, np.array([x]), np.array([y]), np.array([u]), np.array([v]))
    return Ray(o[0], d[0])


# --------------------------------------------------------------------- scene file

_ARITY = {"camera": 12, "background": 3, "material": 6, "triangle": 10}


def parse_scene(text: str, source: str = "<string>") -> Scene:
    """Parse the line-oriented scene format. Errors carry the 1-based line number."""
    camera = None
    background = (0.0, 0.0, 0.0)
    materials: list[Material] = []
    triangles: list[tuple[int, Triangle]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *fields = line.split()
        if keyword not in _ARITY:
            raise SceneError(f"unknown directive {keyword!r}", source, lineno)
        if len(fields) != _ARITY[keyword]:
            raise SceneError(f"{keyword} expects {_ARITY[keyword]} fields, got {len(fields)}", source, lineno)
        try:
            nums = [float(f) for f in fields]
        except ValueError as exc:
            raise SceneError(f"bad number: {exc}", source, lineno) from None
        try:
            if keyword == "camera":
                if camera is not None:
                    raise ValueError("duplicate camera line")
                w, h = nums[10], nums[11]
                if w != int(w) or h != int(h):
                    raise ValueError("resolution must be integral")
                camera = Camera(nums[0:3], nums[3:6], nums[6:9], np.radians(nums[9]), (int(w), int(h)))
            elif keyword == "background":
                if any(x < 0 for x in nums):
                    raise ValueError("background emission must be non-negative")
                background = tuple(nums)
            elif keyword == "material":
                materials.append(Material(tuple(nums[0:3]), tuple(nums[3:6])))
            else:
                if nums[9] != int(nums[9]):
                    raise ValueError("material index must be an integer")
                triangles.append((lineno, Triangle(nums[0:3], nums[3:6], nums[6:9], int(nums[9]))))
        except ValueError as exc:
            raise SceneError(str(exc), source, lineno) from None
    for lineno, tri in triangles:
        if not 0 <= tri.material_id < len(materials):
            raise SceneError(f"material index {tri.material_id} out of range "
                             f"({len(materials)} materials defined)", source, lineno)
    if camera is None:
        raise SceneError("no camera line", source, None)
    return Scene(tuple(t for _, t in triangles), tuple(materials), camera, background)


def load_scene(path) -> Scene:
    path = Path(path)
    return parse_scene(path.read_text(encoding="utf-8"), str(path))


def fixture_path(name: str = "cornell") -> Path:
    """Path of a scene shipped with the package."""
    return Path(__file__).with_name("data") / f"{name}.scene"
