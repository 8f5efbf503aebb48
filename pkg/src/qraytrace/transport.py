"""Fixed-depth light transport shared by the Monte Carlo and lattice tracers.

A path is driven entirely by its ``(u, v)`` pairs: one pair per bounce, mapped
onto the hemisphere with the Lambert cylindrical equal-area map. Whether those
pairs come from a random stream or a lattice is the caller's business, which is
what makes the two tracers estimators of the same integral.
"""
from __future__ import annotations

import numpy as np

from .scene import Scene, intersect_rays

TWO_PI = 2.0 * np.pi
JACOBIAN = TWO_PI  # area of the unit hemisphere over the unit square


def orthonormal_frames(n: np.ndarray):
    """Tangent and bitangent for unit normals ``n`` of shape ``(M, 3)``.

    Branchless construction (Duff et al. 2017); continuous except at ``n_z = -1``.
    """
    sign = np.where(n[:, 2] >= 0.0, 1.0, -1.0)
    a = -1.0 / (sign + n[:, 2])
    b = n[:, 0] * n[:, 1] * a
    t = np.stack([1.0 + sign * n[:, 0] ** 2 * a, sign * b, -sign * n[:, 0]], axis=1)
    s = np.stack([b, sign + n[:, 1] ** 2 * a, -n[:, 1]], axis=1)
    return t, s


def equal_area_local(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Local-frame directions: ``z = v``, azimuth ``2 pi u``."""
    z = np.asarray(v, dtype=np.float64)
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = TWO_PI * np.asarray(u, dtype=np.float64)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def trace_batch(origins, directions, scene: Scene, depth: int, bounce_uv) -> np.ndarray:
    """Radiance carried by ``M`` fixed-depth paths.

    ``bounce_uv`` has shape ``(M, depth - 1, 2)``. At each of at most ``depth``
    intersections the path adds emission times throughput; between hits the
    throughput picks up ``(albedo / pi) * cos * 2 pi``. A miss adds the
    background and ends the path.
    """
    origins = np.asarray(origins, dtype=np.float64)
    directions = np.asarray(directions, dtype=np.float64)
    m = origins.shape[0]
    radiance = np.zeros((m, 3))
    throughput = np.ones((m, 3))
    alive = np.arange(m)
    bg = np.asarray(scene.background_emission)
    for k in range(depth):
        if alive.size == 0:
            break
        hit, t, normal, mat = intersect_rays(origins, directions, scene)
        miss = ~hit
        if miss.any():
            radiance[alive[miss]] += throughput[miss] * bg
        if not hit.any():
            break
        idx = alive[hit]
        thr = throughput[hit]
        mat_h = mat[hit]
        radiance[idx] += thr * scene._emission[mat_h]
        if k == depth - 1:
            break
        n = normal[hit]
        pos = origins[hit] + t[hit, None] * directions[hit]
        uv = bounce_uv[idx, k]
        local = equal_area_local(uv[:, 0], uv[:, 1])
        tan, bit = orthonormal_frames(n)
        new_dir = local[:, :1] * tan + local[:, 1:2] * bit + local[:, 2:] * n
        thr = thr * scene._albedo[mat_h] * (local[:, 2:] / np.pi * JACOBIAN)
        # paths whose throughput vanished cannot contribute again
        keep = np.any(thr > 0.0, axis=1)
        alive, origins, directions, throughput = idx[keep], pos[keep], new_dir[keep], thr[keep]
    return radiance
