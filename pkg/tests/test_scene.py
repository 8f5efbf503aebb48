import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import camera
from qraytrace.errors import SceneError
from qraytrace.scene import (
    EPS_RAY,
    FAR,
    Camera,
    Material,
    Ray,
    Scene,
    Triangle,
    intersect_rays,
    intersect_triangle,
    fixture_path,
    load_scene,
    nearest_chain,
    parse_scene,
    primary_ray,
)

TRI = Triangle((-1, -1, 0), (1, -1, 0), (0, 1, 0), 0)
MAT = Material((0.5, 0.5, 0.5))


def brute_hit(origin, direction, tri):
    """Independent oracle: solve o + t d = v0 + a e1 + b e2 as a 3x3 linear system."""
    e1, e2 = tri.v1 - tri.v0, tri.v2 - tri.v0
    A = np.column_stack([-direction, e1, e2])
    if abs(np.linalg.det(A)) < 1e-12:
        return None
    t, a, b = np.linalg.solve(A, origin - tri.v0)
    if a < 0 or b < 0 or a + b > 1 or t <= EPS_RAY:
        return None
    return t


def brute_nearest(origin, direction, tris):
    ts = [t for t in (brute_hit(origin, direction, tri) for tri in tris) if t is not None]
    return min(ts) if ts else None


def _scene(tris):
    return Scene(tris, [MAT], camera())


# ----------------------------------------------------------- intersect_triangle

def test_axis_aligned_hit():
    hit = intersect_triangle(Ray((0, 0, -1), (0, 0, 1)), TRI)
    assert hit.exists
    assert hit.distance == pytest.approx(1.0)
    np.testing.assert_allclose(hit.position, [0, 0, 0], atol=1e-12)
    assert hit.normal @ np.array([0, 0, 1.0]) < 0
    assert hit.material_id == 0


def test_faces_away_misses():
    assert not intersect_triangle(Ray((0, 0, -1), (0, 0, -1)), TRI).exists


def test_exit_point_outside_triangle():
    d = np.array([2.0, 0.0, 1.0]) / np.sqrt(5.0)
    hit = intersect_triangle(Ray((0, 0, -1), d), TRI)
    assert not hit.exists
    assert hit.distance == FAR


def test_hit_closer_than_epsilon_is_ignored():
    assert not intersect_triangle(Ray((0, 0, -EPS_RAY / 2), (0, 0, 1)), TRI).exists
    assert intersect_triangle(Ray((0, 0, -2 * EPS_RAY), (0, 0, 1)), TRI).exists


def test_degenerate_triangle_rejected():
    with pytest.raises(ValueError):
        Triangle((0, 0, 0), (1, 1, 1), (2, 2, 2))


def test_ray_requires_unit_direction():
    with pytest.raises(ValueError):
        Ray((0, 0, 0), (0, 0, 2))


vec = st.tuples(*[st.floats(-2, 2, allow_nan=False)] * 3)


@settings(max_examples=300, deadline=None)
@given(vec, vec, vec, vec, vec)
def test_cyclic_permutation_invariance(a, b, c, o, d):
    try:
        tris = [Triangle(a, b, c), Triangle(b, c, a), Triangle(c, a, b)]
    except ValueError:
        return
    d = np.asarray(d)
    if np.linalg.norm(d) < 1e-3:
        return
    ray = Ray(o, d / np.linalg.norm(d))
    e1, e2 = tris[0].v1 - tris[0].v0, tris[0].v2 - tris[0].v0
    A = np.column_stack([-ray.direction, e1, e2])
    if abs(np.linalg.det(A)) < 1e-6:
        return  # grazing
    t, u, v = np.linalg.solve(A, ray.origin - tris[0].v0)
    if min(abs(u), abs(v), abs(1 - u - v), abs(t - EPS_RAY)) < 1e-9:
        return  # right on an edge, where round-off may decide either way
    hits = [intersect_triangle(ray, tri) for tri in tris]
    assert len({h.exists for h in hits}) == 1
    if hits[0].exists:
        for h in hits[1:]:
            assert h.distance == pytest.approx(hits[0].distance, abs=1e-9, rel=1e-9)
            np.testing.assert_allclose(h.normal, hits[0].normal, atol=1e-9)


# ----------------------------------------------------------------- nearest_chain

def test_empty_scene_returns_null_record():
    hit = nearest_chain(Ray((0, 0, 0), (0, 0, 1)), _scene([]))
    assert not hit.exists and hit.distance == FAR and hit.material_id == -1


def test_parallel_triangles_nearer_wins():
    far = Triangle((-1, -1, 2), (1, -1, 2), (0, 1, 2))
    near = Triangle((-1, -1, 1), (1, -1, 1), (0, 1, 1))
    hit = nearest_chain(Ray((0, 0, 0), (0, 0, 1)), _scene([far, near]))
    assert hit.distance == pytest.approx(1.0)


def test_three_overlapping_triangles():
    tris = [Triangle((-1, -1, z), (1, -1, z), (0, 1, z)) for z in (2.0, 0.5, 1.0)]
    ray = Ray((0, 0, 0), (0, 0, 1))
    hit = nearest_chain(ray, _scene(tris))
    assert hit.distance == pytest.approx(brute_nearest(ray.origin, ray.direction, tris))
    assert hit.distance == pytest.approx(0.5)


def test_nearest_chain_matches_brute_force_on_random_rays(cornell, rng):
    for _ in range(300):
        o = rng.uniform(-0.9, 0.9, 3) + np.array([0, 0, 1.0])
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        hit = nearest_chain(Ray(o, d), cornell)
        ref = brute_nearest(o, d, cornell.triangles)
        if ref is None:
            assert not hit.exists
        else:
            assert hit.exists and hit.distance == pytest.approx(ref, rel=1e-9)
            assert abs(np.linalg.norm(hit.normal) - 1) < 1e-9
            assert hit.normal @ d < 0


def test_batched_intersection_agrees_with_scalar_fold(cornell, rng):
    o = np.tile([0.1, -0.2, 0.5], (500, 1)) + rng.uniform(-0.5, 0.5, (500, 3))
    d = rng.normal(size=(500, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    hit, t, normal, mat = intersect_rays(o, d, cornell)
    for i in range(500):
        ref = nearest_chain(Ray(o[i], d[i]), cornell)
        assert hit[i] == ref.exists
        if ref.exists:
            assert t[i] == pytest.approx(ref.distance, rel=1e-12)
            np.testing.assert_allclose(normal[i], ref.normal, atol=1e-12)
            assert mat[i] == ref.material_id


# ------------------------------------------------------------------- primary_ray

def test_center_ray_is_optical_axis():
    cam = camera((3, 3))
    ray = primary_ray(cam, (1, 1), (0.5, 0.5))
    np.testing.assert_allclose(ray.direction, cam.forward, atol=1e-12)
    np.testing.assert_allclose(cam.forward, [0, 0, 1])


def test_corner_elevation_quarter_pi():
    cam = camera((2, 2), fov=np.pi / 2)
    # top-left corner of the image plane
    d = primary_ray(cam, (0, 0), (0.0, 0.0)).direction
    elevation = np.arctan2(d @ cam.up, d @ cam.forward)
    assert elevation == pytest.approx(np.pi / 4, abs=1e-6)


def _screen(cam, d):
    half = np.tan(cam.vertical_fov / 2)
    f = d @ cam.forward
    return (d @ cam.right) / (f * half), (d @ cam.up) / (f * half)


def test_jitters_stay_inside_pixel_frustum(rng):
    cam = camera((5, 3), fov=1.0)
    aspect = 5 / 3
    for x, y in [(0, 0), (4, 2), (2, 1)]:
        lo = primary_ray(cam, (x, y), (0.0, 0.0)).direction
        hi = primary_ray(cam, (x, y), (0.999, 0.999)).direction
        assert not np.allclose(lo, hi)
        # pixel cone: every jittered direction is at most as far from the centre as a corner
        centre = primary_ray(cam, (x, y), (0.5, 0.5)).direction
        corner_cos = min(c @ centre for c in (lo, hi,
                                              primary_ray(cam, (x, y), (0.0, 0.999)).direction,
                                              primary_ray(cam, (x, y), (0.999, 0.0)).direction))
        for u, v in rng.uniform(0, 1, (50, 2)):
            d = primary_ray(cam, (x, y), (u, v)).direction
            assert d @ centre >= corner_cos - 1e-12
            sx, sy = _screen(cam, d)
            assert (2 * x / 5 - 1) * aspect - 1e-12 <= sx <= (2 * (x + 1) / 5 - 1) * aspect + 1e-12
            assert 1 - 2 * (y + 1) / 3 - 1e-12 <= sy <= 1 - 2 * y / 3 + 1e-12


def test_primary_ray_validates_inputs():
    cam = camera((2, 2))
    with pytest.raises(ValueError):
        primary_ray(cam, (2, 0))
    with pytest.raises(ValueError):
        primary_ray(cam, (0, 0), (1.0, 0.0))


def test_camera_rejects_bad_frame():
    with pytest.raises(ValueError):
        Camera((0, 0, 0), (1, 0, 0), (1, 1, 0), 1.0, (2, 2))
    with pytest.raises(ValueError):
        Camera((0, 0, 0), (1, 0, 0), (0, 1, 0), np.pi, (2, 2))


# -------------------------------------------------------------------- scene file

HEADER = "camera 0 0 0  1 0 0  0 1 0  60 4 4\nbackground 0.1 0.1 0.1\n"


def test_parse_two_triangles(tmp_path):
    text = HEADER + ("material 0.5 0.5 0.5 0 0 0\n"
                     "triangle -1 -1 1  1 -1 1  0 1 1  0\n"
                     "triangle -1 -1 2  1 -1 2  0 1 2  0\n")
    path = tmp_path / "two.scene"
    path.write_text(text)
    scene = load_scene(path)
    assert scene.n_primitives == 2
    np.testing.assert_allclose(scene.triangles[1].v0, [-1, -1, 2])
    assert scene.background_emission == (0.1, 0.1, 0.1)
    assert scene.camera.vertical_fov == pytest.approx(np.pi / 3)


def test_bad_material_index_reports_line():
    text = HEADER + "material 0.5 0.5 0.5 0 0 0\n# comment\ntriangle -1 -1 1  1 -1 1  0 1 1  5\n"
    with pytest.raises(SceneError) as exc:
        parse_scene(text, "bad.scene")
    assert exc.value.line == 5
    assert "bad.scene:5" in str(exc.value)


def test_empty_geometry():
    scene = parse_scene(HEADER)
    assert scene.n_primitives == 0
    assert not nearest_chain(Ray((0, 0, 0), (0, 0, 1)), scene).exists


@pytest.mark.parametrize("line, lineno", [
    ("triangle 0 0 0 1 1 1 2 2 2 0", 4),        # degenerate
    ("triangle 0 0 0 1 0 0 0 1", 4),            # arity
    ("material 0.5 0.5 x 0 0 0", 3),            # not a number
    ("material 1.5 0.5 0.5 0 0 0", 3),          # albedo range
    ("sphere 0 0 0 1", 3),                      # unknown directive
])
def test_parse_errors_carry_line_numbers(line, lineno):
    text = HEADER + ("" if line.startswith("material") or line.startswith("sphere")
                     else "material 0.5 0.5 0.5 0 0 0\n") + line + "\n"
    with pytest.raises(SceneError) as exc:
        parse_scene(text)
    assert exc.value.line == lineno


def test_missing_camera():
    with pytest.raises(SceneError):
        parse_scene("material 0.5 0.5 0.5 0 0 0\n")


def test_fixture_is_valid(cornell):
    assert cornell.n_primitives <= 12
    assert cornell.camera.resolution == (8, 8)
    assert sum(1 for m in cornell.materials if max(m.emission) > 0) == 1


def test_scene_key_is_content_hash(cornell):
    copy = load_scene(fixture_path())
    assert copy.key == cornell.key
    assert parse_scene(HEADER).key != cornell.key
