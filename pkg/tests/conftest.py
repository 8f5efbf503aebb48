import numpy as np
import pytest

from qraytrace.scene import Camera, Material, Scene, Triangle, fixture_path, load_scene

IDENTITY_CAMERA = dict(position=(0.0, 0.0, 0.0), right=(1.0, 0.0, 0.0), up=(0.0, 1.0, 0.0))


def camera(resolution=(4, 4), fov=np.pi / 2, position=(0.0, 0.0, 0.0)):
    return Camera(position, (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), fov, resolution)


def cube_triangles(half=1.0, center=(0.0, 0.0, 0.0), material_id=0):
    """Closed axis-aligned cube of 12 triangles."""
    c = np.asarray(center, dtype=float)
    corners = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], dtype=float)
    corners = c + half * corners
    faces = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    tris = []
    for a, b, cc, d in faces:
        tris.append(Triangle(corners[a], corners[b], corners[cc], material_id))
        tris.append(Triangle(corners[a], corners[cc], corners[d], material_id))
    return tris


def furnace_scene(L=1.0, rho=0.5, resolution=(2, 2)):
    """Camera inside a closed box whose walls all emit L and reflect with albedo rho."""
    mat = Material((rho,) * 3, (L,) * 3)
    return Scene(cube_triangles(), [mat], camera(resolution), (L,) * 3)


def emissive_screen_scene(E=(0.5, 0.25, 0.75), resolution=(4, 4), albedo=(0.0, 0.0, 0.0)):
    """One huge emissive triangle covering the whole field of view at z = 1."""
    tri = Triangle((-100.0, -100.0, 1.0), (100.0, -100.0, 1.0), (0.0, 100.0, 1.0), 0)
    return Scene([tri], [Material(albedo, E)], camera(resolution), (0.0, 0.0, 0.0))


@pytest.fixture(scope="session")
def cornell():
    return load_scene(fixture_path())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
