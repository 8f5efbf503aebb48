"""Rendering jobs for the three arms, the error-scaling experiment and Fig-3 style dumps."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .classical import TracerConfig, pixel_index, pixel_samples, render_classical
from .counting import (
    MAX_CIRCUIT_QUBITS,
    CountingConfig,
    counting_distribution,
    error_bound,
    sample_indices,
    theta_from_count,
)
from .errors import ConfigError
from .estimator import FixedPointFormat, bayesian_map, clamp_table, comparator_count, estimate_mean, mean_from_count
from .imageio import write_image_csv, write_ppm
from .paths import MAX_PATH_BITS, PathIdLayout, check_cap, pixel_color_table
from .scene import Scene, load_scene

MODES = ("quantum", "classical", "reference")


@dataclass(frozen=True)
class RenderJob:
    scene_path: str | Path
    mode: str = "quantum"
    depth: int = 2
    path_bits: int = 8
    comparator_bits: int = 8
    counting_bits: int = 10
    reps: int = 8
    rays: int = 64
    seed: int = 0
    value_bits: int = 0
    use_circuit: bool = False
    out: str | Path | None = None
    diag: str | Path | None = None
    linear_csv: str | Path | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.mode in ("quantum", "reference"):
            check_cap(self.layout, MAX_PATH_BITS)
        if self.mode == "quantum":
            self.counting  # validates n, t, B
            if self.use_circuit and self.layout.id_bits + self.counting_bits > MAX_CIRCUIT_QUBITS:
                raise ConfigError(f"r + c + t = {self.layout.id_bits + self.counting_bits} exceeds "
                                  f"the statevector cap of {MAX_CIRCUIT_QUBITS}")
        if self.mode == "classical":
            self.tracer

    @property
    def layout(self) -> PathIdLayout:
        return PathIdLayout.equal_split(self.path_bits, self.depth, self.comparator_bits)

    @property
    def format(self) -> FixedPointFormat:
        return FixedPointFormat(self.value_bits, self.comparator_bits)

    @property
    def counting(self) -> CountingConfig:
        return CountingConfig(self.path_bits + self.comparator_bits, self.counting_bits, self.reps, self.seed)

    @property
    def tracer(self) -> TracerConfig:
        return TracerConfig(self.depth, self.rays, self.seed)


@dataclass
class PixelDiagnostics:
    x: int
    y: int
    channel: int
    S_true: int
    S_map: int
    theta_map: float
    outcomes: tuple[int, ...]
    clamp_count: int


def _scene(job: RenderJob, scene: Scene | None) -> Scene:
    return load_scene(job.scene_path) if scene is None else scene


def _pixels(scene: Scene):
    w, h = scene.camera.resolution
    return [(x, y) for y in range(h) for x in range(w)]


def render_quantum(job: RenderJob, scene: Scene | None = None):
    """Per pixel and channel: oracle table, comparator counting, MAP mean.

    Returns ``(image, diagnostics)`` and writes whichever outputs the job names.
    """
    scene = _scene(job, scene)
    layout, fmt, cfg = job.layout, job.format, job.counting
    w, h = scene.camera.resolution
    img = np.zeros((h, w, 3))
    diags = []
    for x, y in _pixels(scene):
        table = pixel_color_table((x, y), scene, layout)
        for ch in range(3):
            gen = rngmod.stream(job.seed, rngmod.COUNTING, pixel_index(scene, (x, y)), ch)
            mean, d = estimate_mean(table[:, ch], fmt, cfg, gen, use_circuit=job.use_circuit)
            img[y, x, ch] = mean
            diags.append(PixelDiagnostics(x, y, ch, d.S_true, d.S_map, d.theta_map, d.outcomes, d.clamp_count))
    _write_outputs(job, img)
    if job.diag is not None:
        write_diagnostics(job.diag, diags)
    return img, diags


def render_reference(job: RenderJob, scene: Scene | None = None) -> np.ndarray:
    """Exact mean of every pixel's full oracle table; seed-independent."""
    scene = _scene(job, scene)
    check_cap(job.layout)
    w, h = scene.camera.resolution
    img = np.zeros((h, w, 3))
    for x, y in _pixels(scene):
        img[y, x] = pixel_color_table((x, y), scene, job.layout).mean(axis=0)
    _write_outputs(job, img)
    return img


def render(job: RenderJob, scene: Scene | None = None) -> np.ndarray:
    if job.mode == "quantum":
        return render_quantum(job, scene)[0]
    if job.mode == "reference":
        return render_reference(job, scene)
    img = render_classical(_scene(job, scene), job.tracer)
    _write_outputs(job, img)
    return img


def _write_outputs(job: RenderJob, img: np.ndarray):
    if job.out is not None:
        write_ppm(job.out, img)
    if job.linear_csv is not None:
        write_image_csv(job.linear_csv, img)


def write_diagnostics(path, diags):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x", "y", "channel", "S_true", "S_map", "theta_map", "outcomes", "clamp_count"])
        for d in diags:
            out.writerow([d.x, d.y, d.channel, d.S_true, d.S_map, repr(d.theta_map),
                          " ".join(map(str, d.outcomes)), d.clamp_count])


# ------------------------------------------------------------------ Fig. 3

def emit_distribution(theta: float, T: int, path=None) -> list[tuple[float, float]]:
    """``(theta_tilde, probability)`` rows of the folded counting law; optionally as CSV."""
    p = counting_distribution(theta, T)
    rows = [(k / T, float(v)) for k, v in enumerate(p)]
    if path is not None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["theta_tilde", "probability"])
            out.writerows((repr(a), repr(b)) for a, b in rows)
    return rows


# ------------------------------------------------------------------ scaling

@dataclass
class ScalingReport:
    """RMSE against the reference image per arm and query budget.

    Quantum rows also carry ``bound``: the RMS over pixel-channels of the
    counting bound in its normalised form (see :func:`qraytrace.counting.error_bound`)
    plus half a comparator step, in radiance units.
    """

    rows: list[dict] = field(default_factory=list)
    slopes: dict[str, float] = field(default_factory=dict)

    def arm(self, name: str) -> list[dict]:
        return [r for r in self.rows if r["arm"] == name]

    def fit(self):
        for name in ("quantum", "classical"):
            rows = self.arm(name)
            if len(rows) >= 2:
                x = np.log([r["budget"] for r in rows])
                y = np.log([r["rmse"] for r in rows])
                self.slopes[name] = float(np.polyfit(x, y, 1)[0])
        return self

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["arm", "t", "budget", "rmse", "bound"])
            for r in self.rows:
                out.writerow([r["arm"], r["t"], r["budget"], repr(r["rmse"]), repr(r.get("bound", float("nan")))])

    def summary(self) -> str:
        lines = [f"{r['arm']:>9}  t={r['t']:2d}  budget={r['budget']:7d}  rmse={r['rmse']:.3e}" for r in self.rows]
        lines += [f"slope[{k}] = {v:+.3f}" for k, v in self.slopes.items()]
        return "\n".join(lines)


def _derived_seed(*words: int) -> int:
    return int(np.random.SeedSequence([w & ((1 << 64) - 1) for w in words]).generate_state(1, np.uint64)[0])


def scaling_targets(scene: Scene, layout: PathIdLayout, fmt: FixedPointFormat):
    """Reference means and exact comparator counts per pixel-channel, shapes ``(P, 3)``."""
    pixels = _pixels(scene)
    ref = np.zeros((len(pixels), 3))
    counts = np.zeros((len(pixels), 3), dtype=np.int64)
    for i, px in enumerate(pixels):
        table = pixel_color_table(px, scene, layout, use_cache=False)
        ref[i] = table.mean(axis=0)
        for ch in range(3):
            counts[i, ch] = comparator_count(clamp_table(table[:, ch], fmt)[0], fmt)
    return ref, counts


def run_scaling_experiment(scene: Scene, t_bits=range(4, 11), trials: int = 20, reps: int = 8,
                           path_bits: int = 20, comparator_bits: int = 14, depth: int = 2,
                           value_bits: int = 0, seed: int = 0, progress=None) -> ScalingReport:
    """Error against query budget for both arms on a shared reference.

    The quantum arm spends ``(T - 1) * reps`` oracle queries per pixel-channel.
    The classical arm traces that many paths per pixel.
    """
    layout = PathIdLayout.equal_split(path_bits, depth, comparator_bits)
    check_cap(layout)
    fmt = FixedPointFormat(value_bits, comparator_bits)
    r, N = layout.path_bits, 1 << layout.id_bits
    ref, counts = scaling_targets(scene, layout, fmt)
    pixels = _pixels(scene)
    report = ScalingReport()
    for t in t_bits:
        T = 1 << t
        budget = (T - 1) * reps
        sq_q = sq_c = 0.0
        for k in range(trials):
            for i, px in enumerate(pixels):
                p_idx = pixel_index(scene, px)
                for ch in range(3):
                    S = int(counts[i, ch])
                    gen = rngmod.stream(seed, rngmod.COUNTING, k, t, p_idx, ch)
                    post = bayesian_map(sample_indices(theta_from_count(S, N), T, reps, gen), N, T)
                    sq_q += (mean_from_count(post.S_map, r, fmt) - ref[i, ch]) ** 2
                cfg = TracerConfig(depth, budget, _derived_seed(seed, 0xC1A5, k, t))
                sq_c += float(np.sum((pixel_samples(scene, cfg, px).mean(axis=0) - ref[i]) ** 2))
            if progress is not None:
                progress(t, k)
        n = trials * len(pixels) * 3
        bound = math.ldexp(1.0, value_bits) * error_bound(counts / N, T) + fmt.step / 2
        report.rows.append(dict(arm="quantum", t=t, budget=budget, rmse=math.sqrt(sq_q / n),
                                bound=float(np.sqrt(np.mean(bound ** 2)))))
        report.rows.append(dict(arm="classical", t=t, budget=budget, rmse=math.sqrt(sq_c / n)))
    return report.fit()
