"""Render the bundled Cornell-style box with all three arms.

The reference arm averages every path of the lattice exactly. The quantum arm
estimates the same averages through comparator counting. The classical arm is
plain Monte Carlo path tracing. Images are written as PPM next to a CSV of
per pixel-channel counting diagnostics.

    python demos/04_render_fixture.py [out_dir]
"""
import sys
import time
from pathlib import Path

import numpy as np

from qraytrace.pipeline import RenderJob, render
from qraytrace.scene import fixture_path

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out_dir.mkdir(exist_ok=True)
scene = fixture_path()

common = dict(depth=2, path_bits=8, comparator_bits=6, counting_bits=10, reps=8, rays=255 * 8, seed=1)
images = {}
for mode in ("reference", "quantum", "classical"):
    job = RenderJob(scene, mode, out=out_dir / f"{mode}.ppm",
                    diag=out_dir / "quantum_diag.csv" if mode == "quantum" else None, **common)
    start = time.perf_counter()
    images[mode] = render(job)
    print(f"{mode:>9}: {time.perf_counter() - start:5.1f} s -> {job.out}")

for mode in ("quantum", "classical"):
    rmse = np.sqrt(np.mean((images[mode] - images["reference"]) ** 2))
    print(f"RMSE {mode:>9} vs reference: {rmse:.2e}")
