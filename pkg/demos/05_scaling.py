"""Error against query budget: the quadratic speedup, measured.

For each T = 2**t the quantum arm spends (T - 1) * B oracle queries per pixel
channel and the classical arm traces the same number of paths per pixel.
Against a dense lattice reference, the quantum RMSE should fall like 1/budget
and the classical RMSE like 1/sqrt(budget).

The defaults here are lighter than the acceptance run (fewer trials, a coarser
reference), so expect the classical slope to flatten a little at the largest
budgets where the reference's own error starts to show.

    python demos/05_scaling.py [trials] [out_dir]
"""
import sys
from pathlib import Path

from qraytrace.pipeline import run_scaling_experiment
from qraytrace.scene import fixture_path, load_scene

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 4
out_dir = Path(sys.argv[2] if len(sys.argv) > 2 else "demo_out")
out_dir.mkdir(exist_ok=True)

report = run_scaling_experiment(load_scene(fixture_path()), t_bits=range(4, 11), trials=trials,
                                path_bits=16, comparator_bits=14,
                                progress=lambda t, k: print(f"t={t} trial {k + 1}/{trials}", end="\r"))
print()
print(report.summary())
report.to_csv(out_dir / "scaling.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)
fig, ax = plt.subplots(figsize=(5, 4))
for arm in ("quantum", "classical"):
    rows = report.arm(arm)
    ax.loglog([r["budget"] for r in rows], [r["rmse"] for r in rows], "o-",
              label=f"{arm} (slope {report.slopes[arm]:+.2f})")
q = report.arm("quantum")
ax.loglog([r["budget"] for r in q], [r["bound"] for r in q], "k--", label="counting bound")
ax.set_xlabel("oracle queries per pixel channel")
ax.set_ylabel("RMSE")
ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "scaling.png", dpi=120)
print(f"wrote {out_dir / 'scaling.png'}")
