"""Locomotion-adaptation benchmark under the bundled scripted transcript:
direct numeric prediction (auto) vs level-voting with simulated selection
(sampling) vs midpoint picking (determining), plus a random-parameter
baseline per terrain."""

import os
import tempfile

from quadkit.adaptation import random_baseline_percent
from quadkit.bench import cmd_adapt
from quadkit.config import ToolkitConfig
from quadkit.terrain import terrain_by_name

out_dir = os.path.join(tempfile.gettempdir(), "quadkit_lss_demo")
rows = cmd_adapt(runs=5, out_dir=out_dir, seed=0)

print(f"{'terrain':16s} {'method':22s} {'vel_xy%':>8s} {'yaw%':>8s} "
      f"{'swing%':>8s} {'stance%':>8s}")
for row in rows:
    vals = row.report.as_tuple()
    print(f"{row.terrain:16s} {row.variant:22s} "
          + " ".join(f"{v:8.2f}" for v in vals))

cfg = ToolkitConfig()
print("\nrandom-parameter baselines (mean xy-velocity percent of 100 draws):")
for name in ("uphill_slope", "downhill_slope", "upside_stair",
             "downside_stair", "uneven_ground"):
    pct = random_baseline_percent(terrain_by_name(name), 100, cfg)
    print(f"  {name:16s} {pct:6.2f}")

print(f"\nfull CSV and per-candidate dumps in {out_dir}")
