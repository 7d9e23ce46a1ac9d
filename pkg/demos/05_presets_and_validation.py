"""
Figure presets, manifests and self-validation
=============================================

The command line wraps these calls; ``dtdd3d sweep --preset fig6`` writes the
same files as the loop below.
"""

import tempfile
from pathlib import Path

from dtdd3d.cli import ScenarioConfig, load_config, preset_configs, run_scenario, validate

base = ScenarioConfig.defaults().with_(campaign__n_drops=1000)
out = Path(tempfile.mkdtemp())
for curve, cfg in preset_configs("fig6", base).items():
    run_scenario(cfg, out / curve)
    print(curve, sorted(p.name for p in (out / curve).iterdir()))

# %%
# Every run leaves a manifest with all values materialized; it reruns as is.
manifest = out / "dtdd_k0.7_beam3d" / "manifest.ini"
print(manifest.read_text().split("[radio]")[1].splitlines()[6])
again = load_config(manifest)
run_scenario(again, out / "rerun")
same = (out / "rerun" / "coverage.csv").read_bytes() == (out / "dtdd_k0.7_beam3d" / "coverage.csv").read_bytes()
print("rerun identical:", same)

# %%
# Quick validation on a one-ring network.
report = validate(ScenarioConfig.defaults().with_(network__rings=1))
for check in report["checks"]:
    print(f"{'ok  ' if check['passed'] else 'FAIL'} {check['name']}")
