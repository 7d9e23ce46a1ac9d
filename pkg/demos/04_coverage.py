"""
Coverage with and without dynamic TDD
=====================================

Runs short Monte Carlo campaigns and prints coverage probabilities at a few
thresholds for the downlink and the uplink, with and without 3D beamforming.
Increase ``DROPS`` for smoother numbers.
"""

import numpy as np

from dtdd3d.antenna import BeamMode
from dtdd3d.montecarlo import CampaignSpec, coverage_curve, run_campaign
from dtdd3d.scenario import Direction, TddConfig, TddMode

DROPS = 3000
gammas = np.array([-30.0, -20.0, -10.0, 0.0, 10.0, 20.0])


def show(label, spec):
    c = coverage_curve(run_campaign(spec), gammas)
    print(f"{label:<28}" + "  ".join(f"{t:5.3f}" for t in c.theta))


print(f"{'gamma (dB)':<28}" + "  ".join(f"{g:5.0f}" for g in gammas))
base = CampaignSpec(n_drops=DROPS, seed=3)
for mode in (BeamMode.sector_only(), BeamMode.beam_3d()):
    name = mode.kind.value
    show(f"DL S-TDD {name}", base.with_(mode=mode, tdd=TddConfig(TddMode.STATIC_DL)))
    show(f"DL D-TDD {name}", base.with_(mode=mode))

# %%
# Uplink: neighbouring downlink base stations dominate unless their beams are
# narrow in both planes.
show("UL S-TDD", base.with_(direction=Direction.UL, tdd=TddConfig(TddMode.STATIC_UL)))
for mode in (BeamMode.sector_only(), BeamMode.beam_3d(), BeamMode.beam_3d(8)):
    show(f"UL D-TDD {mode.kind.value} {np.degrees(mode.theta_h3db):.0f} deg", base.with_(mode=mode, direction=Direction.UL))
