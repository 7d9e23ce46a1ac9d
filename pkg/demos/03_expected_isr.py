"""
Expected interference-to-signal ratios
======================================

Compares the zeta power series with a brute-force lattice sum, then tabulates
the four expected ISR components along the serving azimuth.
"""

import cmath

from dtdd3d.analytic import (
    dl_to_ul_closed_form,
    expected_dl_to_dl,
    expected_dl_to_ul,
    expected_ul_to_dl,
    expected_ul_to_ul,
    lattice_series,
    origin_lattice_oracle,
    ring_average_oracle,
)
from dtdd3d.antenna import BeamMode
from dtdd3d.channel import RadioConfig
from dtdd3d.geometry import SECTOR_AZIMUTHS

print(" x      series          50-ring oracle   terms")
for x in (0.1, 0.3, 0.5):
    s = lattice_series(x, 1.75)
    print(f"{x:.1f}  {s.value:.12e}  {ring_average_oracle(x, 3.5):.12e}  {s.terms_used}")

print("\nBS-to-BS sum at the serving site:", dl_to_ul_closed_form(0.3, 1.75, 0.4), origin_lattice_oracle(0.3, 3.5, 0.4))

# %%
# Expected components without shadowing, D-TDD with half the sites in downlink.
cfg = RadioConfig(sigma_db=0.0)
mode = BeamMode.beam_2d()
delta = 0.75
print("\n x     D_down       D_up         U_down       U_up")
for x in (0.1, 0.2, 0.3, 0.4, 0.5):
    z0 = x * delta * cmath.exp(1j * SECTOR_AZIMUTHS[0])
    row = (
        expected_dl_to_dl(z0, cfg, mode, 0.5, delta).value,
        expected_ul_to_dl(z0, cfg, mode, 0.5, delta).value,
        expected_dl_to_ul(x, cfg, mode, 0.5, delta).value,
        expected_ul_to_ul(x, cfg, 0.5, delta).value,
    )
    print(f"{x:.1f}  " + "  ".join(f"{v:.4e}" for v in row))
