"""Coverage of dynamic TDD macro-cell networks with 2D/3D beamforming.

Modules, bottom-up: ``specfun`` (gamma/zeta kernels), ``geometry`` (hexagonal
lattice and user placement), ``antenna`` (beam patterns), ``channel`` (path
loss, shadowing, power control), ``scenario`` (one slot's ISR and SINR),
``analytic`` (expected ISR), ``montecarlo`` (campaigns and coverage curves)
and ``cli``.
"""

__version__ = "0.1.0"
