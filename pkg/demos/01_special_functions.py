"""
Zeta functions and the hexagonal lattice constant
=================================================

The lattice sums behind the expected interference reduce to Hurwitz zeta
values. This script evaluates the kernels and checks the identity linking
``omega`` to a brute-force sum over the hexagonal lattice.
"""

import math

import numpy as np

from dtdd3d.specfun import hurwitz_zeta, ln_gamma, omega, riemann_zeta

# Riemann zeta at even integers has a closed form.
print("zeta(2) - pi^2/6 =", riemann_zeta(2.0) - math.pi**2 / 6)
print("zeta(4) - pi^4/90 =", riemann_zeta(4.0) - math.pi**4 / 90)

# Hurwitz zeta at q = 1/2 is a rescaled Riemann zeta.
s = 3.5
print("zeta(s, 1/2) / ((2^s - 1) zeta(s)) =", hurwitz_zeta(s, 0.5) / ((2**s - 1) * riemann_zeta(s)))

# log-gamma agrees with the standard library.
for x in (0.3, 2.5, 40.0):
    print(f"ln_gamma({x}) = {ln_gamma(x):.15f}   math.lgamma = {math.lgamma(x):.15f}")

# %%
# ``omega(z)`` is the hexagonal lattice sum per unit shell:
# sum over nonzero lattice points of |s|^(-2z) equals 6 omega(z). The finite
# window misses a tail of order 300^(2 - 2z), visible at small z.
m, n = np.meshgrid(np.arange(-300, 301), np.arange(-300, 301))
norm2 = (m * m + m * n + n * n).astype(float)
norm2 = norm2[norm2 > 0]
for z in (1.75, 2.0, 3.0):
    direct = np.sum(norm2**-z)
    print(f"z = {z}: 6 omega = {6 * omega(z):.10f}   window sum = {direct:.10f}")
