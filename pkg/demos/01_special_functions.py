"""
The M-Wright function F_alpha and the Mittag-Leffler function
=============================================================

``t**-alpha F_alpha(x / t**alpha)`` is the density of the inverse stable
subordinator S(t), and its Laplace transform is the Mittag-Leffler function.
This script evaluates both and checks them against closed forms.
"""

import math

import numpy as np
from scipy import special

from subdiff.quadrature import QuadConfig, integrate_f_alpha
from subdiff.specfun import f_alpha, f_alpha_mode, mittag_leffler_neg, series_switch_point

###############################################################################
# Two closed forms: F_{1/2} is a half Gaussian and F_{1/3} an Airy function.

z = np.linspace(0, 8, 9)
half = np.exp(-z**2 / 4) / math.sqrt(math.pi)
third = 3 ** (2 / 3) * special.airy(z / 3 ** (1 / 3))[0]
print("   z     F_1/2(z)        error     F_1/3(z)        error")
for zi, a, b in zip(z, half, third):
    print(f"{zi:4.1f}  {f_alpha(0.5, zi):.6e}  {abs(f_alpha(0.5, zi) - a):.1e}"
          f"  {f_alpha(1/3, zi):.6e}  {abs(f_alpha(1/3, zi) - b):.1e}")

###############################################################################
# The power series is used while it is well conditioned; past that point the
# value comes from a Zolotarev-type integral. The switch depends on alpha.

for a in (0.2, 0.5, 0.8, 0.95):
    print(f"alpha={a}: series used up to z={series_switch_point(a):.3f}")

###############################################################################
# Shape: monotone for alpha <= 1/2, a single interior maximum above.

for a in (0.3, 0.5, 0.6, 0.75, 0.9):
    print(f"alpha={a}: mode at {f_alpha_mode(a)}")

###############################################################################
# Moments E[S(1)^n] = n!/Gamma(1 + n alpha) and the Laplace transform
# E[exp(-v S(1))] = E_alpha(-v).

quad = QuadConfig(1e-13, 1e-12)
for a in (0.3, 0.7):
    m = [integrate_f_alpha(a, lambda u, n=n: u**n, quad, moment=n) for n in range(4)]
    exact = [math.factorial(n) / math.gamma(1 + n * a) for n in range(4)]
    print(f"alpha={a}: moments {np.round(m, 10)} vs {np.round(exact, 10)}")
    for v in (0.1, 1.0, 5.0):
        lt = integrate_f_alpha(a, lambda u: math.exp(-v * u), quad)
        print(f"    v={v}: transform {lt:.12f}  E_a(-v) {mittag_leffler_neg(a, v):.12f}")
