"""
Fractional Fokker-Planck equation
=================================

The subordinated density solves an integral equation with the power kernel
(t - s)**(alpha - 1) / Gamma(alpha). The explicit product-integration scheme
is compared with the quadrature density as the grid is refined.
"""

import numpy as np

from subdiff.ffpe import FfpeProblem, cell_centred_grid, gaussian_initial_profile, max_stable_dt, refinement_study, solve_ffpe
from subdiff.subdiffusion import ModelParams

params = ModelParams(alpha=0.5, D=1.0)

###############################################################################
# The step bound tightens like dx**(2/alpha): memory makes explicit schemes
# expensive, which is why the FFT solver exists.

for dx in (0.2, 0.1, 0.05):
    print(f"dx={dx}: largest stable dt = {max_stable_dt(params.alpha, params.D, dx):.3e}")

###############################################################################
# Refinement against the exact density (Gaussian start of operational age 0.1).

for row in refinement_study(params, 1.0, [0.2, 0.1, 0.05], tau0=0.1):
    order = f"{row['order']:.3f}" if "order" in row else "  -  "
    print(f"dx={row['dx']:.3f} steps={row['n_steps']:7d} max err={row['error']:.3e} order={order}"
          f" mass err={row['mass_error']:.1e}")

###############################################################################
# Same problem, both solvers.

x = cell_centred_grid(8.0, 40)
n = int(np.ceil(1.0 / (0.5 * max_stable_dt(0.5, 1.0, x[1] - x[0]))))
prob = FfpeProblem(params, x, np.linspace(0, 1, n + 1), gaussian_initial_profile(x, 1.0, 0.1))
a = solve_ffpe(prob, method="march", output_every=n)
b = solve_ffpe(prob, method="fft", output_every=n)
print(f"march vs fft max difference: {np.max(np.abs(a.p - b.p)):.2e}")
