"""
Subdiffusion: density and paths of B(S(t))
==========================================

The parent process has density exp(-x**2/(D tau))/sqrt(pi D tau), so its
variance is D tau/2. Running it on the clock S(t) gives a cusped density
whose second moment grows like t**alpha.
"""

import math

import numpy as np
from scipy import integrate

from subdiff.subdiffusion import ModelParams, simulate_subordinated_paths, subordinated_density_grid, subordinated_moments
from subdiff.subordinator import SimConfig

params = ModelParams(alpha=0.7, D=1.0)

###############################################################################
# Density on a grid, and its mass and second moment.

x = np.linspace(0, 30, 3001)
for t in (0.5, 1.0, 4.0):
    p = subordinated_density_grid(params, t, x).values
    mass = 2 * integrate.simpson(p, x=x)
    m2 = 2 * integrate.simpson(p * x**2, x=x)
    print(f"t={t}: p(0)={p[0]:.5f} mass={mass:.10f} <x^2>={m2:.8f} exact={subordinated_moments(params, t)[1]:.8f}")

###############################################################################
# Monte Carlo: terminal histogram against the density.

t = 1.0
r = simulate_subordinated_paths(params, [t], SimConfig(seed=4, n_paths=400_000, dtau=0.5, t_max=t))[:, 0]
edges = np.linspace(-2, 2, 9)
counts, _ = np.histogram(r, edges)
fine = np.linspace(-2, 2, 801)
dens = subordinated_density_grid(params, t, fine).values
print("  bin           MC prob    density prob")
for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
    sel = slice(100 * i, 100 * i + 101)
    print(f"[{lo:+.1f},{hi:+.1f})  {counts[i] / r.size:.5f}    {integrate.simpson(dens[sel], x=fine[sel]):.5f}")
se = (r**2).std(ddof=1) / math.sqrt(r.size)
print(f"MC <r^2> = {(r**2).mean():.5f} +- {se:.5f}")
