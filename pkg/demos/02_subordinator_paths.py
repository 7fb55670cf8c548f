"""
Stable subordinator and its inverse
===================================

T(tau) is an increasing stable process with E exp(-u T(tau)) = exp(-tau u**alpha).
Its first-passage process S(t) = inf{tau : T(tau) > t} is the random clock
of subdiffusion. Heavy-tailed jumps of T become flat stretches of S.
"""

import math

import numpy as np
from scipy import stats

from subdiff.parallel import block_rng
from subdiff.specfun import mittag_leffler_neg
from subdiff.subordinator import (
    SimConfig,
    ctrw_rescaled,
    sample_inverse_paths,
    sample_subordinator_path,
    simulate_inverse_subordinator,
)

alpha = 0.6
rng = np.random.default_rng(2024)

###############################################################################
# One path of T, and S on a fine grid without in-step refinement: S is
# constant wherever T jumps over a stretch of real time.

tpath = sample_subordinator_path(alpha, 400, 0.01, rng)
print("T at tau = 1, 2, 3, 4:", np.round(tpath.values[100::100], 3))
grid = np.linspace(0, 2, 2001)
s = sample_inverse_paths(alpha, grid, SimConfig(dtau=0.01, t_max=2, refine=False), rng, 1)[0]
print(f"fraction of the grid where S is flat: {np.mean(np.diff(s) == 0):.3f}")

###############################################################################
# The one-time law of S(t) against its Laplace transform and mean.

cfg = SimConfig(seed=1, n_paths=500_000, dtau=0.5, t_max=2.0)
for t in (1.0, 2.0):
    st = simulate_inverse_subordinator(alpha, t, cfg)
    se = st.std(ddof=1) / math.sqrt(st.size)
    print(f"t={t}: mean S {st.mean():.5f} +- {se:.5f}, exact {t**alpha / math.gamma(1 + alpha):.5f}")
    e = np.exp(-st)
    print(f"      E exp(-S) {e.mean():.5f} +- {e.std(ddof=1) / math.sqrt(e.size):.5f},"
          f" E_a(-t^a) {mittag_leffler_neg(alpha, t**alpha):.5f}")

###############################################################################
# A renewal process with Pareto waiting times, counted and rescaled, tends to
# the same law.

ref = simulate_inverse_subordinator(alpha, 1.0, SimConfig(seed=2, n_paths=20_000, dtau=1.0, t_max=1.0))
for c in (10.0, 1e3, 1e5):
    x = ctrw_rescaled(alpha, c, 1_000_000, block_rng(3, int(c)), size=20_000)
    print(f"c={c:8.0f}: KS distance to S(1) = {stats.ks_2samp(x, ref).statistic:.4f}")
