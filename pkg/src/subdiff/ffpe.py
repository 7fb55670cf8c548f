"""Fractional Fokker-Planck equation in Volterra integral form.

Solves

    p(t, x) = f(x) + 1/Gamma(alpha) int_0^t (t - s)**(alpha - 1) [L p](s, x) ds

with ``L = (D/4) d^2/dx^2`` (the generator of the parent Gaussian with
variance ``D tau / 2``) discretized as a zero-flux, cell-centred second
difference. Time stepping is explicit product integration: ``L p`` is held
constant on each step and integrated exactly against the power kernel,

    p_n = f + c sum_{k<n} b_{n-1-k} L p_k,   c = dt**alpha / Gamma(1 + alpha),
    b_j = (j + 1)**alpha - j**alpha.

For ``alpha = 1`` all ``b_j`` are one and the scheme is forward Euler.

Two solvers give the same discrete solution:

* ``march``: direct stepping with the stored history of ``L p``;
  ``O(N_t**2 N_x)``.
* ``fft``: diagonalizes ``L`` with a DCT-II and, per mode, inverts the
  generating function ``1 + mu z B(z)`` as a power series with FFT-based
  Newton iteration; ``O(N_x N_t log N_t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy import special

from .errors import StabilityError
from .quadrature import QuadConfig
from .subdiffusion import ModelParams, gaussian_kernel, subordinated_density_grid

__all__ = [
    "FfpeProblem",
    "FfpeSolution",
    "convolution_weights",
    "increment_weights",
    "stability_limit",
    "max_stable_dt",
    "apply_operator",
    "gaussian_initial_profile",
    "cell_centred_grid",
    "march_step",
    "solve_ffpe",
    "ffpe_oracle",
    "refinement_study",
    "laplace_subordination_check",
]


@dataclass(frozen=True)
class FfpeProblem:
    params: ModelParams
    x_grid: np.ndarray
    t_grid: np.ndarray
    initial_profile: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        t = np.asarray(self.t_grid, dtype=float)
        f = np.asarray(self.initial_profile, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ValueError("x_grid needs at least 3 points")
        if t.ndim != 1 or t.size < 2 or t[0] != 0.0:
            raise ValueError("t_grid must start at 0 and have at least 2 points")
        for name, g in (("x_grid", x), ("t_grid", t)):
            d = np.diff(g)
            if np.any(d <= 0) or np.ptp(d) > 1e-9 * d.mean():
                raise ValueError(f"{name} must be uniform and strictly increasing")
        if f.shape != x.shape or np.any(f < 0):
            raise ValueError("initial_profile must be nonnegative on x_grid")
        mass = f.sum() * (x[1] - x[0])
        if abs(mass - 1.0) > 1e-6:
            raise ValueError(f"initial_profile must carry unit mass, has {mass}")
        object.__setattr__(self, "x_grid", x)
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "initial_profile", f)

    @property
    def dx(self):
        return float(self.x_grid[1] - self.x_grid[0])

    @property
    def dt(self):
        return float(self.t_grid[1] - self.t_grid[0])


@dataclass(frozen=True)
class FfpeSolution:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray  # shape (len(t), len(x))

    def mass(self):
        """Trapezoidal mass per stored time."""
        dx = self.x[1] - self.x[0]
        return dx * (self.p.sum(axis=1) - 0.5 * (self.p[:, 0] + self.p[:, -1]))


def convolution_weights(alpha, n):
    """``b_j = (j+1)**alpha - j**alpha`` for ``j < n``."""
    j = np.arange(n, dtype=float)
    return (j + 1.0) ** alpha - j**alpha


def increment_weights(alpha, n):
    """Weights ``d_j`` of the increment form ``p_n - p_{n-1} = c sum_j d_j L p_{n-1-j}``.

    ``d_0 = 1`` and ``d_j = b_j - b_{j-1}``; all ``d_j`` with ``j >= 1``
    vanish when ``alpha = 1``, which is where the memory disappears.
    """
    b = convolution_weights(alpha, n)
    d = b.copy()
    d[1:] -= b[:-1]
    return d


def stability_limit(alpha):
    """Largest ``c * |lambda|`` for which the explicit scheme is stable.

    The binding mode oscillates with period two steps; its generating
    function vanishes at ``z = -1`` when ``c |lambda| = 1 / (2 eta(-alpha))``
    with the Dirichlet eta function ``eta(s) = (1 - 2**(1-s)) zeta(s)``.
    """
    eta = (1.0 - 2.0 ** (1.0 + alpha)) * special.zeta(-alpha)
    return 1.0 / (2.0 * eta)


def max_stable_dt(alpha, D, dx):
    """Largest explicit step for ``L = (D/4) d^2/dx^2`` on spacing ``dx``."""
    lam = D / dx**2
    return (stability_limit(alpha) * math.gamma(1.0 + alpha) / lam) ** (1.0 / alpha)


def apply_operator(p, D, dx):
    """Zero-flux ``(D/4) d^2/dx^2`` on the last axis; exactly mass-conserving."""
    flux = np.diff(p, axis=-1)
    out = np.zeros_like(p)
    out[..., :-1] += flux
    out[..., 1:] -= flux
    return out * (0.25 * D / dx**2)


def cell_centred_grid(half_width, n):
    """``n`` cell centres covering ``[-half_width, half_width]``."""
    dx = 2.0 * half_width / n
    return -half_width + dx * (np.arange(n) + 0.5)


def gaussian_initial_profile(x_grid, D, tau0):
    """Parent Gaussian at operational time ``tau0``, renormalized to unit grid mass."""
    x = np.asarray(x_grid, dtype=float)
    f = gaussian_kernel(tau0, x, D)
    return f / (f.sum() * (x[1] - x[0]))


def _check_stability(problem):
    a, D = problem.params.alpha, problem.params.D
    dt_max = max_stable_dt(a, D, problem.dx)
    if problem.dt > dt_max * (1.0 + 1e-12):
        raise StabilityError(
            f"dt={problem.dt:.6g} exceeds the explicit stability bound {dt_max:.6g} for dx={problem.dx:.6g}",
            admissible_dt=dt_max,
        )


def _output_indices(n_steps, output_every):
    idx = list(range(0, n_steps + 1, max(int(output_every), 1)))
    if idx[-1] != n_steps:
        idx.append(n_steps)
    return np.array(idx)


def march_step(p_prev, lp_history, weights, coeff):
    """One explicit step from stored history.

    ``lp_history[k]`` holds ``L p_k`` for ``k = 0..n-1`` (oldest first) and
    ``weights`` the increment weights ``d_0..d_{n-1}``.
    """
    n = lp_history.shape[0]
    return p_prev + coeff * (weights[:n][::-1] @ lp_history)


def _solve_march(problem, out_idx):
    a, D = problem.params.alpha, problem.params.D
    dx, dt = problem.dx, problem.dt
    n_steps = problem.t_grid.size - 1
    coeff = dt**a / math.gamma(1.0 + a)
    want = set(out_idx.tolist())
    rows = []
    p = problem.initial_profile.copy()
    if 0 in want:
        rows.append(p.copy())
    if a == 1.0:
        for n in range(1, n_steps + 1):
            p = p + coeff * apply_operator(p, D, dx)
            if n in want:
                rows.append(p.copy())
        return np.array(rows)
    d = increment_weights(a, n_steps)
    hist = np.empty((n_steps, p.size))
    for n in range(1, n_steps + 1):
        hist[n - 1] = apply_operator(p, D, dx)
        p = march_step(p, hist[:n], d, coeff)
        if n in want:
            rows.append(p.copy())
    return np.array(rows)


def _series_reciprocal(g):
    """Power-series reciprocal of each row of ``g`` (``g[:, 0] == 1``)."""
    n = g.shape[1]
    q = np.ones((g.shape[0], 1))
    m = 1
    while m < n:
        m2 = min(2 * m, n)
        size = sfft.next_fast_len(m2 + m, real=True)
        gq = sfft.irfft(sfft.rfft(g[:, :m2], size) * sfft.rfft(q, size), size)[:, :m2]
        gq[:, 0] -= 1.0  # gq - 1 is O(z^m)
        corr = sfft.irfft(sfft.rfft(gq[:, m:m2], size) * sfft.rfft(q, size), size)[:, : m2 - m]
        q = np.concatenate([q, -corr], axis=1)
        m = m2
    return q


def _solve_fft(problem, out_idx, chunk=8):
    a, D = problem.params.alpha, problem.params.D
    dx, dt = problem.dx, problem.dt
    n_steps = problem.t_grid.size - 1
    nx = problem.x_grid.size
    coeff = dt**a / math.gamma(1.0 + a)
    fh = sfft.dct(problem.initial_profile, type=2, norm="ortho")
    m = np.arange(nx)
    mu = coeff * (D / dx**2) * np.sin(np.pi * m / (2 * nx)) ** 2
    b = convolution_weights(a, n_steps)
    modes = np.flatnonzero(np.abs(fh) > 1e-16 * np.abs(fh).max())
    coef_out = np.zeros((out_idx.size, nx))
    for start in range(0, modes.size, chunk):
        sel = modes[start : start + chunk]
        g = np.empty((sel.size, n_steps + 1))
        g[:, 0] = 1.0
        g[:, 1:] = mu[sel, None] * b[None, :]
        q = _series_reciprocal(g)
        cum = np.cumsum(q, axis=1)
        coef_out[:, sel] = (cum[:, out_idx] * fh[sel, None]).T
    return sfft.idct(coef_out, type=2, norm="ortho", axis=1)


def solve_ffpe(problem: FfpeProblem, method="auto", output_every=1) -> FfpeSolution:
    """Advance the integral equation over ``problem.t_grid``.

    Densities are returned at every ``output_every``-th time (the final time
    is always included). Raises :class:`StabilityError` when ``dt`` breaks
    the explicit bound.
    """
    _check_stability(problem)
    n_steps = problem.t_grid.size - 1
    out_idx = _output_indices(n_steps, output_every)
    if method == "auto":
        work = n_steps * n_steps * problem.x_grid.size
        method = "march" if problem.params.alpha == 1.0 or work < 2e9 else "fft"
    if method == "march":
        p = _solve_march(problem, out_idx)
    elif method == "fft":
        p = _solve_fft(problem, out_idx)
    else:
        raise ValueError(f"unknown method {method!r}")
    return FfpeSolution(problem.t_grid[out_idx], problem.x_grid, p)


def ffpe_oracle(params: ModelParams, t, x_grid, tau0, quad: QuadConfig | None = None):
    """Exact density at real time ``t`` for a Gaussian start at operational time ``tau0``.

    The initial Gaussian evolves in operational time, so the reference is
    ``int F_alpha(z) p(t**alpha z + tau0, x) dz``, not the point-source
    density at ``t + tau0``.
    """
    if t == 0:
        return gaussian_kernel(tau0, np.asarray(x_grid, dtype=float), params.D)
    quad = quad or QuadConfig(1e-13, 1e-11, 200)
    return subordinated_density_grid(params, t, x_grid, quad, tau0=tau0).values


def refinement_study(params: ModelParams, t_final, dx_levels, half_width=8.0, tau0=0.05,
                     safety=0.5, method="auto"):
    """Max-norm error against the exact density over a sequence of grids.

    Each level uses ``dt = safety * max_stable_dt``. Returns a list of
    dicts with ``dx, dt, n_steps, error, mass_error`` and, from the second
    level on, the empirical temporal order ``log(e_prev/e)/log(dt_prev/dt)``.
    """
    rows = []
    for dx in dx_levels:
        n = int(round(2.0 * half_width / dx))
        x = cell_centred_grid(half_width, n)
        dx_eff = x[1] - x[0]
        n_steps = int(math.ceil(t_final / (safety * max_stable_dt(params.alpha, params.D, dx_eff))))
        t_grid = np.linspace(0.0, t_final, n_steps + 1)
        prob = FfpeProblem(params, x, t_grid, gaussian_initial_profile(x, params.D, tau0))
        sol = solve_ffpe(prob, method=method, output_every=max(n_steps // 64, 1))
        ref = ffpe_oracle(params, t_final, x, tau0)
        row = {
            "dx": float(dx_eff),
            "dt": float(prob.dt),
            "n_steps": n_steps,
            "error": float(np.max(np.abs(sol.p[-1] - ref))),
            "mass_error": float(np.max(np.abs(sol.mass() - 1.0))),
            "min_value": float(sol.p.min()),
        }
        if rows:
            prev = rows[-1]
            row["order"] = math.log(prev["error"] / row["error"]) / math.log(prev["dt"] / row["dt"])
        rows.append(row)
    return rows


def laplace_subordination_check(params: ModelParams, x, u, quad: QuadConfig | None = None):
    """``(lhs, rhs)`` of the Laplace-space subordination identity at ``(x, u)``.

    ``lhs`` transforms the density numerically in time; ``rhs`` is
    ``u**(alpha-1)`` times the closed-form Gaussian transform at
    ``u**alpha``.
    """
    from .subdiffusion import gaussian_laplace, laplace_transform_in_time

    if not u > 0:
        raise ValueError("u must be positive")
    a, D = params.alpha, params.D
    rhs = u ** (a - 1.0) * gaussian_laplace(u**a, x, D)
    lhs = laplace_transform_in_time(params, x, u, quad or QuadConfig(1e-9, 1e-7, 200))
    return lhs, rhs
