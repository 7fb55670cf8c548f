"""The subordinated Brownian motion ``r_t = B(S(t))``.

Parent-process convention: ``B`` has variance ``D*tau/2`` at operational
time ``tau``, i.e. density ``exp(-x**2/(D tau)) / sqrt(pi D tau)``. This is
the kernel the density integral below is written with, and it makes the
mean-square displacement ``D t**alpha / (2 Gamma(1 + alpha))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConvergenceError
from .parallel import run_blocks
from .quadrature import DEFAULT_QUAD, QuadConfig, checked_quad
from .specfun import DEFAULT_EVAL, EvalConfig, _check_alpha, f_alpha, f_alpha_truncation
from .subordinator import SamplePath, SimConfig, _check_grid, sample_inverse_paths

__all__ = [
    "ModelParams",
    "DensityGrid",
    "gaussian_kernel",
    "gaussian_laplace",
    "subordinated_density",
    "subordinated_density_grid",
    "subordinated_moments",
    "sample_subordinated_paths",
    "sample_subordinated_path",
    "simulate_subordinated_paths",
    "laplace_transform_in_time",
]


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    D: float = 1.0

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.D > 0:
            raise ValueError("D must be positive")


@dataclass(frozen=True)
class DensityGrid:
    x_grid: np.ndarray
    values: np.ndarray
    t: float

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape:
            raise ValueError("x_grid and values must be 1-D with equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x_grid must be strictly increasing")
        if not self.t > 0:
            raise ValueError("t must be positive")
        object.__setattr__(self, "x_grid", x)
        object.__setattr__(self, "values", v)

    def mass(self):
        return float(integrate.trapezoid(self.values, self.x_grid))


def gaussian_kernel(tau, x, D):
    """Parent density ``exp(-x**2/(D tau)) / sqrt(pi D tau)``."""
    tau = np.asarray(tau, dtype=float)
    return np.exp(-np.asarray(x) ** 2 / (D * tau)) / np.sqrt(np.pi * D * tau)


def gaussian_laplace(s, x, D):
    """Laplace transform in ``tau`` of :func:`gaussian_kernel`: ``exp(-2|x| sqrt(s/D)) / sqrt(D s)``."""
    return math.exp(-2.0 * abs(x) * math.sqrt(s / D)) / math.sqrt(D * s)


def _w_upper(alpha, quad):
    # tail of F beyond Z bounds the neglected part (the kernel is <= 1/sqrt(pi D t^a z))
    return math.sqrt(max(f_alpha_truncation(alpha, quad.abs_tol / 10.0), 1.0))


def _density_integrand(params, t, x, tau0, cfg):
    a, D = params.alpha, params.D
    ta = t**a
    c = 2.0 / math.sqrt(math.pi * D * ta)

    def h(w):
        u = w * w
        fa = f_alpha(a, u, cfg)
        if tau0:
            return 2.0 * w * fa * gaussian_kernel(ta * u + tau0, x, D)
        if u == 0.0:
            return c * fa * np.where(x == 0.0, 1.0, 0.0)
        return c * fa * np.exp(-x * x / (D * ta * u))

    return h


def subordinated_density(params: ModelParams, t, x, quad: QuadConfig = DEFAULT_QUAD,
                         tau0=0.0, cfg: EvalConfig = DEFAULT_EVAL):
    """Density of ``r_t`` at ``x``.

    Evaluates ``int_0^inf F_alpha(z) p(t**alpha z + tau0, x) dz`` with the
    Gaussian parent kernel ``p``, after substituting ``z = w**2``.
    ``tau0 > 0`` starts the parent process from a Gaussian of variance
    ``D*tau0/2`` instead of a point mass. ``alpha = 1`` is exact.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if tau0 < 0:
        raise ValueError("tau0 must be >= 0")
    x = float(x)
    if params.alpha == 1.0:
        return float(gaussian_kernel(t + tau0, x, params.D))
    h = _density_integrand(params, t, x, tau0, cfg)
    val, _ = checked_quad(lambda w: float(h(w)), 0.0, _w_upper(params.alpha, quad), quad,
                          what="subordinated density")
    return val


def subordinated_density_grid(params: ModelParams, t, x_grid, quad: QuadConfig = DEFAULT_QUAD,
                              tau0=0.0, cfg: EvalConfig = DEFAULT_EVAL) -> DensityGrid:
    """:func:`subordinated_density` on a whole grid with one vector quadrature."""
    if not t > 0:
        raise ValueError("t must be positive")
    x = np.asarray(x_grid, dtype=float)
    if params.alpha == 1.0:
        return DensityGrid(x, gaussian_kernel(t + tau0, x, params.D), t)
    h = _density_integrand(params, t, x, tau0, cfg)
    val, err = integrate.quad_vec(
        h, 0.0, _w_upper(params.alpha, quad), epsabs=quad.abs_tol, epsrel=quad.rel_tol,
        norm="max", limit=quad.max_subdivisions * 50,
    )
    if err > 10 * max(quad.abs_tol, quad.rel_tol * np.max(np.abs(val))):
        raise ConvergenceError("density grid quadrature did not converge", achieved=err)
    return DensityGrid(x, val, t)


def subordinated_moments(params: ModelParams, t):
    """Closed-form ``(mean, second moment) = (0, D t**alpha / (2 Gamma(1+alpha)))``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return 0.0, params.D * t**params.alpha / (2.0 * math.gamma(1.0 + params.alpha))


def sample_subordinated_paths(params: ModelParams, t_grid, cfg: SimConfig, rng, size):
    """``size`` paths of ``r`` on ``t_grid``, shape ``(size, len(t_grid))``.

    Increments are Gaussian with variance ``(D/2) dS``; where ``S`` does not
    move the increment is exactly zero.
    """
    t_grid = _check_grid(t_grid, cfg.t_max)
    s = sample_inverse_paths(params.alpha, t_grid, cfg, rng, size)
    ds = np.diff(s, axis=1, prepend=0.0)
    z = rng.standard_normal(ds.shape)
    steps = np.where(ds > 0, np.sqrt(0.5 * params.D * np.maximum(ds, 0.0)) * z, 0.0)
    return np.cumsum(steps, axis=1)


def sample_subordinated_path(params: ModelParams, t_grid, cfg: SimConfig, rng) -> SamplePath:
    t_grid = _check_grid(t_grid, cfg.t_max)
    return SamplePath(t_grid, sample_subordinated_paths(params, t_grid, cfg, rng, 1)[0])


def simulate_subordinated_paths(params: ModelParams, t_grid, cfg: SimConfig):
    """``cfg.n_paths`` seeded paths of ``r`` on ``t_grid``."""
    t_grid = _check_grid(t_grid, cfg.t_max)
    return run_blocks(
        lambda rng, n: sample_subordinated_paths(params, t_grid, cfg, rng, n),
        cfg.n_paths,
        cfg.seed,
        cfg.block_size,
    )


def laplace_transform_in_time(params: ModelParams, x, u, quad: QuadConfig = DEFAULT_QUAD):
    """``int_0^inf exp(-u t) p(t, x) dt`` by quadrature over the density."""
    if not u > 0:
        raise ValueError("u must be positive")
    # density ~ t^{-alpha/2} near 0: substitute t = s^2
    tq = QuadConfig(max(quad.abs_tol, 1e-11), max(quad.rel_tol, 1e-9), quad.max_subdivisions)
    inner = QuadConfig(tq.abs_tol * 1e-2, tq.rel_tol * 1e-2, quad.max_subdivisions)
    s_max = math.sqrt(40.0 / u)

    def h(s):
        if s == 0.0:
            return 0.0
        t = s * s
        return 2.0 * s * math.exp(-u * t) * subordinated_density(params, t, x, inner)

    val, _ = checked_quad(h, 0.0, s_max, tq, what="time Laplace transform")
    return val
