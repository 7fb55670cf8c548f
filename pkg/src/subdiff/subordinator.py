"""Sampling the stable subordinator ``T``, its inverse ``S`` and the CTRW count.

Normalization throughout: ``E exp(-u T(tau)) = exp(-tau u**alpha)``, so that
``S(t)`` has Laplace transform ``E_alpha(-v t**alpha)``.

``S(t)`` is simulated as a discretized first passage: ``T`` is built on an
operational-time grid of step ``dtau`` and inverted. Inside the interval
where ``T`` crosses ``t`` the crossing time is placed with the self-similar
rule ``tau_k + dtau * ((t - T_k) / dT)**alpha``. Conditional on the left
endpoint this reproduces the exact one-time law of ``S(t)`` for any
``dtau``; only joint (multi-time) statistics carry an ``O(dtau)`` error.
With ``refine=False`` the left endpoint ``tau_k`` is returned instead
(bias at most ``dtau``) and ``S`` is piecewise constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PathBudgetError
from .parallel import run_blocks
from .specfun import _check_alpha

__all__ = [
    "SimConfig",
    "SamplePath",
    "sample_stable_increment",
    "sample_subordinator_path",
    "invert_path",
    "sample_inverse_subordinator",
    "sample_inverse_path",
    "sample_inverse_paths",
    "simulate_stable",
    "simulate_inverse_subordinator",
    "simulate_inverse_paths",
    "ctrw_counting_sample",
    "ctrw_rescaled",
]


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings.

    Identical ``(seed, n_paths, dtau, block_size)`` reproduce bit-identical
    samples whatever the number of worker threads.
    """

    seed: int = 0
    n_paths: int = 10_000
    dtau: float = 0.01
    t_max: float = 10.0
    refine: bool = True
    block_size: int = 1 << 16
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not self.dtau > 0:
            raise ValueError("dtau must be positive")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.block_size < 1 or self.max_steps < 1:
            raise ValueError("block_size and max_steps must be >= 1")


@dataclass(frozen=True)
class SamplePath:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 1:
            raise ValueError("grid and values must be 1-D, equal length >= 1")
        if np.any(np.diff(g) < 0):
            raise ValueError("grid must be nondecreasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.grid.size


def _check_grid(t_grid, t_max):
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be nondecreasing")
    if t_grid[0] < 0 or t_grid[-1] > t_max:
        raise ValueError(f"t_grid must lie in [0, t_max={t_max}]")
    return t_grid


def sample_stable_increment(alpha, dtau, rng: np.random.Generator, size=None):
    """Increment of ``T`` over operational time ``dtau``.

    Kanter's representation: with ``U ~ Unif(0, pi]`` and ``W ~ Exp(1)``,
    ``(A(U)/W)**((1-alpha)/alpha)`` is positive alpha-stable with Laplace
    transform ``exp(-u**alpha)``; scaling by ``dtau**(1/alpha)`` gives the
    increment. ``alpha = 1`` returns ``dtau`` exactly.
    """
    alpha = _check_alpha(alpha)
    if not dtau > 0:
        raise ValueError("dtau must be positive")
    if alpha == 1.0:
        return float(dtau) if size is None else np.full(size, float(dtau))
    u = math.pi * (1.0 - rng.random(size))
    w = rng.standard_exponential(size)
    la = np.log(np.sin(alpha * u))
    l1 = np.log(np.sin(u))
    lb = np.log(np.sin((1.0 - alpha) * u))
    logx = (la - l1) / alpha + (1.0 - alpha) / alpha * (lb - la - np.log(w))
    out = dtau ** (1.0 / alpha) * np.exp(logx)
    return float(out) if size is None else out


def sample_subordinator_path(alpha, n_steps, dtau, rng: np.random.Generator) -> SamplePath:
    """``T`` on the grid ``0, dtau, ..., n_steps*dtau``."""
    inc = sample_stable_increment(alpha, dtau, rng, size=int(n_steps))
    grid = dtau * np.arange(n_steps + 1)
    values = np.concatenate([[0.0], np.cumsum(inc)])
    return SamplePath(grid, values)


def invert_path(t_path: SamplePath, t_grid, alpha, refine=True) -> SamplePath:
    """Generalized inverse ``S(t) = inf{tau : T(tau) > t}`` of a gridded ``T``."""
    alpha = _check_alpha(alpha)
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    tau, tv = t_path.grid, t_path.values
    j = np.searchsorted(tv, t_grid, side="right")
    if np.any(j >= tv.size):
        raise PathBudgetError("T path ends before crossing the largest requested time")
    left = j - 1
    s = tau[left].copy()
    if refine:
        d_tau = tau[j] - tau[left]
        d_t = tv[j] - tv[left]
        s += d_tau * ((t_grid - tv[left]) / d_t) ** alpha
    return SamplePath(t_grid, s)


def _inverse_block(alpha, t_grid, dtau, rng, n, refine, max_steps):
    """S at every point of t_grid for n independent paths, shape (n, len(t_grid))."""
    m = t_grid.size
    out = np.empty((n, m))
    t_cur = np.zeros(n)
    ptr = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    step = 0
    while active.size:
        if step >= max_steps:
            raise PathBudgetError(
                f"{active.size} paths did not cross t={t_grid[-1]} within {max_steps} steps of dtau={dtau}"
            )
        inc = sample_stable_increment(alpha, dtau, rng, size=active.size)
        t_old = t_cur[active]
        t_new = t_old + inc
        tau_old = step * dtau
        p = ptr[active]
        while True:
            pc = np.minimum(p, m - 1)
            hit = (p < m) & (t_new > t_grid[pc])
            if not hit.any():
                break
            rows, cols = active[hit], p[hit]
            if refine:
                frac = (t_grid[cols] - t_old[hit]) / inc[hit]
                out[rows, cols] = tau_old + dtau * frac**alpha
            else:
                out[rows, cols] = tau_old
            p[hit] += 1
        ptr[active] = p
        t_cur[active] = t_new
        active = active[p < m]
        step += 1
    return out


def sample_inverse_paths(alpha, t_grid, cfg: SimConfig, rng: np.random.Generator, size: int):
    """``size`` independent ``S`` paths on ``t_grid``; array ``(size, len(t_grid))``."""
    alpha = _check_alpha(alpha)
    t_grid = _check_grid(t_grid, cfg.t_max)
    if alpha == 1.0:
        return np.broadcast_to(t_grid, (size, t_grid.size)).copy()
    return _inverse_block(alpha, t_grid, cfg.dtau, rng, size, cfg.refine, cfg.max_steps)


def sample_inverse_subordinator(alpha, t, cfg: SimConfig, rng: np.random.Generator, size=None):
    """Draw(s) of ``S(t)``; ``alpha = 1`` gives ``t`` exactly."""
    if not t > 0:
        raise ValueError("t must be positive")
    out = sample_inverse_paths(alpha, [t], cfg, rng, 1 if size is None else size)[:, 0]
    return float(out[0]) if size is None else out


def sample_inverse_path(alpha, t_grid, cfg: SimConfig, rng: np.random.Generator) -> SamplePath:
    """One ``S`` path on ``t_grid``, the inverse of one simulated ``T`` path."""
    alpha = _check_alpha(alpha)
    t_grid = _check_grid(t_grid, cfg.t_max)
    if alpha == 1.0:
        return SamplePath(t_grid, t_grid.copy())
    target = t_grid[-1]
    chunk = 1024
    t_last, inc_parts, steps = 0.0, [], 0
    while t_last <= target:
        if steps >= cfg.max_steps:
            raise PathBudgetError(f"T path did not cross t={target} within {cfg.max_steps} steps")
        inc = sample_stable_increment(alpha, cfg.dtau, rng, size=chunk)
        inc_parts.append(inc)
        t_last += inc.sum()
        steps += chunk
    inc = np.concatenate(inc_parts)
    t_path = SamplePath(cfg.dtau * np.arange(inc.size + 1), np.concatenate([[0.0], np.cumsum(inc)]))
    return invert_path(t_path, t_grid, alpha, refine=cfg.refine)


# ---------------------------------------------------------------------------
# seeded, block-parallel batch drivers


def simulate_inverse_paths(alpha, t_grid, cfg: SimConfig):
    """``cfg.n_paths`` paths of ``S`` on ``t_grid``, reproducible from ``cfg.seed``."""
    t_grid = _check_grid(t_grid, cfg.t_max)
    return run_blocks(
        lambda rng, n: sample_inverse_paths(alpha, t_grid, cfg, rng, n),
        cfg.n_paths,
        cfg.seed,
        cfg.block_size,
    )


def simulate_inverse_subordinator(alpha, t, cfg: SimConfig):
    """``cfg.n_paths`` draws of ``S(t)``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return simulate_inverse_paths(alpha, [t], cfg)[:, 0]


def simulate_stable(alpha, tau, cfg: SimConfig):
    """``cfg.n_paths`` draws of ``T(tau)`` summed over the ``dtau`` grid."""
    alpha = _check_alpha(alpha)
    if not tau > 0:
        raise ValueError("tau must be positive")
    n_full = int(math.floor(tau / cfg.dtau))
    rest = tau - n_full * cfg.dtau

    def block(rng, n):
        total = np.zeros(n)
        for _ in range(n_full):
            total += sample_stable_increment(alpha, cfg.dtau, rng, size=n)
        if rest > 1e-15 * tau:
            total += sample_stable_increment(alpha, rest, rng, size=n)
        return total

    return run_blocks(block, cfg.n_paths, cfg.seed, cfg.block_size)


# ---------------------------------------------------------------------------
# CTRW counting process


def ctrw_counting_sample(alpha, n_steps, t, rng: np.random.Generator, size=None):
    """Renewal count ``N_t`` for Pareto(alpha) waiting times on ``[1, inf)``.

    At most ``n_steps`` waiting times are drawn per sample, so the count is
    capped at ``n_steps``. ``alpha = 1`` uses unit waiting times and returns
    ``floor(t)``.
    """
    alpha = _check_alpha(alpha)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not t > 0:
        raise ValueError("t must be positive")
    n = 1 if size is None else int(size)
    if alpha == 1.0:
        counts = np.full(n, min(int(math.floor(t)), n_steps), dtype=np.int64)
    else:
        counts = np.zeros(n, dtype=np.int64)
        total = np.zeros(n)
        active = np.arange(n)
        for _ in range(n_steps):
            wait = (1.0 - rng.random(active.size)) ** (-1.0 / alpha)
            total[active] += wait
            inside = total[active] <= t
            active = active[inside]
            counts[active] += 1
            if not active.size:
                break
    return int(counts[0]) if size is None else counts


def ctrw_rescaled(alpha, c, n_steps, rng: np.random.Generator, size=None):
    """``Gamma(1-alpha) N_c / c**alpha``, which converges in law to ``S(1)``.

    The ``Gamma(1-alpha)`` factor matches the Pareto law to the
    ``exp(-u**alpha)`` normalization of ``T``.
    """
    alpha = _check_alpha(alpha, allow_one=False)
    counts = ctrw_counting_sample(alpha, n_steps, c, rng, size)
    return math.gamma(1.0 - alpha) * np.asarray(counts, dtype=float) / c**alpha
