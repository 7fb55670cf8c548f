"""European call prices: classical and under the inverse-stable clock.

Prices use the dimensionless convention: ``beta = 2 r / sigma**2`` and
time ``tau = sigma**2 t / 2``, with

    C(tau, x) = x Phi(d+) - K exp(-beta tau) Phi(d-),
    d+- = (ln(x/K) + tau (beta +- 1)) / sqrt(2 tau).

The subordinated price averages ``C`` over the law of ``S(t)``:
``int_0^inf F_alpha(u) C(t**alpha u, x) du``. Discounting stays inside
``C`` and is therefore averaged along with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .parallel import run_blocks
from .quadrature import DEFAULT_QUAD, QuadConfig, integrate_f_alpha
from .specfun import DEFAULT_EVAL, EvalConfig, _check_alpha, probability_integral
from .subordinator import SimConfig, sample_inverse_paths

__all__ = [
    "ContractParams",
    "bs_call",
    "bs_price_classical",
    "bs_put_classical",
    "map_real_params",
    "subordinated_price_quadrature",
    "subordinated_price_mc",
    "subordinated_put_quadrature",
]


@dataclass(frozen=True)
class ContractParams:
    """Call contract in dimensionless units; ``tau`` is ignored by the subordinated pricers."""

    x: float
    K: float
    beta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not (self.x > 0 and self.K > 0):
            raise ValueError("spot x and strike K must be positive")
        if not self.tau >= 0:
            raise ValueError("tau must be >= 0")


def bs_call(tau, x, K, beta):
    """Vectorized ``C(tau, x)``; ``tau = 0`` gives the payoff ``max(x - K, 0)``."""
    tau = np.asarray(tau, dtype=float)
    pos = tau > 0
    ts = np.where(pos, tau, 1.0)
    root = np.sqrt(2.0 * ts)
    lm = math.log(x / K)
    d_plus = (lm + ts * (beta + 1.0)) / root
    d_minus = (lm + ts * (beta - 1.0)) / root
    price = x * probability_integral(d_plus) - K * np.exp(-beta * ts) * probability_integral(d_minus)
    out = np.where(pos, price, max(x - K, 0.0))
    # rounding can push deep out-of-the-money values a hair below zero
    out = np.clip(out, 0.0, x)
    return out if out.ndim else float(out)


def bs_price_classical(c: ContractParams) -> float:
    return bs_call(c.tau, c.x, c.K, c.beta)


def bs_put_classical(c: ContractParams) -> float:
    """Put via parity; an extension beyond the call formula."""
    return bs_price_classical(c) - c.x + c.K * math.exp(-c.beta * c.tau)


def map_real_params(x, K, r, sigma, t_real) -> ContractParams:
    """Market units to ``(x, K, beta = 2r/sigma**2, tau = sigma**2 t/2)``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not t_real >= 0:
        raise ValueError("t_real must be >= 0")
    return ContractParams(x=x, K=K, beta=2.0 * r / sigma**2, tau=0.5 * sigma**2 * t_real)


def subordinated_price_quadrature(alpha, t, c: ContractParams, quad: QuadConfig = DEFAULT_QUAD,
                                  cfg: EvalConfig = DEFAULT_EVAL) -> float:
    """Subordinated call price by quadrature against ``F_alpha``.

    The tail beyond the cut-off is bounded by ``x`` times the tail mass of
    ``F_alpha``. At ``alpha = 1`` this is the classical price at ``tau = t``.
    """
    alpha = _check_alpha(alpha)
    if not t > 0:
        raise ValueError("t must be positive")
    if alpha == 1.0:
        return bs_call(t, c.x, c.K, c.beta)
    ta = t**alpha
    val = integrate_f_alpha(alpha, lambda u: bs_call(ta * u, c.x, c.K, c.beta), quad,
                            g_bound=c.x, cfg=cfg)
    return float(min(max(val, 0.0), c.x))


def subordinated_put_quadrature(alpha, t, c: ContractParams, quad: QuadConfig = DEFAULT_QUAD) -> float:
    """Put counterpart by parity under the same clock average."""
    alpha = _check_alpha(alpha)
    if alpha == 1.0:
        disc = math.exp(-c.beta * t)
    else:
        ta = t**alpha
        disc = integrate_f_alpha(alpha, lambda u: math.exp(-c.beta * ta * u), quad)
    return subordinated_price_quadrature(alpha, t, c, quad) - c.x + c.K * disc


def subordinated_price_mc(alpha, t, c: ContractParams, cfg: SimConfig):
    """Monte Carlo price: mean of ``C(S(t), x)`` over simulated ``S(t)``.

    Returns ``(price, standard_error)``.
    """
    alpha = _check_alpha(alpha)
    if not t > 0:
        raise ValueError("t must be positive")
    if t > cfg.t_max:
        cfg = replace(cfg, t_max=t)

    def block(rng, n):
        s = sample_inverse_paths(alpha, [t], cfg, rng, n)[:, 0]
        return bs_call(s, c.x, c.K, c.beta)

    payoff = run_blocks(block, cfg.n_paths, cfg.seed, cfg.block_size)
    price = float(payoff.mean())
    se = float(payoff.std(ddof=1) / math.sqrt(payoff.size)) if payoff.size > 1 else 0.0
    return price, se
