"""Adaptive quadrature against the ``F_alpha`` weight."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConvergenceError
from .specfun import DEFAULT_EVAL, EvalConfig, f_alpha, f_alpha_truncation


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadConfig()


def checked_quad(f, a, b, quad: QuadConfig = DEFAULT_QUAD, points=None, what="integral"):
    """``scipy.integrate.quad`` that raises instead of warning on failure."""
    val, err, info, *rest = integrate.quad(
        f,
        a,
        b,
        epsabs=quad.abs_tol,
        epsrel=quad.rel_tol,
        limit=quad.max_subdivisions,
        points=points,
        full_output=1,
    )
    if rest and err > max(quad.abs_tol, quad.rel_tol * abs(val)) * 10:
        raise ConvergenceError(
            f"{what} did not converge: {rest[0].splitlines()[0]} (achieved {err:.3g})",
            achieved=err,
        )
    return val, err


def integrate_f_alpha(alpha, g, quad: QuadConfig = DEFAULT_QUAD, g_bound=1.0, moment=0,
                      cfg: EvalConfig = DEFAULT_EVAL, points=()):
    """``int_0^inf F_alpha(u) g(u) du`` with a certified truncation.

    ``g`` must satisfy ``|g(u)| <= g_bound * u**moment`` so the neglected
    tail stays below ``quad.abs_tol / 10``. The substitution ``u = w**2``
    removes square-root endpoint behaviour of ``g`` at the origin.
    """
    upper = f_alpha_truncation(alpha, quad.abs_tol / (10.0 * max(g_bound, 1e-300)), moment)
    wmax = math.sqrt(upper)

    def h(w):
        u = w * w
        return 2.0 * w * f_alpha(alpha, u, cfg) * g(u)

    pts = sorted(math.sqrt(p) for p in points if 0 < p < upper) or None
    val, _ = checked_quad(h, 0.0, wmax, quad, points=pts, what="F_alpha-weighted integral")
    return val
