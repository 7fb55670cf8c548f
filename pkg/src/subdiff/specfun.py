"""Special functions behind the subordinated diffusion model.

Covers the Gamma function, the standard normal CDF, the Mittag-Leffler
function on the negative axis, the M-Wright density ``F_alpha`` (the law of
the inverse stable subordinator at unit time), and a Maclaurin-series Airy
function that is kept around only as a validation oracle.

Two representations are used for ``F_alpha``:

* the entire power series, summed with Neumaier compensation, near the
  origin where the alternating terms stay well conditioned;
* Zolotarev's non-oscillatory integral

  .. math::

      F_\\alpha(z) = \\frac{z^{\\alpha/(1-\\alpha)}}{\\pi(1-\\alpha)}
          \\int_0^\\pi A(\\phi)\\, e^{-z^{1/(1-\\alpha)} A(\\phi)}\\, d\\phi,

  with the Kanter function ``A``, everywhere else. The integrand is
  positive and unimodal, so relative accuracy holds deep into the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np
from scipy import integrate, optimize, special

from .errors import ConvergenceError, PoleError

__all__ = [
    "EvalConfig",
    "DEFAULT_EVAL",
    "gamma",
    "probability_integral",
    "mittag_leffler_neg",
    "f_alpha",
    "f_alpha_series",
    "f_alpha_integral",
    "f_alpha_asymptotic",
    "f_alpha_tail",
    "f_alpha_tail_bound",
    "f_alpha_truncation",
    "f_alpha_mode",
    "series_switch_point",
    "inverse_subordinator_density",
    "airy_ai",
    "kanter_log_a",
]


@dataclass(frozen=True)
class EvalConfig:
    """Controls for series/integral evaluation of ``F_alpha`` and ``E_alpha``.

    ``cancellation_limit`` bounds the sum of absolute series terms; past it
    the alternating series loses too many digits and the integral
    representation takes over even below ``regime_switch_z``.
    """

    series_tol: float = 1e-17
    max_terms: int = 600
    regime_switch_z: float = 5.0
    cancellation_limit: float = 50.0
    quad_rel_tol: float = 1e-12

    def __post_init__(self):
        if not self.series_tol > 0:
            raise ValueError("series_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.regime_switch_z > 0:
            raise ValueError("regime_switch_z must be positive")
        if not self.cancellation_limit >= 1:
            raise ValueError("cancellation_limit must be >= 1")


DEFAULT_EVAL = EvalConfig()


def _check_alpha(alpha, allow_one=True):
    alpha = float(alpha)
    hi_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (alpha > 0.0 and hi_ok):
        rng = "(0, 1]" if allow_one else "(0, 1)"
        raise ValueError(f"alpha must lie in {rng}, got {alpha}")
    return alpha


# ---------------------------------------------------------------------------
# Gamma and the probability integral


def gamma(z: float) -> float:
    """Gamma function on the real line.

    Negative arguments go through the reflection formula; non-positive
    integers raise :class:`PoleError`.
    """
    z = float(z)
    if z <= 0.0 and z == math.floor(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z >= 0.5:
        return math.gamma(z)
    # sin(pi z) with the argument reduced to [-1, 1) to keep it exact
    r = math.fmod(z, 2.0)
    return math.pi / (math.sin(math.pi * r) * math.gamma(1.0 - z))


def probability_integral(z):
    """Standard normal CDF ``Phi(z)``; saturates to 0/1 in the tails."""
    return special.ndtr(z)


# ---------------------------------------------------------------------------
# Compensated summation


def _neumaier_sum(terms):
    """Neumaier-compensated sum over axis 0 of a 2-D array."""
    s = np.zeros(terms.shape[1:])
    c = np.zeros_like(s)
    for t in terms:
        tmp = s + t
        big = np.abs(s) >= np.abs(t)
        c += np.where(big, (s - tmp) + t, (t - tmp) + s)
        s = tmp
    return s + c


def _compensated_sum(terms):
    """Column sums of ``terms``; Neumaier for wide blocks, ``math.fsum`` otherwise."""
    if terms.shape[1] > 64:
        return _neumaier_sum(terms)
    return np.array([math.fsum(col) for col in terms.T])


def _live_rows(logt, log_tol):
    """Number of leading rows that hold any term above the tolerance."""
    live = np.flatnonzero(np.any(logt >= log_tol, axis=1))
    return int(live[-1]) + 1 if live.size else 1


# ---------------------------------------------------------------------------
# Mittag-Leffler E_alpha(-x)


def _ml_series(alpha, x, max_terms):
    n = np.arange(max_terms)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logx = np.log(x)[None, :]
        logt = n * logx - special.gammaln(1.0 + n * alpha)
    logt[0] = 0.0
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        mag = np.exp(logt)
        k = _live_rows(logt, -745.0)
        value = _compensated_sum((signs * mag)[:k])
        abs_sum = mag.sum(axis=0)
    return value, abs_sum, mag[-1]


def _ml_integral(alpha, x, rel_tol):
    # E_alpha(-x) = sin(pi a)/(pi a) int_0^inf exp(-(x s)^{1/a}) / (s^2 + 2 s cos(pi a) + 1) ds
    c = math.cos(math.pi * alpha)
    pref = math.sin(math.pi * alpha) / (math.pi * alpha)
    inv = 1.0 / alpha

    def f(s):
        return math.exp(-((x * s) ** inv)) / (s * s + 2.0 * s * c + 1.0)

    peak = max(-c, 0.0)
    # past s_cut the exponential factor is below 1e-300
    s_cut = 700.0**alpha / x
    pieces = sorted({0.0, peak, 1.0, min(s_cut, 1e300)})
    total = 0.0
    err = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        if b <= a:
            continue
        val, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=200)
        total += val
        err += e
    if s_cut < 1e300:
        val, e = integrate.quad(f, s_cut, np.inf, epsabs=1e-300, epsrel=rel_tol, limit=200)
        total += val
        err += e
    if err > 1e-10 * max(total, 1e-300):
        raise ConvergenceError(f"Mittag-Leffler quadrature stalled at x={x}", achieved=err)
    return pref * total


def mittag_leffler_neg(alpha, x, cfg: EvalConfig = DEFAULT_EVAL):
    """Mittag-Leffler function ``E_alpha(-x)`` for ``x >= 0``.

    Uses the Taylor series while it is well conditioned (``x`` below
    ``cfg.regime_switch_z`` and the absolute term sum below
    ``cfg.cancellation_limit``), otherwise the spectral integral
    representation. ``alpha = 1`` returns ``exp(-x)``.
    """
    alpha = _check_alpha(alpha)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(~np.isfinite(xa)):
        raise ValueError("mittag_leffler_neg needs finite x >= 0")
    if alpha == 1.0:
        out = np.exp(-xa)
        return out if out.ndim else float(out)
    flat = xa.ravel()
    out = np.empty_like(flat)
    cand = flat <= cfg.regime_switch_z
    use_series = np.zeros_like(cand)
    if np.any(cand):
        val, abs_sum, last = _ml_series(alpha, flat[cand], cfg.max_terms)
        ok = (abs_sum <= cfg.cancellation_limit) & (last < cfg.series_tol)
        idx = np.flatnonzero(cand)
        out[idx[ok]] = val[ok]
        use_series[idx[ok]] = True
    for i in np.flatnonzero(~use_series):
        out[i] = _ml_integral(alpha, float(flat[i]), cfg.quad_rel_tol)
    out = out.reshape(xa.shape)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# F_alpha: series regime


@lru_cache(maxsize=64)
def _f_series_coeffs(alpha, max_terms):
    """log|c_k| and sign of the k-th term of F_alpha(z) at unit z.

    c_k = (-1)^k / (k! Gamma(1 - alpha - k alpha)), rewritten by reflection as
    (-1)^k Gamma(alpha (k+1)) sin(pi alpha (k+1)) / (pi k!).
    """
    k = np.arange(max_terms, dtype=float)
    s = alpha * (k + 1.0)
    r = np.fmod(s, 2.0)
    sin = np.sin(np.pi * r)
    # 1/Gamma at a pole is exactly zero
    sin[np.abs(r - np.round(r)) < 1e-13] = 0.0
    with np.errstate(divide="ignore"):
        logc = special.gammaln(s) - special.gammaln(k + 1.0) - math.log(math.pi) + np.log(np.abs(sin))
    sign = np.sign(sin) * np.where(k % 2 == 0, 1.0, -1.0)
    logc.setflags(write=False)
    sign.setflags(write=False)
    return logc, sign


def _f_series_raw(alpha, z, max_terms):
    """Series value, absolute term sum and convergence flag for z > 0."""
    logc, sign = _f_series_coeffs(alpha, max_terms)
    logt = logc[:, None] + np.arange(max_terms)[:, None] * np.log(z)[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        # capped so hopeless columns report a huge abs_sum instead of inf - inf
        mag = np.exp(np.minimum(logt, 700.0))
        k = _live_rows(logt, -745.0)
        value = _compensated_sum((sign[:, None] * mag)[:k])
        abs_sum = mag.sum(axis=0)
    # converged once the tail is small and still falling
    # zero coefficients (Gamma poles) make single terms useless as a gauge
    w = min(8, max_terms // 2) or 1
    tail = np.max(logt[-w:], axis=0)
    falling = tail <= np.max(logt[-2 * w : -w], axis=0) if max_terms >= 2 * w else np.ones_like(tail, bool)
    return value, abs_sum, tail, falling


def f_alpha_series(alpha, z, cfg: EvalConfig = DEFAULT_EVAL):
    """``F_alpha(z)`` from the power series alone.

    Raises :class:`ConvergenceError` if ``cfg.max_terms`` terms do not bring
    the last term below ``cfg.series_tol``. No cancellation guard: for
    large ``z`` the result is numerically meaningless, use :func:`f_alpha`.
    """
    alpha = _check_alpha(alpha, allow_one=False)
    za = np.asarray(z, dtype=float)
    flat = za.ravel()
    out = np.full(flat.shape, 1.0 / math.gamma(1.0 - alpha))
    pos = flat > 0
    if np.any(pos):
        val, _, tail, falling = _f_series_raw(alpha, flat[pos], cfg.max_terms)
        bad = ~((tail < math.log(cfg.series_tol)) & falling)
        if np.any(bad):
            zbad = flat[pos][bad][0]
            raise ConvergenceError(
                f"F_alpha series not converged in {cfg.max_terms} terms at z={zbad}",
                achieved=float(np.exp(tail[bad][0])),
            )
        out[pos] = val
    out = out.reshape(za.shape)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# F_alpha: Zolotarev integral regime


def kanter_log_a(alpha, phi):
    """``log A(phi)`` for Kanter's function on ``(0, pi)``.

    A(phi) = [sin(a phi)/sin(phi)]^{1/(1-a)} sin((1-a) phi)/sin(a phi); it
    increases from ``(1-a) a^{a/(1-a)}`` at 0 to infinity at pi.
    """
    phi = np.asarray(phi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.log(np.sin(alpha * phi))
        l1 = np.log(np.sin(phi))
        lb = np.log(np.sin((1.0 - alpha) * phi))
        out = (la - l1) / (1.0 - alpha) + lb - la
    out = np.where(phi <= 0.0, _log_a0(alpha), out)
    out = np.where(phi >= math.pi, np.inf, out)
    return out if out.ndim else float(out)


def _log_a_scalar(alpha, phi):
    if phi <= 0.0:
        return _log_a0(alpha)
    if phi >= math.pi:
        return math.inf
    sa = math.sin(alpha * phi)
    s1 = math.sin(phi)
    if s1 <= 0.0:
        return math.inf
    return (math.log(sa) - math.log(s1)) / (1.0 - alpha) + math.log(math.sin((1.0 - alpha) * phi)) - math.log(sa)


def _log_a0(alpha):
    return math.log(1.0 - alpha) + alpha / (1.0 - alpha) * math.log(alpha)


def _phi_of_log_a(alpha, a):
    """Invert the monotone map phi -> log A(phi)."""
    if a <= _log_a0(alpha):
        return 0.0
    hi = math.pi
    while _log_a_scalar(alpha, hi) <= a:
        hi = 0.5 * (hi + math.pi)
        if math.pi - hi < 1e-15:
            return math.pi
    if _log_a_scalar(alpha, 1e-300) > a:
        return 0.0
    return optimize.brentq(lambda p: _log_a_scalar(alpha, p) - a, 0.0, hi, xtol=1e-15, rtol=1e-15)


_WINDOW = 46.0  # integrand is cut where it drops below exp(-_WINDOW) of its peak


def _zolotarev_window(alpha, loglam, weight_a):
    """Locate the peak and cut points of exp(weight_a * a - lam e^a) in a = log A.

    Returns (a_lo, a_peak, a_hi, log_peak_value).
    """
    la0 = _log_a0(alpha)
    lam = math.exp(loglam)
    if weight_a:
        a_p = max(la0, -loglam)
    else:
        a_p = la0
    g = lambda a: weight_a * a - lam * math.exp(a)  # noqa: E731
    m = g(a_p)
    target = m - _WINDOW
    a_hi = optimize.brentq(lambda a: g(a) - target, a_p, a_p + _WINDOW + 60.0, xtol=1e-13)
    if a_p > la0 and g(la0) < target:
        a_lo = optimize.brentq(lambda a: g(a) - target, la0, a_p, xtol=1e-13)
    else:
        a_lo = la0
    return a_lo, a_p, a_hi, m


def f_alpha_integral(alpha, z, rel_tol=1e-12):
    """``F_alpha(z)`` for scalar ``z > 0`` via Zolotarev's integral."""
    alpha = _check_alpha(alpha, allow_one=False)
    z = float(z)
    if z <= 0:
        raise ValueError("f_alpha_integral needs z > 0")
    lz = math.log(z)
    loglam = lz / (1.0 - alpha)
    lam = math.exp(loglam)
    logpref = alpha / (1.0 - alpha) * lz - math.log(math.pi * (1.0 - alpha))
    a_lo, a_p, a_hi, m = _zolotarev_window(alpha, loglam, 1.0)
    if logpref + m < -745.0:
        return 0.0
    p_lo, p_pk, p_hi = (_phi_of_log_a(alpha, a) for a in (a_lo, a_p, a_hi))

    def f(phi):
        la = _log_a_scalar(alpha, phi)
        if la == math.inf:
            return 0.0
        return math.exp(la - lam * math.exp(la) - m)

    pts = [p_pk] if p_lo < p_pk < p_hi else None
    val, err = integrate.quad(f, p_lo, p_hi, points=pts, epsabs=0.0, epsrel=rel_tol, limit=400)
    if err > 1e3 * rel_tol * max(val, 1e-300):
        raise ConvergenceError(f"Zolotarev quadrature stalled at z={z}", achieved=err)
    return math.exp(logpref + m) * val


def f_alpha_tail(alpha, z, rel_tol=1e-12):
    """Exact survival function ``int_z^inf F_alpha``, i.e. ``P(S(1) > z)``."""
    alpha = _check_alpha(alpha, allow_one=False)
    z = float(z)
    if z <= 0:
        return 1.0
    loglam = math.log(z) / (1.0 - alpha)
    lam = math.exp(loglam)
    _, _, a_hi, m = _zolotarev_window(alpha, loglam, 0.0)
    if m - math.log(math.pi) < -745.0:
        return 0.0
    p_hi = _phi_of_log_a(alpha, a_hi)

    def f(phi):
        la = _log_a_scalar(alpha, phi)
        if la == math.inf:
            return 0.0
        return math.exp(-lam * math.exp(la) - m)

    val, _ = integrate.quad(f, 0.0, p_hi, epsabs=0.0, epsrel=rel_tol, limit=400)
    return math.exp(m) * val / math.pi


def f_alpha_tail_bound(alpha, z):
    """Rigorous upper bound ``exp(-B z^{1/(1-alpha)})`` on the tail mass."""
    alpha = _check_alpha(alpha, allow_one=False)
    b = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    return np.exp(-b * np.asarray(z, dtype=float) ** (1.0 / (1.0 - alpha)))


def f_alpha_truncation(alpha, eps, moment=0):
    """Cut-off ``Z`` with ``int_Z^inf z^moment F_alpha(z) dz <= eps``.

    Uses the tail bound together with Cauchy-Schwarz and the moments
    ``E S^n = n!/Gamma(1 + n alpha)``.
    """
    alpha = _check_alpha(alpha, allow_one=False)
    if not eps > 0:
        raise ValueError("eps must be positive")
    b = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    n = 2 * moment
    log_m2 = special.gammaln(n + 1.0) - special.gammaln(1.0 + n * alpha)
    logq = log_m2 - 2.0 * math.log(eps)
    return max(logq / b, 0.0) ** (1.0 - alpha)


def f_alpha_asymptotic(alpha, z):
    """Leading large-``z`` form ``A z^{(a-1/2)/(1-a)} exp(-B z^{1/(1-a)})``."""
    alpha = _check_alpha(alpha, allow_one=False)
    z = np.asarray(z, dtype=float)
    q = 1.0 - alpha
    amp = (2.0 * math.pi * q) ** -0.5 * alpha ** ((alpha - 0.5) / q)
    b = q * alpha ** (alpha / q)
    return amp * z ** ((alpha - 0.5) / q) * np.exp(-b * z ** (1.0 / q))


# ---------------------------------------------------------------------------
# F_alpha: public hybrid


def f_alpha(alpha, z, cfg: EvalConfig = DEFAULT_EVAL):
    """M-Wright density ``F_alpha(z)`` for ``z >= 0`` and ``0 < alpha < 1``.

    ``t**-alpha * F_alpha(x / t**alpha)`` is the density of the inverse
    stable subordinator ``S(t)``. ``alpha = 1`` is a point mass at ``z = 1``
    and is rejected here.
    """
    alpha = _check_alpha(alpha, allow_one=False)
    za = np.asarray(z, dtype=float)
    if np.any(za < 0) or np.any(np.isnan(za)):
        raise ValueError("f_alpha needs z >= 0")
    flat = za.ravel()
    out = np.empty_like(flat)
    zero = flat == 0
    out[zero] = 1.0 / math.gamma(1.0 - alpha)
    done = zero.copy()
    cand = (~zero) & (flat <= cfg.regime_switch_z)
    if np.any(cand):
        val, abs_sum, tail, falling = _f_series_raw(alpha, flat[cand], cfg.max_terms)
        ok = (abs_sum <= cfg.cancellation_limit) & (tail < math.log(cfg.series_tol)) & falling
        idx = np.flatnonzero(cand)[ok]
        out[idx] = val[ok]
        done[idx] = True
    for i in np.flatnonzero(~done):
        if np.isinf(flat[i]):
            out[i] = 0.0
        else:
            out[i] = f_alpha_integral(alpha, flat[i], cfg.quad_rel_tol)
    out = out.reshape(za.shape)
    return out if out.ndim else float(out)


def series_switch_point(alpha, cfg: EvalConfig = DEFAULT_EVAL):
    """Largest ``z`` at which :func:`f_alpha` still uses the series."""
    alpha = _check_alpha(alpha, allow_one=False)

    def ok(z):
        _, abs_sum, tail, falling = _f_series_raw(alpha, np.array([z]), cfg.max_terms)
        return bool(abs_sum[0] <= cfg.cancellation_limit and tail[0] < math.log(cfg.series_tol) and falling[0])

    hi = cfg.regime_switch_z
    if ok(hi):
        return hi
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def f_alpha_mode(alpha, cfg: EvalConfig = DEFAULT_EVAL) -> Optional[float]:
    """Location of the maximum of ``F_alpha``.

    Returns ``None`` for ``alpha <= 1/2``, where ``F_alpha`` decreases
    monotonically from ``z = 0``.
    """
    alpha = _check_alpha(alpha, allow_one=False)
    if alpha <= 0.5:
        return None
    zmax = f_alpha_truncation(alpha, 1e-3)
    grid = np.linspace(0.0, zmax, 401)
    vals = f_alpha(alpha, grid, cfg)
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda z: -f_alpha(alpha, z, cfg),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(res.x)


def inverse_subordinator_density(alpha, t, x, cfg: EvalConfig = DEFAULT_EVAL):
    """Density ``p^S(t, x) = t**-alpha F_alpha(x / t**alpha)`` of ``S(t)``."""
    alpha = _check_alpha(alpha, allow_one=False)
    if not t > 0:
        raise ValueError("t must be positive")
    ta = t**alpha
    return f_alpha(alpha, np.asarray(x, dtype=float) / ta, cfg) / ta


# ---------------------------------------------------------------------------
# Airy oracle


def _airy_scalar(z):
    if abs(z) > 10.0:
        raise ValueError("airy_ai is only defined on |z| <= 10")
    # positive z cancels about (4/3) z^{3/2} / ln(10) digits
    extra = int(math.ceil(4.0 / 3.0 * max(z, 0.0) ** 1.5 / math.log(10.0)))
    with mpmath.workdps(30 + extra):
        z = mpmath.mpf(z)
        z3 = z**3
        c1 = 1 / (mpmath.power(3, mpmath.mpf(2) / 3) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = 1 / (mpmath.power(3, mpmath.mpf(1) / 3) * mpmath.gamma(mpmath.mpf(1) / 3))
        f = mpmath.mpf(1)
        g = z
        tf, tg = mpmath.mpf(1), z
        eps = mpmath.mpf(10) ** (-(25 + extra))
        k = 0
        while True:
            k += 1
            tf = tf * z3 / ((3 * k - 1) * (3 * k))
            tg = tg * z3 / ((3 * k) * (3 * k + 1))
            f += tf
            g += tg
            if abs(tf) + abs(tg) < eps * (abs(f) + abs(g)):
                break
        return float(c1 * f - c2 * g)


def airy_ai(z):
    """Airy ``Ai(z)`` on ``|z| <= 10`` from its Maclaurin series.

    Summed in extended precision so the cancellation for positive ``z``
    does not eat the double-precision result. Validation use only.
    """
    za = np.asarray(z, dtype=float)
    out = np.array([_airy_scalar(float(v)) for v in za.ravel()]).reshape(za.shape)
    return out if out.ndim else float(out)
