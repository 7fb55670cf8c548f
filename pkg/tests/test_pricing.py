import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from subdiff.pricing import (
    ContractParams,
    bs_call,
    bs_price_classical,
    bs_put_classical,
    map_real_params,
    subordinated_price_mc,
    subordinated_price_quadrature,
    subordinated_put_quadrature,
)
from subdiff.subordinator import SimConfig


def textbook_call(s, k, r, sigma, t):
    """Black-Scholes in market units, written independently of the package."""
    d1 = (math.log(s / k) + (r + sigma**2 / 2) * t) / (sigma * math.sqrt(t))
    d2 = d1 - sigma * math.sqrt(t)
    return s * stats.norm.cdf(d1) - k * math.exp(-r * t) * stats.norm.cdf(d2)


def test_contract_validation():
    for bad in ({"x": 0, "K": 1}, {"x": 1, "K": -1}, {"x": 1, "K": 1, "tau": -0.1}):
        with pytest.raises(ValueError):
            ContractParams(**bad)


def test_classical_examples():
    assert bs_price_classical(ContractParams(110, 100, 0.0, 0.0)) == 10.0
    assert bs_price_classical(ContractParams(110, 100, 0.0, 1e-14)) == pytest.approx(10.0, abs=1e-10)
    assert bs_price_classical(ContractParams(1, 1, 0.0, 0.02)) == pytest.approx(
        2 * stats.norm.cdf(0.1) - 1, abs=1e-15)
    assert round(bs_price_classical(ContractParams(1, 1, 0.0, 0.02)), 7) == 0.0796557
    assert bs_price_classical(ContractParams(100, 1e-12, 0.0, 0.3)) == pytest.approx(100.0, abs=1e-9)


def test_map_real_params():
    c = map_real_params(100, 100, 0.0, 0.4, 2.0)
    assert c.beta == 0.0
    assert map_real_params(100, 100, 0.05, 0.2, 1.0).tau == pytest.approx(0.02)
    with pytest.raises(ValueError):
        map_real_params(100, 100, 0.05, 0.0, 1.0)


@pytest.mark.parametrize("s,k,r,sigma,t", [
    (100, 100, 0.05, 0.2, 1.0), (90, 100, 0.01, 0.3, 0.5), (120, 100, 0.03, 0.15, 2.0),
    (100, 80, 0.0, 0.5, 0.25), (50, 70, 0.08, 0.25, 3.0),
])
def test_bridge_matches_textbook(s, k, r, sigma, t):
    assert bs_price_classical(map_real_params(s, k, r, sigma, t)) == pytest.approx(
        textbook_call(s, k, r, sigma, t), abs=1e-8)


def test_textbook_value():
    assert abs(textbook_call(100, 100, 0.05, 0.2, 1.0) - 10.4506) < 1e-4


@given(st.floats(1, 200), st.floats(1, 200), st.floats(0, 3), st.floats(0, 5))
def test_call_bounds(x, k, beta, tau):
    c = bs_call(tau, x, k, beta)
    assert max(0.0, x - k * math.exp(-beta * tau)) - 1e-9 * x <= c <= x


def test_put_call_parity():
    c = ContractParams(95, 100, 0.7, 0.3)
    put = bs_put_classical(c)
    assert put >= 0
    assert bs_price_classical(c) - put == pytest.approx(95 - 100 * math.exp(-0.21))


@pytest.mark.parametrize("x,k,beta", [(90, 100, 0), (100, 100, 0.5), (110, 100, 2.0)])
@pytest.mark.parametrize("t", [0.05, 1.0, 3.0])
def test_alpha_one_reduction(x, k, beta, t):
    c = ContractParams(x, k, beta)
    assert abs(subordinated_price_quadrature(1.0, t, c) - bs_call(t, x, k, beta)) < 1e-10


def test_near_one_alpha_approaches_classical():
    c = ContractParams(100, 100, 0.5)
    ref = bs_call(1.0, 100, 100, 0.5)
    errs = [abs(subordinated_price_quadrature(a, 1.0, c) - ref) for a in (0.9, 0.99, 0.999)]
    assert errs[0] > errs[1] > errs[2]


def test_short_maturity_limit():
    c = ContractParams(110, 100, 0.0)
    assert subordinated_price_quadrature(0.7, 1e-10, c) == pytest.approx(10.0, abs=1e-6)


@pytest.mark.parametrize("alpha", [0.3, 0.7])
def test_subordinated_bounds_and_monotone_in_spot(alpha):
    spots = np.linspace(60, 140, 9)
    prices = [subordinated_price_quadrature(alpha, 0.5, ContractParams(s, 100, 0.5)) for s in spots]
    assert all(0 <= p <= s for p, s in zip(prices, spots))
    assert np.all(np.diff(prices) >= 0)


def test_subordinated_put_parity():
    from subdiff.specfun import mittag_leffler_neg

    a, t, c = 0.6, 1.0, ContractParams(100, 100, 0.5)
    call = subordinated_price_quadrature(a, t, c)
    put = subordinated_put_quadrature(a, t, c)
    assert call - put == pytest.approx(100 - 100 * mittag_leffler_neg(a, 0.5 * t**a), abs=1e-8)


def test_mc_alpha_one_zero_variance():
    c = ContractParams(100, 100, 0.5)
    price, se = subordinated_price_mc(1.0, 1.0, c, SimConfig(n_paths=100, t_max=1.0))
    assert se == 0.0
    assert price == pytest.approx(bs_call(1.0, 100, 100, 0.5), rel=1e-15)


def test_mc_zero_strike_is_spot():
    price, se = subordinated_price_mc(0.5, 1.0, ContractParams(100, 1e-12), SimConfig(n_paths=1000, dtau=0.5))
    assert price == pytest.approx(100.0, abs=1e-9)
    assert se < 1e-9


@pytest.mark.parametrize("alpha", [0.6, 0.8])
def test_mc_matches_quadrature(alpha):
    c = ContractParams(100, 100, 0.5)
    price, se = subordinated_price_mc(alpha, 1.0, c, SimConfig(seed=7, n_paths=200_000, dtau=0.5, t_max=1.0))
    assert abs(price - subordinated_price_quadrature(alpha, 1.0, c)) <= 3 * se
