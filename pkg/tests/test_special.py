"""Tests for the self-contained special functions and normalization constants.

Expected values were computed with independent oracles (scipy.special.gamma,
mpmath.zeta at 40 digits, mpmath gamma for the constants) and frozen below;
a couple of live oracle sweeps are kept as well.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracfield.special import (
    FracConstants,
    constants,
    dirichlet_beta,
    gamma,
    hurwitz_zeta,
    zeta,
)

# =============================================================================
# gamma
# =============================================================================


def test_gamma_factorial_and_half():
    assert math.isclose(gamma(5.0), 24.0, rel_tol=1e-13)
    assert math.isclose(gamma(0.5), math.sqrt(math.pi), rel_tol=1e-13)
    assert math.isclose(gamma(1.0), 1.0, rel_tol=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -5.0])
def test_gamma_poles_raise(x):
    with pytest.raises(ValueError):
        gamma(x)


def test_gamma_accuracy_against_scipy():
    from scipy.special import gamma as scipy_gamma

    rng = np.random.default_rng(42)
    xs = rng.uniform(-5.0, 20.0, 500)
    # stay a couple of ulps away from the poles, where any finite-precision
    # implementation blows up in relative terms
    xs = xs[(xs > 0.5) | (np.abs(xs - np.round(xs)) > 1e-2)]
    for x in xs:
        got = gamma(float(x))
        ref = float(scipy_gamma(x))
        assert math.isclose(got, ref, rel_tol=1e-13), f"x={x}: {got} vs {ref}"


def test_gamma_recurrence_100_random_points():
    rng = np.random.default_rng(7)
    for x in rng.uniform(0.1, 10.0, 100):
        lhs = gamma(float(x) + 1.0)
        rhs = float(x) * gamma(float(x))
        assert abs(lhs - rhs) / abs(lhs) <= 1e-12


@given(st.floats(min_value=0.1, max_value=10.0, allow_nan=False))
@settings(max_examples=50, deadline=None)
def test_gamma_recurrence_property(x):
    assert math.isclose(gamma(x + 1.0), x * gamma(x), rel_tol=1e-12)


# =============================================================================
# zeta family
# =============================================================================


@pytest.mark.parametrize(
    "s, expected",
    [
        (0.3, -0.90455925725398397),
        (0.5, -1.4603545088095868),
        (0.7, -2.7783884455536956),
        (2.0, math.pi**2 / 6.0),
        (-1.5, -0.025485201889833036),
    ],
)
def test_zeta_frozen_values(s, expected):
    # frozen from a 40-digit mpmath evaluation
    tol = 1e-12 if s > 0 else 1e-10  # continuation loses a little for s < 0
    assert math.isclose(zeta(s), expected, rel_tol=tol)


@pytest.mark.parametrize(
    "s, a, expected",
    [
        (1.5, 0.25, 10.213055360466601),
        (1.3, 0.7, 4.714295234696373),
    ],
)
def test_hurwitz_frozen_values(s, a, expected):
    assert math.isclose(hurwitz_zeta(s, a), expected, rel_tol=1e-12)


@pytest.mark.parametrize(
    "s, expected",
    [(0.75, 0.7321072176273972), (0.5, 0.6676914571896092)],
)
def test_dirichlet_beta_frozen_values(s, expected):
    assert math.isclose(dirichlet_beta(s), expected, rel_tol=1e-12)


def test_zeta_live_oracle_sweep():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    for s in [-2.5, -1.2, -0.3, 0.2, 0.55, 0.95, 1.05, 1.8, 3.0]:
        ref = float(mp.zeta(s))
        assert math.isclose(zeta(s), ref, rel_tol=5e-10)
    for s in [1.2, 1.5, 1.9]:
        for a in [0.1, 0.5, 0.9]:
            assert math.isclose(hurwitz_zeta(s, a), float(mp.zeta(s, a)), rel_tol=1e-12)


def test_hurwitz_domain_errors():
    with pytest.raises(ValueError):
        hurwitz_zeta(1.0, 0.5)
    with pytest.raises(ValueError):
        hurwitz_zeta(1.5, 0.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(1.5, -1.0)


# =============================================================================
# constants
# =============================================================================


def test_constants_frozen_reference_values():
    # frozen from a 40-digit mpmath gamma evaluation of the closed forms
    table = {
        (1, 0.5): (0.19947114020071634, -0.19947114020071634),
        (2, 0.5): (0.11411141979370156, -0.08324198387542507),
        (1, 0.3): (0.25453721530798538, -0.12969318904286145),
        (1, 0.7): (0.13130707825516738, -0.25770465123077838),
        (2, 0.3): (0.13853979210529713, -0.04930119091588354),
        (2, 0.7): (0.07860936424298069, -0.11646761013455675),
    }
    for (n, a), (mu, nu) in table.items():
        c = constants(n, a)
        assert math.isclose(c.mu, mu, rel_tol=1e-13)
        assert math.isclose(c.nu, nu, rel_tol=1e-13)


def test_constants_match_gamma_closed_form():
    # the table must be reproducible from gamma() itself
    for n in (1, 2):
        for a in np.linspace(0.05, 0.95, 19):
            c = constants(n, float(a))
            pref = 2.0**a * math.pi ** (-n / 2.0)
            mu = pref * gamma((n + a + 1.0) / 2.0) / gamma((1.0 - a) / 2.0)
            nu = pref * gamma((n + a) / 2.0) / gamma(-a / 2.0)
            assert math.isclose(c.mu, mu, rel_tol=1e-14)
            assert math.isclose(c.nu, nu, rel_tol=1e-14)


def test_constants_signs():
    for n in (1, 2):
        for a in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]:
            c = constants(n, a)
            assert c.mu > 0.0
            assert c.nu < 0.0


def test_constants_geometry():
    c1 = constants(1, 0.5)
    c2 = constants(2, 0.5)
    assert math.isclose(c1.riesz_c, 1.0 / math.pi, rel_tol=1e-13)
    assert math.isclose(c2.riesz_c, 1.0 / (2.0 * math.pi), rel_tol=1e-13)
    assert math.isclose(c1.omega_n, 2.0, rel_tol=1e-13)
    assert math.isclose(c2.omega_n, math.pi, rel_tol=1e-13)


@pytest.mark.parametrize("n", [0, 3, -1])
def test_constants_rejects_bad_dimension(n):
    with pytest.raises(ValueError):
        constants(n, 0.5)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.3, 1.5, 2.0])
def test_constants_rejects_alpha_outside_open_interval(alpha):
    with pytest.raises(ValueError):
        constants(1, alpha)


def test_constants_dataclass_fields():
    c = constants(2, 0.25)
    assert isinstance(c, FracConstants)
    assert c.n == 2 and c.alpha == 0.25
    # frozen dataclass: attributes are read-only
    with pytest.raises(Exception):
        c.mu = 1.0  # type: ignore[misc]
