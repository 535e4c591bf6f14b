import math

import numpy as np
import pytest
from hypothesis import given, settings

from newsgame import (
    DomainError,
    NuExtensionParams,
    challenger_regulation,
    complete_info_welfare,
    incumbent_regulation,
    iota,
    no_media_comparison,
    nu_extension_optimum,
    welfare,
)
from newsgame.welfare import nu, nu_scan_range, welfare_at
from conftest import p0, valid_params


def _tau_m_high(k):
    # baseline high regime written in s = k^(-1/4): eta = s^2/4
    s = k**-0.25
    return (2 - 2 * s + s * s / 4) * s * s / 4


@pytest.mark.parametrize(
    "k, w, chi, iota_",
    [
        (0.1, 0.0, 0.0, 0.5),
        (1.0, 0.215087890625, 0.0625, 0.4921875),
        (4.0, 0.5782927144543797, 0.03125, 1 / 2 - _tau_m_high(4.0) / 8),
    ],
)
def test_welfare_examples(k, w, chi, iota_):
    rep = welfare(p0(k))
    assert rep.welfare == pytest.approx(w, abs=1e-12)
    assert rep.persuasion_rate == pytest.approx(chi, abs=1e-12)
    assert rep.incumbent_win_prob == pytest.approx(iota_, abs=1e-12)
    assert rep.payoff_set == (rep.welfare, 1.0)


def test_welfare_at_k4_matches_hand_value():
    assert welfare(p0(4.0)).welfare == pytest.approx(0.57829, abs=1e-5)
    assert welfare(p0(4.0)).incumbent_win_prob == pytest.approx(0.48889, abs=1e-5)


def test_transfer_flag_subtracts_gain():
    p = p0(2.0, xi=0.7)
    assert welfare(p, subtract_transfer=True).welfare == pytest.approx(welfare(p).welfare - 0.7)


def test_complete_information_benchmark():
    assert complete_info_welfare(p0()) == 1.0
    assert complete_info_welfare(p0(phi=3.0)) == 0.75
    assert welfare(p0(1e8)).welfare == pytest.approx(1.0, abs=1e-3)


def test_no_media_comparison():
    assert no_media_comparison(p0()) == (0.0, None)
    assert no_media_comparison(p0(phi=100.0)) == (0.0, None)
    base, k_prime = no_media_comparison(p0(phi=3.0))
    assert base == 0.0
    assert abs(welfare_at(p0(phi=3.0), k_prime)) <= 1e-10
    assert k_prime == pytest.approx(1.113935, abs=1e-6)


def test_incumbent_regulation():
    k_star, at = incumbent_regulation(p0())
    assert (k_star, at) == (0.25, 0.5)
    assert iota(p0(), 1.0) == 0.4921875
    assert iota(p0(), 1e8) == pytest.approx(0.5, abs=1e-3)


def test_challenger_regulation_matches_analytic_optimum():
    k_star, at = challenger_regulation(p0())
    s = 3.0 - math.sqrt(5.0)
    assert k_star == pytest.approx(s**-4, rel=1e-5)
    assert k_star == pytest.approx(3.0, abs=0.1)
    assert at == pytest.approx(0.5 - _tau_m_high(s**-4) / 8, abs=1e-12)
    assert at == pytest.approx(0.4887, abs=1e-4)
    assert k_star > p0().k_bar
    assert welfare_at(p0(), k_star) > welfare_at(p0(), 0.25)


@pytest.mark.parametrize("sigma, want, tol", [(6.0, 10.5, 0.2), (8.0, 0.25, 0.05)])
def test_nu_extension_optimum(sigma, want, tol):
    k_star, value = nu_extension_optimum(p0(), NuExtensionParams(-0.006, 0.2, 10.0, sigma))
    assert k_star == pytest.approx(want, abs=tol)
    ext = NuExtensionParams(-0.006, 0.2, 10.0, sigma)
    assert value == pytest.approx(iota(p0(), k_star) + float(nu(k_star, ext)), abs=1e-12)


def test_nu_extension_small_bump_reduces_to_incumbent_choice():
    k_star, _ = nu_extension_optimum(p0(), NuExtensionParams(0.0, 1e-6, 10.0, 6.0))
    assert k_star == pytest.approx(0.25, rel=1e-6)


def test_nu_extension_rejects_out_of_range_probability():
    with pytest.raises(DomainError):
        nu_extension_optimum(p0(), NuExtensionParams(0.6, 0.2, 10.0, 6.0))


def test_nu_scan_range_covers_bump():
    lo, hi = nu_scan_range(p0(), NuExtensionParams(0, 1, 5000.0, 10.0))
    assert lo < 0.25 and hi >= 5200.0


@settings(max_examples=100, deadline=None)
@given(valid_params())
def test_welfare_report_bounds(p):
    rep = welfare(p)
    assert 0.0 <= rep.persuasion_rate <= 1.0
    assert 0.0 <= rep.incumbent_win_prob <= 0.5 + 1e-15
    assert rep.welfare <= p.phi / 4 + 1e-12 * p.phi
    assert rep.payoff_set[1] == p.phi / 4


@settings(max_examples=40, deadline=None)
@given(valid_params())
def test_welfare_nondecreasing_in_cost(p):
    ks = p.k_bar * np.geomspace(1e-2, 1e3, 60)
    w = np.array([welfare_at(p, k) for k in ks])
    assert np.all(np.diff(w) >= -1e-12 * p.phi)
