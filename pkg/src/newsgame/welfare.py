"""Voter welfare, persuasion and victory rates, and regulators' choice of ``k``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError, SearchError
from .model import ModelParams, thresholds
from .policy import equilibrium_policies

K_MAX = 1e8


@dataclass(frozen=True)
class WelfareReport:
    k: float
    welfare: float
    persuasion_rate: float
    incumbent_win_prob: float
    payoff_set: tuple[float, float]


@dataclass(frozen=True)
class NuExtensionParams:
    """Electoral response ``nu(k) = y + x * normal_pdf(k; k_v, sigma)``."""

    y: float
    x: float
    k_v: float
    sigma: float


def welfare(p: ModelParams, subtract_transfer: bool = False) -> WelfareReport:
    """Closed-form equilibrium statistics at ``p.k``.

    On the equilibrium path the outlet's endorsed candidate always wins, so the
    incumbent is elected exactly when ``theta > tau_m``.  With
    ``subtract_transfer`` the outlet's gain ``xi`` is treated as a wasted
    transfer and deducted from the voter's welfare.
    """
    prof = equilibrium_policies(p)
    q = prof.q
    tau_v, tau_m = thresholds(p, q)
    phi = p.phi
    lose_share = (tau_m + phi) / (2.0 * phi)
    win_share = (phi - tau_m) / (2.0 * phi)
    w = lose_share * (-p.gamma * (p.phi_v - q.q_c) ** 2) + win_share * (
        -p.gamma * (p.phi_v - q.q_i) ** 2 + 0.5 * (phi + tau_m)
    )
    if subtract_transfer:
        w -= p.xi
    return WelfareReport(
        k=p.k,
        welfare=w,
        persuasion_rate=(tau_m - tau_v) / (2.0 * phi),
        incumbent_win_prob=win_share,
        payoff_set=(w, complete_info_welfare(p)),
    )


def complete_info_welfare(p: ModelParams) -> float:
    return p.phi / 4.0


def welfare_at(p: ModelParams, k: float) -> float:
    return welfare(p.with_k(k)).welfare


def iota(p: ModelParams, k: float) -> float:
    """Incumbent's ex-ante probability of victory at cost intensity ``k``."""
    return welfare(p.with_k(k)).incumbent_win_prob


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def no_media_comparison(p: ModelParams, k_max: float = K_MAX) -> tuple[float, float | None]:
    """Welfare without an outlet (always 0) and the cost ``k'`` at which media start to help.

    ``k'`` is ``None`` unless welfare at low costs is strictly negative.
    """
    floor = -p.gamma * (p.phi_v - p.phi_m) ** 2 + p.phi / 4.0
    if not floor < 0.0:
        return 0.0, None
    lo = p.k_bar / 4.0
    if welfare_at(p, k_max) <= 0.0:
        raise SearchError(f"no sign change of welfare on [{lo}, {k_max}]")
    x = optimize.bisect(
        lambda t: welfare_at(p, math.exp(t)),
        math.log(lo),
        math.log(k_max),
        xtol=1e-15,
        rtol=4 * np.finfo(float).eps,
        maxiter=400,
    )
    return 0.0, math.exp(x)


def incumbent_regulation(
    p: ModelParams, k_max: float = K_MAX, n_grid: int = 400
) -> tuple[float, float]:
    """The incumbent's preferred ``k``; returns the supremum ``k_bar/4`` of the optimal set."""
    k_star = p.k_bar / 4.0
    at = iota(p, k_star)
    above = log_grid(k_star, k_max, n_grid + 1)[1:]
    worst = max(iota(p, k) for k in above)
    if not worst < 0.5:
        raise SearchError(f"iota reached {worst} >= 1/2 above k_bar/4")
    return k_star, at


def challenger_regulation(
    p: ModelParams, k_max: float = K_MAX, n_grid: int = 2000, tol: float = 1e-6
) -> tuple[float, float]:
    """The challenger's preferred ``k``: the minimiser of the incumbent's victory chance."""
    lo = p.k_bar / 4.0
    grid = log_grid(lo, k_max, n_grid)
    vals = np.array([iota(p, k) for k in grid])
    j = int(np.argmin(vals))
    if j == len(grid) - 1:
        raise SearchError(f"minimiser pinned to k_max={k_max}")
    if j == 0:
        raise SearchError(f"minimiser pinned to k_bar/4={lo}")
    # golden section on log k, bracketed by the grid neighbours
    res = optimize.minimize_scalar(
        lambda t: iota(p, math.exp(t)),
        bracket=(math.log(grid[j - 1]), math.log(grid[j]), math.log(grid[j + 1])),
        method="golden",
        tol=tol / max(1.0, abs(math.log(grid[j]))),
    )
    k_star = math.exp(res.x)
    if not k_star > p.k_bar:
        raise SearchError(f"challenger optimum k={k_star} not above k_bar={p.k_bar}")
    return k_star, iota(p, k_star)


def normal_pdf(x, mean: float, sd: float):
    z = (np.asarray(x, dtype=float) - mean) / sd
    return np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * sd)


def nu(k, ext: NuExtensionParams):
    return ext.y + ext.x * normal_pdf(k, ext.k_v, ext.sigma)


def iota_hat(p: ModelParams, k: float, ext: NuExtensionParams) -> float:
    return iota(p, k) + float(nu(k, ext))


def nu_scan_range(p: ModelParams, ext: NuExtensionParams) -> tuple[float, float]:
    return 1e-3 * p.k_bar, max(1e3 * p.k_bar, ext.k_v + 20.0 * ext.sigma)


def nu_extension_optimum(
    p: ModelParams, ext: NuExtensionParams, n_grid: int = 4000
) -> tuple[float, float]:
    """Global maximiser of ``iota(k) + nu(k)`` over a log grid, refined locally."""
    lo, hi = nu_scan_range(p, ext)
    grid = log_grid(lo, hi, n_grid)
    vals = np.array([iota_hat(p, k, ext) for k in grid])
    if vals.min() < 0.0 or vals.max() > 1.0:
        raise DomainError("iota_hat leaves [0, 1] on the scan range; adjust y, x or sigma")
    j = int(np.argmax(vals))
    a, b = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        lambda k: -iota_hat(p, k, ext), bounds=(a, b), method="bounded",
        options={"xatol": 1e-9 * b},
    )
    if -res.fun >= vals[j]:
        return float(res.x), float(-res.fun)
    return float(grid[j]), float(vals[j])
