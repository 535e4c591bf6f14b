"""Sequential policy-making: the challenger's best response and the incumbent's optimum.

Candidates are office-seeking. Payoffs are measured through the challenger's
cutoff state (see :func:`newsgame.communication.challenger_cutoff`): the
challenger maximises it and the incumbent minimises it. Indifferences are
broken toward the outlet's bliss policy ``phi_m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .communication import PoolingStructure, challenger_cutoff, pooling_structure
from .errors import DomainError
from .model import ModelParams, PolicyPair


class Regime(str, Enum):
    LOW = "low"
    MID = "mid"
    HIGH = "high"


@dataclass(frozen=True)
class EquilibriumProfile:
    q: PolicyPair
    regime: Regime
    k_bar: float
    eta: float
    pooling: PoolingStructure


def _fourth_root_term(p: ModelParams) -> float:
    return (p.xi / (p.gamma**2 * p.k)) ** 0.25


def br_left(p: ModelParams, q_i: float) -> float:
    """Best response restricted to ``q_c <= q_i``."""
    eta = p.eta
    if q_i <= p.phi_m:
        return q_i
    if q_i <= p.phi_m + eta:
        return p.phi_m
    if q_i <= p.phi_v + eta:
        return q_i - eta
    return p.phi_v


def br_right(p: ModelParams, q_i: float) -> float:
    """Best response restricted to ``q_c >= q_i``: leap to ``phi_v`` or mimic."""
    cutoff = p.phi_v - math.sqrt(math.sqrt(p.xi / p.k) / (2.0 * p.gamma))
    return p.phi_v if q_i < cutoff else q_i


def best_response_thresholds(p: ModelParams) -> dict[str, float]:
    """Switch points of the challenger's best response (``q_bar_1..3``)."""
    eta = p.eta
    return {
        "q_bar_1": p.phi_v + eta - _fourth_root_term(p),
        "q_bar_2": 0.5 * (p.phi_v + p.phi_m) - eta,
        "q_bar_3": p.phi_m + eta,
    }


def best_response(p: ModelParams, q_i: float) -> float:
    if not p.phi_m <= q_i <= p.phi_v:
        raise DomainError(f"q_i={q_i} outside [{p.phi_m}, {p.phi_v}]")
    eta = p.eta
    th = best_response_thresholds(p)
    if p.k >= p.k_bar:
        return p.phi_v if q_i < th["q_bar_1"] else q_i - eta
    if q_i < th["q_bar_2"]:
        return p.phi_v
    if q_i <= th["q_bar_3"]:
        return p.phi_m
    return q_i - eta


def equilibrium_policies(p: ModelParams) -> EquilibriumProfile:
    k_bar, eta = p.k_bar, p.eta
    if p.k <= k_bar / 4.0:
        regime = Regime.LOW
        q = PolicyPair(p.phi_m, p.phi_m)
    elif p.k <= k_bar:
        regime = Regime.MID
        q = PolicyPair(0.5 * (p.phi_v + p.phi_m) - eta, p.phi_m)
    else:
        regime = Regime.HIGH
        s = _fourth_root_term(p)
        q = PolicyPair(p.phi_v + eta - s, p.phi_v - s)
    return EquilibriumProfile(
        q=q, regime=regime, k_bar=k_bar, eta=eta, pooling=pooling_structure(p, q)
    )


def existence_condition(p: ModelParams) -> bool:
    gd2 = p.gamma * (p.phi_v - p.phi_m) ** 2
    return p.phi >= min(gd2 + 0.5 * math.sqrt(p.xi / p.k), 3.0 * gd2)


def policy_grid(p: ModelParams, step: float = 1e-3) -> np.ndarray:
    """Grid over ``[phi_m, phi_v]``; ``step`` is a fraction of the span."""
    n = max(1, int(round(1.0 / step)))
    return np.linspace(p.phi_m, p.phi_v, n + 1)


def payoff_scale(p: ModelParams) -> float:
    return p.gamma * (p.phi_v - p.phi_m) ** 2 + p.phi


def simultaneous_convergence_check(p: ModelParams, step: float = 1e-3) -> bool:
    """Is ``(phi_m, phi_m)`` a mutual best response when proposals are simultaneous?"""
    grid = policy_grid(p, step)
    tol = 1e-12 * payoff_scale(p)
    at_rest = challenger_cutoff(p, p.phi_m, p.phi_m)
    challenger_gain = np.max(challenger_cutoff(p, p.phi_m, grid)) - at_rest
    incumbent_gain = at_rest - np.min(challenger_cutoff(p, grid, p.phi_m))
    return bool(challenger_gain <= tol and incumbent_gain <= tol)


def no_pure_equilibrium_check(p: ModelParams, step: float = 1e-3) -> bool:
    """True when no grid pair is a simultaneous mutual best response (needs ``k >= k_bar``)."""
    if p.k < p.k_bar:
        raise DomainError(f"k={p.k} below k_bar={p.k_bar}; the check needs k >= k_bar")
    grid = policy_grid(p, step)
    tol = 1e-12 * payoff_scale(p)
    # rows index q_i, columns q_c
    cut = challenger_cutoff(p, grid[:, None], grid[None, :])
    challenger_ok = cut >= cut.max(axis=1, keepdims=True) - tol
    incumbent_ok = cut <= cut.min(axis=0, keepdims=True) + tol
    return not bool(np.any(challenger_ok & incumbent_ok))
