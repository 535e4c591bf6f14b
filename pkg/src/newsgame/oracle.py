"""Brute-force checks that never call the closed-form best response or policies.

Best responses come from scanning the challenger's cutoff over a policy grid
and polishing the best local maxima with a bounded scalar search. Welfare
comes from midpoint quadrature of the voter's realised payoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .communication import (
    challenger_cutoff,
    classify_many,
    generic_equilibrium,
    pooling_structure,
)
from .model import ModelParams, PolicyPair, thresholds
from .policy import best_response, equilibrium_policies, payoff_scale, policy_grid

TIE_TOL = 1e-9


class Check(NamedTuple):
    name: str
    passed: bool
    max_violation: float
    location: str
    tolerance: float


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    grid_step: float = 1e-3
    tolerance: float = 1e-6

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, violation: float, location: str, tol: float | None = None):
        tol = self.tolerance if tol is None else tol
        self.checks.append(Check(name, bool(violation <= tol), float(violation), location, tol))

    def render(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"{status}  {c.name:<24} violation={c.max_violation:.3e} "
                f"tol={c.tolerance:.1e}  at {c.location}"
            )
        return "\n".join(lines)


def _polish(f, grid: np.ndarray, vals: np.ndarray, tie: float) -> tuple[float, float]:
    """Refine the best grid maxima of ``f`` and return ``(argmax, max)``, ties to the left."""
    n = len(grid)
    best = vals.max()
    slack = 2.0 * (np.max(np.abs(np.diff(vals))) if n > 1 else 0.0) + tie
    left = np.r_[-np.inf, vals[:-1]]
    right = np.r_[vals[1:], -np.inf]
    peaks = np.flatnonzero((vals >= left) & (vals >= right) & (vals >= best - slack))
    if len(peaks) > 20:
        peaks = peaks[np.argsort(-vals[peaks], kind="stable")[:20]]
    found = []
    for j in peaks:
        a, b = grid[max(j - 1, 0)], grid[min(j + 1, n - 1)]
        res = optimize.minimize_scalar(
            lambda x: -f(x), bounds=(a, b), method="bounded",
            options={"xatol": 1e-12 * max(1.0, abs(b - a) * n)},
        )
        # within one peak keep the better point, preferring the grid point on ties
        if -res.fun > vals[j]:
            found.append((float(res.x), float(-res.fun)))
        else:
            found.append((float(grid[j]), float(vals[j])))
    top = max(v for _, v in found)
    return min((x, v) for x, v in found if v >= top - tie)


def grid_best_response(p: ModelParams, q_i: float, step: float = 1e-3) -> tuple[float, float]:
    """Challenger's best reply to ``q_i`` by grid scan; returns ``(q_c, cutoff)``."""
    grid = policy_grid(p, step)
    vals = challenger_cutoff(p, q_i, grid)
    return _polish(lambda x: challenger_cutoff(p, q_i, x), grid, vals, TIE_TOL * payoff_scale(p))


def quadrature_welfare(
    p: ModelParams, q: PolicyPair, n: int = 10**6, lam: float | None = None
) -> float:
    """Midpoint-rule expectation of the voter's payoff under equilibrium reporting."""
    if n < 1000:
        raise ValueError("n must be at least 1000")
    h = 2.0 * p.phi / n
    theta = -p.phi + h * (np.arange(n) + 0.5)
    play = classify_many(p, theta, q, lam)
    payoff = np.where(
        play["elects_incumbent"],
        -p.gamma * (p.phi_v - q.q_i) ** 2 + theta,
        -p.gamma * (p.phi_v - q.q_c) ** 2,
    )
    return float(np.mean(payoff))


def outlet_deviation_gain(
    p: ModelParams, q: PolicyPair, n_states: int = 2001, lam: float | None = None
) -> tuple[float, str]:
    """Largest gain, in units of ``xi``, from a one-shot change of report."""
    ge = generic_equilibrium(p, q, lam)
    theta = np.unique(np.r_[np.linspace(-p.phi, p.phi, n_states), ge.pool_lo, ge.pool_hi])
    theta = theta[(theta >= -p.phi) & (theta <= p.phi)]
    n_states = len(theta)
    band = p.phi + p.reach
    reports = np.unique(np.r_[
        np.linspace(-band, band, 2 * n_states + 1),
        ge.r_hat, ge.pool_lo, ge.pool_hi, ge.tau_v, ge.tau_m,
    ])
    eq = classify_many(p, theta, q, lam)
    dev_elects_i = np.asarray(ge.elects_incumbent(reports))
    base = p.xi * (eq["elects_incumbent"] == eq["endorses_incumbent"]) - eq["outlet_cost"]
    worst, where = -np.inf, ""
    for lo in range(0, n_states, 256):
        th = theta[lo:lo + 256, None]
        hit = dev_elects_i[None, :] == eq["endorses_incumbent"][lo:lo + 256, None]
        gain = p.xi * hit - p.k * (reports[None, :] - th) ** 2 - base[lo:lo + 256, None]
        a, b = np.unravel_index(np.argmax(gain), gain.shape)
        if gain[a, b] > worst:
            worst = float(gain[a, b])
            where = f"theta={th[a, 0]:.6g} r'={reports[b]:.6g}"
    return max(0.0, worst / p.xi), where


def verify_equilibrium(
    p: ModelParams,
    step: float = 1e-3,
    tol: float = 1e-6,
    profile: PolicyPair | None = None,
) -> VerificationReport:
    """Run every incentive and consistency check at the equilibrium (or a given profile).

    Violations are normalised by ``xi`` for the outlet and by
    ``gamma*(phi_v-phi_m)^2 + phi`` for voter and candidates.
    """
    report = VerificationReport(grid_step=step, tolerance=tol)
    q = equilibrium_policies(p).q if profile is None else profile
    scale = payoff_scale(p)
    tie = TIE_TOL * scale
    grid = policy_grid(p, step)

    gain, where = outlet_deviation_gain(p, q, n_states=2 * int(round(1.0 / step)) + 1)
    report.add("outlet_no_deviation", gain, where)

    at_q = challenger_cutoff(p, q.q_i, q.q_c)
    row = challenger_cutoff(p, q.q_i, grid)
    j = int(np.argmax(row))
    report.add("challenger_no_deviation", max(0.0, row[j] - at_q) / scale, f"q_c={grid[j]:.6g}")

    # incumbent: value each q_i by the challenger's (grid) best reply
    cut = challenger_cutoff(p, grid[:, None], grid[None, :])
    coarse = cut.max(axis=1)
    _, own = grid_best_response(p, q.q_i, step)
    worst, where = 0.0, f"q_i={q.q_i:.6g}"
    for i in np.flatnonzero(coarse < own + tie):
        _, v = grid_best_response(p, grid[i], step)
        if own - v > worst:
            worst, where = own - v, f"q_i={grid[i]:.6g}"
    report.add("incumbent_no_deviation", worst / scale, where)

    pool = pooling_structure(p, q)
    tau_v = thresholds(p, q).tau_v
    report.add("belief_consistency", abs(pool.midpoint - tau_v) / scale, f"r*={pool.r_star:.6g}")

    worst, where = 0.0, ""
    for q_i in grid:
        q_c, v = grid_best_response(p, q_i, step)
        closed = best_response(p, float(q_i))
        gap = abs(q_c - closed)
        if gap > step * p.span and challenger_cutoff(p, q_i, closed) >= v - tie:
            gap = 0.0  # closed form picks another maximiser
        if gap > worst:
            worst, where = gap, f"q_i={q_i:.6g} grid={q_c:.6g} closed={closed:.6g}"
    report.add("best_response_agreement", worst, where or "all grid points", step * p.span)
    return report
