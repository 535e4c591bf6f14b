"""Equilibrium of the communication subgame for fixed proposals.

The outlet pools states around the voter's threshold onto one report so that
the voter's posterior mean equals the pooled expectation ``lam``; away from
that band it reports truthfully. ``lam == tau_v`` is the sender-preferred
member of the family and the default everywhere.

Orientation vocabulary:

* ``voter-below`` (``tau_v < tau_m``, challenger undercuts): the outlet belittles
  quality, pooling ``(r_hat, h(r_hat))`` onto the low report ``r_hat``.
* ``voter-above`` (``tau_v > tau_m``): the outlet inflates quality, pooling
  ``(l(r_hat), r_hat)`` onto the high report ``r_hat``.
* ``aligned`` (``tau_v == tau_m``): reporting is truthful.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .model import C, I, Candidate, ModelParams, PolicyPair, conflict_set, thresholds


class Case(str, Enum):
    VOTER_BELOW = "voter-below"
    VOTER_ABOVE = "voter-above"
    ALIGNED = "aligned"


@dataclass(frozen=True)
class PoolingStructure:
    r_star: float
    pool_lo: float
    pool_hi: float
    case: Case

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.pool_lo + self.pool_hi)


@dataclass(frozen=True)
class ReportingOutcome:
    theta: float
    report: float
    ballot: Candidate
    misreported: bool
    persuaded: bool
    outlet_cost: float


def _case_of(tau_v: float, tau_m: float) -> Case:
    if tau_v < tau_m:
        return Case.VOTER_BELOW
    if tau_v > tau_m:
        return Case.VOTER_ABOVE
    return Case.ALIGNED


def misreporting_bounds(p: ModelParams, q: PolicyPair, r: float) -> tuple[float, float]:
    """Lowest and highest misreporting types ``(l(r), h(r))``, clamped at ``tau_m``."""
    tau_m = thresholds(p, q).tau_m
    return max(r - p.reach, tau_m), min(r + p.reach, tau_m)


def _pool(reach, tau_v, tau_m, lam):
    """Pooling report and interval for expectation ``lam``; broadcasts over arrays.

    Returns ``(r_hat, lo, hi)``. In the aligned case the interval is empty at
    ``lam == tau_v``.
    """
    down = tau_v < tau_m
    r_down = np.maximum(lam - 0.5 * reach, 2.0 * lam - tau_m)
    r_up = np.minimum(lam + 0.5 * reach, 2.0 * lam - tau_m)
    r_hat = np.where(down, r_down, r_up)
    lo = np.where(down, r_hat, np.maximum(r_hat - reach, tau_m))
    hi = np.where(down, np.minimum(r_hat + reach, tau_m), r_hat)
    return r_hat, lo, hi


def pooling_structure(p: ModelParams, q: PolicyPair) -> PoolingStructure:
    t = thresholds(p, q)
    r, lo, hi = (float(x) for x in _pool(p.reach, t.tau_v, t.tau_m, t.tau_v))
    return PoolingStructure(r_star=r, pool_lo=lo, pool_hi=hi, case=_case_of(*t))


def challenger_cutoff(p: ModelParams, q_i, q_c):
    """State below which the challenger is elected, given proposals.

    Vectorised over ``q_i`` and ``q_c`` (numpy broadcasting). This is the
    challenger's payoff in threshold units: the right end of the pool when the
    outlet backs the challenger, the left end when it backs the incumbent, and
    ``tau_v`` when interests are aligned.
    """
    q_i = np.asarray(q_i, dtype=float)
    q_c = np.asarray(q_c, dtype=float)
    gap = q_c - q_i
    tau_v = p.gamma * (2.0 * p.phi_v - q_c - q_i) * gap
    tau_m = p.gamma * (2.0 * p.phi_m - q_c - q_i) * gap
    _, lo, hi = _pool(p.reach, tau_v, tau_m, tau_v)
    out = np.where(tau_v < tau_m, hi, np.where(tau_v > tau_m, lo, tau_v))
    return out if out.ndim else float(out)


def challenger_win_probability(p: ModelParams, q: PolicyPair) -> float:
    cut = challenger_cutoff(p, q.q_i, q.q_c)
    return min(1.0, max(0.0, (cut + p.phi) / (2.0 * p.phi)))


@dataclass(frozen=True)
class GenericEquilibrium:
    """One member of the pooling family, indexed by the induced expectation ``lam``.

    ``closed`` marks the most informative member, where the boundary state on
    the far side of the pool also sends ``r_hat``.
    """

    lam: float
    r_hat: float
    pool_lo: float
    pool_hi: float
    tau_v: float
    tau_m: float
    case: Case
    closed: bool = False

    @property
    def backs_incumbent(self) -> bool:
        """Whether the pooled report elects the incumbent."""
        return self.case is not Case.VOTER_BELOW

    @property
    def empty(self) -> bool:
        return not self.pool_lo < self.pool_hi

    def _pooled(self, x):
        """Mask of states that send ``r_hat``; as reports, these values are off-path."""
        inside = (x > self.pool_lo) & (x < self.pool_hi)
        if not self.empty:
            if self.closed:
                edge = self.pool_lo if self.backs_incumbent else self.pool_hi
                inside |= x == edge
            if self.case is Case.VOTER_BELOW and self.pool_hi == self.tau_m:
                # theta == tau_m still endorses c, so the outlet pays to pool it
                inside |= x == self.tau_m
        return inside

    def report(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.where(self._pooled(theta), self.r_hat, theta)
        return out if out.ndim else float(out)

    def elects_incumbent(self, r):
        """Ballot as a boolean: ``True`` when the incumbent is elected."""
        r = np.asarray(r, dtype=float)
        truthful = r > self.tau_v
        if self.empty:
            return truthful if truthful.ndim else bool(truthful)
        pooled = r == self.r_hat
        # off-path reports inside the pool are read as coming from the
        # types the outlet would rather not see elected
        gap = self._pooled(r) & ~pooled
        out = np.where(
            pooled,
            self.backs_incumbent,
            np.where(gap, not self.backs_incumbent, truthful),
        )
        return out if out.ndim else bool(out)


def lambda_bounds(p: ModelParams, q: PolicyPair) -> tuple[float, float]:
    """``(sender_preferred, most_informative)`` ends of the admissible ``lam`` range.

    With aligned interests the family collapses to truthful reporting at ``tau_v``.
    """
    t = thresholds(p, q)
    if t.tau_v < t.tau_m:
        return t.tau_v, t.tau_v - 0.5 * p.reach
    if t.tau_v > t.tau_m:
        return t.tau_v, t.tau_v + 0.5 * p.reach
    return t.tau_v, t.tau_v


def generic_equilibrium(
    p: ModelParams, q: PolicyPair, lam: float | None = None
) -> GenericEquilibrium:
    t = thresholds(p, q)
    case = _case_of(*t)
    sender, informative = lambda_bounds(p, q)
    if lam is None:
        lam = sender
    lo_b, hi_b = sorted((sender, informative))
    if not lo_b <= lam <= hi_b:
        raise DomainError(f"lam={lam} outside admissible range [{lo_b}, {hi_b}]")
    r_hat, lo, hi = (float(x) for x in _pool(p.reach, t.tau_v, t.tau_m, lam))
    closed = lam == informative and lam != sender
    if closed:
        # the pool's near edge is tau_v exactly; avoid a rounding sliver
        if case is Case.VOTER_BELOW:
            hi = t.tau_v
        else:
            lo = t.tau_v
    return GenericEquilibrium(
        lam=float(lam),
        r_hat=r_hat,
        pool_lo=lo,
        pool_hi=hi,
        tau_v=t.tau_v,
        tau_m=t.tau_m,
        case=case,
        closed=closed,
    )


def _check_state(p: ModelParams, theta: float) -> None:
    if not -p.phi <= theta <= p.phi:
        raise DomainError(f"theta={theta} outside state space [{-p.phi}, {p.phi}]")


def reporting_rule(p: ModelParams, theta: float, q: PolicyPair) -> float:
    _check_state(p, theta)
    return generic_equilibrium(p, q).report(theta)


def generic_rule(p: ModelParams, theta: float, q: PolicyPair, lam: float) -> float:
    _check_state(p, theta)
    return generic_equilibrium(p, q, lam).report(theta)


def ballot(p: ModelParams, r: float, q: PolicyPair) -> Candidate:
    return I if generic_equilibrium(p, q).elects_incumbent(r) else C


def classify_many(p: ModelParams, theta, q: PolicyPair, lam: float | None = None) -> dict:
    """Vectorised play of the communication subgame over an array of states."""
    eq = generic_equilibrium(p, q, lam)
    theta = np.asarray(theta, dtype=float)
    report = np.asarray(eq.report(theta))
    elects_i = np.asarray(eq.elects_incumbent(report))
    endorses_i = theta > eq.tau_m
    lo, hi = conflict_set(p, q)
    in_conflict = (theta > lo) & (theta < hi)
    misreported = report != theta
    return {
        "report": report,
        "elects_incumbent": elects_i,
        "endorses_incumbent": endorses_i,
        "persuaded": in_conflict & (elects_i == endorses_i),
        "misreported": misreported,
        "outlet_cost": p.k * (report - theta) ** 2,
    }


def classify_outcome(
    p: ModelParams, theta: float, q: PolicyPair, lam: float | None = None
) -> ReportingOutcome:
    _check_state(p, theta)
    row = classify_many(p, np.array([theta]), q, lam)
    report = float(row["report"][0])
    return ReportingOutcome(
        theta=theta,
        report=report,
        ballot=I if row["elects_incumbent"][0] else C,
        misreported=bool(row["misreported"][0]),
        persuaded=bool(row["persuaded"][0]),
        outlet_cost=float(row["outlet_cost"][0]),
    )
