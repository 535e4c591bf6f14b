"""Primitives of the election game: parameters, payoffs, and indifference thresholds.

Everything downstream is a pure function of a :class:`ModelParams` and a
:class:`PolicyPair`. The state ``theta`` is the incumbent's relative quality,
uniform on ``[-phi, phi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

from .errors import DomainError


class Candidate(str, Enum):
    INCUMBENT = "i"
    CHALLENGER = "c"

    def __str__(self) -> str:
        return self.value


I = Candidate.INCUMBENT
C = Candidate.CHALLENGER


@dataclass(frozen=True)
class ModelParams:
    """Primitive tuple of the game.

    Attributes:
        phi_v: voter's bliss policy.
        phi_m: outlet's bliss policy (must be below ``phi_v``).
        gamma: weight of policy relative to quality.
        xi: outlet's gain when its endorsed candidate wins.
        phi: half-width of the state space.
        k: misreporting-cost intensity.
    """

    phi_v: float
    phi_m: float
    gamma: float
    xi: float
    phi: float
    k: float

    def with_k(self, k: float) -> ModelParams:
        return replace(self, k=float(k))

    @property
    def span(self) -> float:
        return self.phi_v - self.phi_m

    @property
    def k_bar(self) -> float:
        """Cost threshold above which the challenger stops offering ``phi_m``."""
        return self.xi / (self.gamma**2 * self.span**4)

    @property
    def eta(self) -> float:
        """Policy gap that leaves the outlet exactly at full persuasion."""
        return math.sqrt(self.xi / self.k) / (4.0 * self.gamma * self.span)

    @property
    def reach(self) -> float:
        """Largest profitable misreport distance, sqrt(xi/k)."""
        return math.sqrt(self.xi / self.k)

    @property
    def influential_bound(self) -> float:
        return 3.0 * self.gamma * self.span**2


class PolicyPair(NamedTuple):
    q_i: float
    q_c: float


class Thresholds(NamedTuple):
    tau_v: float
    tau_m: float


def validate_params(p: ModelParams) -> None:
    """Raise :class:`DomainError` naming the first violated invariant."""
    for name in ("phi_v", "phi_m", "gamma", "xi", "phi", "k"):
        if not math.isfinite(getattr(p, name)):
            raise DomainError(f"{name} must be finite, got {getattr(p, name)!r}")
    if not p.phi_m < p.phi_v:
        raise DomainError(
            f"bliss ordering violated: need phi_m < phi_v, got phi_m={p.phi_m}, phi_v={p.phi_v}"
        )
    for name in ("gamma", "xi", "k"):
        if getattr(p, name) <= 0:
            raise DomainError(f"{name} must be positive, got {getattr(p, name)}")
    if p.phi < p.influential_bound:
        raise DomainError(
            f"influential bound violated: phi={p.phi} < 3*gamma*(phi_v-phi_m)^2="
            f"{p.influential_bound}"
        )


def voter_utility(p: ModelParams, b: Candidate, theta: float, q: PolicyPair) -> float:
    policy = q.q_i if b is I else q.q_c
    return -p.gamma * (p.phi_v - policy) ** 2 + (theta if b is I else 0.0)


def thresholds(p: ModelParams, q: PolicyPair) -> Thresholds:
    gap = q.q_c - q.q_i
    return Thresholds(
        tau_v=p.gamma * (2.0 * p.phi_v - q.q_c - q.q_i) * gap,
        tau_m=p.gamma * (2.0 * p.phi_m - q.q_c - q.q_i) * gap,
    )


def endorsed_candidate(p: ModelParams, theta: float, q: PolicyPair) -> Candidate:
    # the boundary state theta == tau_m endorses the challenger
    return I if theta > thresholds(p, q).tau_m else C


def outlet_utility(
    p: ModelParams, r: float, b: Candidate, theta: float, q: PolicyPair
) -> float:
    gain = p.xi if b is endorsed_candidate(p, theta, q) else 0.0
    return gain - p.k * (r - theta) ** 2


def conflict_set(p: ModelParams, q: PolicyPair) -> tuple[float, float]:
    """Open interval of states where voter and outlet disagree.

    Returned as ``(lo, hi)``; the interval is empty when ``lo == hi``.
    """
    t = thresholds(p, q)
    return (min(t.tau_v, t.tau_m), max(t.tau_v, t.tau_m))


def full_persuasion_threshold(p: ModelParams, q: PolicyPair) -> float:
    """Largest ``k`` at which the outlet persuades in every conflict state.

    Returns ``math.inf`` when the proposals coincide.
    """
    t = thresholds(p, q)
    gap2 = (t.tau_v - t.tau_m) ** 2
    if gap2 == 0.0:  # also catches underflow of a tiny gap
        return math.inf
    return p.xi / (4.0 * gap2)


def full_persuasion_condition(p: ModelParams, q: PolicyPair) -> bool:
    lhs = (q.q_c - q.q_i) ** 2
    rhs = p.xi / (16.0 * p.gamma**2 * (p.phi_m - p.phi_v) ** 2 * p.k)
    return lhs <= rhs
