"""Seeded Monte Carlo play of the full game at a fixed cost intensity.

Random numbers come from numpy's Philox counter-based generator keyed by the
seed. Draw ``j`` is always the ``j``-th double of that stream, so the work is
cut into fixed-size shards that jump ahead with ``advance``; the summary is
bit-identical whatever the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .communication import classify_many, lambda_bounds
from .errors import DomainError
from .model import ModelParams, PolicyPair, validate_params
from .policy import equilibrium_policies, existence_condition

SHARD = 1 << 18  # draws per shard; a multiple of Philox's 4-word block
STATS = (
    "mean_voter_payoff",
    "incumbent_win_share",
    "persuasion_frequency",
    "misreport_frequency",
    "mean_outlet_cost",
)


@dataclass(frozen=True)
class SimulationConfig:
    n_draws: int
    seed: int
    lambda_override: float | None = None
    policy_override: PolicyPair | None = None
    threads: int = 1


@dataclass(frozen=True)
class SimulationSummary:
    mean_voter_payoff: float
    incumbent_win_share: float
    persuasion_frequency: float
    misreport_frequency: float
    mean_outlet_cost: float
    standard_errors: dict[str, float]
    n_draws: int = 0

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in STATS}
        out.update({f"se_{name}": self.standard_errors[name] for name in STATS})
        out["n_draws"] = self.n_draws
        return out


def _stream(seed: int, start: int) -> np.random.Generator:
    bits = np.random.Philox(key=seed)
    bits.advance(start // 4)
    return np.random.Generator(bits)


def _run_shard(p: ModelParams, q: PolicyPair, lam, seed: int, start: int, size: int):
    u = _stream(seed, start).random(size)
    theta = -p.phi + 2.0 * p.phi * u
    play = classify_many(p, theta, q, lam)
    elects_i = play["elects_incumbent"]
    payoff = np.where(
        elects_i,
        -p.gamma * (p.phi_v - q.q_i) ** 2 + theta,
        -p.gamma * (p.phi_v - q.q_c) ** 2,
    )
    cols = (
        payoff,
        elects_i.astype(float),
        play["persuaded"].astype(float),
        play["misreported"].astype(float),
        play["outlet_cost"],
    )
    return [(float(np.sum(c)), float(np.sum(c * c))) for c in cols]


def simulate(p: ModelParams, cfg: SimulationConfig) -> SimulationSummary:
    validate_params(p)
    if not existence_condition(p):
        raise DomainError("equilibrium existence condition fails for these parameters")
    if cfg.n_draws < 1:
        raise DomainError(f"n_draws must be at least 1, got {cfg.n_draws}")
    if not 0 <= cfg.seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {cfg.seed}")
    q = equilibrium_policies(p).q if cfg.policy_override is None else PolicyPair(*cfg.policy_override)
    if cfg.lambda_override is not None:
        lo, hi = sorted(lambda_bounds(p, q))
        if not lo <= cfg.lambda_override <= hi:
            raise DomainError(
                f"lambda_override={cfg.lambda_override} outside admissible range [{lo}, {hi}]"
            )

    n = int(cfg.n_draws)
    jobs = [(s, min(SHARD, n - s)) for s in range(0, n, SHARD)]

    def work(job):
        return _run_shard(p, q, cfg.lambda_override, cfg.seed, *job)

    if cfg.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(work, jobs))
    else:
        parts = [work(j) for j in jobs]

    means, ses = {}, {}
    for idx, name in enumerate(STATS):
        s = math.fsum(part[idx][0] for part in parts)
        ss = math.fsum(part[idx][1] for part in parts)
        mean = s / n
        var = max(0.0, (ss - s * mean) / (n - 1)) if n > 1 else 0.0
        means[name] = mean
        ses[name] = math.sqrt(var / n)
    return SimulationSummary(**means, standard_errors=ses, n_draws=n)
