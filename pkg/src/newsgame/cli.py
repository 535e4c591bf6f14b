"""Command-line front end: TOML configuration in, CSV or JSON-lines tables out.

Exit codes: 0 success, 1 a verification check failed, 2 bad configuration,
3 the model is undefined at the requested inputs or a search failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .communication import pooling_structure
from .errors import ConfigError, DomainError, SearchError
from .model import ModelParams, PolicyPair, thresholds, validate_params
from .oracle import verify_equilibrium
from .policy import equilibrium_policies
from .simulate import SimulationConfig, simulate
from .welfare import (
    K_MAX,
    NuExtensionParams,
    challenger_regulation,
    incumbent_regulation,
    iota,
    iota_hat,
    log_grid,
    nu_extension_optimum,
    welfare,
)

P0 = {"phi_v": 1.0, "phi_m": 0.0, "gamma": 1.0, "xi": 1.0, "phi": 4.0}
VERIFY_MULTIPLES = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 100.0)


@dataclass(frozen=True)
class SweepRecord:
    k: float
    q_i_star: float
    q_c_star: float
    tau_v: float
    tau_m: float
    r_star: float
    chi: float
    iota: float
    welfare: float
    regime: str


SWEEP_COLUMNS = [f.name for f in fields(SweepRecord)]
REGULATE_COLUMNS = ["record", "k", "iota", "iota_hat"]

# allowed keys per section, with the expected python types
SCHEMA = {
    "model": {"phi_v": float, "phi_m": float, "gamma": float, "xi": float, "phi": float, "k": float},
    "sweep": {
        "k_min": float, "k_max": float, "n": int, "spacing": str, "k": list, "row_errors": bool,
    },
    "simulate": {
        "n_draws": int, "seed": int, "threads": int,
        "lambda_override": float, "policy_override": list,
    },
    "regulate": {"k_max": float, "n_grid": int, "curve_points": int, "nu": dict},
    "regulate.nu": {"y": float, "x": float, "k_v": float, "sigma": float},
    "verify": {"k": list, "k_multiples": list, "step": float, "tol": float, "perturb": float},
}


# ---------------------------------------------------------------- config

def _check_type(path: str, value, want):
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", path)
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return value
    if not isinstance(value, want):
        raise ConfigError(f"expected {want.__name__}, got {value!r}", path)
    return value


def _check_section(name: str, table) -> dict:
    if not isinstance(table, dict):
        raise ConfigError("expected a table", name)
    allowed = SCHEMA[name]
    out = {}
    for key, value in table.items():
        path = f"{name}.{key}"
        if key not in allowed:
            raise ConfigError("unknown key", path)
        if allowed[key] is dict:
            out[key] = _check_section(path, value)
        else:
            out[key] = _check_type(path, value, allowed[key])
    return out


def _number_list(path: str, values) -> list[float]:
    return [_check_type(f"{path}[{j}]", v, float) for j, v in enumerate(values)]


def parse_config(text: str) -> dict:
    """Parse and type-check configuration text; unknown sections or keys are errors."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML ({exc})") from exc
    cfg = {}
    for section, table in raw.items():
        if section not in SCHEMA or "." in section:
            raise ConfigError("unknown section", section)
        cfg[section] = _check_section(section, table)
    return cfg


def load_config(path: str | None) -> dict:
    if path is None:
        return {"model": dict(P0)}
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode("utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config ({exc.strerror})", path) from exc
    return parse_config(text)


def model_from_config(cfg: dict, need_k: bool = False) -> ModelParams:
    """Build and validate the model primitives; ``k`` defaults to ``k_bar`` unless required."""
    if "model" not in cfg:
        raise ConfigError("missing section", "model")
    m = cfg["model"]
    for key in P0:
        if key not in m:
            raise ConfigError("missing field", f"model.{key}")
    if need_k and "k" not in m:
        raise ConfigError("missing field", "model.k")
    base = ModelParams(m["phi_v"], m["phi_m"], m["gamma"], m["xi"], m["phi"], 1.0)
    validate_params(base)
    p = base.with_k(m.get("k", base.k_bar))
    validate_params(p)
    return p


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        value, where = flag, "--threads"
    else:
        env = os.environ.get("NEWSGAME_THREADS")
        if env is None:
            return 1
        try:
            value, where = int(env), "NEWSGAME_THREADS"
        except ValueError as exc:
            raise ConfigError(f"expected an integer, got {env!r}", "NEWSGAME_THREADS") from exc
    if value < 1:
        raise ConfigError(f"must be at least 1, got {value}", where)
    return value


# ---------------------------------------------------------------- output

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def format_table(rows: list[dict], columns: list[str], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
    else:
        for row in rows:
            buf.write(json.dumps({c: row.get(c) for c in columns}, allow_nan=False) + "\n")
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def read_table(text: str, fmt: str) -> list[dict]:
    """Inverse of :func:`format_table` (numbers come back as floats)."""
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        return [dict(zip(header, map(_parse_cell, row))) for row in reader]
    out = []
    for line in text.splitlines():
        if line.strip():
            row = json.loads(line)
            out.append({c: float(v) if isinstance(v, int) and not isinstance(v, bool) else v
                        for c, v in row.items()})
    return out


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------- commands

def sweep_record(p: ModelParams) -> SweepRecord:
    validate_params(p)
    prof = equilibrium_policies(p)
    t = thresholds(p, prof.q)
    w = welfare(p)
    return SweepRecord(
        k=p.k,
        q_i_star=prof.q.q_i,
        q_c_star=prof.q.q_c,
        tau_v=t.tau_v,
        tau_m=t.tau_m,
        r_star=prof.pooling.r_star,
        chi=w.persuasion_rate,
        iota=w.incumbent_win_prob,
        welfare=w.welfare,
        regime=prof.regime.value,
    )


def sweep_grid(cfg: dict) -> list[float]:
    s = cfg.get("sweep", {})
    if "k" in s:
        if any(key in s for key in ("k_min", "k_max", "n", "spacing")):
            raise ConfigError("give either an explicit k list or a grid, not both", "sweep.k")
        ks = _number_list("sweep.k", s["k"])
        if not ks:
            raise ConfigError("empty k list", "sweep.k")
        return sorted(ks)
    for key in ("k_min", "k_max", "n"):
        if key not in s:
            raise ConfigError("missing field", f"sweep.{key}")
    if s["n"] < 1:
        raise ConfigError("must be at least 1", "sweep.n")
    spacing = s.get("spacing", "log")
    if spacing == "log":
        if not 0 < s["k_min"] <= s["k_max"]:
            raise ConfigError("log spacing needs 0 < k_min <= k_max", "sweep.k_min")
        return list(log_grid(s["k_min"], s["k_max"], s["n"]))
    if spacing == "linear":
        if not s["k_min"] <= s["k_max"]:
            raise ConfigError("need k_min <= k_max", "sweep.k_min")
        return list(np.linspace(s["k_min"], s["k_max"], s["n"]))
    raise ConfigError(f"expected 'log' or 'linear', got {spacing!r}", "sweep.spacing")


def run_sweep(cfg: dict, threads: int = 1) -> tuple[list[dict], list[str]]:
    p = model_from_config(cfg)
    ks = [float(k) for k in sweep_grid(cfg)]
    row_errors = cfg.get("sweep", {}).get("row_errors", False)

    def one(k):
        try:
            return vars(sweep_record(p.with_k(k)))
        except DomainError as exc:
            if not row_errors:
                raise
            return {"k": k, "error": str(exc)}

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, ks))
    else:
        rows = [one(k) for k in ks]
    columns = SWEEP_COLUMNS + (["error"] if row_errors else [])
    return rows, columns


def run_equilibrium(cfg: dict) -> tuple[list[dict], list[str]]:
    p = model_from_config(cfg, need_k=True)
    row = vars(sweep_record(p))
    pool = pooling_structure(p, PolicyPair(row["q_i_star"], row["q_c_star"]))
    row.update(pool_lo=pool.pool_lo, pool_hi=pool.pool_hi, case=pool.case.value, k_bar=p.k_bar)
    return [row], SWEEP_COLUMNS + ["pool_lo", "pool_hi", "case", "k_bar"]


def run_verify(cfg: dict) -> tuple[list[dict], list[str], bool, str]:
    p = model_from_config(cfg)
    v = cfg.get("verify", {})
    if "k" in v and "k_multiples" in v:
        raise ConfigError("give either k or k_multiples, not both", "verify.k")
    if "k" in v:
        ks = _number_list("verify.k", v["k"])
        where = "verify.k"
    else:
        ks = [m * p.k_bar for m in _number_list("verify.k_multiples", v.get("k_multiples", VERIFY_MULTIPLES))]
        where = "verify.k_multiples"
    if not ks:
        raise ConfigError("empty k list", where)
    step, tol, perturb = v.get("step", 1e-3), v.get("tol", 1e-6), v.get("perturb", 0.0)
    if not 0 < step < 1:
        raise ConfigError("must lie in (0, 1)", "verify.step")
    rows, text, ok = [], [], True
    for k in sorted(ks):
        pk = p.with_k(k)
        validate_params(pk)
        profile = None
        if perturb:
            q = equilibrium_policies(pk).q
            q_i = min(pk.phi_v, max(pk.phi_m, q.q_i + perturb))
            profile = PolicyPair(q_i, q.q_c)
        rep = verify_equilibrium(pk, step=step, tol=tol, profile=profile)
        ok &= rep.passed
        text.append(f"k={k:.6g}  {'PASS' if rep.passed else 'FAIL'}\n{rep.render()}")
        for c in rep.checks:
            rows.append({
                "k": k, "check": c.name, "passed": c.passed,
                "max_violation": c.max_violation, "tolerance": c.tolerance, "location": c.location,
            })
    columns = ["k", "check", "passed", "max_violation", "tolerance", "location"]
    return rows, columns, ok, "\n".join(text) + "\n"


def run_simulate(cfg: dict, seed: int | None, threads: int) -> tuple[list[dict], list[str]]:
    p = model_from_config(cfg, need_k=True)
    s = cfg.get("simulate", {})
    seed = s.get("seed", 0) if seed is None else seed
    policy = s.get("policy_override")
    if policy is not None:
        vals = _number_list("simulate.policy_override", policy)
        if len(vals) != 2:
            raise ConfigError("expected [q_i, q_c]", "simulate.policy_override")
        policy = PolicyPair(*vals)
    n = s.get("n_draws", 10**6)
    if n < 1:
        raise ConfigError("must be at least 1", "simulate.n_draws")
    if not 0 <= seed < 2**64:
        raise ConfigError("must be an unsigned 64-bit integer", "simulate.seed")
    sim = simulate(p, SimulationConfig(
        n_draws=n, seed=seed, lambda_override=s.get("lambda_override"),
        policy_override=policy, threads=threads,
    ))
    row = {"k": p.k, "seed": seed, **sim.as_dict()}
    return [row], list(row)


def run_regulate(cfg: dict) -> tuple[list[dict], list[str]]:
    p = model_from_config(cfg)
    r = cfg.get("regulate", {})
    k_max = r.get("k_max", K_MAX)
    n_pts = r.get("curve_points", 200)
    if n_pts < 2:
        raise ConfigError("must be at least 2", "regulate.curve_points")
    ext = None
    if "nu" in r:
        nu = r["nu"]
        for key in ("y", "x", "k_v", "sigma"):
            if key not in nu:
                raise ConfigError("missing field", f"regulate.nu.{key}")
        if nu["x"] <= 0 or nu["k_v"] <= 0 or nu["sigma"] <= 0:
            raise ConfigError("x, k_v and sigma must be positive", "regulate.nu")
        ext = NuExtensionParams(nu["y"], nu["x"], nu["k_v"], nu["sigma"])

    def row(record, k):
        return {"record": record, "k": k, "iota": iota(p, k),
                "iota_hat": iota_hat(p, k, ext) if ext else None}

    k_i, _ = incumbent_regulation(p, k_max=k_max)
    k_c, _ = challenger_regulation(p, k_max=k_max, n_grid=r.get("n_grid", 2000))
    rows = [row("incumbent_optimum", k_i), row("challenger_optimum", k_c)]
    if ext is not None:
        k_nu, _ = nu_extension_optimum(p, ext)
        rows.append(row("nu_optimum", k_nu))
    rows += [row("curve", float(k)) for k in log_grid(1e-2 * p.k_bar, min(k_max, 1e3 * p.k_bar), n_pts)]
    return rows, REGULATE_COLUMNS


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML configuration file")
    common.add_argument("--out", metavar="PATH", help="write the table here instead of stdout")
    common.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (fallback: NEWSGAME_THREADS, then 1)")
    parser = argparse.ArgumentParser(prog="newsgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="equilibrium statistics over a k grid")
    sub.add_parser("verify", parents=[common], help="brute-force equilibrium checks")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo play at model.k")
    sim.add_argument("--seed", type=int, default=None)
    sub.add_parser("regulate", parents=[common], help="regulators' preferred cost intensity")
    sub.add_parser("equilibrium", parents=[common], help="equilibrium at model.k")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        threads = resolve_threads(args.threads)
        status = 0
        if args.command == "sweep":
            rows, cols = run_sweep(cfg, threads)
        elif args.command == "equilibrium":
            rows, cols = run_equilibrium(cfg)
        elif args.command == "simulate":
            rows, cols = run_simulate(cfg, args.seed, threads)
        elif args.command == "regulate":
            rows, cols = run_regulate(cfg)
        else:
            rows, cols, ok, text = run_verify(cfg)
            (sys.stderr if args.out is None else sys.stdout).write(text)
            status = 0 if ok else 1
        bad = [r["k"] for r in rows if any(isinstance(v, float) and not math.isfinite(v) for v in r.values())]
        if bad:
            raise DomainError(f"non-finite values in output at k={bad[0]}")
        emit(format_table(rows, cols, args.format), args.out)
        return status
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
