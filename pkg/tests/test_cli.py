import math

import pytest

from newsgame.cli import (
    SWEEP_COLUMNS,
    format_table,
    main,
    parse_config,
    read_table,
    sweep_record,
)
from newsgame import ConfigError
from conftest import p0

MODEL = """
[model]
phi_v = 1.0
phi_m = 0.0
gamma = 1.0
xi = 1.0
phi = 4.0
"""


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(tmp_path, args, text=None, fmt="csv"):
    out = tmp_path / f"out.{fmt}"
    argv = list(args) + ["--out", str(out), "--format", fmt]
    if text is not None:
        argv += ["--config", write(tmp_path, text)]
    code = main(argv)
    body = out.read_text() if out.exists() else ""
    return code, body


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_sweep_log_grid_round_trips(tmp_path, fmt):
    cfg = MODEL + "[sweep]\nk_min = 0.01\nk_max = 100.0\nn = 200\nspacing = 'log'\n"
    code, body = run(tmp_path, ["sweep"], cfg, fmt)
    assert code == 0
    rows = read_table(body, fmt)
    assert len(rows) == 200
    ks = [r["k"] for r in rows]
    assert ks == sorted(ks)
    w = [r["welfare"] for r in rows]
    assert all(b >= a for a, b in zip(w, w[1:]))
    for row in rows[::37]:
        want = vars(sweep_record(p0(row["k"])))
        assert row == want
    assert list(rows[0]) == SWEEP_COLUMNS


def test_sweep_single_k_matches_closed_form(tmp_path):
    code, body = run(tmp_path, ["sweep"], MODEL + "[sweep]\nk = [4.0]\n")
    assert code == 0
    (row,) = read_table(body, "csv")
    assert row["q_i_star"] == pytest.approx(0.41789, abs=1e-5)
    assert row["q_c_star"] == pytest.approx(0.29289, abs=1e-5)
    assert row["chi"] == pytest.approx(0.03125, abs=1e-12)
    assert row["regime"] == "high"


def test_sweep_is_byte_deterministic(tmp_path):
    cfg = MODEL + "[sweep]\nk_min = 0.1\nk_max = 10.0\nn = 30\nspacing = 'linear'\n"
    _, a = run(tmp_path, ["sweep", "--threads", "1"], cfg)
    _, b = run(tmp_path, ["sweep", "--threads", "3"], cfg)
    assert a == b


def test_row_errors_reported_in_column(tmp_path):
    cfg = MODEL + "[sweep]\nk = [-1.0, 1.0]\nrow_errors = true\n"
    code, body = run(tmp_path, ["sweep"], cfg)
    assert code == 0
    bad, good = read_table(body, "csv")
    assert "k must be positive" in bad["error"] and bad["welfare"] is None
    assert good["error"] is None and good["welfare"] == pytest.approx(0.215087890625)


def test_row_error_aborts_without_flag(tmp_path):
    code, _ = run(tmp_path, ["sweep"], MODEL + "[sweep]\nk = [-1.0, 1.0]\n")
    assert code == 3


def test_influential_bound_violation_is_domain_error(tmp_path, capsys):
    code, _ = run(tmp_path, ["sweep"], MODEL.replace("4.0", "2.0") + "[sweep]\nk = [1.0]\n")
    assert code == 3
    assert "influential" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text, path",
    [
        (MODEL + "colour = 1\n", "model.colour"),
        (MODEL + "[plots]\nx = 1\n", "plots"),
        (MODEL.replace("xi = 1.0\n", ""), "model.xi"),
        (MODEL.replace("gamma = 1.0", "gamma = 'one'"), "model.gamma"),
        (MODEL + "[sweep]\nk_min = 1.0\n", "sweep.k_max"),
        (MODEL + "[sweep]\nk = [1.0]\nspacing = 'log'\n", "sweep.k"),
    ],
)
def test_config_errors_name_the_field(tmp_path, capsys, text, path):
    code, _ = run(tmp_path, ["sweep"], text)
    assert code == 2
    assert path in capsys.readouterr().err


def test_malformed_toml_is_config_error():
    with pytest.raises(ConfigError):
        parse_config("[model\nphi = ")


def test_missing_config_file(tmp_path):
    assert main(["sweep", "--config", str(tmp_path / "nope.toml")]) == 2


def test_equilibrium_needs_cost(tmp_path):
    assert run(tmp_path, ["equilibrium"], MODEL)[0] == 2
    code, body = run(tmp_path, ["equilibrium"], MODEL.replace("phi = 4.0", "phi = 4.0\nk = 0.5"))
    assert code == 0
    (row,) = read_table(body, "csv")
    assert row["q_i_star"] == pytest.approx(0.5 - math.sqrt(2) / 4, abs=1e-12)
    assert row["case"] == "voter-below"


def test_verify_default_list_passes(tmp_path):
    code, body = run(tmp_path, ["verify"], MODEL)
    assert code == 0
    rows = read_table(body, "csv")
    assert len(rows) == 7 * 5 and all(r["passed"] for r in rows)


def test_verify_perturbed_profile_fails(tmp_path):
    code, _ = run(tmp_path, ["verify"], MODEL + "[verify]\nk_multiples = [4.0]\nperturb = 0.05\n")
    assert code == 1


def test_verify_empty_list_is_config_error(tmp_path):
    assert run(tmp_path, ["verify"], MODEL + "[verify]\nk = []\n")[0] == 2


def test_simulate_seed_flag_and_threads_env(tmp_path, monkeypatch):
    cfg = MODEL.replace("phi = 4.0", "phi = 4.0\nk = 4.0") + "[simulate]\nn_draws = 50000\nseed = 1\n"
    _, a = run(tmp_path, ["simulate", "--seed", "7"], cfg, "jsonl")
    monkeypatch.setenv("NEWSGAME_THREADS", "2")
    _, b = run(tmp_path, ["simulate", "--seed", "7"], cfg, "jsonl")
    _, c = run(tmp_path, ["simulate"], cfg, "jsonl")
    assert a == b and a != c
    (row,) = read_table(a, "jsonl")
    assert row["seed"] == 7 and row["n_draws"] == 50000
    monkeypatch.setenv("NEWSGAME_THREADS", "lots")
    assert run(tmp_path, ["simulate"], cfg)[0] == 2


def test_regulate_records(tmp_path):
    cfg = MODEL + "[regulate]\ncurve_points = 5\n[regulate.nu]\ny = -0.006\nx = 0.2\nk_v = 10.0\nsigma = 6.0\n"
    code, body = run(tmp_path, ["regulate"], cfg)
    assert code == 0
    rows = {r["record"]: r for r in read_table(body, "csv") if r["record"] != "curve"}
    assert rows["incumbent_optimum"]["k"] == 0.25
    assert rows["challenger_optimum"]["k"] == pytest.approx(3.0, abs=0.1)
    assert rows["nu_optimum"]["k"] == pytest.approx(10.5, abs=0.2)
    sigma8 = cfg.replace("sigma = 6.0", "sigma = 8.0")
    code, body = run(tmp_path, ["regulate"], sigma8)
    rows = {r["record"]: r for r in read_table(body, "csv") if r["record"] != "curve"}
    assert rows["nu_optimum"]["k"] == pytest.approx(0.25, abs=0.05)


def test_format_table_round_trip_keeps_all_digits():
    rows = [{"k": 0.1 + 0.2, "regime": "mid", "x": 1 / 3}]
    for fmt in ("csv", "jsonl"):
        assert read_table(format_table(rows, ["k", "regime", "x"], fmt), fmt) == rows
