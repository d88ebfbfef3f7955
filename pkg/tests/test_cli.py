import json
import os
from pathlib import Path

import pytest

from crnkit.cli import main

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_COMMANDS = {
    "info_r1.txt": ["info", "--model", "r1"],
    "info_envz.txt": ["info", "--model", "envz-ompr"],
    "info_ross.txt": ["info", "--model", "ross-chain"],
    "info_wegscheider_irrev.json": ["info", "--model", "wegscheider-irrev", "--format", "json"],
    "db_wegscheider.txt": ["db", "--model", "wegscheider"],
    "db_wegscheider.json": ["db", "--model", "wegscheider", "--format", "json"],
    "acr_r1.txt": ["acr", "--model", "r1"],
    "acr_envz.json": ["acr", "--model", "envz-ompr", "--format", "json"],
    "acr_ross.txt": ["acr", "--model", "ross-chain"],
    "stationary_ross.json": ["stationary", "--model", "ross-chain", "--positive", "--format", "json"],
    "elementary_ops_count.txt": ["elementary", "--species", "ops16.formulas", "--count-only"],
    "elementary_water.txt": ["elementary", "--species", str(GOLDEN / "water.formulas")],
    "decompose_chain.txt": ["decompose", "--reactions", "A -> B, B -> C, B -> A", "--overall", "A -> C",
                            "--cycles", "--preprocess"],
    "ssa_decay.csv": ["ssa", "--reactions", "A -> B", "--rates", "1", "--initial", "5,0", "--seed", "3",
                      "--format", "csv"],
    "ssa_ensemble.json": ["ssa", "--reactions", "A -> B", "--rates", "1", "--initial", "100,0", "--runs", "20",
                          "--samples", "3", "--format", "json"],
    "ode_decay.csv": ["ode", "--reactions", "A -> B", "--rates", "1", "--initial", "1,0", "--samples", "3",
                      "--format", "csv"],
    "graph_pair.dot": ["graph", "--reactions", "A <-> B"],
}


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(GOLDEN_COMMANDS))
def test_golden_output(name, capsys):
    code, out, _ = run(GOLDEN_COMMANDS[name], capsys)
    assert code == 0
    path = GOLDEN / name
    if os.environ.get("CRNKIT_UPDATE_GOLDEN"):
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")


def test_output_is_byte_identical(capsys):
    argv = ["ssa", "--model", "lotka-volterra", "--method", "tau", "--runs", "8", "--samples", "5",
            "--seed", "11", "--format", "json"]
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first == second


def test_threads_do_not_change_results(capsys, monkeypatch):
    argv = ["ssa", "--reactions", "A -> B", "--rates", "1", "--initial", "50,0", "--runs", "12",
            "--samples", "4", "--seed", "5", "--format", "json"]
    _, serial, _ = run(argv + ["--threads", "1"], capsys)
    monkeypatch.setenv("CRNKIT_THREADS", "3")
    _, parallel, _ = run(argv, capsys)
    assert serial == parallel


def test_info_simple(capsys):
    code, out, _ = run(["info", "--reactions", "A -> B", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert (doc["N"], doc["L"], doc["S"], doc["deficiency"]) == (2, 1, 1, 0)


@pytest.mark.parametrize("model, delta", [("r1", 1), ("envz-ompr", 1), ("ross-chain", 0), ("wegscheider-irrev", 1)])
def test_deficiencies(model, delta, capsys):
    _, out, _ = run(["info", "--model", model, "--format", "json"], capsys)
    assert json.loads(out)["deficiency"] == delta


def test_db_condition(capsys):
    code, out, _ = run(["db", "--model", "wegscheider", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["circuit_conditions"] == [] and doc["cycle_count"] == 0
    assert [c["text"] for c in doc["forest_conditions"]] == ["k[2]*k[3] == k[1]*k[4]"]


def test_acr_envz_contains_yp(capsys):
    _, out, _ = run(["acr", "--model", "envz-ompr", "--format", "json"], capsys)
    assert "Yp" in json.loads(out)["robust_species"]


def test_ode_plot_data(tmp_path, capsys):
    target = tmp_path / "decay.dat"
    code, _, _ = run(["ode", "--reactions", "A -> B", "--rates", "1", "--initial", "1,0", "--samples", "3",
                      "--emit-plot-data", str(target)], capsys)
    assert code == 0
    rows = [line.split() for line in target.read_text().splitlines() if not line.startswith("#")]
    assert len(rows) == 3 and float(rows[-1][0]) == 1.0


def test_json_numbers_round_trip(capsys):
    _, out, _ = run(["ode", "--reactions", "A -> B", "--rates", "1", "--initial", "1,0", "--samples", "3",
                     "--format", "json"], capsys)
    doc = json.loads(out)
    _, csv, _ = run(["ode", "--reactions", "A -> B", "--rates", "1", "--initial", "1,0", "--samples", "3",
                     "--format", "csv"], capsys)
    assert float(csv.splitlines()[-1].split(",")[1]) == doc["states"][-1][0]


@pytest.mark.parametrize("argv, code", [
    (["info", "--reactions", "A ->> B"], 2),
    (["info"], 2),
    (["info", "--model", "no-such-model"], 2),
    (["info", "--bogus-flag"], 2),
    (["elementary", "--species", "missing.formulas"], 2),
    (["ode", "--reactions", "A -> B", "--rates", "1,2", "--initial", "1,0"], 2),
    (["db", "--model", "r1"], 3),
    (["ode", "--reactions", "A -> B", "--rates", "1", "--initial=-1,0"], 3),
    (["ode", "--reactions", "A -> B", "--rates", "1", "--initial", "1,0", "--t-end", "100",
      "--max-steps", "2"], 4),
    (["stationary", "--reactions", "0 -> A", "--rates", "1", "--starts", "2"], 4),
    (["decompose", "--reactions", "A -> B", "--overall", "B -> A"], 5),
])
def test_exit_codes(argv, code, capsys):
    got, _, err = run(argv, capsys)
    assert got == code
    assert err.startswith("crnkit") or "usage" in err


def test_infeasible_prints_certificate(capsys):
    _, _, err = run(["decompose", "--reactions", "A -> B", "--overall", "B -> A"], capsys)
    assert "certificate" in err
