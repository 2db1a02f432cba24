import json
import subprocess
import sys
from pathlib import Path

import pytest

from exprnet.cli import main
from exprnet.formats import load_matrix, write_matrix
from exprnet.synthetic import latent_factor_matrix, regulator_network
from oracles import parse_dot

GOLDEN = Path(__file__).parent / "golden"
INPUTS = [GOLDEN / "inputs" / f"{n}.csv" for n in ("breast", "colon", "prostate1", "prostate2", "prostate3")]


@pytest.fixture
def small_csv(tmp_path):
    path = tmp_path / "small.csv"
    write_matrix(latent_factor_matrix(20, 6, seed=3), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_correlate_identical_columns(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text("sid,a,b\ns1,1,1\ns2,2,2\ns3,4,4\n")
    code, out, _ = run(capsys, "correlate", path)
    assert code == 0
    assert out.splitlines()[-1] == "1 pair ≥ 0.5"
    assert out.splitlines()[0] == "gene,a,b"


def test_correlate_writes_file(tmp_path, small_csv, capsys):
    out_path = tmp_path / "corr.csv"
    code, out, _ = run(capsys, "correlate", small_csv, "--out", out_path, "--signed")
    assert code == 0 and out.strip().endswith("≥ 0.5")
    assert len(out_path.read_text().splitlines()) == 7


def test_correlate_malformed_input(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("sid,a,b\ns1,1,x\ns2,2,2\ns3,4,4\n")
    code, out, err = run(capsys, "correlate", path)
    assert code == 2 and "ParseError" in err and out == ""


def test_correlate_bad_threshold(small_csv, capsys):
    code, _, err = run(capsys, "correlate", small_csv, "--threshold", "1.5")
    assert code == 2 and "threshold must be in (0,1]" in err


def test_select_all_strategies(tmp_path, small_csv, capsys):
    code, out, _ = run(capsys, "select", small_csv, "--all-strategies", "--out-dir", tmp_path / "out",
                       "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 8 and lines[-1] == "metric: LOOCV mse"
    assert (tmp_path / "out" / "report.csv").read_text() == "\n".join(lines[:7]) + "\n"
    files = sorted((tmp_path / "out" / "selections").iterdir())
    assert len(files) == 6
    doc = json.loads(files[0].read_text())
    assert len(doc["results"]) == 6 and {"target", "selected", "trace"} <= set(doc["results"][0])


def test_select_single_strategy_label(small_csv, capsys):
    code, out, _ = run(capsys, "select", small_csv, "--search", "sfs", "--ordering", "highest")
    assert code == 0
    rows = [ln for ln in out.splitlines() if ln.startswith("| Ensemble")]
    assert len(rows) == 1 and rows[0].startswith("| Ensemble method –SFS (highest) |")


def test_select_unknown_ordering(small_csv, capsys):
    code, _, err = run(capsys, "select", small_csv, "--ordering", "sideways")
    assert code == 2 and "usage:" in err


def test_select_options(small_csv, capsys):
    code, out, _ = run(capsys, "select", small_csv, "--search", "sbe", "--ordering", "lowest",
                       "--metric", "mae", "--max-subset", "2", "--threshold", "0.3")
    assert code == 0 and "SBE (lowest)" in out and out.endswith("metric: LOOCV mae\n")


def test_learn_all_evaluate(tmp_path, small_csv, capsys):
    code, out, _ = run(capsys, "learn", small_csv, "--model", "all", "--evaluate",
                       "--per-gene", tmp_path / "per_gene.csv")
    assert code == 0
    rows = [ln for ln in out.splitlines() if ln.startswith("| ") and "network |" in ln]
    assert [r.split(" | ")[0] for r in rows] == ["| Co-expression network", "| Bayesian network",
                                                "| Dependency network"]
    per_gene = (tmp_path / "per_gene.csv").read_text().splitlines()
    assert per_gene[0] == "gene,coexpression,bayesian,dependency" and len(per_gene) == 7


def test_learn_depnet_in_degree(tmp_path, capsys):
    m, _ = regulator_network(p=20, n=30, seed=2)
    path = tmp_path / "net.csv"
    write_matrix(m, path)
    code, _, _ = run(capsys, "learn", path, "--model", "depnet", "--parents", "5", "--json", tmp_path / "n.json")
    assert code == 0
    doc = json.loads((tmp_path / "n.json").read_text())
    targets = [e["target"] for e in doc["edges"]]
    assert all(targets.count(g) == 5 for g in doc["nodes"])


def test_learn_bayes_dot(tmp_path, small_csv, capsys):
    code, out, _ = run(capsys, "learn", small_csv, "--model", "bayes", "--dot", tmp_path / "out.dot")
    assert code == 0 and "directed cycle" in out
    gtype, _, nodes, edges = parse_dot((tmp_path / "out.dot").read_text())
    assert gtype == "digraph" and len(nodes) == 6 and len(edges) == 6


def test_learn_all_writes_one_file_per_model(tmp_path, small_csv, capsys):
    code, _, _ = run(capsys, "learn", small_csv, "--dot", tmp_path / "g.dot", "--json", tmp_path / "g.json")
    assert code == 0
    for model in ("coexpression", "bayesian", "dependency"):
        assert (tmp_path / f"g.{model}.dot").exists() and (tmp_path / f"g.{model}.json").exists()


def test_learn_bad_parents(small_csv, capsys):
    code, _, _ = run(capsys, "learn", small_csv, "--parents", "0")
    assert code == 2


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "learn", tmp_path / "nope.csv")
    assert code == 2 and "nope.csv" in err


@pytest.mark.parametrize("command", [[], ["correlate"], ["select"], ["learn"]])
def test_help_exits_zero(command, capsys):
    code, out, _ = run(capsys, *command, "--help")
    assert code == 0 and "--" in out


def test_internal_failure_exit_code(monkeypatch, small_csv, capsys):
    import exprnet.cli as cli

    def boom(*a, **k):
        raise RuntimeError("kaboom")
    monkeypatch.setattr(cli, "run_ensemble", boom)
    code, _, err = run(capsys, "select", small_csv)
    assert code == 3 and "kaboom" in err


def test_stdin_input(small_csv):
    proc = subprocess.run([sys.executable, "-m", "exprnet", "correlate", "-"], input=small_csv.read_bytes(),
                          capture_output=True)
    assert proc.returncode == 0
    assert proc.stdout.decode().splitlines()[-1].endswith("≥ 0.5")


def test_zscore_flag_runs(small_csv, capsys):
    code, out, _ = run(capsys, "learn", small_csv, "--model", "coexpr", "--zscore")
    assert code == 0 and out.startswith("Co-expression network:")


def test_commands_are_deterministic(tmp_path, small_csv, capsys):
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        run(capsys, "select", small_csv, "--all-strategies", "--out-dir", d)
        run(capsys, "learn", small_csv, "--dot", d / "g.dot", "--json", d / "g.json")
        outputs.append({p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()})
    assert outputs[0] == outputs[1] and len(outputs[0]) == 14


@pytest.mark.parametrize("fmt, golden", [("markdown", "strategies.md"), ("csv", "strategies.csv")])
def test_golden_strategy_table(capsys, fmt, golden):
    code, out, _ = run(capsys, "select", *INPUTS, "--all-strategies", "--format", fmt)
    assert code == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


@pytest.mark.parametrize("fmt, golden", [("markdown", "models.md"), ("csv", "models.csv")])
def test_golden_model_comparison(capsys, fmt, golden):
    code, out, _ = run(capsys, "learn", GOLDEN / "inputs" / "network20.csv", "--model", "all", "--evaluate",
                       "--format", fmt)
    assert code == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_golden_inputs_load():
    shapes = [load_matrix(p).values.shape for p in INPUTS]
    assert shapes == [(14, 209), (5, 98), (13, 86), (13, 20), (6, 20)]
