from importlib.resources import files
from pathlib import Path

import numpy as np
import pytest

from drdga import ConfigError, parse_config
from drdga.cli import main, run_experiment

FIG7_CFG = str(files("drdga") / "configs" / "fig7.cfg")
QUAD_CFG = str(files("drdga") / "configs" / "quadratic_m5.cfg")


def write_cfg(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


MINIMAL_QUAD = """
[problem]
family = quadratic
m = 2
p = 1
dims = 1 1
seed = 3
tau_min = 1.0

[graph]
seed = 1

[run]
q = 8
t_max = 20
epsilon = 0.5
"""


def test_bundled_fig7_parses_to_paper_settings():
    exp = parse_config(FIG7_CFG)
    assert exp.algorithm == "drdga"
    assert exp.problem.m == 3 and exp.problem.p == 2
    assert [a.objective.weight for a in exp.problem.agents] == [1.0, 1.0, 0.5]
    assert all(a.gamma == 1.0 for a in exp.problem.agents)
    assert exp.run.q == 4.0 and exp.run.epsilon == 0.01 and exp.run.t_max == 5000
    assert exp.seq.m == 3 and exp.seq.window == 1 and len(exp.seq.rounds) == 20


def test_bundled_quadratic_parses():
    exp = parse_config(QUAD_CFG)
    assert exp.problem.m == 5 and exp.problem.p == 3
    assert exp.run.t_max == 10000


def test_small_q_rejected_with_minimum(tmp_path):
    text = Path(FIG7_CFG).read_text().replace("q = 4", "q = 1")
    path = write_cfg(tmp_path, text, name="fig7_q1.cfg")
    with pytest.raises(ConfigError, match="minimum q = 4"):
        parse_config(path)


def test_q_rule_rejected_for_quadratic_family(tmp_path):
    path = write_cfg(tmp_path, MINIMAL_QUAD.replace("q = 8", "q = 1"))
    with pytest.raises(ConfigError, match="minimum q"):
        parse_config(path)


def test_unknown_algorithm_lists_choices(tmp_path):
    path = write_cfg(tmp_path, "[experiment]\nalgorithm = sgd\n" + MINIMAL_QUAD)
    with pytest.raises(ConfigError, match="drdga, cdda"):
        parse_config(path)


def test_unknown_section_and_field_rejected(tmp_path):
    path = write_cfg(tmp_path, MINIMAL_QUAD + "\n[extra]\nfoo = 1\n")
    with pytest.raises(ConfigError, match="extra"):
        parse_config(path)
    path = write_cfg(tmp_path, MINIMAL_QUAD.replace("tau_min = 1.0", "tau = 1.0"))
    with pytest.raises(ConfigError, match="problem.tau"):
        parse_config(path)


def test_missing_and_mistyped_fields_are_named(tmp_path):
    path = write_cfg(tmp_path, MINIMAL_QUAD.replace("family = quadratic", ""))
    with pytest.raises(ConfigError, match="problem.family"):
        parse_config(path)
    path = write_cfg(tmp_path, MINIMAL_QUAD.replace("p = 1", "p = one"))
    with pytest.raises(ConfigError, match="problem.p"):
        parse_config(path)
    path = write_cfg(tmp_path, MINIMAL_QUAD.replace("[run]\nq = 8", "[run]\n"))
    with pytest.raises(ConfigError, match="run.q"):
        parse_config(path)
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "nope.cfg")


def test_graph_file_mode(tmp_path):
    edges = tmp_path / "edges.txt"
    edges.write_text("1>2\n2>1\n")
    cfg = MINIMAL_QUAD.replace("[graph]\nseed = 1", f"[graph]\nmode = file\npath = {edges.name}\nwindow = 2")
    path = write_cfg(tmp_path, cfg)
    exp = parse_config(path)
    assert exp.seq.edges(0) == frozenset({(1, 2)})
    assert exp.seq.edges(3) == frozenset({(2, 1)})
    assert exp.seq.window == 2


def test_graph_m_mismatch_rejected(tmp_path):
    path = write_cfg(tmp_path, MINIMAL_QUAD.replace("[graph]\nseed = 1", "[graph]\nm = 5"))
    with pytest.raises(ConfigError, match="graph.m"):
        parse_config(path)


def test_overrides_apply(tmp_path):
    path = write_cfg(tmp_path, MINIMAL_QUAD)
    exp = parse_config(path, algorithm="cdda", seed=99, t_max=7, epsilon=0.125)
    assert exp.algorithm == "cdda"
    assert exp.run.t_max == 7 and exp.run.epsilon == 0.125
    assert exp.seq.seed == 99
    # on a larger network the seed override produces a different pool
    base = parse_config(QUAD_CFG)
    reseeded = parse_config(QUAD_CFG, seed=99)
    assert base.seq.rounds != reseeded.seq.rounds


def test_theta0_parsing(tmp_path):
    cfg = MINIMAL_QUAD + "theta0 =\n    0.5\n    -0.5\n"
    exp = parse_config(write_cfg(tmp_path, cfg))
    assert np.array_equal(exp.run.theta0, [[0.5], [-0.5]])
    bad = MINIMAL_QUAD + "theta0 =\n    0.5 1.0\n"
    with pytest.raises(ConfigError, match="theta0"):
        parse_config(write_cfg(tmp_path, bad))


def test_run_experiment_writes_csv_and_summary(tmp_path):
    exp = parse_config(FIG7_CFG, t_max=10)
    out = tmp_path / "run.csv"
    reason, rows = run_experiment(exp, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "t,objective,gap,violation,violation_inst,disagreement,max_lambda,beta"
    assert len(lines) == 1 + len(rows) == 11
    summary = Path(str(out) + ".summary").read_text()
    assert "stop_reason = t_max" in summary
    assert "terminal_round = 10" in summary
    assert "f_star = " in summary and "empirical_D = " in summary
    assert "theorem2_bound = " in summary and "theorem3_bound = " in summary


def test_cli_tmax_two_rows(tmp_path, capsys):
    out = tmp_path / "two.csv"
    code = main(["run", "--config", FIG7_CFG, "--out", str(out), "--tmax", "2"])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3  # header + 2 data rows


def test_cli_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", FIG7_CFG, "--out", str(a), "--tmax", "30"]) == 0
    assert main(["run", "--config", FIG7_CFG, "--out", str(b), "--tmax", "30"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert Path(str(a) + ".summary").read_bytes() == Path(str(b) + ".summary").read_bytes()


def test_cli_algorithm_flag_changes_run(tmp_path):
    a, b = tmp_path / "d.csv", tmp_path / "c.csv"
    assert main(["run", "--config", FIG7_CFG, "--out", str(a), "--tmax", "10"]) == 0
    assert main(["run", "--config", FIG7_CFG, "--out", str(b), "--tmax", "10",
                 "--algorithm", "cdda"]) == 0
    assert a.read_bytes() != b.read_bytes()
    assert "algorithm = cdda" in Path(str(b) + ".summary").read_text()


def test_cli_config_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "missing.cfg"
    assert main(["run", "--config", str(missing), "--out", str(tmp_path / "x.csv")]) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    # Reference on an infeasible instance: one source on two links with
    # incompatible capacities forces x = 1 and x = 2 simultaneously.
    cfg = """
[problem]
family = num
routing =
    1
    1
capacities = 1 2

[run]
q = 4
"""
    path = write_cfg(tmp_path, cfg)
    assert main(["reference", "--config", path]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_reference_prints_solution(capsys):
    assert main(["reference", "--config", FIG7_CFG]) == 0
    out = capsys.readouterr().out
    assert "F* = 43.4587583412" in out
    assert "violation = " in out
