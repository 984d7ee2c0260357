import csv
import json
import math
import os

import pytest

from greedy_entropy.cli import main
from greedy_entropy.experiments import (
    ConfigError,
    ExperimentConfig,
    exp_lp_example,
    exp_oga_bounds,
    exp_pde,
    exp_properties,
    exp_rbm_theorem2,
)
from greedy_entropy.svg import line_plot, read_data

SMALL = dict(instances=4, weak_seeds=2, dim_max=5, m_max=8, depth=5, greedy_depth=4, entropy_window="4,8",
             entropy_step=2, banach_instances=3, banach_dim_max=3, banach_m_max=4, banach_n_max=3,
             oga_instances=6, oga_dim_max=6, dict_max=10, nterm_instances=4, nterm_dim_max=4, nterm_dict_max=6,
             nterm_n_max=3, kfun_instances=2, relu_grid=40, relu_bias=20, relu_window="2,8", grid_n=49,
             snapshots=12, geo_grid_n=11, geo_snapshots=3, pairs=4, pde_entropy_n=2, recurrence_instances=8,
             recurrence_steps=50)


def small(**kw):
    return ExperimentConfig(**{**SMALL, **kw}).validate()


def test_config_text_format(tmp_path):
    cfg = small(seed=7, gamma=0.25)
    path = tmp_path / "c.cfg"
    cfg.save(path)
    text = path.read_text()
    assert "seed = 7\n" in text and "gamma = 0.25\n" in text
    assert ExperimentConfig.load(path) == cfg


def test_config_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig.loads("nonsense = 1")
    with pytest.raises(ConfigError):
        ExperimentConfig.loads("seed = x")
    with pytest.raises(ConfigError):
        ExperimentConfig.loads("seed = 1\nseed = 2")
    with pytest.raises(ConfigError):
        ExperimentConfig.loads("no equals sign")
    with pytest.raises(ConfigError):
        ExperimentConfig(gamma=1.5).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(p="1").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(alpha=0.5).validate()
    assert ExperimentConfig.loads("# comment\n\nseed = 3\n").seed == 3


def _recheck(verdict, tables):
    """Recompute a comparison verdict from the CSV rows alone."""
    op = verdict["operands"]
    if "lhs" not in op or "atol" not in op or "where" not in op:
        return None
    rows = tables[op["table"]]
    sel = [r for r in rows if all(r[k] == _cell(v) for k, v in op["where"].items())]
    bad = 0
    n = 0
    for r in sel:
        if r[op["lhs"]] == "" or r[op["rhs"]] == "":
            continue
        a, b = float(r[op["lhs"]]), float(r[op["rhs"]])
        n += 1
        if "rtol" in op:
            bad += a > b + op["rtol"] * abs(b) + op["atol"]
        else:
            bad += not abs(a - b) <= op["atol"]
    return n > 0 and bad == 0


def _cell(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


@pytest.mark.parametrize("runner", [exp_rbm_theorem2, exp_lp_example, exp_oga_bounds, exp_pde, exp_properties])
def test_verdicts_recomputable_from_csv(runner, tmp_path):
    rep = runner(small())
    paths = rep.write(str(tmp_path))
    tables = {}
    for p in paths:
        if p.endswith(".csv"):
            name = os.path.basename(p)[:-4]
            for key in rep.tables:
                if name in (key, f"{rep.prefix()}_{key}"):
                    with open(p) as fh:
                        tables[key] = list(csv.DictReader(fh))
    data = json.loads(open(os.path.join(tmp_path, f"{rep.prefix()}_report.json")).read())
    assert data["experiment"] == rep.experiment
    checked = 0
    for v in data["verdicts"]:
        again = _recheck(v, tables)
        if again is not None:
            assert again == v["passed"], v["id"]
            checked += 1
        assert v["id"] and v["inequality"] and v["operands"]
    assert checked > 0
    assert rep.errors == []


def test_small_hard_verdicts():
    for runner in (exp_rbm_theorem2, exp_oga_bounds, exp_pde, exp_properties):
        rep = runner(small())
        assert rep.passed, [v.id for v in rep.hard_failures()]


def test_cli_reproducible(tmp_path):
    cfg = tmp_path / "small.cfg"
    small().save(cfg)
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["oga-bounds", "--config", str(cfg), "--out", str(d), "-q"]) == 0
        outs.append(d)
    files = sorted(f for f in os.listdir(outs[0]) if f.endswith(".csv"))
    assert files
    for f in files:
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()


def test_cli_flags_override(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    small(seed=1).save(cfg)
    assert main(["pde", "--config", str(cfg), "--seed", "5", "--nmax", "4", "--gamma", "0.7", "--p", "3",
                 "--dump-config"]) == 0
    text = capsys.readouterr().out
    back = ExperimentConfig.loads(text)
    assert (back.seed, back.n_max, back.gamma, back.p, back.experiment) == (5, 4, 0.7, "3", "pde")


def test_cli_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("gamma = 7\n")
    assert main(["pde", "--config", str(cfg)]) == 2


def test_cli_failed_hard_verdict_exit_code(tmp_path):
    # an impossible slope target makes the entropy-rate verdict fail
    cfg = tmp_path / "c.cfg"
    small(alpha=50.0).save(cfg)
    assert main(["lp-example", "--config", str(cfg), "--out", str(tmp_path / "o"), "-q"]) == 1


def test_errors_become_verdicts():
    rep = exp_rbm_theorem2(small())
    with rep.stage("boom"):
        raise ValueError("broken")
    assert not rep.passed
    assert rep.errors[-1]["stage"] == "boom"


def test_svg_embeds_data():
    svg = line_plot([("a", [1, 2, 3], [1.0, 0.5, 0.25]), ("a bound", [1, 2], [2.0, 1.0])], "t", "n", "v")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    data = read_data(svg)
    assert data["a"] == [(1.0, 1.0), (2.0, 0.5), (3.0, 0.25)]
    assert "stroke-dasharray" in svg
    empty = line_plot([], "t")
    assert "<svg" in empty
    assert math.isfinite(len(empty))
