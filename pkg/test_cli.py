#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试命令行入口

验证：
1. 报告写到 stdout，日志写到 stderr
2. 退出码：0 成功，2 判定为否，1 错误
3. 输入文件错误携带 路径:行:列
"""

import json

import pytest

from main import EXIT_ERROR, EXIT_FALSE, EXIT_OK, build_config, build_parser, main

BALANCED = "m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4"


def _run(capsys, argv):
    code = main(["--log-level", "WARNING"] + argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ============================================================
# 参数解析
# ============================================================

def test_build_config_splits_indices_and_weights():
    args = build_parser().parse_args(["power-check", "--indices", BALANCED, "gamma=1/10", "delta=0"])
    config = build_config(args)
    assert config.indices == {"m": "1", "n": "1", "p": "2", "q": "4", "alpha": "1/4", "beta": "1/4"}
    assert config.gamma == "1/10" and config.delta == "0"
    assert config.options == {}


def test_build_config_options_for_one_parameter_commands():
    args = build_parser().parse_args(["sw1", "--indices", "m=1,p=2,q=4,alpha=1/4", "gamma=0", "delta=0"])
    config = build_config(args)
    assert config.indices is None
    assert config.options["alpha"] == "1/4"


def test_build_config_collects_files(tmp_path):
    args = build_parser().parse_args([
        "characteristic", "--indices", BALANCED, "--sigma", "s.json", "--omega", "w.json", "--kind", "one-tailed",
    ])
    config = build_config(args)
    assert config.files == {"sigma": "s.json", "omega": "w.json"}
    assert config.options["kind"] == "one-tailed"


# ============================================================
# 退出码
# ============================================================

def test_classify_prints_report(capsys):
    code, out, _ = _run(capsys, ["classify", "--indices", BALANCED])
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["command"] == "classify"
    assert report["result"]["regime"] == "Balanced"
    assert report["config"]["indices"]["alpha"] == "1/4"


def test_power_check_true(capsys):
    code, out, _ = _run(capsys, ["power-check", "--indices", BALANCED, "gamma=0", "delta=0"])
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["result"]["finite"] is True
    assert report["decision"] is True


def test_power_check_false_exits_two(capsys):
    code, out, _ = _run(capsys, ["power-check", "--indices", "m=1,n=1,p=2,q=4,alpha=1/2,beta=1/2",
                                 "gamma=0", "delta=0"])
    assert code == EXIT_FALSE
    assert json.loads(out)["decision"] is False


def test_bad_index_literal_exits_one(capsys):
    code, out, err = _run(capsys, ["classify", "--indices", "m=1,n=1,p=2,q=4,alpha=1/4,beta=oops"])
    assert code == EXIT_ERROR
    assert out == ""
    assert "错误" in err


def test_index_out_of_domain_exits_one(capsys):
    code, _, err = _run(capsys, ["classify", "--indices", "m=1,n=1,p=1,q=4,alpha=1/4,beta=1/4"])
    assert code == EXIT_ERROR
    assert "错误" in err


def test_malformed_json_reports_location(capsys, tmp_path):
    bad = tmp_path / "sigma.json"
    bad.write_text('{"kind": "atomic",\n "atoms": [1, }', encoding="utf-8")
    code, _, err = _run(capsys, ["characteristic", "--indices", BALANCED,
                                 "--sigma", str(bad), "--omega", str(bad)])
    assert code == EXIT_ERROR
    assert f"{bad}:2:" in err


# ============================================================
# 文件输出
# ============================================================

def test_out_file_keeps_stdout_empty(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = _run(capsys, ["--out", str(target), "classify", "--indices", BALANCED])
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["result"]["regime"] == "Balanced"


def test_characteristic_on_atoms_with_csv(capsys, tmp_path):
    atoms = {"kind": "atomic", "dim": 2, "atoms": [[[0.5, 0.5], 1], [[0.75, 0.25], "1/2"]]}
    sigma = tmp_path / "sigma.json"
    sigma.write_text(json.dumps(atoms), encoding="utf-8")
    local = tmp_path / "local.csv"
    code, out, _ = _run(capsys, [
        "--k-min", "-2", "--k-max", "2", "--shifts", "1", "--shells", "8",
        "characteristic", "--indices", BALANCED, "--sigma", str(sigma), "--omega", str(sigma),
        "--kind", "two-tailed", "--csv", str(local),
    ])
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["result"]["kind"] == "two_tailed"
    assert report["result"]["sup_value"] > 0
    rows = local.read_text(encoding="utf-8").splitlines()
    assert rows[0].startswith("k_s,k_t")
    assert len(rows) == 1 + (3 * 5) ** 2


def test_apply_op_csv_round_trip(capsys, tmp_path):
    grid = tmp_path / "f.csv"
    grid.write_text("0,1,0,1\n1,1\n1,1\n", encoding="utf-8")
    code, out, _ = _run(capsys, ["--format", "csv", "apply-op", "--grid", str(grid),
                                 "--alpha", "1/2", "--beta", "1/2"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].split(",") == ["0.0", "1.0", "0.0", "1.0"]
    assert len(lines) == 3
    values = [float(v) for line in lines[1:] for v in line.split(",")]
    assert all(v > 0 for v in values)
    assert values == pytest.approx([values[0]] * 4)
