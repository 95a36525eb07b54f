import json

import pytest

from nps2.cli import parse_config, run
from nps2.schemes import Scheme


def _report(config):
    code = run(config)
    return code


def test_defaults():
    cfg = parse_config([])
    assert cfg.mode == "sweep"
    assert cfg.scheme is Scheme.NPS2_II
    assert cfg.n == 8
    assert cfg.field.m == 8
    assert cfg.field.reduction_poly == 0x11D
    assert cfg.field.generator == 0x02
    assert cfg.sessions == 1
    assert cfg.seed == 0


def test_odd_n_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        parse_config(["--scheme", "nps2-ii", "--n", "7"])
    assert exc.value.code == 2
    assert "even" in capsys.readouterr().err


def test_field_capacity_rejected(capsys):
    with pytest.raises(SystemExit):
        parse_config(["--scheme", "nps2-i", "--n", "300", "--field-m", "8"])
    assert "255" in capsys.readouterr().err


def test_malformed_hex_rejected(capsys):
    with pytest.raises(SystemExit):
        parse_config(["--field-poly", "0xzz"])
    assert "malformed hex" in capsys.readouterr().err


def test_fail_flag_validation(capsys):
    cfg = parse_config(["--fail", "1,3"])
    assert cfg.mode == "run"
    assert cfg.fail_paths == (1, 3)
    with pytest.raises(SystemExit):
        parse_config(["--fail", "1,99"])
    capsys.readouterr()
    with pytest.raises(SystemExit):
        parse_config(["--fail", "2,2"])
    capsys.readouterr()
    with pytest.raises(SystemExit):
        parse_config(["--fail", "1", "--fail-random", "2"])
    capsys.readouterr()
    with pytest.raises(SystemExit):
        parse_config(["--fail-random", "9", "--n", "4"])


def test_env_seed_fallback(monkeypatch):
    monkeypatch.setenv("NPS2_SEED", "12345")
    assert parse_config([]).seed == 12345
    assert parse_config(["--seed", "6"]).seed == 6
    monkeypatch.setenv("NPS2_SEED", "bogus")
    with pytest.raises(SystemExit):
        parse_config([])


def test_config_file_precedence(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"scheme": "nps2-i", "n": 6, "seed": 9}))
    cfg = parse_config(["--config", str(path)])
    assert cfg.scheme is Scheme.NPS2_I
    assert cfg.n == 6
    assert cfg.seed == 9
    cfg = parse_config(["--config", str(path), "--n", "4"])
    assert cfg.n == 4  # flag wins


def test_config_file_nested_field_object(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(
        json.dumps(
            {"n": 4, "field": {"m": 3, "reduction_poly": "b", "generator": "2"}}
        )
    )
    cfg = parse_config(["--config", str(path)])
    assert (cfg.field.m, cfg.field.reduction_poly, cfg.field.generator) == (3, 0xB, 2)
    cfg = parse_config(["--config", str(path), "--field-m", "8", "--field-poly",
                        "11d", "--field-gen", "2"])
    assert cfg.field.m == 8  # flags win over the nested object


def test_sweep_report(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    cfg = parse_config(["sweep", "--n", "8", "--report", str(report_path)])
    assert run(cfg) == 0
    report = json.loads(report_path.read_text())
    assert report["schedule_capacity"] == "6/8"
    assert report["complete_rate"] == 1.0
    assert report["all_complete"] is True
    assert len(report["results"]) == 1 + 8 + 28
    assert report["config"]["scheme"] == "nps2-ii"
    assert sum(report["scenario_histogram"].values()) == 37


def test_sweep_report_to_stdout(capsys):
    cfg = parse_config(["sweep", "--n", "4"])
    assert run(cfg) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["all_complete"] is True


def test_run_three_failures_nonzero_exit(tmp_path):
    report_path = tmp_path / "report.json"
    cfg = parse_config(
        ["run", "--n", "4", "--fail", "1,2,3", "--report", str(report_path)]
    )
    assert run(cfg) == 1
    report = json.loads(report_path.read_text())
    assert report["all_complete"] is False
    assert report["results"][0]["outcome"] == "unrecoverable"
    assert report["results"][0]["detail"]


def test_run_random_failures_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    for out in (out1, out2):
        cfg = parse_config(
            ["run", "--fail-random", "2", "--sessions", "3", "--seed", "5",
             "--report", str(out)]
        )
        assert run(cfg) == 0
    a = json.loads(out1.read_text())
    b = json.loads(out2.read_text())
    a.pop("generated_at"), b.pop("generated_at")
    assert a == b


def test_trace_ordering_and_stability(tmp_path):
    t1, t2 = tmp_path / "t1.jsonl", tmp_path / "t2.jsonl"
    for t in (t1, t2):
        cfg = parse_config(
            ["run", "--n", "6", "--fail", "2", "--sessions", "2", "--seed", "3",
             "--trace", str(t)]
        )
        run(cfg)
    assert t1.read_bytes() == t2.read_bytes()
    records = [json.loads(line) for line in t1.read_text().splitlines()]
    keys = [(r["session"], r["round"], r["path"]) for r in records]
    assert keys == sorted(keys)
    assert all(r["path"] != 2 for r in records)
    assert set(records[0]) == {"session", "round", "sender", "path", "kind", "payload_hex"}


def test_dump_schedule_text(capsys):
    cfg = parse_config(["dump-schedule", "--scheme", "nps2-ii", "--n", "4"])
    assert run(cfg) == 0
    lines = capsys.readouterr().out.splitlines()
    body = [line for line in lines if "->" in line]
    round1 = [line.split("|")[1].split()[0] for line in body]
    assert round1 == ["y_1^1", "y_2^1", "x_3^1", "x_4^1"]


def test_dump_schedule_json(capsys):
    cfg = parse_config(["dump-schedule", "--scheme", "nps2-i", "--n", "4", "--json"])
    assert run(cfg) == 0
    dump = json.loads(capsys.readouterr().out)
    assert dump["rounds"] == 4
    assert dump["matrix"][0] == ["y_1^1", "y_1^2", "y_1^3", "y_1^4"]
    assert dump["matrix"][2] == ["x_3^1", "x_3^2", "x_3^3", "x_3^4"]


def test_dump_rows(capsys):
    cfg = parse_config(
        ["dump-rows", "--n", "6", "--field-m", "3", "--field-poly", "b",
         "--field-gen", "2"]
    )
    assert run(cfg) == 0
    out = capsys.readouterr().out
    assert "row_sum:      1 1 1 1" in out
    assert "row_weighted: 1 2 4 3" in out


def test_dump_rows_json(capsys):
    cfg = parse_config(["dump-rows", "--n", "10", "--json"])
    assert run(cfg) == 0
    dump = json.loads(capsys.readouterr().out)
    assert dump["width"] == 8
    assert dump["row_weighted"] == ["01", "02", "04", "08", "10", "20", "40", "80"]


def test_mode_flags_without_command():
    assert parse_config(["--sweep"]).mode == "sweep"
    assert parse_config(["--dump-schedule"]).mode == "dump-schedule"
    assert parse_config(["--dump-rows"]).mode == "dump-rows"
    assert parse_config(["--fail-random", "1"]).mode == "run"


def test_unwritable_report_names_path(tmp_path, capsys):
    missing = tmp_path / "no-such-dir" / "report.json"
    cfg = parse_config(["sweep", "--n", "4", "--report", str(missing)])
    assert run(cfg) == 2
    assert str(missing) in capsys.readouterr().err
