import json
import subprocess
import sys

import jsonschema
import pytest

from conftest import DATA
from kdvsing.cli import (
    ENV_OUTPUT_DIR,
    REPORT_SCHEMA,
    build_parser,
    main,
    resolve_config,
    results_bytes,
    run,
)
from kdvsing.errors import ConfigInvalid


def cfg_for(argv):
    return resolve_config(build_parser().parse_args(argv))


def report_for(argv):
    return run(cfg_for(argv))


def test_analyze_report(capsys):
    assert main(["analyze", "--q", "3", "--a", "1", "--b", "1", "--k", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, REPORT_SCHEMA)
    res = report["results"]
    assert res["label"] == "ConfinedOpen(7)"
    assert res["express"]["root"]["exact"] is True


def test_analyze_defaults_k_to_last_coordinate():
    cfg = cfg_for(["analyze", "--q", "4"])
    assert cfg["k"] == 5


def test_express_nonintegrable_factorization():
    res = report_for(["express", "--q", "5", "--regime", "nonintegrable"])["results"]
    assert res["polynomial"]["text"] == "λ^5 - λ^4 - 1"
    assert res["root"]["root"].startswith("1.3247179572")
    factors = {f["factor"] for f in res["factorization"]}
    assert factors == {"λ^2 - λ + 1", "λ^3 - λ - 1"}


def test_express_regime_follows_coefficients():
    assert cfg_for(["express", "--a", "2", "--b", "2"])["regime"] == "integrable"
    assert cfg_for(["express", "--a", "1", "--b", "2"])["regime"] == "nonintegrable"


def test_express_manual_pattern():
    pattern = json.dumps({"zero_offsets_prefix": [0, 3], "inf_offsets_prefix": [1, 2]})
    res = report_for(["express", "--pattern", pattern])["results"]
    assert res["polynomial"]["text"] == "λ^3 - λ^2 - λ + 1"


def test_dyndeg_report():
    res = report_for(["dyndeg", "--q", "3", "--a", "1", "--b", "2"])["results"]
    assert float(res["relative_gap"]) < 0.03
    assert res["express_root"] == "1.465571231877"


def test_degrees_report():
    res = report_for(["degrees", "--q", "3", "--a", "1", "--b", "2", "--mode", "generic_line", "--n", "2"])
    assert res["results"]["degrees"] == [3, 5]
    assert res["results"]["indices"] == [4, 5]


def test_lattice_from_file():
    res = report_for(["lattice", "--staircase", str(DATA / "one_one_corner_zero.json")])["results"]
    marks = {(d["m"], d["n"]): d["class"] for d in res["marks"]}
    assert marks == {(1, 1): "ZeroLike", (2, 1): "InfLike", (1, 2): "InfLike", (2, 2): "ZeroLike"}
    assert res["rendering"]["format"] == "ascii"


def test_lattice_case_reports_interaction():
    res = report_for(["lattice", "--case", "Case3", "--format", "svg"])["results"]
    assert [c["case"] for c in res["cases"]] == ["Case3"]
    assert res["rendering"]["text"].startswith("<svg")


def test_sweep_lists_both_hypersurfaces():
    res = report_for(["sweep", "--q-range", "2:3", "--a", "1", "--b", "1"])["results"]
    assert [(r["params"]["q"], r["hypersurface"], r["label"]) for r in res] == [
        (2, 2, "Cyclic(4)"),
        (2, 3, "ConfinedOpen(5)"),
        (3, 2, "Cyclic(6)"),
        (3, 4, "ConfinedOpen(7)"),
    ]


def test_sweep_parallel_matches_serial():
    serial = report_for(["sweep", "--q-range", "2:2", "--b", "3"])
    parallel = report_for(["sweep", "--q-range", "2:2", "--b", "3", "--workers", "2"])
    assert results_bytes(serial) == results_bytes(parallel)


def test_results_are_deterministic():
    argv = ["analyze", "--q", "2", "--a", "1", "--b", "7/5", "--seed", "3"]
    assert results_bytes(report_for(argv)) == results_bytes(report_for(argv))


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# reduction\nq = 3\n--a = 1\nb = 2   # nonintegrable\nk = 2\n")
    cfg = cfg_for(["analyze", "--config", str(conf), "--k", "4"])
    assert (cfg["q"], cfg["a"], cfg["b"], cfg["k"]) == (3, "1", "2", 4)


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = blue\n")
    with pytest.raises(ConfigInvalid) as info:
        cfg_for(["analyze", "--config", str(bad)])
    assert info.value.field == "colour"
    bad.write_text("q = three\n")
    with pytest.raises(ConfigInvalid):
        cfg_for(["analyze", "--config", str(bad)])
    with pytest.raises(ConfigInvalid):
        cfg_for(["analyze", "--config", str(tmp_path / "missing.conf")])


@pytest.mark.parametrize(
    "argv, field",
    [
        (["analyze", "--q", "3", "--k", "7"], "k"),
        (["analyze", "--a", "1.5"], "a"),
        (["analyze", "--b", "0"], "b"),
        (["express", "--tol", "-1"], "tol"),
        (["sweep", "--q-range", "5:2"], "q_range"),
        (["lattice"], "staircase"),
        (["degrees", "--n", "0"], "n"),
    ],
)
def test_invalid_configs(argv, field):
    with pytest.raises(ConfigInvalid) as info:
        cfg_for(argv)
    assert info.value.field == field


def test_exit_codes(capsys):
    assert main(["analyze", "--q", "3", "--k", "9"]) == 2
    assert "invalid configuration" in capsys.readouterr().err
    assert main(["express", "--pattern", json.dumps({"zero_offsets_prefix": [0], "inf_offsets_prefix": [0]})]) == 1
    assert "EmptyPattern" in capsys.readouterr().err


def test_output_file_and_env_dir(tmp_path, monkeypatch, capsys):
    out = tmp_path / "r.json"
    assert main(["express", "--q", "2", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["results"]["root"]["exact"] is True
    capsys.readouterr()
    monkeypatch.setenv(ENV_OUTPUT_DIR, str(tmp_path / "reports"))
    assert main(["lattice", "--case", "Case1"]) == 0
    path = capsys.readouterr().out.strip()
    assert path.startswith(str(tmp_path / "reports"))
    assert (tmp_path / "reports").joinpath(path.rsplit("/", 1)[1]).with_suffix(".txt").exists()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kdvsing.cli", "express", "--q", "3", "--regime", "nonintegrable"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["results"]["polynomial"]["text"] == "λ^3 - λ^2 - 1"
