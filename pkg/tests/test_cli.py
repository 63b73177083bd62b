import json
import subprocess
import sys

import pytest

from besselcy import fixtures
from besselcy.cli import main
from besselcy.sequences import recurrence_from_json
from besselcy.theta import operator_from_json, parse_operator


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_annihilator_text(capsys):
    code, out, _ = run(capsys, "annihilator", "--base", "K0", "--m", "4", "--format", "text")
    assert code == 0
    assert parse_operator(out.strip()) == parse_operator(
        "theta^5 - 4*x^2*(theta+1)*(5*theta^2+10*theta+8) + 64*x^4*(theta+2)"
    )


def test_annihilator_json_round_trip(capsys):
    code, out, _ = run(capsys, "annihilator", "--base", "S", "--m", "3", "--format", "json")
    text = run(capsys, "annihilator", "--base", "S", "--m", "3")[1]
    assert code == 0
    assert operator_from_json(json.loads(out)["operator"]) == parse_operator(text.strip())


def test_moment_rec_json(capsys):
    code, out, _ = run(capsys, "moment-rec", "--m", "5", "--format", "json")
    assert code == 0
    assert recurrence_from_json(json.loads(out)["recurrence"]) == fixtures.load_recurrence("moment_rec_m5")


def test_mirror_34(capsys):
    code, out, _ = run(capsys, "mirror", "--m", "5", "--r", "15", "--c", "900")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("PASS")
    assert parse_operator(lines[1]) == fixtures.load_operator("mirror_m5")


def test_mirror_reports_misprint(capsys):
    code, out, _ = run(capsys, "mirror", "--m", "6", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "PASS"
    assert [(d["x_power"], d["kind"]) for d in data["misprints"]] == [(3, "factor")]


def test_mirror_wrong_scale_fails(capsys):
    code, out, _ = run(capsys, "mirror", "--m", "5", "--r", "15", "--c", "30")
    assert code == 1 and out.startswith("FAIL")


def test_verrill(capsys):
    code, out, _ = run(capsys, "verrill", "--m", "6", "--N", "10")
    values = [int(line.split("\t")[1]) for line in out.splitlines()]
    assert code == 0 and len(values) == 11
    assert values[:4] == [1, 6, 66, 996]


def test_verrill_ode_and_d_ode(capsys):
    a = run(capsys, "verrill-ode", "--m", "4")[1]
    b = run(capsys, "d-ode", "--m", "4", "--r", "4")[1].splitlines()[0]
    assert parse_operator(a.strip()) == parse_operator(b) == fixtures.load_operator("d_ode_m4")


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "--m", "4", "--init", "1,4", "--N", "3")
    assert code == 0
    assert [line.split("\t")[1] for line in out.splitlines()] == ["1", "4", "28", "256"]


def test_apery_limit(capsys):
    code, out, _ = run(capsys, "apery-limit", "--m", "4", "--N", "200", "--prec", "30")
    assert code == 0 and out.startswith("PASS")
    assert "0.35059993008821499990825696" in out


def test_asympt(capsys):
    code, out, _ = run(capsys, "asympt", "--m", "4", "--n-lo", "100", "--n-hi", "200", "--format", "json")
    data = json.loads(out)
    assert code == 0 and abs(float(data["lambda"]) - 16) < 1e-4


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--m", "1", "--k", "0", "--prec", "20", "--quad-level", "4")
    assert code == 0 and out.startswith("c_1,0 = 1.5707963267948966192")


def test_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0 and out.splitlines()[0] == "PASS: 14 printed equations"


def test_fan_and_report(capsys):
    code, out, _ = run(capsys, "fan", "--m", "2", "--no-numeric")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "report", "--m", "5", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "PASS"


@pytest.mark.parametrize("argv", [
    ["annihilator", "--m", "0"],
    ["annihilator", "--m", "2", "--base", "J0"],
    ["mirror", "--m", "5", "--c", "0"],
    ["solve", "--m", "4", "--init", "1", "--N", "3"],
    ["moments", "--m", "2", "--k", "1", "--quad-level", "20"],
    ["report", "--m", "1"],
    ["verrill", "--m", "3", "--N", "-1"],
    ["no-such-command"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 2
    assert capsys.readouterr().err


def test_output_is_byte_identical_across_runs():
    argv = [sys.executable, "-m", "besselcy", "report", "--m", "3", "--format", "json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["verdict"] == "PASS"
