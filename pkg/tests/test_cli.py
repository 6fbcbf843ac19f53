import json
import subprocess
import sys
from fractions import Fraction

import pytest

from nesslab.cli import main, parse_number
from nesslab.exact import Exact


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "text, value",
    [
        ("3/2", Fraction(3, 2)),
        ("0.25", Fraction(1, 4)),
        ("8*pi", Exact.pi_power(1, 8)),
        ("pi", Exact.pi_power(1)),
        ("1/3pi^2", Exact.pi_power(2, Fraction(1, 3))),
        ("-pi", Exact.pi_power(1, -1)),
        ("pi/3", Exact.pi_power(1, Fraction(1, 3))),
        ("2pi^2/4", Exact.pi_power(2, Fraction(1, 2))),
    ],
)
def test_parse_number(text, value):
    assert parse_number(text) == value


def test_spectrum_girardeau_ground_state(capsys):
    code, out, _ = run(capsys, "spectrum", "--N", "3", "--L", "3", "--window", "4")
    assert code == 0
    doc = json.loads(out)
    assert {"E": 0.0, "P": [0.0]} in [{"E": p["E"], "P": p["P"]} for p in doc["points"]]
    assert doc["meta"]["N"] == 3 and doc["meta"]["model"] == "girardeau"


def test_spectrum_hyl_two_mode_zero(capsys):
    code, out, _ = run(
        capsys, "spectrum", "--model", "hyl", "--N", "100", "--L", "100", "--a-tilde", "1",
        "--v", "1", "--raw-velocity",
    )
    assert code == 0
    pts = {p["label"]: p for p in json.loads(out)["points"]}
    assert pts["two_mode:50"]["E"] == 0.0 and pts["two_mode:60"]["E"] == -6.0


def test_mean_field_cloud_independent_of_coupling(capsys):
    clouds = []
    for a in ("1", "7/3"):
        code, out, _ = run(
            capsys, "spectrum", "--model", "mean-field", "--family", "free", "--N", "4",
            "--L", "5", "--a-tilde", a, "--window", "3",
        )
        assert code == 0
        clouds.append(json.loads(out)["points"])
    assert clouds[0] == clouds[1]


def test_spectrum_files(tmp_path, capsys):
    prefix = tmp_path / "run" / "g"
    code, _, err = run(capsys, "spectrum", "--N", "5", "--L", "5", "--window", "5", "--out", str(prefix))
    assert code == 0 and "wrote" in err
    assert json.loads((tmp_path / "run" / "g.json").read_text())["points"]
    assert (tmp_path / "run" / "g.csv").read_text().startswith("label,E,P,exact\n")


def sweep_doc(capsys, *argv):
    code, out, _ = run(capsys, "sweep", *argv)
    assert code == 0
    return json.loads(out)


def test_sweep_girardeau_ness_and_superfluid(capsys):
    v = sweep_doc(capsys, "--v", "1", "--nmax", "5", "--max-cascade", "3")["verdict"]
    assert v["is_ness"] and v["is_superfluid"] and v["in_window"]


def test_sweep_at_rest(capsys):
    v = sweep_doc(capsys, "--v", "0", "--nmax", "4", "--max-cascade", "2")["verdict"]
    assert not v["is_ness"] and v["is_superfluid"]


def test_sweep_hyl_outside_window(capsys):
    v = sweep_doc(capsys, "--model", "hyl", "--a-tilde", "1", "--v", "2", "--L0", "3", "--nmax", "4")["verdict"]
    assert v["in_window"] is False and not v["is_superfluid"]
    # the full transfer n = N still lies below zero: -N v**2/2 + 0
    assert v["is_ness"] and v["witness"]["E"] < 0


def test_sweep_output_byte_identical(tmp_path, capsys):
    texts = []
    prefix = tmp_path / "s"
    for _ in (1, 2):
        assert main(["sweep", "--v", "1/2", "--nmax", "4", "--max-cascade", "2", "--out", str(prefix)]) == 0
        texts.append(((tmp_path / "s.json").read_bytes(), (tmp_path / "s_trajectories.csv").read_bytes()))
    capsys.readouterr()
    assert texts[0] == texts[1]
    header = texts[0][1].decode().splitlines()[0]
    assert header == "label,L,N,E,P"


def test_sweep_independent_of_jobs(capsys):
    docs = [sweep_doc(capsys, "--v", "1", "--nmax", "4", "--max-cascade", "2", "--jobs", j) for j in ("1", "3")]
    for d in docs:
        d["meta"]["config"].pop("jobs")
    assert docs[0] == docs[1]


def test_config_file_matches_flags(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    ini.write_text("[nesslab]\nmodel = hyl\na-tilde = 1\nv = pi/3\nL0 = 3\nnmax = 4\n")
    from_file = sweep_doc(capsys, "--config", str(ini))
    flags = sweep_doc(capsys, "--model", "hyl", "--a-tilde", "1", "--v", "pi/3", "--L0", "3", "--nmax", "4")
    from_file["meta"]["config"].pop("config", None)
    assert from_file == flags
    assert from_file["meta"]["config"]["model"] == "hyl"


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--N", "3"],
        ["spectrum", "--N", "3", "--L", "banana"],
        ["spectrum", "--N", "4", "--L", "4"],
        ["sweep", "--model", "hyl"],
        ["sweep", "--model", "hyl", "--a", "1", "--a-tilde", "1"],
        ["sweep", "--nmax", "2"],
        ["sweep", "--c", "-1"],
        ["verify", "--only", "12"],
        ["spectrum", "--N", "3", "--L", "3", "--raw-velocity"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "configuration error" in err


def test_unknown_config_key(tmp_path, capsys):
    ini = tmp_path / "bad.ini"
    ini.write_text("[nesslab]\nflux = 3\n")
    assert run(capsys, "sweep", "--config", str(ini))[0] == 2


def test_budget_exit_3(capsys):
    code, _, err = run(
        capsys, "spectrum", "--model", "hyl", "--family", "configs", "--N", "40", "--L", "5",
        "--a-tilde", "1", "--window", "10",
    )
    assert code == 3 and "budget" in err


def test_strict_exit_4(capsys):
    argv = ["sweep", "--model", "hyl", "--a-tilde", "1", "--v", "1", "--L0", "pi", "--nmax", "5"]
    assert run(capsys, *argv)[0] == 0
    code, _, err = run(capsys, *argv, "--strict")
    assert code == 4 and "not converged" in err


def test_verify_single_check_and_mutation(capsys):
    code, out, err = run(capsys, "verify", "--only", "1")
    assert code == 0 and "PASS" in err
    assert json.loads(out)["checks"][0]["passed"]
    code, _, err = run(capsys, "verify", "--only", "1", "--mutate", "eps2-sign")
    assert code == 1 and "FAIL" in err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "nesslab", "spectrum", "--N", "3", "--L", "3", "--window", "3"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["points"]
