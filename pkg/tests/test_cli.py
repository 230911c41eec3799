import json

from hodgekit.cli import FIXTURES, parse_gaussian, run
from hodgekit.exactla import ExactGaussian

from fractions import Fraction


def _capture(capsys, argv):
    rc = run(argv)
    out = capsys.readouterr().out
    return rc, out


def test_parse_gaussian():
    assert parse_gaussian("3") == ExactGaussian(3)
    assert parse_gaussian("-2/3") == ExactGaussian(Fraction(-2, 3))
    assert parse_gaussian("i") == ExactGaussian(0, 1)
    assert parse_gaussian("-i") == ExactGaussian(0, -1)
    assert parse_gaussian("1/2+3i") == ExactGaussian(Fraction(1, 2), 3)
    assert parse_gaussian("2-1/4i") == ExactGaussian(2, Fraction(-1, 4))


def test_fixture_registry_complete():
    assert set(FIXTURES) >= {"ex0", "exI", "exII", "exIII", "exIV", "exV",
                             "ex0-nilp", "exII-nilp", "exIII-nilp",
                             "exIV-nilp", "exV-nilp2", "exV-Q",
                             "slope-demo"}
    for name, f in FIXTURES.items():
        assert f["describe"]


def test_fixtures_list(capsys):
    rc, out = _capture(capsys, ["fixtures", "list"])
    assert rc == 0
    data = json.loads(out)
    assert "exIII-nilp" in data["fixtures"]


def test_mhs_check_on_all_backdrops(capsys):
    for name in ("ex0", "exI", "exII", "exIII", "exIV", "exV"):
        rc, out = _capture(capsys, ["mhs", "check", "--fixture", name])
        assert rc == 0, out
        data = json.loads(out)
        assert all(c["pass"] for c in data["checks"])


def test_mhs_canonical_round_trip(capsys):
    rc, out = _capture(capsys, ["mhs", "canonical", "--fixture", "exIII"])
    assert rc == 0
    data = json.loads(out)
    assert data["checks"][0]["pass"]


def test_relmono_command(capsys):
    rc, out = _capture(capsys, ["relmono", "--fixture", "exIII-nilp"])
    assert rc == 0
    data = json.loads(out)
    assert data["exists"]
    assert data["dims"]["-4"] == 1 and data["dims"]["-2"] == 2


def test_orbit_psi_command(capsys):
    rc, out = _capture(capsys, ["orbit", "psi", "--fixture", "exIII-nilp"])
    assert rc == 0
    data = json.loads(out)
    assert data["J"] == [1]
    assert sorted(map(tuple, data["grading_exponents"])) == \
        [(-3, -4), (-3, -2), (0, 0)]


def test_orbit_validate_command(capsys):
    rc, out = _capture(capsys, ["orbit", "validate", "--fixture",
                                "exV-nilp2"])
    assert rc == 0
    data = json.loads(out)
    assert all(c["pass"] for c in data["checks"])


def test_fan_commands(capsys):
    rc, out = _capture(capsys, ["fan", "sigmaQ", "--fixture", "exV-Q"])
    assert rc == 0
    data = json.loads(out)
    assert len(data["cones"]) == 6
    rc2, out2 = _capture(capsys, ["fan", "sigmaPhi", "--fixture", "exV-Q",
                                  "--phi", '[{"0": 0, "1": 0}]'])
    assert rc2 == 0
    data2 = json.loads(out2)
    assert data2["rays"] == [[1, 1]]


def test_height_commands(capsys):
    rc, out = _capture(capsys, [
        "height", "pair", "--tau", "i",
        "--z-spec", "[[1, 0.31, 0.21], [-1, 0.11, -0.41]]",
        "--w-spec", "[[1, 0.52, 0.77], [-1, 0.06, 0.33]]"])
    assert rc == 0
    data = json.loads(out)
    assert data["checks"][0]["pass"]
    rc2, out2 = _capture(capsys, ["height", "slope", "--fixture",
                                  "slope-demo", "--ymax", "200"])
    assert rc2 == 0
    data2 = json.loads(out2)
    assert data2["checks"][0]["pass"]
    assert data2["predicted"] == "-1/4"


def test_deterministic_output(capsys):
    rc1, out1 = _capture(capsys, ["orbit", "psi", "--fixture",
                                  "exIII-nilp"])
    rc2, out2 = _capture(capsys, ["orbit", "psi", "--fixture",
                                  "exIII-nilp"])
    assert out1 == out2


def test_usage_error_exit_code(capsys):
    rc = run(["mhs", "check", "--fixture", "does-not-exist"])
    assert rc in (1, 2)


def test_text_output_mode(capsys):
    rc, out = _capture(capsys, ["fixtures", "list", "--out", "text"])
    assert rc == 0 and "exIII" in out
