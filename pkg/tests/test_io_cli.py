import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qig.channels import pinching_channel
from qig.cli import main
from qig.errors import ParseError
from qig.io import channel_from_json, channel_to_json, load_channel, load_matrix, matrix_from_json, matrix_to_json, save_json

from conftest import SX


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.fixture
def qubit_files(tmp_path):
    state, obs = tmp_path / "state.json", tmp_path / "a.json"
    save_json(matrix_to_json(np.diag([0.7, 0.3])), state)
    save_json(matrix_to_json(SX), obs)
    return str(state), str(obs)


# -- JSON formats ----------------------------------------------------------------


def test_matrix_round_trip(tmp_path):
    M = np.array([[1.0, 2 - 1j], [2 + 1j, -3.0]])
    save_json(matrix_to_json(M), tmp_path / "m.json")
    np.testing.assert_array_equal(load_matrix(tmp_path / "m.json"), M)


def test_matrix_im_optional():
    np.testing.assert_array_equal(matrix_from_json({"dim": 1, "re": [[2.0]]}), [[2.0]])


@pytest.mark.parametrize("obj, needle", [
    ({"re": [[1]]}, "dim"),
    ({"dim": 2, "re": [[1, 0]]}, "shape"),
    ({"dim": 1}, "'re'"),
    ({"dim": 0, "re": []}, "positive"),
    ({"dim": 1, "re": [["x"]]}, "numeric"),
    ([1, 2], "object"),
])
def test_matrix_errors(obj, needle):
    with pytest.raises(ParseError, match=needle):
        matrix_from_json(obj)


def test_channel_round_trip(tmp_path):
    ch = pinching_channel(3)
    save_json(channel_to_json(ch), tmp_path / "c.json")
    back = load_channel(tmp_path / "c.json")
    np.testing.assert_array_equal(back.kraus, ch.kraus)


def test_channel_errors():
    with pytest.raises(ParseError, match="kraus"):
        channel_from_json({"in_dim": 2, "out_dim": 2})
    with pytest.raises(ParseError, match="empty"):
        channel_from_json({"in_dim": 2, "out_dim": 2, "kraus": []})
    bad = matrix_to_json(np.eye(3), square=False)
    with pytest.raises(ParseError, match="shape"):
        channel_from_json({"in_dim": 2, "out_dim": 2, "kraus": [bad]})


def test_syntax_error_has_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2,\n  "re": [[1, 0], [0, 1]\n}')
    with pytest.raises(ParseError, match=r"bad\.json:3:1:"):
        load_matrix(p)


# -- eval ----------------------------------------------------------------------------


def test_eval_from_files(qubit_files):
    state, a = qubit_files
    assert run(["eval", "gamma", "--state", state, "--a", a, "--f", "sld"]) == (0, "4\n")
    assert run(["eval", "qcov", "--state", state, "--a", a, "--f", "sld"]) == (0, "1\n")
    assert run(["eval", "cov", "--state", state, "--a", a]) == (0, "1\n")


def test_eval_generated():
    code, text = run(["eval", "skew", "--dim", "3", "--f", "wy", "--seed", "1"])
    assert code == 0 and float(text) > 0
    code, text = run(["eval", "tilde-residual", "--dim", "3", "--f", "kosaki:0.3"])
    assert code == 0 and abs(float(text)) < 1e-10


def test_eval_malformed_json(tmp_path, qubit_files, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _ = run(["eval", "gamma", "--state", str(bad), "--a", qubit_files[1]])
    assert code == 1
    assert "bad.json:1:2" in capsys.readouterr().err


def test_eval_rejects_bad_inputs(tmp_path, qubit_files, capsys):
    state, a = qubit_files
    p = tmp_path / "s.json"
    save_json(matrix_to_json(np.diag([0.7, 0.7])), p)
    assert run(["eval", "gamma", "--state", str(p), "--a", a])[0] == 1
    assert run(["eval", "gamma", "--state", state, "--a", a, "--f", "nope"])[0] == 1
    assert run(["eval", "gamma"])[0] == 1
    assert "error" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 1


# -- verify --------------------------------------------------------------------------


VERIFY = ["verify", "dyn-ucp", "--dim", "3", "--m", "2", "--f", "wy", "--samples", "20", "--seed", "7"]


def test_verify_json_lines(capsys):
    code, text = run(VERIFY)
    assert code == 0
    lines = [json.loads(x) for x in text.splitlines()]
    assert len(lines) == 21
    assert lines[-1]["summary"] and lines[-1]["violations"] == 0
    assert all(r["holds"] and r["theorem"] == "dyn-ucp" for r in lines[:-1])
    assert "wall_time_s=" in capsys.readouterr().err


def test_verify_is_byte_identical():
    assert run(VERIFY)[1] == run(VERIFY)[1]
    assert run(VERIFY)[1] != run(VERIFY[:-1] + ["8"])[1]


def test_verify_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, text = run(VERIFY + ["--format", "csv", "--out", str(out)])
    assert code == 0 and text == ""
    rows = out.read_text().splitlines()
    assert rows[0].startswith("theorem,f,g,c,d,dim,m,seed,lhs")
    assert len(rows) == 21
    assert '"summary": true' in capsys.readouterr().err


def test_verify_violation_exit_code():
    # tolerance far above any margin scale forces reported violations
    code, text = run(VERIFY[:-4] + ["--samples", "3", "--tol", "-1.0"])
    assert code == 2
    assert json.loads(text.splitlines()[-1])["violations"] == 3


def test_verify_condition_violation_recorded():
    code, text = run(["verify", "theorem3", "--f", "sld", "--g", "sld", "--c", "1", "--samples", "2"])
    assert code == 0
    first = json.loads(text.splitlines()[0])
    assert first["condition_violated"]
    assert json.loads(text.splitlines()[-1])["condition_violated"] == 2


@pytest.mark.parametrize("kind", ["random", "pinching", "partial-trace", "identity"])
def test_verify_monotone(kind):
    code, text = run(["verify", "monotone", "--channel-kind", kind, "--f", "sld,km", "--samples", "6"])
    assert code == 0
    assert json.loads(text.splitlines()[-1])["verdicts"] == 12


def test_verify_other_commands():
    for argv in (["theorem1", "--f", "wy,rld"], ["theorem3", "--m", "3"], ["theorem4", "--g", "wy", "--f", "sld"],
                 ["tilde-identity", "--f", "km"], ["robertson", "--dim", "2", "--dim", "3"]):
        code, _ = run(["verify", *argv, "--samples", "10"])
        assert code == 0, argv


# -- functions -----------------------------------------------------------------------


def test_functions_table():
    code, text = run(["functions", "--trials", "50"])
    rows = [json.loads(x) for x in text.splitlines()]
    assert code == 0 and len(rows) == 6
    assert all(r["passes"] and r["lemma4_margin"] >= -1e-12 for r in rows)
    sld = rows[0]
    assert sld["function"] == "sld" and sld["f0"] == 0.5


def test_functions_probe_flagged():
    code, text = run(["functions", "--list", "sld", "--probe", "xsq", "--trials", "50", "--format", "csv"])
    assert code == 0
    rows = text.splitlines()
    assert rows[0].startswith("function,probe")
    assert "non-standard" in rows[2]


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "qig.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("qig ")
