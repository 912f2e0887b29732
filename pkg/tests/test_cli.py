import json
import subprocess
import sys

import numpy as np
import pytest

from dhh.cli import main, parse_config, to_config
from dhh.errors import AxiomViolation, ParseError
from dhh.instances import PRESETS, preset


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_preset_classical():
    A, M, _ = parse_config({"preset": "classical-dual-numbers"})
    assert A.p == 2 and A.dim == 2
    assert np.array_equal(M.sigma.a, np.eye(2, dtype=np.int64))


def test_preset_twisted_sigma_is_one_plus_eps():
    A, M, _ = parse_config({"preset": "twisted-dual-numbers"})
    assert M.validate()
    assert M.sigma == M.left_action(np.array([1, 1]))


def test_non_prime_rejected():
    with pytest.raises(ParseError):
        parse_config({"p": 4})
    with pytest.raises(ParseError):
        parse_config({"p": 257})


def test_missing_table_rejected():
    with pytest.raises(ParseError):
        parse_config({"p": 2, "ring": {"dim": 1}})


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_config_round_trip(name):
    A, M = preset(name)
    doc = json.loads(json.dumps(to_config(A, M)))
    A2, M2, _ = parse_config(doc)
    assert np.array_equal(A2.mult, A.mult) and A2.sigma == A.sigma
    assert M2.sigma == M.sigma and all(x == y for x, y in zip(M2.left, M.left))


def test_axiom_violation_names_failure():
    A, M = preset("classical-dual-numbers")
    doc = to_config(A, M)
    doc["module"]["sigma"] = [[0, 1], [1, 0]]
    with pytest.raises(AxiomViolation) as exc:
        parse_config(doc)
    assert exc.value.report.failure


def test_cohomology_command(capsys):
    code, out, err = _run(capsys, "cohomology", "--preset", "classical-dual-numbers", "--max-degree", "4")
    assert code == 0
    rep = json.loads(out)
    assert [row["internal"] for row in rep["table"]] == [2, 2, 2, 2, 2]
    assert [row["hyper"] for row in rep["table"]] == [2, 4, 4, 4, 4]
    # the human rendering on stderr carries the same numbers
    assert "internal: 2" in err and "hyper: 4" in err


def test_verify_is_byte_identical(capsys):
    runs = [_run(capsys, "verify", "--suite", "ses", "--trials", "30", "--seed", "7")[1] for _ in range(2)]
    assert runs[0] == runs[1]
    assert json.loads(runs[0])["ok"]


def test_verify_other_seed_differs(capsys):
    a = _run(capsys, "verify", "--suite", "les", "--trials", "10", "--seed", "1")[1]
    b = _run(capsys, "verify", "--suite", "les", "--trials", "10", "--seed", "2")[1]
    assert a != b


def test_poly_command(capsys):
    code, out, _ = _run(capsys, "poly", "--order", "2", "--degree", "2")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert rep["derivations"]["dim"] == rep["derivations"]["window_count"] == 10


def test_report_and_complex_commands(capsys):
    code, out, _ = _run(capsys, "report", "--preset", "twisted-dual-numbers", "--max-degree", "3")
    rep = json.loads(out)
    assert code == 0 and rep["les"]["exact"]
    assert rep["readings"]["hyper"][:4] == [1, 2, 2, 2]
    code, out, _ = _run(capsys, "complex", "--preset", "prime-field", "--max-degree", "2")
    rep = json.loads(out)
    assert code == 0 and rep["dims"] == [1, 1, 1, 1]


def test_text_format(capsys):
    code, out, _ = _run(capsys, "validate", "--preset", "f4-frobenius", "--format", "text")
    assert code == 0 and "ok: yes" in out


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"p": 4}))
    assert _run(capsys, "validate", "--input", str(bad))[0] == 2
    assert _run(capsys, "validate", "--preset", "no-such-preset")[0] == 2
    assert _run(capsys, "cohomology")[0] == 2
    # a well-formed but non-inversive instance fails the inversivity check
    A, M = preset("classical-dual-numbers")
    doc = to_config(A, M)
    doc["module"]["sigma"] = [[0, 0], [0, 0]]
    f = tmp_path / "flat.json"
    f.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "validate", "--input", str(f))
    assert code == 1 and not json.loads(out)["checks"]["inversive"]["ok"]


def test_timing_flag(capsys):
    out = _run(capsys, "validate", "--preset", "prime-field", "--timing")[1]
    assert "seconds" in json.loads(out)
    assert "seconds" not in json.loads(_run(capsys, "validate", "--preset", "prime-field")[1])


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "dhh.cli", "validate", "--preset", "prime-field"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
