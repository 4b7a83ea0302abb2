import subprocess
import sys

import numpy as np
import pytest

from qtrefftz.cli import ConfigError, RunConfig, _parse_families, _parse_n, main
from qtrefftz.construct import load_basis
from qtrefftz.exact_solutions import CaseId


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_helpers():
    assert _parse_n("1-4") == [1, 2, 3, 4]
    assert _parse_n("3,1, 3") == [1, 3]
    assert [f.value for f in _parse_families("pw, polynomial", CaseId.TC1)] == ["polynomial", "pw"]
    assert len(_parse_families(None, CaseId.TC2)) == 3
    with pytest.raises(ConfigError):
        _parse_families("wavelets", CaseId.TC1)


def test_config_validation():
    ok = dict(case=CaseId.TC1, families=_parse_families(None, CaseId.TC1), n_values=[1], h=[1.0, 0.5],
              centers=1, seed=0, out=None)
    RunConfig(**ok)
    for bad in (dict(families=[]), dict(n_values=[0]), dict(n_values=[9]), dict(h=[0.5, 1.0]), dict(centers=0),
                dict(case=CaseId.TC2)):
        with pytest.raises(ConfigError):
            RunConfig(**{**ok, **bad})


def test_convergence_columns(capsys, tmp_path):
    out = tmp_path / "conv.txt"
    code, _, err = run(capsys, "convergence", "--case", "tc1", "--n", "1-2", "--centers", "1", "--h-levels", "5",
                       "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    header = lines[0].split()
    assert len(header) == 1 + 2 * 4
    assert header[:3] == ["h", "errAbGn1", "errAbGn2"] and header[-1] == "errPWfn2"
    assert len(lines) == 6
    rows = np.array([[float(v) for v in line.split()] for line in lines[1:]])
    np.testing.assert_allclose(rows[:, 0], [2 * 4.0 ** -k for k in range(5)])
    assert "expected 3" in err


def test_convergence_deterministic(capsys):
    args = ("convergence", "--case", "tc2", "--family", "phase", "--n", "2", "--centers", "2", "--h-levels", "4")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b and a.startswith("h errPbGn2")


def test_config_errors_exit_2(capsys):
    code, _, err = run(capsys, "convergence", "--case", "tc2", "--family", "pw")
    assert code == 2 and "configuration error" in err
    code, _, _ = run(capsys, "convergence", "--family", ",")
    assert code == 2
    code, _, _ = run(capsys, "conditioning", "--n", "0-2")
    assert code == 2


def test_conditioning_table(capsys, tmp_path):
    out = tmp_path / "cond.txt"
    code, printed, _ = run(capsys, "conditioning", "--case", "tc1", "--family", "polynomial,pw", "--n", "1,2",
                           "--centers", "2", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].split() == ["n", "polynomial", "pw"]
    assert float(lines[1].split()[1]) == pytest.approx(1.0, abs=1e-9)
    assert "polynomial" in printed


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0 and "residual" in out and "rank" in out
    code, out, _ = run(capsys, "verify")
    assert code == 0 and "all checks passed" in out
    code, out, _ = run(capsys, "verify", "--perturb", "1e-3")
    assert code == 1 and "FAIL  residual" in out


def test_dump_basis(capsys, tmp_path):
    path = tmp_path / "b.txt"
    code, _, _ = run(capsys, "dump-basis", "--case", "tc3", "--family", "amplitude", "--n", "2",
                     "--center", "0.1", "0.2", "0.3", "--out", str(path))
    assert code == 0
    basis = load_basis(path)
    assert len(basis) == 9
    np.testing.assert_array_equal(basis[0].center, [0.1, 0.2, 0.3])
    code, out, _ = run(capsys, "dump-basis", "--family", "pw", "--n", "1")
    assert code == 0 and out.count("LAMBDA") == 4


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qtrefftz", "verify", "--list"], capture_output=True, text=True)
    assert r.returncode == 0 and "flow-determinant" in r.stdout


def test_module_aliases():
    from qtrefftz import coefficients, construct, experiment_cli, pde_coefficients, qt_construct

    assert qt_construct.build_basis is construct.build_basis
    assert pde_coefficients.builtin_operator is coefficients.builtin_operator
    assert experiment_cli.main is main
