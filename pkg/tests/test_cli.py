import json

import numpy as np
import pytest

from specvar import cli, matio
from specvar import systems as sy
from specvar.errors import InvalidData


@pytest.fixture
def matfile(tmp_path):
    def write(name, M):
        path = tmp_path / name
        matio.write_matrix(str(path), np.asarray(M, dtype=float))
        return str(path)
    return write


def run(args):
    return cli.main(args)


def test_matrix_text_roundtrip(tmp_path):
    M = np.array([[1.5, -2.0], [0.25, 1e-9]])
    p = tmp_path / "m.txt"
    matio.write_matrix(str(p), M)
    np.testing.assert_array_equal(matio.read_matrix(str(p)), M)
    with pytest.raises(InvalidData):
        matio.parse_matrix_text("2 2\n1 2\n")
    with pytest.raises(InvalidData):
        matio.parse_matrix_text("2\n1\n2\n")
    with pytest.raises(InvalidData):
        matio.parse_matrix_text("1 2\n1 nan\n")


def test_decomposition_json_roundtrip():
    rng = np.random.default_rng(0)
    for kind in [sy.eig_sym(3), sy.svd_system(3, 2), sy.signed_svd(2),
                 sy.trivial_norm(3), sy.product_lift(sy.eig_sym(2))]:
        X = kind.validate(kind.random_ambient(rng))
        d = kind.decompose(X)
        d2 = matio.decomposition_from_json(matio.decomposition_to_json(d))
        x = rng.standard_normal(kind.spectrum_dim)
        assert sy.anorm(sy.asub(d.apply(x), d2.apply(x))) <= 1e-12


def test_group_element_json_roundtrip():
    s = sy.GroupElement(np.array([2, 0, 1]), np.array([1.0, -1.0, -1.0]))
    s2 = matio.group_element_from_json(matio.group_element_to_json(s))
    assert s == s2


def test_cmd_spectrum(matfile, capsys):
    path = matfile("X.txt", np.diag([3.0, 1.0, 2.0]))
    assert run(["spectrum", "--system", "eigsym", "--in", path]) == 0
    assert json.loads(capsys.readouterr().out) == [3.0, 2.0, 1.0]

    path = matfile("D.txt", np.diag([1.0, -2.0]))
    assert run(["spectrum", "--system", "signed-svd", "--in", path]) == 0
    assert json.loads(capsys.readouterr().out) == [2.0, -1.0]


def test_cmd_spectrum_malformed(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("not a matrix\n")
    assert run(["spectrum", "--system", "eigsym", "--in", str(p)]) == 2
    assert run(["spectrum", "--system", "eigsym", "--in", str(tmp_path / "missing.txt")]) == 2


def test_cmd_grad_paper_value(matfile, capsys):
    path = matfile("diag12.txt", np.diag([1.0, 2.0]))
    assert run(["grad", "--system", "eigsym", "--f", "coordprod", "--in", path]) == 0
    out = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(out["gradient"], [[2.0, 0.0], [0.0, 1.0]], atol=1e-10)
    assert out["fd_agreement"] <= 1e-5


def test_cmd_project_low_rank(matfile, capsys):
    path = matfile("diag31.txt", np.diag([3.0, 1.0]))
    assert run(["project", "--system", "svd", "--set", "sparse:k=1", "--in", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["distance"] == pytest.approx(1.0)
    np.testing.assert_allclose(out["projections"][0], [[3.0, 0.0], [0.0, 0.0]], atol=1e-9)
    assert out["residual_check"] <= 1e-8


def test_cmd_unknown_oracle(matfile, capsys):
    path = matfile("X.txt", np.diag([1.0, 2.0]))
    assert run(["grad", "--system", "eigsym", "--f", "nope", "--in", path]) == 4
    assert run(["project", "--system", "eigsym", "--set", "nope", "--in", path]) == 4


def test_cmd_subdiff_and_normal(matfile, capsys):
    path = matfile("I.txt", np.eye(2))
    assert run(["subdiff", "--system", "eigsym", "--f", "max", "--in", path,
                "--seed", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["witnesses"] and all(c["passed"] for c in out["definition_checks"])

    path = matfile("P.txt", np.diag([1.0, 0.0]))
    assert run(["normal", "--system", "eigsym", "--set", "orthant", "--in", path,
                "--seed", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["normals"] and all(r["passed"] for r in out["normals"])


def test_cmd_lidskii(capsys):
    assert run(["lidskii", "--system", "signed-svd", "--n", "3", "--trials", "25",
                "--seed", "7"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["pass"] and out["max_distance"] <= 1e-7


def test_cmd_verify_report_and_exit(tmp_path, capsys):
    out = str(tmp_path / "rep.json")
    assert run(["verify", "--suite", "axioms", "--trials", "50", "--seed", "1",
                "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["schema"] == 1 and rep["pass"] is True
    assert all("check" in c and "tolerance" in c for c in rep["checks"])


def test_cmd_verify_deterministic(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    run(["verify", "--suite", "subgradients", "--trials", "10", "--seed", "3", "--out", a])
    run(["verify", "--suite", "subgradients", "--trials", "10", "--seed", "3", "--out", b])
    ra, rb = json.load(open(a)), json.load(open(b))
    ra.pop("wall_time_s"), rb.pop("wall_time_s")
    assert matio.dumps(ra) == matio.dumps(rb)


def test_product_system_cli(matfile, capsys):
    path = matfile("X.txt", np.diag([1.0, 2.0]))
    assert run(["spectrum", "--system", "product:eigsym", "--in", path, "--xi", "7"]) == 0
    assert json.loads(capsys.readouterr().out) == [2.0, 1.0, 7.0]
