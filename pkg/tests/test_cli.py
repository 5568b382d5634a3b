import json as stdjson

import numpy as np
import pytest

from gammakit import json
from gammakit.cli import EXIT_FAILS, EXIT_HOLDS, EXIT_INPUT, run
from gammakit.fixtures import (
    admissible_conjugated_symbols,
    kv_margin,
    kv_triple,
    non_invariant_blh_fixture,
    random_unitary,
)
from gammakit.operators import symmetrize_tuple

FAST = ["--budget-polys", "4", "--budget-degree", "3", "--grid", "32"]


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, stdjson.loads(out)


def as_real(value):
    return value[0] if isinstance(value, list) else value


class TestMembership:
    def test_inside(self, capsys):
        code, doc = run_json(capsys, ["membership", "--point", "(0,0)"])
        assert code == EXIT_HOLDS
        assert doc["command"] == "membership"
        assert doc["verdict"] is True

    def test_outside_with_certificate(self, capsys):
        code, doc = run_json(capsys, ["membership", "--point", "(3,1)"])
        assert code == EXIT_FAILS
        assert doc["verdict"] is False
        assert as_real(doc["certificate"]) == pytest.approx((3 + np.sqrt(5)) / 2, abs=1e-9)

    @pytest.mark.parametrize("route", ["fiber", "recursive", "closure", "all"])
    def test_boundary(self, capsys, route):
        argv = ["membership", "--boundary", "--route", route, "--point"]
        assert run_json(capsys, argv + ["(2,1)"])[0] == EXIT_HOLDS
        assert run_json(capsys, argv + ["(3,1)"])[0] == EXIT_FAILS

    def test_boundary_from_document(self, capsys):
        point = '{"n":2,"s":[[2,0],[1,0]]}'
        code, doc = run_json(capsys, ["membership", "--point", point, "--boundary"])
        assert code == EXIT_HOLDS
        assert doc["verdict"] is True
        assert doc["params"]["route"] == "all"

    def test_cohn(self, capsys):
        code, _ = run_json(capsys, ["membership", "--point", "(1,-1,-1)", "--cohn"])
        assert code == EXIT_HOLDS

    def test_point_as_json(self, capsys):
        code, _ = run_json(capsys, ["membership", "--point", '{"n": 2, "s": [[0, 0], [0, 0]]}'])
        assert code == EXIT_HOLDS

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "verdict.json"
        code, doc = run_json(capsys, ["membership", "--point", "(0,0)", "--out", str(path)])
        assert code == EXIT_HOLDS
        assert stdjson.loads(path.read_text()) == doc


class TestPointMaps:
    def test_project(self, capsys):
        code, doc = run_json(capsys, ["project", "--point", "(3,3,1)"])
        assert code == EXIT_HOLDS
        assert np.allclose([as_real(v) for v in doc["result"]["s"]], [2, 1])

    def test_embed(self, capsys):
        code, doc = run_json(capsys, ["embed", "--point", "(2,1)", "--alpha", "-1"])
        assert code == EXIT_HOLDS
        assert np.allclose([as_real(v) for v in doc["result"]["s"]], [1, -1, -1])

    def test_fiber(self, capsys):
        code, doc = run_json(capsys, ["fiber", "--point", "(2,1)"])
        assert code == EXIT_HOLDS
        assert np.allclose([as_real(v) for v in doc["result"]], [1, 1])


class TestPolynomials:
    def test_reduce(self, capsys):
        code, doc = run_json(capsys, ["reduce", "--poly", "1 0 : 2 0;1 0 : 0 2"])
        assert code == EXIT_HOLDS
        assert doc["result"]["expression"] == "x1^2 - 2*x2"

    def test_reduce_not_symmetric(self, capsys):
        assert run(["reduce", "--poly", "1 0 : 1 0"]) == EXIT_INPUT

    def test_reduce_from_file(self, capsys, tmp_path):
        path = tmp_path / "e2.txt"
        path.write_text("# e_2 in three variables\n1 0 : 1 1 0\n1 0 : 1 0 1\n1 0 : 0 1 1\n")
        code, doc = run_json(capsys, ["reduce", "--poly", str(path)])
        assert code == EXIT_HOLDS
        assert doc["result"]["expression"] == "x2"

    def test_sup(self, capsys):
        code, doc = run_json(capsys, ["sup", "--poly", "1 0 : 1 0", "--grid", "32"])
        assert code == EXIT_HOLDS
        assert doc["result"]["value"] == pytest.approx(2)

    def test_sup_dimension_mismatch(self, capsys):
        assert run(["sup", "--poly", "1 0 : 1 0", "--n", "3"]) == EXIT_INPUT


class TestOperators:
    def test_vn_check_kv(self, capsys):
        tuple_doc = json.to_json(symmetrize_tuple(kv_triple()))
        argv = ["vn-check", "--tuple", tuple_doc, "--poly", "1 0 : 2 0 0;-4 0 : 0 1 0"]
        code, doc = run_json(capsys, argv + ["--grid", "32"])
        assert code == EXIT_FAILS
        assert doc["defect"] == pytest.approx(kv_margin(), abs=1e-9)
        assert doc["certificate"] == "x1^2 - 4*x2"

    def test_vn_check_battery(self, capsys):
        argv = ["vn-check", "--tuple", "[[[3]], [[1]]]", "--seed", "1"]
        code, doc = run_json(capsys, argv + FAST)
        assert code == EXIT_FAILS
        assert doc["certificate"]["label"] == "x1"

    def test_classify(self, capsys):
        tuple_doc = json.to_json(symmetrize_tuple([np.diag([1, 1j]), np.diag([-1, 1])]))
        code, doc = run_json(capsys, ["classify", "--tuple", tuple_doc] + FAST)
        assert code == EXIT_HOLDS

        argv = ["classify", "--tuple", "[[[0]], [[0.5]]]", "--kind", "isometry"]
        code, doc = run_json(capsys, argv + FAST)
        assert code == EXIT_FAILS
        assert doc["certificate"] == "S_n isometric"

    def test_generators_precondition(self, capsys):
        code, doc = run_json(capsys, ["generators", "--tuple", "[[[3]], [[1]]]"])
        assert code == EXIT_FAILS
        assert doc["verdict"] is False
        assert doc["certificate"] == "gamma-unitary"

    def test_malformed_json(self, capsys):
        assert run(["vn-check", "--tuple", '{"mats": ']) == EXIT_INPUT

    def test_missing_file(self, capsys, tmp_path):
        assert run(["classify", "--tuple", str(tmp_path / "missing.json")]) == EXIT_INPUT


class TestModels:
    def test_model_build(self, capsys):
        argv = ["model-build", "--symbols", '{"d": 1, "A": [[[0.5]]]}', "--section", "2"]
        code, doc = run_json(capsys, argv)
        assert code == EXIT_HOLDS
        assert doc["result"]["model"]["n"] == 2
        assert doc["result"]["section"]["n"] == 2

    def test_model_build_rejects(self, capsys):
        code, doc = run_json(capsys, ["model-build", "--symbols", '{"d": 1, "A": [[[1.5]]]}'])
        assert code == EXIT_FAILS
        assert doc["certificate"] == "symbol-conditions"

    def test_model_check(self, capsys):
        symbols = '{"d": 2, "A": [[[0, 1], [0, 0]], [[0, 0], [0, 0]]]}'
        code, doc = run_json(capsys, ["model-check", "--symbols", symbols] + FAST)
        assert code == EXIT_FAILS
        assert doc["certificate"] == "[A_1, A_1*] = [A_2, A_2*]"

    def test_invariant(self, capsys):
        code, doc = run_json(capsys, ["invariant", "--symbols", '{"d": 1, "A": [[["0.3+0.4j"]]]}'])
        assert code == EXIT_HOLDS
        assert np.allclose(doc["result"], [[[[0.3, -0.4]]]])

    def test_wold(self, capsys):
        tuple_doc = json.to_json(symmetrize_tuple([np.diag([1, 1j]), np.diag([-1, 1])]))
        code, doc = run_json(capsys, ["wold", "--tuple", tuple_doc])
        assert code == EXIT_HOLDS
        assert doc["result"]["pure"] is None

    def test_blh_verify(self, capsys):
        model, theta = non_invariant_blh_fixture()
        argv = ["blh-verify", "--symbols", json.to_json(model.A), "--theta", json.to_json(theta)]
        code, doc = run_json(capsys, argv + FAST)
        assert code == EXIT_FAILS
        assert doc["certificate"]["degree"] == -1
        assert doc["certificate"]["norm"] == pytest.approx(0.5)

    def test_equiv(self, capsys):
        rng = np.random.default_rng(3)
        A = admissible_conjugated_symbols(3, 2, rng)
        B = A.conjugate_by(random_unitary(2, rng))
        argv = ["equiv", "--symbols", json.to_json(A), "--other", json.to_json(B), "--seed", "1"]
        code, doc = run_json(capsys, argv)
        assert code == EXIT_HOLDS
        assert len(doc["certificate"]) == 2


class TestSample:
    def test_deterministic(self, capsys):
        argv = ["sample", "--n", "3", "--count", "100", "--boundary", "--seed", "7"]
        assert run(argv) == EXIT_HOLDS
        first = capsys.readouterr().out
        assert run(argv) == EXIT_HOLDS
        assert capsys.readouterr().out == first

        lines = first.splitlines()
        assert lines[0] == "s1_re,s1_im,s2_re,s2_im,s3_re,s3_im"
        assert len(lines) == 101

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "points.csv"
        code, doc = run_json(capsys, ["sample", "--n", "2", "--count", "5", "--out", str(path)])
        assert code == EXIT_HOLDS
        assert doc["result"]["count"] == 5
        assert len(path.read_text().splitlines()) == 6


class TestUsage:
    def test_help(self, capsys):
        assert run(["--help"]) == EXIT_HOLDS

    def test_unknown_command(self, capsys):
        assert run(["nonsense"]) == EXIT_INPUT

    def test_missing_argument(self, capsys):
        assert run(["membership"]) == EXIT_INPUT

    def test_missing_key(self, capsys):
        assert run(["classify", "--tuple", '{"matrices": [[[1]]]}']) == EXIT_INPUT
        assert run(["equiv", "--symbols", "[1, 2]", "--other", "[1, 2]"]) == EXIT_INPUT

    def test_internal_errors_propagate(self, capsys, monkeypatch):
        def broken(s, tol):
            raise TypeError("unsupported operand")

        monkeypatch.setattr("gammakit.geometry.in_gamma", broken)
        with pytest.raises(TypeError):
            run(["membership", "--point", "(0,0)"])

    def test_non_positive_tolerance(self, capsys):
        assert run(["membership", "--point", "(0,0)", "--tol", "0"]) == EXIT_INPUT
