import csv
import io
import json

import numpy as np
import pytest

from avesolve.cli import main
from avesolve.fileio import parse_instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_zero_at_max(tmp_path, capsys):
    p = str(tmp_path / "zam.txt")
    assert run(capsys, "gen", "--catalog", "zero-at-max", "--n", "5", "-o", p)[0] == 0
    code, out, _ = run(capsys, "solve", p, "--json", "--verify-oracle")
    assert code == 0
    rep = json.loads(out)
    assert rep["z"] == [0.0, 1.0, 1.0, 1.0, 1.0]
    assert rep["oracle"].startswith("ok")


def test_solve_verify_random(tmp_path, capsys):
    p = str(tmp_path / "r.txt")
    run(capsys, "gen", "--kind", "1", "--n", "6", "--seed", "7", "-o", p)
    code, out, _ = run(capsys, "solve", p, "--verify-oracle")
    assert code == 0 and "oracle" in out and "ok" in out


def test_solve_tridiag_sharp(tmp_path, capsys):
    p = str(tmp_path / "ts.txt")
    run(capsys, "gen", "--catalog", "tridiag-sharp", "--n", "3", "-o", p)
    code, out, err = run(capsys, "solve", p, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["z"] == [0.0, 0.0, 0.0] and rep["norm_warning"] is True
    assert "warning" in err
    code, out, _ = run(capsys, "solve", p, "--json", "--verify-oracle")
    assert code == 3 and "degenerate" in json.loads(out)["oracle"]


def test_solve_archived_mismatch(tmp_path, capsys):
    p = str(tmp_path / "a.txt")
    run(capsys, "gen", "--archive", "tridiag-sym-3", "-o", p)
    code, out, _ = run(capsys, "solve", p, "--verify-oracle", "--json")
    assert code == 3 and json.loads(out)["oracle"].startswith("mismatch")


def test_method_dispatch(tmp_path, capsys):
    p = write(tmp_path, "d.txt", "dense 3\n0.2 0.1 0\n0.1 0.2 0.1\n0 0.1 0.2\nc: 1 -1 1\n")
    assert json.loads(run(capsys, "solve", p, "--json")[1])["method"] == "tridiag"
    assert json.loads(run(capsys, "solve", p, "--json", "--method", "dense")[1])["method"] == "dense"
    p = write(tmp_path, "f.txt", "dense 3\n0.2 0.1 0.1\n0.1 0.2 0.1\n0 0.1 0.2\nc: 1 -1 1\n")
    assert json.loads(run(capsys, "solve", p, "--json")[1])["method"] == "dense"
    assert run(capsys, "solve", p, "--method", "tridiag")[0] == 1


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "solve", str(tmp_path / "missing.txt"))[0] == 1
    p = write(tmp_path, "bad.txt", "dense 2\n1 x\n0 1\nc: 1 1\n")
    assert run(capsys, "solve", p)[0] == 1
    p = write(tmp_path, "zp.txt", "dense 2\n1 0\n0 0\nc: 1 0.5\n")
    code, _, err = run(capsys, "solve", p)
    assert code == 2 and "pivot" in err
    p = write(tmp_path, "big.txt", "dense 3\n0 0 0\n0 0 0\n0 0 0\nc: 1 1 1\n")
    assert run(capsys, "oracle", p, "--max-oracle-n", "2")[0] == 1


def test_classify(tmp_path, capsys):
    p = write(tmp_path, "m.txt", "dense 3\n0.4 0 0\n0 0.4 0\n0 0 0.4\n")
    code, out, _ = run(capsys, "classify", p)
    assert code == 0 and out.strip() == "NormBelowHalf"


def test_rho_s(tmp_path, capsys):
    p = write(tmp_path, "m.txt", "dense 2\n-1 0\n0 -1\n")
    code, out, _ = run(capsys, "rho-s", p)
    assert code == 0 and float(out) == 1.0
    code, out, _ = run(capsys, "rho-s", p, "--report", "--json")
    assert code == 0 and json.loads(out)["det_all_positive"] is False


def test_oracle_cmd(tmp_path, capsys):
    p = write(tmp_path, "i.txt", "dense 2\n0 0.5\n0 0.5\nc: -0.5 0.5\n")
    code, out, _ = run(capsys, "oracle", p, "--json")
    rep = json.loads(out)
    assert code == 0 and rep["solution_count"] == 1
    assert rep["solution_0"] == [0.0, 1.0] and len(rep["signatures_0"]) == 2


def test_convert_equilibrium(tmp_path, capsys):
    p = write(tmp_path, "e.txt", "dense 2\n0 0\n0 0\nc: 1 1\n")
    code, out, _ = run(capsys, "convert-equilibrium", p)
    inst = parse_instance(out)
    assert code == 0
    assert inst.dense().tolist() == [[-1.0, 0.0], [0.0, -1.0]]
    assert inst.rhs.tolist() == [2.0, 2.0]


def test_counterexamples(capsys):
    code, out, _ = run(capsys, "counterexamples", "--json")
    rows = json.loads(out)
    assert code == 0
    assert {r["status"] for r in rows} <= {"pass", "invalid"}
    assert [r for r in rows if r["status"] == "invalid"] == [
        {"id": "diagdom-sharp", "n": 10, "eps": 0.1, "status": "invalid"}]


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "20,40", "--seed", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["method"] for r in rows] == ["dense", "dense", "tridiag", "tridiag"]
    assert list(rows[0]) == ["n", "method", "wall_time", "arith_ops", "aux_ops", "residual"]
    _, again, _ = run(capsys, "bench", "--sizes", "20,40", "--seed", "3")
    strip = lambda text: [r[:2] + r[3:] for r in csv.reader(io.StringIO(text))]
    assert strip(out) == strip(again)
    for r in rows:
        assert float(r["residual"]) < 1e-9 and int(r["arith_ops"]) > 0


def test_gen_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--kind", "TridiagonalNormBelowOne", "--n", "4",
                       "--symmetric")
    inst = parse_instance(out)
    assert code == 0 and out.startswith("tridiag 4")
    np.testing.assert_array_equal(inst.matrix.sub, inst.matrix.sup)


def test_bad_kind(capsys):
    with pytest.raises(SystemExit):
        main(["gen", "--kind", "7"])
