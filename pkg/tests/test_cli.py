import numpy as np
import pytest

from csdopt.benchgen import qft_matrix, star_graph, dtqw_step
from csdopt.cli import (RunConfig, main, parse_matrix_file, run_pipeline,
                        write_matrix_file)
from csdopt.circuit import evaluate, parse_gatelist
from csdopt.errors import NotUnitary, ParseError


def test_parse_identity(tmp_path):
    f = tmp_path / "id.mat"
    f.write_text("dim 2 real\n1 0\n0 1\n")
    assert np.array_equal(parse_matrix_file(str(f)), np.eye(2))


def test_parse_error_missing_rows(tmp_path):
    f = tmp_path / "short.mat"
    f.write_text("dim 3 real\n1 0 0\n0 1 0\n")
    with pytest.raises(ParseError) as exc:
        parse_matrix_file(str(f))
    assert exc.value.line == 4


def test_parse_error_bad_header(tmp_path):
    f = tmp_path / "bad.mat"
    f.write_text("size 2\n")
    with pytest.raises(ParseError) as exc:
        parse_matrix_file(str(f))
    assert exc.value.line == 1


def test_parse_rejects_non_unitary(tmp_path):
    f = tmp_path / "nu.mat"
    f.write_text("dim 2 real\n1 1\n0 1\n")
    with pytest.raises(NotUnitary) as exc:
        parse_matrix_file(str(f))
    assert exc.value.deviation > 0


def test_roundtrip_complex(tmp_path):
    f = tmp_path / "qft.mat"
    write_matrix_file(str(f), qft_matrix(8))
    back = parse_matrix_file(str(f))
    assert np.abs(back - qft_matrix(8)).max() < 1e-15


def test_roundtrip_real(tmp_path):
    f = tmp_path / "star.mat"
    u = dtqw_step(star_graph(4))
    write_matrix_file(str(f), u)
    assert np.abs(parse_matrix_file(str(f)) - u).max() < 1e-15


def test_gen_subcommand(tmp_path):
    out = tmp_path / "qft64.mat"
    assert main(["gen", "qft", "64", "--out", str(out)]) == 0
    assert np.abs(parse_matrix_file(str(out)) - qft_matrix(64)).max() < 1e-15
    out2 = tmp_path / "star.mat"
    assert main(["gen", "star", "8", "--out", str(out2)]) == 0
    out3 = tmp_path / "ct.mat"
    assert main(["gen", "cayley", "3", "3", "--out", str(out3)]) == 0
    m = parse_matrix_file(str(out3), tol=1e-9)
    assert m.shape == (42, 42)
    out4 = tmp_path / "fix.mat"
    assert main(["gen", "fixture", "--out", str(out4)]) == 0


def test_gen_bad_args(tmp_path, capsys):
    assert main(["gen", "cayley", "3", "--out", str(tmp_path / "x")]) == 1
    assert "error" in capsys.readouterr().err


def _compile(tmp_path, matrix, **kw):
    f = tmp_path / "in.mat"
    write_matrix_file(str(f), matrix)
    prefix = str(tmp_path / "run")
    cfg = RunConfig(input_path=str(f), prefix=prefix, **kw)
    status = run_pipeline(cfg)
    return status, prefix


def test_identity_input_summary(tmp_path):
    status, prefix = _compile(tmp_path, np.eye(4), i_max=20, j_max=5,
                              workers=2, verify=True)
    assert status == 0
    summary = (tmp_path / "run.summary.txt").read_text()
    assert "No optimisation: c_num(U, I, I) = 0 gates" in summary
    assert "c_num(U, I, Q) = 0 gates" in summary
    assert "= 0 + 0 + 0 + 0 + 0 = 0 gates" in summary


def test_pipeline_artifacts_and_verification(tmp_path):
    u = dtqw_step(star_graph(8))
    status, prefix = _compile(tmp_path, u, i_max=60, j_max=10, workers=2,
                              seed=4, verify=True)
    assert status == 0
    circuit_text = (tmp_path / "run.circuit").read_text()
    sc = parse_gatelist(circuit_text)
    assert np.abs(evaluate(sc.concatenated()) - u).max() < 1e-8
    summary = (tmp_path / "run.summary.txt").read_text()
    assert "verification: max deviation" in summary
    history = (tmp_path / "run.history.csv").read_text().splitlines()
    assert history[0] == "worker,iteration,phase,cost"
    assert any(",qubitsel," in ln for ln in history)
    assert any(",anneal," in ln for ln in history)


def test_pipeline_expands_non_power_of_two(tmp_path):
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    status, prefix = _compile(tmp_path, q, i_max=10, j_max=4, workers=1)
    assert status == 0
    summary = (tmp_path / "run.summary.txt").read_text()
    assert "dimension: 6 (expanded to 8)" in summary


def test_pipeline_stage_monotonicity(tmp_path):
    u = dtqw_step(star_graph(8))
    status, prefix = _compile(tmp_path, u, i_max=120, j_max=25, workers=3,
                              seed=2)
    assert status == 0
    lines = (tmp_path / "run.summary.txt").read_text().splitlines()
    unopt = int([ln for ln in lines if "No optimisation" in ln][0].split()[-2])
    qsel = int([ln for ln in lines if "qubit permutation" in ln][0].split()[-2])
    final = int([ln for ln in lines if "simulated annealing" in ln][0].split()[-2])
    assert final <= qsel <= unopt


def test_pipeline_deterministic(tmp_path):
    u = dtqw_step(star_graph(4))
    f = tmp_path / "in.mat"
    write_matrix_file(str(f), u)
    texts = []
    for sub in ("a", "b"):
        prefix = str(tmp_path / sub)
        cfg = RunConfig(input_path=str(f), prefix=prefix, i_max=40, j_max=10,
                        workers=2, seed=9)
        assert run_pipeline(cfg) == 0
        texts.append(tuple((tmp_path / f"{sub}{ext}").read_bytes()
                           for ext in (".circuit", ".history.csv", ".summary.txt")))
    assert texts[0] == texts[1]


def test_pipeline_bad_input_removes_artifacts(tmp_path, capsys):
    f = tmp_path / "bad.mat"
    f.write_text("dim 2 real\n1 1\n0 1\n")
    prefix = str(tmp_path / "run")
    cfg = RunConfig(input_path=str(f), prefix=prefix, i_max=5, j_max=2)
    assert run_pipeline(cfg) == 1
    for ext in (".circuit", ".history.csv", ".summary.txt"):
        assert not (tmp_path / ("run" + ext)).exists()


def test_main_compile_invocation(tmp_path):
    f = tmp_path / "id.mat"
    f.write_text("dim 2 real\n1 0\n0 1\n")
    prefix = str(tmp_path / "out")
    status = main(["compile", "--input", str(f), "--imax", "5", "--jmax", "2",
                   "--workers", "1", "--prefix", prefix, "--verify"])
    assert status == 0
    assert (tmp_path / "out.summary.txt").exists()
