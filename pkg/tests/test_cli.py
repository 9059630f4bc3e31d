import csv
import io
import subprocess
import sys

import pytest

from artifact.cli import main
from artifact.harness import CSV_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_construct_csv(capsys):
    code, out, err = run(capsys, "construct", "--n", "5", "--k", "27")
    assert code == 0
    r = rows(out)
    assert len(r) == 32 and sum(int(x["info"]) for x in r) == 27
    assert "N=32 K=27" in err


def test_construct_descriptor_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "--n", "6", "--rate", "1/3", "--descriptor")
    assert code == 0 and "K=21" in out
    p = tmp_path / "code.txt"
    p.write_text(out)
    code, out2, _ = run(capsys, "construct", "--code", str(p), "--descriptor")
    assert out2 == out


def test_classify_histogram(capsys):
    code, out, err = run(capsys, "classify", "--n", "10", "--rate", "1/2")
    assert code == 0
    hist = {int(r["length"]): int(r["count"]) for r in rows(out)}
    assert hist == {16: 1, 32: 3, 64: 2, 256: 1}
    assert "sr1spc" in err


def test_encode_message(capsys):
    code, out, _ = run(capsys, "encode", "--n", "3", "--k", "4", "--msg", "1011")
    assert code == 0
    assert rows(out)[0]["codeword"] == "10100101"
    assert run(capsys, "encode", "--n", "3", "--k", "4", "--msg", "10")[0] == 2
    assert run(capsys, "encode", "--n", "3", "--k", "4", "--msg", "10x1")[0] == 2


def test_encode_random_is_seeded(capsys):
    a = run(capsys, "encode", "--n", "5", "--k", "10", "--seed", "3")[1]
    b = run(capsys, "encode", "--n", "5", "--k", "10", "--seed", "3")[1]
    assert a == b


def test_fer_sim_csv(capsys, tmp_path):
    out_path = tmp_path / "fer.csv"
    code, out, err = run(
        capsys, "fer-sim", "--n", "7", "--k", "64", "--ebn0", "1,2.5", "--max-frames", "3000",
        "--min-errors", "50", "--seed", "11", "--decoders", "sc,fssc,snfsc", "--chunk-size", "500",
        "--out", str(out_path),
    )
    assert code == 0 and out == ""
    from conftest import DATA

    assert out_path.read_text() == (DATA / "fer_p128_k64.csv").read_text()
    assert "snfsc" in err


def test_fer_sim_config_file(capsys, tmp_path):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("n=6\nk=32\nebn0=2\nmax_frames=500\nmin_errors=10\nseed=4\ndecoders=sc\n")
    code, out, _ = run(capsys, "fer-sim", "--config", str(cfg))
    assert code == 0
    r = rows(out)
    assert list(r[0].keys()) == list(CSV_COLUMNS)
    assert r[0]["decoder"] == "sc" and r[0]["n"] == "6"
    # flags override the file
    code, out, _ = run(capsys, "fer-sim", "--config", str(cfg), "--decoders", "snfsc")
    assert rows(out)[0]["decoder"] == "snfsc"


@pytest.mark.parametrize(
    "argv",
    [
        ["fer-sim", "--n", "5", "--k", "0"],
        ["fer-sim", "--n", "5", "--k", "8", "--decoders", "ml"],
        ["fer-sim", "--n", "5", "--k", "8", "--ebn0", "x"],
        ["fer-sim", "--n", "5", "--k", "8", "--max-frames", "0"],
        ["construct", "--n", "11", "--k", "5"],
        ["construct", "--k", "5"],
        ["construct", "--rate", "1/2"],
        ["construct", "--code", "/nonexistent/code.txt"],
        ["latency", "--n", "5", "--k", "8", "--features", "fast"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["construct", "--n", "abc"])
    assert e.value.code == 2


def test_unwritable_output_exit_1(capsys, tmp_path):
    target = tmp_path / "missing" / "out.csv"
    assert run(capsys, "construct", "--n", "3", "--k", "4", "--out", str(target))[0] == 1


def test_latency_bounds(capsys):
    code, out, _ = run(capsys, "latency", "--n", "7", "--rate", "1/2", "--features", "sc,fssc,snfsc")
    assert code == 0
    r = {x["feature_set"]: (int(x["lb"]), int(x["ub"])) for x in rows(out)}
    assert r["sc"] == (254, 254)
    assert r["fssc"] == (52, 52)


def test_latency_measured(capsys):
    code, out, _ = run(capsys, "latency", "--n", "7", "--k", "64", "--ebn0", "0,4", "--frames", "2000")
    assert code == 0
    r = rows(out)
    steps = [float(x["mean_steps"]) for x in r]
    assert steps[0] >= steps[1] >= int(r[0]["lb"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "artifact", "construct", "--n", "2", "--k", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "index,info"
