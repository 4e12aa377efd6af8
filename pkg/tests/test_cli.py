import subprocess
import sys

import pytest

from ctwdi.cli import build_parser, run

SUBCOMMANDS = ["estimate", "simulate", "delay-scan", "causality", "convergence", "quantize", "oracle"]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(out):
    return [ln for ln in out.splitlines() if not ln.startswith("#")]


def test_oracle_coupled(capsys):
    code, out, _ = call(capsys, "oracle", "coupled-bsc", "--alpha", "0.1", "--beta", "0.2")
    assert code == 0
    assert body(out) == ["di=0.3578", "rev=0.1048", "mi=0.4626"]
    assert "# alpha=0.1" in out and "# beta=0.2" in out


def test_oracle_others(capsys):
    assert body(call(capsys, "oracle", "markov-bsc")[1]) == ["di_y_to_x=0.2361"]
    assert body(call(capsys, "oracle", "redundancy", "--n", "256")[1]) == ["bound=6.0000"]
    assert body(call(capsys, "oracle", "binary-entropy", "--p", "0.2", "--digits", "6")[1]) == \
        ["h=0.721928"]


def test_every_subcommand_exists_and_documents_defaults(capsys):
    for name in SUBCOMMANDS:
        with pytest.raises(SystemExit) as exc:
            run([name, "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        assert "[default:" in text
        assert "artifact default" in text or name == "quantize"
    # defaults taken from the reference experiments are marked too
    with pytest.raises(SystemExit):
        run(["delay-scan", "--help"])
    text = " ".join(capsys.readouterr().out.split())
    assert "context tree depth D [default: 6; reference setup]" in text


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["oracle", "markov-bsc", "--p", "1.5"],
    ["simulate", "iid", "--n", "0"],
    ["estimate", "--x", "a.csv"],
    ["causality", "iid", "--method", "7"],
    ["convergence", "iid", "--grid", "1,x"],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        run(argv)
    assert exc.value.code == 2
    assert capsys.readouterr().out == ""


def test_data_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("2020-01-02,100\n2020-01-02,200\n")
    code, out, err = call(capsys, "quantize", "--input", str(bad))
    assert code == 1 and out == "" and "2020-01-02" in err
    code, out, err = call(capsys, "estimate", "--x", str(tmp_path / "nope"), "--y", str(bad))
    assert code == 1 and out == "" and "error" in err


def test_simulate_is_byte_identical(capsys):
    argv = ["simulate", "coupled-bsc", "--n", "300", "--seed", "5"]
    first = call(capsys, *argv)[1]
    assert first == call(capsys, *argv)[1]
    assert body(first)[0] == "x,y" and len(body(first)) == 301
    assert first != call(capsys, *argv[:-1], "6")[1]


def test_simulate_then_estimate(capsys, tmp_path):
    x, y = tmp_path / "x.csv", tmp_path / "y.csv"
    call(capsys, "simulate", "coupled-bsc", "--n", "5000", "--out-x", str(x), "--out-y", str(y))
    trace = tmp_path / "trace.csv"
    code, out, _ = call(capsys, "estimate", "--x", str(x), "--y", str(y), "--depth", "2",
                        "--methods", "2,4", "--trace", str(trace), "--trace-every", "1000")
    assert code == 0
    rows = body(out)
    assert rows[0] == "method,n,depth,di,reverse_di,mi"
    assert [r.split(",")[0] for r in rows[1:]] == ["I2", "I4"]
    di, rev, mi = map(float, rows[1].split(",")[3:])
    assert di > rev > 0 and mi == pytest.approx(di + rev, abs=1e-9)
    assert trace.read_text().splitlines()[0] == "i,estimate_bits"


def test_estimate_from_prices(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("".join(f"2021-01-{d:02d},{100 + (d * 7) % 5}\n" for d in range(1, 29)))
    b.write_text("".join(f"2021-01-{d:02d},{50 + (d * 3) % 4}\n" for d in range(1, 29, 1)))
    code, out, _ = call(capsys, "estimate", "--x", str(a), "--y", str(b), "--format", "prices",
                        "--depth", "1", "--offset", "1")
    assert code == 0 and len(body(out)) == 5
    assert "# offset=1" in out


def test_quantize(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("date,v\n2020-01-01,100\n2020-01-02,102\n2020-01-03,102\n")
    b.write_text("2020-01-01,10\n2020-01-03,9\n")
    assert body(call(capsys, "quantize", "--input", str(a))[1]) == ["symbol", "2", "1"]
    out = call(capsys, "quantize", "--input", str(a), "--pair", str(b))[1]
    assert body(out) == ["date,x,y", "2020-01-03,2,0"]
    assert "# dropped_input=1 dropped_pair=0" in out


def test_delay_scan_small(capsys):
    code, out, _ = call(capsys, "delay-scan", "isi", "--delay", "1", "--depth", "3",
                        "--n", "20000", "--d-max", "3")
    assert code == 0
    assert out.rstrip().endswith("# detected_delay=1")
    assert body(out)[0] == "d,bits"


def test_causality_and_out_file(capsys, tmp_path):
    dest = tmp_path / "c.csv"
    code, out, _ = call(capsys, "causality", "coupled-bsc", "--n", "20000", "--depth", "2",
                        "--out", str(dest))
    assert code == 0 and out == ""
    text = dest.read_text()
    assert "# method=I2" in text and "XcausesY" in text


def test_convergence_small(capsys):
    code, out, _ = call(capsys, "convergence", "coupled-bsc", "--n", "1000", "--seeds", "2",
                        "--methods", "1,3", "--grid", "200,1000")
    rows = body(out)
    assert rows[0] == "method,seed,n,bits,analytic"
    assert len(rows) == 1 + 2 * 2 * 2
    assert "# seeds=2" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ctwdi", "oracle", "coupled-bsc"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "di=0.3578" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "ctwdi", "oracle", "nope"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and "invalid choice" in proc.stderr


def test_parser_builds():
    assert build_parser().prog == "ctwdi"


@pytest.mark.slow
def test_delay_scan_reference_run(capsys):
    code, out, _ = call(capsys, "delay-scan", "isi", "--delay", "2", "--depth", "6", "--n", "100000")
    assert code == 0 and "# detected_delay=2" in out


@pytest.mark.slow
def test_convergence_reference_run(capsys):
    code, out, _ = call(capsys, "convergence", "markov-bsc", "--p", "0.3", "--eps", "0.2",
                        "--depth", "3", "--n", "100000", "--seeds", "3")
    assert code == 0
    rows = body(out)[1:]
    finals = [float(r.split(",")[3]) for r in rows if r.split(",")[2] == "100000"]
    assert len(finals) == 12
    assert all(abs(v - 0.2361) <= 0.05 for v in finals)
