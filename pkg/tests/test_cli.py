import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from srhg.cli import BENCH_FIELDS, main
from srhg.sinks import BINARY_MAGIC, BinaryWriter, read_binary_edges, read_text_edges
from srhg.stats import CSV_FIELDS, fingerprint

BASE = ["-n", "1000", "--gamma", "3", "--avg-degree", "16", "--seed", "42", "--chunks", "4"]


def _run(capsysbinary, *args):
    code = main(list(args))
    out = capsysbinary.readouterr()
    return code, out.out, out.err


def test_fingerprint_format(capsysbinary):
    code, out, err = _run(capsysbinary, "generate", *BASE, "--format", "fingerprint", "--workers", "1")
    assert code == 0
    assert out.endswith(b"\n") and out.strip().isdigit()
    assert b"fingerprint=" + out.strip() in err
    _, out8, _ = _run(capsysbinary, "generate", *BASE, "--format", "fingerprint", "--workers", "8")
    assert out8 == out


def test_text_format(capsysbinary):
    code, out, _ = _run(capsysbinary, "generate", *BASE, "--workers", "2", "-q")
    assert code == 0
    lines = out.decode("ascii").split("\n")
    assert lines[-1] == ""
    for ln in lines[:-1]:
        u, v = ln.split(" ")
        assert ln == ln.strip() and int(u) < int(v)
    edges = read_text_edges(lines)
    _, fp, _ = _run(capsysbinary, "generate", *BASE, "--format", "fingerprint", "-q")
    assert fingerprint(edges) == int(fp)


def test_binary_format_matches_text(capsysbinary, tmp_path):
    path = tmp_path / "g.bin"
    code, out, _ = _run(capsysbinary, "generate", *BASE, "--format", "binary", "-o", str(path), "-q")
    assert code == 0 and out == b""
    data = path.read_bytes()
    assert data[:8] == BINARY_MAGIC
    _, text, _ = _run(capsysbinary, "generate", *BASE, "-q")
    assert np.array_equal(read_binary_edges(io.BytesIO(data)), read_text_edges(text.decode().splitlines()))
    with pytest.raises(ValueError):
        read_binary_edges(io.BytesIO(b"XXXX0001" + data[8:]))


def test_binary_writer_layout():
    buf = io.BytesIO()
    BinaryWriter(buf).push(np.array([[1, 2], [3, 2**40]]))
    raw = buf.getvalue()
    assert raw[:8] == b"RHGE0001"
    assert raw[8:] == np.array([1, 2, 3, 2**40], dtype="<u8").tobytes()


def test_none_format(capsysbinary):
    code, out, err = _run(capsysbinary, "generate", *BASE, "--format", "none")
    assert code == 0 and out == b"" and b"m=" in err


def test_repeated_runs_byte_identical():
    cmd = [sys.executable, "-m", "srhg", "generate", *BASE, "-q"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and len(a) > 0


def test_flag_groups_are_exclusive(capsysbinary):
    with pytest.raises(SystemExit) as e:
        main(["generate", "-n", "10", "--gamma", "3", "--alpha", "1", "--avg-degree", "4"])
    assert e.value.code == 2
    with pytest.raises(SystemExit):
        main(["generate", "-n", "10", "--gamma", "3"])
    with pytest.raises(SystemExit):
        main(["generate", "-n", "0", "--gamma", "3", "-C", "1"])
    capsysbinary.readouterr()


def test_bad_parameters_exit_nonzero(capsysbinary):
    code, _, err = _run(capsysbinary, "generate", "-n", "10", "--gamma", "1.5", "--avg-degree", "4")
    assert code == 1 and b"error" in err


def test_radial_const_flag(capsysbinary):
    code, _, err = _run(capsysbinary, "generate", "-n", "500", "--alpha", "0.75", "-C", "-1",
                        "--format", "none", "--chunks", "1")
    assert code == 0 and b"C=-1.0" in err


def test_verify(capsys):
    for seed in range(3):
        assert main(["verify", "-n", "500", "--gamma", "3", "--avg-degree", "8", "--chunks", "4",
                     "--seed", str(seed)]) == 0
        assert "OK" in capsys.readouterr().out
    assert main(["verify", "-n", "500", "--gamma", "3", "--avg-degree", "8", "--chunks", "4",
                 "--inject-fault", "3"]) != 0
    assert "MISMATCH" in capsys.readouterr().out
    assert main(["verify", "-n", "1000000", "--gamma", "3", "--avg-degree", "8"]) != 0
    assert "oracle limit" in capsys.readouterr().err


def test_stats_csv_and_plots(capsys, tmp_path):
    code = main(["stats", "-n", "20000", "--gamma", "2.6", "--avg-degree", "10", "--chunks", "2",
                 "--plot-dir", str(tmp_path), "--annulus-csv", str(tmp_path / "ann.csv"), "-q"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1 and tuple(rows[0]) == CSV_FIELDS
    assert int(rows[0]["n"]) == 20000
    for name in ("degree_ccdf.png", "annulus_overestimation.png"):
        assert (tmp_path / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert (tmp_path / "ann.csv").read_text().startswith("annulus,")


def test_bench_rows(capsys, tmp_path):
    code = main(["bench", "--sizes", "2000", "5000", "--avg-degrees", "4", "16", "--gammas", "2.5", "3",
                 "--workers", "1", "--plot-dir", str(tmp_path)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 2 * 2 * 2
    assert tuple(rows[0]) == BENCH_FIELDS
    assert all(float(r["edges_per_sec"]) > 0 for r in rows)
    assert (tmp_path / "throughput.png").exists()


# frozen from the naive oracle on the same points
@pytest.mark.parametrize("chunks,expected", [("1", b"5671291\n"), ("4", b"5325313\n")])
def test_fingerprint_frozen(capsysbinary, chunks, expected):
    _, out, _ = _run(capsysbinary, "generate", "-n", "1000", "--gamma", "3", "--avg-degree", "16",
                     "--seed", "42", "--chunks", chunks, "--format", "fingerprint", "-q")
    assert out == expected
