import csv
import io

import pytest

from cachecomp.cli import HEADER, main


def run(args):
    buf = io.StringIO()
    code = main(args, buf)
    return code, buf.getvalue()


def rows(text):
    r = list(csv.reader(io.StringIO(text)))
    assert r[0] == HEADER
    return r[1:]


def test_threshold_sweep_simulated():
    code, out = run(["coverage", "--method", "simulated", "--scheme", "comp-cauchy",
                     "--sweep", "sir_threshold_db:-10:10:2", "--trials", "400", "--seed", "7"])
    assert code == 0
    body = rows(out)
    assert len(body) == 11
    vals = [float(r[4]) for r in body]
    assert vals == sorted(vals, reverse=True)
    for r in body:
        assert float(r[5]) <= float(r[4]) <= float(r[6])
        assert r[7] == "400" and r[8] == "7"


def test_caching_sweep_analytic():
    code, out = run(["coverage", "--method", "analytic", "--sweep", "c_f:0.2:1.0:0.2",
                     "--n-geom", "60", "--seed", "1", "--config", "tableI"])
    assert code == 0
    vals = [float(r[4]) for r in rows(out)]
    assert len(vals) == 5


def test_cluster_sweep_two_schemes():
    code, out = run(["coverage", "--sweep", "r_cluster:50:400:50", "--scheme", "comp-exact",
                     "--scheme", "ground-user", "--trials", "150"])
    assert code == 0
    body = rows(out)
    assert len(body) == 16
    assert [float(r[1]) for r in body[::2]] == [50.0 * k for k in range(1, 9)]


def test_byte_identical():
    args = ["coverage", "--trials", "200", "--seed", "3", "--scheme", "nearest-sbs"]
    assert run(args) == run(args)


@pytest.mark.parametrize("args", [
    ["coverage", "--sweep", "sir_threshold_db:5:-5:1"],
    ["coverage", "--sweep", "bogus:0:1:1"],
    ["coverage", "--sweep", "c_f:0:1"],
    ["coverage", "--method", "analytic", "--scheme", "nearest-sbs"],
    ["coverage", "--config", "/no/such/file"],
    ["coverage", "--kappa-max", "3"],
    ["gain-pdf", "--realizations", "0"],
    ["gain-pdf", "--servers", "10,abc"],
    ["coverage", "--scheme", "telepathy"],
])
def test_usage_errors(args, capsys):
    code, out = run(args)
    assert code == 2
    assert out == ""


def test_bad_config_value(tmp_path):
    f = tmp_path / "bad.cfg"
    f.write_text("c_f = 1.5\n")
    assert run(["coverage", "--config", str(f)])[0] == 2


def test_numeric_failure_exit_code():
    code, _ = run(["coverage", "--method", "analytic", "--v-max", "20000", "--n-geom", "20",
                   "--sweep", "sir_threshold_db:20:20:1"])
    assert code == 3


def test_gain_pdf_output():
    code, out = run(["gain-pdf", "--bins", "30", "--realizations", "20000", "--seed", "2"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "bin_center,empirical_density,matched_gamma_density"
    assert len(lines) == 32 and lines[-1].startswith("# ks_distance=")
    ks = float(lines[-1].split()[1].split("=")[1])
    assert ks < 0.05


def test_gain_pdf_forced_single_server():
    code, out = run(["gain-pdf", "--servers", "40", "--realizations", "20000", "--seed", "4"])
    assert code == 0
    tail = out.strip().split("\n")[-1]
    assert float(tail.split()[2].split("=")[1]) > 0.01
