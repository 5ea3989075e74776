import io
import json
import subprocess
import sys

import pytest

from zetamoments.cli import main, parse_config


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_zeros_small():
    code, text = run(["zeros", "--t-max", "15"])
    assert code == 0
    head, row = text.strip().split("\n")
    assert dict(zip(head.split(","), row.split(",")))["count"] == "1"


def test_zeros_cache_incremental(tmp_path):
    cache = str(tmp_path / "c.txt")
    code, text = run(["zeros", "--t-max", "100", "--cache", cache, "--format", "json"])
    doc = json.loads(text)
    assert code == 0 and doc["count"] == 29 and abs(doc["drift"]) <= doc["drift_bound"]
    first = open(cache).read().split("\n")
    code, _ = run(["zeros", "--t-max", "200", "--cache", cache, "--workers", "2"])
    second = open(cache).read().split("\n")
    assert code == 0
    # every completed record of the first file survives unchanged
    assert second[1:len(first) - 2] == first[1:-2]


def test_extrema_csv():
    code, text = run(["extrema", "--t-max", "30"])
    lines = text.strip().split("\n")
    assert lines[0] == "index,gamma,gamma_plus,lambda,Z_lambda"
    assert len(lines) == 4 and lines[1].startswith("1,14.1347251417")


def test_moments_discrete_and_mixed(tmp_path):
    code, text = run(["moments", "--kind", "discrete", "--k", "1,2", "--t-max", "500"])
    rows = text.strip().split("\n")
    assert code == 0 and len(rows) == 3 and rows[1].startswith("discrete_max,1,")
    code, text = run(["moments", "--kind", "mixed_abs", "--k", "2", "--t-max", "300", "--format", "json"])
    doc = json.loads(text)
    assert doc["identity_residuals"][0]["relative_discrepancy"] < 0.05


def test_moments_empty_k_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        parse_config(["moments", "--k", ""])
    assert exc.value.code == 2


def test_config_file_and_override(tmp_path):
    f = tmp_path / "run.conf"
    f.write_text("# experiment\nt-max = 250\nk = 1,3\nformat = json\nseed = 7\n")
    rc = parse_config(["moments", "--config", str(f), "--seed", "9"])
    assert rc.t_max == 250 and rc.k == [1, 3] and rc.format == "json" and rc.seed == 9


def test_bad_values_rejected():
    with pytest.raises(SystemExit):
        parse_config(["zeros", "--t-max", "2e6"])
    with pytest.raises(SystemExit):
        parse_config(["zeros", "--workers", "0"])


def test_fit_arith():
    code, text = run(["fit", "--arith", "--k", "1", "--xi-max", "1e6"])
    row = dict(zip(*[l.split(",") for l in text.strip().split("\n")]))
    assert code == 0 and abs(float(row["C_k"]) - 1) < 0.05


def test_fit_discrete():
    code, text = run(["fit", "--kind", "discrete", "--k", "1", "--t-max", "1000"])
    lines = text.strip().split("\n")
    assert code == 0 and len(lines) == 6 and lines[-1].endswith("true")


def test_corrupt_cache_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("#zeta-zero-cache v1 tmax=100 tol=1e-11\n1,14.1,x,,\n")
    code, _ = run(["verify", "--cache", str(bad)])
    assert code != 0


def test_verify_deterministic_and_passing():
    code1, a = run(["verify", "--seed", "3"])
    code2, b = run(["verify", "--seed", "3"])
    assert code1 == code2 == 0
    assert a == b
    doc = json.loads(a)
    names = [c["name"] for c in doc["checks"]]
    assert len(names) == len(set(names))
    assert all(c["status"] in ("pass", "report") for c in doc["checks"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "zetamoments", "zeros", "--t-max", "30"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("t_max,count")
