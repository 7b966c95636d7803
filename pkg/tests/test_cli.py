import json
import math
import shutil
import subprocess

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nevlab import measure_io
from nevlab.cli import main, parse_grid, UsageError
from nevlab.core import NevanlinnaData, make_measure


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = text.strip().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        measure_io.write_measure(obj, path)
        return str(path)

    return {
        "bern": write("bern.json", make_measure([-1.0, 1.0], [0.5, 0.5])),
        "d0": write("d0.json", make_measure([0.0], [1.0])),
        "d1": write("d1.json", make_measure([1.0], [1.0])),
        "d2": write("d2.json", make_measure([2.0], [1.0])),
        "nev": write("nev.json", NevanlinnaData(2.0, make_measure([0.0], [3.0]))),
        "three": write("three.json", make_measure([0.0, 1.0, 2.0], [1, 1, 1])),
        "dir": str(tmp_path),
    }


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("0.5:2:4"), [0.5, 1.0, 1.5, 2.0])
    assert list(parse_grid("1:1:1")) == [1.0]
    for bad in ("1:2", "a:b:c", "1:2:0"):
        with pytest.raises(UsageError):
            parse_grid(bad)


def test_eval_charfn(capsys, files):
    code, out, _ = run(capsys, "eval", "charfn", "--measure", files["bern"], "--t-grid", "1:1:1")
    assert code == 0
    header, body = rows(out)
    assert header == "t,re,im"
    assert body[0][0] == "1" and body[0][2] == "0"
    assert float(body[0][1]) == pytest.approx(math.cos(1.0), abs=1e-16)
    assert body[0][1].startswith("0.5403")


def test_eval_cauchy(capsys, files):
    code, out, _ = run(capsys, "eval", "cauchy", "--measure", files["d0"], "--t-grid", "1:1:1")
    assert code == 0 and out == "t,re,im\n1,0,-1\n"


def test_eval_nevanlinna_and_laplace(capsys, files):
    code, out, _ = run(capsys, "eval", "nevanlinna", "--measure", files["nev"], "--t-grid", "1:1:1")
    assert code == 0 and out == "t,re,im\n1,2,-3\n"
    code, out, _ = run(capsys, "eval", "laplace", "--measure", files["d0"], "--w-grid", "2:2:1")
    assert code == 0 and out == "w,re,im\n2,0.5,0\n"
    code, out, _ = run(capsys, "eval", "theorem1", "--measure", files["d0"], "--w-grid", "4:4:1")
    assert code == 0
    assert float(rows(out)[1][0][1]) == pytest.approx(0.25, abs=1e-15)


def test_eval_domain_errors(capsys, files):
    code, _, err = run(capsys, "eval", "cauchy", "--measure", files["d0"], "--t-grid=-1:1:3")
    assert code == 3 and "domain" in err
    code, _, _ = run(capsys, "eval", "theorem1", "--measure", files["d0"], "--w-grid", "1:1:1")
    assert code == 3


def test_parse_errors(capsys, files, tmp_path):
    assert run(capsys, "eval", "cauchy", "--measure", files["d0"], "--t-grid", "1:x:2")[0] == 2
    assert run(capsys, "eval", "cauchy", "--measure", files["d0"])[0] == 2
    assert run(capsys, "eval", "cauchy", "--measure", str(tmp_path / "missing.json"), "--t-grid", "1:1:1")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"atoms": [1, 2], "weights": [1]}')
    assert run(capsys, "eval", "cauchy", "--measure", str(bad), "--t-grid", "1:1:1")[0] == 2
    bad.write_text('{"atoms": [1], "weights": [1], "extra": 0}')
    assert run(capsys, "eval", "cauchy", "--measure", str(bad), "--t-grid", "1:1:1")[0] == 2
    bad.write_text("not json")
    assert run(capsys, "eval", "cauchy", "--measure", str(bad), "--t-grid", "1:1:1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["eval", "bogus"])
    assert exc.value.code == 2


def test_convolve_boolean(capsys, files):
    code, out, _ = run(capsys, "convolve", "boolean", files["bern"], files["bern"])
    assert code == 0
    m = measure_io.loads(out)
    np.testing.assert_allclose(m.atoms, [-math.sqrt(2), math.sqrt(2)], atol=1e-12)
    np.testing.assert_allclose(m.weights, [0.5, 0.5], atol=1e-12)


def test_convolve_booleanpow(capsys, files):
    code, out, _ = run(capsys, "convolve", "booleanpow", files["bern"], "--power", "0.5")
    assert code == 0
    m = measure_io.loads(out)
    np.testing.assert_allclose(m.atoms, [-math.sqrt(0.5), math.sqrt(0.5)], atol=1e-12)
    assert run(capsys, "convolve", "booleanpow", files["bern"])[0] == 2
    assert run(capsys, "convolve", "booleanpow", files["bern"], "--power", "-1")[0] == 3


def test_convolve_free(capsys, files):
    code, out, _ = run(capsys, "convolve", "free", files["d1"], files["d2"], "--t-grid", "1:1:1")
    assert code == 0 and out == "t,re,im\n1,-3,1\n"
    assert run(capsys, "convolve", "free", files["d1"], files["d2"])[0] == 2
    assert run(capsys, "convolve", "free", files["d1"], files["d2"], "--t-grid=-1:1:3")[0] == 3
    assert run(capsys, "convolve", "boolean", files["d1"])[0] == 2


def test_convolve_rejects_non_probability(capsys, files):
    assert run(capsys, "convolve", "boolean", files["nev"], files["d1"])[0] == 3


def test_invert_constants(capsys, files):
    code, out, _ = run(capsys, "invert", "--measure", files["nev"])
    assert code == 0 and json.loads(out) == {"a": 2.0, "total_mass": 3.0}
    code, out, _ = run(capsys, "invert", "--measure", files["d0"], "--w-grid", "2:4:2")
    assert code == 0
    header, body = rows(out)
    assert header == "w,lhs_re,lhs_im,rhs_re,rhs_im"
    for w, lre, lim, rre, rim in body:
        assert float(lre) == pytest.approx(1 / float(w)) and float(rre) == pytest.approx(1 / float(w))


def test_invert_samples(capsys, files, tmp_path):
    csv = tmp_path / "g.csv"
    code, _, _ = run(capsys, "eval", "cauchy", "--measure", files["bern"], "--t-grid", "0.5:2:4", "--out", str(csv))
    assert code == 0
    code, out, _ = run(capsys, "invert", "--samples", str(csv), "--degree-hint", "2")
    assert code == 0
    m = measure_io.loads(out)
    np.testing.assert_allclose(m.atoms, [-1, 1], atol=1e-8)
    np.testing.assert_allclose(m.weights, [0.5, 0.5], atol=1e-8)
    assert run(capsys, "invert", "--samples", str(csv))[0] == 2


def test_decompose(capsys, files):
    code, out, _ = run(capsys, "decompose", "--measure", files["three"])
    assert code == 0
    doc = json.loads(out)
    xis = np.array(doc["atoms"])
    np.testing.assert_allclose(xis, [1 - 1 / math.sqrt(3), 1 + 1 / math.sqrt(3)], atol=1e-14)
    np.testing.assert_allclose(np.array(doc["weights"]) * (1 + xis**2), [1 / 3, 1 / 3], atol=1e-10)
    code, out, _ = run(capsys, "decompose", "--measure", files["three"], "--steps", "2")
    assert code == 0 and json.loads(out)[1]["atoms"] == pytest.approx([1.0], abs=1e-14)
    assert run(capsys, "decompose", "--measure", files["d1"])[0] == 3
    assert run(capsys, "decompose", "--measure", files["bern"], "--steps", "2")[0] == 3


def test_out_flag(capsys, files, tmp_path):
    target = tmp_path / "o.csv"
    code, out, _ = run(capsys, "eval", "cauchy", "--measure", files["d0"], "--t-grid", "1:1:1", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == "t,re,im\n1,0,-1\n"


def test_csv_is_stable(capsys, files):
    argv = ("eval", "selfenergy", "--measure", files["three"], "--t-grid", "0.1:5:17")
    first = run(capsys, *argv)[1]
    assert all(run(capsys, *argv)[1] == first for _ in range(3))


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "example", "--seed", "7")
    assert code == 0 and "example_identity" in out
    assert run(capsys, "verify", "theorem1", "--seed", "7")[0] == 0


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify", "all", "--seed", "7")
    assert code == 0
    lines = out.strip().splitlines()
    statuses = [line.split()[2] for line in lines[1:-1]]
    assert statuses and set(statuses) == {"pass"}
    passed, total = lines[-1].split()[0].split("/")
    assert passed == total == str(len(statuses))


finite = st.floats(-1e6, 1e6, allow_nan=False).filter(lambda x: x != 0)


@settings(deadline=None)
@given(
    st.lists(finite, min_size=1, max_size=8, unique=True),
    st.lists(st.floats(1e-6, 1e3), min_size=8, max_size=8),
    st.one_of(st.none(), st.floats(-1e3, 1e3)),
)
def test_measure_file_round_trip(atoms, weights, a):
    m = make_measure(atoms, weights[: len(atoms)])
    obj = m if a is None else NevanlinnaData(a, m)
    back = measure_io.loads(measure_io.dumps(obj))
    assert back == obj
    assert measure_io.dumps(back) == measure_io.dumps(obj)


def test_measure_file_round_trip_on_disk(tmp_path):
    m = make_measure([0.1, 1 / 3, -2e-300, 7e200], [0.1, 0.2, 0.3, 0.4])
    path = tmp_path / "m.json"
    measure_io.write_measure(m, path)
    first = path.read_bytes()
    back = measure_io.read_measure(path)
    assert back == m
    measure_io.write_measure(back, path)
    assert path.read_bytes() == first


@pytest.mark.skipif(shutil.which("nevlab") is None, reason="console script not installed")
def test_console_script(files):
    proc = subprocess.run(
        ["nevlab", "eval", "cauchy", "--measure", files["d0"], "--t-grid", "1:1:1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "t,re,im\n1,0,-1\n"
