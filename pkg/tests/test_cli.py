import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from pgnlab.cli import (
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_PASS,
    EXIT_USAGE,
    RunConfig,
    UsageError,
    main,
    parse_config,
    split_profile_csv,
)

SMALL = ["--Qmin", "10", "--Qmax", "1000", "--Qpoints", "7"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- configuration --------------------------------------------------------------------

def test_round_trip_defaults():
    cfg = parse_config(["verify", "--target", "alg:-2,0,1@[1,2]"])
    assert parse_config(cfg.argv()) == cfg


@given(
    st.sampled_from(["profile", "exponents", "volume", "approx", "verify"]),
    st.integers(1, 4),
    st.floats(1.5, 1e3),
    st.floats(1.0, 1e4),
    st.integers(1, 80),
    st.one_of(st.none(), st.integers(2, 10 ** 4)),
    st.one_of(st.none(), st.lists(st.integers(2, 500), min_size=1, max_size=5, unique=True).map(sorted)),
    st.floats(1e-4, 1.0),
    st.integers(-5, 5),
    st.booleans(),
    st.sampled_from([None, "csv", "json", "svg", "text"]),
)
@settings(max_examples=80, deadline=None)
def test_round_trip(command, n, qmin, span, points, H, grid, tol, seed, force, fmt):
    cfg = RunConfig(command, target="lac:10,factorial", n=n, Qmin=qmin, Qmax=qmin * span, Qpoints=points,
                    H=H, H_grid=tuple(grid) if grid else None, tol=tol, seed=seed, force=force, format=fmt)
    assert parse_config(cfg.argv()) == cfg


@pytest.mark.parametrize("argv", [
    ["profile"],
    ["bogus", "--target", "rat:1/3"],
    ["profile", "--target", "rat:1/3", "--n", "0"],
    ["profile", "--target", "rat:1/3", "--Qmin", "1"],
    ["profile", "--target", "rat:1/3", "--Qmin", "100", "--Qmax", "10"],
    ["approx", "--target", "rat:1/3", "--H-grid", "5,x"],
    ["profile", "--target", "rat:1/3", "--tol", "-1"],
    ["plot"],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_config(argv)
    assert main(argv) == EXIT_USAGE


def test_bad_target_is_usage_error(capsys):
    code, _, err = run(capsys, "profile", "--target", "alg:1,a@[0,1]")
    assert code == EXIT_USAGE
    assert "position 6" in err


# -- subcommands ---------------------------------------------------------------------------

def test_profile_refuses_rational(capsys):
    code, out, _ = run(capsys, "profile", "--target", "rat:1/3", "--n", "2", *SMALL)
    assert code == EXIT_INCONCLUSIVE
    assert json.loads(out)["verdicts"][0]["status"] == "inconclusive"


def test_profile_csv_deterministic(capsys, tmp_path):
    argv = ["profile", "--target", "alg:-2,0,0,1@[1,2]", "--n", "2", *SMALL, "--seed", "4"]
    code, a, _ = run(capsys, *argv)
    assert code == EXIT_PASS
    _, b, _ = run(capsys, *argv)
    assert a == b
    tables = split_profile_csv(a)
    assert [t.family.value for t in tables] == ["Primal", "LinearForm"]
    assert all(len(t.rows) == 7 for t in tables)


def test_profile_json_and_body_dump(capsys, tmp_path):
    dump = tmp_path / "bodies.json"
    code, out, _ = run(capsys, "profile", "--target", "lac:10,factorial", "--n", "2", *SMALL,
                       "--format", "json", "--dump-body", str(dump))
    assert code == EXIT_PASS
    data = json.loads(out)
    assert set(data) == {"primal", "linear_form"}
    bodies = json.loads(dump.read_text())
    assert len(bodies) == 14 and bodies[0]["family"] == "Primal"


def test_svg_is_xml_with_one_polyline_per_series(capsys):
    code, out, _ = run(capsys, "profile", "--target", "alg:-1,-1,1@[1,2]", "--n", "1", *SMALL, "--format", "svg")
    assert code == EXIT_PASS
    root = ET.fromstring(out)
    polylines = [e for e in root.iter() if e.tag.endswith("polyline")]
    assert len(polylines) == 4
    assert sum("stroke-dasharray" in p.attrib for p in polylines) == 2
    texts = "".join(e.text or "" for e in root.iter() if e.tag.endswith("text"))
    assert "log₁₀ Q" in texts and "ψ" in texts


def test_plot_round_trip(capsys, tmp_path):
    _, csv_text, _ = run(capsys, "profile", "--target", "alg:-1,-1,1@[1,2]", "--n", "1", *SMALL)
    path = tmp_path / "p.csv"
    path.write_text(csv_text)
    code, svg, _ = run(capsys, "plot", "--input", str(path))
    assert code == EXIT_PASS
    _, direct, _ = run(capsys, "profile", "--target", "alg:-1,-1,1@[1,2]", "--n", "1", *SMALL, "--format", "svg")
    assert ET.fromstring(svg) is not None
    assert svg.count("<polyline") == direct.count("<polyline")


def test_plot_empty_csv(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    code, _, err = run(capsys, "plot", "--input", str(path))
    assert code == EXIT_ERROR
    assert "pgnlab:" in err


def test_plot_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "plot", "--input", str(tmp_path / "nope.csv"))
    assert code == EXIT_ERROR


def test_exponents_text(capsys):
    code, out, _ = run(capsys, "exponents", "--target", "alg:-1,-1,1@[1,2]", "--n", "1",
                       "--Qmin", "10", "--Qmax", "1e5", "--Qpoints", "21", "--report", "text")
    assert code in (EXIT_PASS, EXIT_INCONCLUSIVE)
    assert "w'" in out or "w_prime" in out


def test_exponents_refused_for_low_degree(capsys):
    code, out, _ = run(capsys, "exponents", "--target", "alg:-2,0,1@[1,2]", "--n", "2", *SMALL)
    assert code == EXIT_INCONCLUSIVE
    assert "refused" in out


def test_volume_command(capsys):
    code, out, _ = run(capsys, "volume", "--target", "alg:-2,0,0,1@[1,2]", "--n", "2")
    assert code == EXIT_PASS
    data = json.loads(out)
    assert len({c["c_lo"] for c in data["compression"]}) == 1
    assert all(v["status"] == "pass" for v in data["verdicts"])


def test_volume_csv(capsys):
    code, out, _ = run(capsys, "volume", "--target", "rat:1", "--n", "2", "--format", "csv")
    assert code == EXIT_PASS
    assert out.splitlines()[0] == "Q,R,rho,vol_lo,vol_hi,ratio"


def test_volume_needs_n_two(capsys):
    code, _, _ = run(capsys, "volume", "--target", "rat:1", "--n", "1")
    assert code == EXIT_ERROR


def test_approx_command(capsys):
    code, out, _ = run(capsys, "approx", "--target", "alg:-2,0,1@[1,2]", "--n", "1", "--H-grid", "2,5,10,100")
    assert code == EXIT_PASS
    rows = json.loads(out)["rows"]
    assert [r["H"] for r in rows] == [2, 5, 10, 100]
    code, out, _ = run(capsys, "approx", "--target", "alg:-2,0,1@[1,2]", "--n", "1", "--H", "30", "--format", "csv")
    assert out.startswith("H,wstar_lo")


def test_approx_low_height_root(capsys):
    code, out, _ = run(capsys, "approx", "--target", "rat:1/2", "--n", "1", "--H", "5")
    assert code == EXIT_INCONCLUSIVE
    assert "2x - 1" in out


def test_verify_refuses_sqrt2_at_n2(capsys):
    code, out, _ = run(capsys, "verify", "--target", "alg:-2,0,1@[1,2]", "--n", "2", "--Qmax", "1e4",
                       "--Qpoints", "21")
    data = json.loads(out)
    assert code == EXIT_INCONCLUSIVE
    assert data["status"] == "inconclusive"
    assert not [v for v in data["verdicts"] if v["status"] == "fail"]


def test_verify_text_output(capsys, tmp_path):
    path = tmp_path / "v.txt"
    code, out, _ = run(capsys, "verify", "--target", "alg:-1,-1,1@[1,2]", "--n", "1", "--Qpoints", "21",
                       "--report", "text", "--out", str(path))
    assert out == ""
    text = path.read_text()
    assert text.splitlines()[-1].startswith("overall: ")
    assert code in (EXIT_PASS, EXIT_INCONCLUSIVE)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pgnlab.cli", "approx", "--target", "dec:0.3", "--n", "1",
                           "--H", "20"], capture_output=True, text=True)
    assert proc.returncode == EXIT_INCONCLUSIVE
