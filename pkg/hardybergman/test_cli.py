import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from hardybergman import __version__
from hardybergman.cli import (
    _quadrature,
    attach_negative_values,
    build_parser,
    complex_literal,
    load_sequence,
    run,
)
from hardybergman.measures import AtomicParams
from hardybergman.quadrature import DEFAULT_QUADRATURE
from hardybergman.spectral import SpectralFunction, norm_M_spectral

ROOT = Path(__file__).parent.parent
TESTDATA = Path(__file__).parent / "testdata"

KERNEL_ARGS = ["kernel", "--space", "atomic", "--a", "2", "--rho", "1", "--w", "1,0"]
ZEROSET_ARGS = ["zeroset", "--seq", "arith:1", "--count", "10000", "--Rmax", "1000"]


def run_module(*argv):
    return subprocess.run(
        [sys.executable, "-m", "hardybergman.cli", *argv],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )


def run_json(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, json.loads(out.getvalue())


@pytest.fixture
def measure_file(tmp_path):
    def write(document):
        path = tmp_path / "measure.json"
        path.write_text(json.dumps(document))
        return str(path)

    return write


@pytest.mark.parametrize(
    "name, argv, code",
    [
        ("kernel_atomic", KERNEL_ARGS + ["--z", "1,0"], 0),
        ("kernel_domain_error", KERNEL_ARGS + ["--z", "-1,0"], 1),
        ("zeroset_arith", ZEROSET_ARGS, 0),
    ],
)
def test_golden_reports(name, argv, code, regen_goldens):
    golden = TESTDATA / f"{name}.json"
    result = run_module(*argv)
    assert result.returncode == code, result.stderr
    # Missing goldens are recorded on the first run.
    if regen_goldens or not golden.exists():
        golden.write_text(result.stdout)
    assert result.stdout == golden.read_text()


def test_reports_are_deterministic():
    first, second = run_module(*ZEROSET_ARGS), run_module(*ZEROSET_ARGS)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout


def test_metadata_is_optional():
    code, report = run_json(*KERNEL_ARGS, "--z", "1,0", "--metadata")
    assert code == 0
    assert report.pop("metadata") == {"version": __version__}
    assert report == json.loads((TESTDATA / "kernel_atomic.json").read_text())


def test_usage_errors_exit_2():
    result = run_module("kernel", "--z", "1,x", "--w", "1,0")
    assert result.returncode == 2
    assert "re,im" in result.stderr
    assert result.stdout == ""
    assert run_module("no-such-command").returncode == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["zeroset", "--seq", "arith:1", "--Rmax", "100"],
        ["zeroset", "--seq", "missing-file.txt", "--Rmax", "100"],
        ["norm", "--psi", "missing-file.json"],
        ["kernel", "--a", "-1", "--z", "1", "--w", "1"],
        ["pathology", "fk-norm", "--order", "1"],
    ],
)
def test_unusable_inputs_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        run(argv, stdout=io.StringIO())
    assert info.value.code == 2


@pytest.mark.parametrize(
    "text, want",
    [
        ("1,0", 1 + 0j),
        ("-1,0", -1 + 0j),
        (" 0.5 , -2 ", 0.5 - 2j),
        ("3", 3 + 0j),
        ("1e-3,1e3", 1e-3 + 1e3j),
    ],
)
def test_complex_literal(text, want):
    assert complex_literal(text) == want


@pytest.mark.parametrize("text", ["", "1,2,3", "a,b", "1;2"])
def test_complex_literal_rejects(text):
    with pytest.raises(Exception, match="re,im"):
        complex_literal(text)


@pytest.mark.parametrize(
    "argv, want",
    [
        (["--z", "-1,0"], ["--z=-1,0"]),
        (["--y", "-0.5", "--count", "3"], ["--y=-0.5", "--count", "3"]),
        (["--metadata", "--z", "-.5,1"], ["--metadata", "--z=-.5,1"]),
        (["--z=-1,0"], ["--z=-1,0"]),
        (["-h"], ["-h"]),
    ],
)
def test_attach_negative_values(argv, want):
    assert attach_negative_values(argv) == want


def test_negative_complex_flag_parses():
    argv = attach_negative_values(["pathology", "limit", "--z", "-0,-1"])
    args = build_parser().parse_args(argv)
    assert args.z == -1j


def test_flag_defaults_match_library():
    args = build_parser().parse_args(["norm", "--psi", "psi.json"])
    assert _quadrature(args) == DEFAULT_QUADRATURE


def test_load_sequence_file(tmp_path):
    path = tmp_path / "points.txt"
    path.write_text("# re im\n1.0, 2.0\n\n3 -1\n0.5;0  # on the axis\n")
    s = load_sequence(str(path), None)
    assert sorted(s.points.tolist(), key=abs) == [0.5, 1 + 2j, 3 - 1j]


def test_kernel_spaces():
    code, report = run_json("kernel", "--space", "hardy", "--z", "1,1", "--w", "1,1")
    assert code == 0
    assert report["results"]["value"]["re"] == pytest.approx(
        1 / (4 * math.pi), rel=1e-11
    )


def test_zen_kernel(measure_file):
    path = measure_file({"atoms": [{"x": 0.0, "mass": 1.0}]})
    code, report = run_json("zen-kernel", "--measure", path, "--z", "1,0", "--w", "1,0")
    assert code == 0
    assert report["results"]["value"]["re"] == pytest.approx(
        1 / (4 * math.pi), rel=1e-10
    )
    assert report["inputs"]["target_rel_error"] == DEFAULT_QUADRATURE.target_rel_error


def test_zen_kernel_empty_measure(measure_file):
    code, report = run_json(
        "zen-kernel", "--measure", measure_file({}), "--z", "1,0", "--w", "1,0"
    )
    assert code == 1
    assert report["error"]["category"] == "singular-weight"


def test_norm(tmp_path):
    path = tmp_path / "psi.json"
    path.write_text(json.dumps({"grid": [-1, 0], "re": [1, 1], "im": [0, 0]}))
    code, report = run_json("norm", "--psi", str(path))
    assert code == 0
    want = norm_M_spectral(SpectralFunction.indicator(-1, 0), AtomicParams(2, 1))
    assert report["results"]["norm"] == pytest.approx(want, rel=1e-11)


def test_zeroset_report(tmp_path):
    csv_path = tmp_path / "carleman.csv"
    code, report = run_json(
        "zeroset",
        "--seq",
        "arith:1",
        "--count",
        "10000",
        "--Rmax",
        "1000",
        "--csv",
        str(csv_path),
    )
    assert code == 0
    results = report["results"]
    assert results["carleman_ratio"] == pytest.approx(1.0836, abs=1e-3)
    assert results["verdict"] == "uniqueness_set"
    assert results["threshold_space"] == "M^2_{2,1}"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "R,ratio"
    assert len(lines) == 257


def test_zeroset_too_few_points():
    code, report = run_json(
        "zeroset", "--seq", "geom:2", "--count", "30", "--Rmax", "1e6"
    )
    assert code == 1
    assert report["error"]["category"] == "insufficient-data"
    assert "at least 100" in report["error"]["message"]


def test_doubling(measure_file):
    path = measure_file({"density": {"grid": [0, 1e5], "values": [1, 1]}})
    code, report = run_json("doubling", "--measure", path, "--R", "2.5")
    assert code == 0
    assert report["results"]["sup_estimate"] == pytest.approx(2)
    assert report["results"]["passed"] is True
    assert len(report["series"]["rows"]) == 61


def test_doubling_zero_mass(measure_file):
    path = measure_file({"atoms": [{"x": 1.0, "mass": 1.0}]})
    code, report = run_json("doubling", "--measure", path, "--R", "2")
    assert code == 1
    assert report["error"]["category"] == "zero-mass"


def test_projection_series(tmp_path):
    csv_path = tmp_path / "terms.csv"
    code, report = run_json(
        "pathology", "projection", "--p", "4", "--N", "40", "--csv", str(csv_path)
    )
    assert code == 0
    assert report["command"] == "pathology projection"
    assert report["results"]["verdict"] == "diverging"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "n,log_term,log_partial_sum"
    assert len(lines) == 42
    assert lines[1].startswith("0,")


def test_truncation_is_reported():
    code, report = run_json("pathology", "projection", "--p", "2", "--N", "3")
    assert code == 0
    assert any("truncated at N=3" in w for w in report["warnings"])
    code, report = run_json(
        "pathology", "projection", "--p", "2", "--N", "3", "--on-truncation", "error"
    )
    assert code == 1
    assert report["error"]["category"] == "truncation"


def test_fk_growth():
    code, report = run_json("pathology", "fk-growth", "--q", "3", "--y", "-0.5")
    assert code == 0
    assert report["results"]["l0"] == 2
    assert report["results"]["monotone"] is True
    assert [row[0] for row in report["series"]["rows"]] == [8, 14, 20, 26, 32, 38]


def test_fk_norm():
    code, report = run_json("pathology", "fk-norm", "--k", "1", "--k", "2", "--N", "10")
    assert code == 0
    assert report["results"]["strictly_decreasing"] is True
    rows = report["series"]["rows"]
    assert [row[0] for row in rows] == [1, 2]
    for _, direct, closed, _ in rows:
        assert direct == pytest.approx(closed, rel=1e-5)


def test_limit():
    code, report = run_json("pathology", "limit", "--k-max", "3", "--N", "4")
    assert code == 0
    assert report["results"]["mean_value_defect"] > 0.1
    assert report["results"]["limit"] == {
        "re": pytest.approx(0.1 / 1.01, rel=1e-9),
        "im": pytest.approx(1 / 1.01, rel=1e-9),
    }


def test_csv_io_error(tmp_path):
    csv_path = tmp_path / "missing" / "out.csv"
    code, report = run_json("pathology", "fk-growth", "--csv", str(csv_path))
    assert code == 1
    assert report["error"]["category"] == "io"
    assert str(csv_path) in report["error"]["message"]
