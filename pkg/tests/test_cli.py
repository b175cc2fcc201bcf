import json
import subprocess
import sys

import pytest

from ramsey_workbench.cli import main
from ramsey_workbench.ramsey import ArrowCertificate, revalidate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "argv,code",
    [
        (["enumerate", "rigid-surjections", "--n", "3", "--k", "2"], 0),
        (["enumerate", "terms", "--sig", "g2", "--vars", "2", "--max-shape-len", "6"], 0),
        (["enumerate", "homs", "--src", "SL2", "--dst", "C3"], 0),
        (["enumerate", "epis", "--src", "C3", "--dst", "SL2"], 0),
        (["enumerate", "rigid-epis", "--src", "C3<", "--dst", "SL2<"], 0),
        (["free", "--variety", "semilattices", "--n", "3"], 0),
        (["free", "--variety", "semilattices", "--n", "2", "--ordered"], 0),
        (["free", "--variety", "trivial", "--n", "2", "--ordered"], 3),
        (["free", "--variety", "nosuch", "--n", "2"], 3),
        (["check-arrow", "--C", "3", "--B", "3", "--A", "2", "--k", "2"], 1),
        (["check-arrow", "--C", "3", "--B", "2", "--A", "2", "--k", "2"], 0),
        (["check-arrow", "--C", "8", "--B", "3", "--A", "2", "--k", "2"], 2),
        (["check-arrow", "--C", "6", "--B", "3", "--A", "2", "--k", "2", "--budget", "100000"], 0),
        (["check-arrow", "--C", "3", "--B", "3", "--A", "2", "--k", "0"], 3),
        (["check-arrow", "--C", "3", "--B", "3", "--A", "2", "--budget", "x"], 3),
        (["check-arrow", "--category", "ordered-algebras-re", "--C", "C3<", "--B", "SL2<", "--A", "SL2<", "--k", "2"], 0),
        (["gr-search", "--a", "2", "--b", "3", "--k", "2", "--max-n", "7"], 0),
        (["gr-search", "--a", "2", "--b", "3", "--k", "2", "--max-n", "5"], 2),
        (["degree", "--category", "algebras-epi", "--A", "LZ2", "--objects", "SL2,C3,V3,LZ2,T1,Z2"], 0),
        (["transport", "--variety", "semilattices", "--A", "SL2<", "--B", "SL2<", "--k", "2"], 0),
        (["segment-induction", "--variety", "semilattices", "--A", "SL2<", "--N", "6", "--M", "3"], 0),
        (["segment-induction", "--variety", "semilattices", "--A", "C3<", "--N", "5", "--M", "4", "--budget", "20"], 2),
        (["verify-suite", "--scope", "chains"], 0),
        (["verify-suite", "--scope", "chains", "--inject-mutant"], 1),
        (["nosuch-command"], 3),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_refuting_coloring_is_printed(capsys):
    code, out, _ = run(capsys, "check-arrow", "--C", "3", "--B", "3", "--A", "2", "--k", "2")
    assert "FAILS" in out and "[0, 0, 1]" in out


def test_summaries_name_driving_results(capsys):
    _, out, _ = run(capsys, "gr-search", "--a", "2", "--b", "2", "--k", "2", "--max-n", "3")
    assert "driving result:" in out


def test_json_reports_are_deterministic(capsys):
    argv = ["gr-search", "--a", "2", "--b", "3", "--k", "2", "--max-n", "7", "--json"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    report = json.loads(first)
    assert report["results"]["n"] == 6
    assert "timings" not in report and report["seed"] == 0


def test_timings_only_on_request(capsys):
    out = run(capsys, "enumerate", "rigid-surjections", "--n", "3", "--k", "2", "--json", "--timings")[1]
    assert "timings" in json.loads(out)


def test_inputs_digest_tracks_arguments(capsys):
    a = json.loads(run(capsys, "enumerate", "rigid-surjections", "--n", "3", "--k", "2", "--json")[1])
    b = json.loads(run(capsys, "enumerate", "rigid-surjections", "--n", "4", "--k", "2", "--json")[1])
    assert a["inputs_digest"] != b["inputs_digest"]
    assert a["results"]["count"] == 3 and b["results"]["count"] == 7


def test_certificate_artifact_revalidates(tmp_path, capsys):
    path = tmp_path / "cert.json"
    assert run(capsys, "check-arrow", "--C", "3", "--B", "3", "--A", "2", "--k", "2", "--out", str(path))[0] == 1
    cert = ArrowCertificate.from_json(json.loads(path.read_text()))
    assert revalidate(cert, 3, 3, 2)


def test_coloring_file(tmp_path, capsys):
    refute = tmp_path / "refute.json"
    run(capsys, "check-arrow", "--C", "3", "--B", "3", "--A", "2", "--k", "2", "--out", str(refute))
    coloring = json.loads(refute.read_text())["refuting_coloring"]
    col_path = tmp_path / "coloring.json"
    col_path.write_text(json.dumps(coloring))
    code, out, _ = run(capsys, "check-arrow", "--C", "3", "--B", "3", "--A", "2", "--k", "2", "--coloring", str(col_path))
    assert code == 1
    coloring["entries"][2]["color"] = 0
    col_path.write_text(json.dumps(coloring))
    assert run(capsys, "check-arrow", "--C", "3", "--B", "3", "--A", "2", "--k", "2", "--coloring", str(col_path))[0] == 0


def test_catalog_option(tmp_path, capsys, catalog):
    catalog.save(tmp_path)
    assert run(capsys, "free", "--variety", "semilattices", "--n", "2", "--catalog", str(tmp_path))[0] == 0
    assert run(capsys, "free", "--variety", "semilattices", "--n", "2", "--catalog", str(tmp_path / "absent"))[0] == 3


def test_free_algebra_output(capsys):
    out = run(capsys, "free", "--variety", "semilattices", "--n", "2", "--ordered")[1]
    assert "x1" in out and "g(x1,x2)" in out


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "ramsey_workbench.cli", "enumerate", "rigid-surjections", "--n", "3", "--k", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "count: 3" in proc.stdout
