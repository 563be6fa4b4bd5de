import json
import subprocess
import sys

import pytest

from mvcovh.cli import main
from mvcovh.harness import read_trace
from mvcovh.mvdata import load_manifest, read_matrix_csv


@pytest.fixture(scope="module")
def manifest(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out", str(out), "--clusters", "3", "--samples", "45",
                 "--dims", "4,5", "--separation", "10", "--noise", "0.5", "--seed", "1"]) == 0
    return out / "manifest.json"


FAST = ["--clusters", "3", "--hidden-dim", "2", "--max-iter", "30", "--nmf-max-iter", "30"]


def run(args, tmp_path, name):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out


def test_synth(manifest):
    ds = load_manifest(manifest)
    assert ds.K == 2 and ds.N == 45
    rep = json.loads((manifest.parent / "report.json").read_text())
    assert rep["class_sizes"] == [15, 15, 15]
    assert "wall_clock_seconds" in json.loads((manifest.parent / "timing.json").read_text())


def test_extract_hidden(manifest, tmp_path):
    code, out = run(["extract-hidden", "--manifest", str(manifest), "--hidden-dim", "2",
                     "--max-iter", "20"], tmp_path, "h")
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["r"] == 2 and abs(sum(rep["q"]) - 1) < 1e-12
    assert read_matrix_csv(out / "hidden_H.csv").shape == (2, 45)
    assert read_trace(out / "trace.csv") == rep["objective_trace"]
    assert (out / "W_0.csv").exists() and (out / "W_1.csv").exists()


def test_fit(manifest, tmp_path):
    code, out = run(["fit", "--manifest", str(manifest)] + FAST, tmp_path, "f")
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assignment = [int(v) for v in (out / "assignment.csv").read_text().split()]
    assert len(assignment) == 45 and set(assignment) == {0, 1, 2}
    assert rep["metrics"]["nmi"] > 0.9
    assert read_matrix_csv(out / "centers_hidden.csv").shape == (2, 3)
    assert read_matrix_csv(out / "centers_view1.csv").shape == (5, 3)
    trace = read_trace(out / "trace.csv")
    assert all(b <= a + 1e-9 * abs(a) for a, b in zip(trace, trace[1:]))


def test_eval_assignment(manifest, tmp_path):
    labels = load_manifest(manifest).labels
    path = tmp_path / "a.csv"
    path.write_text("".join(f"{v}\n" for v in labels))
    code, out = run(["eval", "--manifest", str(manifest), "--assignment", str(path)]
                    + FAST, tmp_path, "e")
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["nmi"] == pytest.approx(1.0) and rep["rand_index"] == 1.0


def test_eval_repeats(manifest, tmp_path):
    code, out = run(["eval", "--manifest", str(manifest), "--repeats", "2"] + FAST,
                    tmp_path, "r")
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["repeats"] == 2 and len(rep["runs"]) == 2


def test_sweep_beta(manifest, tmp_path):
    code, out = run(["sweep-beta", "--manifest", str(manifest), "--repeats", "1",
                     "--beta-grid", "0,0.5,1"] + FAST, tmp_path, "s")
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("beta,nmi_mean") and len(lines) == 4


def test_grid(manifest, tmp_path):
    code, out = run(["grid", "--manifest", str(manifest), "--repeats", "1",
                     "--eta-grid", "1", "--beta-grid", "0.5,1", "--r-grid", "2",
                     "--lambda-grid", "1"] + FAST, tmp_path, "g")
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert len(rep["cells"]) == 2 and rep["best_cell"]["hidden_fits"] == 1


def test_ablate(manifest, tmp_path):
    code, out = run(["ablate", "--manifest", str(manifest), "--repeats", "2"] + FAST,
                    tmp_path, "a")
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["without_hidden"]["beta"] == 0.0 and rep["with_hidden"]["beta"] == 0.5


def test_missing_manifest_is_json_error(tmp_path, capsys):
    code, _ = run(["fit", "--manifest", str(tmp_path / "nope.json")] + FAST, tmp_path, "x")
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "ManifestNotFoundError"


def test_bad_parameter_is_json_error(manifest, tmp_path, capsys):
    code, _ = run(["fit", "--manifest", str(manifest), "--clusters", "3", "--beta", "2"],
                  tmp_path, "x")
    assert code == 1
    assert "error" in json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_usage_error_exit_code(capsys):
    assert main(["fit"]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "UsageError"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mvcovh", "bogus"], capture_output=True,
                          text=True)
    assert proc.returncode == 2
