import io
import json
import os
import sys
from contextlib import redirect_stdout

import pytest

from brfibre.cli import main

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
MODELS = os.path.join(GOLDEN, "models")


def run_cli(*args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(args))
    return code, buf.getvalue()


def model_path(name):
    return os.path.join(MODELS, name)


def golden(name):
    with open(os.path.join(GOLDEN, name)) as fh:
        return fh.read()


def test_classify_dp1_golden():
    code, out = run_cli("classify", model_path("dp1_f11.model"))
    assert code == 0
    assert out == golden("classify_dp1_f11.txt")


def test_classify_dp3_golden():
    code, out = run_cli("classify", model_path("cubic_3a2_f13.model"))
    assert code == 0
    assert out == golden("classify_cubic_3a2_f13.txt")


def test_classify_smooth_fibre():
    code, out = run_cli("classify", model_path("quartic_curve_f17.model"))
    assert code == 0
    assert "singularity_type = smooth" in out
    assert "brauer_table = n/a (smooth special fibre)" in out


def test_evaluate_quartic_golden():
    code, out = run_cli("evaluate", model_path("quartic_f17.model"), "--k", "1")
    assert code == 0
    assert out == golden("evaluate_quartic_f17_k1.txt")


def test_count_quartic_golden():
    code, out = run_cli("count", model_path("quartic_f17.model"), "--k", "1,2")
    assert code == 0
    assert out == golden("count_quartic_f17.txt")


def test_bound_golden():
    code, out = run_cli("bound", "--genus", "3", "--cover-degree", "2",
                        "--q", "17,289,4913", "--quartic-prime", "17")
    assert code == 0
    assert out == golden("bound_g3_n2.txt")


def test_verdict_quartic_golden():
    code, out = run_cli("verdict", "diagonal-quartic",
                        "--coefficients", "1,47,-103,-82297",
                        "--prime", "17",
                        "--model", model_path("quartic_f17.model"),
                        "--other-places-trivial")
    assert code == 0
    assert out == golden("verdict_quartic_p17.txt")
    assert "verdict = LocalObstructionWitness" in out


def test_goldens_byte_stable_across_runs():
    for args in (("classify", model_path("dp1_f11.model")),
                 ("evaluate", model_path("quartic_f17.model"), "--k", "1")):
        _, first = run_cli(*args)
        _, second = run_cli(*args)
        assert first == second


def test_verdict_cubic_family():
    code, out = run_cli("verdict", "diagonal-cubic",
                        "--coefficients", "1,1,1,1001", "--prime", "13")
    assert code == 0
    assert "verdict = NoObstructionViaProlific" in out
    assert "vacuous for genus 1" in out


def test_verdict_quartic_assumed_order():
    code, out = run_cli("verdict", "diagonal-quartic",
                        "--coefficients", "1,1,1,1009",
                        "--prime", "1009", "--assume-br-order", "2")
    assert code == 0
    assert "verdict = NoObstructionViaProlific" in out
    assert "ASSUMED order N = 2" in out
    assert "assume_br_order = 2" in out


def test_verdict_quartic_threshold_fails_without_assumption():
    code, out = run_cli("verdict", "diagonal-quartic",
                        "--coefficients", "1,1,1,1009", "--prime", "1009")
    assert code == 0
    assert "verdict = Inconclusive" in out


def test_verdict_cone_cubic(tmp_path):
    path = os.path.join(tmp_path, "cone_cubic.model")
    with open(path, "w") as fh:
        fh.write("""
[model]
label = cone_cubic_f13
[ambient]
vars = X0, X1, X2, X3
weights = 1, 1, 1, 1
[equation]
expr = X0^3 + 2*X1^3 + 3*X2^3 + 13*X3^3
[arith]
p = 13
""")
    code, out = run_cli("verdict", "cone-cubic", "--model", path)
    assert code == 0
    assert "verdict = NoObstructionViaProlific" in out
    assert "model regular at the cone vertex\ttrue" in out


def test_json_output():
    code, out = run_cli("classify", model_path("dp1_f11.model"), "--json")
    assert code == 0
    data = json.loads(out)
    assert data["singularity_type"] == "2A4"
    assert data["br_unramified"] == "(Z/5)^2"
    assert data["singular_points"][0]["type"] == "A4"


def test_figures_and_report_mirror(tmp_path):
    outdir = os.path.join(tmp_path, "figs")
    code, out = run_cli("evaluate", model_path("quartic_f17.model"),
                        "--k", "1", "--figures", outdir)
    assert code == 0
    files = sorted(os.listdir(outdir))
    assert "evaluate_quartic_f17.txt" in files
    pngs = [f for f in files if f.endswith(".png")]
    assert pngs, files
    with open(os.path.join(outdir, "evaluate_quartic_f17.txt")) as fh:
        assert fh.read() == out


def test_bound_figures(tmp_path):
    outdir = os.path.join(tmp_path, "figs")
    code, _ = run_cli("bound", "--genus", "3", "--cover-degree", "2",
                      "--q", "17,289", "--figures", outdir)
    assert code == 0
    assert any(f.endswith(".png") for f in os.listdir(outdir))


def test_cache_subcommand(tmp_path):
    cache_path = os.path.join(tmp_path, "counts.json")
    code, _ = run_cli("count", model_path("quartic_curve_f17.model"),
                      "--k", "1", "--cache", cache_path)
    assert code == 0
    code, out = run_cli("cache", cache_path)
    assert code == 0
    assert "entries = 2" in out
    code, out = run_cli("cache", cache_path, "--clear")
    assert code == 0
    code, out = run_cli("cache", cache_path)
    assert "entries = 0" in out


def test_exit_codes():
    # domain error: composite "prime"
    import tempfile
    with tempfile.NamedTemporaryFile("w", suffix=".model", delete=False) as fh:
        fh.write("[ambient]\nvars = x, y\nweights = 1, 1\n"
                 "[equation]\nexpr = x^2 + y^2\n[arith]\np = 15\n")
        bad = fh.name
    code, _ = run_cli("classify", bad)
    assert code == 2
    os.unlink(bad)
    # budget error: P^3 over 17^3 with all variables involved
    import tempfile
    with tempfile.NamedTemporaryFile("w", suffix=".model", delete=False) as fh:
        fh.write("[ambient]\nvars = x, y, z, w\nweights = 1, 1, 1, 1\n"
                 "[equation]\nexpr = x^4 + 3*y^4 + z^4 + w^4\n[arith]\np = 17\n")
        big = fh.name
    code, _ = run_cli("count", big, "--k", "3")
    assert code == 3
    os.unlink(big)


def test_evaluate_prolific_and_zero_cycles():
    code, out = run_cli("evaluate", model_path("quartic_f17.model"),
                        "--k", "2", "--prolific", "--zero-cycles",
                        "--max-degree", "2")
    assert code == 0
    assert "prolific = true" in out
    assert "zero_cycle_image_1 = {0, 1/2}" in out
    assert "image_1 = {0, 1/2}" in out
