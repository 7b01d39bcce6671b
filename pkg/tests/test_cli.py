import json
import os
import subprocess
import sys

import pytest

from anisotropy import checks, cli

from conftest import CORPUS


def run(*argv):
    doc, status, _ = cli.run(list(argv))
    return doc, status


def shell(*argv, env=None):
    e = dict(os.environ)
    e.pop(cli.SEED_ENV, None)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "anisotropy.cli", *argv], capture_output=True, env=e, check=False)


def test_corpus_listing():
    doc, status = run("corpus")
    assert status == 0
    names = [c["name"] for c in doc["results"]["complexes"]]
    assert {"octahedron", "rp2_6", "bowtie"} <= set(names)
    assert not next(c for c in doc["results"]["complexes"] if c["name"] == "bowtie")["pseudo_manifold"]


def test_output_is_byte_identical():
    argv = ["quadform", "octahedron", "--random", "5", "--seed", "9"]
    a, b = shell(*argv), shell(*argv)
    assert a.returncode == 0 and a.stdout == b.stdout
    assert "seconds" not in a.stdout.decode() and "timings" not in a.stdout.decode()


def test_seed_from_environment():
    env_run = shell("gram", "boundary_simplex_3", "--m", "1", env={cli.SEED_ENV: "5"})
    flag_run = shell("gram", "boundary_simplex_3", "--m", "1", "--seed", "5")
    other = shell("gram", "boundary_simplex_3", "--m", "1", "--seed", "6")
    assert env_run.stdout == flag_run.stdout
    assert json.loads(other.stdout)["results"]["entries"] != json.loads(flag_run.stdout)["results"]["entries"]
    overridden = shell("gram", "boundary_simplex_3", "--m", "1", "--seed", "6", env={cli.SEED_ENV: "5"})
    assert overridden.stdout == other.stdout


def test_timings_only_on_request():
    doc, _ = run("hvector", "octahedron", "--timings")
    assert "timings" in doc
    doc, _ = run("hvector", "octahedron")
    assert "timings" not in doc


def test_explain_has_no_run():
    doc, status = run("verify-pp", "--mode", "simplest", "--explain")
    assert status == 0 and doc["explain"] == cli.EXPLAIN["verify-pp"]
    assert set(cli.EXPLAIN) == set(cli.COMMANDS)


@pytest.mark.parametrize("argv,code", [
    (["mixedvol", "nosuch", "--monomial", "x1"], "not_found"),
    (["orient", "bowtie"], "not_pseudomanifold"),
    (["orient", "rp2_6", "--char", "0"], "non_orientable"),
    (["mixedvol", "octahedron", "--monomial", "x1*x2"], "ValueError"),
    (["quadform", "octahedron", "--m", "2"], "ValueError"),
    (["verify-pp", "--mode", "conjecture"], "ValueError"),
])
def test_error_reports(argv, code):
    doc, status = run(*argv)
    assert status == 2 and not doc["ok"]
    assert doc["error"]["code"] == code


def test_failing_check_exits_one(monkeypatch):
    real = checks.rank_profile

    def broken(*a, **k):
        out = real(*a, **k)
        out.ok = False
        return out
    monkeypatch.setattr(checks, "rank_profile", broken)
    doc, status = run("lefschetz", "octahedron")
    assert status == 1 and not doc["ok"]


def test_validate_and_classify():
    doc, status = run("validate", str(CORPUS / "octahedron.json"))
    assert status == 0 and doc["results"]["f_vector"] == [1, 6, 12, 8]
    doc, _ = run("classify", "rp2_6")
    r = doc["results"]
    assert r["pseudo_manifold"] and r["orientable"] is False


def test_homology_command():
    doc, status = run("homology", "rp2_6", "--ring", "Z")
    assert status == 0
    assert [g["text"] for g in doc["results"]["reduced_homology"]["Z"]] == ["0", "0", "Z/2", "0"]


def test_mixedvol_symbolic_apex_free():
    doc, status = run("mixedvol", "boundary_simplex_2", "--monomial", "x1*x2", "--char", "0")
    assert status == 0
    assert doc["results"]["apex_variables_remaining"] == []
    assert "a[1,0]" not in doc["results"]["value"]


def test_hvector_and_lefschetz():
    doc, status = run("hvector", "octahedron", "--char", "0")
    assert status == 0 and doc["results"]["hbar_dimensions"] == [1, 3, 3, 1]
    doc, status = run("lefschetz", "octahedron")
    assert status == 0 and doc["results"]["hbar_dimensions"] == [1, 3, 3, 1]


def test_quadform_and_spot():
    doc, status = run("quadform", "boundary_simplex_3", "--g", "x1", "--spot", "10")
    assert status == 0 and doc["results"]["value"] != "0"


def test_reduce_check_verdicts():
    doc, _ = run("reduce-check", "octahedron", "--g", "x1")
    assert doc["results"]["verdict"] == "not isotropic"
    doc, _ = run("reduce-check", "octahedron", "--g", "0")
    assert doc["results"]["verdict"] == "zero in Hbar"


def test_verify_pp_modes():
    for argv in (["--mode", "simplest", "--n", "1", "--n", "2"], ["--mode", "plucker", "--n", "3"],
                 ["--mode", "second-deriv", "--n", "2"],
                 ["--mode", "conjecture", "--complex", "boundary_simplex_3", "--samples", "6"],
                 ["boundary_simplex_3", "--mode", "corollary", "--samples", "4"]):
        doc, status = run("verify-pp", *argv)
        assert status == 0, argv
        assert all(r["counterexamples"] == [] for r in doc["results"]["reports"])


def test_verify_additivity_and_specialize():
    doc, status = run("verify-additivity", "boundary_simplex_3", "--pieces", "4")
    assert status == 0 and len(doc["checks"]) == 5
    doc, status = run("specialize", "boundary_simplex_2", "--trials", "3")
    assert status == 0


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    assert cli.main(["decompose", "octahedron", "--out", str(target)]) == 0
    assert json.loads(target.read_text())["checks"][0]["name"] == "boundary_is_fundamental_cycle"
