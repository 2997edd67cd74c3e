import json

import pytest

from sidonspaces.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, main


def run(capsys, *argv):
    code = main(["--json", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def binomial_doc(tmp_path, capsys):
    path = tmp_path / "bin.json"
    code, out = run(capsys, "construct", "--p", "2", "--k", "5", "--family", "binomial", "--i", "1", "--j", "2",
                    "--out", str(path))
    assert code == EXIT_OK
    return path, out


def test_field_command(capsys, tmp_path):
    code, out = run(capsys, "field", "--p", "2", "--k", "3", "--ell", "2", "--out", str(tmp_path / "t.json"))
    assert code == EXIT_OK and (out["q"], out["k"], out["n"]) == (2, 3, 6)
    code, again = run(capsys, "field", "--tower", str(tmp_path / "t.json"))
    assert again["provenance"]["tower_hash"] == out["provenance"]["tower_hash"]


def test_field_needs_parameters(capsys):
    code, out = run(capsys, "field")
    assert code == EXIT_INPUT and out["error"] == "input"


def test_reducible_polynomial_is_an_input_error(capsys):
    code, out = run(capsys, "field", "--p", "2", "--k", "2", "--mid-poly", "[1, 0, 1]")
    assert code == EXIT_INPUT


def test_construct_binomial(binomial_doc):
    _, out = binomial_doc
    assert out["expected"] == "yes" and out["verified"] is True
    assert out["provenance"]["governing_rule"] == "binomial-coprime-gap"


def test_construct_subfield_linear_binomial_reports_witness(capsys):
    code, out = run(capsys, "construct", "--p", "2", "--k", "6", "--ell", "2", "--family", "binomial",
                    "--i", "2", "--j", "4")
    assert code == EXIT_OK and out["expected"] == "no" and out["verified"] is False
    assert len(out["witness"]["quadruple"]) == 4


def test_construct_precondition_failure(capsys):
    code, out = run(capsys, "construct", "--p", "2", "--k", "4", "--family", "table1", "--row", "ii", "--delta", "1")
    assert code == EXIT_INPUT and out["error"] == "precondition"


def test_output_is_byte_identical(capsys, tmp_path):
    argv = ["--json", "construct", "--p", "3", "--k", "2", "--ell", "2", "--family", "monomial-quadratic"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


@pytest.mark.parametrize("route", ["auto", "def", "orbit", "pair"])
def test_check_sidon_routes(route, binomial_doc, capsys):
    path, _ = binomial_doc
    code, out = run(capsys, "check-sidon", str(path), "--route", route)
    assert code == EXIT_OK and out["verdict"]["is_sidon"] is True


def test_check_sidon_auto_uses_orbit_for_lines(capsys, tmp_path):
    doc = tmp_path / "line.json"
    run(capsys, "construct", "--p", "2", "--k", "2", "--ell", "2", "--family", "poly", "--poly", "x",
        "--no-verify", "--out", str(doc))
    d = json.loads(doc.read_text())
    d["subspace"]["basis"] = d["subspace"]["basis"][:1]
    d["subspace"]["dim"] = 1
    d.pop("pair_form")
    doc.write_text(json.dumps(d))
    code, out = run(capsys, "check-sidon", str(doc))
    assert code == EXIT_OK and out["verdict"]["route"] == "orbit" and out["verdict"]["is_sidon"]


def test_budget_exit_code(binomial_doc, capsys):
    path, _ = binomial_doc
    code, out = run(capsys, "--orbit-cap", "5", "check-sidon", str(path), "--route", "orbit")
    assert code == EXIT_BUDGET and out["error"] == "budget"


def test_cache_from_environment(binomial_doc, capsys, tmp_path, monkeypatch):
    path, _ = binomial_doc
    cache = tmp_path / "cache"
    monkeypatch.setenv("SIDON_CACHE_DIR", str(cache))
    _, first = run(capsys, "check-sidon", str(path))
    files = list(cache.iterdir())
    assert len(files) == 1
    _, second = run(capsys, "check-sidon", str(path))
    assert first == second


def test_budget_failures_are_not_cached(binomial_doc, capsys, tmp_path):
    path, _ = binomial_doc
    cache = tmp_path / "cache"
    run(capsys, "--cache-dir", str(cache), "--orbit-cap", "5", "check-sidon", str(path), "--route", "orbit")
    assert not cache.exists() or not list(cache.iterdir())


def test_check_scattered(capsys):
    code, out = run(capsys, "check-scattered", "--p", "2", "--k", "5", "--poly", "x^q")
    assert code == EXIT_OK and out["scattered"] is True
    code, out = run(capsys, "check-scattered", "--p", "2", "--k", "4", "--poly", "x^q^2")
    assert out["scattered"] is False and out["witness"]["s_set_dim"] == 2


def test_subspace_poly(binomial_doc, capsys):
    path, out = binomial_doc
    code, res = run(capsys, "subspace-poly", str(path))
    assert code == EXIT_OK and res["qdeg"] == 5


def test_equiv_with_itself(binomial_doc, capsys):
    path, _ = binomial_doc
    for extra in ([], ["--coset-form"], ["--mode", "semilinear"]):
        code, out = run(capsys, "equiv", str(path), str(path), *extra)
        assert code == EXIT_OK and out["equivalent"] is True


def test_equiv_planted_scalar(binomial_doc, capsys, tmp_path):
    from sidonspaces.cli import RunConfig, load_space
    from sidonspaces.fq_linear import apply_frobenius, scale

    path, _ = binomial_doc
    L = load_space(str(path), RunConfig())
    W = scale(apply_frobenius(L.V, 2), 77)
    d = json.loads(path.read_text())
    d["subspace"] = W.to_dict()
    d.pop("pair_form")
    other = tmp_path / "planted.json"
    other.write_text(json.dumps(d))
    code, out = run(capsys, "equiv", str(other), str(path))
    assert out["equivalent"] is True and out["witness"]["sigma_exp"] == 2


def test_classify(binomial_doc, capsys):
    path, _ = binomial_doc
    code, out = run(capsys, "classify", str(path), str(path))
    assert code == EXIT_OK and [c["members"] for c in out["classes"]] == [[0, 1]]


def test_orbit_code_export(capsys, tmp_path):
    doc = tmp_path / "ex.json"
    run(capsys, "construct", "--tower", "example", "--family", "poly", "--poly", "x^q", "--no-verify", "--out", str(doc))
    code, out = run(capsys, "orbit-code", str(doc), "--export", str(tmp_path / "cb") + "/")
    assert code == EXIT_OK and out["orbit_size"] == 3280 and out["min_distance"] == 6
    assert len((tmp_path / "cb" / "codebook.txt").read_text().splitlines()) == 3281


def test_bad_document(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, out = run(capsys, "check-sidon", str(bad))
    assert code == EXIT_INPUT


def test_reproduce_single_claim(capsys):
    code, out = run(capsys, "reproduce", "--only", "2")
    assert code == EXIT_OK and out["passed"] == out["total"] == 1
    assert "elapsed" not in out["claims"][0]


def test_reproduce_bad_example_polynomial(capsys):
    code, out = run(capsys, "reproduce", "--only", "1", "--example-top-poly", "[1, 1, 1]")
    assert code == EXIT_MISMATCH and "error" in out["claims"][0]["detail"]


def test_text_output(capsys):
    assert main(["reproduce", "--only", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out and out.strip().endswith("1/1 claims passed")
