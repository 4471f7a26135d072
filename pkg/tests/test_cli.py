from __future__ import annotations

import json

import pytest

from limithodge.cli import main


def _run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured


def _run_json(argv, capsys):
    code, captured = _run(argv, capsys)
    assert code == 0, captured.err or captured.out
    return json.loads(captured.out)


def _run_error(argv, capsys):
    code, captured = _run(argv, capsys)
    assert code != 0
    assert captured.out == ""
    blob = json.loads(captured.err)
    assert blob["error"]["code"] == code
    return code, blob["error"]


def _write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def _jordan_datum(tmp_path, name="jordan.json"):
    return _write_json(
        tmp_path / name,
        {
            "dimension": 2,
            "weight": 1,
            "N1": [[0, 1], [0, 0]],
            "N2": [[0, 0], [0, 0]],
        },
    )


# ----------------------------------------------------------------------
# report plumbing


def test_report_envelope_and_determinism(tmp_path, capsys):
    path = _jordan_datum(tmp_path)
    first = _run(["weight-filtration", path], capsys)
    second = _run(["weight-filtration", path], capsys)
    assert first[0] == second[0] == 0
    assert first[1].out == second[1].out
    report = json.loads(first[1].out)
    assert set(report) == {"command", "inputs", "results", "warnings"}
    assert report["command"] == "weight-filtration"
    assert len(report["inputs"]["digest"]) == 16
    assert report["warnings"] == []


def test_digest_tracks_the_input(tmp_path, capsys):
    a = _jordan_datum(tmp_path, "a.json")
    b = _write_json(
        tmp_path / "b.json",
        {"dimension": 2, "N1": [[0, 0], [0, 0]], "N2": [[0, 1], [0, 0]]},
    )
    ra = _run_json(["weight-filtration", a], capsys)
    rb = _run_json(["weight-filtration", b], capsys)
    assert ra["inputs"]["digest"] != rb["inputs"]["digest"]


def test_table_format(capsys):
    code, captured = _run(
        ["--format", "table", "dbar-region", "--p", "0", "--q", "2"], capsys)
    assert code == 0
    assert "covered" in captured.out
    assert "false" in captured.out
    with pytest.raises(json.JSONDecodeError):
        json.loads(captured.out)


# ----------------------------------------------------------------------
# weight filtrations and cones


def test_weight_filtration_of_a_jordan_block(tmp_path, capsys):
    path = _jordan_datum(tmp_path)
    report = _run_json(["weight-filtration", path], capsys)
    results = report["results"]
    assert results["operator"] == "cone"
    assert results["center"] == 0
    assert results["graded_dims"] == {"-1": 1, "1": 1}
    assert [s["l"] for s in results["steps"]] == sorted(s["l"] for s in results["steps"])
    for step in results["steps"]:
        assert step["dim"] == len(step["basis"])


def test_weight_filtration_operator_and_center_flags(tmp_path, capsys):
    path = _jordan_datum(tmp_path)
    report = _run_json(
        ["weight-filtration", path, "--operator", "n2", "--center", "1"], capsys)
    assert report["results"]["graded_dims"] == {"1": 2}


def test_cone_check_builtin(capsys):
    report = _run_json(["cone-check", "s11", "--samples", "5", "--seed", "1"], capsys)
    results = report["results"]
    assert results["independent"] is True
    assert len(results["samples"]) == 6
    assert results["samples"][0] == ["1", "1"]


# ----------------------------------------------------------------------
# models: decomposition, frames, mixed structures


def test_decompose_model_spec(tmp_path, capsys):
    path = _write_json(
        tmp_path / "model.json",
        {"model": {"sum": [{"kind": "S", "m": 2}, {"kind": "H", "l": 1}]}},
    )
    report = _run_json(["decompose", path], capsys)
    results = report["results"]
    assert results["ambient_dim"] == 4
    assert results["weight"] == 2
    assert results["multiset"] == ["H(1)xS(0)xS(0)", "S(2)xS(0)"]
    assert results["dims_sum_ok"] is True


def test_decompose_sees_through_a_transport(tmp_path, capsys):
    transport = [[1, 0, 0, 0], [2, 1, 0, 0], [0, 1, 1, 0], [3, 0, 0, 1]]
    path = _write_json(
        tmp_path / "twisted.json",
        {"model": {"sum": [{"kind": "S", "m": 2}, {"kind": "H", "l": 1}],
                   "transport": transport}},
    )
    report = _run_json(["decompose", path], capsys)
    assert report["results"]["multiset"] == ["H(1)xS(0)xS(0)", "S(2)xS(0)"]


def test_decompose_requires_a_model(tmp_path, capsys):
    path = _jordan_datum(tmp_path)
    code, error = _run_error(["decompose", path], capsys)
    assert code == 2
    assert error["kind"] == "invalid-input"


def test_alpha_basis_reports_frames_and_warns_on_inert_factors(tmp_path, capsys):
    path = _write_json(
        tmp_path / "model.json",
        {"model": {"sum": [{"kind": "S", "m": 1},
                           {"kind": "E", "p": 1, "q": 0}]}},
    )
    report = _run_json(["alpha-basis", path], capsys)
    factors = report["results"]["factors"]
    assert len(factors) == 1
    assert factors[0]["m"] == 1 and factors[0]["n"] == 0
    assert set(factors[0]["alphas"]) == {"0,0", "1,0"}
    assert any("no alpha frame" in w for w in report["warnings"])


def test_mhs_check_on_builtin_model(capsys):
    report = _run_json(["mhs-check", "s11"], capsys)
    results = report["results"]
    assert results["is_mhs"] is True
    assert results["r_split"] is True
    assert results["polarized"]["all_pass"] is True


def test_mhs_check_requires_a_filtration(tmp_path, capsys):
    path = _jordan_datum(tmp_path)
    code, error = _run_error(["mhs-check", path], capsys)
    assert code == 2
    assert error["kind"] == "invalid-input"


# ----------------------------------------------------------------------
# growth commands


def test_norm_class_alpha_frame(capsys):
    report = _run_json(["norm-class", "s11"], capsys)
    results = report["results"]
    assert results["region"] == "global"
    labels = {entry["label"] for entry in results["sections"]}
    assert labels == {"alpha[0,0]", "alpha[0,1]", "alpha[1,0]", "alpha[1,1]"}
    for entry in results["sections"]:
        for key in ("d_eps", "d_eps_prime"):
            assert len(entry[key]["weights"]) == 2
            assert "class" in entry[key]


def test_norm_class_explicit_vectors(tmp_path, capsys):
    path = _write_json(
        tmp_path / "vecs.json",
        {
            "dimension": 2,
            "N1": [[0, 1], [0, 0]],
            "N2": [[0, 0], [0, 0]],
            "vectors": [[1, 0], [0, 1]],
        },
    )
    report = _run_json(["norm-class", path, "--region", "d-eps"], capsys)
    sections = report["results"]["sections"]
    assert [e["label"] for e in sections] == ["v0", "v1"]
    assert all("d_eps" in e and "d_eps_prime" not in e for e in sections)


def test_theta_bound_on_builtin(capsys):
    report = _run_json(["theta-bound", "s21"], capsys)
    results = report["results"]
    assert results["all_bounded"] is True
    for entry in results["entries"]:
        assert entry["zero"] or entry["bounded"]
        assert entry["direction"] in (1, 2)
        assert entry["region"] in ("d_eps", "d_eps_prime")


# ----------------------------------------------------------------------
# classification commands


def test_l2_classify_region_split(capsys):
    base = ["l2-classify", "--l1", "0", "--l2", "-2"]
    whole = _run_json(base, capsys)
    assert whole["results"]["verdict"] is False
    assert whole["results"]["region"] == "global"
    wedge = _run_json(base + ["--region", "d-eps"], capsys)
    assert wedge["results"]["verdict"] is True


def test_l2_classify_component_parsing(capsys):
    report = _run_json(
        ["l2-classify", "--component", "12", "--n1", "1", "--n2", "1",
         "--l1", "0", "--l2", "0"], capsys)
    assert report["results"]["component"] == [1, 2]
    assert report["results"]["verdict"] is True
    code, error = _run_error(
        ["l2-classify", "--component", "3", "--l1", "0", "--l2", "0"], capsys)
    assert code == 2


def test_stalk_cohomology_trivial(capsys):
    report = _run_json(["stalk-cohomology", "trivial"], capsys)
    assert report["results"]["h"] == [1, 0, 0]


def test_stalk_cohomology_truncation_comparison(capsys):
    report = _run_json(
        ["stalk-cohomology", "s21", "--truncation-degree", "3",
         "--mode", "hodge-bundle"], capsys)
    results = report["results"]
    assert results["dims"] == [2, 1, 0]
    assert results["truncated_h"] == results["h"]
    assert results["agrees"] is True


def test_oracle_compare_subgrid(capsys):
    report = _run_json(
        ["oracle-compare", "--l-min", "-1", "--l-max", "0", "--n-max", "0",
         "--jobs", "2"], capsys)
    results = report["results"]
    assert results["cells"] == 16
    assert results["agreements"] == 16
    assert results["all_agree"] is True
    assert results["disagreements"] == []


def test_end_check_builtin(capsys):
    report = _run_json(["end-check", "jordan2-t1"], capsys)
    results = report["results"]
    assert results["end_dimension"] == 4
    assert results["commutes"] is True
    assert results["passes"] is True
    assert set(results["entries"]) == {"1", "2"}


# ----------------------------------------------------------------------
# dbar commands


def test_dbar_region_coverage(capsys):
    report = _run_json(["dbar-region", "--p", "0", "--q", "2"], capsys)
    assert report["results"]["covered"] is False
    report = _run_json(
        ["dbar-region", "--p", "0", "--q", "1", "--k", "-2", "--l", "-1"], capsys)
    assert report["results"]["covered"] is True


def test_dbar_solve_monomial_pair(tmp_path, capsys):
    config = _write_json(
        tmp_path / "solve.json",
        {
            "k": -1.0,
            "l": 0.5,
            "modes": [
                {"m": 3, "n": -1, "component": 1, "profile": "poly",
                 "params": {"powers": [2, 1], "amplitude": 0.5}},
                {"m": 2, "n": 0, "component": 2, "profile": "poly",
                 "params": {"powers": [3, 0], "amplitude": 1.0}},
            ],
        },
    )
    report = _run_json(["dbar-solve", config], capsys)
    results = report["results"]
    assert results["residual_ok"] is True
    assert results["residual"] < 1e-6
    assert results["grid"]["points"] == 256
    assert results["norms"]["phi"] > 0 and results["norms"]["u"] > 0
    assert results["c"] is not None and results["c"] > 0
    # solved even though the classical existence theorem does not apply here
    assert results["hormander_covered"] is False
    assert results["corners"] == [
        {"component": 1, "mode": [2, -1],
         "corner": [pytest.approx(results["grid"]["a"]), 0.0]},
    ]


def test_dbar_solve_rejects_non_file_input(capsys):
    code, error = _run_error(["dbar-solve", "trivial"], capsys)
    assert code == 2
    assert error["kind"] == "invalid-input"


# ----------------------------------------------------------------------
# errors and input resolution


def test_missing_file_exits_2(capsys):
    code, error = _run_error(["weight-filtration", "no-such-datum"], capsys)
    assert code == 2
    assert error["kind"] == "invalid-input"


def test_unparseable_file_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, error = _run_error(["weight-filtration", str(path)], capsys)
    assert code == 2


def test_non_commuting_datum_exits_3(tmp_path, capsys):
    path = _write_json(
        tmp_path / "bad.json",
        {"dimension": 2, "N1": [[0, 1], [0, 0]], "N2": [[0, 0], [1, 0]]},
    )
    code, error = _run_error(["weight-filtration", path], capsys)
    assert code == 3
    assert error["kind"] == "precondition-violated"


def test_non_nilpotent_operator_exits_3(tmp_path, capsys):
    path = _write_json(
        tmp_path / "unipotent.json",
        {"dimension": 2, "N1": [[1, 0], [0, 1]], "N2": [[0, 0], [0, 0]]},
    )
    code, error = _run_error(["weight-filtration", path], capsys)
    assert code == 3


def test_excluded_exponent_exits_4(tmp_path, capsys):
    config = _write_json(
        tmp_path / "edge.json",
        {"k": 1.0, "l": 0.0, "modes": [
            {"m": 0, "n": 0, "component": 2, "profile": "poly", "params": {}}]},
    )
    code, error = _run_error(["dbar-solve", config], capsys)
    assert code == 4
    assert error["kind"] == "excluded-exponent"


def test_corpus_directory_resolution(tmp_path, capsys, monkeypatch):
    _jordan_datum(tmp_path, "mydatum.json")
    monkeypatch.setenv("LIMITHODGE_CORPUS", str(tmp_path))
    report = _run_json(["weight-filtration", "mydatum"], capsys)
    assert report["results"]["graded_dims"] == {"-1": 1, "1": 1}


def test_explicit_path_beats_corpus_lookup(tmp_path, capsys, monkeypatch):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    _write_json(corpus / "d.json",
                {"dimension": 1, "N1": [[0]], "N2": [[0]]})
    local = _jordan_datum(tmp_path, "d.json")
    monkeypatch.setenv("LIMITHODGE_CORPUS", str(corpus))
    report = _run_json(["weight-filtration", local], capsys)
    assert report["results"]["graded_dims"] == {"-1": 1, "1": 1}
