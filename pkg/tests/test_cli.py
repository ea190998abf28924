import json

import numpy as np

from blockenc import cli
from blockenc.fixtures import maximally_mixed


def run(argv):
    return cli.main(argv)


def write_state(tmp_path, name, matrix=None, kind="explicit-matrix", payload=None,
                rank=None):
    doc = cli.state_payload(matrix if matrix is not None else maximally_mixed(2),
                            kind=kind, payload=payload, rank=rank)
    if kind != "explicit-matrix" and matrix is None:
        doc["matrix"] = []
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_gen_state_deterministic_and_rank(tmp_path):
    out1, out2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert run(["gen-state", "--dim", "8", "--rank", "3", "--seed", "5",
                "--out", out1]) == 0
    assert run(["gen-state", "--dim", "8", "--rank", "3", "--seed", "5",
                "--out", out2]) == 0
    assert open(out1).read() == open(out2).read()
    doc = cli.load_state(out1)
    w = np.linalg.eigvalsh(doc["matrix_array"])
    assert int(np.sum(w > 1e-10)) == 3


def test_gen_state_rank_validation(tmp_path):
    assert run(["gen-state", "--dim", "2", "--rank", "4",
                "--out", str(tmp_path / "x.json")]) == 2


def test_estimate_von_neumann_maximally_mixed(tmp_path):
    state = write_state(tmp_path, "mm4.json", maximally_mixed(4))
    out = str(tmp_path / "rep.json")
    assert run(["estimate", "--quantity", "von-neumann", "--state", state,
                "--epsilon", "0.1", "--out", out]) == 0
    rep = json.load(open(out))["report"]
    assert abs(rep["estimate"] - np.log(4)) <= 0.1
    assert rep["ledger"]["queries"]["rho"] > 0


def test_estimate_trace_distance_identical_files(tmp_path):
    state = write_state(tmp_path, "s.json", np.diag([0.7, 0.3]).astype(complex))
    out = str(tmp_path / "rep.json")
    assert run(["estimate", "--quantity", "trace-distance", "--alpha", "1",
                "--state", state, "--state2", state, "--epsilon", "0.1",
                "--out", out]) == 0
    rep = json.load(open(out))["report"]
    assert abs(rep["estimate"]) <= 0.05


def test_estimate_fidelity_generated_pair(tmp_path):
    s1, s2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    run(["gen-state", "--dim", "4", "--rank", "2", "--seed", "3", "--out", s1])
    run(["gen-state", "--dim", "4", "--rank", "2", "--seed", "4", "--out", s2])
    out = str(tmp_path / "rep.json")
    assert run(["estimate", "--quantity", "fidelity", "--alpha", "0.5",
                "--state", s1, "--state2", s2, "--epsilon", "0.1",
                "--out", out]) == 0
    rep = json.load(open(out))["report"]
    assert abs(rep["estimate"] - rep["true_value"]) <= 0.1


def test_estimate_probability_vector_routes_to_distribution_oracle(tmp_path):
    doc = {"format": cli.STATE_FORMAT, "kind": "probability-vector",
           "dimension": 4, "rank": 4,
           "payload": {"probabilities": [0.25, 0.25, 0.25, 0.25]},
           "matrix": cli.matrix_to_json(maximally_mixed(4))}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    out = str(tmp_path / "rep.json")
    assert run(["estimate", "--quantity", "tsallis", "--alpha", "3",
                "--state", str(path), "--epsilon", "0.05", "--out", out]) == 0
    rep = json.load(open(out))["report"]
    assert abs(rep["estimate"] - 15.0 / 32.0) <= 0.05


def test_estimate_missing_second_state_is_validation_error(tmp_path):
    state = write_state(tmp_path, "s.json")
    assert run(["estimate", "--quantity", "fidelity", "--alpha", "0.5",
                "--state", state]) == 2


def test_named_fixture_and_spectrum_kinds(tmp_path):
    named = {"format": cli.STATE_FORMAT, "kind": "named-fixture", "dimension": 2,
             "rank": 2, "payload": {"name": "diag-3-1"}, "matrix": []}
    p1 = tmp_path / "n.json"
    p1.write_text(json.dumps(named))
    doc = cli.load_state(str(p1))
    assert np.allclose(doc["matrix_array"], np.diag([0.75, 0.25]))
    spectrum_doc = {"format": cli.STATE_FORMAT, "kind": "spectrum-with-seed",
                    "dimension": 4, "rank": 2,
                    "payload": {"spectrum": [0.6, 0.4], "seed": 9}, "matrix": []}
    p2 = tmp_path / "sp.json"
    p2.write_text(json.dumps(spectrum_doc))
    doc = cli.load_state(str(p2))
    w = np.sort(np.linalg.eigvalsh(doc["matrix_array"]))[::-1]
    assert np.allclose(w[:2], [0.6, 0.4], atol=1e-10)


def test_verify_suites_pass(tmp_path):
    out = str(tmp_path / "v.json")
    assert run(["verify", "--suite", "all", "--trials", "25", "--seed", "1",
                "--out", out]) == 0
    doc = json.load(open(out))
    assert all(s["violations"] == 0 for s in doc["suites"])
    assert {s["suite"] for s in doc["suites"]} == {"weyl", "truncation",
                                                   "holder", "sandwich"}


def test_approx_poly_dump_and_certification(tmp_path):
    out = str(tmp_path / "p.json")
    assert run(["approx-poly", "--family", "neg-power", "--c", "0.5",
                "--delta", "0.1", "--epsilon", "0.01", "--out", out]) == 0
    doc = json.load(open(out))
    assert doc["certified_error"] <= 0.01
    assert doc["global_bound"] <= 1.0 + 1e-9
    assert len(doc["chebyshev_coefficients"]) == doc["degree"] + 1


def test_approx_poly_invalid_band_exit_code():
    assert run(["approx-poly", "--family", "threshold", "--t", "0.99",
                "--delta", "0.05", "--epsilon", "0.01"]) == 2


def test_approx_poly_degree_within_formula_slack(tmp_path):
    out = str(tmp_path / "p.json")
    assert run(["approx-poly", "--family", "sqrt-neglog", "--delta", "0.1",
                "--epsilon", "0.01", "--out", out]) == 0
    doc = json.load(open(out))
    formula = (1.0 / 0.1) * np.log(1.0 / (0.1 * 0.01))
    assert doc["degree"] <= 64 * formula


def test_bench_scaling_emits_slopes(tmp_path):
    out = str(tmp_path / "b.json")
    assert run(["bench-scaling", "--quantity", "tsallis", "--alpha", "3",
                "--sweep-r", "2,4", "--sweep-eps", "0.4,0.2", "--r", "2",
                "--epsilon", "0.1", "--seed", "0", "--out", out]) == 0
    doc = json.load(open(out))
    assert abs(doc["slope_r"]) < 1e-9
    assert doc["slope_eps"] > 0.5
    assert len(doc["points"]) == 4


def test_approx_poly_certification_failure_exit_code():
    # large exponent at tiny delta cannot certify under the degree cap
    assert run(["approx-poly", "--family", "neg-power", "--c", "3.0",
                "--delta", "0.002", "--epsilon", "0.001"]) == 3
