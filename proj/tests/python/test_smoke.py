import json
import math
import pathlib

import numpy as np
import pytest

import dipoa

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def test_tiny_fixture_solves_to_known_optimum():
    text = (FIXTURES / "tiny_quadratic.json").read_text()
    report = dipoa.solve(text, N=2, K=1)
    assert report["status"] == "Optimal"
    assert report["objective"] == pytest.approx(7.0, rel=1e-5)
    assert report["solution"]["support"] == [0]
    assert report["rel_gap"] < 0.1


def test_report_keys_and_repeatability():
    inst = dipoa.gen_sqcqp(N=2, n=5, m=1, density=0.5, seed=3)
    a = dipoa.solve(inst, include_timing=False)
    b = dipoa.solve(json.loads(inst), include_timing=False)
    assert set(a) >= {
        "status", "objective", "lower_bound", "rel_gap", "iters", "cut_counts",
        "time_primal_s", "time_master_s", "time_total_s", "bound_trace", "solution",
    }
    assert a == b


def test_solution_matches_enumeration():
    inst = dipoa.gen_sqcqp(N=2, n=6, m=1, density=0.6, seed=11)
    report = dipoa.solve(inst, K=2, config={"eps_gap": 1e-3})
    exact = dipoa.enumerate_supports(inst)
    assert report["status"] == "Optimal"
    assert report["objective"] == pytest.approx(exact["objective"], rel=1e-4)


def test_projection_of_worked_example():
    y = np.array([5.7, 1.4, -3.2, -2.3, 2.3])
    p = dipoa.project_sparsity(y, 3)
    np.testing.assert_array_equal(p, [5.7, 0.0, -3.2, -2.3, 0.0])
    assert dipoa.binaries_from_support(p) == [1, 0, 1, 1, 0]


def test_gap_and_event():
    assert dipoa.relative_gap(2.0, 1.0) == 50.0
    assert dipoa.relative_gap(0.0, -0.001) == pytest.approx(100.0)
    assert math.isinf(dipoa.relative_gap(math.inf, 1.0))
    assert dipoa.event_triggered(10, 9, 0.2)
    assert not dipoa.event_triggered(10, 5, 0.2)


def test_generators_are_deterministic():
    assert dipoa.gen_dslr(4, 100, 6, 2, 0.1, 5) == dipoa.gen_dslr(4, 100, 6, 2, 0.1, 5)
    inst = json.loads(dipoa.gen_dslr(4, 100, 6, 2, 0.1, 5))
    assert inst["N"] == 4 and inst["kappa"] == 2


def test_validation_and_errors():
    inst = json.loads(dipoa.gen_sqcqp(N=1, n=4, seed=1))
    assert dipoa.validate_instance(json.dumps(inst)) == []
    inst["kappa"] = 4
    codes = [code for code, _ in dipoa.validate_instance(json.dumps(inst))]
    assert "cardinality_not_strict" in codes
    with pytest.raises(ValueError):
        dipoa.solve('{"n": 0}')


def test_benchmark_csv():
    scenario = {"app": "sqcqp", "grid": {"N": 2, "n": 4, "kappa": [1, 2], "seed": 2}}
    csv = dipoa.run_benchmark(json.dumps(scenario), "csv", False)
    lines = csv.strip().splitlines()
    assert lines[0].startswith("app,N,K,n,kappa")
    assert len(lines) == 3
    assert dipoa.topology_blocks(4, 2) == json.dumps({"K": 2, "N": 4, "edges": [[0, 1], [1, 2, 3]]}, separators=(",", ":"))
