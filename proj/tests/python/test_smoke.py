import json
import os
from fractions import Fraction
from pathlib import Path

import pytest

import lcpsim

MODELS = Path(os.environ.get("LCPSIM_MODELS_DIR", Path(__file__).resolve().parents[2] / "models"))


def complete_pair(beta):
    return lcpsim.family_model("complete", 2, beta=beta)


def test_load_and_round_trip():
    model = lcpsim.load_model(str(MODELS / "complete2_beta1_5.json"))
    assert model.size == 2
    assert model.alpha == 1
    assert model.matrix == [[0, Fraction(3, 2)], [Fraction(3, 2), 0]]
    assert model.initial == [50, 50]
    again = lcpsim.parse_model(model.to_json())
    assert again.matrix == model.matrix
    assert "n=2" in repr(model)


def test_errors_map_to_python_exceptions():
    with pytest.raises(lcpsim.ParseError):
        lcpsim.parse_model("{not json")
    with pytest.raises(ValueError):
        lcpsim.parse_model('{"alpha": "-1", "matrix": [["0"]]}')
    with pytest.raises(lcpsim.PreconditionError):
        lcpsim.t_report(complete_pair(1), [1, 1])


def test_spectrum_and_regimes():
    s = lcpsim.spectrum(complete_pair(1))
    assert s["lambda1"] == pytest.approx(1.0)
    assert s["v1"] == pytest.approx([0.5, 0.5])
    assert s["regime"] == "critical"
    assert s["u"] is None
    assert lcpsim.spectrum(complete_pair(Fraction(3, 2)))["regime"] == "supercritical"
    sub = lcpsim.spectrum(lcpsim.parse_model('{"alpha": "1", "matrix": [["0", "1/2"], ["1/2", "0"]]}'))
    assert sub["u"] == [3, 3]
    assert sub["lambdaN"].real == pytest.approx(-0.5)


def test_limit_sets():
    line3 = lcpsim.family_model("line", 3)
    assert sorted(lcpsim.enumerate_limit_sets(line3)) == [(1,), (1, 3), (2,), (3,)]
    assert lcpsim.count_limit_sets(lcpsim.family_model("cycle", 6)) == 17
    chain = lcpsim.parse_model('{"alpha": "1", "matrix": [["0","0","0"],["1","0","0"],["0","1","0"]]}')
    assert lcpsim.enumerate_limit_sets(chain) == [(1, 3)]
    assert sorted(lcpsim.survivor_support(chain)) == [(1,), (1, 3)]


def test_exact_diagnostics():
    model = complete_pair(1)
    outcomes = dict((tuple(s), p) for s, p in lcpsim.transitions(model, [2, 3]))
    assert outcomes == {(3, 3): Fraction(1, 5), (2, 4): Fraction(3, 10), (1, 3): Fraction(3, 10), (2, 2): Fraction(1, 5)}
    assert lcpsim.total_rate(model, [2, 3]) == 10
    assert lcpsim.second_moment_drift(model, [2, 3], 1, 1) == (1, 1)
    assert lcpsim.v_drift_triangular(3, 2, 1) == (Fraction(-9, 160), Fraction(-9, 160))
    rho, bound = lcpsim.extinction_bound(complete_pair(Fraction(3, 2)), [50, 50])
    assert bound == pytest.approx(500.0)


def test_simulation_is_deterministic():
    model = lcpsim.family_model("complete", 3)
    a = lcpsim.simulate(model, [5, 5, 5], seed=4, replicate=2)
    b = lcpsim.simulate(model, [5, 5, 5], seed=4, replicate=2)
    assert a == b
    assert a["stop_reason"] == "survivor_set_frozen"
    assert len(a["survivors"]) == 1
    rec = lcpsim.first_extinction(complete_pair(Fraction(3, 2)), [50, 50], seed=1)
    assert rec["sigma"] >= 1


def test_batch_and_tables():
    corral = lcpsim.load_model(str(MODELS / "ok_corral.json"))
    summary = lcpsim.run_batch(corral, [10, 10], replicates=200, seed=5)
    assert summary["replicates"] == 200
    assert sum(e["count"] for e in summary["survivor_frequencies"]) == 200
    assert summary == lcpsim.run_batch(corral, [10, 10], replicates=200, seed=5, threads=2)
    json.dumps(summary)
    ok, cells = lcpsim.reproduce_tables(1, 6)
    assert ok
    assert all(c["pass"] for c in cells)
