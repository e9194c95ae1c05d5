import json
import math
import os
import pathlib

import pytest

import lcv

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def test_epsilon_matches_known_values():
    assert lcv.epsilon(1, 10000, 1e-12) == pytest.approx(3.46659e-3, rel=1e-5)
    assert lcv.epsilon(0, 10, 1e-12) < lcv.epsilon(1, 10, 1e-12)
    assert lcv.epsilon(10, 10, 0.1) == 1.0
    with pytest.raises(ValueError):
        lcv.epsilon(1, 10, 0.0)


def test_phi_and_gamma():
    assert lcv.phi_affine(3.0, 9, 2) == pytest.approx(4.5725e-4, rel=1e-3)
    assert lcv.kbar(0.76759, 3.0, 1 / 9, 1.0) == 9
    assert lcv.gamma_bar(0.01, 1.0) == pytest.approx(0.01)
    assert lcv.gamma_bar(0.01, 0.5) == pytest.approx(0.02)


def test_slca_from_traces():
    traces = [["y1", "y2", "y1", "y2"], ["y2", "y1", "y2", "y1"]]
    s = lcv.Slca.from_traces(traces, 2)
    assert s.states == [["y1", "y2"], ["y2", "y1"]]
    assert sorted(s.edges) == [(0, 1), (1, 0)]
    assert s.is_deterministic() and s.is_non_blocking()
    assert s.includes(["y1", "y2", "y1"])
    assert not s.includes(["y1", "y1"])
    assert lcv.greedy_complexity(traces, 2) == 1
    assert s.verify_invariance(["y3"])["holds"]
    bad = s.verify_reach_stay(["y1"])
    assert not bad["holds"] and bad["cycle"]
    assert lcv.Slca.from_text(s.to_text()).states == s.states


def test_completion_adds_continuations():
    s = lcv.Slca.from_traces([["a", "b"]], 2, complete=True)
    assert s.is_non_blocking()
    assert s.state_count > 1
    assert any(s.added_by_completion(i) for i in range(s.state_count))


def test_hybrid_oracle():
    g = lcv.hybrid_oracle("1/100", 2)
    assert g["k_bar_exact"] == 7


def test_run_minimal_config(tmp_path):
    report = lcv.run(str(CONFIGS / "minimal.ini"))
    assert report["schema_version"] == 1
    assert report["certificate"]["epsilon"] == 1.0
    assert lcv.run(str(CONFIGS / "minimal.ini"))["certificate"] == report["certificate"]


def test_sample_is_seeded():
    a = lcv.sample(str(CONFIGS / "minimal.ini"), seed=3)
    b = lcv.sample(str(CONFIGS / "minimal.ini"), seed=3)
    assert a == b and len(a) == 1


def test_bad_config_raises(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[system]\ntype = nope\n")
    with pytest.raises(ValueError):
        lcv.run(str(p))
