"""Smoke tests for the compiled extension module.

Run with PYTHONPATH pointing at the directory that holds the built
``_lexssp`` extension (the CMake test wiring does this automatically).
"""

import json

import pytest

import _lexssp as m

TINY_GRID = json.dumps(
    {
        "grid": {
            "width": 3,
            "height": 3,
            "max_cost": {"default": 20},
            "start": "s0",
            "goal": "s8",
        },
        "horizon": 40,
        "c_fail": 1000.0,
    }
)


def test_version_is_nonempty():
    assert isinstance(m.__version__, str) and m.__version__


def test_formula_roundtrip_and_evaluation():
    canon = m.canonical_formula("F p & G !q", ["p", "q"])
    assert m.canonical_formula(canon, ["p", "q"]) == canon
    assert m.formula_atoms("F p & G !q") == ["p", "q"]
    assert m.evaluate_formula("F p", [[], ["p"]], ["p"])
    assert not m.evaluate_formula("F p", [[], []], ["p"])
    assert m.evaluate_formula("G !q", [[], ["p"]], ["p", "q"])


def test_bad_formula_raises_input_error():
    with pytest.raises(m.InputError):
        m.canonical_formula("F (", ["p"])


def test_translation_produces_automaton_json():
    d = json.loads(m.translate_formula("F p"))
    assert d["ap"] == ["p"]
    assert d["states"] == 2
    dot = m.translate_formula("F p", dot=True)
    assert "digraph" in dot


def test_scenario_canonicalization_is_a_fixed_point():
    canon = m.canonical_scenario_json(TINY_GRID)
    assert m.canonical_scenario_json(canon) == canon
    assert m.validate_scenario_json(canon) == []


def test_validation_reports_unparseable_documents():
    errs = m.validate_scenario_json('{"kind": "explicit"}')
    assert len(errs) == 1
    assert "missing key 'states'" in errs[0]
    errs = m.validate_scenario_json("not json at all")
    assert len(errs) == 1
    assert "invalid JSON" in errs[0]


def test_bundled_scenarios_parse_and_validate():
    for index in (1, 2):
        text = m.bundled_scenario(index)
        assert m.canonical_scenario_json(text) == text
        assert m.validate_scenario_json(text) == []
    with pytest.raises(m.InputError):
        m.bundled_scenario(3)


def test_solving_the_tiny_grid():
    out = m.solve_scenario_json(TINY_GRID)
    assert out["product_states"] == 9
    assert out["objectives"] == 1
    assert len(out["start_values"]) == 1
    assert 20.0 <= out["start_values"][0] < 21.0
    assert 0.999 < out["satisfaction"] <= 1.0
    assert out["warnings"] == []


def test_simulation_is_seed_deterministic():
    runs = m.simulate_scenario_json(TINY_GRID, seed=11, samples=3)
    again = m.simulate_scenario_json(TINY_GRID, seed=11, samples=3)
    assert len(runs) == 3
    assert runs == again
    for r in runs:
        assert r["states"][0] == "s0"
        assert r["satisfied"]
        assert r["states"][-1] == "s8"
        assert len(r["actions"]) + 1 == len(r["states"])
        assert r["realized_costs"] == [20.0]


def test_capacity_errors_surface_as_their_own_type():
    big = json.loads(TINY_GRID)
    big["horizon"] = 10_000_000
    with pytest.raises(m.CapacityError):
        m.solve_scenario_json(json.dumps(big))
