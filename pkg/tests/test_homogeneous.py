import json

import pytest

from bqkz import homogeneous as H
from bqkz.exact_arith import MPoly, poly

# Down-spin positions -> component of psi_5 with general tau.
PSI5_GENERAL = {
    (1, 2): "tau^3",
    (1, 3): "tau^2*(2 + tau^2) + x*tau^3",
    (1, 4): "tau*(2 + tau^2) + x*tau^2*(2 + tau^2)",
    (1, 5): "x*tau*(2 + tau^2)",
    (2, 3): "tau*(1 + tau^2) + 2*x*tau^2 + x^2*tau^3",
    (2, 4): "1 + 2*tau^2 + x*tau*(3 + 2*tau^2) + x^2*tau^2*(2 + tau^2)",
    (2, 5): "x*(1 + 2*tau^2) + x^2*tau*(2 + tau^2)",
    (3, 4): "tau + x*(1 + tau^2) + x^2*tau*(1 + tau^2)",
    (3, 5): "x*tau + x^2*(1 + 2*tau^2)",
    (4, 5): "x^2*tau",
}

# The same vector at tau = 1.
PSI5_TAU1 = {
    (1, 2): "1", (1, 3): "3 + x", (1, 4): "3*(1 + x)", (1, 5): "3*x",
    (2, 3): "2 + 2*x + x^2", (2, 4): "3 + 5*x + 3*x^2", (2, 5): "3*x*(1 + x)",
    (3, 4): "1 + 2*x + 2*x^2", (3, 5): "x*(1 + 3*x)", (4, 5): "x^2",
}


def same(p: MPoly, q: MPoly) -> bool:
    names = ("x", "tau")
    return p.with_vars(names) == q.with_vars(names)


@pytest.mark.parametrize("formula", H.FORMULAS)
def test_five_sites_general_tau(formula):
    table = H.components(5, formula)
    expected = PSI5_TAU1 if formula == "tau1" else PSI5_GENERAL
    assert set(table.components) == set(expected)
    for a, text in expected.items():
        assert same(table[a], poly(text)), (formula, a)


def test_five_sites_at_tau_one():
    table = H.psi(5, 1)
    for a, text in PSI5_TAU1.items():
        assert same(table[a], poly(text))
    assert H.components(5, "general").specialise_tau(1)[(2, 4)].with_vars(("x",)) == poly("3 + 5*x + 3*x^2")


def test_small_chains():
    assert H.psi(1, 1)[()] == MPoly.const(1)
    two = H.psi(2, 1)
    assert same(two[(1,)], poly("1")) and same(two[(2,)], poly("x"))


@pytest.mark.parametrize("nsites", [2, 3, 4, 5, 6])
def test_modular_extraction_matches_exact_reference(nsites):
    r = H.check_reference_agreement(nsites)
    assert r.passed, r.counterexample


@pytest.mark.parametrize("nsites", range(2, 8))
def test_structural_checks(nsites):
    for check in (H.check_four_formulas, H.check_normalisation, H.check_degree_bound,
                  H.check_parity_homogeneous, H.check_x0_spin_reversal, H.check_sum_recursion):
        r = check(nsites)
        assert r.passed, (check.__name__, r.counterexample)


def test_nonnegativity_is_an_observation():
    r = H.check_nonnegativity(6)
    assert r.observation
    assert r.passed


def test_tau_degree_bound_holds():
    for nsites in range(2, 8):
        table = H.components(nsites, "general")
        assert max(p.degree("tau") for p in table.components.values()) <= H.tau_degree_bound(nsites)


def test_json_and_csv_round_trip():
    table = H.components(4, "general")
    again = H.ComponentTable.from_json(table.to_json())
    assert again.components == table.components
    obj = json.loads(table.to_json())
    assert obj["N"] == 4 and obj["tau"] == "symbolic"
    assert set(obj["components"]) == {"1,2", "1,3", "1,4", "2,3", "2,4", "3,4"}
    rows = table.to_csv().strip().splitlines()
    assert rows[0] == "positions,x_power,tau_power,coefficient"
    assert len(rows) - 1 == sum(len(p.terms) for p in table.components.values())


def test_vector_ordering():
    table = H.psi(2, 1)
    vec = table.vector({"x": 5})
    # index 0b10 is site 1 down
    assert vec == [0, 5, 1, 0]


def test_corrupted_cache_is_recomputed(isolated_cache):
    H._MEMORY.clear()
    table = H.components(4, "bar")
    path = H._cache_path(4, "bar", "symbolic")
    assert path.exists()
    payload = json.loads(path.read_text())
    payload["table"]["components"]["1,2"]["terms"][0]["num"] = "999"
    path.write_text(json.dumps(payload))
    H._MEMORY.clear()
    again = H.components(4, "bar")
    assert again.components == table.components


def test_invalid_requests():
    with pytest.raises(ValueError):
        H.components(0)
    with pytest.raises(ValueError):
        H.components(3, "nonsense")
