import pytest

from bqkz import tsasm
from bqkz.exact_arith import poly

FIGURE = [
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, -1, 0, 1, 0, 0],
    [0, 1, -1, 0, 1, 0, -1, 1, 0],
    [0, 0, 0, 1, -1, 1, 0, 0, 0],
    [1, -1, 1, -1, 1, -1, 1, -1, 1],
    [0, 0, 0, 1, -1, 1, 0, 0, 0],
    [0, 1, -1, 0, 1, 0, -1, 1, 0],
    [0, 0, 1, 0, -1, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
]

TABLE = {
    0: "1",
    1: "1",
    2: "t",
    3: "t*(1 + tau)",
    4: "tau + t^2*(1 + tau + tau^2)",
    5: "tau*(1 + tau^2) + t^2*(1 + 3*tau + 4*tau^2 + 2*tau^3 + tau^4)",
    6: "t*tau*(3 + 4*tau + 8*tau^2 + 3*tau^3 + 2*tau^4)"
       " + t^3*(1 + 3*tau + 7*tau^2 + 6*tau^3 + 6*tau^4 + 2*tau^5 + tau^6)",
    7: "t*tau*(3 + 7*tau + 17*tau^2 + 18*tau^3 + 15*tau^4 + 12*tau^5 + 4*tau^6 + 2*tau^7)"
       " + t^3*(1 + 6*tau + 19*tau^2 + 32*tau^3 + 41*tau^4 + 35*tau^5 + 21*tau^6 + 11*tau^7"
       " + 3*tau^8 + tau^9)",
}


def test_validation_examples():
    assert tsasm.validate_tsasm(FIGURE)
    identity = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert tsasm.validate_asm(identity)
    assert not tsasm.validate_tsasm(identity)
    assert not tsasm.validate_asm([[0] * 3 for _ in range(3)])
    assert not tsasm.validate_asm([[1, 0], [0]])
    assert not tsasm.validate_asm([[2]])
    assert tsasm.validate_tsasm([[1]])


def test_row_alternation_is_enforced():
    bad = [[0, 1, 0], [1, -1, 1], [0, 1, 0]]
    assert tsasm.validate_asm(bad)
    bad[1] = [1, 1, -1]
    assert not tsasm.validate_asm(bad)


def test_figure_is_enumerated_with_its_weight():
    tri = tsasm.triangle_from_matrix(FIGURE)
    assert tri in set(tsasm.enumerate(4))
    assert tsasm.reconstruct(tri) == FIGURE
    assert (tri.mu, tri.nu) == (2, 1)


def test_four_triangles_of_size_nine():
    weights = sorted((t.mu, t.nu) for t in tsasm.enumerate(4))
    assert weights == [(0, 1), (2, 0), (2, 1), (2, 2)]


@pytest.mark.parametrize("m", range(10))
def test_counts(m):
    assert tsasm.count(m) == tsasm.KNOWN_COUNTS[m]


@pytest.mark.parametrize("m", sorted(TABLE))
def test_generating_functions(m):
    names = ("tau", "t")
    assert tsasm.generating_function(m).with_vars(names) == poly(TABLE[m]).with_vars(names)


def test_vertically_off_diagonally_symmetric_specialisation():
    # t = 0, tau = 1
    values = [tsasm.generating_function(m).evaluate({"t": 0, "tau": 1}) for m in range(8)]
    assert values[:6] == [1, 1, 0, 0, 1, 2]


@pytest.mark.parametrize("m", range(8))
def test_enumeration_against_full_matrix_oracle(m):
    r = tsasm.check_enumeration(m, seed=m)
    assert r.passed, r.counterexample


def test_streaming_visit_matches_enumerate():
    seen = []
    tsasm.visit(6, seen.append)
    assert seen == list(tsasm.enumerate(6))


def test_mu_parity():
    for m in range(10):
        n = m // 2
        assert all((n - mu) % 2 == 0 for (mu, _), _ in tsasm.statistics(m))


def test_shift_identity():
    r = tsasm.check_shift_identity(8)
    assert r.passed, r.counterexample


@pytest.mark.parametrize("nsites", range(1, 7))
def test_sum_conjecture(nsites):
    r = tsasm.check_conjecture_tsasm(nsites)
    assert r.passed, r.counterexample


def test_sum_conjecture_four_sites_by_hand():
    expected = poly("(1 + x*(x - tau))*tau + (1 + x)^2*(1 + tau + tau^2)")
    names = ("x", "tau")
    assert tsasm.conjecture_rhs(4).with_vars(names) == expected.with_vars(names)
