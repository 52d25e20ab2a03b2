import random

import pytest
from gmpy2 import mpq

from bqkz.exact_arith import Cyc12, bracket, random_rational
from bqkz.lattice_ops import (
    ModelParams,
    SingularPoint,
    apply_two_site,
    down_positions,
    embed_two_site,
    identity,
    index_from_down_positions,
    k_matrix,
    mat_eq,
    mat_mul,
    mat_prod,
    parity,
    permutation_matrix,
    r_matrix,
    r_weights,
    rcheck_matrix,
    spin_reversal,
    spins,
    theta_insert,
    transfer_matrix,
    check_local_identities,
)


def test_weights_by_hand():
    q, z = mpq(2), mpq(3)
    a, b, c = r_weights(z, q)
    den = mpq(2, 3) - mpq(3, 2)
    assert a == (6 - mpq(1, 6)) / den
    assert b == (3 - mpq(1, 3)) / den
    assert c == (2 - mpq(1, 2)) / den
    a1, b1, c1 = r_weights(mpq(1), q)
    assert b1 == 0 and a1 == c1 == 1


def test_r_at_one_is_permutation_and_rcheck_identity():
    q = mpq(5, 3)
    assert mat_eq(r_matrix(mpq(1), q), permutation_matrix())
    assert mat_eq(rcheck_matrix(mpq(1), q), identity(4))


def test_unitarity():
    q, z = mpq(7, 5), mpq(2, 9)
    assert mat_eq(mat_mul(rcheck_matrix(z, q), rcheck_matrix(1 / z, q)), identity(4))


def test_yang_baxter_random():
    rng = random.Random(11)
    q, z, w = (random_rational(rng) for _ in range(3))
    r12 = embed_two_site(r_matrix(z / w, q), 1, 2, 3)
    r13 = embed_two_site(r_matrix(z, q), 1, 3, 3)
    r23 = embed_two_site(r_matrix(w, q), 2, 3, 3)
    assert mat_eq(mat_prod(r12, r13, r23), mat_prod(r23, r13, r12))


def test_k_matrix_even_in_boundary_parameter():
    z, b = mpq(3, 4), mpq(5, 2)
    assert mat_eq(k_matrix(z, b), k_matrix(z, -b))
    assert k_matrix(mpq(1), b) == [[1, 0], [0, 1]]
    with pytest.raises(SingularPoint):
        k_matrix(b, b)


def test_local_identity_suite():
    report = check_local_identities(seed=3, trials=5)
    assert report.passed, report.counterexample


def test_basis_conventions():
    # site 1 is the most significant bit, 1 = down
    assert spins(0b100, 3) == [1, 0, 0]
    assert down_positions(0b101, 3) == (1, 3)
    assert index_from_down_positions((2,), 3) == 0b010
    vec = list(range(8))
    assert spin_reversal(vec, 3)[0] == 7
    assert parity(vec, 3)[0b100] == 0b001
    assert theta_insert([1, 2], 1, 1, 1) == [0, 0, 1, 2]


def test_apply_two_site_matches_embedding():
    q, z = mpq(3, 2), mpq(5, 7)
    vec = [mpq(k + 1) for k in range(8)]
    dense = embed_two_site(rcheck_matrix(z, q), 2, 3, 3)
    expected = [sum(dense[r][c] * vec[c] for c in range(8)) for r in range(8)]
    assert apply_two_site(rcheck_matrix(z, q), 2, 3, vec, 3) == expected


def test_transfer_commutes():
    p = ModelParams.generic(mpq(3, 7), mpq(5, 11))
    zs = [mpq(2, 3), mpq(7, 5)]
    assert transfer_matrix(mpq(4, 3), zs, p).commutes_with(transfer_matrix(mpq(9, 2), zs, p))


def test_special_point_parameters():
    p = ModelParams.special(Cyc12((mpq(3), 0, 0, 0)))
    assert p.tau == 1
    assert p.relations_hold()
    g = ModelParams.generic(mpq(2, 3), mpq(5))
    assert g.relations_hold()
    assert g.x == -bracket(g.q * g.beta) / bracket(g.beta)
