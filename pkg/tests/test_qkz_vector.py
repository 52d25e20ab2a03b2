import pytest
from gmpy2 import mpq

from bqkz.exact_arith import bracket
from bqkz.lattice_ops import ModelParams
from bqkz import qkz_vector as Q

PARAMS = ModelParams.generic(mpq(3, 7), mpq(5, 11))


def points(nsites):
    return [mpq(k + 2, k + 5 + nsites) for k in range(nsites)]


def test_two_sites_by_hand():
    zs = [mpq(2, 3), mpq(7, 5)]
    comps = Q.psi_components(zs, PARAMS)
    assert comps == {(1,): bracket(PARAMS.beta * zs[0]), (2,): -bracket(PARAMS.q * PARAMS.beta * zs[1])}


def test_single_site():
    assert Q.psi_components([mpq(2)], PARAMS) == {(): 1}
    assert Q.psi_vector([mpq(2)], PARAMS) == [1, 0]


@pytest.mark.parametrize("nsites", [2, 3, 4, 5, 6])
def test_extreme_components_closed_forms(nsites):
    zs = points(nsites)
    comps = Q.psi_components(zs, PARAMS)
    n = nsites // 2
    assert comps[tuple(range(1, n + 1))] == Q.special_component_closed(zs, PARAMS)
    assert comps[tuple(range(nsites - n + 1, nsites + 1))] == Q.special_component_reversed(zs, PARAMS)


@pytest.mark.parametrize("nsites", [2, 3, 4])
def test_fast_path_matches_generic_residue_oracle(nsites):
    zs = points(nsites)
    for variant, comps in (("psi", Q.psi_components(zs, PARAMS)), ("psibar", Q.psibar_components(zs, PARAMS))):
        for positions, value in comps.items():
            assert Q.eval_component_generic(variant, positions, zs, PARAMS) == value


def test_oracle_independent_of_integration_order():
    zs = points(4)
    a = Q.eval_component_generic("psi", (2, 4), zs, PARAMS)
    b = Q.eval_component_generic("psi", (2, 4), zs, PARAMS, order=[1, 0])
    assert a == b


@pytest.mark.parametrize("nsites", [1, 2, 3, 4, 5])
def test_two_integral_formulas_agree(nsites):
    zs = points(nsites)
    assert Q.psi_vector(zs, PARAMS) == Q.psibar_vector(zs, PARAMS)


def test_wrong_position_count_rejected():
    with pytest.raises(ValueError):
        Q.eval_component("psi", (1, 2), points(3), PARAMS)


@pytest.mark.parametrize("nsites", [2, 3, 4])
def test_exchange(nsites):
    r = Q.check_exchange(nsites, seed=1, trials=3)
    assert r.passed, r.counterexample


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("nsites", [1, 2, 3, 4])
def test_reflection(nsites, sign):
    r = Q.check_reflection(nsites, seed=2, trials=3, sign=sign)
    assert r.passed, r.counterexample


@pytest.mark.parametrize("nsites", [1, 2, 3])
def test_bqkz(nsites):
    r = Q.check_bqkz(nsites, seed=3, trials=3)
    assert r.passed, r.counterexample


def test_parity():
    for nsites in (1, 2, 3, 4):
        r = Q.check_parity_inhomogeneous(nsites, seed=4, trials=3)
        assert r.passed, r.counterexample
    r = Q.check_parity_inhomogeneous(2, seed=4, trials=2, imaginary_shift=True)
    assert r.passed, r.counterexample


def test_mutations_are_detected():
    assert not Q.check_exchange(3, seed=5, trials=2, mutation="negate_b").passed
    assert not Q.check_reflection(3, seed=5, trials=2, mutation="double_beta").passed
    assert not Q.check_bqkz(2, seed=5, trials=2, mutation="double_s").passed
    # eps_N is 1 for rational shifts; the imaginary shift at N = 2 makes it -1
    assert not Q.check_parity_inhomogeneous(2, seed=5, trials=2, imaginary_shift=True, mutation="drop_sign").passed
    assert not Q.check_psi_equals_psibar(3, seed=5, trials=2, mutation="beta_numerator").passed


def test_negated_shift_is_invisible():
    # the scattering operators depend on s only through s^2
    assert Q.check_bqkz(2, seed=5, trials=2, mutation="negate_s").passed


@pytest.mark.parametrize("nsites", [2, 3])
def test_degrees_and_braid_limits(nsites):
    r = Q.check_degrees_and_braid(nsites, seed=6)
    assert r.passed, r.counterexample


def test_report_json_is_deterministic():
    a = Q.check_exchange(2, seed=9, trials=2).to_json()
    b = Q.check_exchange(2, seed=9, trials=2).to_json()
    assert a == b
    assert '"pass": true' in a
