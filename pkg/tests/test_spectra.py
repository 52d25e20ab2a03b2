import numpy as np
import pytest
from gmpy2 import mpq

from bqkz import spectra as S


def test_ground_energy_formula():
    assert S.ground_energy(5, 1) == mpq(-14, 4)
    assert S.ground_energy(4, mpq(7, 3)) == mpq(-11, 4) - mpq(16, 9) / mpq(14, 3)
    assert S.ground_energy(3, 0.5) == pytest.approx(-2 - 0.25)


def test_combinatorial_parameters():
    h = S.HamiltonianParams.combinatorial(4, "2")
    assert h.delta == mpq(-1, 2)
    assert h.p == mpq(1, 2) * (mpq(1, 2) - 2)
    assert h.pbar == mpq(1, 2) * (mpq(1, 2) - mpq(1, 2))


def test_one_site_hamiltonian():
    # a single spin only feels the two boundary fields
    rows = S.hamiltonian(S.HamiltonianParams.combinatorial(1, mpq(1)), sector=False).rows
    assert [rows[0][0], rows[1][1]] == [mpq(-1, 2), mpq(1, 2)]
    assert rows[0][1] == rows[1][0] == 0


def test_two_site_spectrum_by_hand():
    x = mpq(3)
    mat = S.sector_matrix_float(2, 3.0)
    assert np.linalg.eigvalsh(mat).min() == pytest.approx(float(S.ground_energy(2, x)))


@pytest.mark.parametrize("nsites", range(1, 8))
@pytest.mark.parametrize("x", ["1", "2", "7/3", "1/5", "10"])
def test_exact_eigenpair(nsites, x):
    r = S.verify_eigenpair(nsites, x)
    assert r.passed, r.counterexample


def test_perturbed_vector_is_rejected():
    for nsites in range(2, 6):
        assert not S.verify_eigenpair(nsites, "7/3", perturb=True).passed


def test_numeric_ground_state():
    r = S.numeric_ground_check(6, [0.1, 1.0, 10.0])
    assert r.passed, r.counterexample
    for point in r.details["points"]:
        assert point["E0_minimal"] and point["gap"] > 1e-9


def test_negative_x_is_only_recorded():
    r = S.numeric_ground_check(4, [-2.0])
    assert r.passed
    assert r.details["points"][0]["E0_in_spectrum"]


@pytest.mark.parametrize("nsites", [2, 3, 5])
def test_perron_frobenius_and_magnetisation(nsites):
    assert S.perron_frobenius_check(nsites, "3/2").passed
    assert S.check_magnetisation_commutes(nsites, "3/2").passed


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("nsites", [1, 2, 3])
def test_transfer_identities_and_eigenvalue(nsites, sign):
    r = S.check_transfer_identities(nsites, seed=1, trials=2, sign=sign)
    assert r.passed, r.counterexample
    r = S.verify_transfer_eigen(nsites, seed=1, trials=2, sign=sign)
    assert r.passed, r.counterexample


@pytest.mark.parametrize("nsites", range(1, 6))
def test_homogeneous_transfer_eigenvalue(nsites):
    r = S.verify_transfer_eigen(nsites, homogeneous=True)
    assert r.passed, r.counterexample


@pytest.mark.parametrize("nsites", [1, 2, 3, 4])
def test_log_derivative(nsites):
    for sign in (1, -1):
        r = S.verify_log_derivative(nsites, sign)
        assert r.passed, r.counterexample


def test_log_derivative_without_constant_fails():
    assert not S.verify_log_derivative(3, 1, drop_constant=True).passed
