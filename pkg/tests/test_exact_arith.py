import random
from fractions import Fraction

import pytest
from gmpy2 import mpq

from bqkz.exact_arith import (
    Cyc12,
    InterpolationError,
    Jet,
    MPoly,
    bareiss_det,
    binomial,
    bracket,
    coeff_extract,
    format_rational,
    interpolate_laurent,
    poly,
    random_rational,
    rational,
    solve_linear,
    truncated_binomial,
    truncated_geometric,
)


def test_rational_parsing():
    assert rational("7/3") == mpq(7, 3)
    assert rational("-4") == -4
    assert rational(Fraction(2, 6)) == mpq(1, 3)
    assert format_rational(mpq(10, 4)) == "5/2"
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(ValueError):
        rational("1/x")
    with pytest.raises(ZeroDivisionError):
        rational("1/0")


def test_bracket():
    assert bracket(mpq(2)) == mpq(3, 2)
    assert bracket(mpq(1)) == 0
    z = mpq(5, 7)
    assert bracket(1 / z) == -bracket(z)


def test_random_rational_is_seeded():
    a = [random_rational(random.Random(3)) for _ in range(2)]
    assert a[0] == a[1]
    assert random_rational(random.Random(4), positive=True) > 0


def test_cyclotomic_units():
    q, i, r3, zeta = Cyc12.q(), Cyc12.i(), Cyc12.sqrt3(), Cyc12.zeta()
    one = Cyc12((1, 0, 0, 0))
    assert q ** 3 == one and q != one
    assert 1 + q + q * q == 0
    assert i * i == -one
    assert r3 * r3 == 3 * one
    assert zeta ** 12 == one and zeta ** 6 == -one
    assert zeta ** 4 == q
    # [q] = q - 1/q = i sqrt3
    assert bracket(q) == i * r3


def test_cyclotomic_field_inverse():
    rng = random.Random(0)
    for _ in range(20):
        a = Cyc12([random_rational(rng) for _ in range(4)])
        if a == 0:
            continue
        assert a * a.inverse() == 1
        assert (a / a) == 1


def test_jet_derivative():
    z = Jet.variable(mpq(3))
    f = (z * z + 2) / z  # derivative 1 - 2/z^2
    assert f.value == mpq(11, 3)
    assert f.deriv == 1 - mpq(2, 9)


def test_solve_linear_and_determinant():
    m = [[mpq(2), mpq(1), mpq(0)], [mpq(1), mpq(3), mpq(1)], [mpq(0), mpq(1), mpq(4)]]
    x = solve_linear(m, [mpq(1), mpq(2), mpq(3)])
    assert [sum(m[r][c] * x[c] for c in range(3)) for r in range(3)] == [1, 2, 3]
    assert bareiss_det(m) == 2 * (12 - 1) - 1 * 4
    swapped = [m[1], m[0], m[2]]
    assert bareiss_det(swapped) == -bareiss_det(m)
    assert bareiss_det([[mpq(1), mpq(2)], [mpq(2), mpq(4)]]) == 0


def test_mpoly_arithmetic_and_order():
    x, tau = MPoly.var("x"), MPoly.var("tau")
    p = (1 + x) * (1 + tau)
    assert p.vars == ("x", "tau")
    assert p == poly("1 + x + tau + x*tau")
    assert (x + tau) ** 2 == x * x + 2 * x * tau + tau * tau
    assert p.degree("x") == 1
    assert p.substitute({"tau": 1}).with_vars(("x",)) == 2 + 2 * x
    assert p.evaluate({"x": 2, "tau": mpq(1, 2)}) == mpq(9, 2)
    with pytest.raises(ValueError):
        MPoly({(1, 0): 1}, ("tau", "x"))


def test_mpoly_laurent_and_json():
    inv = MPoly.var("tau", -1)
    p = inv * MPoly.var("tau", 2) + inv
    assert not p.is_polynomial()
    assert (p * MPoly.var("tau")).is_polynomial()
    q = poly("3*x^2 - 1/2*x*tau + 7")
    assert MPoly.from_json(q.to_json()) == q
    assert not q.is_integral()
    assert coeff_extract(q, {"x": 2}).constant_value() == 3


def test_series_helpers():
    assert truncated_geometric(mpq(2), 3) == [1, -2, 4, -8]
    assert truncated_binomial(mpq(2), -1, 3) == truncated_geometric(mpq(2), 3)
    assert truncated_binomial(mpq(1), 3, 4) == [1, 3, 3, 1, 0]
    assert binomial(5, 2) == 10 and binomial(3, 4) == 0 and binomial(3, -1) == 0


def test_laurent_interpolation():
    f = lambda z: 3 / z ** 2 + 1 - 5 * z ** 3
    pts = [mpq(k + 2, 3) for k in range(8)]
    res = interpolate_laurent([(z, f(z)) for z in pts], -2, 3)
    assert res.coeffs == {-2: 3, 0: 1, 3: -5}
    with pytest.raises(InterpolationError):
        interpolate_laurent([(z, f(z)) for z in pts], -1, 3)
