"""Binomial determinants, product formulas and overlap identities."""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import factorial
from typing import Sequence

from gmpy2 import mpq

from .exact_arith import MPoly, bareiss_det, binomial, rational
from .reports import Report

X = MPoly.var("x")
ALPHA = MPoly.var("alpha")
TAU = MPoly.var("tau")


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------


def minor_det(matrix: Sequence[Sequence]):
    """Division-free determinant by Laplace expansion with memoised minors.

    Suitable for entries in any commutative ring (MPoly included); cost is
    O(n 2^n) ring operations.
    """
    size = len(matrix)
    if size == 0:
        return MPoly.const(1)

    @lru_cache(maxsize=None)
    def det_of(row: int, columns: tuple):
        if row == size:
            return MPoly.const(1)
        total = MPoly.const(0)
        for pos, col in enumerate(columns):
            entry = matrix[row][col]
            if entry == 0:
                continue
            rest = columns[:pos] + columns[pos + 1:]
            term = entry * det_of(row + 1, rest)
            total = total - term if pos % 2 else total + term
        return total

    return det_of(0, tuple(range(size)))


# ---------------------------------------------------------------------------
# f polynomials and scalar products
# ---------------------------------------------------------------------------


def f_poly(i: int, j: int, k: int) -> MPoly:
    """tau^(2(i-j)+k+1) * sum_m C(i-1, 2(i-j)+m+k+1) C(j-1, m) tau^(2m)."""
    base = 2 * (i - j) + k + 1
    terms = {}
    for m in range(j):
        c = binomial(i - 1, base + m) * binomial(j - 1, m)
        if c:
            terms[(base + 2 * m,)] = terms.get((base + 2 * m,), 0) + c
    return MPoly(terms, ("tau",))


def f_poly_direct(i: int, j: int, k: int) -> MPoly:
    """The same quantity as the u^(-1) coefficient of (tau+u)^(i-1)(tau+1/u)^(j-1)u^(i-j+k)."""
    terms = {}
    for a in range(i):
        for m in range(j):
            if a - m + i - j + k == -1:
                key = (i - 1 - a + j - 1 - m,)
                terms[key] = terms.get(key, 0) + binomial(i - 1, a) * binomial(j - 1, m)
    return MPoly(terms, ("tau",))


def scalar_product_det(nsites: int, tau_mode: str = "special") -> MPoly:
    """F_N(x, alpha) from its determinant formula.

    ``tau_mode`` is ``"special"`` (tau = 1, binomial entries) or ``"general"``
    (entries built from :func:`f_poly`).
    """
    n = nsites // 2
    odd = nsites % 2
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            if tau_mode == "special":
                top = i + j - 2 + odd
                low = 2 * i - j - 2 + odd
                entry = (ALPHA * X * binomial(top, low) + (ALPHA + X) * binomial(top, low + 1)
                         + MPoly.const(binomial(top, low + 2)))
            elif tau_mode == "general":
                if odd:
                    entry = (ALPHA * X * f_poly(i, j + 1, 0) + (ALPHA + X) * f_poly(i, j + 1, 1)
                             + f_poly(i, j + 1, 2))
                else:
                    entry = (ALPHA * X * f_poly(i, j, -2) + (ALPHA + X) * f_poly(i, j, -1)
                             + f_poly(i, j, 0))
            else:
                raise ValueError(f"unknown tau mode {tau_mode!r}")
            row.append(entry)
        rows.append(row)
    return minor_det(rows)


def alternating_component_det(nsites: int) -> MPoly:
    """Component on the alternating configuration (up, down, ..., [up]) at tau = 1."""
    n = nsites // 2
    odd = nsites % 2
    rows = [[X * binomial(i + j - 2 + odd, 2 * i - j - 1) + MPoly.const(binomial(i + j - 2 + odd, 2 * i - j - 1 + 1))
             for j in range(1, n + 1)] for i in range(1, n + 1)]
    return minor_det(rows)


def alternating_positions(nsites: int) -> tuple:
    """Down spins on every even site."""
    return tuple(range(2, nsites + 1, 2))


def xi_contraction(nsites: int, tau="symbolic") -> MPoly:
    """sum over eps of alpha^(sum eps) (psi_N)_{..., N-2(n-k)-eps_k, ...}."""
    from .homogeneous import psi

    table = psi(nsites, tau)
    n = nsites // 2
    total = MPoly.const(0)
    for eps in itertools.product((0, 1), repeat=n):
        positions = tuple(nsites - 2 * (n - k) - e for k, e in zip(range(1, n + 1), eps))
        total = total + table[positions] * ALPHA ** sum(eps)
    return total


# ---------------------------------------------------------------------------
# Product formulas
# ---------------------------------------------------------------------------


def product_numbers(which: str, size: int) -> int:
    """A_V(2n+1) (vertically symmetric ASMs) or N8(2n) (CSTC plane partitions)."""
    if which in ("A_V", "AV", "av"):
        if size % 2 == 0 or size < 1:
            raise ValueError("A_V is defined for odd sizes 2n+1")
        n = (size - 1) // 2
        value = mpq(1, 2 ** n)
        for k in range(1, n + 1):
            value *= mpq(factorial(6 * k - 2) * factorial(2 * k - 1),
                         factorial(4 * k - 2) * factorial(4 * k - 1))
    elif which in ("N8", "N_8", "n8"):
        if size % 2 or size < 0:
            raise ValueError("N8 is defined for even sizes 2n")
        n = size // 2
        value = mpq(1)
        for k in range(n):
            value *= mpq((3 * k + 1) * factorial(6 * k) * factorial(2 * k),
                         factorial(4 * k) * factorial(4 * k + 1))
    else:
        raise ValueError(f"unknown product formula {which!r}")
    if value.denominator != 1:
        raise ArithmeticError(f"{which}({size}) is not an integer")
    return int(value)


def gamma(size: int) -> int:
    k = size // 2
    return product_numbers("A_V", 2 * k + 1) if size % 2 == 0 else product_numbers("N8", 2 * k + 2)


# ---------------------------------------------------------------------------
# Overlaps
# ---------------------------------------------------------------------------


def _tensor_components(parts: Sequence[int]) -> dict:
    """Components of psi_{N1} (x) ... (x) psi_{Nm} at tau = 1, keyed by global down positions."""
    from .homogeneous import psi

    combined = {(): MPoly.const(1)}
    offset = 0
    for size in parts:
        table = psi(size, 1)
        nxt = {}
        for pos, val in combined.items():
            for a, p in table.items():
                nxt[pos + tuple(offset + k for k in a)] = val * p
        combined = nxt
        offset += size
    return combined


def overlap_poly(parts: Sequence[int]) -> MPoly:
    """O_{N1..Nm} as a polynomial in x (tau = 1)."""
    from .homogeneous import psi

    nsites = sum(parts)
    big = psi(nsites, 1)
    total = MPoly.const(0)
    for pos, val in _tensor_components(parts).items():
        p = big.components.get(pos)
        if p is not None:
            total = total + p * val
    return total


def overlap(parts: Sequence[int], x) -> mpq:
    return overlap_poly(parts).evaluate({"x": rational(x)})


def conjecture_rhs(parts: Sequence[int]) -> MPoly:
    """x^n F_N(x, 1/x) prod gamma_{N_i}, assembled as a polynomial."""
    nsites = sum(parts)
    n = nsites // 2
    f = scalar_product_det(nsites).with_vars(("x", "alpha"))
    terms = {}
    for (ex, ea), c in f.terms.items():
        terms[(n + ex - ea,)] = terms.get((n + ex - ea,), 0) + c
    scale = 1
    for size in parts:
        scale *= gamma(size)
    return MPoly(terms, ("x",)) * scale


def compositions(total: int):
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in compositions(total - first):
            yield (first,) + rest


def check_conjecture_overlaps(max_sites: int, x_samples: Sequence = ("1/2", "2", "7/3")) -> Report:
    """O_{N1..Nm} = x^n F_N(x, 1/x) prod gamma for compositions with at most one odd part."""
    report = Report("conjecture-overlaps", max_sites, None, len(x_samples), claim="overlap-factorisation-conjecture")
    checked = 0
    for nsites in range(1, max_sites + 1):
        seen: dict = {}
        for parts in compositions(nsites):
            lhs = overlap_poly(parts).with_vars(("x",))
            odd_parts = sum(1 for s in parts if s % 2)
            if odd_parts > 1:
                if lhs.terms:
                    report.fail({"composition": list(parts), "error": "overlap with two odd parts is nonzero"})
                    return report
                continue
            rhs = conjecture_rhs(parts).with_vars(("x",))
            for x in x_samples:
                xv = rational(x)
                if lhs.evaluate({"x": xv}) != rhs.evaluate({"x": xv}):
                    report.fail({"composition": list(parts), "x": str(xv),
                                 "lhs": str(lhs.evaluate({"x": xv})), "rhs": str(rhs.evaluate({"x": xv}))})
                    return report
            if lhs != rhs:
                report.fail({"composition": list(parts), "lhs": str(lhs), "rhs": str(rhs)})
                return report
            key = tuple(sorted(parts))
            if key in seen and seen[key] != lhs:
                report.fail({"composition": list(parts), "error": "overlap depends on the order of parts"})
                return report
            seen[key] = lhs
            checked += 1
    report.details["compositions_checked"] = checked
    return report


def check_susy_identities(max_n: int) -> Report:
    """Identities at x = 1 tying psi_N to A_V and N8, for N <= 2 max_n + 1."""
    from .homogeneous import psi

    report = Report("susy", 2 * max_n + 1, None, 1, claim="supersymmetric-point-identities")
    one = {"x": 1, "alpha": 1}
    for nsites in range(2, 2 * max_n + 2):
        n, nbar = nsites // 2, (nsites + 1) // 2
        table = psi(nsites, 1)
        alt = table[alternating_positions(nsites)].evaluate(one)
        f_one = scalar_product_det(nsites).evaluate(one)
        norm = sum(p.evaluate(one) ** 2 for p in table.components.values())
        if nsites % 2 == 0:
            alt_want = product_numbers("A_V", 2 * n + 1)
            f_want = product_numbers("N8", 2 * n + 2)
        else:
            alt_want = product_numbers("N8", 2 * n + 2)
            f_want = product_numbers("A_V", 2 * n + 3)
        norm_want = product_numbers("A_V", 2 * nbar + 1) * product_numbers("N8", 2 * n + 2)
        checks = [
            ("alternating-component", alt, alt_want),
            ("alternating-determinant", alternating_component_det(nsites).evaluate(one), alt_want),
            ("projection", f_one, f_want),
            ("projection-contraction", xi_contraction(nsites, 1).evaluate(one), f_want),
            ("norm", norm, norm_want),
            ("norm-factorisation", norm, alt * f_one),
        ]
        for label, got, want in checks:
            if got != want:
                report.fail({"N": nsites, "identity": label, "got": str(got), "expected": str(want)})
                return report
    return report


def check_scalar_products(max_sites: int) -> Report:
    """Determinant F_N equals the contraction of psi_N, and is symmetric in x and alpha (tau = 1)."""
    report = Report("scalar-products", max_sites, None, 1, claim="scalar-product-determinants")
    for nsites in range(1, max_sites + 1):
        det = scalar_product_det(nsites).with_vars(("x", "alpha"))
        contraction = xi_contraction(nsites, 1).with_vars(("x", "alpha"))
        if det != contraction:
            report.fail({"N": nsites, "determinant": str(det), "contraction": str(contraction)})
            return report
        swapped = det.substitute({"x": ALPHA, "alpha": X}).with_vars(("x", "alpha"))
        if swapped != det:
            report.fail({"N": nsites, "error": "not symmetric under x <-> alpha"})
            return report
        if nsites >= 2:
            alt = alternating_component_det(nsites).with_vars(("x",))
            from .homogeneous import psi

            comp = psi(nsites, 1)[alternating_positions(nsites)].with_vars(("x",))
            if alt != comp:
                report.fail({"N": nsites, "error": "alternating component determinant differs",
                             "determinant": str(alt), "component": str(comp)})
                return report
    return report


def check_general_tau_scalar_products(max_sites: int) -> Report:
    """f-polynomial determinants equal the eps-sum of general-tau components."""
    report = Report("scalar-products-general-tau", max_sites, None, 1, claim="scalar-product-determinants")
    for i in range(1, 7):
        for j in range(1, 7):
            for k in range(-3, 4):
                lhs = f_poly(i, j, k)
                if lhs != f_poly_direct(i, j, k) or lhs != f_poly(i, j + 1, k + 2) - TAU * f_poly(i, j, k + 1):
                    report.fail({"i": i, "j": j, "k": k, "error": "f recurrence or residue mismatch"})
                    return report
                at_one = lhs.evaluate({"tau": 1})
                if at_one != binomial(i + j - 2, 2 * i - j + k):
                    report.fail({"i": i, "j": j, "k": k, "error": "tau = 1 binomial mismatch"})
                    return report
    for nsites in range(1, max_sites + 1):
        vars_ = ("x", "tau", "alpha")
        det = scalar_product_det(nsites, "general").with_vars(vars_)
        contraction = xi_contraction(nsites).with_vars(vars_)
        if det != contraction:
            report.fail({"N": nsites, "determinant": str(det), "contraction": str(contraction)})
            return report
    return report


def pointwise_det(nsites: int, x, alpha) -> mpq:
    """Bareiss evaluation of the tau = 1 determinant at rational points (oracle)."""
    n = nsites // 2
    odd = nsites % 2
    x, alpha = rational(x), rational(alpha)
    rows = [[alpha * x * binomial(i + j - 2 + odd, 2 * i - j - 2 + odd)
             + (alpha + x) * binomial(i + j - 2 + odd, 2 * i - j - 1 + odd)
             + binomial(i + j - 2 + odd, 2 * i - j + odd)
             for j in range(1, n + 1)] for i in range(1, n + 1)]
    return bareiss_det(rows) if rows else mpq(1)
