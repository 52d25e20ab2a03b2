"""Acceptance matrix: thirteen criteria at their stated sizes, tolerances and time budgets.

Each criterion starts from an empty component cache, so the recorded time
includes computing every table it needs. One PASS/FAIL line per criterion is
printed at the end of the pytest run; ``python3 tests/test_acceptance.py``
prints the same lines without pytest.
"""

from __future__ import annotations

import io
import json
import os
import sys
import tempfile
import time
from contextlib import redirect_stdout
from typing import Callable

import pytest

from bqkz import cli, combinatorics, homogeneous, qkz_vector, spectra, tsasm
from bqkz.exact_arith import poly

RESULTS: list = []

PSI5_GENERAL = {
    "1,2": "tau^3",
    "1,3": "tau^2*(2 + tau^2) + x*tau^3",
    "1,4": "tau*(2 + tau^2) + x*tau^2*(2 + tau^2)",
    "1,5": "x*tau*(2 + tau^2)",
    "2,3": "tau*(1 + tau^2) + 2*x*tau^2 + x^2*tau^3",
    "2,4": "1 + 2*tau^2 + x*tau*(3 + 2*tau^2) + x^2*tau^2*(2 + tau^2)",
    "2,5": "x*(1 + 2*tau^2) + x^2*tau*(2 + tau^2)",
    "3,4": "tau + x*(1 + tau^2) + x^2*tau*(1 + tau^2)",
    "3,5": "x*tau + x^2*(1 + 2*tau^2)",
    "4,5": "x^2*tau",
}
PSI5_TAU1 = {
    "1,2": "1", "1,3": "3 + x", "1,4": "3*(1 + x)", "1,5": "3*x",
    "2,3": "2 + 2*x + x^2", "2,4": "3 + 5*x + 3*x^2", "2,5": "3*x*(1 + x)",
    "3,4": "1 + 2*x + 2*x^2", "3,5": "x*(1 + 3*x)", "4,5": "x^2",
}
TSASM_TABLE = {
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
TSASM_COUNTS = [1, 1, 1, 2, 4, 13, 46, 248, 1516, 13654]
EIGEN_XS = ["1", "2", "7/3", "1/5", "10"]
NUMERIC_XS = [0.1, 0.5, 1.0, 2.0, 10.0]


def same(p, q, names=("x", "tau")) -> bool:
    return p.with_vars(names) == q.with_vars(names)


class Criterion:
    """Collects sub-check failures and the wall time of one criterion."""

    def __init__(self, number: int, title: str, budget: float):
        self.number = number
        self.title = title
        self.budget = budget
        self.failures: list = []
        self.elapsed = 0.0

    def require(self, ok: bool, label: str) -> None:
        if not ok:
            self.failures.append(label)

    def report(self, r, label: str | None = None) -> None:
        if not r.passed and not r.observation:
            self.failures.append(f"{label or r.suite}: {json.dumps(r.counterexample, default=str)[:300]}")

    @property
    def passed(self) -> bool:
        return not self.failures and self.elapsed < self.budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} criterion {self.number:2d} {self.title} ({self.elapsed:.1f}s, budget {self.budget:.0f}s)"
        if self.elapsed >= self.budget:
            text += " over time budget"
        if self.failures:
            text += " :: " + "; ".join(self.failures[:3])
        return text


def run_criterion(number: int, title: str, budget: float, body: Callable[[Criterion], None]) -> Criterion:
    crit = Criterion(number, title, budget)
    previous = os.environ.get("BQKZ_CACHE")
    with tempfile.TemporaryDirectory(prefix=f"bqkz-criterion{number}-") as cache:
        os.environ["BQKZ_CACHE"] = cache
        homogeneous._MEMORY.clear()
        tsasm.statistics.cache_clear()
        start = time.perf_counter()
        try:
            body(crit)
        finally:
            crit.elapsed = time.perf_counter() - start
            if previous is None:
                os.environ.pop("BQKZ_CACHE", None)
            else:
                os.environ["BQKZ_CACHE"] = previous
    RESULTS.append(crit.line())
    print(crit.line())
    return crit


# ---------------------------------------------------------------------------
# Criterion bodies
# ---------------------------------------------------------------------------


def body_01(c: Criterion) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "psi5.json")
        with redirect_stdout(io.StringIO()):
            c.require(cli.main(["gs", "--sites", "5", "--x", "1", "--out", out]) == 0, "gs exit code")
        with open(out) as fh:
            obj = json.load(fh)
    table = homogeneous.ComponentTable.from_json_obj(obj)
    c.require(set(obj["components"]) == set(PSI5_GENERAL), "component set")
    for key, text in PSI5_GENERAL.items():
        got = table[homogeneous.positions_of(key)]
        c.require(same(got, poly(text)), f"tau-general component {key}")
        c.require(same(got.substitute({"tau": 1}), poly(PSI5_TAU1[key])), f"tau = 1 component {key}")


def body_02(c: Criterion) -> None:
    for nsites in range(1, 13):
        for x in EIGEN_XS:
            c.report(spectra.verify_eigenpair(nsites, x), f"N={nsites} x={x}")


def body_03(c: Criterion) -> None:
    for nsites in range(1, 13):
        r = spectra.numeric_ground_check(nsites, NUMERIC_XS, gap_threshold=1e-9)
        c.report(r, f"N={nsites}")
        for point in r.details["points"]:
            rel = abs(point["min"] - point["E0"]) / abs(point["E0"])
            c.require(rel <= 1e-9 and point["gap"] > 1e-9, f"N={nsites} x={point['x']} rel={rel:.2e}")


def body_04(c: Criterion) -> None:
    c.report(combinatorics.check_scalar_products(12))


def body_05(c: Criterion) -> None:
    c.report(combinatorics.check_general_tau_scalar_products(10))


def body_06(c: Criterion) -> None:
    c.report(combinatorics.check_susy_identities(5))
    norm = sum(p.evaluate({"x": 1}) ** 2 for p in homogeneous.psi(5, 1).components.values())
    c.require(norm == 286, f"|psi_5|^2 = {norm}")


def body_07(c: Criterion) -> None:
    r = combinatorics.check_conjecture_overlaps(10, ("1/2", "2", "7/3"))
    c.report(r)
    c.require(r.details.get("compositions_checked", 0) > 0, "no compositions checked")


def body_08(c: Criterion) -> None:
    trials, seed = 5, 2024
    for nsites in range(1, 6):
        c.report(qkz_vector.check_bqkz(nsites, seed, trials), f"bqkz N={nsites}")
    for nsites in range(2, 7):
        c.report(qkz_vector.check_exchange(nsites, seed, trials), f"exchange N={nsites}")
    for nsites in range(1, 7):
        for sign in (1, -1):
            c.report(qkz_vector.check_reflection(nsites, seed, trials, sign), f"reflection N={nsites} sign={sign}")
    for nsites in range(1, 6):
        c.report(qkz_vector.check_parity_inhomogeneous(nsites, seed, trials), f"parity N={nsites}")
    c.report(qkz_vector.check_parity_inhomogeneous(2, seed, trials, imaginary_shift=True), "parity s = i v^3")
    mutants = [
        qkz_vector.check_exchange(4, seed, trials, mutation="negate_b"),
        qkz_vector.check_reflection(4, seed, trials, mutation="double_beta"),
        qkz_vector.check_bqkz(3, seed, trials, mutation="double_s"),
        qkz_vector.check_parity_inhomogeneous(2, seed, trials, imaginary_shift=True, mutation="drop_sign"),
        qkz_vector.check_psi_equals_psibar(4, seed, trials, mutation="beta_numerator"),
    ]
    for r in mutants:
        c.require(not r.passed, f"mutation of {r.suite} not detected")


def body_09(c: Criterion) -> None:
    for sign in (1, -1):
        for nsites in range(1, 5):
            c.report(spectra.check_transfer_identities(nsites, 11, 3, sign), f"identities N={nsites} sign={sign}")
            c.report(spectra.verify_transfer_eigen(nsites, 11, 3, sign), f"eigenvalue N={nsites} sign={sign}")
        for nsites in range(1, 7):
            c.report(spectra.verify_log_derivative(nsites, sign), f"log-derivative N={nsites} sign={sign}")
    for nsites in range(1, 9):
        c.report(spectra.verify_transfer_eigen(nsites, homogeneous=True), f"homogeneous eigenvalue N={nsites}")
    c.require(not spectra.verify_log_derivative(4, 1, drop_constant=True).passed, "log-derivative mutation")


def body_10(c: Criterion) -> None:
    for nsites in range(1, 6):
        c.report(qkz_vector.check_degrees_and_braid(nsites, 5, 1, check_braid=nsites <= 4), f"N={nsites}")


def body_11(c: Criterion) -> None:
    start = time.perf_counter()
    c.require(tsasm.count(9) == 13654, "m = 9 count")
    c.require(time.perf_counter() - start < 300, "m = 9 enumeration over 5 minutes")
    c.require([tsasm.count(m) for m in range(10)] == TSASM_COUNTS, "counts m <= 9")
    for m, text in TSASM_TABLE.items():
        c.require(same(tsasm.generating_function(m), poly(text), ("tau", "t")), f"generating function m={m}")
    c.report(tsasm.check_shift_identity(8))


def body_12(c: Criterion) -> None:
    for nsites in range(1, 9):
        c.report(tsasm.check_conjecture_tsasm(nsites), f"N={nsites}")
        n = nsites // 2
        c.require(all((n - mu) % 2 == 0 for (mu, _), _ in tsasm.statistics(nsites)), f"mu parity N={nsites}")


def body_13(c: Criterion) -> None:
    for nsites in range(1, 11):
        c.report(homogeneous.check_four_formulas(nsites), f"four formulas N={nsites}")
    for nsites in range(1, 13):
        c.report(homogeneous.check_degree_bound(nsites), f"degree bound N={nsites}")
    for nsites in range(2, 11):
        c.report(homogeneous.check_x0_spin_reversal(nsites), f"x = 0 N={nsites}")


CRITERIA = [
    (1, "N = 5 ground state tables", 1.0, body_01),
    (2, "exact eigenpair N <= 12", 120.0, body_02),
    (3, "numeric ground-state status N <= 12", 120.0, body_03),
    (4, "scalar-product determinant N <= 12", 120.0, body_04),
    (5, "general-tau determinant N <= 10", 120.0, body_05),
    (6, "supersymmetric-point identities N <= 11", 60.0, body_06),
    (7, "overlap factorisation conjecture N <= 10", 300.0, body_07),
    (8, "inhomogeneous relations and mutations", 300.0, body_08),
    (9, "transfer matrix and eigenvalue", 300.0, body_09),
    (10, "degrees, parities and braid limits", 180.0, body_10),
    (11, "TSASM enumeration and generating functions", 300.0, body_11),
    (12, "TSASM sum conjecture N <= 8", 600.0, body_12),
    (13, "four formulas, degree bounds, x = 0 reduction", 180.0, body_13),
]


@pytest.mark.slow
@pytest.mark.parametrize("number,title,budget,body", CRITERIA, ids=[f"criterion{n:02d}" for n, *_ in CRITERIA])
def test_criterion(number, title, budget, body):
    crit = run_criterion(number, title, budget, body)
    assert crit.passed, crit.line()


def main() -> int:
    lines = [run_criterion(*spec) for spec in CRITERIA]
    return 0 if all(c.passed for c in lines) else 1


if __name__ == "__main__":
    sys.exit(main())
