"""Totally-symmetric alternating sign matrices of odd size.

A TSASM of size M = 2m + 1 is fixed by its upper-left quadrant, which is a
symmetric m x m matrix B. Row i of the full matrix reads
B[i, 1..m], (-1)^(i+1), B[i, m..1], so it is an alternating row with sum 1
exactly when the prefix sums of B[i, :] stay in {0, 1} and end at 0 for odd i
and 1 for even i. Columns follow from symmetry. The enumeration below fills
the triangle j >= i row by row, using the prefix sums of later rows (known
through the symmetric entries already placed) for pruning.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .exact_arith import MPoly
from .reports import Report

T = MPoly.var("t")
TAU = MPoly.var("tau")
X = MPoly.var("x")

# Known A_TS(2m+1) for m = 0..9.
KNOWN_COUNTS = (1, 1, 1, 2, 4, 13, 46, 248, 1516, 13654)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _alternating_unit_sum(line: Sequence[int]) -> bool:
    partial = 0
    for value in line:
        if value not in (-1, 0, 1):
            return False
        partial += value
        if partial not in (0, 1):
            return False
    return partial == 1


def validate_asm(matrix: Sequence[Sequence[int]]) -> bool:
    """Entries in {-1, 0, 1}, every row and column alternates and sums to 1."""
    size = len(matrix)
    if size == 0 or any(len(row) != size for row in matrix):
        return False
    rows_ok = all(_alternating_unit_sum(row) for row in matrix)
    return rows_ok and all(_alternating_unit_sum([matrix[i][j] for i in range(size)]) for j in range(size))


def validate_tsasm(matrix: Sequence[Sequence[int]]) -> bool:
    """An ASM with a_ij = a_ji and a_ij = a_i(M+1-j)."""
    if not validate_asm(matrix):
        return False
    size = len(matrix)
    for i in range(size):
        for j in range(size):
            if matrix[i][j] != matrix[j][i] or matrix[i][j] != matrix[i][size - 1 - j]:
                return False
    return True


# ---------------------------------------------------------------------------
# Triangles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TsasmTriangle:
    """Entries a_ij, 1 <= i <= j <= m; rows[i-1] holds a_ii..a_im."""

    m: int
    rows: tuple

    def entry(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self.rows[i - 1][j - i]

    @property
    def mu(self) -> int:
        return sum(1 for row in self.rows if row[0])

    @property
    def nu(self) -> int:
        return sum(1 for row in self.rows for value in row[1:] if value)

    def weight(self) -> MPoly:
        return T ** self.mu * TAU ** self.nu

    def full_matrix(self) -> list:
        return reconstruct(self)

    def __str__(self) -> str:
        symbols = {1: "+", -1: "-", 0: "0"}
        lines = []
        for i in range(self.m):
            lines.append("  " * i + " ".join(symbols[v] for v in self.rows[i]))
        return "\n".join(lines)


def reconstruct(triangle: TsasmTriangle) -> list:
    """Full (2m+1) x (2m+1) matrix from the triangle and the fixed medians."""
    m = triangle.m
    size = 2 * m + 1
    middle = m + 1

    def fold(k: int) -> int:
        return k if k <= middle else size + 1 - k

    matrix = []
    for i in range(1, size + 1):
        row = []
        for j in range(1, size + 1):
            fi, fj = fold(i), fold(j)
            if fi == middle and fj == middle:
                row.append((-1) ** m)
            elif fi == middle:
                row.append((-1) ** (j + 1))
            elif fj == middle:
                row.append((-1) ** (i + 1))
            else:
                row.append(triangle.entry(fi, fj))
        matrix.append(row)
    return matrix


def triangle_from_matrix(matrix: Sequence[Sequence[int]]) -> TsasmTriangle:
    m = (len(matrix) - 1) // 2
    rows = tuple(tuple(matrix[i][j] for j in range(i, m)) for i in range(m))
    return TsasmTriangle(m, rows)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _search(m: int, visit: Callable[[list], None]) -> None:
    """Backtracking over the triangle; calls visit(entries) with entries[i][j] = a_(i+1)(j+1), j >= i."""
    entries = [[0] * m for _ in range(m)]
    # prefix[j] is the sum of row j over the columns already fixed (rows above, by symmetry)
    prefix = [0] * m

    def fill_row(i: int) -> None:
        if i == m:
            visit(entries)
            return
        target = 1 if (i + 1) % 2 == 0 else 0
        saved = prefix[:]

        def fill(j: int, running: int) -> None:
            if j == m:
                if running == target:
                    fill_row(i + 1)
                return
            last = j == m - 1
            for value in (0, 1, -1):
                r = running + value
                if r not in (0, 1) or (last and r != target):
                    continue
                if j > i:
                    c = prefix[j] + value
                    if c not in (0, 1):
                        continue
                    prefix[j] = c
                entries[i][j] = value
                fill(j + 1, r)
                if j > i:
                    prefix[j] -= value
            entries[i][j] = 0

        fill(i, prefix[i])
        prefix[:] = saved

    fill_row(0)


def enumerate(m: int) -> Iterator[TsasmTriangle]:
    """All TSASM triangles of size 2m+1, each once, in a fixed order."""
    found: list = []
    _search(m, lambda e: found.append(TsasmTriangle(m, tuple(tuple(e[i][i:]) for i in range(m)))))
    yield from found


def visit(m: int, callback: Callable[[TsasmTriangle], None]) -> None:
    """Streaming form of enumerate."""
    _search(m, lambda e: callback(TsasmTriangle(m, tuple(tuple(e[i][i:]) for i in range(m)))))


@lru_cache(maxsize=None)
def statistics(m: int) -> tuple:
    """Sorted ((mu, nu), multiplicity) pairs over all TSASMs of size 2m+1."""
    counts: Counter = Counter()

    def tally(e: list) -> None:
        mu = 0
        nu = 0
        for i in range(m):
            row = e[i]
            if row[i]:
                mu += 1
            for j in range(i + 1, m):
                if row[j]:
                    nu += 1
        counts[(mu, nu)] += 1

    _search(m, tally)
    return tuple(sorted(counts.items()))


def count(m: int) -> int:
    return sum(mult for _, mult in statistics(m))


def generating_function(m: int) -> MPoly:
    """A_TS(2m+1; t, tau) = sum over TSASMs of t^mu tau^nu."""
    terms = {(nu, mu): mult for (mu, nu), mult in statistics(m)}
    return MPoly(terms, ("tau", "t"))


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_enumeration(m: int, seed: int = 0, samples: int = 100) -> Report:
    """Round-trip and full-matrix validation on sampled triangles; brute force for m <= 4."""
    report = Report("tsasm-enumeration", m, seed, samples, claim="tsasm-counts")
    triangles = list(enumerate(m))
    if len(set(triangles)) != len(triangles):
        report.fail({"m": m, "error": "duplicate triangle"})
        return report
    rng = random.Random(seed)
    picks = triangles if len(triangles) <= samples else rng.sample(triangles, samples)
    for tri in picks:
        full = reconstruct(tri)
        if not validate_tsasm(full) or triangle_from_matrix(full) != tri:
            report.fail({"m": m, "triangle": [list(r) for r in tri.rows]})
            return report
    if m <= 4:
        brute = _brute_force(m)
        if brute != set(triangles):
            report.fail({"m": m, "error": "enumeration differs from brute force",
                         "brute": len(brute), "enumerated": len(triangles)})
            return report
    if m < len(KNOWN_COUNTS) and len(triangles) != KNOWN_COUNTS[m]:
        report.fail({"m": m, "count": len(triangles), "expected": KNOWN_COUNTS[m]})
    report.details["count"] = len(triangles)
    return report


def _brute_force(m: int) -> set:
    cells = [(i, j) for i in range(m) for j in range(i, m)]
    found = set()
    for values in itertools.product((-1, 0, 1), repeat=len(cells)):
        rows = [[] for _ in range(m)]
        for (i, _), v in zip(cells, values):
            rows[i].append(v)
        tri = TsasmTriangle(m, tuple(tuple(r) for r in rows))
        if validate_tsasm(reconstruct(tri)):
            found.add(tri)
    return found


def conjecture_rhs(nsites: int) -> MPoly:
    """sum over TSASMs of size 2N+1 of (1+x)^mu (1+x(x-tau))^((n-mu)/2) tau^nu."""
    n = nsites // 2
    base = 1 + X * (X - TAU)
    total = MPoly.const(0)
    for (mu, nu), mult in statistics(nsites):
        if (n - mu) % 2:
            raise ParityViolation(nsites, mu)
        total = total + mult * (1 + X) ** mu * base ** ((n - mu) // 2) * TAU ** nu
    return total


class ParityViolation(ArithmeticError):
    def __init__(self, nsites: int, mu: int):
        super().__init__(f"n - mu is odd for N={nsites}, mu={mu}")
        self.nsites = nsites
        self.mu = mu


def check_conjecture_tsasm(nsites: int) -> Report:
    """S_N(x, tau) against the weighted TSASM sum, plus S_N(1, 1) = A_TS(2N+3)."""
    from .homogeneous import sum_components

    report = Report("conjecture-tsasm", nsites, None, 1, claim="tsasm-sum-conjecture")
    try:
        rhs = conjecture_rhs(nsites)
    except ParityViolation as exc:
        report.fail({"N": nsites, "error": "parity violation", "mu": exc.mu})
        return report
    lhs = sum_components(nsites)
    names = ("x", "tau")
    if lhs.with_vars(names) != rhs.with_vars(names):
        report.fail({"N": nsites, "sum": str(lhs), "tsasm": str(rhs)})
        return report
    at_one = lhs.evaluate({"x": 1, "tau": 1})
    expected = count(nsites + 1)
    report.details["S(1,1)"] = int(at_one)
    if at_one != expected:
        report.fail({"N": nsites, "S(1,1)": str(at_one), "A_TS(2N+3)": expected})
    return report


def check_shift_identity(maxm: int) -> Report:
    """A_TS(2N+3; 1, tau) = A_TS(2N+1; 1+tau, tau) for N <= maxm - 1."""
    report = Report("shift", maxm, None, 1, claim="tsasm-shift-identity")
    for nsites in range(0, maxm):
        lhs = generating_function(nsites + 1).substitute({"t": 1}).with_vars(("tau",))
        rhs = generating_function(nsites).substitute({"t": 1 + TAU}).with_vars(("tau",))
        if lhs != rhs:
            report.fail({"N": nsites, "lhs": str(lhs), "rhs": str(rhs)})
            return report
    return report
