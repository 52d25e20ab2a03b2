"""Six-vertex R- and K-matrices, transfer matrices and scattering operators.

Conventions
-----------
Basis states of ``N`` sites are indexed by integers whose binary expansion
lists the spins with site 1 as the most significant bit; bit 0 is an up spin
and bit 1 a down spin.  So for two sites the order is (up-up, up-down,
down-up, down-down).  Every routine here is generic over the exact field of
its arguments (rationals, :class:`~bqkz.exact_arith.Cyc12` or jets).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .exact_arith import Cyc12, DomainError, bracket

Matrix = list  # list of rows


class SingularPoint(DomainError):
    """A spectral parameter hits a zero of a denominator."""


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """Crossing parameter q, shift s and boundary parameters beta, beta_bar.

    ``v`` is recorded for generic points where q = v^2 and s = v^3, which lets
    half-integer powers of q be written as integer powers of v.
    """

    q: Any
    s: Any
    beta: Any
    beta_bar: Any
    v: Any = None

    @classmethod
    def generic(cls, v, beta, sign: int = 1, s=None) -> "ModelParams":
        q = v * v
        if s is None:
            s = v * v * v
        return cls(q=q, s=s, beta=beta, beta_bar=sign / (beta * q), v=v)

    @classmethod
    def special(cls, beta, sign: int = 1) -> "ModelParams":
        """The point q = exp(2 pi i/3), s = 1 (so tau = 1)."""
        q = Cyc12.q()
        return cls(q=q, s=Cyc12((1, 0, 0, 0)), beta=beta, beta_bar=sign / (beta * q), v=None)

    def replace(self, **changes) -> "ModelParams":
        data = dict(q=self.q, s=self.s, beta=self.beta, beta_bar=self.beta_bar, v=self.v)
        data.update(changes)
        return ModelParams(**data)

    @property
    def x(self):
        return -bracket(self.q * self.beta) / bracket(self.beta)

    @property
    def tau(self):
        return -self.q - 1 / self.q

    def relations_hold(self) -> bool:
        s4_ok = self.s ** 4 == self.q ** 6
        bb_ok = (self.beta_bar * self.beta * self.q) ** 2 == 1
        return bool(s4_ok and bb_ok)


# ---------------------------------------------------------------------------
# Local matrices
# ---------------------------------------------------------------------------


def _safe_div(num, den, what: str):
    if den == 0:
        raise SingularPoint(f"vanishing denominator {what}")
    return num / den


def r_weights(z, q):
    """Return the weights (a, b, c) of the R-matrix at spectral parameter z."""
    den = bracket(q / z)
    a = _safe_div(bracket(q * z), den, "[q/z]")
    b = _safe_div(bracket(z), den, "[q/z]")
    c = _safe_div(bracket(q), den, "[q/z]")
    return a, b, c


def r_matrix(z, q) -> Matrix:
    a, b, c = r_weights(z, q)
    return [[a, 0, 0, 0], [0, b, c, 0], [0, c, b, 0], [0, 0, 0, a]]


def rcheck_matrix(z, q) -> Matrix:
    """P times R: the braid form of the R-matrix."""
    a, b, c = r_weights(z, q)
    return [[a, 0, 0, 0], [0, c, b, 0], [0, b, c, 0], [0, 0, 0, a]]


def k_matrix(z, b) -> Matrix:
    """Diagonal boundary matrix diag(1, [b z]/[b/z])."""
    return [[1, 0], [0, _safe_div(bracket(b * z), bracket(b / z), "[b/z]")]]


def permutation_matrix() -> Matrix:
    return [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]


# ---------------------------------------------------------------------------
# Small dense matrix helpers
# ---------------------------------------------------------------------------


def identity(n: int) -> Matrix:
    return [[1 if r == c else 0 for c in range(n)] for r in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for r in range(n):
        row_a = a[r]
        row = []
        for c in range(p):
            acc = 0
            for k in range(m):
                if row_a[k] != 0 and b[k][c] != 0:
                    acc = acc + row_a[k] * b[k][c]
            row.append(acc)
        out.append(row)
    return out


def mat_prod(*mats: Matrix) -> Matrix:
    result = mats[0]
    for m in mats[1:]:
        result = mat_mul(result, m)
    return result


def mat_scale(c, a: Matrix) -> Matrix:
    return [[c * v for v in row] for row in a]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def kron(a: Matrix, b: Matrix) -> Matrix:
    return [
        [x * y for x in ra for y in rb]
        for ra in a
        for rb in b
    ]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def partial_transpose_first(op: Matrix) -> Matrix:
    """Transpose a 4x4 two-site operator in its first tensor factor only."""
    out = [[0] * 4 for _ in range(4)]
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    out[2 * a + b][2 * c + d] = op[2 * c + b][2 * a + d]
    return out


def partial_trace_first(op: Matrix) -> Matrix:
    """Trace a 4x4 two-site operator over its first tensor factor."""
    return [[op[b][d] + op[2 + b][2 + d] for d in range(2)] for b in range(2)]


SIGMA_X = [[0, 1], [1, 0]]
SIGMA_Z = [[1, 0], [0, -1]]


def sigma_y() -> Matrix:
    i = Cyc12.i()
    return [[0, -i], [i, 0]]


# ---------------------------------------------------------------------------
# Operators on N-site states
# ---------------------------------------------------------------------------


def _bit(nsites: int, site: int) -> int:
    if not 1 <= site <= nsites:
        raise IndexError(f"site {site} outside 1..{nsites}")
    return 1 << (nsites - site)


def apply_two_site(op: Matrix, site_a: int, site_b: int, vec: Sequence, nsites: int) -> list:
    """Apply a 4x4 operator acting on (site_a, site_b) with local index 2*s_a + s_b."""
    ba, bb = _bit(nsites, site_a), _bit(nsites, site_b)
    entries = [(r, c, op[r][c]) for r in range(4) for c in range(4) if op[r][c] != 0]
    out = list(vec)
    for idx in range(len(vec)):
        if idx & ba or idx & bb:
            continue
        ids = (idx, idx | bb, idx | ba, idx | ba | bb)
        vals = [vec[k] for k in ids]
        if all(v == 0 for v in vals):
            continue
        new = [0, 0, 0, 0]
        for r, c, w in entries:
            if vals[c] != 0:
                new[r] = new[r] + w * vals[c]
        for k, v in zip(ids, new):
            out[k] = v
    return out


def apply_one_site(op: Matrix, site: int, vec: Sequence, nsites: int) -> list:
    bit = _bit(nsites, site)
    out = list(vec)
    for idx in range(len(vec)):
        if idx & bit:
            continue
        u, d = vec[idx], vec[idx | bit]
        out[idx] = op[0][0] * u + op[0][1] * d
        out[idx | bit] = op[1][0] * u + op[1][1] * d
    return out


def apply_diagonal(diag: Sequence, site: int, vec: Sequence, nsites: int) -> list:
    bit = _bit(nsites, site)
    return [v * diag[1] if idx & bit else v * diag[0] for idx, v in enumerate(vec)]


class OperatorMatrix:
    """Dense square matrix on the 2^N-dimensional space of N sites."""

    def __init__(self, nsites: int, rows: Matrix):
        self.nsites = nsites
        self.rows = rows
        if len(rows) != 2 ** nsites:
            raise ValueError("matrix dimension does not match the number of sites")

    @classmethod
    def from_action(cls, nsites: int, action: Callable[[list], list]) -> "OperatorMatrix":
        dim = 2 ** nsites
        cols = []
        for k in range(dim):
            e = [0] * dim
            e[k] = 1
            cols.append(action(e))
        return cls(nsites, transpose(cols))

    @classmethod
    def identity(cls, nsites: int) -> "OperatorMatrix":
        return cls(nsites, identity(2 ** nsites))

    def apply(self, vec: Sequence) -> list:
        out = []
        for row in self.rows:
            acc = 0
            for a, b in zip(row, vec):
                if a != 0 and b != 0:
                    acc = acc + a * b
            out.append(acc)
        return out

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.nsites, mat_mul(self.rows, other.rows))

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.nsites, mat_sub(self.rows, other.rows))

    def scale(self, c) -> "OperatorMatrix":
        return OperatorMatrix(self.nsites, mat_scale(c, self.rows))

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return self.nsites == other.nsites and mat_eq(self.rows, other.rows)

    def commutes_with(self, other: "OperatorMatrix") -> bool:
        return (self @ other) == (other @ self)

    def scalar_multiple(self):
        """Return c if the matrix equals c times the identity, else None."""
        c = self.rows[0][0]
        for r, row in enumerate(self.rows):
            for k, v in enumerate(row):
                if v != (c if r == k else 0):
                    return None
        return c


def embed_two_site(op: Matrix, site_a: int, site_b: int, nsites: int) -> Matrix:
    return OperatorMatrix.from_action(
        nsites, lambda v: apply_two_site(op, site_a, site_b, v, nsites)
    ).rows


def embed_one_site(op: Matrix, site: int, nsites: int) -> Matrix:
    return OperatorMatrix.from_action(nsites, lambda v: apply_one_site(op, site, v, nsites)).rows


# ---------------------------------------------------------------------------
# Transfer matrix
# ---------------------------------------------------------------------------


def transfer_apply(z, zs: Sequence, params: ModelParams, vec: Sequence) -> list:
    """Apply the double-row transfer matrix T(z | z_1..z_N) to a state.

    The auxiliary space is treated as an extra leading site; the partial trace
    sums the two diagonal auxiliary blocks.
    """
    n = len(zs)
    dim = 2 ** n
    q = params.q
    forward = [r_matrix(z * zi, q) for zi in zs]
    backward = [r_matrix(z / zi, q) for zi in zs]
    k_minus = k_matrix(z, params.beta)
    k_plus = k_matrix(q * z, params.beta_bar)
    out = [0] * dim
    for aux in (0, 1):
        ext = [0] * (2 * dim)
        ext[aux * dim:(aux + 1) * dim] = list(vec)
        for i in range(n - 1, -1, -1):
            ext = apply_two_site(forward[i], 1, i + 2, ext, n + 1)
        ext = apply_diagonal((k_minus[0][0], k_minus[1][1]), 1, ext, n + 1)
        for i in range(n):
            ext = apply_two_site(backward[i], 1, i + 2, ext, n + 1)
        ext = apply_diagonal((k_plus[0][0], k_plus[1][1]), 1, ext, n + 1)
        block = ext[aux * dim:(aux + 1) * dim]
        out = [a + b for a, b in zip(out, block)]
    return out


def transfer_matrix(z, zs: Sequence, params: ModelParams) -> OperatorMatrix:
    n = len(zs)
    return OperatorMatrix.from_action(n, lambda v: transfer_apply(z, zs, params, v))


# ---------------------------------------------------------------------------
# Scattering operators
# ---------------------------------------------------------------------------


def scattering_factors(i: int, zs: Sequence, params: ModelParams) -> list:
    """Factors of S^(i) in the order in which they act on a state.

    Each factor is ``("R", j, arg)`` for the braid matrix on sites (j, j+1),
    or ``("K", site, arg, b)`` for a boundary matrix.
    """
    n = len(zs)
    if not 1 <= i <= n:
        raise IndexError(f"site {i} outside 1..{n}")
    s, beta, beta_bar = params.s, params.beta, params.beta_bar
    zi = zs[i - 1]
    s2 = s * s
    steps: list = []
    for j in range(i, n):
        steps.append(("R", j, zi / zs[j]))
    steps.append(("K", n, s * zi, s * beta_bar))
    for j in range(n - 1, i - 1, -1):
        steps.append(("R", j, s2 * zi * zs[j]))
    for j in range(i - 1, 0, -1):
        steps.append(("R", j, s2 * zi * zs[j - 1]))
    steps.append(("K", 1, s2 * zi, beta))
    for j in range(1, i):
        steps.append(("R", j, s2 * zi / zs[j - 1]))
    return steps


def apply_factors(steps: Sequence, vec: Sequence, nsites: int, q,
                  rcheck: Callable = rcheck_matrix) -> list:
    out = list(vec)
    for step in steps:
        if step[0] == "R":
            _, j, arg = step
            out = apply_two_site(rcheck(arg, q), j, j + 1, out, nsites)
        else:
            _, site, arg, b = step
            k = k_matrix(arg, b)
            out = apply_diagonal((k[0][0], k[1][1]), site, out, nsites)
    return out


def scattering_apply(i: int, zs: Sequence, params: ModelParams, vec: Sequence) -> list:
    return apply_factors(scattering_factors(i, zs, params), vec, len(zs), params.q)


def scattering_operator(i: int, zs: Sequence, params: ModelParams) -> OperatorMatrix:
    n = len(zs)
    return OperatorMatrix.from_action(n, lambda v: scattering_apply(i, zs, params, v))


# ---------------------------------------------------------------------------
# Local operators
# ---------------------------------------------------------------------------


def spins(index: int, nsites: int) -> list:
    """Spin list (0 = up, 1 = down) of a basis index, site 1 first."""
    return [(index >> (nsites - k)) & 1 for k in range(1, nsites + 1)]


def index_of(spin_list: Sequence[int]) -> int:
    idx = 0
    for s in spin_list:
        idx = (idx << 1) | s
    return idx


def down_positions(index: int, nsites: int) -> tuple:
    return tuple(k + 1 for k, s in enumerate(spins(index, nsites)) if s)


def index_from_down_positions(positions: Sequence[int], nsites: int) -> int:
    idx = 0
    for a in positions:
        idx |= _bit(nsites, a)
    return idx


def magnetisation(nsites: int) -> list:
    """Diagonal of M = (1/2) sum_i sigma^z_i."""
    from gmpy2 import mpq

    return [mpq(nsites - 2 * bin(k).count("1"), 2) for k in range(2 ** nsites)]


def spin_reversal(vec: Sequence, nsites: int) -> list:
    mask = 2 ** nsites - 1
    return [vec[k ^ mask] for k in range(2 ** nsites)]


def parity(vec: Sequence, nsites: int) -> list:
    """Reverse the order of the sites."""
    return [vec[index_of(spins(k, nsites)[::-1])] for k in range(2 ** nsites)]


def theta_insert(vec: Sequence, site: int, spin: int, nsites: int) -> list:
    """Insert a spin (0 up, 1 down) at position ``site`` of an N-site state."""
    if not 1 <= site <= nsites + 1:
        raise IndexError(f"insertion site {site} outside 1..{nsites + 1}")
    out = [0] * (2 ** (nsites + 1))
    for k, v in enumerate(vec):
        sp = spins(k, nsites)
        out[index_of(sp[: site - 1] + [spin] + sp[site - 1:])] = v
    return out


def divided_difference(f: Callable, z, w, q):
    """([q w/z] f(w, z) - [q] f(z, w)) / [z/w]."""
    if z == w or z == -w:
        raise SingularPoint("divided difference needs z != +-w")
    return (bracket(q * w / z) * f(w, z) - bracket(q) * f(z, w)) / bracket(z / w)


def local_operators(nsites: int) -> dict:
    """Magnetisation (diagonal), spin reversal, parity and the insertion maps."""
    dim = 2 ** nsites
    basis = [[1 if j == k else 0 for j in range(dim)] for k in range(dim)]
    return {
        "magnetisation": magnetisation(nsites),
        "spin_reversal": OperatorMatrix.from_action(nsites, lambda v: spin_reversal(v, nsites)),
        "parity": OperatorMatrix.from_action(nsites, lambda v: parity(v, nsites)),
        "insert": lambda vec, site, spin: theta_insert(vec, site, spin, nsites),
        "basis": basis,
    }


# ---------------------------------------------------------------------------
# Identity checks at random exact points
# ---------------------------------------------------------------------------


def check_local_identities(seed: int = 0, trials: int = 20):
    """Yang-Baxter, braid, unitarity, crossing, boundary Yang-Baxter and trace identities."""
    import random

    from .exact_arith import random_rational
    from .reports import Report

    report = Report("local-identities", None, seed, trials, claim="r-and-k-matrix-identities")
    rng = random.Random(seed)

    def draw():
        while True:
            r = random_rational(rng)
            if r * r != 1:
                return r

    for trial in range(trials):
        v, z, w, b, bb = draw(), draw(), draw(), draw(), draw()
        q = v * v
        try:
            results = _local_identity_results(q, z, w, b, bb)
        except (SingularPoint, ZeroDivisionError):
            continue
        for name, ok in results:
            if not ok:
                report.fail({"trial": trial, "identity": name, "v": str(v), "z": str(z), "w": str(w),
                             "beta": str(b)})
                return report
    return report


def _local_identity_results(q, z, w, b, bb) -> list:
    out = []
    r12 = embed_two_site(r_matrix(z / w, q), 1, 2, 3)
    r13 = embed_two_site(r_matrix(z, q), 1, 3, 3)
    r23 = embed_two_site(r_matrix(w, q), 2, 3, 3)
    out.append(("yang-baxter", mat_eq(mat_prod(r12, r13, r23), mat_prod(r23, r13, r12))))
    c12 = lambda a: embed_two_site(rcheck_matrix(a, q), 1, 2, 3)  # noqa: E731
    c23 = lambda a: embed_two_site(rcheck_matrix(a, q), 2, 3, 3)  # noqa: E731
    out.append(("braid", mat_eq(mat_prod(c12(z / w), c23(z), c12(w)), mat_prod(c23(w), c12(z), c23(z / w)))))
    out.append(("unitarity", mat_eq(mat_mul(r_matrix(z, q), r_matrix(1 / z, q)), identity(4))))
    out.append(("r-at-one", mat_eq(r_matrix(1, q), permutation_matrix())))
    k1 = kron(k_matrix(z, b), identity(2))
    k2 = kron(identity(2), k_matrix(w, b))
    out.append(("boundary-yang-baxter",
                mat_eq(mat_prod(r_matrix(z / w, q), k1, r_matrix(z * w, q), k2),
                       mat_prod(k2, r_matrix(z * w, q), k1, r_matrix(z / w, q)))))
    sx1 = kron(SIGMA_X, identity(2))
    sz1 = kron(SIGMA_Z, identity(2))
    lhs = mat_scale(bracket(q / z), mat_prod(sx1, partial_transpose_first(r_matrix(z, q)), sx1))
    out.append(("crossing-x", mat_eq(lhs, mat_scale(-bracket(q * q * z), r_matrix(-1 / (q * z), q)))))
    qc, zc = Cyc12((q, 0, 0, 0)), Cyc12((z, 0, 0, 0))
    sy1 = kron(sigma_y(), identity(2))
    lhs = mat_scale(bracket(qc / zc), mat_prod(sy1, partial_transpose_first(r_matrix(zc, qc)), sy1))
    out.append(("crossing-y", mat_eq(lhs, mat_scale(-bracket(qc * qc * zc), r_matrix(1 / (qc * zc), qc)))))
    out.append(("crossing-z", mat_eq(mat_prod(sz1, r_matrix(z, q), sz1), r_matrix(-z, q))))
    traced = partial_trace_first(mat_prod(kron(k_matrix(q * z, bb), identity(2)), r_matrix(z * z, q),
                                          permutation_matrix()))
    pref = bracket(q * q * z * z) * bracket(bb / z) / (bracket(z * z / q) * bracket(q * z / bb))
    out.append(("trace-identity", mat_eq(traced, mat_scale(pref, k_matrix(z, bb)))))
    out.append(("k-at-one", mat_eq(k_matrix(1, b), identity(2)) and mat_eq(k_matrix(-1, b), identity(2))))
    f = lambda a, c: bracket(a * b) * a + c * c  # noqa: E731
    g = lambda a, c: divided_difference(f, a, c, q)  # noqa: E731
    out.append(("divided-difference-involution", divided_difference(g, z, w, q) == f(z, w)))
    return out
