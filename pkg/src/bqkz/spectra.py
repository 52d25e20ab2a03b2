"""Open XXZ Hamiltonian, its exact eigenpair and the transfer-matrix links."""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from gmpy2 import mpq

from .exact_arith import Cyc12, DomainError, Jet, bracket, random_rational, rational
from .lattice_ops import (
    ModelParams,
    OperatorMatrix,
    SingularPoint,
    apply_factors,
    k_matrix,
    scattering_factors,
    transfer_apply,
    transfer_matrix,
)
from .reports import Report


# ---------------------------------------------------------------------------
# Parameters and bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HamiltonianParams:
    nsites: int
    delta: Any
    p: Any
    pbar: Any

    @classmethod
    def combinatorial(cls, nsites: int, x) -> "HamiltonianParams":
        if x == 0:
            raise DomainError("x must be nonzero")
        if isinstance(x, float):
            half = 0.5
        else:
            x, half = rational(x), mpq(1, 2)
        return cls(nsites, -half, half * (half - x), half * (half - 1 / x))

    @classmethod
    def from_lattice(cls, nsites: int, params: ModelParams) -> "HamiltonianParams":
        """Anisotropy and boundary fields attached to the transfer matrix at z = 1."""
        q, b, bb = params.q, params.beta, params.beta_bar
        return cls(
            nsites,
            bracket(q * q) / (2 * bracket(q)),
            bracket(q) * bracket(b * b) / (4 * bracket(b) ** 2),
            bracket(q) * bracket(bb * bb) / (4 * bracket(bb) ** 2),
        )


def log_derivative_constant(nsites: int, params: ModelParams):
    q, b, bb = params.q, params.beta, params.beta_bar
    return (3 * nsites * bracket(q * q) / (4 * bracket(q))
            + bracket(q) * bracket(b * b) / (4 * bracket(b) ** 2)
            - bracket(q) ** 2 * bracket(bb * bb) / (2 * bracket(q * q) * bracket(bb) * bracket(q / bb)))


class SectorBasis:
    """States with n down spins, ordered lexicographically by down positions."""

    def __init__(self, nsites: int, ndown: int | None = None):
        self.nsites = nsites
        self.ndown = nsites // 2 if ndown is None else ndown
        self.states = list(itertools.combinations(range(1, nsites + 1), self.ndown))
        self.index = {s: k for k, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    @property
    def magnetisation(self):
        return mpq(self.nsites - 2 * self.ndown, 2)


def _diagonal(params: HamiltonianParams, downs: frozenset):
    n = params.nsites
    spin = [None] + [(-1 if k in downs else 1) for k in range(1, n + 1)]
    value = params.p * spin[1] + params.pbar * spin[n]
    for i in range(1, n):
        value = value - params.delta * spin[i] * spin[i + 1] / 2
    return value


def _hops(nsites: int, downs: tuple):
    """Neighbouring antiparallel pairs swapped; each carries amplitude -1."""
    chosen = set(downs)
    for i in range(1, nsites):
        if (i in chosen) != (i + 1 in chosen):
            swapped = set(chosen)
            if i in chosen:
                swapped.discard(i)
                swapped.add(i + 1)
            else:
                swapped.discard(i + 1)
                swapped.add(i)
            yield tuple(sorted(swapped))


def sector_hamiltonian(params: HamiltonianParams, basis: SectorBasis | None = None) -> list:
    """Sparse rows ``{column: entry}`` of the Hamiltonian restricted to a sector."""
    basis = basis or SectorBasis(params.nsites)
    rows = []
    for state in basis.states:
        row = {basis.index[state]: _diagonal(params, frozenset(state))}
        for target in _hops(params.nsites, state):
            col = basis.index[target]
            row[col] = row.get(col, 0) - 1
        rows.append(row)
    return rows


def hamiltonian_apply(params: HamiltonianParams, vec: Sequence) -> list:
    n = params.nsites
    out = [0] * len(vec)
    for index, amp in enumerate(vec):
        if amp == 0:
            continue
        downs = tuple(k for k in range(1, n + 1) if index >> (n - k) & 1)
        out[index] = out[index] + _diagonal(params, frozenset(downs)) * amp
        for target in _hops(n, downs):
            t = sum(1 << (n - k) for k in target)
            out[t] = out[t] - amp
    return out


def hamiltonian(params: HamiltonianParams, sector: bool = False):
    """Exact Hamiltonian: full OperatorMatrix, or sparse sector rows if ``sector``."""
    if sector:
        return sector_hamiltonian(params)
    return OperatorMatrix.from_action(params.nsites, lambda v: hamiltonian_apply(params, v))


def ground_energy(nsites: int, x):
    if x == 0:
        raise DomainError("x must be nonzero")
    x = rational(x) if not isinstance(x, float) else x
    return -mpq(3 * nsites - 1, 4) - (1 - x) ** 2 / (2 * x)


# ---------------------------------------------------------------------------
# Exact eigenpair and numeric ground-state status
# ---------------------------------------------------------------------------


def ground_vector(nsites: int, x) -> list:
    """psi_N(x) at tau = 1 in sector-basis order."""
    from .homogeneous import psi

    table = psi(nsites, 1)
    basis = SectorBasis(nsites)
    return [table[state].evaluate({"x": x}) for state in basis.states]


def verify_eigenpair(nsites: int, x, perturb: bool = False) -> Report:
    """(H - E0) psi_N = 0 exactly in the magnetisation sector."""
    x = rational(x)
    report = Report("eigenpair", nsites, None, 1, claim="exact-ground-state-eigenpair")
    report.details["x"] = str(x)
    params = HamiltonianParams.combinatorial(nsites, x)
    rows = sector_hamiltonian(params)
    vec = ground_vector(nsites, x)
    if perturb:
        vec[len(vec) // 2] += 1
    energy = ground_energy(nsites, x)
    basis = SectorBasis(nsites)
    for k, row in enumerate(rows):
        value = sum(entry * vec[c] for c, entry in row.items()) - energy * vec[k]
        if value != 0:
            report.fail({"x": str(x), "positions": list(basis.states[k]), "residual": str(value)})
            break
    return report


def sector_matrix_float(nsites: int, x: float) -> np.ndarray:
    params = HamiltonianParams.combinatorial(nsites, float(x))
    rows = sector_hamiltonian(params)
    mat = np.zeros((len(rows), len(rows)))
    for k, row in enumerate(rows):
        for c, entry in row.items():
            mat[k, c] = float(entry)
    return mat


def numeric_ground_check(nsites: int, xs: Sequence[float], gap_threshold: float = 1e-9) -> Report:
    """Dense spectrum of the sector Hamiltonian compared with E0.

    For x > 0 the minimum must equal E0 and be separated by a gap; for x < 0
    the outcome is only recorded.
    """
    report = Report("numeric-ground-state", nsites, None, len(xs), claim="ground-state-for-positive-x")
    report.details["points"] = []
    for x in xs:
        x = float(x)
        spectrum = np.linalg.eigvalsh(sector_matrix_float(nsites, x))
        e0 = -(3 * nsites - 1) / 4 - (1 - x) ** 2 / (2 * x)
        tol = 1e-9 * (1 + abs(e0))
        gap = float(spectrum[1] - spectrum[0]) if len(spectrum) > 1 else float("inf")
        present = bool(np.min(np.abs(spectrum - e0)) < tol)
        minimal = bool(abs(spectrum[0] - e0) < tol)
        record = {"x": x, "E0": e0, "min": float(spectrum[0]), "gap": gap,
                  "E0_in_spectrum": present, "E0_minimal": minimal}
        report.details["points"].append(record)
        if x > 0 and not (minimal and gap > gap_threshold):
            nearby = [float(e) for e in spectrum[:6]]
            report.fail(dict(record, lowest_levels=nearby))
    return report


def perron_frobenius_check(nsites: int, x) -> Report:
    """lambda*1 - H_mu is entrywise non-negative and irreducible for x > 0."""
    x = rational(x)
    report = Report("perron-frobenius", nsites, None, 1, claim="non-degenerate-ground-state")
    lam = nsites - 1 + x + 1 / x
    rows = sector_hamiltonian(HamiltonianParams.combinatorial(nsites, x))
    for k, row in enumerate(rows):
        for c, entry in row.items():
            shifted = (lam if c == k else 0) - entry
            if c != k and entry != -1:
                report.fail({"row": k, "col": c, "error": "off-diagonal entry is not -1"})
                return report
            if shifted < 0:
                report.fail({"row": k, "col": c, "entry": str(shifted)})
                return report
    seen = {0}
    todo = deque([0])
    while todo:
        k = todo.popleft()
        for c in rows[k]:
            if c not in seen:
                seen.add(c)
                todo.append(c)
    if len(seen) != len(rows):
        report.fail({"error": "sector graph is not connected"})
    return report


def check_magnetisation_commutes(nsites: int, x) -> Report:
    report = Report("magnetisation", nsites, None, 1, claim="hamiltonian-conserves-magnetisation")
    h = hamiltonian(HamiltonianParams.combinatorial(nsites, rational(x)))
    for k, row in enumerate(h.rows):
        for c, entry in enumerate(row):
            if entry != 0 and bin(k).count("1") != bin(c).count("1"):
                report.fail({"row": k, "col": c})
                return report
    return report


# ---------------------------------------------------------------------------
# Transfer matrix at the combinatorial point
# ---------------------------------------------------------------------------


def _cyc(value) -> Cyc12:
    return value if isinstance(value, Cyc12) else Cyc12((value, 0, 0, 0))


def eigenvalue(z, params: ModelParams):
    q, b = params.q, params.beta
    return -bracket(q * b * z) / bracket(q * q * b * z)


def eigenvalue_trace(z, params: ModelParams):
    upper = k_matrix(params.q * z, params.beta_bar)
    lower = k_matrix(z, params.beta)
    return upper[0][0] * lower[0][0] + upper[1][1] * lower[1][1]


def _sqrt_in_field(r):
    """Square root of a positive rational inside Q(sqrt 3), or None."""
    import gmpy2

    for scale, unit in ((1, Cyc12((1, 0, 0, 0))), (3, Cyc12.sqrt3())):
        t = mpq(r) / scale
        num, den = t.numerator, t.denominator
        if gmpy2.is_square(num) and gmpy2.is_square(den):
            return unit * mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


def beta_for_x(x) -> Cyc12:
    """beta with -[q beta]/[beta] = x at q = exp(2 pi i/3)."""
    x = rational(x)
    root = _sqrt_in_field(x * x - x + 1)
    if root is None:
        raise DomainError(f"x = {x}: x^2 - x + 1 is not a square in Q(sqrt 3)")
    return (Cyc12((x, 0, 0, 0)) + 1 / Cyc12.q()) / root


HOMOGENEOUS_X = ("1", "2", "1/2", "8/3", "15/8")


class _Sampler:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def rational(self):
        while True:
            r = random_rational(self.rng)
            if r * r != 1:
                return r


def verify_transfer_eigen(nsites: int, seed: int = 0, trials: int = 3, sign: int = 1,
                          homogeneous: bool = False) -> Report:
    """T(z|z_1..z_N) Psi_N = Lambda_N(z) Psi_N at q = exp(2 pi i/3)."""
    from .homogeneous import psi
    from .qkz_vector import PoleCollision, psi_vector

    name = "transfer-eigen-homogeneous" if homogeneous else "transfer-eigen"
    report = Report(name, nsites, seed, trials, claim="transfer-matrix-eigenvalue")
    report.details["beta_bar_sign"] = sign
    sampler = _Sampler(seed)
    for trial in range(trials):
        for _ in range(50):
            try:
                z = _cyc(sampler.rational())
                if homogeneous:
                    x = rational(HOMOGENEOUS_X[trial % len(HOMOGENEOUS_X)])
                    params = ModelParams.special(beta_for_x(x), sign)
                    if params.x != x:
                        raise DomainError("beta does not reproduce x")
                    zs = [_cyc(1)] * nsites
                    table = psi(nsites, 1)
                    vec = [_cyc(0)] * (2 ** nsites)
                    for a, p in table.items():
                        vec[sum(1 << (nsites - k) for k in a)] = _cyc(p.evaluate({"x": x}))
                else:
                    params = ModelParams.special(_cyc(sampler.rational()), sign)
                    zs = [_cyc(sampler.rational()) for _ in range(nsites)]
                    vec = psi_vector(zs, params)
                lam = eigenvalue(z, params)
                lhs = transfer_apply(z, zs, params, vec)
                break
            except (SingularPoint, PoleCollision, ZeroDivisionError):
                continue
        else:
            report.fail({"trial": trial, "error": "no generic point found"})
            return report
        if lam != eigenvalue_trace(z, params):
            report.fail({"trial": trial, "z": str(z), "error": "trace form differs",
                         "closed": str(lam), "trace": str(eigenvalue_trace(z, params))})
            return report
        for k, (a, b) in enumerate(zip(lhs, vec)):
            if a != lam * b:
                report.fail({"trial": trial, "z": str(z), "index": k, "lhs": str(a), "rhs": str(lam * b)})
                return report
    return report


def check_transfer_identities(nsites: int, seed: int = 0, trials: int = 3, sign: int = 1) -> Report:
    """Commutation, z -> -z, z -> 1/(qz), fourth roots of unity, and T(z_i) ~ S^(i)."""
    report = Report("transfer", nsites, seed, trials, claim="transfer-matrix-identities")
    report.details["beta_bar_sign"] = sign
    sampler = _Sampler(seed)
    for trial in range(trials):
        try:
            results = _transfer_results(nsites, sampler, sign)
        except (SingularPoint, ZeroDivisionError, DomainError) as exc:
            report.details.setdefault("resampled", []).append(str(exc))
            continue
        for label, ok in results:
            if not ok:
                report.fail({"trial": trial, "identity": label})
                return report
    return report


def _transfer_results(nsites: int, sampler: _Sampler, sign: int) -> list:
    out = []
    v, b, z, w = (sampler.rational() for _ in range(4))
    zs = [sampler.rational() for _ in range(nsites)]
    params = ModelParams.generic(v, b, sign)
    q, bb = params.q, params.beta_bar
    t_z = transfer_matrix(z, zs, params)
    if nsites <= 3:
        out.append(("commutation", t_z.commutes_with(transfer_matrix(w, zs, params))))
    out.append(("even-in-z", transfer_matrix(-z, zs, params) == t_z))
    pref = bracket(b / z) * bracket(bb / (q * z)) / (bracket(bb * z) * bracket(q * b * z))
    for zi in zs:
        pref = pref * bracket(q * zi / z) * bracket(q / (z * zi)) / (bracket(q * q * z / zi) * bracket(q * q * z * zi))
    out.append(("crossing-symmetry", transfer_matrix(1 / (q * z), zs, params) == t_z.scale(pref)))
    special = ModelParams.special(_cyc(b), sign)
    qc = special.q
    czs = [_cyc(t) for t in zs]
    for root in (_cyc(1), _cyc(-1), Cyc12.i(), -Cyc12.i()):
        scalar = transfer_matrix(root, czs, special).scalar_multiple()
        want = bracket(qc * qc) * bracket(special.beta_bar / root) / (bracket(qc) * bracket(special.beta_bar / (qc * root)))
        out.append((f"fourth-root-{root}", scalar is not None and scalar == want))
    for i in range(1, nsites + 1):
        t_i = transfer_matrix(czs[i - 1], czs, special)
        steps = scattering_factors(i, czs, special)
        s_i = OperatorMatrix.from_action(nsites, lambda vec: apply_factors(steps, vec, nsites, qc))
        factor = -bracket(qc * special.beta * czs[i - 1]) / bracket(qc * qc * special.beta * czs[i - 1])
        out.append((f"transfer-at-z{i}", t_i == s_i.scale(factor)))
    if nsites == 2:
        s2 = params.s ** 2
        shifted_j = [zs[0], s2 * zs[1]]
        shifted_i = [s2 * zs[0], zs[1]]
        op = lambda i, pts: OperatorMatrix.from_action(  # noqa: E731
            2, lambda vec: apply_factors(scattering_factors(i, pts, params), vec, 2, q))
        out.append(("scattering-compatibility", op(1, shifted_j) @ op(2, zs) == op(2, shifted_i) @ op(1, zs)))
    return out


def verify_log_derivative(nsites: int, sign: int = 1, beta=None, drop_constant: bool = False) -> Report:
    """t(1)^{-1} t'(1) = -(4/[q]) (H - C) over jets at q = exp(2 pi i/3)."""
    report = Report("log-derivative", nsites, None, 1, claim="hamiltonian-from-transfer-matrix")
    report.details["beta_bar_sign"] = sign
    beta = _cyc(mpq(5, 3) if beta is None else beta)
    params = ModelParams.special(beta, sign)
    q = params.q
    z = Jet.variable(_cyc(1))
    t = transfer_matrix(z, [_cyc(1)] * nsites, params)
    scalar = t.rows[0][0].value
    dim = 2 ** nsites
    want_scalar = bracket(q * q) * bracket(params.beta_bar) / (bracket(q) * bracket(params.beta_bar / q))
    if scalar != want_scalar:
        report.fail({"error": "t(1) scalar differs from the closed form", "got": str(scalar)})
        return report
    for r in range(dim):
        for c in range(dim):
            if t.rows[r][c].value != (scalar if r == c else 0):
                report.fail({"error": "t(1) is not a multiple of the identity", "row": r, "col": c})
                return report
    h = hamiltonian(HamiltonianParams.from_lattice(nsites, params))
    const = 0 if drop_constant else log_derivative_constant(nsites, params)
    factor = -4 / bracket(q)
    for r in range(dim):
        for c in range(dim):
            lhs = t.rows[r][c].deriv / scalar
            rhs = factor * (h.rows[r][c] - (const if r == c else 0))
            if lhs != rhs:
                report.fail({"row": r, "col": c, "lhs": str(lhs), "rhs": str(rhs)})
                return report
    return report
