"""Inhomogeneous solution of the boundary qKZ system by iterated residues.

Components are labelled by the positions of down spins (for ``psi``) or of up
spins (for ``psibar``).  Both multiple contour integrals encircle only the
poles ``w_i = z_j``, so each component is a finite sum over injective
assignments of poles to integration variables.  Two evaluators are provided:

* :func:`eval_component` tabulates the single-variable and pairwise factors
  once per point and sums over assignments (fast path);
* :class:`FactorProduct` keeps the integrand as a list of atomic bracket
  factors and discovers the poles from the factor list itself (oracle).

The ``check_*`` functions verify the functional relations at random exact
points and return :class:`~bqkz.reports.Report` objects.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Sequence

from gmpy2 import mpq

from .exact_arith import (
    Cyc12,
    DomainError,
    InterpolationError,
    bracket,
    interpolate_laurent,
    random_rational,
)
from .lattice_ops import (
    ModelParams,
    SingularPoint,
    apply_diagonal,
    apply_factors,
    apply_two_site,
    index_from_down_positions,
    k_matrix,
    parity,
    r_weights,
    rcheck_matrix,
    scattering_factors,
    theta_insert,
)
from .reports import Report


class PoleCollision(DomainError):
    """The sampled point is not generic enough; resample."""


def down_count(nsites: int) -> int:
    return nsites // 2


def up_count(nsites: int) -> int:
    return (nsites + 1) // 2


def position_tuples(nsites: int, count: int) -> list:
    return list(itertools.combinations(range(1, nsites + 1), count))


def complement(positions: Sequence[int], nsites: int) -> tuple:
    chosen = set(positions)
    return tuple(k for k in range(1, nsites + 1) if k not in chosen)


# ---------------------------------------------------------------------------
# Fast evaluator
# ---------------------------------------------------------------------------


def _psi_tables(zs, q, beta):
    n_sites = len(zs)
    q2 = q * q
    num = [bracket(q2 * z * z) * bracket(beta * z) for z in zs]
    d3 = []
    for z in zs:
        acc = 1
        for y in zs:
            acc = acc * bracket(q2 * z * y)
        d3.append(acc)
    # ratio[l][j] = [z_l / z_j]; qratio[l][j] = [q z_l / z_j]
    ratio = [[bracket(zl / zj) if l != j else None for j, zj in enumerate(zs)]
             for l, zl in enumerate(zs)]
    qratio = [[bracket(q * zl / zj) for zj in zs] for zl in zs]
    single = {}
    for a in range(1, n_sites + 1):
        for j in range(a):
            den = d3[j]
            for l in range(a):
                if l != j:
                    den = den * ratio[l][j]
            for l in range(a - 1, n_sites):
                den = den * qratio[l][j]
            if den == 0:
                raise PoleCollision("double pole in the integrand")
            single[a, j] = -num[j] / den
    pair = {}
    for j, wj in enumerate(zs):
        for k, wk in enumerate(zs):
            if j != k:
                pair[j, k] = (bracket(q * wk / wj) * bracket(wj / wk)
                              * bracket(q * wj * wk) * bracket(q2 * wj * wk))
    return single, pair


def _psibar_tables(zs, q, beta, beta_in_numerator: bool = False):
    n_sites = len(zs)
    q2 = q * q
    num = [bracket(q * z * z) for z in zs]
    d3 = []
    for z in zs:
        acc = 1
        for y in zs:
            acc = acc * bracket(q * z * y)
        if beta_in_numerator:
            acc = acc / bracket(beta * z)
        else:
            acc = acc * bracket(beta * z)
        d3.append(acc)
    ratio = [[bracket(wj / zl) if l != j else None for l, zl in enumerate(zs)]
             for j, wj in enumerate(zs)]
    qratio = [[bracket(q * wj / zl) for zl in zs] for wj in zs]
    single = {}
    for b in range(1, n_sites + 1):
        for j in range(b - 1, n_sites):
            den = d3[j]
            for l in range(b):
                den = den * qratio[j][l]
            for l in range(b - 1, n_sites):
                if l != j:
                    den = den * ratio[j][l]
            if den == 0:
                raise PoleCollision("double pole in the integrand")
            single[b, j] = num[j] / den
    pair = {}
    for j, wj in enumerate(zs):
        for k, wk in enumerate(zs):
            if j != k:
                pair[j, k] = (bracket(q * wk / wj) * bracket(wj / wk)
                              * bracket(q2 * wj * wk) * bracket(q * wj * wk))
    return single, pair


def _assignment_sum(positions, admissible, single, pair):
    total = 0
    count = len(positions)

    def rec(level, used, chosen, acc):
        nonlocal total
        if level == count:
            total = total + acc
            return
        a = positions[level]
        for j in admissible(a):
            if j in used:
                continue
            term = acc * single[a, j]
            for prev in chosen:
                term = term * pair[prev, j]
            if term == 0:
                continue
            used.add(j)
            chosen.append(j)
            rec(level + 1, used, chosen, term)
            chosen.pop()
            used.discard(j)

    rec(0, set(), [], 1)
    return total


def _psi_prefactor(zs, q):
    n = down_count(len(zs))
    pref = (-bracket(q)) ** n
    for i, j in itertools.combinations(range(len(zs)), 2):
        pref = pref * bracket(q * zs[j] / zs[i]) * bracket(q * q * zs[i] * zs[j])
    return pref


def _psibar_prefactor(zs, q, beta):
    nbar = up_count(len(zs))
    pref = bracket(q) ** nbar
    for i, j in itertools.combinations(range(len(zs)), 2):
        pref = pref * bracket(q * zs[j] / zs[i]) * bracket(q * zs[i] * zs[j])
    for z in zs:
        pref = pref * bracket(beta * z)
    return pref


def psi_components(zs: Sequence, params: ModelParams, positions=None) -> dict:
    """All (or the selected) components of Psi_N at the point ``zs``."""
    n_sites = len(zs)
    if n_sites == 1:
        return {(): 1}
    q, beta = params.q, params.beta
    try:
        single, pair = _psi_tables(zs, q, beta)
        pref = _psi_prefactor(zs, q)
    except ZeroDivisionError as exc:
        raise PoleCollision(str(exc)) from exc
    if positions is None:
        positions = position_tuples(n_sites, down_count(n_sites))
    return {
        a: pref * _assignment_sum(a, lambda ai: range(ai), single, pair)
        for a in positions
    }


def psibar_components(zs: Sequence, params: ModelParams, positions=None,
                      beta_in_numerator: bool = False) -> dict:
    """Components of the second vector, labelled by up-spin positions."""
    n_sites = len(zs)
    if n_sites == 1:
        return {(1,): 1}
    q, beta = params.q, params.beta
    try:
        single, pair = _psibar_tables(zs, q, beta, beta_in_numerator)
        pref = _psibar_prefactor(zs, q, beta)
    except ZeroDivisionError as exc:
        raise PoleCollision(str(exc)) from exc
    if positions is None:
        positions = position_tuples(n_sites, up_count(n_sites))
    return {
        b: pref * _assignment_sum(b, lambda bi: range(bi - 1, n_sites), single, pair)
        for b in positions
    }


def eval_component(variant: str, positions: Sequence[int], zs: Sequence, params: ModelParams):
    """Value of one component; ``variant`` is ``"psi"`` or ``"psibar"``."""
    positions = tuple(positions)
    if variant == "psi":
        if len(positions) != down_count(len(zs)):
            raise ValueError("wrong number of down-spin positions")
        return psi_components(zs, params, [positions])[positions]
    if variant == "psibar":
        if len(positions) != up_count(len(zs)):
            raise ValueError("wrong number of up-spin positions")
        return psibar_components(zs, params, [positions])[positions]
    raise ValueError(f"unknown variant {variant!r}")


def psi_vector(zs: Sequence, params: ModelParams) -> list:
    """Psi_N as a dense state vector (site 1 most significant)."""
    n_sites = len(zs)
    vec = [0] * (2 ** n_sites)
    for a, value in psi_components(zs, params).items():
        vec[index_from_down_positions(a, n_sites)] = value
    return vec


def psibar_vector(zs: Sequence, params: ModelParams, **kw) -> list:
    n_sites = len(zs)
    vec = [0] * (2 ** n_sites)
    for b, value in psibar_components(zs, params, **kw).items():
        vec[index_from_down_positions(complement(b, n_sites), n_sites)] = value
    return vec


# ---------------------------------------------------------------------------
# Closed forms for the two extreme components
# ---------------------------------------------------------------------------


def special_component_closed(zs: Sequence, params: ModelParams):
    """Component with down spins on sites 1..n, as a product of brackets."""
    q, beta = params.q, params.beta
    n_sites = len(zs)
    n = down_count(n_sites)
    value = 1
    for i in range(n):
        value = value * bracket(beta * zs[i])
    for i, j in itertools.combinations(range(n), 2):
        value = value * bracket(q * zs[i] * zs[j]) * bracket(q * zs[j] / zs[i])
    for i, j in itertools.combinations(range(n, n_sites), 2):
        value = value * bracket(q * zs[j] / zs[i]) * bracket(q * q * zs[i] * zs[j])
    return value


def special_component_reversed(zs: Sequence, params: ModelParams):
    """Component with down spins on the last n sites."""
    q, beta = params.q, params.beta
    n_sites = len(zs)
    n, nbar = down_count(n_sites), up_count(n_sites)
    value = -1 if ((n_sites + 1) * n) % 2 else 1
    for i in range(nbar, n_sites):
        value = value * bracket(q * beta * zs[i])
    for i, j in itertools.combinations(range(nbar), 2):
        value = value * bracket(q * zs[j] / zs[i]) * bracket(q * zs[i] * zs[j])
    for i, j in itertools.combinations(range(nbar, n_sites), 2):
        value = value * bracket(q * zs[j] / zs[i]) * bracket(q * q * zs[i] * zs[j])
    return value


# ---------------------------------------------------------------------------
# Generic factor-list residue evaluator
# ---------------------------------------------------------------------------


@dataclass
class Factor:
    """Atomic factor ``[c * prod_k w_k**powers[k]] ** exponent``."""

    const: Any
    powers: tuple
    exponent: int

    def variables(self) -> list:
        return [k for k, p in enumerate(self.powers) if p]


@dataclass
class FactorProduct:
    """Integrand of one multiple contour integral as a list of bracket factors.

    Each integration carries the measure dw/(pi i w), i.e. twice the usual
    normalisation, which appears as the factor 2/w in every residue.
    """

    nvars: int
    factors: list
    prefactor: Any = 1
    candidates: list = field(default_factory=list)

    def integrate(self, order: Sequence[int] | None = None):
        order = list(range(self.nvars)) if order is None else list(order)
        return self._integrate(self.factors, self.prefactor, order)

    def _integrate(self, factors, pref, order):
        if not order:
            value = pref
            for f in factors:
                if any(f.powers):
                    raise ValueError("unintegrated variable left in the integrand")
                value = value * bracket(f.const) ** f.exponent
            return value
        var, rest = order[0], order[1:]
        total = 0
        for pole in self.candidates:
            contribution = self._residue(factors, var, pole)
            if contribution is None:
                continue
            residue, remaining = contribution
            total = total + self._integrate(remaining, pref * residue, rest)
        return total

    def _residue(self, factors, var, pole):
        """Residue at ``w_var = pole`` of the integrand times 2/w, or None."""
        order = 0
        value = 2 / pole
        remaining = []
        for f in factors:
            p = f.powers[var]
            if p == 0:
                remaining.append(f)
                continue
            const = f.const * pole ** p
            powers = f.powers[:var] + (0,) + f.powers[var + 1:]
            if any(powers):
                remaining.append(Factor(const, powers, f.exponent))
                continue
            arg = const
            if arg * arg == 1:
                # simple zero of [c w^p]: derivative p*c*w^(p-1) + p/(c w^(p+1))
                deriv = p * f.const * pole ** (p - 1) + p / (f.const * pole ** (p + 1))
                value = value * deriv ** f.exponent
                order += f.exponent
            else:
                value = value * bracket(arg) ** f.exponent
        if order >= 0:
            return None
        if order < -1:
            raise PoleCollision("higher-order pole at a sampled point")
        return value, remaining


def _xi_factors(positions, zs, q, beta):
    n = len(positions)
    n_sites = len(zs)
    factors = []

    def unit(k, p=1, other=None, p2=0):
        powers = [0] * n
        powers[k] = p
        if other is not None:
            powers[other] = p2
        return tuple(powers)

    for i, j in itertools.combinations(range(n), 2):
        factors.append(Factor(q, unit(j, 1, i, -1), 1))
        factors.append(Factor(mpq(1) * 1, unit(i, 1, j, -1), 1))
        factors.append(Factor(q, unit(i, 1, j, 1), 1))
    for i in range(n):
        for j in range(i, n):
            if i == j:
                factors.append(Factor(q * q, unit(i, 2), 1))
            else:
                factors.append(Factor(q * q, unit(i, 1, j, 1), 1))
        factors.append(Factor(beta, unit(i), 1))
        a = positions[i]
        for j in range(1, a + 1):
            factors.append(Factor(zs[j - 1], unit(i, -1), -1))
        for j in range(a, n_sites + 1):
            factors.append(Factor(q * zs[j - 1], unit(i, -1), -1))
        for j in range(1, n_sites + 1):
            factors.append(Factor(q * q * zs[j - 1], unit(i), -1))
    return factors


def _xibar_factors(positions, zs, q, beta):
    n = len(positions)
    n_sites = len(zs)
    factors = []

    def unit(k, p=1, other=None, p2=0):
        powers = [0] * n
        powers[k] = p
        if other is not None:
            powers[other] = p2
        return tuple(powers)

    for i, j in itertools.combinations(range(n), 2):
        factors.append(Factor(q, unit(j, 1, i, -1), 1))
        factors.append(Factor(mpq(1) * 1, unit(i, 1, j, -1), 1))
        factors.append(Factor(q * q, unit(i, 1, j, 1), 1))
    for i in range(n):
        for j in range(i, n):
            if i == j:
                factors.append(Factor(q, unit(i, 2), 1))
            else:
                factors.append(Factor(q, unit(i, 1, j, 1), 1))
        factors.append(Factor(beta, unit(i), -1))
        b = positions[i]
        for j in range(1, b + 1):
            factors.append(Factor(q / zs[j - 1], unit(i), -1))
        for j in range(b, n_sites + 1):
            factors.append(Factor(1 / zs[j - 1], unit(i), -1))
        for j in range(1, n_sites + 1):
            factors.append(Factor(q * zs[j - 1], unit(i), -1))
    return factors


def _fix_squares(factors):
    """Expand [c w^2] as a single-variable factor with power 2 handled by the oracle.

    The oracle only knows simple zeros of [c w^{+-1}]; [c w^2] never vanishes at
    a generic candidate z_j, so it is safe to keep it and evaluate it directly.
    """
    return factors


def eval_component_generic(variant: str, positions: Sequence[int], zs: Sequence,
                           params: ModelParams, order: Sequence[int] | None = None):
    """Evaluate a component with the factor-list oracle.

    ``order`` permutes the sequence in which the integration variables are
    eliminated; the value must not depend on it.
    """
    positions = tuple(positions)
    q, beta = params.q, params.beta
    if variant == "psi":
        factors = _xi_factors(positions, zs, q, beta)
        pref = _psi_prefactor(zs, q)
    elif variant == "psibar":
        factors = _xibar_factors(positions, zs, q, beta)
        pref = _psibar_prefactor(zs, q, beta)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    product = FactorProduct(len(positions), _fix_squares(factors), pref, list(zs))
    return product.integrate(order)


# ---------------------------------------------------------------------------
# Sampling helpers
# ---------------------------------------------------------------------------


class PointSampler:
    """Deterministic stream of generic rational points."""

    def __init__(self, seed: int, height: int = 40):
        self.rng = random.Random(seed)
        self.height = height

    def rational(self):
        while True:
            r = random_rational(self.rng, self.height)
            if r * r != 1:
                return r

    def params(self, sign: int = 1) -> ModelParams:
        return ModelParams.generic(self.rational(), self.rational(), sign)

    def points(self, count: int) -> list:
        return [self.rational() for _ in range(count)]


def _retry(sampler: PointSampler, attempt: Callable, tries: int = 50):
    """Run ``attempt`` until it does not hit a non-generic point."""
    last = None
    for _ in range(tries):
        try:
            return attempt()
        except (PoleCollision, SingularPoint, ZeroDivisionError, DomainError) as exc:
            last = exc
    raise PoleCollision(f"could not find a generic point: {last}")


def _fmt(value) -> str:
    return str(value)


def _vector_mismatch(lhs, rhs, nsites):
    for k, (a, b) in enumerate(zip(lhs, rhs)):
        if a != b:
            from .lattice_ops import down_positions

            return {"positions": list(down_positions(k, nsites)), "lhs": _fmt(a), "rhs": _fmt(b)}
    return None


def _point_record(zs, params):
    return {
        "z": [_fmt(z) for z in zs],
        "q": _fmt(params.q),
        "s": _fmt(params.s),
        "beta": _fmt(params.beta),
        "beta_bar": _fmt(params.beta_bar),
    }


# ---------------------------------------------------------------------------
# Relation checks
# ---------------------------------------------------------------------------


def _mutated_rcheck(kind: str | None):
    if kind != "negate_b":
        return rcheck_matrix

    def rc(z, q):
        a, b, c = r_weights(z, q)
        return [[a, 0, 0, 0], [0, c, -b, 0], [0, -b, c, 0], [0, 0, 0, a]]

    return rc


def check_exchange(nsites: int, seed: int = 0, trials: int = 5, mutation: str | None = None) -> Report:
    """Braid matrices exchange neighbouring spectral parameters of Psi_N."""
    report = Report("exchange", nsites, seed, trials, claim="exchange-relations")
    sampler = PointSampler(seed)
    rcheck = _mutated_rcheck(mutation)
    for trial in range(trials):
        def attempt():
            params = sampler.params()
            zs = sampler.points(nsites)
            base = psi_vector(zs, params)
            out = []
            for i in range(1, nsites):
                swapped = list(zs)
                swapped[i - 1], swapped[i] = swapped[i], swapped[i - 1]
                rhs = psi_vector(swapped, params)
                lhs = apply_two_site(rcheck(zs[i - 1] / zs[i], params.q), i, i + 1, base, nsites)
                out.append((i, lhs, rhs))
            return params, zs, out
        params, zs, results = _retry(sampler, attempt)
        for i, lhs, rhs in results:
            bad = _vector_mismatch(lhs, rhs, nsites)
            if bad:
                report.fail(dict(trial=trial, site=i, **_point_record(zs, params), **bad))
                return report
    return report


def check_reflection(nsites: int, seed: int = 0, trials: int = 5, sign: int = 1,
                     mutation: str | None = None) -> Report:
    """Boundary matrices at both ends reflect the outermost spectral parameters."""
    report = Report("reflection", nsites, seed, trials, claim="reflection-relations")
    report.details["beta_bar_sign"] = sign
    sampler = PointSampler(seed)
    for trial in range(trials):
        def attempt():
            params = sampler.params(sign)
            zs = sampler.points(nsites)
            base = psi_vector(zs, params)
            beta_left = 2 * params.beta if mutation == "double_beta" else params.beta
            kl = k_matrix(1 / zs[0], beta_left)
            lhs_left = apply_diagonal((kl[0][0], kl[1][1]), 1, base, nsites)
            rhs_left = psi_vector([1 / zs[0]] + list(zs[1:]), params)
            s = params.s
            kr = k_matrix(s * zs[-1], s * params.beta_bar)
            lhs_right = apply_diagonal((kr[0][0], kr[1][1]), nsites, base, nsites)
            rhs_right = psi_vector(list(zs[:-1]) + [1 / (s * s * zs[-1])], params)
            return params, zs, [("left", lhs_left, rhs_left), ("right", lhs_right, rhs_right)]
        params, zs, results = _retry(sampler, attempt)
        for side, lhs, rhs in results:
            bad = _vector_mismatch(lhs, rhs, nsites)
            if bad:
                report.fail(dict(trial=trial, side=side, **_point_record(zs, params), **bad))
                return report
    return report


def check_bqkz(nsites: int, seed: int = 0, trials: int = 5, mutation: str | None = None) -> Report:
    """Scattering operators shift z_i by s^2."""
    report = Report("bqkz", nsites, seed, trials, claim="boundary-qkz")
    sampler = PointSampler(seed)
    for trial in range(trials):
        def attempt():
            params = sampler.params()
            zs = sampler.points(nsites)
            base = psi_vector(zs, params)
            op_params = params
            if mutation == "negate_s":
                op_params = params.replace(s=-params.s)
            elif mutation == "double_s":
                op_params = params.replace(s=2 * params.s)
            out = []
            for i in range(1, nsites + 1):
                steps = scattering_factors(i, zs, op_params)
                lhs = apply_factors(steps, base, nsites, params.q)
                shifted = list(zs)
                shifted[i - 1] = params.s ** 2 * zs[i - 1]
                out.append((i, lhs, psi_vector(shifted, params)))
            return params, zs, out
        params, zs, results = _retry(sampler, attempt)
        for i, lhs, rhs in results:
            bad = _vector_mismatch(lhs, rhs, nsites)
            if bad:
                report.fail(dict(trial=trial, site=i, **_point_record(zs, params), **bad))
                return report
    return report


def parity_sign(nsites: int, q, s):
    n = down_count(nsites)
    return (q ** 3 / s ** 2) ** ((nsites + 1) * n)


def check_parity_inhomogeneous(nsites: int, seed: int = 0, trials: int = 5,
                               imaginary_shift: bool = False, mutation: str | None = None) -> Report:
    """Site reversal maps Psi_N(z; beta) to Psi_N(1/(s z) reversed; q^2/(s beta)).

    With ``imaginary_shift`` the shift is s = i v^3 (over the cyclotomic field),
    which makes the sign eps_N nontrivial for some N.
    """
    report = Report("parity", nsites, seed, trials, claim="parity-inhomogeneous")
    report.details["imaginary_shift"] = imaginary_shift
    sampler = PointSampler(seed)
    for trial in range(trials):
        def attempt():
            v = sampler.rational()
            beta = sampler.rational()
            zs = sampler.points(nsites)
            if imaginary_shift:
                one = Cyc12((1, 0, 0, 0))
                v, beta = one * v, one * beta
                zs = [one * z for z in zs]
                params = ModelParams.generic(v, beta, s=Cyc12.i() * v ** 3)
            else:
                params = ModelParams.generic(v, beta)
            q, s = params.q, params.s
            eps = 1 if mutation == "drop_sign" else parity_sign(nsites, q, s)
            lhs = parity(psi_vector(zs, params), nsites)
            mirrored = [1 / (s * z) for z in reversed(zs)]
            rhs = [eps * c for c in psi_vector(mirrored, params.replace(beta=q * q / (s * beta)))]
            return params, zs, lhs, rhs, eps
        params, zs, lhs, rhs, eps = _retry(sampler, attempt)
        report.details.setdefault("eps", _fmt(eps))
        bad = _vector_mismatch(lhs, rhs, nsites)
        if bad:
            report.fail(dict(trial=trial, **_point_record(zs, params), **bad))
            return report
    return report


def check_psi_equals_psibar(nsites: int, seed: int = 0, trials: int = 5,
                            mutation: str | None = None) -> Report:
    """The two contour-integral vectors coincide."""
    report = Report("psibar", nsites, seed, trials, claim="two-integral-formulas-agree")
    sampler = PointSampler(seed)
    for trial in range(trials):
        def attempt():
            params = sampler.params()
            zs = sampler.points(nsites)
            lhs = psi_vector(zs, params)
            rhs = psibar_vector(zs, params, beta_in_numerator=(mutation == "beta_numerator"))
            return params, zs, lhs, rhs
        params, zs, lhs, rhs = _retry(sampler, attempt)
        bad = _vector_mismatch(lhs, rhs, nsites)
        if bad:
            report.fail(dict(trial=trial, **_point_record(zs, params), **bad))
            return report
    return report


# ---------------------------------------------------------------------------
# Laurent structure in a single spectral parameter
# ---------------------------------------------------------------------------


def degree_window(nsites: int, site: int, positions: Sequence[int]) -> tuple:
    """(parity, degree) of a component as a Laurent polynomial in z_site.

    parity is 1 for odd functions, 0 for even ones; the Laurent degrees are
    exactly +-degree.
    """
    n = down_count(nsites)
    if site in positions:
        return 1, 2 * n - 1
    if nsites % 2 == 0:
        return 0, 2 * (n - 1)
    return 0, 2 * n


def laurent_profile(nsites: int, site: int, zs: Sequence, params: ModelParams,
                    samples: Sequence) -> dict:
    """Interpolate every component of Psi_N in the variable z_site.

    Returns a map from positions to :class:`LaurentUPoly`; the others z's stay
    fixed at ``zs``.
    """
    values = []
    for t in samples:
        point = list(zs)
        point[site - 1] = t
        values.append(psi_components(point, params))
    out = {}
    for a in values[0]:
        _, deg = degree_window(nsites, site, a)
        pts = [(t, vals[a]) for t, vals in zip(samples, values)]
        out[a] = interpolate_laurent(pts, -max(deg, 0), max(deg, 0), var=f"z{site}")
    return out


def _braid_prefactor(nsites: int, site: int, config_downs: int, params: ModelParams, at_zero: bool):
    """Scalar in front of the inserted smaller vector for one configuration.

    ``config_downs`` counts down spins among sites 1..site-1 of the smaller
    chain; q^(k/2) is written as v^k.
    """
    v, beta = params.v, params.beta
    i = site
    sigma_sum = (i - 1) - 2 * config_downs
    if nsites % 2 == 0:
        n = nsites // 2
        if at_zero:
            sign = (-1) ** (n + i + 1)
            return sign / beta * v ** (-3 * (i - 1) + sigma_sum)
        sign = (-1) ** (n + i)
        return sign * beta * v ** (3 * (i - 1) - sigma_sum)
    sign = (-1) ** (i - 1)
    if at_zero:
        return sign * v ** (-3 * (i - 1) - sigma_sum)
    return sign * v ** (3 * (i - 1) + sigma_sum)


def braid_limit_rhs(nsites: int, site: int, zs: Sequence, params: ModelParams, at_zero: bool) -> dict:
    """Right-hand side of the z_site -> 0 or infinity limits, as a component map."""
    smaller = list(zs[: site - 1]) + list(zs[site:])
    inner = psi_components(smaller, params)
    spin = 1 if nsites % 2 == 0 else 0
    out = {}
    for a, value in inner.items():
        downs_before = sum(1 for p in a if p < site)
        shifted = tuple(p if p < site else p + 1 for p in a)
        if spin:
            shifted = tuple(sorted(shifted + (site,)))
        out[shifted] = _braid_prefactor(nsites, site, downs_before, params, at_zero) * value
    return out


def check_degrees_and_braid(nsites: int, seed: int = 0, trials: int = 1,
                            check_braid: bool = True) -> Report:
    """Parities, exact Laurent degrees and braid limits of every component."""
    report = Report("degrees", nsites, seed, trials, claim="laurent-degrees-and-braid-limits")
    sampler = PointSampler(seed)
    n = down_count(nsites)
    if nsites < 2:
        return report
    top = 2 * n if nsites % 2 else 2 * n - 1
    for trial in range(trials):
        for site in range(1, nsites + 1):
            def attempt():
                params = sampler.params()
                zs = sampler.points(nsites)
                samples = []
                while len(samples) < 2 * top + 4:
                    t = sampler.rational()
                    if t not in samples and -t not in samples:
                        samples.append(t)
                return params, zs, laurent_profile(nsites, site, zs, params, samples)
            try:
                params, zs, profile = _retry(sampler, attempt)
            except InterpolationError as exc:
                report.fail({"trial": trial, "site": site, "error": str(exc)})
                return report
            for a, lp in profile.items():
                par, deg = degree_window(nsites, site, a)
                wrong = [k for k in lp.coeffs if k % 2 != par]
                if wrong:
                    report.fail({"trial": trial, "site": site, "positions": list(a),
                                 "error": f"exponents {wrong} break parity"})
                    return report
                if lp.coefficient(deg) == 0 or lp.coefficient(-deg) == 0:
                    report.fail({"trial": trial, "site": site, "positions": list(a),
                                 "error": f"degree +-{deg} not attained"})
                    return report
            if not check_braid:
                continue
            for at_zero in (True, False):
                expected = braid_limit_rhs(nsites, site, zs, params, at_zero)
                power = -top if at_zero else top
                for a, lp in profile.items():
                    got = lp.coefficient(power)
                    want = expected.get(a, 0)
                    if got != want:
                        report.fail({"trial": trial, "site": site, "positions": list(a),
                                     "limit": "zero" if at_zero else "infinity",
                                     "lhs": _fmt(got), "rhs": _fmt(want)})
                        return report
    return report
