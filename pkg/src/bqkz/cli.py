"""Command-line entry point: ground states, energies, scalar products, overlaps, TSASMs and checks."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from .exact_arith import format_rational, rational
from .reports import Report, code_version, merge

MAX_SITES = 12


def _rational_arg(text: str):
    try:
        return rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _tau_arg(text: str):
    if text == "symbolic":
        return text
    return _rational_arg(text)


def _sites_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if not 1 <= value <= MAX_SITES:
        raise argparse.ArgumentTypeError(f"N must lie in 1..{MAX_SITES}")
    return value


def _parts_arg(text: str) -> tuple:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated sizes: {text!r}") from exc
    if not parts or min(parts) < 1 or sum(parts) > MAX_SITES:
        raise argparse.ArgumentTypeError(f"parts must be positive with total at most {MAX_SITES}")
    return parts


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# Computations
# ---------------------------------------------------------------------------


def cmd_gs(args) -> int:
    from .homogeneous import components, key_of

    table = components(args.sites, args.formula)
    if args.tau != "symbolic":
        table = table.specialise_tau(args.tau)
    if args.format == "csv":
        _emit(table.to_csv(), args.out)
        return 0
    obj = table.to_json_obj()
    if args.x is not None:
        values = {}
        for a, p in sorted(table.items()):
            value = p.substitute({"x": args.x}).drop_unused()
            values[key_of(a)] = str(value) if value.vars else format_rational(value.constant_value())
        obj["x"] = format_rational(args.x)
        obj["values"] = values
    _emit(_dump(obj), args.out)
    return 0


def cmd_energy(args) -> int:
    from .spectra import HamiltonianParams, ground_energy, verify_eigenpair

    params = HamiltonianParams.combinatorial(args.sites, args.x)
    obj = {
        "N": args.sites,
        "x": format_rational(args.x),
        "E0": format_rational(ground_energy(args.sites, args.x)),
        "delta": format_rational(params.delta),
        "p": format_rational(params.p),
        "pbar": format_rational(params.pbar),
    }
    status = 0
    if args.verify:
        report = verify_eigenpair(args.sites, args.x)
        obj["eigenpair"] = report.to_json_obj()
        status = 0 if report.passed else 1
    _emit(_dump(obj), args.out)
    return status


def cmd_scalar(args) -> int:
    from .combinatorics import scalar_product_det

    mode = "special" if args.tau == "1" else "general"
    det = scalar_product_det(args.sites, mode)
    obj = {"N": args.sites, "tau": args.tau, "F": det.to_json_obj(), "display": str(det)}
    if args.x is not None and args.alpha is not None:
        values = {"x": args.x, "alpha": args.alpha}
        if mode == "general":
            if args.tau_value is None:
                raise SystemExit("scalar: --tau-value is required for evaluation with --tau general")
            values["tau"] = args.tau_value
        obj["value"] = format_rational(det.evaluate(values))
    _emit(_dump(obj), args.out)
    return 0


def cmd_overlap(args) -> int:
    from .combinatorics import conjecture_rhs, overlap_poly

    lhs = overlap_poly(args.parts)
    obj = {"parts": list(args.parts), "overlap": lhs.to_json_obj(), "display": str(lhs)}
    if sum(1 for s in args.parts if s % 2) <= 1:
        rhs = conjecture_rhs(args.parts)
        obj["factorised"] = str(rhs)
        obj["agrees"] = lhs.with_vars(("x",)) == rhs.with_vars(("x",))
    if args.x is not None:
        obj["x"] = format_rational(args.x)
        obj["value"] = format_rational(lhs.evaluate({"x": args.x}))
    _emit(_dump(obj), args.out)
    return 0


def cmd_tsasm(args) -> int:
    from . import tsasm

    if args.count_only:
        _emit(str(tsasm.count(args.m)), args.out)
    elif args.list:
        blocks = []
        tsasm.visit(args.m, lambda tri: blocks.append(
            f"mu={tri.mu} nu={tri.nu}\n{tri}" if args.m else "mu=0 nu=0\n(empty)"))
        _emit("\n\n".join(blocks), args.out)
    else:
        gf = tsasm.generating_function(args.m)
        _emit(_dump({"m": args.m, "count": tsasm.count(args.m), "genfun": gf.to_json_obj(),
                     "display": str(gf)}), args.out)
    return 0


# ---------------------------------------------------------------------------
# Check suites
# ---------------------------------------------------------------------------

NUMERIC_XS = (0.1, 0.5, 1.0, 2.0, 10.0)
EIGEN_XS = ("1", "2", "7/3", "1/5", "10")


def _signs(sign: str) -> tuple:
    return (1, -1) if sign == "both" else (int(sign),)


def _suite_exchange(c):
    from .qkz_vector import check_exchange
    return [check_exchange(n, c.seed, c.trials) for n in range(2, c.max_sites + 1)]


def _suite_reflection(c):
    from .qkz_vector import check_reflection
    return [check_reflection(n, c.seed, c.trials, s) for n in range(1, c.max_sites + 1) for s in _signs(c.sign)]


def _suite_bqkz(c):
    from .qkz_vector import check_bqkz
    return [check_bqkz(n, c.seed, c.trials) for n in range(1, c.max_sites + 1)]


def _suite_parity(c):
    from .homogeneous import check_parity_homogeneous
    from .qkz_vector import check_parity_inhomogeneous
    out = [check_parity_inhomogeneous(n, c.seed, c.trials) for n in range(1, min(c.max_sites, 5) + 1)]
    out.append(check_parity_inhomogeneous(2, c.seed, c.trials, imaginary_shift=True))
    out += [check_parity_homogeneous(n) for n in range(1, c.max_sites + 1)]
    return out


def _suite_psibar(c):
    from .qkz_vector import check_psi_equals_psibar
    return [check_psi_equals_psibar(n, c.seed, c.trials) for n in range(1, c.max_sites + 1)]


def _suite_degrees(c):
    from .qkz_vector import check_degrees_and_braid
    return [check_degrees_and_braid(n, c.seed, 1, check_braid=n <= 4) for n in range(1, c.max_sites + 1)]


def _suite_local(c):
    from .lattice_ops import check_local_identities
    return [check_local_identities(c.seed, max(c.trials, 1))]


def _suite_transfer(c):
    from .spectra import check_transfer_identities, verify_transfer_eigen
    out = []
    for s in _signs(c.sign):
        out += [check_transfer_identities(n, c.seed, c.trials, s) for n in range(1, min(c.max_sites, 4) + 1)]
        out += [verify_transfer_eigen(n, c.seed, c.trials, s) for n in range(1, min(c.max_sites, 4) + 1)]
    out += [verify_transfer_eigen(n, c.seed, 1, 1, homogeneous=True) for n in range(1, min(c.max_sites, 8) + 1)]
    return out


def _suite_eigenpair(c):
    from .spectra import verify_eigenpair
    return [verify_eigenpair(n, x) for n in range(1, c.max_sites + 1) for x in EIGEN_XS]


def _suite_numeric(c):
    from .spectra import numeric_ground_check, perron_frobenius_check
    out = [numeric_ground_check(n, NUMERIC_XS) for n in range(1, c.max_sites + 1)]
    out.append(numeric_ground_check(min(c.max_sites, 8), (-0.5, -2.0)))
    out += [perron_frobenius_check(n, x) for n in range(1, min(c.max_sites, 8) + 1) for x in ("1", "7/3")]
    return out


def _suite_log_derivative(c):
    from .spectra import verify_log_derivative
    return [verify_log_derivative(n, s) for n in range(1, c.max_sites + 1) for s in _signs(c.sign)]


def _suite_four_formulas(c):
    from .homogeneous import check_four_formulas, check_normalisation
    return [check_four_formulas(n) for n in range(1, c.max_sites + 1)] + [
        check_normalisation(n) for n in range(1, c.max_sites + 1)]


def _suite_degree_bound(c):
    from .homogeneous import check_degree_bound
    return [check_degree_bound(n) for n in range(1, c.max_sites + 1)]


def _suite_x0(c):
    from .homogeneous import check_sum_recursion, check_x0_spin_reversal
    return [check_x0_spin_reversal(n) for n in range(2, c.max_sites + 1)] + [
        check_sum_recursion(n) for n in range(2, c.max_sites + 1)]


def _suite_nonnegativity(c):
    from .homogeneous import check_nonnegativity
    return [check_nonnegativity(n) for n in range(1, c.max_sites + 1)]


def _suite_scalar(c):
    from .combinatorics import check_scalar_products
    return [check_scalar_products(c.max_sites)]


def _suite_general_tau(c):
    from .combinatorics import check_general_tau_scalar_products
    return [check_general_tau_scalar_products(c.max_sites)]


def _suite_overlaps(c):
    from .combinatorics import check_conjecture_overlaps
    return [check_conjecture_overlaps(c.max_sites)]


def _suite_susy(c):
    from .combinatorics import check_susy_identities
    return [check_susy_identities(max(1, (c.max_sites - 1) // 2))]


def _suite_tsasm(c):
    from .tsasm import check_enumeration
    return [check_enumeration(m, c.seed) for m in range(0, c.max_sites + 1)]


def _suite_conjecture_tsasm(c):
    from .tsasm import check_conjecture_tsasm
    return [check_conjecture_tsasm(n) for n in range(1, c.max_sites + 1)]


def _suite_shift(c):
    from .tsasm import check_shift_identity
    return [check_shift_identity(c.max_sites + 1)]


def _suite_mutations(c):
    """Deliberately broken variants; each must be rejected."""
    from .qkz_vector import check_bqkz, check_exchange, check_parity_inhomogeneous, check_psi_equals_psibar, \
        check_reflection
    from .spectra import verify_eigenpair, verify_log_derivative

    n = max(2, min(c.max_sites, 4))
    probes = [
        ("exchange:negate_b", lambda: check_exchange(n, c.seed, c.trials, mutation="negate_b")),
        ("reflection:double_beta", lambda: check_reflection(n, c.seed, c.trials, 1, mutation="double_beta")),
        ("bqkz:double_s", lambda: check_bqkz(n, c.seed, c.trials, mutation="double_s")),
        ("parity:drop_sign", lambda: check_parity_inhomogeneous(2, c.seed, c.trials, imaginary_shift=True,
                                                                mutation="drop_sign")),
        ("psibar:beta_numerator", lambda: check_psi_equals_psibar(n, c.seed, c.trials, mutation="beta_numerator")),
        ("eigenpair:perturb", lambda: verify_eigenpair(n, "7/3", perturb=True)),
        ("log-derivative:drop_constant", lambda: verify_log_derivative(n, 1, drop_constant=True)),
    ]
    report = Report("mutations", n, c.seed, c.trials, claim="mutation-self-tests")
    detected = {}
    for label, probe in probes:
        detected[label] = not probe().passed
        if not detected[label]:
            report.fail({"mutation": label, "error": "mutated check still passes"})
    report.details["detected"] = detected
    return [report]


# name -> (runner, default bound)
SUITES: dict[str, tuple[Callable, int]] = {
    "local": (_suite_local, 0),
    "exchange": (_suite_exchange, 6),
    "reflection": (_suite_reflection, 6),
    "bqkz": (_suite_bqkz, 5),
    "parity": (_suite_parity, 10),
    "psibar": (_suite_psibar, 5),
    "degrees": (_suite_degrees, 5),
    "mutations": (_suite_mutations, 4),
    "transfer": (_suite_transfer, 8),
    "eigenpair": (_suite_eigenpair, 12),
    "numeric": (_suite_numeric, 12),
    "log-derivative": (_suite_log_derivative, 6),
    "four-formulas": (_suite_four_formulas, 10),
    "degree-bound": (_suite_degree_bound, 12),
    "x0-spin-reversal": (_suite_x0, 10),
    "nonnegativity": (_suite_nonnegativity, 10),
    "scalar-products": (_suite_scalar, 12),
    "general-tau": (_suite_general_tau, 10),
    "conjecture-overlaps": (_suite_overlaps, 10),
    "susy": (_suite_susy, 11),
    "tsasm": (_suite_tsasm, 9),
    "conjecture-tsasm": (_suite_conjecture_tsasm, 8),
    "shift": (_suite_shift, 7),
}


def run_suite(name: str, max_sites: int | None = None, seed: int = 0, trials: int = 5,
              sign: str = "both") -> Report:
    runner, default = SUITES[name]
    config = argparse.Namespace(max_sites=default if max_sites is None else max_sites,
                                seed=seed, trials=trials, sign=sign)
    reports = runner(config)
    combined = merge(name, reports)
    combined.nsites = config.max_sites
    combined.seed = seed
    combined.trials = trials
    combined.observation = all(r.observation for r in reports)
    return combined


def cmd_check(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        bound = args.max_sites if args.suite != "all" else None
        report = run_suite(name, bound, args.seed, args.trials, args.sign)
        reports.append(report)
        print(report.summary(), flush=True)
        if not report.passed and not report.observation:
            print("  counterexample: " + json.dumps(report.counterexample, sort_keys=True, default=str),
                  flush=True)
    if len(reports) == 1:
        result = reports[0]
    else:
        result = merge("all", reports)
    if args.out:
        Path(args.out).write_text(result.to_json() + "\n")
    failed = [r for r in reports if not r.passed and not r.observation]
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bqkz", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {code_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    gs = sub.add_parser("gs", help="ground-state component table psi_N")
    gs.add_argument("--sites", type=_sites_arg, required=True)
    gs.add_argument("--tau", type=_tau_arg, default="symbolic", help="'symbolic' or a rational")
    gs.add_argument("--x", type=_rational_arg, default=None, help="also report values at this x")
    gs.add_argument("--formula", choices=("general", "tau1", "bar", "tau_general"), default="general")
    gs.add_argument("--format", choices=("json", "csv"), default="json")
    gs.add_argument("--out")
    gs.set_defaults(func=cmd_gs)

    energy = sub.add_parser("energy", help="exact ground-state energy E0(N, x)")
    energy.add_argument("--sites", type=_sites_arg, required=True)
    energy.add_argument("--x", type=_rational_arg, required=True)
    energy.add_argument("--verify", action="store_true", help="also check (H - E0) psi_N = 0")
    energy.add_argument("--out")
    energy.set_defaults(func=cmd_energy)

    scalar = sub.add_parser("scalar", help="determinant F_N(x, alpha)")
    scalar.add_argument("--sites", type=_sites_arg, required=True)
    scalar.add_argument("--tau", choices=("1", "general"), default="1")
    scalar.add_argument("--x", type=_rational_arg)
    scalar.add_argument("--alpha", type=_rational_arg)
    scalar.add_argument("--tau-value", type=_rational_arg)
    scalar.add_argument("--out")
    scalar.set_defaults(func=cmd_scalar)

    overlap = sub.add_parser("overlap", help="overlap O_{N1..Nm} of psi_N with a product of smaller ground states")
    overlap.add_argument("--parts", type=_parts_arg, required=True, help="comma-separated sizes, e.g. 2,3")
    overlap.add_argument("--x", type=_rational_arg)
    overlap.add_argument("--out")
    overlap.set_defaults(func=cmd_overlap)

    ts = sub.add_parser("tsasm", help="totally-symmetric ASMs of size 2m+1")
    ts.add_argument("--m", type=int, required=True)
    mode = ts.add_mutually_exclusive_group()
    mode.add_argument("--count-only", action="store_true")
    mode.add_argument("--genfun", action="store_true", help="generating function in (t, tau) (default)")
    mode.add_argument("--list", action="store_true", help="print every triangle with its weights")
    ts.add_argument("--out")
    ts.set_defaults(func=cmd_tsasm)

    check = sub.add_parser("check", help="run a verification suite")
    check.add_argument("--suite", choices=("all",) + tuple(SUITES), required=True)
    check.add_argument("--max-sites", type=int, default=None, help="size bound (default depends on the suite)")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--trials", type=int, default=5)
    check.add_argument("--sign", choices=("1", "-1", "both"), default="both", help="sign of beta-bar")
    check.add_argument("--out")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: list | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "m", None) is not None and not 0 <= args.m <= 10:
        parser.error("--m must lie in 0..10")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
