"""Command line interface: ``scaleinv <command> <fixture> [options]``.

Exit codes: 0 success, 2 mathematical negative result (no grading, not
strongly scale-invariant, not constructible, infinite Reidemeister number,
no unique coboundary solution), 1 input or precondition error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable

from .exact import Polynomial
from .fixtures import ParseError, catalog_names, load_fixture
from .liealg import (
    AlgebraError,
    InvalidGrading,
    NotNilpotent,
    all_derivations_nilpotent,
    find_positive_grading,
    lower_central_series,
    validate,
    verify_grading,
)
from .malcev import INFINITE, LatticeError
from .morphisms import (
    MorphismError,
    NotInvariant,
    NoUniqueSolution,
    Verdict,
    bounded_intersection_report,
    classify,
    coboundary_solve,
    layer_maps,
)
from .reidemeister import FinitenessFails, NotRationalAtOrder, reidemeister_sequence, zeta_certificate
from .vngroups import (
    GroupDataError,
    InvalidGradingError,
    InvarianceSearchFailed,
    NotConstructible,
    centralizer_of_lattice,
    conjugator_search,
    construct_ssi,
    max_finite_normal,
)

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2

INPUT_ERRORS = (
    ParseError,
    FileNotFoundError,
    AlgebraError,
    NotNilpotent,
    LatticeError,
    MorphismError,
    NotInvariant,
    GroupDataError,
    InvalidGrading,
    InvalidGradingError,
    ValueError,
)


class Outcome:
    def __init__(self, text: str, data: dict, code: int = EXIT_OK):
        self.text = text
        self.data = data
        self.code = code


def _s(v) -> str:
    return str(v)


def _vec(v) -> list[str]:
    return [str(a) for a in v]


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(a) for a in v) + ")"


def _rvalue(v):
    return "INFINITE" if v == INFINITE else v


def format_series_poly(p: Polynomial, var: str = "z") -> str:
    """Ascending-power rendering, e.g. 1 - 2z + z^2."""
    parts = []
    for k, c in enumerate(p.coeffs):
        if not c:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            coef = "" if mag == 1 else str(mag)
            body = coef + var + (f"^{k}" if k > 1 else "")
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_validate(fx, args) -> Outcome:
    alg = fx.algebra()
    r = validate(alg)
    data = {
        "ok": r.ok,
        "nilpotency_class": r.nilpotency_class,
        "violations": r.violations,
        "jacobi_triple": list(r.jacobi_triple) if r.jacobi_triple else None,
        "antisymmetry_pair": list(r.antisymmetry_pair) if r.antisymmetry_pair else None,
    }
    if not r.ok:
        return Outcome("invalid algebra: " + "; ".join(r.violations), data, EXIT_INPUT)
    lines = [f"{fx.name}: valid nilpotent Lie algebra of dimension {alg.dim}, class {r.nilpotency_class}"]
    if fx.lattice_rows is not None or fx.has("vngroup"):
        lat = fx.lattice(alg)
        lines.append(f"lattice closed under multiplication, layers {lat.layer_dims}")
        data["lattice_layers"] = list(lat.layer_dims)
    if fx.has("vngroup") or fx.has("finite_group"):
        G = fx.group()
        lines.append(f"group data consistent, {len(G.cosets)} cosets")
        data["cosets"] = len(G.cosets)
    return Outcome("\n".join(lines), data)


def cmd_lcs(fx, args) -> Outcome:
    alg = _checked(fx)
    flag = lower_central_series(alg)
    P = flag.adapted_basis()
    data = {
        "nilpotency_class": flag.nilpotency_class,
        "layer_dims": list(flag.layer_dims),
        "subspace_dims": [s.rows for s in flag.subspaces],
        "adapted_basis": [_vec(r) for r in P],
    }
    lines = [f"class {flag.nilpotency_class}, layer dimensions {flag.layer_dims}", "adapted basis:"]
    lines += ["  " + " ".join(str(a) for a in r) for r in P]
    return Outcome("\n".join(lines), data)


def cmd_grading(fx, args) -> Outcome:
    alg = _checked(fx)
    if args.action == "verify":
        g = fx.grading()
        if g is None:
            raise ParseError("fixture has no [grading] section", None, fx.source)
        ok = verify_grading(alg, g)
        data = {"weights": list(g.weights), "valid": ok}
        if not ok:
            return Outcome(f"weights {g.weights}: NOT a grading", data, EXIT_NEGATIVE)
        return Outcome(f"weights {g.weights}: valid positive grading", data)
    res = find_positive_grading(alg)
    if res.found:
        w = res.grading.weights
        return Outcome(f"positive grading found: weights {w}", {"found": True, "weights": list(w)})
    cert = res.certificate
    data = {
        "found": False,
        "multipliers": _vec(cert.multipliers),
        "combination": _vec(cert.combination),
        "constraints": [list(c) for c in res.constraints],
    }
    text = (
        "NOT_FOUND: no positive grading diagonal in this basis\n"
        f"certificate: multipliers {_fmt_vec(cert.multipliers)} give combination {_fmt_vec(cert.combination)}"
    )
    return Outcome(text, data, EXIT_NEGATIVE)


def cmd_char_nilpotent(fx, args) -> Outcome:
    alg = _checked(fx)
    r = all_derivations_nilpotent(alg)
    data = {
        "all_nilpotent": r.all_nilpotent,
        "derivation_dim": r.derivation_dim,
        "checked_powers": r.checked_powers,
        "witness_power": r.witness_power,
    }
    if r.all_nilpotent:
        text = f"characteristically nilpotent: all derivations nilpotent (dim Der = {r.derivation_dim})"
    else:
        text = f"not characteristically nilpotent: tr(D^{r.witness_power}) is not identically zero (dim Der = {r.derivation_dim})"
    return Outcome(text, data)


def cmd_morphism(fx, args) -> Outcome:
    alg = _checked(fx)
    lat = fx.lattice(alg)
    phi = fx.morphism(alg)
    rep = classify(layer_maps(lat, phi))
    data = rep.to_dict()
    lines = [
        f"verdict: {rep.verdict.value} ({rep.reason})",
        "layer characteristic polynomials: " + ", ".join(p.format("t") for p in rep.char_polys),
        f"|det| = {rep.abs_det}, eigenvalue 1: {rep.has_eigenvalue_one}, "
        f"root of unity: {rep.has_root_of_unity}, expanding: {rep.expanding}",
    ]
    code = EXIT_NEGATIVE if rep.verdict == Verdict.NOT_SSI else EXIT_OK
    return Outcome("\n".join(lines), data, code)


def _parse_vector(text: str, dim: int) -> tuple[Fraction, ...]:
    try:
        v = tuple(Fraction(t) for t in text.replace(",", " ").split())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot parse vector {text!r}") from None
    if len(v) != dim:
        raise ParseError(f"vector needs {dim} coordinates, got {len(v)}")
    return v


def cmd_coboundary(fx, args) -> Outcome:
    alg = _checked(fx)
    phi = fx.morphism(alg)
    x = _parse_vector(args.x, alg.dim)
    try:
        y = coboundary_solve(alg, phi, x, args.method)
    except NoUniqueSolution as exc:
        data = {"unique": False, "witness": _vec(exc.witness)}
        return Outcome(f"NO_UNIQUE_SOLUTION: phi fixes {_fmt_vec(exc.witness)}", data, EXIT_NEGATIVE)
    return Outcome(f"y = {_fmt_vec(y)}  (x = y * phi(y)^-1)", {"unique": True, "y": _vec(y)})


def cmd_intersect(fx, args) -> Outcome:
    alg = _checked(fx)
    lat = fx.lattice(alg)
    phi = fx.morphism(alg)
    rep = bounded_intersection_report(lat, phi, args.depth, args.ball)
    pts = rep.elements
    if len(pts) == 1 and not any(pts[0]):
        body = "{identity}"
    else:
        body = f"{len(pts)} elements: " + ", ".join(_fmt_vec(lat.to_second_kind(p)) for p in pts[:20])
        if len(pts) > 20:
            body += ", ..."
    return Outcome(f"depth {rep.depth}, ball {rep.ball}: {body}", rep.to_dict())


def cmd_reidemeister(fx, args) -> Outcome:
    alg = _checked(fx)
    seq = reidemeister_sequence(fx.lattice(alg), fx.morphism(alg), args.upto)
    vals = [_rvalue(v) for v in seq]
    data = {"values": vals}
    text = "R(phi^n), n = 1.." + str(args.upto) + ": " + ", ".join(str(v) for v in vals)
    code = EXIT_NEGATIVE if any(v == INFINITE for v in seq) else EXIT_OK
    return Outcome(text, data, code)


def cmd_zeta(fx, args) -> Outcome:
    alg = _checked(fx)
    try:
        cert = zeta_certificate(fx.lattice(alg), fx.morphism(alg), args.order)
    except FinitenessFails as exc:
        return Outcome(f"FINITENESS_FAILS: R(phi^{exc.n}) is infinite", {"finiteness_fails": exc.n}, EXIT_NEGATIVE)
    except NotRationalAtOrder as exc:
        return Outcome(f"NOT_RATIONAL_AT_ORDER: {exc}", {"not_rational_at": exc.n}, EXIT_NEGATIVE)
    num = format_series_poly(cert.numerator)
    den = format_series_poly(cert.denominator)
    data = cert.to_dict()
    data["display"] = f"({num})/({den})"
    return Outcome(f"({num})/({den}), verified_order={cert.verified_order}", data)


def cmd_centralizer(fx, args) -> Outcome:
    G = fx.group()
    c = centralizer_of_lattice(G)
    names = [G.F.names[f] for f in c.kernel]
    center = [_vec(r) for r in c.center]
    data = {"center_basis": center, "kernel": names}
    text = "center of the Lie algebra spanned by " + (
        ", ".join(_fmt_vec(r) for r in c.center) if c.center.rows else "nothing (trivial)"
    ) + f"; ker rho = {{{', '.join(names)}}}"
    fin = max_finite_normal(G)
    data["max_finite_normal"] = [e.to_dict() for e in fin]
    text += f"\nmaximal finite normal subgroup: {{{', '.join(G.F.names[e.f] for e in fin)}}}"
    return Outcome(text, data)


def cmd_conjugate(fx, args) -> Outcome:
    G = fx.group()
    res = conjugator_search(G)
    fam = ", ".join(_fmt_vec(v) for v in res.family)
    return Outcome(f"x = {_fmt_vec(res.x)}; family: {fam}", res.to_dict())


def cmd_construct_ssi(fx, args) -> Outcome:
    _checked(fx)
    G = fx.group()
    try:
        res = construct_ssi(G, args.depth, args.ball, grading=fx.grading())
    except NotConstructible as exc:
        data = {"constructible": False, "reason": str(exc), "certified": exc.certified}
        if exc.search is not None and exc.search.certificate is not None:
            data["multipliers"] = _vec(exc.search.certificate.multipliers)
        return Outcome(f"NOT_CONSTRUCTIBLE: {exc}", data, EXIT_NEGATIVE)
    except InvarianceSearchFailed as exc:
        return Outcome(f"NOT_CONSTRUCTIBLE: {exc}", {"constructible": False, "reason": str(exc)}, EXIT_NEGATIVE)
    data = res.to_dict()
    text = res.summary() + f"\nconjugator x = {_fmt_vec(res.conjugator)}, p = {res.p}, k = {res.k}, depth {res.depth}, ball {res.ball}"
    return Outcome(text, data)


def cmd_catalog(fx, args) -> Outcome:
    names = catalog_names()
    return Outcome("\n".join(names), {"fixtures": names})


def _checked(fx):
    alg = fx.algebra()
    r = validate(alg)
    if not r.ok:
        raise AlgebraError("invalid algebra: " + "; ".join(r.violations))
    return alg


COMMANDS: dict[str, Callable] = {
    "validate": cmd_validate,
    "lcs": cmd_lcs,
    "grading": cmd_grading,
    "char-nilpotent": cmd_char_nilpotent,
    "morphism": cmd_morphism,
    "coboundary": cmd_coboundary,
    "intersect": cmd_intersect,
    "reidemeister": cmd_reidemeister,
    "zeta": cmd_zeta,
    "centralizer": cmd_centralizer,
    "conjugate": cmd_conjugate,
    "construct-ssi": cmd_construct_ssi,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scaleinv", description="Exact computations for strongly scale-invariant groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("fixture", help="fixture file or catalog entry fixtures/<name>")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    add("validate", "check the algebra, lattice and group data")
    add("lcs", "lower central series and adapted basis")
    p = add("grading", "find or verify a positive grading")
    p.add_argument("action", choices=["find", "verify"])
    # argparse puts positionals in order: grading <fixture> <action> also accepted
    add("char-nilpotent", "test whether every derivation is nilpotent")
    p = add("morphism", "classify the morphism of the fixture")
    p.add_argument("action", choices=["classify"])
    p = add("coboundary", "solve x = y phi(y)^-1")
    p.add_argument("--x", required=True, help="first-kind coordinates, e.g. '1,0,0' or '1/2 0 0'")
    p.add_argument("--method", choices=["right", "left"], default="right")
    p = add("intersect", "bounded intersection of iterated images")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--ball", type=int, default=16)
    p = add("reidemeister", "Reidemeister numbers of iterates")
    p.add_argument("--upto", type=int, default=10)
    p = add("zeta", "certified rational Reidemeister zeta function")
    p.add_argument("--order", type=int, default=20)
    add("centralizer", "centralizer of the lattice and maximal finite normal subgroup")
    add("conjugate", "conjugator making Gamma n F lie in ker rho")
    p = add("construct-ssi", "build a strongly scale-invariant monomorphism")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--ball", type=int, default=16)
    c = sub.add_parser("catalog", help="list bundled fixtures")
    c.add_argument("--json", action="store_true")
    return parser


def _normalise_argv(argv: list[str]) -> list[str]:
    # allow "grading find FIXTURE" and "morphism classify FIXTURE" word order
    if len(argv) >= 3 and argv[0] in ("grading", "morphism") and argv[1] in ("find", "verify", "classify"):
        return [argv[0], argv[2], argv[1]] + argv[3:]
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = _normalise_argv(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            out = cmd_catalog(None, args)
        else:
            if args.command == "zeta" and args.order < 1:
                raise ValueError("--order must be positive")
            fx = load_fixture(args.fixture)
            out = COMMANDS[args.command](fx, args)
    except INPUT_ERRORS as exc:
        msg = f"error: {exc}"
        if getattr(args, "json", False):
            print(json.dumps({"command": args.command, "status": "error", "error": str(exc)}))
        else:
            print(msg, file=sys.stderr)
        return EXIT_INPUT
    status = {EXIT_OK: "ok", EXIT_NEGATIVE: "negative", EXIT_INPUT: "error"}[out.code]
    if args.json:
        payload = {"command": args.command, "fixture": getattr(args, "fixture", None), "status": status, "result": out.data}
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        stream = sys.stderr if out.code == EXIT_INPUT else sys.stdout
        print(out.text, file=stream)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
