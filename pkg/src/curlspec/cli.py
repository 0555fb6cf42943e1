"""Command-line front end.

Every subcommand prints one JSON document (or CSV where that makes
sense) to stdout.  Failures print a single JSON error record to stderr
and exit with 2 (validation), 3 (numerical residual) or 4 (cap hit).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .analysis import (
    BOUND_KINDS,
    check_lower_bound,
    counting_identity_check_torus,
    eta_partial,
    weyl_fit,
    zeta_at_zero,
    zeta_partial,
)
from .errors import CurlSpectrumError, ValidationError
from .spaceform import (
    DEFAULT_DPS,
    DEFAULT_K,
    asymmetry_certificate,
    auxiliary_G,
    close_group,
    load_group,
    parse_angles,
    poincare_F,
    smallest_eigenvalue_multiplicities,
    spaceform_spectrum,
)
from .spectrum import spectrum_to_csv, spectrum_to_dict, symmetry_defect
from .sphere import sphere_multiplicity, sphere_spectrum
from .torus import load_lattice, torus_spectrum

COMMANDS = ("torus", "sphere", "spaceform", "weyl", "zeta", "eta", "bounds", "crosscheck")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="sphere dimension (odd, >= 3)")
    p.add_argument("--basis", help="lattice JSON path or identity<n>")
    p.add_argument("--angles", action="append", help="generator R(2pi p1/q, 2pi p2/q) as q:p1,p2 (repeatable)")
    p.add_argument("--matrices", help="group JSON path")
    p.add_argument("--kmax", type=int, help=f"sphere/space form truncation index (default {DEFAULT_K})")
    p.add_argument("--lmax", type=float, help="torus truncation |lambda| <= lmax")
    p.add_argument("--precision-digits", type=int, default=DEFAULT_DPS, dest="dps")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curlspec", description="Exact curl spectra of tori, spheres and spherical space forms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _source_args(p)
        if name in ("zeta", "eta"):
            p.add_argument("--s", type=float, required=True, help="exponent, must exceed n")
        if name == "bounds":
            p.add_argument("--kappa", default="1", help="curvature constant (rational like 1/4 or a float)")
            p.add_argument("--kind", choices=BOUND_KINDS, default="curvature-operator")
    return parser


def _kappa(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"bad kappa {text!r}") from None


def _group(args):
    if args.angles:
        return close_group([parse_angles(a) for a in args.angles], label="+".join(f"L({a})" for a in args.angles))
    return load_group(args.matrices)


def _source(args) -> str:
    given = [
        name
        for name, present in (
            ("torus", args.basis is not None),
            ("spaceform", bool(args.angles) or args.matrices is not None),
            ("sphere", args.n is not None),
        )
        if present
    ]
    if args.angles and args.matrices is not None:
        raise ValidationError("give either --angles or --matrices, not both")
    if len(given) != 1:
        raise ValidationError("exactly one manifold source is required: --basis, --n, or --angles/--matrices")
    return given[0]


def _spectrum(args, family: str):
    if family == "torus":
        if args.lmax is None:
            raise ValidationError("--lmax is required for tori")
        return torus_spectrum(load_lattice(args.basis), args.lmax)
    kmax = DEFAULT_K if args.kmax is None else args.kmax
    if kmax < 0:
        raise ValidationError("--kmax must be nonnegative")
    if family == "sphere":
        return sphere_spectrum(args.n, kmax)
    return spaceform_spectrum(_group(args), kmax, args.dps)


def _emit(payload, fmt: str, csv_text: str | None = None) -> str:
    if fmt == "csv":
        if csv_text is None:
            raise ValidationError("csv output is only available for spectra and Weyl tables")
        return csv_text
    return json.dumps(payload, indent=2) + "\n"


def _run_spectrum(args, family: str) -> str:
    spec = _spectrum(args, family)
    payload = spectrum_to_dict(spec)
    payload["symmetric"] = not symmetry_defect(spec)
    if family == "spaceform":
        group = _group(args)
        plus, minus = smallest_eigenvalue_multiplicities(group, args.dps)
        payload["group_order"] = group.order
        payload["multiplicity_at_2"] = plus
        payload["multiplicity_at_minus_2"] = minus
    return _emit(payload, args.format, spectrum_to_csv(spec))


def _run_crosscheck(args, family: str) -> dict:
    if family == "torus":
        if args.lmax is None:
            raise ValidationError("--lmax is required for tori")
        lhs, rhs = counting_identity_check_torus(load_lattice(args.basis), args.lmax)
        return {"check": "counting-identity", "lambda": args.lmax, "lhs": lhs, "rhs": rhs, "ok": lhs == rhs}
    kmax = DEFAULT_K if args.kmax is None else args.kmax
    if family == "sphere":
        rows = []
        ok = True
        if args.n == 3:
            F = poincare_F(close_group([]), kmax, args.dps)
            for k in range(kmax + 1):
                m = sphere_multiplicity(3, k)
                rows.append({"k": k, "sphere": m, "trivial_group_plus": F.plus[k], "trivial_group_minus": F.minus[k]})
                ok &= F.plus[k] == m == F.minus[k]
            return {"check": "trivial-group-agreement", "ok": ok, "rows": rows}
        for k in range(kmax + 1):
            rows.append({"k": k, "multiplicity": sphere_multiplicity(args.n, k)})
        return {"check": "sphere-integrality", "ok": True, "rows": rows}
    group = _group(args)
    F = poincare_F(group, kmax, args.dps)
    G = auxiliary_G(group, kmax, args.dps)
    ok = True
    for k in range(kmax + 1):
        shift_m = F.minus[k - 2] if k >= 2 else 0
        shift_p = F.plus[k - 2] if k >= 2 else 0
        ok &= F.plus[k] + shift_m == G.plus[k]
        ok &= F.minus[k] + shift_p == G.minus[k]
    cert = asymmetry_certificate(group, kmax, args.dps)
    return {
        "check": "poincare-series-identity",
        "ok": ok and cert.consistent,
        "F_plus": list(F.plus),
        "F_minus": list(F.minus),
        "G_plus": list(G.plus),
        "G_minus": list(G.minus),
        "residual": max(F.residual, G.residual),
        "symmetric": cert.symmetric,
        "certificate_symmetric": cert.certificate_symmetric,
    }


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Execute one job; returns ``(exit status, stdout text, stderr text)``."""
    try:
        args = build_parser().parse_args(argv)
        cmd = args.command
        if cmd in ("torus", "sphere", "spaceform"):
            family = _source(args)
            if family != cmd:
                raise ValidationError(f"'{cmd}' needs a {cmd} source, got {family}")
            return 0, _run_spectrum(args, family), ""
        family = _source(args)
        if cmd == "crosscheck":
            return 0, _emit(_run_crosscheck(args, family), args.format), ""
        spec = _spectrum(args, family)
        if cmd == "weyl":
            report = weyl_fit(spec)
            table = "lambda,relative_error\n" + "".join(f"{lam!r},{err!r}\n" for lam, err in report.table())
            return 0, _emit(report.as_dict(), args.format, table), ""
        if cmd == "zeta":
            zp = zeta_partial(spec, args.s)
            z0 = zeta_at_zero(spec.descriptor)
            payload = {
                "s": args.s,
                "partial": zp.partial,
                "tail_estimate": zp.tail,
                "truncation": spec.truncation,
                "zeta_at_zero": z0.value,
                "semi_characteristic": z0.semi_characteristic,
            }
            return 0, _emit(payload, args.format), ""
        if cmd == "eta":
            defect = symmetry_defect(spec)
            payload = {
                "s": args.s,
                "eta_partial": eta_partial(spec, args.s),
                "symmetric": not defect,
                "defect": [{"lambda": lam, "defect": d} for lam, d in defect],
            }
            return 0, _emit(payload, args.format), ""
        if cmd == "bounds":
            report = check_lower_bound(spec, _kappa(args.kappa), args.kind)
            return 0, _emit(report.as_dict(), args.format), ""
        raise ValidationError(f"unknown command {cmd!r}")
    except CurlSpectrumError as exc:
        record = {"error": exc.kind, "exit_code": exc.exit_code, "message": str(exc)}
        return exc.exit_code, "", json.dumps(record) + "\n"


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
