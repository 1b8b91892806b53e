"""Command-line front end.

Exit codes: 0 success, 1 inconclusive or failed run, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_geometry
from .errors import DegenerateTangents, NoRootInBracket, PreconditionViolated
from .exact import parse_rational
from .geometry import AnalyticArc, CornerProfile
from .incident import parse_incident
from .ite import IteQuery, find_ites, roots_to_csv
from .nystrom import TransmissionProblem
from .sweep import converged_far_field, scattering_sweep
from .vanishing import (
    Conclusion,
    VanishingCertificate,
    agrees_with_oracle,
    check_certificate,
    jet_nullspace,
    operator_span_check,
    oracle_certificate,
    oracle_order,
    strong_corner_induction,
    weak_corner_induction,
)

OK, FAILED, INVALID = 0, 1, 2

DEFAULT_TANGENT_PAIRS = [((1, 0), (0, 1)), ((1, 0), (1, 1)), ((1, 2), (1, -1)), ((2, 1), (-1, 3)), ((1, 1), (1, -1))]


class UsageError(Exception):
    """Invalid user input; reported with exit code 2."""


def _rational(text, name):
    try:
        return parse_rational(text)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{name} must be an exact rational like 3 or 7/2, got {text!r}") from exc


def _positive_float(text, name):
    try:
        value = float(text)
    except ValueError as exc:
        raise UsageError(f"{name} must be a number, got {text!r}") from exc
    if not value > 0:
        raise UsageError(f"{name} must be positive, got {text!r}")
    return value


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _germ(args, kind):
    cfg = load_geometry(args.geometry)
    if cfg.kind != kind:
        raise UsageError(f"geometry file describes a {cfg.kind!r} germ, this command needs {kind!r}")
    return cfg.germ()


def _certify(args, kind):
    germ = _germ(args, kind)
    q1, q2 = _rational(args.q1, "q1"), _rational(args.q2, "q2")
    if q1 == q2:
        raise UsageError("q1 and q2 must differ")
    try:
        if kind == "weak":
            cert = weak_corner_induction(germ, q1, q2, args.order)
        else:
            cert = strong_corner_induction(germ, q1, q2, args.order)
    except (PreconditionViolated, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    cert.audit = args.audit
    path = _write(Path(args.out), f"{kind}_certificate.json", cert.dumps())
    print(f"{cert.conclusion.value}: {len(cert.steps)} steps, {len(cert.claim)} coefficients claimed -> {path}")
    if cert.conclusion is not Conclusion.ALL_VANISH:
        return FAILED
    if not args.skip_oracle:
        report = jet_nullspace(germ, q1, q2, oracle_order(cert))
        agree = agrees_with_oracle(cert, report)
        print(f"oracle at order {report.order}: nullspace dimension {report.dimension}, "
              f"{'agrees' if agree else 'DISAGREES'} on the claimed set")
        if not agree:
            return FAILED
    return OK


def cmd_verify_weak(args):
    return _certify(args, "weak")


def cmd_verify_strong(args):
    return _certify(args, "strong")


def _random_pairs(rng, count):
    pairs = []
    while len(pairs) < count:
        a = tuple(int(v) for v in rng.integers(-5, 6, size=2))
        b = tuple(int(v) for v in rng.integers(-5, 6, size=2))
        if a[0] * b[1] - a[1] * b[0] != 0:
            pairs.append((a, b))
    return pairs


def cmd_spans(args):
    if args.mmin < 4 or args.mmax < args.mmin:
        raise UsageError("need 4 <= mmin <= mmax")
    pairs = list(DEFAULT_TANGENT_PAIRS) + _random_pairs(np.random.default_rng(args.seed), args.random_pairs)
    lines = ["m,tau1,tau2,spans"]
    all_ok = True
    for tau1, tau2 in pairs:
        for m in range(args.mmin, args.mmax + 1):
            try:
                ok = operator_span_check(m, tau1, tau2)
            except DegenerateTangents as exc:
                raise UsageError(str(exc)) from exc
            all_ok &= ok
            lines.append(f"{m},{tau1[0]} {tau1[1]},{tau2[0]} {tau2[1]},{str(ok).lower()}")
    path = _write(Path(args.out), "spans.csv", "\n".join(lines) + "\n")
    print(f"{len(lines) - 1} span checks, {'all hold' if all_ok else 'SOME FAIL'} -> {path}")
    return OK if all_ok else FAILED


def _k_grid(args):
    if args.k is not None:
        return [_positive_float(v, "k") for v in args.k.split(",") if v.strip()]
    if args.count == 0:
        return []
    kmin, kmax = _positive_float(args.kmin, "kmin"), _positive_float(args.kmax, "kmax")
    if kmax < kmin:
        raise UsageError("kmax must not be below kmin")
    return list(np.linspace(kmin, kmax, args.count))


def cmd_sweep(args):
    cfg = load_geometry(args.geometry)
    q0 = _positive_float(args.q0, "q0")
    if q0 == 1:
        raise UsageError("q0 = 1 means no scatterer")
    try:
        incident = parse_incident(args.incident)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    grid = _k_grid(args)
    boundary = cfg.boundary() if grid else None
    table = scattering_sweep(boundary, q0, incident, grid, nodes=args.nodes, tol=args.tol, max_nodes=args.max_nodes)
    out = Path(args.out)
    path = _write(out, "sweep.csv", table.to_csv())
    best = table.minimum()
    if best is not None:
        print(f"min far-field norm {best.farfield_l2:.6e} at k={best.k:.6g} ({best.nodes} nodes) -> {path}")
        problem = TransmissionProblem(best.k, q0, boundary, incident)
        ff, _, _ = converged_far_field(problem, args.nodes, args.tol, args.max_nodes, n_angles=args.angles)
        rows = ["theta,re,im"] + [f"{t:.12g},{v.real:.12e},{v.imag:.12e}" for t, v in zip(ff.theta, ff.values)]
        _write(out, "farfield.csv", "\n".join(rows) + "\n")
        if args.svg:
            from .plotting import farfield_svg, sweep_svg

            sweep_svg(table, out / "sweep.svg")
            farfield_svg(ff, out / "farfield.svg")
    else:
        print(f"no converged rows -> {path}")
    failed = [r for r in table.rows if r.failed]
    for r in failed:
        print(f"k={r.k:.6g} failed: {r.message}", file=sys.stderr)
    return FAILED if failed else OK


def cmd_ite(args):
    try:
        query = IteQuery(_positive_float(args.radius, "radius"), _positive_float(args.q0, "q0"), args.order,
                         (_positive_float(args.kmin, "kmin"), _positive_float(args.kmax, "kmax")))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        roots = find_ites(query)
    except NoRootInBracket as exc:
        _write(Path(args.out), "ite.csv", roots_to_csv([]))
        print(str(exc))
        return FAILED
    path = _write(Path(args.out), "ite.csv", roots_to_csv(roots))
    print(f"{len(roots)} roots of d_{args.order} -> {path}")
    return OK


def cmd_oracle(args):
    out = Path(args.out)
    if args.cert:
        try:
            cert = VanishingCertificate.loads(Path(args.cert).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read certificate {args.cert}: {exc.strerror or exc}") from exc
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"malformed certificate {args.cert}: {exc}") from exc
        problems = check_certificate(cert)
        report = jet_nullspace(cert.germ, cert.q1, cert.q2, oracle_order(cert))
        agree = agrees_with_oracle(cert, report) and cert.conclusion is Conclusion.ALL_VANISH
        summary = {
            "certificate": str(args.cert),
            "replay_problems": problems,
            "oracle_order": report.order,
            "nullspace_dimension": report.dimension,
            "agree": agree and not problems,
        }
        _write(out, "oracle_report.json", json.dumps(summary, indent=1, sort_keys=True) + "\n")
        for p in problems:
            print(f"replay: {p}")
        print(f"oracle nullspace dimension {report.dimension}; {'agreement' if summary['agree'] else 'MISMATCH'}")
        return OK if summary["agree"] else FAILED

    if not args.geometry:
        raise UsageError("oracle needs --cert or --geometry")
    cfg = load_geometry(args.geometry)
    germ = cfg.germ()
    q1, q2 = _rational(args.q1, "q1"), _rational(args.q2, "q2")
    if q1 == q2:
        raise UsageError("q1 and q2 must differ")
    if isinstance(germ, AnalyticArc):
        cert = oracle_certificate(germ, q1, q2, args.order)
        cert.audit = args.audit
        _write(out, "oracle_certificate.json", cert.dumps())
        dim = cert.notes[0]
        print(f"positive nullspace, no certificate expected ({dim}; conclusion {cert.conclusion.value})")
        return OK if cert.conclusion is Conclusion.COUNTEREXAMPLE else FAILED
    try:
        if isinstance(germ, CornerProfile):
            cert = weak_corner_induction(germ, q1, q2, args.order)
        else:
            cert = strong_corner_induction(germ, q1, q2, args.order)
    except (PreconditionViolated, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    ocert = oracle_certificate(germ, q1, q2, oracle_order(cert))
    ocert.audit = args.audit
    _write(out, "oracle_certificate.json", ocert.dumps())
    report = jet_nullspace(germ, q1, q2, oracle_order(cert))
    agree = agrees_with_oracle(cert, report) and cert.conclusion is Conclusion.ALL_VANISH
    print(f"schedule {cert.conclusion.value}; oracle {ocert.conclusion.value}, nullspace dimension "
          f"{report.dimension}; {'agreement' if agree else 'MISMATCH'}")
    return OK if agree and ocert.conclusion is Conclusion.ALL_VANISH else FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cornerscatter", description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    parser.add_argument("--audit", action="store_true", help="include full matrices in certificates")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, kind, order in (("verify-weak", "weak", 24), ("verify-strong", "strong", 12)):
        p = sub.add_parser(name, help=f"certify vanishing at a {kind} corner")
        p.add_argument("--geometry", required=True)
        p.add_argument("--q1", required=True)
        p.add_argument("--q2", required=True)
        p.add_argument("--order", type=int, default=order)
        p.add_argument("--skip-oracle", action="store_true", help="do not cross-check with the nullspace oracle")
        p.set_defaults(func=cmd_verify_weak if kind == "weak" else cmd_verify_strong)

    p = sub.add_parser("spans", help="operator span checks on tangent pairs")
    p.add_argument("--mmin", type=int, default=4)
    p.add_argument("--mmax", type=int, default=12)
    p.add_argument("--random-pairs", type=int, default=0, help="extra random rational tangent pairs")
    p.set_defaults(func=cmd_spans)

    p = sub.add_parser("sweep", help="far-field norm over a wavenumber grid")
    p.add_argument("--geometry", required=True)
    p.add_argument("--q0", required=True)
    p.add_argument("--kmin", default="1")
    p.add_argument("--kmax", default="5")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--k", help="explicit comma-separated wavenumbers (overrides the range)")
    p.add_argument("--incident", default="plane:0", help="plane:<angle> or circular:<order>")
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--max-nodes", type=int, default=2048)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--angles", type=int, default=64)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ite", help="interior transmission eigenvalues of a disk")
    p.add_argument("--radius", default="1")
    p.add_argument("--q0", required=True)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--kmin", default="0.5")
    p.add_argument("--kmax", default="10")
    p.set_defaults(func=cmd_ite)

    p = sub.add_parser("oracle", help="cross-check certificates against the nullspace oracle")
    p.add_argument("--cert")
    p.add_argument("--geometry")
    p.add_argument("--q1", default="1")
    p.add_argument("--q2", default="2")
    p.add_argument("--order", type=int, default=8)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INVALID if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
