"""Command-line front end.

Exit status: 0 on success, 2 when a certificate or check fails verification,
1 on usage, parse or ring errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import banded, ringscan
from .certificates import dumps, loads, verify_certificate
from .decompose import clean_decompose, fitting_strategy, nilgood_clean_decompose, nilgood_decompose
from .errors import NilgoodError, ParseError
from .matrix import Matrix, parse_matrix
from .rings import RingSpec

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_matrix(args) -> Matrix:
    ring = RingSpec.parse(args.ring) if args.ring else None
    if args.matrix is not None:
        if ring is None:
            raise ParseError("--matrix needs --ring")
        rows = [r.split() for r in args.matrix.split(";") if r.strip()]
        text = f"ring {ring}\ndim {len(rows)}\n" + "\n".join(" ".join(r) for r in rows)
        return parse_matrix(text)
    if args.input is None:
        raise ParseError("no input matrix (give a file, '-' or --matrix)")
    return parse_matrix(_read(args.input), ring)


def _print_summands(cert, out) -> None:
    print(f"{cert.kind} certificate over {cert.U.ring} (strategy {cert.strategy})", file=out)
    for name in ("N", "E", "U"):
        if hasattr(cert, name):
            print(f"{name} =", file=out)
            print(getattr(cert, name).pretty(), file=out)
    if hasattr(cert, "nil_exponent"):
        print(f"nil exponent: {cert.nil_exponent}", file=out)
    if cert.route:
        print(f"route: {', '.join(cert.route)}", file=out)


def cmd_decompose(args, out) -> int:
    A = _load_matrix(args)
    if args.strategy == "canonical":
        cert = nilgood_decompose(A, nilpotent_shortcut=not args.no_nilpotent_shortcut)
    elif args.strategy == "fitting":
        cert = fitting_strategy(A)
    elif args.strategy == "clean":
        cert = clean_decompose(A)
    else:
        cert = nilgood_clean_decompose(A, args.via)
    if args.json:
        out.write(dumps(cert))
    else:
        _print_summands(cert, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    cert = loads(_read(args.certificate))
    A = parse_matrix(_read(args.input))
    result = verify_certificate(A, cert)
    if args.json:
        json.dump({"ok": result.ok, "clause": result.clause, "detail": result.detail}, out)
        out.write("\n")
    elif result:
        print("verified", file=out)
    else:
        print(f"FAILED clause {result.clause}: {result.detail}", file=out)
    return EXIT_OK if result else EXIT_FAILED


SCAN_CHECKS = ("profile", "section4", "nilgood", "clean", "nilgood-clean", "radical")


def cmd_scan(args, out) -> int:
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in checks if c not in SCAN_CHECKS]
    if unknown:
        raise ParseError(f"unknown check {unknown[0]!r}; choose from {', '.join(SCAN_CHECKS)}")
    prof = ringscan.profile(args.ring, budget=args.budget)
    report: dict = {"ring": prof.description}
    failed = False
    for c in checks:
        if c == "profile":
            report["profile"] = prof.summary()
        elif c == "section4":
            r = ringscan.check_section4(prof)
            report["section4"] = {"facts": r.facts, "violations": list(r.violations), "notes": list(r.notes)}
            failed |= not r.ok
        elif c == "radical":
            cross = ringscan.jacobson_via_left_ideals(prof.ring)
            agree = bool((cross == prof.radical_mask).all())
            report["radical"] = {"elements": int(prof.radical_mask.sum()), "left_ideal_cross_check": agree}
            failed |= not agree
        else:
            fn = {
                "nilgood": ringscan.is_nilgood_ring,
                "clean": ringscan.is_clean_ring,
                "nilgood-clean": ringscan.is_nilgood_clean_ring,
            }[c]
            v = fn(prof)
            entry = {"holds": v.holds}
            if not v.holds:
                entry["counterexample"] = v.counterexample
            report[c] = entry
    if args.json:
        json.dump(report, out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        for key, value in report.items():
            print(f"{key}: {value}", file=out)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_classify(args, out) -> int:
    rows = ringscan.classify_zmod(args.limit)
    out.write(ringscan.classify_tsv(rows))
    return EXIT_OK if all(r.agrees for r in rows) else EXIT_FAILED


def cmd_banded_demo(args, out) -> int:
    if args.input:
        M = banded.parse_banded(_read(args.input))
    else:
        ring = RingSpec.parse(args.ring or "gf(3)")
        M = banded.random_banded(ring, args.bandwidth, random.Random(args.seed))
    witness = banded.exchange_witness(args.witness)
    dec = banded.banded_nilgood_clean(M, args.blocks)
    if args.json:
        json.dump(
            {
                "ring": str(M.ring),
                "bandwidth": M.bandwidth,
                "blocks": args.blocks,
                "A": dec.A.to_text(),
                "U": dec.U.to_text(),
                "E": dec.E.to_text(),
                "N": dec.N.to_text(),
                "witness_size": args.witness,
                "witness_bandwidth": banded.lower_bandwidth(witness),
            },
            out,
            indent=2,
        )
        out.write("\n")
    else:
        print(f"inverse of the {args.witness}x{args.witness} bidiagonal truncation "
              f"(lower bandwidth {banded.lower_bandwidth(witness)}):", file=out)
        print(witness.pretty(), file=out)
        print(f"\n{dec.size}x{dec.size} truncation A = U + E + N over {M.ring}:", file=out)
        for name in ("A", "U", "E", "N"):
            print(f"{name} =", file=out)
            print(getattr(dec, name).pretty(), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nilgood", description="Nil-good and clean matrix decompositions with verifiable certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decompose", help="decompose a matrix and print a certificate")
    d.add_argument("input", nargs="?", help="matrix file, or '-' for stdin")
    d.add_argument("--matrix", help="inline rows separated by ';', e.g. '0 0; 1 0'")
    d.add_argument("--ring", help="ring spec: gf(p), zmod(m) or rational")
    d.add_argument("--strategy", choices=("canonical", "fitting", "clean", "nil-good-clean"), default="canonical")
    d.add_argument("--via", choices=("canonical", "fitting", "clean"), default="canonical",
                   help="engine used by --strategy nil-good-clean")
    d.add_argument("--no-nilpotent-shortcut", action="store_true",
                   help="send nonzero nilpotent input through block surgery")
    d.add_argument("--json", action="store_true")
    d.add_argument("--seed", type=int, default=0, help="accepted for uniformity; decomposition is deterministic")
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="re-check a certificate against a matrix")
    v.add_argument("certificate")
    v.add_argument("input")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    for name in ("scan", "ringscan"):
        s = sub.add_parser(name, help="brute-force checks on a small finite ring")
        s.add_argument("--ring", required=True, help="zmod(n), zmod:n, matrix(k,zmod(n)) or matrix:k:n")
        s.add_argument("--checks", default="profile,section4,nilgood,clean,nilgood-clean")
        s.add_argument("--budget", type=int, default=ringscan.DEFAULT_BUDGET)
        s.add_argument("--json", action="store_true")
        s.set_defaults(func=cmd_scan)

    b = sub.add_parser("banded-demo", help="banded truncations: exchange witness and nil-good clean split")
    b.add_argument("input", nargs="?", help="banded generator file")
    b.add_argument("--ring", help="ring for a random generator (default gf(3))")
    b.add_argument("--bandwidth", type=int, default=1)
    b.add_argument("--blocks", type=int, default=2)
    b.add_argument("--witness", type=int, default=6)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_banded_demo)

    c = sub.add_parser("classify", help="nil-good verdict for Z/n, n <= limit (TSV)")
    c.add_argument("--limit", type=int, default=64)
    c.set_defaults(func=cmd_classify)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (NilgoodError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
