"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 invalid homomorphism, 4 verification
failure, 5 violated hypothesis (infinite bound entry, unsupported prime,
oracle cap).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bounds as B
from . import cohomology as H
from . import construction as C
from . import fpgroup as F
from . import homomorph as M

EXIT_OK, EXIT_PARSE, EXIT_INVALID_HOM, EXIT_VERIFY, EXIT_HYPOTHESIS = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str, report: dict | None = None):
        super().__init__(message)
        self.code = code
        self.report = report


def _registry(args, p: int | None = None) -> dict:
    if args.blocks:
        return C.load_registry(args.blocks)
    return C.standard_registry(p or args.p)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"{path}: invalid JSON: {exc}") from None


def _enc(v):
    return "inf" if v == B.INF else v


def _dump(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = []
    for k in sorted(report):
        v = report[k]
        lines.append(f"{k:24} {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> dict:
    c = C.parse(args.construction, _registry(args))
    tuples = C.principal_tuples(c)
    return {
        "construction": c.to_text(),
        "p": c.prime,
        "extension_rank": C.extension_rank(c),
        "principal_tuples": [
            {"root": C.path_str(t.root), "root_block": c.node(t.root).block.id,
             "rank": t.rank, "z": t.z_generators()}
            for t in tuples
        ],
        "generators": len(c.generators()),
        "relations": len(c.relations()),
        "subconstructions": sum(1 for _ in C.subconstructions(c)),
    }


def cmd_lvalue(args) -> dict:
    spec = args.group
    report = {"group": spec}
    try:
        G = F.group_from_spec(spec, cap=args.cap)
        order, witness = F.max_abelian_order(G, cap=args.cap, threads=args.threads)
        report["group"] = G.spec
        report["order"] = G.order
        report["l"] = F.l_value(G, cap=args.cap, threads=args.threads)
        report["witness"] = witness.to_json()
        report["bound_only"] = False
    except F.GroupTooLarge:
        G = None
        report["bound_only"] = True
    kind_spec = G.spec if G is not None else _spec_dict(spec)
    kind, m = kind_spec.get("kind"), kind_spec.get("m")
    if kind == "um":
        report["analytic_exponent"] = F.goozeff_barry_exponent(m)
        if not report["bound_only"]:
            report["matches_analytic"] = report["l"] == F.goozeff_barry_exponent(m)
    elif kind == "ubar":
        report["lemma_bound"] = F.lemma_bound_ubar(m)
        if not report["bound_only"]:
            report["within_lemma_bound"] = report["l"] <= F.lemma_bound_ubar(m)
            report["equals_lemma_bound"] = report["l"] == F.lemma_bound_ubar(m)
    return report


def _spec_dict(spec: str) -> dict:
    s = spec.strip()
    if ":" in s and not s.startswith("{"):
        kind, a = s.split(":", 1)
        x, p = (int(v) for v in a.split(","))
        return {"kind": kind, "m": x, "p": p}
    return json.loads(s) if s.startswith("{") else _read_json(s)


def _load_hom(path: str, cap: int) -> M.Hom:
    obj = _read_json(path)
    return M.hom_from_json(obj, cap=cap)


def cmd_factor(args) -> dict:
    rho = _load_hom(args.hom, args.cap)
    cert = M.factor_full(rho, cap=args.cap, threads=args.threads)
    out = cert.to_json()
    if args.cert:
        with open(args.cert, "w", encoding="utf-8") as fh:
            json.dump(out, fh, sort_keys=True, indent=2)
            fh.write("\n")
        return {
            "certificate": args.cert,
            "stages": len(cert.stages),
            "final_construction": out["final"]["construction"],
            "final_extension_rank": out["final"]["extension_rank"],
            "l": cert.l,
        }
    return out


def cmd_verify(args) -> dict:
    try:
        obj = _read_json(args.cert)
    except CliError as exc:
        raise CliError(EXIT_VERIFY, str(exc)) from None
    problems = M.verify_certificate(obj, cap=args.cap) if isinstance(obj, dict) else ["not an object"]
    report = {"certificate": args.cert, "ok": not problems, "problems": problems}
    if problems:
        raise CliError(EXIT_VERIFY, "verification failed", report)
    return report


def _table(args, c=None) -> B.BoundTable:
    if args.blocks:
        return B.class_table(C.load_registry(args.blocks).values())
    if c is not None:
        return B.class_table(c.blocks())
    return B.standard_table(args.p, include_sign_block=args.sign)


def cmd_bounds(args) -> dict:
    n = args.n
    if args.construction:
        c = C.parse(args.construction, _registry(args))
        table = _table(args, c)
        bad = [m for m in range(2, n + 1) if table[m] == B.INF]
        if bad:
            raise CliError(EXIT_HYPOTHESIS, f"bound table is infinite in degrees {bad}")
        e = C.extension_rank(c)
        return {"construction": c.to_text(), "n": n, "e": e,
                "f_value": _enc(B.construction_bound(c, n, table)),
                "table": table.to_json(), "mode": "construction"}
    if not args.group:
        raise CliError(EXIT_PARSE, "bounds needs --group or a construction")
    G = F.group_from_spec(args.group, cap=args.cap)
    table = _table(args)
    l_override = None
    mode = "exact_l"
    if not args.exact_l and G.spec.get("kind") == "ubar":
        l_override = F.lemma_bound_ubar(G.spec["m"])
        mode = "lemma_bound"
    value = B.uniform_bound(G, n, table, l_override, cap=args.cap, threads=args.threads)
    l = l_override if l_override is not None else F.l_value(G, cap=args.cap, threads=args.threads)
    return {"group": G.spec, "n": n, "l": l, "f_value": _enc(value),
            "table": table.to_json(), "mode": mode}


def cmd_massey(args) -> dict:
    report = {"m": args.m, "p": args.p,
              "lemma_bound": B.massey_symbol_bound(args.m, args.p, "lemma_bound")}
    if args.exact_l:
        v = B.massey_symbol_bound(args.m, args.p, "exact_l", cap=args.cap, threads=args.threads)
        report["exact_l_bound"] = v
        report["exact_within_lemma"] = v <= report["lemma_bound"]
    return report


def cmd_oracle(args) -> dict:
    c = C.parse(args.construction, _registry(args))
    ring = H.ring_of(c)
    caps = {"state_cap": args.state_cap}
    ms = H.max_syml(ring, **caps)
    bound = B.construction_bound(c, 2)
    report = {"construction": c.to_text(), "p": ring.p, "d1": ring.d1, "d2": ring.d2,
              "e": C.extension_rank(c), "max_syml": _enc(ms), "f_bound": _enc(bound),
              "pass": ms <= bound}
    if args.omega is not None:
        omega = [int(x) for x in args.omega.split(",")] if args.omega else []
        if len(omega) != ring.d2:
            raise CliError(EXIT_PARSE, f"omega must have {ring.d2} coordinates")
        report["omega"] = omega
        report["syml"] = _enc(H.syml_exact(ring, omega, **caps))
    if args.ring:
        report["ring"] = ring.to_json()
    return report


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="elemtype", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=3, help="prime for the standard block registry")
    common.add_argument("--blocks", help="block registry JSON file")
    common.add_argument("--cap", type=int, default=F.DEFAULT_CAP, help="group size / search cap")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("json", "table"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", parents=[common], help="extension rank and principal tuples")
    s.add_argument("construction")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("lvalue", parents=[common], help="largest abelian subgroup of a p-group")
    s.add_argument("--group", required=True)
    s.set_defaults(func=cmd_lvalue)

    s = sub.add_parser("factor", parents=[common], help="factor a homomorphism, emit a certificate")
    s.add_argument("--hom", required=True)
    s.add_argument("--cert", help="write the certificate here instead of stdout")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    s.add_argument("--cert", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bounds", parents=[common], help="f(e, n) and uniform bounds")
    s.add_argument("construction", nargs="?")
    s.add_argument("--group")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--sign", action="store_true", help="include the sign block (p = 2)")
    s.add_argument("--exact-l", action="store_true", dest="exact_l")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("massey", parents=[common], help="symbol-length bound for Massey classes")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--exact-l", action="store_true", dest="exact_l")
    s.set_defaults(func=cmd_massey)

    s = sub.add_parser("oracle", parents=[common], help="exact symbol lengths in degree 2")
    s.add_argument("construction")
    s.add_argument("--omega", help="comma-separated H^2 coordinates")
    s.add_argument("--ring", action="store_true", help="include the cup table")
    s.add_argument("--state-cap", type=int, default=H.STATE_CAP, dest="state_cap")
    s.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    if args.cap < 1 or args.threads < 1:
        print("error: --cap and --threads must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = args.func(args)
    except CliError as exc:
        if exc.report is not None:
            print(_dump(exc.report, args.format))
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except M.InvalidHom as exc:
        print(_dump({"ok": False, "violations": exc.violations}, args.format))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_HOM
    except (B.HypothesisViolation, H.OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (C.ConstructionError, F.GroupError, M.HomError, B.BoundsError,
            json.JSONDecodeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(_dump(report, args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
