"""Command-line front end.

Every command builds a JSON report; the human-readable output is a
rendering of that report.  Exit codes: 0 when every non-partial check
passes, 1 on a checked failure, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus as _corpus
from .biderivation import IllDefinedTable, bidifferential_witness, poisson_report
from .exactpoly import ParseError, format_element
from .extend import (
    ExtensionError, NoetherData, NoetherError, NotBidifferential, NotDominant,
    extend_algebraic, extend_localisation, extend_transcendental, find_noether_data, theorem_tensor,
    with_canonical_bracket,
)
from .geometry import (
    NotOnVariety, WitnessError, b_point_witness, bidifferential_core, core_zero_certificate,
    dme_report, fibre_image_reduction, fibre_over_point, generic_b_fibre,
)
from .ideals import IdealHandle
from .reports import FAIL, PARTIAL, PASS, Check, render_tensor
from .systems import (
    REPORT_VERSION, SystemError_, canonical_json, digest, load_config, load_system,
    morphism, parse_map, system_to_dict,
)


class UsageError(Exception):
    pass


def _ideal(system, text):
    alg = system.algebra
    try:
        gens = [alg.poly(g) for g in text.split(",") if g.strip()]
    except (ParseError, KeyError, ValueError) as exc:
        raise UsageError(f"bad ideal {text!r}: {exc}") from None
    return IdealHandle(alg.ring, gens)


def _point(text):
    try:
        return parse_map(text)
    except SystemError_ as exc:
        raise UsageError(str(exc)) from None


def _noether(arg, system, cfg):
    if arg:
        try:
            data = json.loads(arg)
        except json.JSONDecodeError:
            return NoetherData([y for y in arg.split(",") if y.strip()])
        return NoetherData(data.get("y_list", []), data.get("b_list", []), data.get("minpolys", []))
    if system.noether is not None:
        return system.noether
    return find_noether_data(system.algebra, retries=cfg["noether_retries"])


def _witness_check(table, ideal, name, anchor):
    w = bidifferential_witness(table, ideal)
    if w is None:
        return Check(name, PASS, [], "", anchor)
    g, z, slot, val = w
    br = f"{{{g}, {z}}}" if slot == "left" else f"{{{z}, {g}}}"
    text = render_tensor(format_element(val))
    return Check(name, FAIL, [text], render_tensor(f"{br} = {format_element(val)}"), anchor)


# commands


def cmd_check(args, cfg):
    sysm = load_system(args.file, validate=False)
    B = sysm.table
    rep = B.well_defined
    checks = [Check("table well defined", PASS if rep.passed else FAIL,
                    [format_element(f[3]) for f in rep.failures],
                    "; ".join(f"{f[2]} bracket of {f[0]} with {f[1]}" for f in rep.failures), "well-defined")]
    pr = poisson_report(B)
    reasons = "; ".join(" ".join(map(str, f)) for f in pr.failures)
    checks.append(Check("Poisson", PASS if pr.passed else PARTIAL, [], reasons, "poisson"))
    for text in args.ideal or []:
        checks.append(_witness_check(B, _ideal(sysm, text), f"ideal ({text}) bidifferential", "ideal-check"))
    return {"checks": checks, "inputs": [sysm.raw]}


def cmd_extend(args, cfg):
    sysm = load_system(args.file)
    B = sysm.table
    extra = {}
    if args.mode == "localise":
        if not args.element:
            raise UsageError("--element is required for localise")
        out = extend_localisation(B, args.element)
    elif args.mode == "algebraic":
        if not (args.var and args.minpoly):
            raise UsageError("--var and --minpoly are required for algebraic")
        out, f = extend_algebraic(B, args.var, args.minpoly, base=args.base)
        extra["f"] = str(f)
    else:
        if not args.var:
            raise UsageError("--var is required for transcendental")
        D = parse_map(args.D) if args.D else {}
        E = parse_map(args.E) if args.E else {}
        out = extend_transcendental(B, D, E, args.var, base=args.base)
    step = out.history[-1]
    checks = [Check(f"{args.mode} extension", PASS, [], canonical_json(step), "extension")]
    forced = {k: v for k, v in out.to_strings().items() if args.var and args.var in k.split(",")}
    extra["forced"] = forced
    emitted = system_to_dict(out, f"{sysm.name}+{args.mode}")
    return {"checks": checks, "inputs": [sysm.raw], "emitted": emitted, "extra": extra}


def cmd_tensor(args, cfg):
    R, S = load_system(args.file_r), load_system(args.file_s)
    images = parse_map(args.iota) if args.iota else {v: v for v in S.algebra.vars}
    iota = morphism(S.algebra, R.algebra, images)
    noether = _noether(args.noether, S, cfg)
    T = theorem_tensor(R.table, S.table, iota, noether)
    if args.canonical:
        T = with_canonical_bracket(T)
    checks = list(T.report.checks)
    emitted = system_to_dict(T.table, f"{R.name}⊗{S.name}")
    extra = {"f": str(T.f), "diagonal": [render_tensor(str(g)) for g in T.diagonal.generators],
             "noether": {"y_list": list(noether.y_list), "b_list": list(noether.b_list)}}
    return {"checks": checks, "inputs": [R.raw, S.raw], "emitted": emitted, "extra": extra}


def cmd_fibre(args, cfg):
    X, Y = load_system(args.file_x), load_system(args.file_y)
    images = parse_map(args.phi) if args.phi else {}
    phi = morphism(Y.algebra, X.algebra, images)
    if args.concrete_point is not None:
        pt = _point(args.concrete_point) if "=" in args.concrete_point else dict(
            zip([v for v in Y.algebra.vars if v not in Y.algebra.base_vars], args.concrete_point.split(",")))
        pw = b_point_witness(Y.table, pt)
        checks = [Check("point is a B-point of the base", PASS if pw is None else FAIL, [], "", "b-point"),
                  _witness_check(X.table, fibre_over_point(phi, pt), "concrete fibre is a B-subvariety",
                                 "concrete-fibre")]
        return {"checks": checks, "inputs": [X.raw, Y.raw]}
    noether = _noether(args.noether, Y, cfg)
    extra = {}
    if args.dme:
        d = args.dme[0]
        cap = args.dme[1] if len(args.dme) > 1 else cfg["core_cap"]
        rep = fibre_image_reduction(phi, X.table, Y.table, noether, d, cap)
        fib = rep.fibre
        extra["probes"] = {"base_rational": str(rep.base_rational),
                           "base_locally_closed": str(rep.base_locally_closed),
                           "fibre_rational": render_tensor(str(rep.fibre_rational)),
                           "fibre_locally_closed": str(rep.fibre_locally_closed)}
    else:
        fib = generic_b_fibre(phi, X.table, Y.table, noether)
    checks = [Check(k, PASS if v else FAIL, [fib.witnesses[k]] if k in fib.witnesses else [], "",
                    "generic-fibre") for k, v in sorted(fib.flags.items())]
    extra["fibre_ideal"] = [render_tensor(str(g)) for g in fib.fibre_ideal.generators]
    extra["base_field"] = fib.base_field
    return {"checks": checks, "inputs": [X.raw, Y.raw], "extra": extra}


def cmd_core(args, cfg):
    sysm = load_system(args.file)
    B = sysm.table
    cap = args.cap or cfg["core_cap"]
    core = bidifferential_core(B, _ideal(sysm, args.ideal), cap)
    status = PASS if core.exact else PARTIAL
    checks = [Check("bidifferential core", status, [str(g) for g in core.ideal.basis],
                    f"{core.status}({core.iterations})", "core")]
    if args.point:
        cert = core_zero_certificate(B, _point(args.point))
        checks.append(Check("zero-core certificate", PASS if cert.certified else PARTIAL, [], cert.reason,
                            "core-certificate"))
    return {"checks": checks, "inputs": [sysm.raw],
            "extra": {"trace": [[str(g) for g in I.basis] for I in core.trace]}}


def cmd_dme(args, cfg):
    sysm = load_system(args.file)
    B = sysm.table
    P = _ideal(sysm, args.ideal or "")
    witnesses = [_ideal(sysm, w) for w in args.witness or []] or sysm.witnesses
    d = cfg["darboux_degree"] if args.darboux is None else args.darboux
    cd = cfg["constants_degree"] if args.constants is None else args.constants
    rep = dme_report(B, P, _point(args.point), witnesses, d, cd, args.cap or cfg["core_cap"])
    lc, pr, ra = rep.locally_closed, rep.primitive, rep.rational
    lstat = {"WitnessChecked": PASS, "Failed": FAIL}.get(lc.kind, PARTIAL)
    pstat = PASS if pr.kind == "CertifiedZeroCore" or (pr.kind == "CoreStabilized" and pr.equals_P) else PARTIAL
    rstat = FAIL if ra.kind == "Witness" else PARTIAL
    checks = [
        Check("B-locally-closed", lstat, lc.darboux_found_outside, f"{lc.kind}; {lc.caveat}; {lc.assumes}",
              "locally-closed"),
        Check("B-primitive", pstat, [], f"{pr}; {pr.assumes}", "primitive"),
        Check("B-rational", rstat, [format_element(ra.witness)] if ra.witness is not None else [],
              f"{ra}; {ra.assumes}", "rational"),
    ]
    return {"checks": checks, "inputs": [sysm.raw], "extra": {"flags": rep.flags,
            "darboux_overflow": lc.darboux_overflow}}


def cmd_corpus(args, cfg):
    if args.list:
        return {"checks": [], "inputs": [], "extra": {"entries": _corpus.names()}}
    results = _corpus.run_corpus(only=args.only)
    checks, entries = [], []
    for name, cs in results:
        ok = all(c.status == PASS for c in cs)
        entries.append({"entry": name, "status": PASS if ok else FAIL})
        checks.extend(Check(f"{name}: {c.name}", c.status, c.witness, c.detail, c.anchor) for c in cs)
    return {"checks": checks, "inputs": [_corpus.SYSTEMS],
            "extra": {"entries": entries, "matched": f"{sum(e['status'] == PASS for e in entries)}/{len(entries)}"}}


COMMANDS = {"check": cmd_check, "extend": cmd_extend, "tensor": cmd_tensor, "fibre": cmd_fibre,
            "core": cmd_core, "dme": cmd_dme, "corpus": cmd_corpus}


def _count(text, least=0):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < least:
        raise argparse.ArgumentTypeError(f"must be at least {least}")
    return n


def _positive(text):
    return _count(text, 1)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON config file (default $BIDERIVE_CONFIG)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the emitted system here")
    p = argparse.ArgumentParser(prog="biderive", description="Bidifferential algebra toolkit",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    c = sub.add_parser("check", help="well-definedness, Poisson status and ideal checks")
    c.add_argument("file")
    c.add_argument("--ideal", action="append", help="comma-separated generators")

    e = sub.add_parser("extend", help="localise or adjoin a generator")
    e.add_argument("file")
    e.add_argument("--mode", choices=["localise", "algebraic", "transcendental"], required=True)
    e.add_argument("--element")
    e.add_argument("--var")
    e.add_argument("--minpoly")
    e.add_argument("--D", help="z=value pairs for {z, t}")
    e.add_argument("--E", help="w=value pairs for {t, w}")
    e.add_argument("--base", action="store_true", help="the new generator is a scalar")

    t = sub.add_parser("tensor", help="bracket on R ⊗ S_f")
    t.add_argument("file_r")
    t.add_argument("file_s")
    t.add_argument("--iota", help="s=image pairs (default identity)")
    t.add_argument("--noether", help="JSON Noether data or comma-separated y list")
    t.add_argument("--canonical", action="store_true", help="use the canonical bracket instead")

    f = sub.add_parser("fibre", help="generic B-fibre of a dominant B-morphism X -> Y")
    f.add_argument("file_x")
    f.add_argument("file_y")
    f.add_argument("--phi", help="y=image pairs")
    f.add_argument("--noether")
    f.add_argument("--dme", type=_count, nargs="+", metavar="N", help="probe bound d [cap]")
    f.add_argument("--concrete-point", help="check the fibre over this point instead")

    k = sub.add_parser("core", help="bidifferential core of an ideal")
    k.add_argument("file")
    k.add_argument("--ideal", required=True)
    k.add_argument("--cap", type=_positive)
    k.add_argument("--point", help="z=value pairs for the zero-core certificate")

    d = sub.add_parser("dme", help="locally-closed, primitive and rational probes")
    d.add_argument("file")
    d.add_argument("--ideal", default="")
    d.add_argument("--point", required=True)
    d.add_argument("--witness", action="append")
    d.add_argument("--darboux", type=_count)
    d.add_argument("--constants", type=_count)
    d.add_argument("--cap", type=_positive)

    o = sub.add_parser("corpus", help="run the bundled examples")
    o.add_argument("--list", action="store_true")
    o.add_argument("--only", action="append")
    return p


def exit_code(checks):
    return 1 if any(c.status == FAIL for c in checks) else 0


def make_report(command, result, cfg):
    checks = result["checks"]
    report = {
        "version": REPORT_VERSION,
        "command": command,
        "inputs_digest": digest(result.get("inputs", [])),
        "config": cfg,
        "outcomes": [c.to_json() for c in checks],
        "exit_code": exit_code(checks),
    }
    if "extra" in result:
        report["extra"] = result["extra"]
    if "emitted" in result:
        report["system"] = result["emitted"]
    return report


def render(report):
    lines = [f"biderive {report['command']}"]
    for o in report["outcomes"]:
        line = f"  [{o['status'].upper()}] {o['check']}"
        if o["detail"]:
            line += f": {o['detail']}"
        if o["witness"] and o["status"] != PASS:
            line += f"  witness: {', '.join(o['witness'])}"
        lines.append(line)
    for k, v in sorted(report.get("extra", {}).items()):
        lines.append(f"  {k}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}")
    if "system" in report:
        lines.append("  system: " + json.dumps(report["system"], sort_keys=True, ensure_ascii=False))
    lines.append(f"exit {report['exit_code']}")
    return "\n".join(lines)


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    for name, default in (("json", False), ("config", None), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        cfg = load_config(args.config)
        result = COMMANDS[args.command](args, cfg)
    except (UsageError, SystemError_, ParseError, IllDefinedTable, NoetherError, NotOnVariety,
            WitnessError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NotDominant, NotBidifferential, ExtensionError) as exc:
        report = make_report(args.command, {"checks": [Check(args.command, FAIL, [], str(exc), "precondition")]},
                             load_config(args.config))
        print(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) if args.json else render(report),
              file=stdout)
        return 1
    report = make_report(args.command, result, cfg)
    if args.out and "system" in report:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report["system"], fh, sort_keys=True, indent=2, ensure_ascii=False)
            fh.write("\n")
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False), file=stdout)
    else:
        print(render(report), file=stdout)
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
