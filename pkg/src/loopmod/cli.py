"""Command-line entry point: ``loopmod <subcommand> ...``.

Exit status is 0 when every requested verification passed, 1 when a check
failed or a counterexample was found, and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import identities as idl
from . import measure as me
from .enumerate import NORMALIZED, UP_TO_ISOMORPHISM, EnumerationConfig, builtin_loop, enumerate_loops
from .errors import IdentityFails, LoopModError
from .loop import (
    LEFT,
    RIGHT,
    LoopTable,
    associativity_witness,
    deviation_family,
    format_loop,
    parse_loop,
)


class Outcome:
    def __init__(self, doc: dict, text: str, ok: bool = True):
        self.doc = doc
        self.text = text
        self.ok = ok


def load_loop(src: str) -> LoopTable:
    """Path, ``-`` for stdin, or ``builtin:NAME``."""
    if src.startswith("builtin:"):
        return builtin_loop(src[len("builtin:"):])
    if src == "-":
        return parse_loop(sys.stdin.read())
    with open(src) as fh:
        return parse_loop(fh.read())


def load_measure(src: str, n: int) -> me.Measure:
    if src == "-":
        return me.parse_measure(sys.stdin.read(), n)
    return me.read_measure(src, n)


def load_identity(args) -> idl.IdentityAst:
    if args.identity is not None:
        return idl.parse_identity(args.identity)
    if args.builtin is not None:
        return idl.builtin(args.builtin)
    raise LoopModError("give --identity or --builtin")


def fs(q: Fraction) -> str:
    return me.frac_str(q)


def witness_doc(L: LoopTable) -> dict:
    w = associativity_witness(L)
    if w.associative:
        return {"associative": True}
    return {"associative": False, "triple": list(w.triple), "left": w.left_product, "right": w.right_product}


def witness_text(d: dict) -> str:
    if d["associative"]:
        return "associative"
    a, b, c = d["triple"]
    return f"nonassociative: ({a}*{b})*{c} = {d['left']} but {a}*({b}*{c}) = {d['right']}"


def report_text(rep: me.VerificationReport) -> str:
    head = f"{rep.statement}: {'PASS' if rep.passed else 'FAIL'} ({rep.cases} cases, {rep.failure_count} failures)"
    lines = [head]
    for f in rep.failures[:10]:
        note = f" [{f.note}]" if f.note else ""
        lines.append(f"  case {f.case}: {fs(f.lhs)} != {fs(f.rhs)}{note}")
    return "\n".join(lines)


def grid_text(rows) -> str:
    cells = [[fs(v) for v in row] for row in rows]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  " + " ".join(c.rjust(width) for c in row) for row in cells)


def cmd_validate(args) -> Outcome:
    L = load_loop(args.loop)
    w = witness_doc(L)
    doc = {"command": "validate", "order": L.order, "identity": L.identity, "associativity": w}
    text = f"valid loop of order {L.order}, identity {L.identity}\n{witness_text(w)}"
    return Outcome(doc, text)


def cmd_enumerate(args) -> Outcome:
    prefix = tuple(int(v) for v in args.prefix.split(",") if v.strip()) if args.prefix else ()
    cfg = EnumerationConfig(args.order, UP_TO_ISOMORPHISM if args.iso else NORMALIZED, args.limit, prefix)
    loops: list[LoopTable] = []
    count = enumerate_loops(cfg, None if args.count_only else loops.append)
    doc = {"command": "enumerate", "order": cfg.order, "mode": cfg.mode, "count": count}
    if args.count_only:
        return Outcome(doc, str(count))
    doc["loops"] = [[list(r) for r in L.table] for L in loops]
    return Outcome(doc, "\n".join(format_loop(L) for L in loops).rstrip("\n"))


def cmd_check(args) -> Outcome:
    L = load_loop(args.loop)
    ident = load_identity(args)
    v = idl.check_identity(L, ident)
    doc = {"command": "check", "identity": str(ident), "holds": v.holds, "cases": v.cases}
    if v.holds:
        return Outcome(doc, f"{ident}: holds ({v.cases} assignments)")
    ce = v.counterexample
    doc["counterexample"] = {"assignment": ce.assignment, "lhs": ce.lhs, "rhs": ce.rhs}
    vals = ", ".join(f"{k}={x}" for k, x in ce.assignment.items())
    return Outcome(doc, f"{ident}: fails at {vals}: lhs {ce.lhs}, rhs {ce.rhs}", ok=False)


def cmd_compile(args) -> Outcome:
    ident = load_identity(args)
    lw, rw = idl.compile_identity(ident, args.point)

    def wdoc(w):
        return [{"side": s, "parameter": idl.term_str(t)} for s, t in w.factors]

    doc = {"command": "compile-identity", "identity": str(ident), "point": lw.point, "lhs": wdoc(lw), "rhs": wdoc(rw)}
    text = f"{ident}\npoint {lw.point}\nlhs: {lw}\nrhs: {rw}"
    return Outcome(doc, text)


def _sides(side: str) -> tuple[str, ...]:
    return (LEFT, RIGHT) if side == "both" else (side,)


def cocycle_section(L: LoopTable, mu: me.Measure, sides=(LEFT, RIGHT)) -> tuple[dict, str]:
    doc: dict = {"cocycles": {}, "modular_function": {}}
    parts = []
    for kind in sides:
        tab = me.cocycle_table(L, mu, kind)
        doc["cocycles"][kind] = [[fs(v) for v in row] for row in tab.entries]
        parts.append(f"{kind} cocycle [a][x]:\n{grid_text(tab.entries)}")
        mf = me.modular_function(L, mu, kind)
        if isinstance(mf, me.ModularFunction):
            md = {"exists": True, "values": [fs(v) for v in mf.values]}
            line = f"{kind} modular function: " + " ".join(fs(v) for v in mf.values)
            if mf.multiplicative is not None:
                md["multiplicative"] = mf.multiplicative.passed
                line += f" (multiplicative: {'yes' if mf.multiplicative.passed else 'no'})"
        else:
            md = {"exists": False, "witness": {"a": mf.a, "x1": mf.x1, "x2": mf.x2, "v1": fs(mf.v1), "v2": fs(mf.v2)}}
            line = (f"{kind} modular function: none, cocycle row {mf.a} varies "
                    f"({fs(mf.v1)} at {mf.x1}, {fs(mf.v2)} at {mf.x2})")
        doc["modular_function"][kind] = md
        parts.append(line)
    uni, wit = me.unimodularity_check(L, mu)
    doc["unimodular"] = {"value": uni, "witness": list(wit) if wit else None}
    parts.append("unimodular" if uni else f"not unimodular: {wit[0]} cocycle at a={wit[1]}, x={wit[2]} is not 1")
    return doc, "\n".join(parts)


def cmd_cocycle(args) -> Outcome:
    L = load_loop(args.loop)
    mu = load_measure(args.measure, L.order)
    doc, text = cocycle_section(L, mu, _sides(args.side))
    doc = {"command": "cocycle", "measure": [fs(w) for w in mu.weights], **doc}
    return Outcome(doc, text)


def deviation_section(L: LoopTable) -> tuple[dict, str]:
    fam = deviation_family(L)
    pairs = [(a, b) for a in L.elements for b in L.elements if fam[a][b].is_identity()]
    nontrivial = {f"{a},{b}": list(fam[a][b].images) for a in L.elements for b in L.elements
                  if not fam[a][b].is_identity()}
    w = witness_doc(L)
    doc = {"associativity": w, "untwisted_pairs": [list(p) for p in pairs], "nontrivial_deviations": nontrivial}
    lines = [witness_text(w), f"{len(pairs)} of {L.order ** 2} pairs have trivial deviation"]
    lines.append("untwisted pairs: " + " ".join(f"({a},{b})" for a, b in pairs))
    for key, images in nontrivial.items():
        lines.append(f"Phi[{key}] = {images}")
    return doc, "\n".join(lines)


def cmd_deviation(args) -> Outcome:
    L = load_loop(args.loop)
    doc, text = deviation_section(L)
    return Outcome({"command": "deviation", **doc}, text)


def run_verifiers(L: LoopTable, mu: me.Measure, which: list[str], ident=None, point=None) -> tuple[dict, str, bool]:
    reports: dict = {}
    texts = []
    ok = True
    for name in which:
        if name == "chain-rule":
            rep = me.chain_rule_on_loop(L, mu)
        elif name == "cocycle-relation":
            rep = me.verify_cocycle_relation(L, mu)
        elif name == "rigidity":
            rep, _ = me.rigidity_report(L, mu)
        elif name == "compat":
            try:
                rep = me.identity_compatibility(L, mu, ident, point)
            except IdentityFails as exc:
                ce = exc.verdict.counterexample
                reports[name] = {"statement": f"compatibility[{ident}]", "identity_holds": False,
                                 "counterexample": {"assignment": ce.assignment, "lhs": ce.lhs, "rhs": ce.rhs},
                                 "pass": False}
                texts.append(f"compatibility: identity {ident} fails at {ce.assignment}")
                ok = False
                continue
        else:
            raise LoopModError(f"unknown verifier {name!r}")
        reports[name] = rep.to_dict()
        texts.append(report_text(rep))
        ok = ok and rep.passed
    return reports, "\n".join(texts), ok


def cmd_verify(args) -> Outcome:
    L = load_loop(args.loop)
    mu = load_measure(args.measure, L.order)
    which = []
    if args.chain_rule:
        which.append("chain-rule")
    if args.cocycle_relation:
        which.append("cocycle-relation")
    if args.rigidity:
        which.append("rigidity")
    if args.all or not (which or args.compat):
        which = ["chain-rule", "cocycle-relation", "rigidity"]
    ident = None
    if args.compat:
        ident = load_identity(args)
        which.append("compat")
    reports, text, ok = run_verifiers(L, mu, which, ident, args.point)
    doc = {"command": "verify", "measure": [fs(w) for w in mu.weights], "reports": reports, "pass": ok}
    return Outcome(doc, text, ok)


def invariant_section(L: LoopTable, gens_spec: str | None) -> tuple[dict, str]:
    gens = me.parse_generators(L, gens_spec)
    basis = me.invariant_measure_basis(L, gens)
    doc = {"generators": [f"{'L' if s == LEFT else 'R'}{a}" for s, a in gens],
           "orbits": [list(o) for o in basis.orbits], "basis": [list(v) for v in basis.basis(L.order)]}
    lines = [f"{len(basis.orbits)} orbit(s)"] + ["  {" + ", ".join(map(str, o)) + "}" for o in basis.orbits]
    if len(basis.orbits) == 1:
        lines.append("invariant measures: uniform only")
    else:
        lines.append("invariant measures: any positive weights constant on each orbit")
    return doc, "\n".join(lines)


def cmd_invariant(args) -> Outcome:
    L = load_loop(args.loop)
    doc, text = invariant_section(L, args.generators)
    return Outcome({"command": "invariant-measures", **doc}, text)


def cmd_report(args) -> Outcome:
    L = load_loop(args.loop)
    mu = load_measure(args.measure, L.order)
    cdoc, ctext = cocycle_section(L, mu)
    ddoc, dtext = deviation_section(L)
    idoc, itext = invariant_section(L, None)
    reports, vtext, ok = run_verifiers(L, mu, ["chain-rule", "cocycle-relation", "rigidity"])
    identities = {}
    for name in idl.BUILTINS:
        identities[name] = idl.check_identity(L, idl.builtin(name)).holds
    doc = {
        "command": "report",
        "order": L.order,
        "identity": L.identity,
        "measure": [fs(w) for w in mu.weights],
        **cdoc,
        "deviation": ddoc,
        "invariant_measures": idoc,
        "identities": identities,
        "reports": reports,
        "pass": ok,
    }
    ident_text = "\n".join(f"  {k}: {'holds' if v else 'fails'}" for k, v in identities.items())
    text = "\n\n".join([
        f"loop of order {L.order}, identity {L.identity}",
        ctext, dtext, itext, "identities:\n" + ident_text, vtext,
    ])
    return Outcome(doc, text, ok)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loopmod", description="Modular cocycles and identities on finite loops.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="structured output")
        sp.set_defaults(func=func)
        return sp

    def ident_args(sp, required=True):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--identity", help='identity in the DSL, e.g. "(x*y)*z = x*(y*z)"')
        g.add_argument("--builtin", choices=sorted(idl.BUILTINS))

    loop_help = "loop table file, '-' for stdin, or builtin:NAME"

    sp = add("validate", cmd_validate, "validate a loop table")
    sp.add_argument("loop", help=loop_help)

    sp = add("enumerate", cmd_enumerate, "enumerate loops of a given order")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--iso", action="store_true", help="one representative per isomorphism class")
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--limit", type=int)
    sp.add_argument("--prefix", help="comma-separated entries of row 1 starting at column 1")

    sp = add("check", cmd_check, "check an identity by exhaustive assignment")
    ident_args(sp)
    sp.add_argument("loop", help=loop_help)

    sp = add("compile-identity", cmd_compile, "compile both sides into translation words")
    ident_args(sp)
    sp.add_argument("--point", help="point variable (default: last variable linear on both sides)")

    sp = add("cocycle", cmd_cocycle, "modular cocycle tables")
    sp.add_argument("loop", help=loop_help)
    sp.add_argument("--measure", required=True, help="measure file or 'uniform'")
    sp.add_argument("--side", choices=["left", "right", "both"], default="both")

    sp = add("deviation", cmd_deviation, "deviation maps and untwisted pairs")
    sp.add_argument("loop", help=loop_help)

    sp = add("verify", cmd_verify, "run measure verifiers")
    sp.add_argument("loop", help=loop_help)
    sp.add_argument("--measure", required=True, help="measure file or 'uniform'")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--chain-rule", action="store_true")
    sp.add_argument("--cocycle-relation", action="store_true")
    sp.add_argument("--rigidity", action="store_true")
    sp.add_argument("--compat", action="store_true", help="identity compatibility (needs --builtin or --identity)")
    ident_args(sp, required=False)
    sp.add_argument("--point")

    sp = add("invariant-measures", cmd_invariant, "orbit partition of invariant measures")
    sp.add_argument("loop", help=loop_help)
    sp.add_argument("--generators", help="left (default), right, all, or a list like L0,R2")

    sp = add("report", cmd_report, "full structural report")
    sp.add_argument("loop", help=loop_help)
    sp.add_argument("--measure", required=True, help="measure file or 'uniform'")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except (LoopModError, OSError) as exc:
        if getattr(args, "json", False):
            print(json.dumps({"command": args.command, "error": type(exc).__name__, "message": str(exc)}, indent=2))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        out.doc["exit_status"] = 0 if out.ok else 1
        print(json.dumps(out.doc, indent=2))
    else:
        print(out.text)
    return 0 if out.ok else 1


if __name__ == "__main__":
    sys.exit(main())
