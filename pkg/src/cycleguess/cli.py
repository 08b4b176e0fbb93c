"""Command-line front end.

Exit codes: 0 success, 2 usage error (including unreadable files), 3 budget refusal, 4 infeasible or timed out
(partial results are still printed, labelled as intervals or lower bounds).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import confusion, entropy, funclass, indexcode, protocol, report
from .config import RunConfig
from .core import BudgetExceeded, UsageError, factorize, format_colouring, parse_colouring

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INEXACT = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--budget", dest="enumeration_budget", default=None, help="max candidate colourings to enumerate")
    g.add_argument("--timeout", dest="solver_time_budget_s", default=None, help="solver time budget in seconds")
    g.add_argument("--explicit-budget", dest="explicit_budget", default=None, help="max confusion-graph vertices")
    g.add_argument("--tolerance", default=None)
    g.add_argument("--seed", default=None)
    g.add_argument("--threads", default=None)
    g.add_argument("--format", dest="output_format", choices=["text", "structured"], default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="cycleguess", description="Guessing games and index codes on cycles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fcp", parents=[common], help="build the fractional-clique-partition protocol")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--out", help="write the protocol file here")
    p.add_argument("--fixed-out", help="write the fixed set here, one colouring per line")

    p = sub.add_parser("rounddown", parents=[common], help="fcp on m^2 colours restricted to m^2 - t")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("entropy", parents=[common], help="entropy report and lemma audit for a protocol file")
    p.add_argument("protocol_file")
    p.add_argument("--summary-only", action="store_true", help="omit individual inequality records")

    p = sub.add_parser("classify", parents=[common], help="classify a local function Z_s^2 -> Z_s")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", help="s rows of s integers")
    src.add_argument("--builtin", choices=["xor", "xnor", "proj", "pi", "zero"])
    src.add_argument("--exhaustive", action="store_true", help="classify every function (s <= 2)")
    p.add_argument("--s", type=int)
    p.add_argument("--z", type=int, help="also report L(f,z) and R(f,z)")

    p = sub.add_parser("constants", parents=[common], help="eps, delta_1, delta_2, delta, N for s in {2,3}")
    p.add_argument("--s", type=int, required=True)

    p = sub.add_parser("confusion", parents=[common], help="alpha / chi of a confusion graph")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--graph", help="edge-list file")
    g.add_argument("--cycle", type=int, metavar="N")
    g.add_argument("--complete", type=int, metavar="N")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--alpha", action="store_true")
    p.add_argument("--chi", action="store_true")
    p.add_argument("--witness-out", help="write the independent-set witness here")

    p = sub.add_parser("index", parents=[common], help="broadcast index code on odd cycles")
    p.add_argument("action", choices=["encode", "decode", "roundtrip", "size"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--colouring", help="comma-separated colours (encode)")
    p.add_argument("--packed", action="store_true", help="broadcast as a packed integer")
    p.add_argument("--message", help="broadcast: packed integer or comma-separated residues (decode)")
    p.add_argument("--vertex", type=int, help="receiver index, 1-based (decode)")
    p.add_argument("--left", type=int, help="colour of the receiver's left neighbour")
    p.add_argument("--right", type=int, help="colour of the receiver's right neighbour")
    return parser


# -- subcommands ----------------------------------------------------------------------------


def cmd_fcp(args, cfg: RunConfig):
    p = protocol.build_fcp(args.n, args.s)
    fs = protocol.enumerate_fixed_set(p, cfg.enumeration_budget, cfg.threads)
    space = p.space
    expected = protocol.fcp_fixed_count(args.n, args.s)
    doc = {
        "n": args.n,
        "s": args.s,
        "a": space.a,
        "b": space.b,
        "fix": fs.count,
        "formula": expected,
        "formula_check": "PASS" if fs.count == expected else "FAIL",
        "gn_lower_bound": math.log(fs.count) / math.log(args.s),
        "upper_bound_s^(n/2)": protocol.cycle_upper_bound(args.n, args.s),
    }
    if space.is_square:
        doc["note"] = "perfect square: fix = s^(n/2), so this protocol is optimal"
    if args.out:
        protocol.save_protocol(p, args.out)
        doc["protocol_file"] = args.out
    if args.fixed_out:
        Path(args.fixed_out).write_text(protocol.dumps_fixed_set(fs))
        doc["fixed_set_file"] = args.fixed_out
    return doc, EXIT_OK if fs.count == expected else EXIT_INEXACT


def cmd_rounddown(args, cfg: RunConfig):
    rd = protocol.RoundDownSpec(args.m, args.t)
    p = protocol.round_down_protocol(rd, args.n)
    fix = protocol.enumerate_fixed_set(p, cfg.enumeration_budget, cfg.threads).count
    bound = protocol.round_down_bound(rd, args.n)
    doc = {
        "m": args.m,
        "t": args.t,
        "s": rd.s,
        "n": args.n,
        "fix": fix,
        "bound": bound,
        "bound_ceiling": max(0, math.ceil(bound)),
        "bound_vacuous": bound <= 0,
        "check": "PASS" if fix >= bound else "FAIL",
    }
    if args.out:
        protocol.save_protocol(p, args.out)
        doc["protocol_file"] = args.out
    return doc, EXIT_OK


def cmd_entropy(args, cfg: RunConfig):
    p = protocol.load_protocol(args.protocol_file)
    rep = entropy.audit_lemmas(p, tol=cfg.tolerance, seed=cfg.seed, budget=cfg.enumeration_budget)
    return rep.to_dict(include_records=not args.summary_only), EXIT_OK


def _load_function(path: str) -> funclass.LocalFunction:
    rows = [ln.replace(",", " ").split() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        table = np.array([[int(x) for x in r] for r in rows])
    except ValueError as exc:
        raise UsageError("function file: non-integer entry") from exc
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise UsageError("function file must hold s rows of s integers")
    return funclass.LocalFunction(factorize(table.shape[0]), table)


def cmd_classify(args, cfg: RunConfig):
    if args.exhaustive:
        s = args.s or 2
        if s > 2:
            raise funclass.InfeasibleError(f"exhaustive classification infeasible for s={s} ({s ** (s * s)} functions)")
        counts = {"total": 0, "flat": 0, "semi_perfect": 0, "perfect": 0, "flat_not_semi_perfect": 0}
        mis = []
        for t in funclass.iter_all_tables(s):
            fc = funclass.classify(funclass.LocalFunction(factorize(s), t), cfg.tolerance)
            counts["total"] += 1
            counts["flat"] += fc.is_flat
            counts["semi_perfect"] += fc.is_semi_perfect
            counts["perfect"] += fc.is_perfect
            if fc.is_flat and not fc.is_semi_perfect:
                counts["flat_not_semi_perfect"] += 1
                mis.append(fc.cond_mi)
        doc = {"kind": "function-census", "s": s, **counts, "non_semi_perfect_cond_mi": mis}
        if mis:
            doc["delta1"] = min(mis) / 2
        return doc, EXIT_OK
    if args.builtin:
        if args.s is None:
            raise UsageError("--builtin needs --s")
        f = funclass.builtin_function(args.builtin, args.s)
    else:
        f = _load_function(args.file)
    doc = funclass.classify(f, cfg.tolerance).to_dict()
    doc["s"] = f.s
    if args.z is not None:
        L, R = funclass.lr_sets(f, args.z)
        doc["z"] = args.z
        doc["L"] = sorted(L)
        doc["R"] = sorted(R)
        doc["preimage_is_product"] = f.preimage(args.z) == {(x, y) for x in L for y in R}
    return doc, EXIT_OK


def cmd_constants(args, cfg: RunConfig):
    return funclass.compute_constants(args.s, cfg.tolerance).to_dict(), EXIT_OK


def cmd_confusion(args, cfg: RunConfig):
    if args.graph:
        g = confusion.load_graph(args.graph)
    elif args.cycle:
        g = confusion.cycle_graph(args.cycle)
    else:
        g = confusion.complete_graph(args.complete)
    want_alpha, want_chi = args.alpha, args.chi
    if not (want_alpha or want_chi):
        want_alpha = want_chi = True
    st = confusion.gn_beta_report(
        g,
        args.s,
        want_alpha=want_alpha,
        want_chi=want_chi,
        time_budget=cfg.solver_time_budget_s,
        explicit_budget=cfg.explicit_budget,
    )
    path = None
    if args.witness_out and st.witness:
        Path(args.witness_out).write_text(protocol.dumps_fixed_set(st.witness))
        path = args.witness_out
    doc = st.to_dict(witness_path=path)
    inexact = (want_alpha and not st.alpha_exact) or (want_chi and not st.chi_exact)
    return doc, EXIT_INEXACT if inexact or not st.ok else EXIT_OK


def _parse_message(text: str, n: int, s: int, packed: bool) -> indexcode.Broadcast:
    if packed or "," not in text:
        try:
            return indexcode.Broadcast.unpack(int(text), n, s)
        except ValueError as exc:
            raise UsageError(f"bad packed broadcast {text!r}") from exc
    vals = list(parse_colouring(text))
    k = (n - 1) // 2
    if len(vals) != 2 * k + 1:
        raise UsageError(f"residue list needs {2 * k + 1} values")
    return indexcode.Broadcast(n, factorize(s), tuple(vals[:k]), tuple(vals[k : 2 * k]), vals[2 * k])


def cmd_index(args, cfg: RunConfig):
    n, s = args.n, args.s
    if args.action == "size":
        m = indexcode.message_space_size(n, s)
        return {"kind": "index-size", "n": n, "s": s, "messages": m, "beta_upper": math.log(m) / math.log(s)}, EXIT_OK
    if args.action == "roundtrip":
        rep = indexcode.exhaustive_roundtrip(n, s, cfg.enumeration_budget)
        doc = rep.to_dict()
        doc["summary"] = rep.line()
        return doc, EXIT_OK if rep.ok else EXIT_INEXACT
    if args.action == "encode":
        if not args.colouring:
            raise UsageError("encode needs --colouring")
        msg = indexcode.encode(parse_colouring(args.colouring), s, n)
        doc = {"kind": "index-broadcast", "n": n, "s": s}
        if args.packed:
            doc["packed"] = msg.pack()
        else:
            doc["residues"] = format_colouring(msg.residues())
            doc["phi_residues"] = list(msg.phi_residues)
            doc["psi_residues"] = list(msg.psi_residues)
            doc["seam_residue"] = msg.seam_residue
        return doc, EXIT_OK
    if args.message is None or args.vertex is None or args.left is None or args.right is None:
        raise UsageError("decode needs --message, --vertex, --left and --right")
    msg = _parse_message(args.message, n, s, args.packed)
    colour = indexcode.decode(args.vertex, args.left, args.right, msg)
    return {"kind": "index-decode", "n": n, "s": s, "vertex": args.vertex, "colour": colour}, EXIT_OK


COMMANDS = {
    "fcp": cmd_fcp,
    "rounddown": cmd_rounddown,
    "entropy": cmd_entropy,
    "classify": cmd_classify,
    "constants": cmd_constants,
    "confusion": cmd_confusion,
    "index": cmd_index,
}


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    fmt = "text"
    try:
        args = parser.parse_args(argv)
        flags = {k: getattr(args, k, None) for k in RunConfig.__dataclass_fields__}
        cfg = RunConfig.resolve(flags, environ)
        fmt = cfg.output_format
        doc, code = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"usage error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (funclass.InfeasibleError, entropy.TrivialProtocolError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INEXACT
    sys.stdout.write(report.render(doc, args.command, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
