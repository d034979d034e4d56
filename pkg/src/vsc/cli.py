"""Command-line front end.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors
(bad arguments, unparsable terms or files).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .classify import classify
from .derive import infer_with_trace
from .multitypes import (
    DerivationError, check_derivation, derivation_flags, derivation_from_json,
    derivation_to_json, type_to_json,
)
from .rewriting import (
    STRATEGIES, Closure, NotARedex, Status, Strategy, betav_reduce, reduce,
    sigma_embed_check, struct_equiv,
)
from .solvability import Answer, Target, head_context, scrutable, solvable, verify_witness
from .syntax import ContextKind, ParseError, meta_subst, measure, parse, pretty

__all__ = ["main", "run_command", "parse_term", "CorpusEntry", "load_corpus", "corpus_run"]

ABBREVIATIONS = {
    "I": r"\z.z",
    "DELTA": r"\x.x x",
    "OMEGA": r"(\x.x x) (\x.x x)",
}


class UsageError(Exception):
    pass


def parse_term(text: str):
    """Parse, then expand the free names ``I``, ``DELTA`` and ``OMEGA``."""
    try:
        t = parse(text)
    except ParseError as e:
        raise UsageError(f"cannot parse {text!r}: {e}") from None
    for name, body in ABBREVIATIONS.items():
        if name in t.fv:
            t = meta_subst(t, name, parse(body))
    return t


def _emit(out, obj, as_json: bool, text: Optional[str] = None):
    if as_json or text is None:
        out.write(json.dumps(obj, ensure_ascii=False, indent=2) + "\n")
    else:
        out.write(text + "\n")


# ------------------------------------------------------------ subcommands

def _strategy(args) -> Strategy:
    s = STRATEGIES[args.strategy]
    return Strategy(s.closure, s.substitute_variables, args.glue)


def cmd_reduce(args, out) -> int:
    t = parse_term(args.term)
    if args.strategy == "betav":
        closure = Closure.FULL if args.betav_closure == "full" else Closure.OPEN
        try:
            trace = betav_reduce(t, closure, args.fuel)
        except ValueError as e:
            raise UsageError(str(e)) from None
    else:
        trace = reduce(t, _strategy(args), args.fuel)
    obj = trace.to_json()
    lines = [pretty(t)]
    lines += [f"  -{s.kind.value}-> {pretty(s.term)}" for s in trace.steps]
    counts = " ".join(f"{k}={v}" for k, v in obj["counts"].items())
    lines.append(f"status: {obj['status']}  {counts}")
    _emit(out, obj, args.json, "\n".join(lines))
    return 0


def cmd_classify(args, out) -> int:
    flags = classify(parse_term(args.term)).as_dict()
    _emit(out, flags, True)
    return 0


def cmd_type(args, out) -> int:
    t = parse_term(args.term)
    d, trace = infer_with_trace(t, args.mode, args.fuel)
    if d is None:
        _emit(out, {"term": pretty(t), "derivation": None, "status": trace.status.value},
              args.json, f"no derivation: reduction status {trace.status.value}")
        return 1
    m = trace.counts["m"]
    open_size, solv_size = measure(trace.final)
    nf_size = open_size if args.mode == "open" else solv_size
    ok = 2 * m + nf_size == d.msize
    line = f"2*{m}+{nf_size} == {d.msize}: {'OK' if ok else 'FAIL'}"
    inert, tight = derivation_flags(d)
    obj = {
        "term": pretty(t),
        "mode": args.mode,
        "derivation": derivation_to_json(d),
        "context": {k: type_to_json(v) for k, v in d.ctx.items()},
        "type": type_to_json(d.type),
        "size": d.size,
        "msize": d.msize,
        "m_steps": m,
        "normal_form": pretty(trace.final),
        "normal_form_size": nf_size,
        "inert": inert,
        "tight": tight,
        "bound": line,
    }
    text = "\n".join([
        f"{d!r}",
        f"|D| = {d.size}, |D|_m = {d.msize}, normal form {pretty(trace.final)}",
        line,
    ])
    _emit(out, obj, args.json, text)
    return 0 if ok else 1


def cmd_check(args, out) -> int:
    try:
        raw = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
        d = derivation_from_json(json.loads(raw))
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError(f"cannot read derivation: {e}") from None
    try:
        (ctx, subject, typ), size, msize = check_derivation(d)
    except DerivationError as e:
        _emit(out, {"ok": False, "error": type(e).__name__, "message": str(e),
                    "path": list(e.path)}, args.json, f"{type(e).__name__}: {e}")
        return 1
    obj = {"ok": True, "context": {k: type_to_json(v) for k, v in ctx.items()},
           "term": pretty(subject), "type": type_to_json(typ), "size": size, "msize": msize}
    _emit(out, obj, args.json, f"ok: {d!r}  |D| = {size}, |D|_m = {msize}")
    return 0


def cmd_solve(args, out) -> int:
    t = parse_term(args.term)
    sc, so = scrutable(t, args.fuel), solvable(t, args.fuel)
    obj = {"term": pretty(t), "scrutable": sc.answer.value, "solvable": so.answer.value,
           "traces": {"open": sc.trace.to_json(), "solving": so.trace.to_json()}}
    text = f"scrutable: {sc.answer.value}\nsolvable: {so.answer.value}"
    _emit(out, obj, args.json, text)
    return 0


def cmd_sigma(args, out) -> int:
    t = parse_term(args.term)
    try:
        ok = sigma_embed_check(t, args.rule)
    except NotARedex as e:
        _emit(out, {"ok": False, "error": str(e)}, args.json, f"error: {e}")
        return 1
    _emit(out, {"ok": ok}, args.json, "true" if ok else "false")
    return 0 if ok else 1


def cmd_equiv(args, out) -> int:
    ok = struct_equiv(parse_term(args.left), parse_term(args.right))
    _emit(out, {"equivalent": ok}, args.json, "true" if ok else "false")
    return 0 if ok else 1


# ------------------------------------------------------------ corpus

@dataclass
class CorpusEntry:
    name: str
    term: str
    expected: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusEntry":
        if "name" not in obj or "term" not in obj:
            raise ValueError("corpus entries need 'name' and 'term'")
        return cls(obj["name"], obj["term"], obj.get("expected", {}), obj.get("provenance", {}))


def load_corpus(path: Optional[str]) -> list:
    if path is None:
        text = resources.files("vsc").joinpath("data/corpus.jsonl").read_text(encoding="utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read corpus: {e}") from None
    entries = []
    for k, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            entries.append(CorpusEntry.from_json(json.loads(line)))
        except ValueError as e:
            raise UsageError(f"corpus line {k}: {e}") from None
    return entries


def _true_flags(t) -> list:
    return sorted(k for k, v in classify(t).as_dict().items() if v)


def check_entry(e: CorpusEntry, fuel: int) -> list:
    """Mismatches as ``(field, expected, got)`` triples."""
    t = parse_term(e.term)
    exp = e.expected
    bad = []
    for key, fn in (("scrutable", scrutable), ("solvable", solvable)):
        if key in exp:
            got = fn(t, fuel).answer.value
            if got != exp[key]:
                bad.append((key, exp[key], got))
    for strat, flags in exp.get("nf_class", {}).items():
        trace = reduce(t, STRATEGIES[strat], fuel)
        got = _true_flags(trace.final) if trace.status is Status.NORMAL_FORM else None
        if got != (sorted(flags) if flags is not None else None):
            bad.append((f"nf_class.{strat}", flags, got))
    for mode in ("open", "solving"):
        key = f"{mode}_msize"
        if key in exp:
            d, _ = infer_with_trace(t, mode, fuel)
            got = d.msize if d is not None else None
            if got != exp[key]:
                bad.append((key, exp[key], got))
    w = exp.get("witness")
    if w:
        target = Target(w.get("target", "identity"))
        kind = ContextKind.TESTING if w.get("kind") == "testing" else ContextKind.HEAD
        given = parse_term(w["given"]) if "given" in w else None
        h = head_context(parse_term(w["context"]), kind)
        got = verify_witness(h, t, target, fuel, given).answer.value
        if got != Answer.YES.value:
            bad.append(("witness", "Yes", got))
    return bad


def corpus_run(path: Optional[str], fuel: int = 10000) -> dict:
    entries = load_corpus(path)
    results = []
    for e in entries:
        bad = check_entry(e, fuel)
        results.append({"name": e.name, "term": e.term, "ok": not bad,
                        "mismatches": [{"field": f, "expected": x, "got": g} for f, x, g in bad]})
    return {"entries": results, "ok": all(r["ok"] for r in results)}


def cmd_corpus(args, out) -> int:
    report = corpus_run(args.path, args.fuel)
    lines = []
    for r in report["entries"]:
        if r["ok"]:
            lines.append(f"PASS {r['name']}")
        else:
            diffs = "; ".join(f"{m['field']}: expected {m['expected']}, got {m['got']}"
                              for m in r["mismatches"])
            lines.append(f"FAIL {r['name']}: {diffs}")
    lines.append(f"{sum(r['ok'] for r in report['entries'])}/{len(report['entries'])} entries pass")
    _emit(out, report, args.json, "\n".join(lines))
    return 0 if report["ok"] else 1


# ------------------------------------------------------------ argument parsing

GLOBAL_DEFAULTS = {"fuel": 10000, "strategy": "o", "glue": False, "json": False}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    # Defaults are filled in after parsing so the flags work before or after the subcommand.
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--fuel", type=int, help="step budget (default 10000)")
    common.add_argument("--strategy", choices=sorted(STRATEGIES) + ["betav"])
    common.add_argument("--glue", action="store_true", help="enable the glue rule")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = _Parser(prog="vsc", description="Value Substitution Calculus workbench",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", parents=[common], help="reduce a term and print the trace")
    r.add_argument("term")
    r.add_argument("--betav-closure", choices=["open", "full"], default="open")
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("classify", parents=[common], help="normal-form grammar membership")
    c.add_argument("term")
    c.set_defaults(func=cmd_classify)

    t = sub.add_parser("type", parents=[common], help="infer a derivation by normalization")
    t.add_argument("term")
    t.add_argument("--mode", choices=["open", "solving"], default="open")
    t.set_defaults(func=cmd_type)

    k = sub.add_parser("check-derivation", parents=[common], help="check a derivation in JSON")
    k.add_argument("file", help="path, or - for standard input")
    k.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", parents=[common], help="scrutability and solvability")
    s.add_argument("term")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("sigma-check", parents=[common], help="sigma rule simulation check")
    g.add_argument("term")
    g.add_argument("--rule", choices=["sigma1", "sigma3"], default="sigma1")
    g.set_defaults(func=cmd_sigma)

    e = sub.add_parser("equiv", parents=[common], help="structural equivalence")
    e.add_argument("left")
    e.add_argument("right")
    e.set_defaults(func=cmd_equiv)

    q = sub.add_parser("corpus", parents=[common], help="check a JSONL corpus of expectations")
    q.add_argument("path", nargs="?", default=None, help="defaults to the bundled corpus")
    q.set_defaults(func=cmd_corpus)
    return p


def run_command(argv, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        for key, value in GLOBAL_DEFAULTS.items():
            if not hasattr(args, key):
                setattr(args, key, value)
        if args.fuel < 0:
            raise UsageError("--fuel must be non-negative")
        return args.func(args, out)
    except UsageError as e:
        sys.stderr.write(f"vsc: error: {e}\n")
        return 2


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
