"""Command-line interface.

Records are printed as ``key=value`` lines; graph-valued results are printed in
the graph text format so they can be piped back in.  Exit codes: 0 success,
1 domain error (invalid graph, violated precondition, failed replay),
2 usage or parse error.
"""
from __future__ import annotations

import argparse
import random
import sys
from typing import Optional

from .canon import canonical_code, short_code
from .dot import to_dot
from .generate import random_graph
from .graph import CURVE, FLOW, DecoratedGraph, validate
from .normalform import (PreconditionError, enumerate_orbit, equivalent_bounded,
                         reduce_nonneg_chi, scramble)
from .reconstruction import TraceError, classify_surface, trace_curve
from .rewrite import LogMismatch, ReductionLog, StaleSite, find_sites, replay, replay_entry
from .rules import CURVES, FLOWS, PAIRS, RuleError, load_rules
from .textio import ParseError, normalize, parse, serialize


class DomainError(Exception):
    pass


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _graph(path: str, require_valid: bool = True) -> DecoratedGraph:
    g = parse(_read(path))
    if require_valid:
        rep = validate(g)
        if not rep.ok:
            raise DomainError(f"invalid graph {path}: " + "; ".join(map(str, rep.violations)))
    return g


def _log(text: str) -> ReductionLog:
    try:
        return ReductionLog.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _ruleset(args, g: Optional[DecoratedGraph] = None):
    name = args.ruleset or (FLOWS if g is None or g.layer == FLOW else CURVES)
    rs = load_rules(name)
    if g is not None and g.layer != rs.layer:
        raise DomainError(f"ruleset {name} acts on {rs.layer} graphs, got a {g.layer} graph")
    return rs


def _emit_graph(g: DecoratedGraph, out) -> None:
    out.write(serialize(g))
    out.write(f"# code={short_code(canonical_code(g))}\n")


def cmd_validate(args, out) -> int:
    g = _graph(args.files[0], require_valid=False)
    rep = validate(g)
    out.write(f"ok={int(rep.ok)}\n")
    for v in rep.violations:
        out.write(f"violation law={v.law} where={','.join(v.where)}\n")
    return 0 if rep.ok else 1


def cmd_invariants(args, out) -> int:
    g = _graph(args.files[0])
    out.write(classify_surface(g).record() + "\n")
    return 0


def cmd_trace(args, out) -> int:
    g = _graph(args.files[0])
    if g.layer != CURVE:
        raise DomainError("trace needs a curve graph")
    out.write(trace_curve(g).record() + "\n")
    return 0


def cmd_sites(args, out) -> int:
    g = _graph(args.files[0])
    rs = _ruleset(args, g)
    sites = find_sites(g, rs, "both")
    for s in sorted(sites, key=lambda s: (s.rule, s.direction, s.key, s.variant)):
        out.write(f"site rule={s.rule} variant={s.variant} direction={s.direction} key={s.key} "
                  f"result={short_code(s.result_code)}\n")
    out.write(f"sites={len(sites)}\n")
    return 0


def cmd_apply(args, out) -> int:
    g = _graph(args.files[0])
    if not args.move:
        raise DomainError("apply needs --move '<rule> <variant> <direction> <site-key>'")
    rs = _ruleset(args, g)
    entries = _log(args.move).entries
    if len(entries) != 1:
        raise UsageError("--move takes exactly one log line")
    g2, _ = replay_entry(g, rs, entries[0])
    _emit_graph(g2, out)
    return 0


def cmd_replay(args, out) -> int:
    if len(args.files) != 2:
        raise UsageError("replay needs a graph file and a log file")
    g = _graph(args.files[0])
    rs = _ruleset(args, g)
    log = _log(_read(args.files[1]))
    _emit_graph(replay(g, rs, log), out)
    return 0


def cmd_canonicalize(args, out) -> int:
    g = _graph(args.files[0])
    _emit_graph(normalize(g), out)
    return 0


def cmd_equiv(args, out) -> int:
    if len(args.files) != 2:
        raise UsageError("equiv needs two graph files")
    g1, g2 = _graph(args.files[0]), _graph(args.files[1])
    if g1.layer != g2.layer:
        raise DomainError("graphs live on different layers")
    rs = _ruleset(args, g1)
    res = equivalent_bounded(g1, g2, rs, max_expansions=args.budget,
                             max_weight=args.max_weight, threads=args.threads)
    out.write(res.record() + "\n")
    for e in res.path:
        out.write(f"move {e.line()}\n")
    return 0


def cmd_orbit(args, out) -> int:
    g = _graph(args.files[0])
    rs = _ruleset(args, g)
    orb = enumerate_orbit(g, rs, max_expansions=args.budget, max_weight=args.max_weight,
                          threads=args.threads)
    out.write(f"orbit_size={len(orb.codes)} expansions={orb.expansions} "
              f"truncated={int(orb.truncated)}\n")
    return 0


def cmd_reduce(args, out) -> int:
    g = _graph(args.files[0])
    form, log = reduce_nonneg_chi(g, _ruleset(args, g))
    out.write(f"normal_form={str(form).replace(' ', '_')} moves={len(log)}\n")
    for e in log.entries:
        out.write(f"move {e.line()}\n")
    return 0


def cmd_scramble(args, out) -> int:
    g = _graph(args.files[0])
    rs = _ruleset(args, g)
    g2, log = scramble(g, rs, args.steps, seed=args.seed, max_weight=args.max_weight)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(log.text())
    _emit_graph(g2, out)
    return 0


def cmd_random(args, out) -> int:
    rng = random.Random(args.seed)
    layer = args.layer or (CURVE if args.ruleset in (CURVES, PAIRS) else FLOW)
    _emit_graph(random_graph(rng, layer), out)
    return 0


def cmd_export_dot(args, out) -> int:
    out.write(to_dot(_graph(args.files[0], require_valid=False)))
    return 0


COMMANDS = {
    "validate": (cmd_validate, 1),
    "invariants": (cmd_invariants, 1),
    "trace": (cmd_trace, 1),
    "sites": (cmd_sites, 1),
    "apply": (cmd_apply, 1),
    "replay": (cmd_replay, 2),
    "canonicalize": (cmd_canonicalize, 1),
    "equiv": (cmd_equiv, 2),
    "orbit": (cmd_orbit, 1),
    "reduce": (cmd_reduce, 1),
    "scramble": (cmd_scramble, 1),
    "random": (cmd_random, 0),
    "export-dot": (cmd_export_dot, 1),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinecalc", description="Flow-spine and curve move calculus.")
    p.add_argument("subcommand", choices=sorted(COMMANDS))
    p.add_argument("files", nargs="*", help="graph or log files, '-' for stdin")
    p.add_argument("--ruleset", choices=(FLOWS, CURVES, PAIRS))
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--move", help="log line for apply")
    p.add_argument("--log", help="where scramble writes its move log")
    p.add_argument("--layer", choices=(FLOW, CURVE), help="layer for random")
    return p


def main(argv: Optional[list[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func, nfiles = COMMANDS[args.subcommand]
    try:
        if len(args.files) != nfiles:
            raise UsageError(f"{args.subcommand} takes {nfiles} file argument(s)")
        if args.budget < 1 or args.steps < 0 or args.threads < 1:
            raise UsageError("--budget and --threads must be positive, --steps non-negative")
        return func(args, out)
    except (UsageError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, PreconditionError, StaleSite, LogMismatch, TraceError, RuleError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
