"""
Command-line entry point.

Exit codes: 0 when every check passes, 1 on a failed assertion (the report
carries the evidence), 2 on usage or input errors, 3 when a bounded search
was truncated where an exhaustive answer was required.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import closure, forcing, tree, verify
from .canon import identity_of
from .core import Coloring, Identity, ResourceLimit, VIdentity
from .realize import enumerate_identities, realizes, v_realizes

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load_json(text: str) -> Any:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON: {exc}") from None


def _pattern(data: Any, ordered: bool = False):
    """A coloring, identity or V-identity from its JSON form."""
    if isinstance(data, dict) and "field" in data:
        return Coloring.from_json(data)
    if isinstance(data, dict) and "classes" in data:
        return VIdentity.from_json(data) if ordered else Identity.from_json(data)
    raise UsageError("expected a coloring {field, colors} or a partition {size, classes}")


def _emit(report: Any, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
        return
    _table(report, out)


def _table(report: Any, out, indent: str = "") -> None:
    if isinstance(report, dict):
        for k in sorted(report):
            v = report[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.write(f"{indent}{k}:\n")
                _table(v, out, indent + "  ")
            else:
                out.write(f"{indent}{k}: {json.dumps(v, sort_keys=True)}\n")
    elif isinstance(report, list):
        for item in report:
            if isinstance(item, (dict, list)) and not _flat(item):
                out.write(f"{indent}-\n")
                _table(item, out, indent + "  ")
            else:
                out.write(f"{indent}- {json.dumps(item, sort_keys=True)}\n")
    else:
        out.write(f"{indent}{json.dumps(report)}\n")


def _flat(v) -> bool:
    items = v.values() if isinstance(v, dict) else v
    return all(not isinstance(x, (dict, list)) for x in items)


# -- subcommands ------------------------------------------------------------------------


def cmd_enumerate(args) -> tuple[Any, int]:
    ids = enumerate_identities(args.size, args.bound)
    return {"size": args.size, "count": len(ids), "identities": [i.to_json() for i in ids]}, EXIT_OK


def cmd_canon(args) -> tuple[Any, int]:
    g = _pattern(_load_json(args.input))
    ident = identity_of(g)
    return {"identity": ident.to_json(), "classes": ident.num_classes}, EXIT_OK


def cmd_realizes(args) -> tuple[Any, int]:
    f = _pattern(_load_json(args.f), args.ordered)
    g = _pattern(_load_json(args.g), args.ordered)
    emb = v_realizes(f, g) if args.ordered else realizes(f, g)
    return {"realizes": emb is not None, "embedding": emb.to_json() if emb else None}, EXIT_OK


def cmd_duplicate(args) -> tuple[Any, int]:
    f = _pattern(_load_json(args.f))
    if not isinstance(f, Coloring):
        f = f.to_coloring()
    if args.segment is not None:
        out = closure.end_duplicate(f, args.segment)
    else:
        out = closure.duplicate(f, [int(x) for x in args.tuple.split(",") if x != ""])
    return {"coloring": out.to_json(), "identity": identity_of(out).to_json()}, EXIT_OK


def cmd_eh_amalgam(args) -> tuple[Any, int]:
    data = _load_json(args.inputs)
    if not isinstance(data, list) or not data:
        raise UsageError("eh-amalgam expects a nonempty JSON list")
    out = closure.eh_amalgam([_pattern(x) for x in data])
    return {"coloring": out.to_json(), "identity": identity_of(out).to_json()}, EXIT_OK


def _catalog_cmd(tag: str, args) -> tuple[Any, int]:
    if args.member:
        g = _pattern(_load_json(args.member))
        res = closure.membership(g, tag, args.witness_bound, args.depth)
        code = EXIT_TRUNCATED if getattr(res, "exhausted", True) is False else EXIT_OK
        return {"class": tag, **res.to_json()}, code
    cat = closure.load_or_generate(tag, args.max_size, args.witness_bound, args.depth,
                                   directory=args.cache_dir, use_cache=not args.no_cache)
    tags = ("IDE", "IDE_V") if tag == "IDE" else ("IDM",)
    report = {
        "params": cat.params,
        "complete": cat.complete,
        "counts": {t: {str(n): len(cat.members(t, n)) for n in range(1, args.max_size + 1)} for t in tags},
        "records": list(cat.records()),
    }
    return report, EXIT_OK if cat.complete else EXIT_TRUNCATED


def cmd_idm(args):
    return _catalog_cmd("IDM", args)


def cmd_ide(args):
    return _catalog_cmd("IDE", args)


def cmd_im(args) -> tuple[Any, int]:
    ident = tree.build_Im(args.m)
    return {"m": args.m, "size": ident.size, "classes": ident.num_classes, "identity": ident.to_json()}, EXIT_OK


def cmd_tree_realizes(args) -> tuple[Any, int]:
    data = _load_json(args.input)
    g = tree.meet_coloring(data) if isinstance(data, list) else _pattern(data)
    t = tree.tree_witness(g)
    return {"tree_realizes": t is not None, "tree": t}, EXIT_OK


def cmd_special_seq(args) -> tuple[Any, int]:
    seqs = tree.special_sequences(args.m)
    shown = seqs if args.limit is None else seqs[: args.limit]
    return {"m": args.m, "count": len(seqs), "sequences": [s.to_json() for s in shown]}, EXIT_OK


def _oracle(args) -> forcing.DefinabilityOracle:
    table = _load_json(args.table) if args.table else None
    return forcing.oracle_from_spec(args.oracle, table)


def cmd_forcing_gen(args) -> tuple[Any, int]:
    if args.sample is not None and args.seed is None:
        raise UsageError("--sample needs --seed")
    oracle = _oracle(args)
    gen = forcing.generate_P(args.depth, args.N, oracle, budget=args.budget, sample=args.sample, seed=args.seed)
    report = {"oracle": oracle.to_json(), **gen.to_json()}
    if args.conditions:
        report["conditions"] = [p.to_json() for p in gen.conditions]
    return report, EXIT_TRUNCATED if gen.truncated else EXIT_OK


def cmd_verify(args) -> tuple[Any, int]:
    target = args.target
    if target == "s2":
        rep = tree.verify_s2_step(args.k)
    elif target == "t2-pairs":
        rep = tree.verify_t2_pair_claim(args.m, profiles=args.profiles)
    elif target == "lemma-qq":
        rep = forcing.verify_lemma_qq(args.m, args.N, args.depth, _oracle(args),
                                      sample=args.sample, seed=args.seed, budget=args.budget)
        if not rep["exhaustive"] and args.sample is None:
            return rep, EXIT_TRUNCATED
    elif target == "t2-kernel":
        oracles = [_oracle(args)] if args.oracle_given else None
        rep = forcing.verify_t2_kernel(args.m, args.N, args.depth, oracles,
                                       sample=args.sample, seed=args.seed, budget=args.budget)
        if args.sample is None and any(r["generation"]["truncated"] for r in rep["runs"]):
            return rep, EXIT_TRUNCATED
    elif target == "tree-idm":
        rep = verify.tree_idm_agreement(args.max_size, args.witness_bound)
        if not rep["catalog_complete"]:
            return rep, EXIT_TRUNCATED
    elif target == "all":
        rep = verify.run_all()
    else:  # argparse restricts choices
        raise UsageError(f"unknown target {target}")
    return rep, EXIT_OK if rep["ok"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--cache-dir", default=None,
                        help=f"catalog cache directory (default: ${closure.CACHE_ENV} or ~/.cache/omegaid)")

    p = argparse.ArgumentParser(prog="omegaid", description="Identities of edge colorings: enumeration, closures, checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", parents=[common], help="all identities of one size")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--bound", type=int, default=6)
    s.set_defaults(fn=cmd_enumerate)

    s = sub.add_parser("canon", parents=[common], help="canonical identity of a coloring or partition")
    s.add_argument("input", help="JSON text or @file")
    s.set_defaults(fn=cmd_canon)

    s = sub.add_parser("realizes", parents=[common], help="search an embedding of g into f")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--ordered", action="store_true", help="order-preserving embeddings only")
    s.set_defaults(fn=cmd_realizes)

    s = sub.add_parser("duplicate", parents=[common], help="duplicate a tuple or a final segment")
    s.add_argument("--f", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--tuple", help="comma-separated vertices")
    g.add_argument("--segment", type=int, help="end-duplicate the final segment of this length")
    s.set_defaults(fn=cmd_duplicate)

    s = sub.add_parser("eh-amalgam", parents=[common], help="end-homogeneous amalgam of a JSON list")
    s.add_argument("inputs")
    s.set_defaults(fn=cmd_eh_amalgam)

    for name, fn in (("idm", cmd_idm), ("ide", cmd_ide)):
        s = sub.add_parser(name, parents=[common], help=f"bounded {name.upper()} catalog or membership")
        s.add_argument("--max-size", type=int, default=4)
        s.add_argument("--witness-bound", type=int, default=8)
        s.add_argument("--depth", type=int, default=None)
        s.add_argument("--member", default=None, help="identity JSON to test for membership")
        s.add_argument("--no-cache", action="store_true")
        s.set_defaults(fn=fn)

    s = sub.add_parser("im", parents=[common], help="the identity I_m")
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(fn=cmd_im)

    s = sub.add_parser("tree-realizes", parents=[common], help="tree oracle for an identity or branch list")
    s.add_argument("input")
    s.set_defaults(fn=cmd_tree_realizes)

    s = sub.add_parser("special-seq", parents=[common], help="enumerate special sequences")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--limit", type=int, default=None)
    s.set_defaults(fn=cmd_special_seq)

    forcing_opts = argparse.ArgumentParser(add_help=False)
    forcing_opts.add_argument("--N", type=int, default=5)
    forcing_opts.add_argument("--depth", type=int, default=2)
    forcing_opts.add_argument("--oracle", default=None,
                              choices=("membership", "interval", "table", "never", "always"))
    forcing_opts.add_argument("--table", default=None, help="JSON list of [b, [a, ...]] facts")
    forcing_opts.add_argument("--budget", type=int, default=None)
    forcing_opts.add_argument("--sample", type=int, default=None)
    forcing_opts.add_argument("--seed", type=int, default=None)

    s = sub.add_parser("forcing-gen", parents=[common, forcing_opts], help="generate conditions")
    s.add_argument("--conditions", action="store_true", help="include every condition in the report")
    s.set_defaults(fn=cmd_forcing_gen)

    s = sub.add_parser("verify", parents=[common, forcing_opts], help="run a verification check")
    s.add_argument("target", choices=("lemma-qq", "t2-pairs", "t2-kernel", "s2", "tree-idm", "all"))
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--max-size", type=int, default=4)
    s.add_argument("--witness-bound", type=int, default=8)
    s.add_argument("--profiles", action="store_true", help="include per-sequence class profiles")
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "oracle", "unset") != "unset":
        args.oracle_given = args.oracle is not None
        if args.oracle is None:
            args.oracle = "membership"
    if getattr(args, "sample", None) is not None and args.seed is None:
        sys.stderr.write("error: sampled runs need --seed\n")
        return EXIT_USAGE
    try:
        report, code = args.fn(args)
    except (UsageError, ValueError, ResourceLimit, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    _emit(report, args.format, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
