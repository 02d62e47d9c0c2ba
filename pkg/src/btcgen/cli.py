"""Command-line interface: ``btcgen <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
from typing import Dict, Optional, Sequence, TextIO, Tuple

from . import counting
from .augmentation import augment
from .enumeration import (
    GenerationConfig,
    _expand,
    _level,
    _ordered_map,
    _tasks,
    count_exact,
    default_jobs,
    estimate_count,
    generate_all,
    random_network,
)
from .errors import BTCError
from .isocheck import canonical_key
from .network import validate_btc
from .reduction import decompose, reduce
from .serialize import (
    detect_format,
    format_pair,
    parse,
    parse_many,
    parse_pair,
    serialize,
)


def _hybrid_range(text: str) -> Tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or A, got {text!r}")


def _shard_name(n: int, h: int, fmt: str) -> str:
    return f"n{n}_h{h}.{'nwk' if fmt == 'enewick' else 'edges'}"


def _record(net, fmt: str) -> str:
    # edge-list documents already end with a newline
    text = serialize(net, fmt)
    return text + "\n" if fmt == "enewick" else text


def _write_task(args) -> Dict[int, int]:
    nets, k, n, (lo, hi), fmt, part_dir, task_id = args
    handles: Dict[int, TextIO] = {}
    counts: Dict[int, int] = {}
    try:
        for net in nets:
            for out in _expand(net, k, n, hi):
                h = out.n_hybrids
                if h < lo:
                    continue
                if h not in handles:
                    path = os.path.join(part_dir, f"{_shard_name(n, h, fmt)}.{task_id:06d}")
                    handles[h] = open(path, "w", encoding="ascii", newline="\n")
                handles[h].write(_record(out, fmt))
                counts[h] = counts.get(h, 0) + 1
    finally:
        for f in handles.values():
            f.close()
    return counts


def _write_corpus(cfg: GenerationConfig, fmt: str, out_dir: str) -> Dict[int, int]:
    """Write one shard per hybrid count.  Tasks write private part files that
    are concatenated in task order, so the shards do not depend on --jobs."""
    os.makedirs(out_dir, exist_ok=True)
    part_dir = os.path.join(out_dir, ".parts")
    os.makedirs(part_dir, exist_ok=True)
    lo, hi = cfg.h_range
    if cfg.n <= 2:
        m, chunks = cfg.n, [list(_level(cfg.n, hi))]
    else:
        m, chunks = _tasks(cfg, cfg.parallelism)
    tasks = [(c, m, cfg.n, (lo, hi), fmt, part_dir, i) for i, c in enumerate(chunks)]
    if cfg.parallelism == 1:
        results = map(_write_task, tasks)
    else:
        results = _ordered_map(_write_task, tasks, cfg.parallelism)
    totals: Dict[int, int] = {}
    for part in results:
        for h, c in part.items():
            totals[h] = totals.get(h, 0) + c
    for h in sorted(totals):
        name = _shard_name(cfg.n, h, fmt)
        with open(os.path.join(out_dir, name), "w", encoding="ascii", newline="\n") as dst:
            for i in range(len(tasks)):
                part = os.path.join(part_dir, f"{name}.{i:06d}")
                if os.path.exists(part):
                    with open(part, encoding="ascii") as src:
                        shutil.copyfileobj(src, dst)
    shutil.rmtree(part_dir)
    return dict(sorted(totals.items()))


def cmd_generate(args, out: TextIO) -> int:
    cfg = GenerationConfig(args.n, args.hybrids, args.jobs)
    if args.count_only:
        print(sum(count_exact(args.n, args.hybrids, args.jobs).values()), file=out)
        return 0
    if args.out:
        totals = _write_corpus(cfg, args.format, args.out)
        for h, c in totals.items():
            print(f"h={h} {c} {os.path.join(args.out, _shard_name(args.n, h, args.format))}", file=out)
        return 0
    for net in generate_all(cfg):
        out.write(_record(net, args.format))
    return 0


def cmd_bound(args, out: TextIO) -> int:
    table = counting.bound_table(args.n)
    if args.by_hybrids:
        for h, value in enumerate(table.b[args.n]):
            print(f"{h} {value}", file=out)
    else:
        print(table.total(args.n), file=out)
    return 0


def cmd_random(args, out: TextIO) -> int:
    for i in range(args.samples):
        out.write(_record(random_network(args.n, args.seed, i), args.format))
    return 0


def cmd_estimate(args, out: TextIO) -> int:
    rep = estimate_count(args.n, args.samples, args.seed, args.base_level)
    doc = {
        "n": rep.n,
        "estimate": round(rep.estimate),
        "exact": rep.exact,
        "samples": rep.samples,
        "base_level": rep.base_level,
        "base_size": rep.base_size,
        "mean_offspring": rep.mean_offspring,
        "stderr": rep.stderr,
        "stable_digits": rep.stable_digits,
        "running": [[s, v] for s, v in rep.running],
    }
    print(json.dumps(doc), file=out)
    return 0


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="ascii") as f:
        return f.read()


def cmd_reduce(args, out: TextIO) -> int:
    text = _read(args.input)
    fmt = detect_format(text)
    net = parse(text, fmt)
    reduced, pair = reduce(net, args.leaf)
    out.write(_record(reduced, fmt))
    print(format_pair(reduced, pair), file=out)
    return 0


def _set_text(net, pair) -> Tuple[str, str]:
    spec = format_pair(net, pair)
    s1 = spec[spec.index("{"):spec.index("}") + 1]
    s2 = spec[spec.index("S2=") + 3:]
    return s1, s2


def cmd_decompose(args, out: TextIO) -> int:
    net = parse(_read(args.input))
    for step in reversed(decompose(net)):
        s1, s2 = _set_text(step.network, step.pair)
        inv = "T^-1" if step.kind.value == "T" else "H^-1"
        i = step.label
        print(f"N{i} = {inv}(N{i - 1}, {i}; {s1}, {s2})", file=out)
    return 0


def cmd_augment(args, out: TextIO) -> int:
    text = _read(args.input)
    fmt = detect_format(text)
    net = parse(text, fmt)
    pair = parse_pair(net, args.pair)
    label = args.label if args.label is not None else max(net.labels.values()) + 1
    out.write(_record(augment(net, label, pair), fmt))
    return 0


def cmd_validate(args, out: TextIO) -> int:
    status = 0
    seen: Dict[tuple, str] = {}
    for path in args.input:
        nets = parse_many(_read(path), validate=False)
        for i, net in enumerate(nets, 1):
            where = f"{path}:{i}"
            rep = validate_btc(net)
            if not rep.ok:
                status = 1
                print(f"{where} invalid {','.join(rep.rules)}", file=out)
                continue
            key = canonical_key(net)
            if key in seen:
                status = 1
                print(f"{where} duplicate-of {seen[key]}", file=out)
            else:
                seen[key] = where
                print(f"{where} ok", file=out)
    print(f"unique {len(seen)}", file=out)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btcgen",
        description="Generate, count and transform binary tree-child phylogenetic networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="exhaustive generation of BTC_n")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--hybrids", type=_hybrid_range, metavar="A..B")
    p.add_argument("--format", choices=("enewick", "edgelist"), default="enewick")
    p.add_argument("--out", metavar="DIR", help="write hybrid-count shards to DIR")
    p.add_argument("--jobs", type=int, default=default_jobs())
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bound", help="upper bound on |BTC_n|")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--by-hybrids", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("random", help="random construction (not uniform)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--format", choices=("enewick", "edgelist"), default="enewick")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("estimate", help="offspring-based estimate of |BTC_n|")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--base-level", type=int)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("reduce", help="remove one leaf")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--leaf", type=int, required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("decompose", help="print the augmentation chain")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("augment", help="add one leaf from a feasible pair")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--pair", required=True, metavar="SPEC", help="e.g. 'T: S1={T2}; S2=(T4,T2)'")
    p.add_argument("--label", type=int)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("validate", help="validate files and report duplicates")
    p.add_argument("--in", dest="input", required=True, nargs="+", metavar="FILE")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except BTCError as exc:
        err = {"error": exc.code, "message": str(exc)}
        if hasattr(exc, "line"):
            err.update(line=exc.line, column=exc.column)
        if hasattr(exc, "report"):
            err["rules"] = exc.report.rules
        print(json.dumps(err), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": "invalid-argument", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
