"""Command-line entry point.

One binary, subcommand style.  JSON is the primary output format; markdown
and CSV renderings carry the same data.  With ``--expect`` the exit code is
0 only when the verdict matches; budget UNKNOWN never silently matches an
expected REFUTED/NOT_REFUTED.
"""

from __future__ import annotations

import argparse
import json
import sys

from .covering import (
    INCLUSIVE,
    STRICT,
    PsiTable,
    find_star_witness,
    singleton_witness,
    star_holds_for,
)
from .problems import (
    LpoInstance,
    SortInstance,
    cfi_bar,
    cfi_is_member,
    cfi_psi,
    format_cfi_word,
    lpo_answer,
    parse_cfi_word,
    sort_eval,
)
from .reductions import (
    CascadeRange,
    ReductionTrace,
    cascade_backward,
    cascade_psi_table,
    cascade_tail_sets,
    cfi_meet_tail,
    cfi_relabel,
    lpo_balanced_decode,
    lpo_balanced_encode,
    lpo_srt3_decode,
    lpo_srt3_encode,
    lpo_wub_decode,
    lpo_wub_encode,
    product_decode,
    product_encode,
    product_psi_table,
)
from .search import (
    EngineConfig,
    SearchReport,
    bad_collection_census,
    enumerate_pairings,
    enumerate_psis,
    pairing_count,
    threshold_scan,
    verify_nonreduction,
)
from .streams import EvpStream, ValidationError


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValidationError(f"bad dims {text!r}")
    if not ks:
        raise ValidationError("empty dims")
    return ks


def _parse_colors_range(text: str) -> list[int]:
    """Either a single count ('8') or an inclusive range ('4..7')."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _read_grid(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit_report(report: SearchReport, args) -> None:
    if args.format == "md":
        out = report.to_markdown()
    elif args.format == "csv":
        out = report.to_csv()
    else:
        out = report.dumps(include_timing=args.timing)
    _write(out, args)


def _write(text: str, args) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _verdict_exit(report: SearchReport, args) -> int:
    if args.expect:
        want = args.expect.upper().replace("-", "_")
        return 0 if report.verdict == want else 2
    return 0 if not report.failures else 1


def _engine_config(args) -> EngineConfig:
    config = EngineConfig()
    if getattr(args, "workers", None):
        config.workers = args.workers
    if getattr(args, "budget", None):
        config.budget_cells = args.budget
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "samples", None):
        config.singleton_samples = args.samples
        config.crosscheck_samples = args.samples
    if getattr(args, "crosscheck", None):
        config.crosscheck = args.crosscheck
    if getattr(args, "strict", False):
        config.mode = STRICT
    return config


# ---------------------------------------------------------------------------
# subcommands


def cmd_star(args) -> int:
    psi = PsiTable.from_grid_text(_read_grid(args.grid), args.colors)
    mode = STRICT if args.strict else INCLUSIVE
    search = find_star_witness(psi, args.max_size, mode)
    data = {
        "dims": list(psi.dims.ks),
        "n_colors": psi.n_colors,
        "max_size": args.max_size,
        "mode": mode,
        "status": search.status,
        "witness": search.witness.sorted() if search.witness else None,
        "checked": search.checked,
    }
    _write(json.dumps(data, sort_keys=True, indent=2), args)
    if args.expect:
        return 0 if search.status == args.expect else 2
    return 0


def cmd_witness(args) -> int:
    psi = PsiTable.from_grid_text(_read_grid(args.grid), args.colors)
    mode = STRICT if args.strict else INCLUSIVE
    witness = singleton_witness(psi, args.strategy, mode)
    data = {
        "dims": list(psi.dims.ks),
        "n_colors": psi.n_colors,
        "strategy": args.strategy,
        "witness": witness.sorted() if witness else None,
        "verified": witness is not None
        and star_holds_for(psi, witness.colors, mode),
    }
    _write(json.dumps(data, sort_keys=True, indent=2), args)
    return 0 if witness is not None else 1


def cmd_verify(args) -> int:
    report = verify_nonreduction(
        _parse_dims(args.dims), args.colors, _engine_config(args)
    )
    _emit_report(report, args)
    return _verdict_exit(report, args)


def cmd_census(args) -> int:
    report = bad_collection_census(
        _parse_dims(args.dims), args.colors, _engine_config(args)
    )
    _emit_report(report, args)
    return _verdict_exit(report, args)


def cmd_scan(args) -> int:
    report = threshold_scan(
        _parse_dims(args.dims),
        _parse_colors_range(args.colors),
        _engine_config(args),
    )
    _emit_report(report, args)
    return _verdict_exit(report, args)


def cmd_bar(args) -> int:
    word = parse_cfi_word(args.word)
    out = cfi_bar(word)
    data = {
        "word": format_cfi_word(word),
        "bar": format_cfi_word(out),
        "excluded": sorted(cfi_psi(word)),
        "bar_excluded": sorted(cfi_psi(out)),
    }
    _write(json.dumps(data, sort_keys=True, indent=2), args)
    return 0


def cmd_psi(args) -> int:
    ks = _parse_dims(args.ks)
    if args.kind == "cascade":
        table = cascade_psi_table(CascadeRange(ks))
    else:
        table = product_psi_table(ks)
    if args.format == "json":
        _write(json.dumps(table.to_json(), sort_keys=True, indent=2), args)
    else:
        _write(table.to_grid_text(), args)
    return 0


def cmd_enumerate(args) -> int:
    dims = _parse_dims(args.dims)
    if args.pairings:
        total = pairing_count(*dims)
        if args.count:
            _write(json.dumps({"dims": list(dims), "pairings": total}), args)
            return 0
        lines = []
        for i, pairing in enumerate(enumerate_pairings(*dims)):
            if args.limit and i >= args.limit:
                break
            lines.append(json.dumps({"index": i, "pairs": pairing.pairs}))
        _write("\n".join(lines), args)
        return 0
    tables = enumerate_psis(
        dims,
        args.colors,
        total=args.total,
        no_singleton=args.no_singleton,
        canonical=not args.all_representatives,
        budget=args.budget,
    )
    if args.count:
        n = sum(1 for _ in tables)
        _write(json.dumps({"dims": list(dims), "colors": args.colors, "tables": n}), args)
        return 0
    lines = []
    for i, psi in enumerate(tables):
        if args.limit and i >= args.limit:
            break
        lines.append(json.dumps({"index": i, "cells": list(psi.cells_key())}))
    _write("\n".join(lines), args)
    return 0


# -- reduce subcommand ------------------------------------------------------


def _trace_cascade(args) -> ReductionTrace:
    ks = _parse_dims(args.ks)
    rng = CascadeRange(ks)
    c = EvpStream.parse(args.inputs[0], rng.n_colors)
    tails = cascade_tail_sets(c, rng)
    solution = tuple(min(t) for t in tails)
    decoded = cascade_backward(solution, rng)
    return ReductionTrace(
        name="cascade",
        instance=c,
        encoded=[sorted(t) for t in tails],
        solution=solution,
        decoded=decoded,
        valid=decoded in c.infinitely_often(),
    )


def _trace_product(args) -> ReductionTrace:
    ks = _parse_dims(args.ks)
    streams = [EvpStream.parse(t, k) for t, k in zip(args.inputs, ks)]
    if len(streams) != len(ks):
        raise ValidationError("one input stream per factor required")
    merged = product_encode(streams, ks)
    a = min(merged.infinitely_often())
    decoded = product_decode(a, ks)
    valid = all(
        v in s.infinitely_often() for v, s in zip(decoded, streams)
    )
    return ReductionTrace("product", streams, merged, a, decoded, valid)


def _parse_flip(text) -> LpoInstance:
    if text is None or text == "none":
        return LpoInstance(None)
    return LpoInstance(int(text))


def _trace_lpo_balanced(args) -> ReductionTrace:
    S = _parse_flip(args.flip)
    c = lpo_balanced_encode(S)
    base = (S.flip or 0) + 1
    x0, x1 = 2 * base, 2 * base + 2
    decoded = lpo_balanced_decode(c, x0, x1)
    return ReductionTrace(
        "lpo-balanced", S, c, (x0, x1), decoded, decoded == lpo_answer(S)
    )


def _trace_lpo_srt3(args) -> ReductionTrace:
    S = _parse_flip(args.flip)
    d = lpo_srt3_encode(S, lpo_balanced_encode(S))
    min_h = S.flip if S.flip is not None else 0
    decoded, ok = lpo_srt3_decode(S, min_h)
    return ReductionTrace(
        "lpo-srt3", S, d, min_h, decoded, ok and decoded == lpo_answer(S)
    )


def _trace_lpo_wub(args) -> ReductionTrace:
    S = _parse_flip(args.flip)
    c = lpo_wub_encode(S)
    min_l = S.flip if S.flip is not None else 0
    decoded = lpo_wub_decode(S, min_l)
    return ReductionTrace(
        "lpo-wub", S, c, min_l, decoded, decoded == lpo_answer(S)
    )


def _trace_sort(args) -> ReductionTrace:
    stream = EvpStream.parse(args.inputs[0], 2)
    inst = SortInstance(stream)
    count = sort_eval(inst)
    return ReductionTrace("sort", stream, stream, count, count, True)


def _trace_cfi_relabel(args) -> ReductionTrace:
    p = parse_cfi_word(args.word)
    sigma = parse_cfi_word(args.sigma or "")
    out = cfi_relabel(p, sigma)
    return ReductionTrace(
        "cfi-relabel",
        {"word": format_cfi_word(p), "sigma": format_cfi_word(sigma)},
        format_cfi_word(out),
        sorted(cfi_psi(out)),
        format_cfi_word(out),
        valid=None,
        notes=["excluded colors listed as the solution field"],
    )


def _trace_cfi_meet(args) -> ReductionTrace:
    p = parse_cfi_word(args.word)
    k = args.k
    out = cfi_meet_tail(p, k)
    bound = max((max(p) if p else 0), k + 1) + 3
    valid = all(not cfi_is_member(out, n) for n in range(k + 1)) and all(
        cfi_is_member(out, n) == cfi_is_member(p, n)
        for n in range(k + 1, bound)
    )
    return ReductionTrace(
        "cfi-meet",
        {"word": format_cfi_word(p), "k": k},
        format_cfi_word(out),
        sorted(cfi_psi(out)),
        format_cfi_word(out),
        valid,
    )


_REDUCERS = {
    "cascade": _trace_cascade,
    "product": _trace_product,
    "lpo-balanced": _trace_lpo_balanced,
    "lpo-srt3": _trace_lpo_srt3,
    "lpo-wub": _trace_lpo_wub,
    "sort": _trace_sort,
    "cfi-relabel": _trace_cfi_relabel,
    "cfi-meet": _trace_cfi_meet,
}


def cmd_reduce(args) -> int:
    trace = _REDUCERS[args.name](args)
    _write(trace.dumps(), args)
    return 0 if trace.valid in (True, None) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rtwl",
        description="Covering-property verifiers and executable reductions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the report to a file instead of stdout")
        p.add_argument(
            "--format", choices=("json", "md", "csv"), default="json"
        )
        p.add_argument("--timing", action="store_true", help="include wall time")

    p = sub.add_parser("star", help="search for an escape-property witness")
    p.add_argument("--grid", required=True, help="grid file ('-' for stdin)")
    p.add_argument("--colors", type=int, help="override the color count")
    p.add_argument("--max-size", type=int, dest="max_size")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--expect", choices=("found", "none"))
    common(p)
    p.set_defaults(fn=cmd_star)

    p = sub.add_parser("witness", help="singleton-based witness constructions")
    p.add_argument("--grid", required=True)
    p.add_argument("--colors", type=int)
    p.add_argument(
        "--strategy",
        choices=("auto", "one_singleton", "two_singletons", "better"),
        default="auto",
    )
    p.add_argument("--strict", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_witness)

    def engine(p, colors_required=True, colors_range=False):
        p.add_argument("--dims", required=True, help="e.g. 4,4")
        if colors_range:
            p.add_argument("--colors", required=True, help="count or range, e.g. 4..7")
        else:
            p.add_argument("--colors", type=int, required=colors_required)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--budget", type=int, help="raw enumeration space cap")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int)
        p.add_argument("--strict", action="store_true")
        p.add_argument("--expect", help="refuted | not-refuted | unknown")
        common(p)

    p = sub.add_parser("verify", help="case-split non-reducibility verifier")
    engine(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("census", help="bad-collection histogram over pairings")
    engine(p, colors_required=False)
    p.add_argument(
        "--crosscheck", choices=("off", "sampled", "exhaustive"), default="sampled"
    )
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("scan", help="verify across a range of color counts")
    engine(p, colors_range=True)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("reduce", help="run a reduction as an encode/decode trace")
    p.add_argument("name", choices=sorted(_REDUCERS))
    p.add_argument(
        "--in",
        dest="inputs",
        action="append",
        default=[],
        help="input stream literal, repeatable for product",
    )
    p.add_argument("--ks", help="factor sizes, e.g. 2,2")
    p.add_argument("--flip", help="flip index or 'none'")
    p.add_argument("--word", help="parity word, e.g. 2,1,1,2")
    p.add_argument("--sigma", help="prefix word for relabeling")
    p.add_argument("-k", type=int, default=0, help="tail threshold for cfi-meet")
    common(p)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("bar", help="even out a parity word")
    p.add_argument("--word", required=True)
    common(p)
    p.set_defaults(fn=cmd_bar)

    p = sub.add_parser("psi", help="emit a backward-map table")
    p.add_argument("--kind", choices=("cascade", "product"), default="cascade")
    p.add_argument("--ks", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("grid", "json"), default="grid")
    p.set_defaults(fn=cmd_psi)

    p = sub.add_parser("enumerate", help="enumerate tables or pairings")
    p.add_argument("--dims", required=True)
    p.add_argument("--colors", type=int)
    p.add_argument("--pairings", action="store_true")
    p.add_argument("--total", action="store_true")
    p.add_argument("--no-singleton", dest="no_singleton", action="store_true")
    p.add_argument(
        "--all-representatives",
        dest="all_representatives",
        action="store_true",
        help="skip the canonical-orbit filter",
    )
    p.add_argument("--count", action="store_true")
    p.add_argument("--limit", type=int)
    p.add_argument("--budget", type=int)
    common(p)
    p.set_defaults(fn=cmd_enumerate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
