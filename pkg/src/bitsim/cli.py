"""Command-line interface.

    bitsim <command> <tbox-file> [args] [--chunk N] [--penalty] [--seed N]
           [--trials N] [-v] [--fig-dir DIR]

Exit codes: 0 success, 1 usage, 2 input error, 3 undefined similarity,
4 property or cross-check failure.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import dl, engine, oracle, report, similarity
from .encoding import (
    EncodingContext,
    EncodingError,
    build_context,
    encode,
    serialize,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_UNDEFINED = 3
EXIT_FAILED = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class InputError(Exception):
    pass


def _load(tbox_path: str) -> tuple[dl.TBox, EncodingContext]:
    try:
        with open(tbox_path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {tbox_path}: {exc}") from exc
    tbox = dl.parse_tbox(text)
    return tbox, build_context(tbox)


def _expr(text: str) -> dl.ConceptExpr:
    return dl.parse_expr(text)


def _config(args) -> similarity.SimilarityConfig:
    return similarity.SimilarityConfig(
        generativity_penalty=args.penalty, chunk_size=args.chunk
    )


def _print_breakdown(rep: similarity.SimilarityReport) -> None:
    print("position\tpair\tweight\tvalue")
    for entry in rep.entries:
        value = "ignored" if entry.value is similarity.IGNORED else f"{float(entry.value):.6f}"
        print(f"{entry.label}\t{entry.pair}\t{entry.weight}\t{value}")
    if rep.fcg_pair is not None:
        print(f"fcg\t{rep.fcg_pair[0]}\t{rep.fcg_pair[1]}\t{float(rep.penalty_ratio or 1):.6f}")


def cmd_encode(args) -> int:
    tbox, ctx = _load(args.tbox)
    for name in args.names:
        if name not in ctx.concept_position and name not in tbox.definitions:
            raise InputError(f"undeclared name {name!r}")
        code = encode(dl.Atomic(name), ctx)
        print(f"{name}\t{serialize(code)}")
    return EXIT_OK


def cmd_sim(args) -> int:
    _, ctx = _load(args.tbox)
    cfg = _config(args)
    code_a = encode(_expr(args.left), ctx)
    code_b = encode(_expr(args.right), ctx)
    rep = engine.sim_chunked(code_a, code_b, cfg, engine.ChunkCache())
    print(f"{rep.score:.6f}")
    if args.verbose:
        _print_breakdown(rep)
    return EXIT_OK


def cmd_jaccard(args) -> int:
    _, ctx = _load(args.tbox)
    rep = similarity.bitsim_jaccard(_expr(args.left), _expr(args.right), ctx, _config(args))
    print(f"{rep.score:.6f}")
    if args.verbose:
        _print_breakdown(rep)
    return EXIT_OK


def cmd_subsume(args) -> int:
    _, ctx = _load(args.tbox)
    verdict = similarity.subsumes(
        encode(_expr(args.left), ctx), encode(_expr(args.right), ctx), ctx
    )
    print("unknown" if verdict is similarity.UNKNOWN else ("true" if verdict else "false"))
    return EXIT_OK


def cmd_lcs(args) -> int:
    _, ctx = _load(args.tbox)
    print(serialize(similarity.lcs_atomic(args.left, args.right, ctx)))
    return EXIT_OK


def cmd_fcg(args) -> int:
    _, ctx = _load(args.tbox)
    code = encode(_expr(args.expr), ctx)
    try:
        print(similarity.fcg(code, _config(args)))
    except similarity.FcgError as exc:
        raise InputError(str(exc)) from exc
    return EXIT_OK


def _matrix_names(tbox: dl.TBox) -> list[str]:
    return list(tbox.atomic_concepts) + sorted(tbox.definitions)


def cmd_matrix(args) -> int:
    tbox, ctx = _load(args.tbox)
    names = _matrix_names(tbox)
    codes = [encode(dl.Atomic(n), ctx) for n in names]
    cache = engine.ChunkCache()
    matrix = engine.all_pairs(codes, _config(args), cache)
    sys.stdout.write(report.matrix_tsv(names, matrix))
    if args.fig_dir:
        path = report.render_matrix_heatmap(
            names, matrix, report.figure_path(args.fig_dir, "matrix.png")
        )
        print(f"figure\t{path}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    tbox, _ = _load(args.tbox)
    rep = similarity.check_properties(tbox, _config(args), seed=args.seed, trials=args.trials)
    sys.stdout.write(rep.to_tsv())
    if args.fig_dir:
        path = report.render_property_figure(
            rep.rows, report.figure_path(args.fig_dir, "properties.png")
        )
        print(f"figure\t{path}", file=sys.stderr)
    return EXIT_OK if rep.total_violations == 0 else EXIT_FAILED


def cmd_crosscheck(args) -> int:
    tbox, _ = _load(args.tbox)
    try:
        rep = oracle.cross_check(
            tbox, trials=args.trials, seed=args.seed, roles=args.roles, cfg=_config(args)
        )
    except oracle.OracleCapExceeded as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(rep.to_tsv())
    return EXIT_OK if rep.disagreements == 0 else EXIT_FAILED


def cmd_bench(args) -> int:
    tbox, ctx = _load(args.tbox)
    names = _matrix_names(tbox)
    codes = [encode(dl.Atomic(n), ctx) for n in names]
    if args.codes > len(codes):
        codes = [codes[i % len(codes)] for i in range(args.codes)]
    rows = []
    for chunk in (1, 8, 64, 256):
        cfg = similarity.SimilarityConfig(
            generativity_penalty=args.penalty, chunk_size=chunk
        )
        cache = engine.ChunkCache()
        started = time.perf_counter()
        engine.all_pairs(codes, cfg, cache)
        elapsed = time.perf_counter() - started
        pairs = len(codes) * (len(codes) - 1) // 2
        entries, hits, misses = cache.stats()
        rows.append(
            {
                "chunk_size": chunk,
                "pairs": pairs,
                "seconds_per_pair": elapsed / max(pairs, 1),
                "entries": entries,
                "hits": hits,
                "misses": misses,
                "hit_rate": hits / max(hits + misses, 1),
            }
        )
    sys.stdout.write(report.bench_tsv(rows))
    if args.fig_dir:
        path = report.render_bench_figure(
            rows, report.figure_path(args.fig_dir, "bench.png")
        )
        print(f"figure\t{path}", file=sys.stderr)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chunk", type=int, default=64, help="chunk size (default 64)")
    p.add_argument("--penalty", action="store_true", help="enable the generativity penalty")
    p.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    p.add_argument("--trials", type=int, default=1000, help="trial count (default 1000)")
    p.add_argument("-v", "--verbose", action="store_true", help="per-position breakdown")
    p.add_argument("--fig-dir", default=None, help="also render figures into this directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="bitsim", description="bit-code similarity for ALCH+ concepts")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str, positionals: list[tuple[str, dict]]):
        p = sub.add_parser(name, help=help_)
        p.add_argument("tbox", help="terminology file")
        for arg, kwargs in positionals:
            p.add_argument(arg, **kwargs)
        _add_common(p)
        p.set_defaults(func=func)
        return p

    add("encode", cmd_encode, "print bit-codes of names",
        [("names", {"nargs": "+", "help": "concept names"})])
    add("sim", cmd_sim, "aggregate similarity of two expressions",
        [("left", {}), ("right", {})])
    add("jaccard", cmd_jaccard, "Jaccard-style similarity of two expressions",
        [("left", {}), ("right", {})])
    add("subsume", cmd_subsume, "code-level subsumption verdict",
        [("left", {}), ("right", {})])
    add("lcs", cmd_lcs, "least common subsumer code of two atomics",
        [("left", {}), ("right", {})])
    add("fcg", cmd_fcg, "code generativity of an expression",
        [("expr", {})])
    add("matrix", cmd_matrix, "all-pairs similarity matrix", [])
    add("check", cmd_check, "similarity property suite", [])
    crosscheck = add("crosscheck", cmd_crosscheck, "oracle cross-check", [])
    crosscheck.add_argument("--roles", action="store_true",
                            help="add refutation-only role-mode trials")
    bench = add("bench", cmd_bench, "wall time per pair across chunk sizes", [])
    bench.add_argument("--codes", type=int, default=0,
                       help="cycle the atom codes up to this count")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except similarity.UndefinedSimilarity as exc:
        print(f"undefined similarity: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (InputError, dl.DlError, EncodingError, oracle.OracleCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
