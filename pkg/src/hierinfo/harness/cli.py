"""Command-line interface: ``hierinfo <subcommand> [options]``.

Exit codes: 0 success, 1 usage, 2 data/validation error, 3 non-convergence.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .. import __version__
from ..cluster import (
    build_ensemble,
    central,
    eccentricity,
    animals_path,
    load_dataset,
    vertex_stats,
    ParseError,
    DuplicateLabel,
    TooManyMissing,
)
from ..genpart import enum_hier_partitions, random_hier_partition
from ..hpart import (
    PartitionSyntaxError,
    SizeMismatch,
    ValidationError,
    read_hp,
    serialize,
    write_hpl,
)
from ..infotheory import (
    DegenerateDenominator,
    MeanKind,
    dn,
    hce,
    hentropy,
    hje,
    hmi_levels,
    hmi_recursive,
    hvi,
    nhmi,
)
from ..nullmodel import ahmi, ehmi, make_rng
from . import experiments
from .tables import write_table

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NONCONV = 0, 1, 2, 3
LN2 = math.log(2.0)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed (u64)")
    common.add_argument("--threads", type=int, default=1, help="worker processes")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--bits", action="store_true", help="report information in bits")

    p = _Parser(prog="hierinfo", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hierinfo {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compare", parents=[common], help="all measures between two .hp files")
    c.add_argument("file_a", type=Path)
    c.add_argument("file_b", type=Path)
    c.add_argument("--mean", choices=[m.value for m in MeanKind], default="arithmetic")
    c.add_argument("--levels", action="store_true", help="print per-level decomposition")
    c.add_argument("--ahmi", action="store_true", help="also compute EHMI and AHMI")
    c.add_argument("--rel-sem", type=float, default=0.01)
    c.add_argument("--max-samples", type=int, default=100_000)

    t = sub.add_parser("scan-triangle", parents=[common], help="exhaustive triangle-defect CCDF")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--measure", choices=["hvi", "dn"], default="hvi")

    nc = sub.add_parser("null-curves", parents=[common], help="chance-similarity curves")
    nc.add_argument("--n-list", type=_int_list, default=[8, 16, 32, 64, 128])
    nc.add_argument("--pairs", type=int, default=1000)
    nc.add_argument("--rel-sem", type=float, default=0.01)
    nc.add_argument("--max-samples", type=int, default=100_000)
    nc.add_argument("--on-trivial", choices=["leaf", "redraw"], default="leaf")

    sd = sub.add_parser("shuffle-decay", parents=[common], help="HMI/AHMI versus shuffled k")
    sd.add_argument("--n-list", type=_int_list, default=[16, 32, 64])
    sd.add_argument("--samples", type=int, default=10_000)
    sd.add_argument("--k-list", type=_int_list, default=None, help="default 0..n")
    sd.add_argument("--ahmi-k", type=_int_list, default=None, help="k values with AHMI (default all)")
    sd.add_argument("--mean", choices=[m.value for m in MeanKind], default="arithmetic")
    sd.add_argument("--rel-sem", type=float, default=0.01)
    sd.add_argument("--max-samples", type=int, default=100_000)
    sd.add_argument("--on-trivial", choices=["leaf", "redraw"], default="leaf")

    e = sub.add_parser("enumerate", parents=[common], help="all hierarchical partitions of n")
    e.add_argument("--n", type=int, required=True)

    r = sub.add_parser("random", parents=[common], help="random hierarchical partitions")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--count", type=int, default=1)
    r.add_argument("--on-trivial", choices=["leaf", "redraw"], default="leaf")

    cl = sub.add_parser("cluster", parents=[common], help="clustering ensemble pipeline")
    cl.add_argument("data", type=Path, nargs="?", default=None,
                    help="feature CSV (default: bundled animals data)")
    return p


def _unit(args) -> tuple[float, str]:
    return (LN2, "bits") if args.bits else (1.0, "nats")


def _cmd_compare(args) -> int:
    A, B = read_hp(args.file_a), read_hp(args.file_b)
    scale, unit = _unit(args)
    rows = [
        ("hmi", hmi_recursive(A, B) / scale, unit),
        ("he_a", hentropy(A) / scale, unit),
        ("he_b", hentropy(B) / scale, unit),
        ("hje", hje(A, B) / scale, unit),
        ("hce_a_given_b", hce(A, B) / scale, unit),
        ("hce_b_given_a", hce(B, A) / scale, unit),
        ("hvi", hvi(A, B).total / scale, unit),
    ]
    try:
        rows.append((f"nhmi_{args.mean}", nhmi(A, B, args.mean), ""))
    except DegenerateDenominator:
        rows.append((f"nhmi_{args.mean}", None, "degenerate"))
    rows.append(("dn", dn(A, B), ""))
    status = EXIT_OK
    if args.ahmi:
        est = ehmi(A, B, args.rel_sem, max_samples=args.max_samples, rng=make_rng(args.seed))
        rows.append(("ehmi", est.mean / scale, unit))
        rows.append(("ehmi_sem", est.sem / scale, unit))
        rows.append(("ehmi_samples", est.samples, "exhaustive" if est.exhausted else ""))
        try:
            rows.append((f"ahmi_{args.mean}", ahmi(A, B, args.mean, estimate=est), ""))
        except DegenerateDenominator:
            rows.append((f"ahmi_{args.mean}", None, "degenerate"))
        if not est.converged:
            status = EXIT_NONCONV
    if args.levels:
        for l, v in enumerate(hmi_levels(A, B).per_level):
            rows.append((f"hmi_level_{l}", v / scale, unit))
        for l, v in enumerate(hvi(A, B).per_level):
            rows.append((f"hvi_level_{l}", v / scale, unit))
    for name, value, note in rows:
        shown = "nan" if value is None else (f"{value:.10g}" if isinstance(value, float) else value)
        print(f"{name}\t{shown}\t{note}".rstrip())
    if args.out:
        write_table(args.out / "compare.csv", ["measure", "value", "note"], rows,
                    file_a=str(args.file_a), file_b=str(args.file_b), seed=args.seed)
    return status


def _cmd_scan(args) -> int:
    scan = experiments.scan_triangle(args.n, args.measure)
    scale = LN2 if (args.bits and args.measure == "hvi") else 1.0
    print(f"n={scan.n} partitions={scan.n_partitions} triples={scan.n_triples}")
    print(f"min={scan.min_value / scale:.10g} at {' '.join(scan.argmin)}")
    print(f"max={scan.max_value / scale:.10g} at {' '.join(scan.argmax)}")
    if args.out:
        params = dict(n=args.n, measure=args.measure, bits=args.bits, binned=scan.binned)
        write_table(args.out / f"ccdf_{args.measure}_n{args.n}.csv", ["x", "ccdf"],
                    zip((scan.table.x / scale).tolist(), scan.table.ccdf.tolist()), **params)
        write_table(args.out / f"extremes_{args.measure}_n{args.n}.csv",
                    ["kind", "value", "T", "S", "R"],
                    [("min", scan.min_value / scale, *scan.argmin),
                     ("max", scan.max_value / scale, *scan.argmax)], **params)
    return EXIT_OK


def _curve_rows(points, scale_for):
    for p in points:
        s = scale_for(p.curve)
        yield (p.curve, p.n, p.k, p.value / s, p.stderr / s, p.count)


def _cmd_null(args) -> int:
    res = experiments.null_curves(args.n_list, args.pairs, args.seed, args.threads,
                                  args.rel_sem, args.max_samples, args.on_trivial)
    scale = LN2 if args.bits else 1.0
    scale_for = lambda c: 1.0 if c.startswith("ratio") else scale  # noqa: E731
    rows = list(_curve_rows(res.points, scale_for))
    for row in rows:
        print("\t".join(str(x) for x in row))
    if args.out:
        write_table(args.out / "null_curves.csv", ["curve", "n", "k", "value", "stderr", "count"],
                    rows, seed=args.seed, n_list=args.n_list, pairs=args.pairs,
                    rel_sem=args.rel_sem, on_trivial=args.on_trivial, bits=args.bits)
    return EXIT_NONCONV if res.unconverged else EXIT_OK


def _cmd_shuffle(args) -> int:
    res = experiments.shuffle_decay(args.n_list, args.samples, args.seed, args.k_list,
                                    None if args.ahmi_k is None else set(args.ahmi_k),
                                    args.threads, args.rel_sem, args.max_samples,
                                    args.mean, args.on_trivial)
    scale = LN2 if args.bits else 1.0
    scale_for = lambda c: scale if c == "mean_hmi" else 1.0  # noqa: E731
    rows = list(_curve_rows(res.points, scale_for))
    for row in rows:
        print("\t".join(str(x) for x in row))
    if args.out:
        write_table(args.out / "shuffle_decay.csv", ["curve", "n", "k", "value", "stderr", "count"],
                    rows, seed=args.seed, n_list=args.n_list, samples=args.samples,
                    mean=args.mean, rel_sem=args.rel_sem, on_trivial=args.on_trivial,
                    bits=args.bits)
    return EXIT_NONCONV if res.unconverged else EXIT_OK


def _emit_hpl(args, parts, name, **params) -> None:
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        header = f"hierinfo {__version__} " + " ".join(f"{k}={v}" for k, v in params.items())
        write_hpl(args.out / name, parts, header=header)
    else:
        for hp in parts:
            print(serialize(hp))


def _cmd_enumerate(args) -> int:
    if args.n < 1:
        raise ValueError("n must be >= 1")
    _emit_hpl(args, enum_hier_partitions(args.n), f"hier_n{args.n}.hpl", n=args.n)
    return EXIT_OK


def _cmd_random(args) -> int:
    rng = make_rng(args.seed)
    parts = [random_hier_partition(args.n, rng, args.on_trivial) for _ in range(args.count)]
    _emit_hpl(args, parts, f"random_n{args.n}.hpl", n=args.n, count=args.count,
              seed=args.seed, on_trivial=args.on_trivial)
    return EXIT_OK


def run_cluster(data_path, out_dir) -> dict:
    """Full ensemble pipeline; writes the four output files when ``out_dir`` is set."""
    fm = load_dataset(data_path)
    ens = build_ensemble(fm)
    ecc = eccentricity(ens)
    idx = central(ens, ecc)
    hat = ens.members[idx].partition
    stats = vertex_stats(hat, ens)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        legend = " ".join(f"{i + 1}={lab}" for i, lab in enumerate(fm.row_labels))
        cells = " ".join(f"{fm.row_labels[r]}.{fm.col_labels[c]}" for r, c in ens.missing_cells)
        write_hpl(out_dir / "ensemble.hpl", [m.partition for m in ens.members],
                  header=f"hierinfo {__version__} data={data_path}\nelements: {legend}\n"
                         f"missing cells (bit order): {cells}")
        write_table(out_dir / "eccentricity.csv", ["index", "completion_bits", "eccentricity"],
                    [(i, "".join(map(str, m.completion_bits)), ecc[i])
                     for i, m in enumerate(ens.members)],
                    data=str(data_path), missing_cells=cells)
        (out_dir / "central.hp").write_text(serialize(hat) + "\n", encoding="utf-8")
        write_table(out_dir / "vertex_stats.csv",
                    ["path", "depth", "members", "mean", "stddev", "cv"],
                    [("/".join(("root",) + tuple(map(str, s.path))), s.depth, s.count, s.mean, s.stddev, s.cv)
                     for s in stats], data=str(data_path), central_index=idx)
    return {"matrix": fm, "ensemble": ens, "eccentricity": ecc, "central": idx, "stats": stats}


def _cmd_cluster(args) -> int:
    data = args.data if args.data is not None else animals_path()
    res = run_cluster(data, args.out)
    fm, ens, idx = res["matrix"], res["ensemble"], res["central"]
    print(f"members={len(ens.members)} central={idx} eccentricity={res['eccentricity'][idx]:.10g}")
    for (r, c), bit in zip(ens.missing_cells, ens.members[idx].completion_bits):
        print(f"{fm.row_labels[r]}.{fm.col_labels[c]}={bit}")
    print(serialize(ens.members[idx].partition))
    return EXIT_OK


_COMMANDS = {
    "compare": _cmd_compare,
    "scan-triangle": _cmd_scan,
    "null-curves": _cmd_null,
    "shuffle-decay": _cmd_shuffle,
    "enumerate": _cmd_enumerate,
    "random": _cmd_random,
    "cluster": _cmd_cluster,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PartitionSyntaxError, ValidationError, SizeMismatch, ParseError, DuplicateLabel,
            TooManyMissing, OSError, experiments.NOutOfRange, ValueError) as exc:
        print(f"hierinfo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
