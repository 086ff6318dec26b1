"""Command-line entry point.

Exit status: 0 success, 1 a verification failed, 2 bad usage or input,
3 file I/O error, 4 integer overflow.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .bitmat import BitMatrix, from_hex, read_matrix_set, write_matrix_set
from .errors import (ConfigError, ContractError, DependencyError, DimensionError,
                     IntegerOverflowError, MatrixFormatError, ParseError)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO, EXIT_OVERFLOW = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    subcommand: str
    max_order: int = 0
    thread_count: int = 1
    memory_budget: int = 0
    checkpoint_dir: Path | None = None
    input_path: Path | None = None
    output_path: Path | None = None
    format: str = "text"
    symmetry: bool = True
    warm_start: bool = True
    pruning: bool = True
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.thread_count < 1:
            raise ConfigError("--threads must be at least 1")
        if self.memory_budget and self.memory_budget < (self.max_order + 1) ** 2:
            raise ConfigError("--budget must be at least (max_order+1)^2")
        if self.format not in ("text", "binary"):
            raise ConfigError("--format must be text or binary")
        if self.extra.get("max_raw") is not None and self.extra["max_raw"] < 1:
            raise ConfigError("--max-raw must be at least 1")


def _matrices(args) -> list[BitMatrix]:
    mats = [from_hex(t) for t in args.matrix]
    if getattr(args, "input", None):
        mats.extend(read_matrix_set(args.input))
    if not mats:
        raise ConfigError("no matrices given")
    return mats


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


# -- subcommands -------------------------------------------------------------------

def _shard(text: str | None) -> tuple[int, int] | None:
    if not text:
        return None
    try:
        k, total = (int(t) for t in text.split("/"))
    except ValueError:
        raise ConfigError(f"--shard expects K/N, got {text!r}") from None
    if not 0 <= k < total:
        raise ConfigError("--shard needs 0 <= K < N")
    return k, total


def cmd_classify(cfg: RunConfig, out) -> int:
    from .classify import (DEFAULT_BUDGET, classify_level, classify_up_to, format_summary, verify_level,
                           write_binary_set)
    budget = cfg.memory_budget or DEFAULT_BUDGET
    shard = _shard(cfg.extra.get("shard"))
    max_raw = cfg.extra.get("max_raw")
    n = cfg.max_order
    if (shard or max_raw) and n > 1:
        # a truncated run of the top order only; lower orders are loaded or computed
        prev = _levels_for(cfg, n - 1)[-1]
        results = [classify_level(prev.phi_reps, n, cfg.thread_count, cfg.warm_start, cfg.symmetry,
                                  budget, shard=shard, max_raw=max_raw)]
    else:
        results = classify_up_to(n, cfg.thread_count, cfg.checkpoint_dir,
                                 warm=cfg.warm_start, symmetry=cfg.symmetry, budget=budget)
    status = EXIT_OK
    for res in results:
        rep = verify_level(res)
        tag = " (partial)" if res.partial else ""
        if cfg.extra.get("tsv"):
            out.write(f"# order {res.order}{tag}\n")
            out.write(format_summary(res))
        else:
            rows = [["SNF", "matrices", "pi-classes", "phi-classes", "representative"]]
            for r in res.records:
                rows.append([r.snf.short(), str(r.matrices), str(r.pi_classes), str(r.phi_classes),
                             r.representative.hex_line()])
            rows.append(["Total", str(res.matrix_total), str(res.pi_total), str(len(res.phi_reps)), ""])
            out.write(f"order {res.order}{tag}\n{_table(rows)}\n\n")
        for v in rep.violations:
            out.write(f"VIOLATION order {res.order}: {v}\n")
            status = EXIT_VERIFY
        if cfg.format == "binary" and cfg.checkpoint_dir is not None and 2 <= res.order <= 8 \
                and not res.partial:
            write_binary_set(Path(cfg.checkpoint_dir) / f"order{res.order}_phi.bin", res.phi_reps, res.order)
    return status


def cmd_canon(args, out) -> int:
    from .canon import phi_representative, pi_class_size, pi_representative
    for a in _matrices(args):
        if args.phi:
            fields = [phi_representative(a).hex_line()]
        else:
            cert = pi_representative(a, symmetry=not args.no_symmetry)
            fields = [cert.rep.hex_line()]
            if args.count:
                fields.append(str(cert.count))
            if args.size:
                fields.append(str(pi_class_size(a)))
        out.write("\t".join(fields) + "\n")
    return EXIT_OK


def cmd_snf(args, out) -> int:
    from .snf import smith_normal_form
    for a in _matrices(args):
        s = smith_normal_form(a)
        out.write((s.short() if args.short else str(s)) + "\n")
    return EXIT_OK


def _levels_for(cfg: RunConfig, n: int):
    from .classify import DEFAULT_BUDGET, classify_up_to, load_checkpoint
    if cfg.checkpoint_dir is not None and all(
            (Path(cfg.checkpoint_dir) / f"order{k}_summary.tsv").exists() for k in range(1, n + 1)):
        return [load_checkpoint(cfg.checkpoint_dir, k) for k in range(1, n + 1)]
    return classify_up_to(n, cfg.thread_count, cfg.checkpoint_dir, warm=cfg.warm_start,
                          symmetry=cfg.symmetry, budget=cfg.memory_budget or DEFAULT_BUDGET)


def cmd_spectrum(cfg: RunConfig, out) -> int:
    from .spectra import spectrum
    n = cfg.max_order
    full = not cfg.extra.get("extension_only")
    levels = _levels_for(cfg, n if full else n - 1) if n > 1 else _levels_for(cfg, 1)
    prev = levels[n - 2] if n >= 2 else None
    level = levels[n - 1] if full else None
    rep = spectrum(n, prev, level)
    out.write("order\tsize_D\ta\td\tc\tm\tD\n")
    out.write(f"{n}\t{len(rep.D)}\t{rep.a}\t{rep.d}\t{'' if rep.c is None else rep.c}\t"
              f"{'' if rep.m is None else rep.m}\t{_ranges(sorted(rep.D))}\n")
    if rep.rank_census is not None:
        out.write("rank\tmatrices\n")
        for k, v in rep.rank_census.items():
            out.write(f"{k}\t{v}\n")
    return EXIT_OK


def _ranges(vals: list[int]) -> str:
    parts = []
    i = 0
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and vals[j + 1] == vals[j] + 1:
            j += 1
        parts.append(str(vals[i]) if i == j else f"{vals[i]}-{vals[j]}")
        i = j + 1
    return ",".join(parts)


def cmd_incidence(cfg: RunConfig, out) -> int:
    from .spectra import incidence
    levels = _levels_for(cfg, cfg.max_order)
    inc = incidence(levels[-1], mode=cfg.extra.get("mode", "phi"))
    out.write(inc.render(ascii_only=cfg.extra.get("ascii", False)))
    for d in inc.discrepancies:
        out.write(f"# {d}\n")
    return EXIT_OK


def cmd_bound(cfg: RunConfig, args, out) -> int:
    from .bounds import iterate_bounds, verify_witnesses
    seeds = read_matrix_set(args.seeds)
    if not seeds:
        raise ConfigError("seed file is empty")
    if args.order and seeds[0].order + 1 != args.order:
        raise ConfigError(f"seeds have order {seeds[0].order}, which bounds order {seeds[0].order + 1}")
    table, runs = iterate_bounds(seeds, args.rounds, cap=args.cap, prune=cfg.pruning)
    out.write("order\tbound\n")
    for order, bound in table:
        out.write(f"{order}\t{bound}\n")
    status = EXIT_OK
    for run in runs:
        bad = verify_witnesses(run)
        if bad:
            out.write(f"VIOLATION order {run.order}: witnesses fail for {bad[:10]}\n")
            status = EXIT_VERIFY
    last = runs[-1]
    if args.witness_out:
        with open(args.witness_out, "w", encoding="ascii") as fh:
            fh.write("value\tseed\tx\ty\tb\tmatrix\n")
            for v, (s, x, y, b) in sorted(last.witnesses.items()):
                fh.write(f"{v}\t{s}\t{x:X}\t{y:X}\t{b}\t{last.witness_matrix(v).hex_line()}\n")
    if args.promising_out:
        write_matrix_set(args.promising_out, sorted(last.promising, key=BitMatrix.key))
    if len(runs) < args.rounds:
        out.write(f"# stopped after {len(runs)} rounds: no promising matrices\n")
    return status


def cmd_count(args, out) -> int:
    from . import count
    what = args.what
    if what == "pi":
        v = count.pi_class_count(args.n)
    elif what == "rank1":
        v = count.rank1_count(args.n)
    elif what == "rank2":
        v = count.rank2_count(args.n)
    elif what == "partitions":
        v = count.partitions_at_most(args.n, args.r)
    else:
        v = count.snf_count_upper_bound(args.n, args.r)
    out.write(f"{v}\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args, out) -> int:
    from .classify import load_checkpoint, verify_level
    from .spectra import verify_counterexample
    status = EXIT_OK
    if args.counterexample:
        rep = verify_counterexample()
        out.write(f"counterexample\trank={rep.rank}\tsnf={rep.snf.short()}\t"
                  f"unit_minors={rep.minors_with_unit_snf}\t{'PASS' if rep.ok else 'FAIL'}\n")
        if not rep.ok:
            status = EXIT_VERIFY
    if cfg.checkpoint_dir is not None:
        d = Path(cfg.checkpoint_dir)
        orders = sorted(int(p.name[5:-12]) for p in d.glob("order*_summary.tsv"))
        if not orders:
            raise FileNotFoundError(f"no checkpoints in {d}")
        for n in orders:
            rep = verify_level(load_checkpoint(d, n))
            out.write(f"order {n}\t{'PASS' if rep.ok else 'FAIL'}\n")
            for v in rep.violations:
                out.write(f"VIOLATION order {n}: {v}\n")
            if not rep.ok:
                status = EXIT_VERIFY
    return status


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zomat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, order_flag=True):
        if order_flag:
            sp.add_argument("--max-order", "--order", dest="max_order", type=int, required=True)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--budget", type=int, default=0, help="matrices held by the φ sweep")
        sp.add_argument("--checkpoint-dir", type=Path)
        sp.add_argument("--no-symmetry", action="store_true")
        sp.add_argument("--no-warm-start", action="store_true")

    sp = sub.add_parser("classify", help="classify all matrices up to an order")
    common(sp)
    sp.add_argument("--tsv", action="store_true")
    sp.add_argument("--format", choices=["text", "binary"], default="text")
    sp.add_argument("--shard", help="K/N: extend only seeds K, K+N, ... of the top order")
    sp.add_argument("--max-raw", type=int, help="keep only this many extension π-representatives")

    sp = sub.add_parser("canon", help="canonical representatives")
    sp.add_argument("matrix", nargs="*", help="comma-separated hex rows")
    sp.add_argument("--input", type=Path)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--pi", action="store_true", default=True)
    g.add_argument("--phi", action="store_true")
    sp.add_argument("--count", action="store_true")
    sp.add_argument("--size", action="store_true")
    sp.add_argument("--no-symmetry", action="store_true")

    sp = sub.add_parser("snf", help="Smith normal form")
    sp.add_argument("matrix", nargs="*")
    sp.add_argument("--input", type=Path)
    sp.add_argument("--short", action="store_true")

    sp = sub.add_parser("spectrum", help="determinant spectrum of an order")
    common(sp)
    sp.add_argument("--extension-only", action="store_true",
                    help="work from the previous order only (no rank census)")

    sp = sub.add_parser("incidence", help="Smith-form incidence between orders n and n+1")
    common(sp)
    sp.add_argument("--ascii", action="store_true")
    sp.add_argument("--mode", choices=["phi", "representative"], default="phi")

    sp = sub.add_parser("bound", help="lower bound for the first missing determinant")
    sp.add_argument("--seeds", type=Path, required=True)
    sp.add_argument("--order", type=int, default=0)
    sp.add_argument("--rounds", type=int, default=1)
    sp.add_argument("--cap", type=int, default=10 ** 4)
    sp.add_argument("--no-prune", action="store_true")
    sp.add_argument("--witness-out", type=Path)
    sp.add_argument("--promising-out", type=Path)

    sp = sub.add_parser("count", help="closed-form counts")
    sp.add_argument("what", choices=["pi", "rank1", "rank2", "partitions", "snf-bound"])
    sp.add_argument("n", type=int)
    sp.add_argument("r", type=int, nargs="?", default=0)

    sp = sub.add_parser("verify", help="re-check checkpoints and fixtures")
    sp.add_argument("--checkpoint-dir", type=Path)
    sp.add_argument("--counterexample", action="store_true")
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig(
        subcommand=args.cmd,
        max_order=getattr(args, "max_order", 0) or 0,
        thread_count=getattr(args, "threads", 1),
        memory_budget=getattr(args, "budget", 0),
        checkpoint_dir=getattr(args, "checkpoint_dir", None),
        format=getattr(args, "format", "text"),
        symmetry=not getattr(args, "no_symmetry", False),
        warm_start=not getattr(args, "no_warm_start", False),
        pruning=not getattr(args, "no_prune", False),
        extra={k: getattr(args, k) for k in ("tsv", "ascii", "mode", "extension_only", "shard", "max_raw")
               if hasattr(args, k)},
    )
    cfg.validate()
    return cfg


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        if args.cmd == "classify":
            return cmd_classify(cfg, out)
        if args.cmd == "canon":
            return cmd_canon(args, out)
        if args.cmd == "snf":
            return cmd_snf(args, out)
        if args.cmd == "spectrum":
            return cmd_spectrum(cfg, out)
        if args.cmd == "incidence":
            return cmd_incidence(cfg, out)
        if args.cmd == "bound":
            return cmd_bound(cfg, args, out)
        if args.cmd == "count":
            return cmd_count(args, out)
        return cmd_verify(cfg, args, out)
    except IntegerOverflowError as exc:
        print(f"zomat: overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except OSError as exc:
        print(f"zomat: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ContractError, DependencyError, DimensionError, MatrixFormatError,
            ParseError, ValueError) as exc:
        print(f"zomat: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
