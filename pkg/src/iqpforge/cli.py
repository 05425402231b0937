"""Command line front end: gen, attack, forge, baseline, simulate, verify, bench.

Exit codes: 0 success/pass, 1 verification fail or attack failure, 2 usage
or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import protocol, xprogram
from .attack import AttackConfig, extract_key, forge_samples
from .backends import active_backend
from .protocol import SimulationSizeError, VerifierPolicy
from .xprogram import (
    GenerationConfig,
    KeyFormatError,
    SampleParseError,
    XProgramParseError,
    decode_key,
    deserialize,
    encode_key,
    generate,
    samples_from_text,
    samples_to_text,
    serialize,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _read_program(path: str) -> xprogram.XProgram:
    return deserialize(Path(path).read_text(encoding="utf-8"))


def _read_key(path: str, n: int) -> xprogram.SecretKey:
    return decode_key(Path(path).read_text(encoding="utf-8"), n)


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = GenerationConfig(q=args.q, n=args.n, extra_rows=args.extra_rows, seed=args.seed)
    prog, key = generate(cfg)
    _write_text(args.out, serialize(prog))
    _write_text(args.key_out, encode_key(key) + "\n")
    print(f"wrote {args.out} ({prog.P.nrows}x{prog.P.ncols}) and {args.key_out}")
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    prog = _read_program(args.infile)
    cfg = AttackConfig(max_iterations=args.max_iters, seed=args.seed)
    report = extract_key(prog, cfg)
    if args.stats_csv:
        with open(args.stats_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "rank_of_M", "kernel_dim", "candidates_checked", "d_was_good"])
            for i, st in enumerate(report.iterations):
                writer.writerow([i, st.rank_of_M, st.kernel_dim, st.candidates_checked,
                                 "true" if st.d_was_good else "false"])
    if not report.succeeded:
        print(f"no key found after {len(report.iterations)} iterations", file=sys.stderr)
        return EXIT_FAIL
    _write_text(args.key_out, encode_key(report.key) + "\n")
    stats = report.success_stats
    print(
        f"iterations={len(report.iterations)} candidates={stats.candidates_checked} "
        f"rank_deficit={stats.kernel_dim} time={report.wall_time_seconds:.6f}"
    )
    return EXIT_OK


def cmd_forge(args: argparse.Namespace) -> int:
    prog = _read_program(args.infile)
    key = _read_key(args.key, prog.P.ncols)
    rng = np.random.default_rng(args.seed)
    samples = forge_samples(prog, key, args.samples, rng)
    _write_text(args.out, samples_to_text(samples))
    print(f"wrote {args.samples} forged samples to {args.out}")
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    prog = _read_program(args.infile)
    rng = np.random.default_rng(args.seed)
    samples = protocol.baseline_samples(prog, args.samples, rng)
    _write_text(args.out, samples_to_text(samples))
    print(f"wrote {args.samples} baseline samples to {args.out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    prog = _read_program(args.infile)
    rng = np.random.default_rng(args.seed)
    samples = protocol.quantum_sample(prog, args.samples, rng)
    _write_text(args.out, samples_to_text(samples))
    print(f"wrote {args.samples} simulated samples to {args.out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    samples = samples_from_text(Path(args.infile).read_text(encoding="utf-8"))
    if not samples:
        print("error: empty sample file", file=sys.stderr)
        return EXIT_USAGE
    key = _read_key(args.key, len(samples[0]))
    policy = VerifierPolicy(sample_count=len(samples), threshold=args.threshold)
    verdict = protocol.verify(key, samples, policy)
    print(
        f"fraction={verdict.orthogonal_fraction:.6f} threshold={policy.threshold:.6f} "
        f"pass={'true' if verdict.passed else 'false'}"
    )
    return EXIT_OK if verdict.passed else EXIT_FAIL


@dataclass
class BenchRecord:
    q: int
    n: int
    rep: int
    seconds: float
    iterations: int
    rank_deficit: int
    candidates: int


def _bench_one(task: tuple[int, int, int, int, int]) -> BenchRecord | None:
    q, n, extra_rows, rep, seed = task
    cfg = GenerationConfig(q=q, n=n, extra_rows=extra_rows, seed=(seed, q, rep, 0))
    prog, key = generate(cfg)
    report = extract_key(prog, AttackConfig(seed=(seed, q, rep, 1)))
    if not report.succeeded or report.key.s != key.s:
        return None
    stats = report.success_stats
    return BenchRecord(
        q=q,
        n=n,
        rep=rep,
        seconds=report.wall_time_seconds,
        iterations=len(report.iterations),
        rank_deficit=stats.kernel_dim,
        candidates=stats.candidates_checked,
    )


def cmd_bench(args: argparse.Namespace) -> int:
    qs = [int(tok) for tok in args.q_list.split(",") if tok]
    tasks = []
    for q in qs:
        n = (q + 1) // 2 + 1
        for rep in range(args.reps):
            tasks.append((q, n, q, rep, args.seed))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_one, tasks))
    else:
        results = [_bench_one(t) for t in tasks]

    records = []
    for task, rec in zip(tasks, results):
        if rec is None:
            print(f"warning: instance q={task[0]} rep={task[3]} failed; record skipped", file=sys.stderr)
        else:
            records.append(rec)
    records.sort(key=lambda r: (qs.index(r.q), r.rep))

    with open(args.csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "n", "rep", "seconds", "iterations", "rank_deficit", "candidates"])
        for r in records:
            writer.writerow([r.q, r.n, r.rep, f"{r.seconds:.6f}", r.iterations, r.rank_deficit, r.candidates])

    print(f"backend={active_backend()}")
    for q in qs:
        times = [r.seconds for r in records if r.q == q]
        if not times:
            continue
        q1, q3 = np.percentile(times, [25, 75])
        print(
            f"q={q} n={(q + 1) // 2 + 1} reps={len(times)} "
            f"mean={np.mean(times):.6f} q1={q1:.6f} q3={q3:.6f}"
        )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iqpforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an X-program with a planted key")
    p.add_argument("--q", type=int, required=True, help="prime = 7 mod 8, length of the hidden code")
    p.add_argument("--n", type=int, default=None, help="columns (default (q+1)/2 + 1)")
    p.add_argument("--extra-rows", type=int, default=None, help="decoy rows (default q)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="X-program file to write")
    p.add_argument("--key-out", required=True, help="base64 key file to write")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("attack", help="extract the key from an X-program file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--key-out", required=True)
    p.add_argument("--max-iters", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stats-csv", default=None, help="write per-iteration stats here")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("forge", help="forge samples that pass the verifier, given the key")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("baseline", help="honest classical samples (orthogonal fraction 3/4)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("simulate", help="sample the exact quantum distribution (tiny programs only)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check the orthogonal fraction of a sample file")
    p.add_argument("--in", dest="infile", required=True, help="sample file")
    p.add_argument("--key", required=True)
    p.add_argument("--threshold", type=float, default=protocol.DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="generate+attack sweeps, one CSV row per instance")
    p.add_argument("--q-list", required=True, help="comma separated primes, e.g. 103,167")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.n is None:
        args.n = (args.q + 1) // 2 + 1
    try:
        return args.func(args)
    except (XProgramParseError, SampleParseError, KeyFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
