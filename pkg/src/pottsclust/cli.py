"""Command-line entry point: ``pottsclust {generate,solve,benchmark,oracle,graph-check}``.

Exit codes: 0 success, 1 usage or input error, 2 solver did not freeze,
3 oracle instance too large, 4 graph identities failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .annealer import AnnealConfig, AnnealError, anneal, build_interactions
from .benchmark import benchmark_rows, csv_text, generate_instance, run_log_lines, warm_up
from .evidence import EvidenceError, metaconflict
from .graph import TooLarge as GraphTooLarge
from .graph import graph_check
from .io import dumps_evidence, read_evidence
from .oracle import TooLarge, enumerate_min

EXIT_OK, EXIT_USAGE, EXIT_NOT_FROZEN, EXIT_TOO_LARGE, EXIT_CHECK_FAILED = 0, 1, 2, 3, 4

ANNEAL_FLAGS = {
    "tau": float, "epsilon": float, "alpha": float, "gamma": float, "lambda": float,
    "sweep_tol": float, "saturation_tol": float, "max_sweeps_per_temp": int, "max_temps": int,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _clean(x):
    # non-finite floats are not valid JSON
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _dump(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True)


def _add_anneal_flags(p: argparse.ArgumentParser) -> None:
    for name, typ in ANNEAL_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None)
    p.add_argument("--config", type=Path, help="flat JSON object of anneal settings")


def _anneal_config(args, q: int) -> AnnealConfig:
    doc: dict = {}
    if args.config is not None:
        try:
            doc.update(json.loads(args.config.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for name in ANNEAL_FLAGS:
        v = getattr(args, name)
        if v is not None:
            doc[name] = v
    doc["q"] = q
    if args.seed is not None:
        doc["seed"] = args.seed
    try:
        return AnnealConfig.from_mapping(doc)
    except (AnnealError, TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pottsclust", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a benchmark evidence file")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--run-index", type=int, default=0)
    g.add_argument("--out", default="-")

    s = sub.add_parser("solve", help="cluster an evidence file by mean-field annealing")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--seed", type=int, default=None)
    _add_anneal_flags(s)

    b = sub.add_parser("benchmark", help="run the benchmark family and write a CSV")
    b.add_argument("--k-min", type=int, required=True)
    b.add_argument("--k-max", type=int, required=True)
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", default="-")
    b.add_argument("--log", default=None, help="JSON-lines per-run log")
    b.add_argument("--no-timing", action="store_true",
                   help="write zero for timing fields so output is reproducible byte for byte")
    _add_anneal_flags(b)

    o = sub.add_parser("oracle", help="exhaustive minimum over all partitions")
    o.add_argument("--in", dest="infile", required=True)
    o.add_argument("--q", type=int, required=True)
    o.add_argument("--objective", choices=("exact", "linearized"), default="exact")

    c = sub.add_parser("graph-check", help="verify spin/bond identities on a random tiny instance")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--beta", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=0)
    return parser


def _write(target: str, text: str, stdout) -> None:
    if target == "-":
        stdout.write(text)
    else:
        Path(target).write_text(text)


def _cmd_generate(args, stdout) -> int:
    inst = generate_instance(args.k, args.seed, args.run_index)
    _write(args.out, dumps_evidence(inst.frame, inst.evidence), stdout)
    return EXIT_OK


def _cmd_solve(args, stdout) -> int:
    _, evidence = read_evidence(args.infile)
    if not evidence:
        raise UsageError("evidence file holds no evidence")
    cfg = _anneal_config(args, args.q)
    res = anneal(evidence, cfg)
    capped = len(evidence) > 1 and build_interactions(evidence, cfg.lam).capped
    out = {
        "partition": list(res.partition.assignment),
        "q": cfg.q,
        "metaconflict": metaconflict(evidence, res.partition),
        "energy": res.energy,
        "saturation": res.saturation,
        "initial_temperature": res.initial_temperature,
        "final_temperature": res.final_temperature,
        "sweeps": res.sweeps,
        "temperatures": res.temps,
        "flags": {"not_frozen": res.not_frozen, "interaction_capped": capped},
        "config": cfg.to_mapping(),
    }
    stdout.write(_dump(out) + "\n")
    return EXIT_NOT_FROZEN if res.not_frozen else EXIT_OK


def _cmd_benchmark(args, stdout) -> int:
    if args.k_min > args.k_max:
        raise UsageError("--k-min must not exceed --k-max")
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    if args.jobs == 1 and not args.no_timing:
        warm_up()
    rows, runs = [], []
    for k in range(args.k_min, args.k_max + 1):
        cfg = _anneal_config(args, k)
        r, m = benchmark_rows(k, k, args.runs, cfg, args.jobs)
        rows += r
        runs += m
    if args.no_timing:
        for row in rows:
            for key in ("mean_time_s", "time_per_N2K2", "time_per_N2log2N"):
                row[key] = 0.0
    _write(args.out, csv_text(rows), stdout)
    if args.log:
        lines = run_log_lines(runs, include_timing=not args.no_timing)
        Path(args.log).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_oracle(args, stdout) -> int:
    _, evidence = read_evidence(args.infile)
    res = enumerate_min(evidence, args.q, args.objective)
    stdout.write(_dump(res.to_json()) + "\n")
    return EXIT_OK


def _cmd_graph_check(args, stdout) -> int:
    report = graph_check(args.n, args.q, args.beta, args.seed)
    stdout.write(_dump(report) + "\n")
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


COMMANDS = {
    "generate": _cmd_generate, "solve": _cmd_solve, "benchmark": _cmd_benchmark,
    "oracle": _cmd_oracle, "graph-check": _cmd_graph_check,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (TooLarge, GraphTooLarge) as exc:
        print(f"too large: {exc}", file=stderr)
        return EXIT_TOO_LARGE
    except (EvidenceError, AnnealError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())

