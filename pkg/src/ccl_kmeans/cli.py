"""Command-line front end: ``generate``, ``run``, ``bench`` and ``sweep``.

Exit codes: 0 success, 1 internal error, 2 invalid configuration,
3 input parse failure.
"""

from __future__ import annotations

import argparse
import sys

import numba

from . import report
from .bench import check_pair, environment_note, run, run_benchmark, warmup
from .ccl import ccl_recall
from .core import ALGORITHMS, SEEDINGS, RunConfig
from .dataset import (
    ParseError,
    gen_circle_gaussians,
    gen_grid_gaussians,
    gen_uniform,
    load_matrix,
    write_matrix,
)
from .rng import Rng

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_PARSE = 0, 1, 2, 3

# per generator type: flag -> default
GEN_DEFAULTS = {
    "uniform": {"n": 100000, "d": 100, "lo": 0.0, "hi": 1.0},
    "grid": {"n": 100000, "grid": 10, "spacing": 10.0, "sigma": 1.0},
    "circle": {"n": 100000, "k": 100, "r": 20.0, "variance": 0.25},
}
GEN_FLAGS = ("n", "d", "lo", "hi", "grid", "spacing", "sigma", "k", "r", "variance")


class ConfigError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccl-kmeans", allow_abbrev=False, description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", allow_abbrev=False, help="write a synthetic dataset")
    g.add_argument("--type", required=True, choices=sorted(GEN_DEFAULTS))
    for name in ("n", "d", "grid", "k"):
        g.add_argument(f"--{name}", type=int)
    for name in ("lo", "hi", "spacing", "sigma", "r", "variance"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path (default: stdout)")

    def common(sp, algo_flag):
        sp.add_argument("--data", required=True, help="dataset text file")
        sp.add_argument("--delimiter", choices=["auto", "comma", "whitespace"], default="auto")
        sp.add_argument(algo_flag[0], **algo_flag[1])
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--max-iters", type=int, default=1000)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", help="report path (default: stdout)")

    r = sub.add_parser("run", allow_abbrev=False, help="run one algorithm")
    common(r, ("--algo", {"required": True, "choices": ALGORITHMS}))
    r.add_argument("--k-prime", type=int)
    r.add_argument("--seeding", choices=SEEDINGS, default="random")
    r.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", allow_abbrev=False, help="base vs candidate-list variant")
    common(b, ("--base", {"required": True, "choices": ["lloyd", "elkan"]}))
    b.add_argument("--k-prime", type=int, required=True)
    b.add_argument("--seeding", choices=SEEDINGS, default="random")
    b.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("sweep", allow_abbrev=False, help="bench over several k', seedings and seeds")
    common(s, ("--base", {"required": True, "choices": ["lloyd", "elkan"]}))
    s.add_argument("--k-prime", type=int, nargs="+", required=True)
    s.add_argument("--seeding", choices=SEEDINGS, nargs="+", default=list(SEEDINGS))
    s.add_argument("--seed", type=int, nargs="+", default=[0])
    return p


def _generate(args) -> int:
    defaults = GEN_DEFAULTS[args.type]
    extra = [f"--{f}" for f in GEN_FLAGS if getattr(args, f) is not None and f not in defaults]
    if extra:
        raise ConfigError(f"{', '.join(extra)} not valid with --type {args.type}")
    opts = {f: getattr(args, f) if getattr(args, f) is not None else v for f, v in defaults.items()}
    rng = Rng(args.seed)
    try:
        if args.type == "uniform":
            X = gen_uniform(opts["n"], opts["d"], opts["lo"], opts["hi"], rng)
        elif args.type == "grid":
            X = gen_grid_gaussians(opts["n"], opts["grid"], opts["spacing"], opts["sigma"], rng)
        else:
            X = gen_circle_gaussians(opts["n"], opts["k"], opts["r"], opts["variance"], rng)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    info = f"n={X.shape[0]} d={X.shape[1]} seed={args.seed}"
    if args.out:
        write_matrix(args.out, X)
        print(f"{info} -> {args.out}")
    else:
        write_matrix(sys.stdout, X)
        print(info, file=sys.stderr)
    return EXIT_OK


def _config(args, algorithm, k_prime, seeding, seed) -> RunConfig:
    cfg = RunConfig(
        algorithm=algorithm,
        k=args.k,
        k_prime=k_prime,
        seeding=seeding,
        rng_seed=seed,
        max_iters=args.max_iters,
        threads=args.threads,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _load(args):
    try:
        X = load_matrix(args.data, args.delimiter)
    except OSError as exc:
        raise ParseError(f"cannot read {args.data}: {exc.strerror}") from None
    if args.k > X.shape[0]:
        raise ConfigError(f"k={args.k} exceeds the number of points n={X.shape[0]}")
    return X, {"path": str(args.data), "n": X.shape[0], "d": X.shape[1]}


def _arguments(args) -> dict:
    return {key: value for key, value in sorted(vars(args).items()) if key != "out"}


def _emit(args, doc) -> None:
    text = report.dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    is_ccl = args.algo.endswith("-ccl")
    if is_ccl and args.k_prime is None:
        raise ConfigError(f"--k-prime is required for {args.algo}")
    if not is_ccl and args.k_prime is not None:
        raise ConfigError(f"--k-prime only applies to candidate-list algorithms, not {args.algo}")
    cfg = _config(args, args.algo, args.k_prime, args.seeding, args.seed)
    X, dataset = _load(args)
    warmup(cfg.threads)
    _set_threads(cfg.threads)
    result = run(X, cfg)
    fields = {**cfg.as_dict(), **result.summary()}
    if is_ccl:
        fields["ccl_recall"] = ccl_recall(X, result)
    doc = report.make_document(
        "run", _arguments(args), dataset,
        environment=environment_note(cfg.threads), result=fields,
    )
    _emit(args, doc)
    return EXIT_OK


def _pair(args, k_prime, seeding, seed):
    base = _config(args, args.base, None, seeding, seed)
    aug = _config(args, args.base + "-ccl", k_prime, seeding, seed)
    check_pair(base, aug)
    return base, aug


def _bench(args) -> int:
    base, aug = _pair(args, args.k_prime, args.seeding, args.seed)
    X, dataset = _load(args)
    rep = run_benchmark(X, base, aug)
    _emit(args, report.make_document("bench", _arguments(args), dataset, bench=rep.as_dict()))
    return EXIT_OK


def _sweep(args) -> int:
    pairs = [
        _pair(args, kp, seeding, seed)
        for kp in args.k_prime
        for seeding in args.seeding
        for seed in args.seed
    ]
    X, dataset = _load(args)
    rows = []
    print(f"{'k_prime':>7} {'seeding':>8} {'seed':>5} {'PIM(%)':>9} {'speedup':>8} {'recall':>7}", file=sys.stderr)
    for base, aug in pairs:
        rep = run_benchmark(X, base, aug)
        rows.append(rep.as_dict())
        print(
            f"{aug.k_prime:>7} {aug.seeding:>8} {aug.rng_seed:>5} {rep.pim:>9.3f} "
            f"{rep.speedup:>8.2f} {rep.ccl_recall:>7.4f}",
            file=sys.stderr,
        )
    _emit(args, report.make_document("sweep", _arguments(args), dataset, rows=rows))
    return EXIT_OK


def _set_threads(threads: int) -> None:
    if threads > 1:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


COMMANDS = {"generate": _generate, "run": _run, "bench": _bench, "sweep": _sweep}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
