"""Command-line entry points: generate streams, run experiments, inspect
models, and exercise the independent numeric oracles.

Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, streams
from .drift import hoeffding_bound
from .escn import (DensityStats, EscnConfig, EscnLayer, HiddenNode,
                   chebyshev_expand, density, expand_batch)
from .feature_weighting import PairStats, mici, mici_series
from .harness import RunConfig, run, summarize, write_summary
from .scn_init import ScnParams
from .stack import StackConfig, StackedNetwork

USAGE_ERROR = 2
RUNTIME_ERROR = 1


class ConfigError(ValueError):
    """Bad configuration or usage: maps to exit code 2."""


def parse_config_file(path: str) -> dict:
    """Flat dotted-key config: one `section.key = value` per line."""
    overrides = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            overrides[key.strip()] = value.strip()
    return overrides


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    scalar = {
        "stack.alpha": ("stack", "alpha", float),
        "stack.delta_merge": ("stack", "delta_merge", float),
        "stack.tau_chunks": ("stack", "tau_chunks", float),
        "escn.q": ("escn", "q", float),
        "escn.omega": ("escn", "omega", float),
        "escn.rho_decay": ("escn", "rho_decay", float),
        "escn.delta_c_factor": ("escn", "delta_c_factor", float),
        "escn.p_replace": ("escn", "p_replace", float),
        "escn.theta_prune": ("escn", "theta_prune", float),
        "scn.t_max": ("scn", "t_max", int),
        "scn.r": ("scn", "r", float),
        "run.chunk_size": ("run", "chunk_size", int),
        "run.seed": ("run", "seed", int),
        "run.holdout_train_fraction": ("run", "holdout_train_fraction", float),
    }
    for key, raw in overrides.items():
        if key == "scn.scopes":
            vals = tuple(float(v) for v in raw.split(","))
            cfg.stack.scn = ScnParams(t_max=cfg.stack.scn.t_max, scopes=vals,
                                      r=cfg.stack.scn.r)
            continue
        if key not in scalar:
            raise ValueError(f"unknown config key: {key}")
        section, attr, typ = scalar[key]
        value = typ(raw)
        if section == "stack":
            setattr(cfg.stack, attr, value)
        elif section == "escn":
            setattr(cfg.stack.escn, attr, value)
        elif section == "scn":
            setattr(cfg.stack.scn, attr, value)
        else:
            setattr(cfg, attr, value)
    return cfg


DATASET_PRESETS = {
    # name -> (generator kwargs builder, chunk_size)
    "sea": dict(chunk_size=500),
    "hyperplane": dict(chunk_size=500),
}


def _generate_dataset(name: str, seed: int):
    if name == "sea":
        schedule = [(0, 4.0), (25_000, 7.0), (50_000, 4.0), (75_000, 7.0)]
        return streams.generate_sea(100_000, schedule, seed=seed)
    if name == "hyperplane":
        return streams.generate_hyperplane(
            120_000, 4, w=(1.0, 1.0, 1.0, 1.0), w0=2.0,
            drift_start=20_000, drift_span=30_000,
            w_after=(2.0, 0.2, 1.6, 0.2), seed=seed)
    raise ValueError(f"unknown dataset preset: {name}")


def cmd_generate(args) -> int:
    if args.kind == "sea":
        switches = list(range(args.drift_every, args.samples, args.drift_every))
        thetas = [4.0, 7.0]
        schedule = [(0, thetas[0])] + [
            (s, thetas[(i + 1) % 2]) for i, s in enumerate(switches)]
        X, labels = streams.generate_sea(args.samples, schedule,
                                         minority_fraction=args.minority_fraction,
                                         seed=args.seed)
    else:
        dim = args.dim
        w = np.ones(dim)
        w_after = np.linspace(2.0, 0.2, dim)
        # scale the drift placement down for short streams
        start = args.drift_start if args.drift_start < args.samples \
            else args.samples // 3
        span = min(args.drift_span, args.samples - start)
        X, labels = streams.generate_hyperplane(
            args.samples, dim, w=w, w0=dim / 2.0,
            drift_start=start, drift_span=span,
            w_after=w_after, seed=args.seed)
    count = streams.write_csv_stream(args.out, X, labels)
    print(count)
    return 0


def _make_run_config(args, seed) -> RunConfig:
    cfg = RunConfig(protocol=args.protocol.upper(), chunk_size=args.chunk,
                    holdout_train_fraction=args.train_fraction, seed=seed)
    if args.config:
        try:
            apply_overrides(cfg, parse_config_file(args.config))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if seed != args.seed:
            # sweep worker: its assigned seed outranks a run.seed in the file
            cfg.seed = seed
    return cfg


def _single_run(args, seed):
    cfg = _make_run_config(args, seed)
    if args.dataset:
        X, labels = _generate_dataset(args.dataset, cfg.seed)
        chunks = streams.chunk_stream(X, labels, cfg.chunk_size)
        n, m = X.shape[1], int(labels.max())
    else:
        rows = list(streams.load_csv_stream(args.data, cfg.chunk_size))
        chunks = iter(rows)
        n, m = rows[0].X.shape[1], rows[0].Y.shape[1]
    report, net = run(chunks, n, m, cfg)
    suffix = "" if args.jobs == 1 else f".seed{seed}"
    if args.trace_out:
        report.write_trace(args.trace_out + suffix)
    summary = summarize(report)
    if args.summary_out:
        write_summary(args.summary_out + suffix, summary, report.config_header)
    if args.model_out:
        net.save(args.model_out + suffix)
    mean, std = summary["classification_rate"]
    depth, nodes = report.rows[-1].depth, report.rows[-1].nodes
    return seed, mean, std, depth, nodes


def cmd_run(args) -> int:
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    if args.jobs == 1:
        _, mean, std, depth, nodes = _single_run(args, args.seed)
        print(f"classification_rate = {mean:.4f} +/- {std:.4f}")
        print(f"depth = {depth}, nodes = {nodes}")
        return 0
    # multi-seed sweep: independent runs with seeds seed .. seed + jobs - 1
    from concurrent.futures import ProcessPoolExecutor
    seeds = range(args.seed, args.seed + args.jobs)
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(_single_run, [args] * args.jobs, seeds))
    for seed, mean, std, depth, nodes in results:
        print(f"seed {seed}: classification_rate = {mean:.4f} +/- {std:.4f}, "
              f"depth = {depth}, nodes = {nodes}")
    grand = np.mean([r[1] for r in results])
    print(f"sweep mean classification_rate = {grand:.4f}")
    return 0


def cmd_inspect(args) -> int:
    net = StackedNetwork.load(args.model)
    print(f"depth = {net.depth}")
    print(f"total_nodes = {net.total_nodes}")
    print(f"input_weights = {np.array2string(net.lam, precision=4)}")
    for d, link in enumerate(net.links):
        print(f"layer {d + 1}: nodes = {link.layer.n_nodes}, "
              f"birth_stamp = {link.birth_stamp}")
    return 0


def _oracle_mici(args) -> float:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.n):
        N = int(rng.integers(4, 64))
        x1 = rng.normal(size=N)
        x2 = rng.normal(size=N) + rng.uniform(-1, 1) * x1
        engine = mici(PairStats().update(x1, x2))
        # two-pass direct evaluation
        v1, v2 = x1.var(), x2.var()
        rho = np.corrcoef(x1, x2)[0, 1]
        s = v1 + v2
        direct = 0.5 * (s - np.sqrt(max(s * s - 4 * v1 * v2 * (1 - rho ** 2), 0.0)))
        worst = max(worst, abs(engine - direct))
    return worst


def _oracle_density(args) -> float:
    rng = np.random.default_rng(args.seed)
    pts = rng.normal(size=(args.samples, 3))
    stats = DensityStats()
    worst = 0.0
    for k, x in enumerate(pts):
        stats.update(x)
        if k % max(args.samples // 100, 1) == 0:
            seen = pts[:k + 1]
            brute = 1.0 / (1.0 + np.mean(np.sum((seen - x) ** 2, axis=1)))
            worst = max(worst, abs(density(stats, x) - brute))
    return worst


def _oracle_fwgrls(args) -> float:
    rng = np.random.default_rng(args.seed)
    n, m, N = 2, 1, 50
    layer = EscnLayer(n=n, m=m, cfg=EscnConfig(rho_decay=0.0, omega=1e5))
    X = rng.uniform(-1, 1, size=(N, n))
    W_true = rng.normal(size=(2 * n + 1, m))
    Xe = expand_batch(X)
    Y = Xe @ W_true
    node = HiddenNode(c_lower=np.zeros(n), c_upper=np.zeros(n),
                      inv_cov=np.eye(n), W=np.zeros((2 * n + 1, m)),
                      Omega=1e5 * np.eye(2 * n + 1))
    for t in range(N):
        layer.fwgrls_update(node, Xe[t], 1.0, Y[t])
    W_batch = np.linalg.lstsq(Xe, Y, rcond=None)[0]
    return float(np.linalg.norm(node.W - W_batch) / np.linalg.norm(W_batch))


def _oracle_hoeffding(args) -> float:
    import math
    engine = hoeffding_bound(0.0, 1.0, 1000, 500, 0.09)
    direct = (1.0 - 0.0) * math.sqrt(
        (1000 - 500) / (2.0 * 500 * (1000 - 500)) * math.log(1.0 / 0.09))
    return abs(engine - direct)


ORACLES = {"mici": (_oracle_mici, 1e-9),
           "density": (_oracle_density, 1e-9),
           "fwgrls": (_oracle_fwgrls, 1e-3),
           "hoeffding": (_oracle_hoeffding, 1e-12)}


def cmd_oracle(args) -> int:
    fn, tol = ORACLES[args.check]
    dev = fn(args)
    status = "PASS" if dev <= tol else "FAIL"
    print(f"{args.check}: max deviation = {dev:.3e} (tolerance {tol:.0e}) {status}")
    return 0 if status == "PASS" else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsscn",
        description="Evolving deep-stacked stream classifier toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic labeled stream as CSV")
    gen.add_argument("kind", choices=["sea", "hyperplane"])
    gen.add_argument("--samples", type=int, default=100_000)
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--drift-every", type=int, default=25_000)
    gen.add_argument("--minority-fraction", type=float, default=None)
    gen.add_argument("--dim", type=int, default=4)
    gen.add_argument("--drift-start", type=int, default=20_000)
    gen.add_argument("--drift-span", type=int, default=30_000)
    gen.set_defaults(func=cmd_generate)

    runp = sub.add_parser("run", help="run an evaluation protocol")
    src = runp.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV stream path")
    src.add_argument("--dataset", choices=sorted(DATASET_PRESETS),
                     help="built-in dataset preset")
    runp.add_argument("--protocol", choices=["holdout", "prequential"],
                      default="prequential")
    runp.add_argument("--chunk", type=int, default=500)
    runp.add_argument("--train-fraction", type=float, default=0.8)
    runp.add_argument("--seed", type=int, default=0)
    runp.add_argument("--config", help="flat dotted-key config file")
    runp.add_argument("--trace-out")
    runp.add_argument("--summary-out")
    runp.add_argument("--model-out")
    runp.add_argument("--jobs", type=int, default=1,
                      help="parallel workers for multi-seed sweeps")
    runp.set_defaults(func=cmd_run)

    insp = sub.add_parser("inspect", help="print the structure of a saved model")
    insp.add_argument("model")
    insp.set_defaults(func=cmd_inspect)

    orc = sub.add_parser("oracle", help="run an independent numeric oracle")
    orc.add_argument("check", choices=sorted(ORACLES))
    orc.add_argument("--n", type=int, default=1000)
    orc.add_argument("--samples", type=int, default=10_000)
    orc.add_argument("--seed", type=int, default=0)
    orc.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
