"""Command-line front end: synth, cluster, sweep, and eval subcommands.

Every command that produces files writes them under the ``--out``
directory together with a flat ``key=value`` manifest recording the
resolved configuration, seeds, paths, version, and per-stage timings.
Exit codes: 0 success, 1 runtime/numerical failure, 2 usage error.
"""

import argparse
import os
import sys
import time

from . import __version__
from .dataset import (
    SyntheticSpec,
    generate_synthetic,
    load_labels,
    load_matrix,
    save_labels,
    save_matrix,
)
from .diffusion import DiffusionConfig, diffuse_affinity
from .errors import DsscError, ParameterError
from .evaluation import (
    clustering_error,
    run_corruption_sweep,
    write_sweep_details,
    write_sweep_summary,
)
from .sparse_coder import SscConfig, affinity_from_coefficients, solve_ssc
from .spectral import SpectralConfig, ncut, spectral_cluster


class _UsageError(Exception):
    pass


def _write_manifest(path, entries):
    with open(path, "w", encoding="utf-8") as handle:
        for key, value in entries.items():
            handle.write(f"{key}={value}\n")


def _matrix_path(out_dir, stem, binary):
    return os.path.join(out_dir, f"{stem}.bin" if binary else f"{stem}.csv")


def _matrix_fmt(binary):
    return "binary" if binary else "csv"


def _require_input(path):
    if not os.path.isfile(path):
        raise _UsageError(f"input file not found: {path}")


def _parse_floats(text, flag):
    items = [part for part in text.split(",") if part.strip()]
    if not items:
        raise _UsageError(f"{flag} must list at least one value")
    try:
        return [float(part) for part in items]
    except ValueError as exc:
        raise _UsageError(f"could not parse {flag} value: {exc}") from None


def _parse_ints(text, flag):
    return [int(round(v)) for v in _parse_floats(text, flag)]


def _add_shape_flags(parser):
    parser.add_argument("--ambient-dim", type=int, default=100, metavar="D")
    parser.add_argument("--clusters", type=int, default=5, metavar="K")
    parser.add_argument("--subspace-dim", type=int, default=5, metavar="d")
    parser.add_argument("--per-cluster", type=int, default=50, metavar="N")
    parser.add_argument("--noise-scale", type=float, default=0.3)


def _add_solver_flags(parser):
    parser.add_argument("--sparsity-weight", type=float, default=SscConfig.sparsity_weight_factor)
    parser.add_argument(
        "--error-norm", choices=("frobenius", "l1"), default=SscConfig.error_norm
    )
    parser.add_argument("--max-iters", type=int, default=SscConfig.max_iters)
    parser.add_argument("--steps", type=int, default=200)
    parser.add_argument(
        "--substochastic-scale",
        type=float,
        default=DiffusionConfig.substochastic_scale,
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dssc",
        description="Sparse subspace clustering with tensor-product-graph diffusion.",
    )
    parser.add_argument("--version", action="version", version=f"dssc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic union-of-subspaces dataset")
    _add_shape_flags(p)
    p.add_argument("--corruption", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--binary", action="store_true", help="write the matrix in binary form")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cluster", help="cluster the columns of a data matrix")
    p.add_argument("--input", required=True, metavar="MATRIX")
    p.add_argument("--clusters", type=int, required=True, metavar="K")
    p.add_argument("--method", choices=("ssc", "dssc"), default="dssc")
    _add_solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--binary", action="store_true", help="input (and dump) in binary form")
    p.add_argument("--dump-affinity", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("sweep", help="corruption sweep comparing ssc and dssc")
    _add_shape_flags(p)
    _add_solver_flags(p)
    p.add_argument("--levels", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", help="clustering error between two label files")
    p.add_argument("predicted", metavar="PRED_LABELS")
    p.add_argument("truth", metavar="TRUE_LABELS")
    p.add_argument("--out", metavar="DIR", help="optional manifest directory")
    p.set_defaults(func=cmd_eval)
    return parser


def cmd_synth(args, argv):
    try:
        spec = SyntheticSpec(
            ambient_dim=args.ambient_dim,
            num_subspaces=args.clusters,
            subspace_dim=args.subspace_dim,
            points_per_subspace=args.per_cluster,
            corruption_fraction=args.corruption,
            noise_scale=args.noise_scale,
        )
    except ParameterError as exc:
        raise _UsageError(str(exc)) from None
    os.makedirs(args.out, exist_ok=True)
    started = time.perf_counter()
    dataset = generate_synthetic(spec, seed=args.seed)
    generate_seconds = time.perf_counter() - started

    matrix_path = _matrix_path(args.out, "X", args.binary)
    labels_path = os.path.join(args.out, "labels.txt")
    save_matrix(dataset.data, matrix_path, fmt=_matrix_fmt(args.binary))
    save_labels(dataset.labels, labels_path)
    _write_manifest(
        os.path.join(args.out, "manifest.txt"),
        {
            "command": "synth",
            "argv": " ".join(argv),
            "version": __version__,
            "seed": args.seed,
            "ambient_dim": spec.ambient_dim,
            "num_subspaces": spec.num_subspaces,
            "subspace_dim": spec.subspace_dim,
            "points_per_subspace": spec.points_per_subspace,
            "corruption_fraction": spec.corruption_fraction,
            "noise_scale": spec.noise_scale,
            "matrix_path": matrix_path,
            "labels_path": labels_path,
            "seconds_generate": f"{generate_seconds:.3f}",
        },
    )
    return 0


def cmd_cluster(args, argv):
    _require_input(args.input)
    if args.clusters < 2:
        raise _UsageError("--clusters must be at least 2")
    if args.steps < 1:
        raise _UsageError("--steps must be at least 1")
    X = load_matrix(args.input, fmt=_matrix_fmt(args.binary))
    ssc_config = SscConfig(
        error_norm=args.error_norm,
        sparsity_weight_factor=args.sparsity_weight,
        max_iters=args.max_iters,
    )
    os.makedirs(args.out, exist_ok=True)

    started = time.perf_counter()
    coeffs = solve_ssc(X, ssc_config)
    solve_seconds = time.perf_counter() - started
    graph = affinity_from_coefficients(coeffs)

    started = time.perf_counter()
    if args.method == "dssc":
        diff_config = DiffusionConfig(
            variant="tpg", steps=args.steps, substochastic_scale=args.substochastic_scale
        )
        graph = diffuse_affinity(graph, diff_config)
    diffuse_seconds = time.perf_counter() - started

    started = time.perf_counter()
    partition = spectral_cluster(
        graph, SpectralConfig(num_clusters=args.clusters, seed=args.seed)
    )
    cluster_seconds = time.perf_counter() - started
    ncut_edge, ncut_walk = ncut(graph, partition)

    labels_path = os.path.join(args.out, "labels.txt")
    save_labels(partition.labels, labels_path)
    affinity_path = ""
    if args.dump_affinity:
        affinity_path = _matrix_path(args.out, "affinity", args.binary)
        save_matrix(graph.W, affinity_path, fmt=_matrix_fmt(args.binary))

    print(f"ncut_edge={ncut_edge:.6f}")
    print(f"ncut_walk={ncut_walk:.6f}")
    print(f"converged={str(coeffs.converged).lower()}")
    _write_manifest(
        os.path.join(args.out, "manifest.txt"),
        {
            "command": "cluster",
            "argv": " ".join(argv),
            "version": __version__,
            "input_path": args.input,
            "seed": args.seed,
            "clusters": args.clusters,
            "method": args.method,
            "error_norm": ssc_config.error_norm,
            "sparsity_weight_factor": ssc_config.sparsity_weight_factor,
            "admm_penalty": ssc_config.admm_penalty,
            "max_iters": ssc_config.max_iters,
            "steps": args.steps,
            "substochastic_scale": args.substochastic_scale,
            "threads": args.threads,
            "converged": str(coeffs.converged).lower(),
            "solver_iters": coeffs.n_iters,
            "base_weight": f"{coeffs.weight:.12g}",
            "ncut_edge": f"{ncut_edge:.12g}",
            "ncut_walk": f"{ncut_walk:.12g}",
            "labels_path": labels_path,
            "affinity_path": affinity_path,
            "seconds_solve": f"{solve_seconds:.3f}",
            "seconds_diffuse": f"{diffuse_seconds:.3f}",
            "seconds_cluster": f"{cluster_seconds:.3f}",
        },
    )
    if not coeffs.converged:
        print("solver did not converge within the iteration budget", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args, argv):
    levels = _parse_floats(args.levels, "--levels")
    seeds = _parse_ints(args.seeds, "--seeds")
    for level in levels:
        if not 0.0 <= level <= 1.0:
            raise _UsageError(f"corruption level {level} outside [0, 1]")
    if args.threads < 1:
        raise _UsageError("--threads must be at least 1")
    try:
        base = SyntheticSpec(
            ambient_dim=args.ambient_dim,
            num_subspaces=args.clusters,
            subspace_dim=args.subspace_dim,
            points_per_subspace=args.per_cluster,
            noise_scale=args.noise_scale,
        )
    except ParameterError as exc:
        raise _UsageError(str(exc)) from None
    ssc_config = SscConfig(
        error_norm=args.error_norm,
        sparsity_weight_factor=args.sparsity_weight,
        max_iters=args.max_iters,
    )
    diff_config = DiffusionConfig(
        variant="tpg", steps=args.steps, substochastic_scale=args.substochastic_scale
    )
    os.makedirs(args.out, exist_ok=True)

    started = time.perf_counter()
    report = run_corruption_sweep(
        levels,
        seeds,
        base=base,
        ssc_config=ssc_config,
        diff_config=diff_config,
        threads=args.threads,
    )
    sweep_seconds = time.perf_counter() - started

    summary_path = os.path.join(args.out, "summary.csv")
    details_path = os.path.join(args.out, "details.csv")
    write_sweep_summary(report, summary_path)
    write_sweep_details(report, details_path)
    with open(summary_path, "r", encoding="ascii") as handle:
        sys.stdout.write(handle.read())
    _write_manifest(
        os.path.join(args.out, "manifest.txt"),
        {
            "command": "sweep",
            "argv": " ".join(argv),
            "version": __version__,
            "levels": ",".join(f"{v:g}" for v in levels),
            "seeds": ",".join(str(s) for s in seeds),
            "ambient_dim": base.ambient_dim,
            "num_subspaces": base.num_subspaces,
            "subspace_dim": base.subspace_dim,
            "points_per_subspace": base.points_per_subspace,
            "noise_scale": base.noise_scale,
            "error_norm": ssc_config.error_norm,
            "sparsity_weight_factor": ssc_config.sparsity_weight_factor,
            "max_iters": ssc_config.max_iters,
            "steps": diff_config.steps,
            "substochastic_scale": diff_config.substochastic_scale,
            "threads": args.threads,
            "summary_path": summary_path,
            "details_path": details_path,
            "seconds_sweep": f"{sweep_seconds:.3f}",
        },
    )
    return 0


def cmd_eval(args, argv):
    _require_input(args.predicted)
    _require_input(args.truth)
    predicted = load_labels(args.predicted)
    truth = load_labels(args.truth)
    error, _ = clustering_error(predicted, truth)
    print(f"{error:.4f}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_manifest(
            os.path.join(args.out, "manifest.txt"),
            {
                "command": "eval",
                "argv": " ".join(argv),
                "version": __version__,
                "predicted_path": args.predicted,
                "truth_path": args.truth,
                "error": f"{error:.4f}",
            },
        )
    return 0


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, list(argv))
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DsscError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
