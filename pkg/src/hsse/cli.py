"""Command-line surface: embed, features, inspect and bench subcommands."""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .complexes import build_rips, uniform_segments
from .embed import builtin_scale_embedding, knn_neighborhood, pairwise_distances, target_dim_rule
from .features import PipelineConfig, run_pipeline
from .io import load_expression, write_features, write_sidecar
from .psl import eigenvalues_sym, persistent_laplacian, spectral_stats
from .sheaf import SheafParams, build_sheaf, center_labels, median_eta


def _int_list(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _default_workers() -> int:
    return int(os.environ.get("HSSE_WORKERS", "1"))


def _add_input_args(parser):
    parser.add_argument("--input", required=True, help="expression matrix (CSV/TSV/MTX)")
    parser.add_argument(
        "--layout",
        choices=["cells_x_genes", "genes_x_cells"],
        default="cells_x_genes",
    )


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        scales=args.scales,
        k_sizes=args.k_sizes,
        segments=args.segments,
        alpha=args.alpha,
        metric=args.metric,
        degrees=args.degrees,
        nonzero_only=args.nonzero_only,
        embedding_provider=(
            f"external:{args.embeddings_dir}" if args.embeddings_dir else "builtin"
        ),
        workers=args.workers,
    )


def _add_config_args(parser):
    parser.add_argument("--scales", type=_int_list, default=(5, 14, 25, 37, 50))
    parser.add_argument(
        "--k-sizes", type=_int_list, default=(5, 10, 15, 20, 30, 40, 50, 60, 70, 80)
    )
    parser.add_argument("--segments", type=int, default=5)
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--metric", choices=["euclidean", "chordal"], default="chordal")
    parser.add_argument("--degrees", type=_int_list, default=(0, 1))
    parser.add_argument("--nonzero-only", action="store_true")
    parser.add_argument("--embeddings-dir", default=None)
    parser.add_argument("--workers", type=int, default=_default_workers())


def cmd_embed(args) -> int:
    X = load_expression(args.input, args.layout)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    d_s = min(target_dim_rule(X.n_cells), X.n_cells - 1)
    for s in args.scales:
        Y = builtin_scale_embedding(X.values, s, d_s).matrix
        path = out_dir / f"embedding_s{s}.csv"
        np.savetxt(path, Y, delimiter=",")
        print(f"wrote {path} ({Y.shape[0]} x {Y.shape[1]})")
    return 0


def cmd_features(args) -> int:
    X = load_expression(args.input, args.layout)
    cfg = _config_from_args(args)
    fm, timings = run_pipeline(X, cfg)
    write_features(fm, args.out)
    write_sidecar(str(args.out) + ".meta", cfg, timings, provider_detail=args.input)
    print(f"wrote {args.out}: {len(fm.cell_ids)} cells x {len(fm.columns)} features")
    return 0


def cmd_inspect(args) -> int:
    X = load_expression(args.input, args.layout)
    cfg = _config_from_args(args)
    d_s = min(target_dim_rule(X.n_cells), X.n_cells - 1)
    if cfg.embedding_provider == "builtin":
        Y = builtin_scale_embedding(X.values, args.scale, d_s).matrix
    else:
        from .features import load_external_embedding

        Y = load_external_embedding(cfg.embedding_provider.split(":", 1)[1], args.scale)
    D = pairwise_distances(Y, cfg.metric)
    hood = knn_neighborhood(D, args.cell, args.k)
    D_local = D[np.ix_(hood.members, hood.members)]
    K = build_rips(D_local, r_max="auto", d_max=2)
    eta = median_eta(D_local)
    labels = center_labels(len(hood.members), int(np.searchsorted(hood.members, args.cell)))
    sheaf = build_sheaf(K, D_local, labels, SheafParams(eta=eta, alpha=cfg.alpha))

    print(f"patch: cell={args.cell} scale={args.scale} k={args.k}")
    print(f"members: {hood.members.tolist()}")
    print(f"r_max = {K.r_max!r}")
    print(f"eta = {eta!r}")
    print(
        f"simplices at r_max: {K.n_vertices} vertices, "
        f"{len(K.edges)} edges, {len(K.triangles)} triangles"
    )
    for l, interval in enumerate(uniform_segments(K.r_max, cfg.segments), start=1):
        for q in cfg.degrees:
            op = persistent_laplacian(sheaf, interval, q)
            w = eigenvalues_sym(op.matrix)
            stats = spectral_stats(w)
            head = ", ".join(f"{v:.6g}" for v in w[:6])
            more = " ..." if len(w) > 6 else ""
            print(
                f"seg {l} [{interval.a:.6g}, {interval.b:.6g}] q={q}: "
                f"dim={op.dimension} zeros={int(np.sum(w == 0))} "
                f"stats(sum,mean,max,min,std)=({stats.sum:.6g}, {stats.mean:.6g}, "
                f"{stats.max:.6g}, {stats.min:.6g}, {stats.std:.6g}) "
                f"eigs=[{head}{more}]"
            )
    return 0


def cmd_bench(args) -> int:
    X = load_expression(args.input, args.layout)
    cfg = _config_from_args(args)
    t0 = time.perf_counter()
    fm, timings = run_pipeline(X, cfg)
    total = time.perf_counter() - t0
    print(f"cells = {len(fm.cell_ids)}, features = {len(fm.columns)}")
    for stage, seconds in timings.items():
        print(f"{stage} = {seconds:.3f}")
    print(f"total_seconds = {total:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsse", description="hierarchical sheaf spectral features"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="emit per-scale embedding CSVs")
    _add_input_args(p)
    p.add_argument("--scales", type=_int_list, default=(5, 14, 25, 37, 50))
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("features", help="run the feature pipeline")
    _add_input_args(p)
    _add_config_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("inspect", help="dump one patch's complex/sheaf/spectra")
    _add_input_args(p)
    _add_config_args(p)
    p.add_argument("--cell", type=int, required=True)
    p.add_argument("--scale", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("bench", help="timing report per stage")
    _add_input_args(p)
    _add_config_args(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
