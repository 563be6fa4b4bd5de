"""Command-line front end.

Every subcommand writes ``report.json`` into ``--out``; wall-clock timing goes
to a separate ``timing.json`` so reports stay byte-reproducible. Failures exit
with status 1 (2 for bad arguments) and a JSON error object on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .clustering import HyperParams, fit_pipeline
from .factorization import shd_nmf
from .harness import (
    BETA_GRID,
    GridSpec,
    ablation_hidden,
    beta_sweep,
    export_trace,
    grid_search,
    repeat_runs,
    synth_multiview,
)
from .metrics import evaluate
from .mvdata import (
    format_float,
    load_manifest,
    normalize_dataset,
    read_labels_csv,
    save_dataset,
    write_matrix_csv,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _write_report(out: Path, report: dict, started: float) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    (out / "timing.json").write_text(
        json.dumps({"wall_clock_seconds": time.perf_counter() - started}) + "\n")


def _params(args, **over) -> HyperParams:
    kw = dict(C=args.clusters, beta=args.beta, eta=args.eta, r=args.hidden_dim,
              lam=args.lam, epsilon=args.epsilon, seed=args.seed,
              nmf_max_iter=args.nmf_max_iter, init=args.init)
    if args.max_iter is not None:
        kw["max_iter"] = args.max_iter
    kw.update(over)
    return HyperParams(**kw)


def cmd_synth(args, out):
    noise = _floats(args.noise)
    ds = synth_multiview(args.clusters, args.samples, args.views, _ints(args.dims),
                         args.separation, noise[0] if len(noise) == 1 else noise,
                         seed=args.seed, name=args.name)
    manifest = save_dataset(ds, out)
    return {"name": ds.name, "manifest": manifest.name, "N": ds.N, "K": ds.K,
            "dims": [v.n_features for v in ds.views],
            "class_sizes": np.bincount(ds.labels).tolist(), "seed": args.seed}


def cmd_extract_hidden(args, out):
    ds = normalize_dataset(load_manifest(args.manifest))
    max_iter = 200 if args.max_iter is None else args.max_iter
    model = shd_nmf(ds, args.hidden_dim, args.lam, args.epsilon, max_iter, args.seed)
    model.export(out)
    export_trace(model, out / "trace.csv")
    return model.to_json()


def cmd_fit(args, out):
    ds = load_manifest(args.manifest)
    params = _params(args)
    hidden, state = fit_pipeline(ds, params)
    write_matrix_csv(out / "hidden_H.csv", hidden.H)
    export_trace(state, out / "trace.csv")
    export_trace(hidden, out / "hidden_trace.csv")
    (out / "assignment.csv").write_text("".join(f"{int(a)}\n" for a in state.assignment))
    for k, V in enumerate(state.V):
        write_matrix_csv(out / f"centers_view{k}.csv", V)
    write_matrix_csv(out / "centers_hidden.csv", state.V_hidden)
    report = state.to_report(params)
    report["hidden"] = hidden.to_json()
    if ds.labels is not None:
        report["metrics"] = evaluate(ds.labels, state.assignment)
    return report


def cmd_eval(args, out):
    ds = load_manifest(args.manifest)
    if args.assignment:
        assignment = read_labels_csv(args.assignment)
        if ds.labels is None:
            raise ValueError("manifest has no labels to evaluate against")
        return evaluate(ds.labels, assignment)
    rep = repeat_runs(ds, _params(args), args.repeats, workers=args.workers)
    return rep.to_json()


def cmd_sweep_beta(args, out):
    ds = load_manifest(args.manifest)
    grid = _floats(args.beta_grid) if args.beta_grid else list(BETA_GRID)
    rows = beta_sweep(ds, _params(args), grid, args.repeats, workers=args.workers)
    cols = list(rows[0])
    with open(out / "sweep.csv", "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(format_float(row[c]) for c in cols) + "\n")
    return {"params": _params(args).to_json(), "repeats": args.repeats, "rows": rows}


def cmd_grid(args, out):
    ds = load_manifest(args.manifest)
    kw = {"repeats": args.repeats}
    if args.eta_grid:
        kw["eta_grid"] = _floats(args.eta_grid)
    if args.beta_grid:
        kw["beta_grid"] = _floats(args.beta_grid)
    if args.r_grid:
        kw["r_grid"] = _ints(args.r_grid)
    if args.lambda_grid:
        kw["lambda_grid"] = _floats(args.lambda_grid)
    rep = grid_search(ds, GridSpec(**kw), _params(args), workers=args.workers)
    return rep.to_json()


def cmd_ablate(args, out):
    ds = load_manifest(args.manifest)
    return ablation_hidden(ds, _params(args), args.repeats, workers=args.workers)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvcovh", description="Multi-view clustering with visible "
                     "and hidden views.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fit=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--epsilon", type=float, default=1e-6)
        p.add_argument("--max-iter", type=int, default=None,
                       help="clustering iterations (SHD-NMF iterations for extract-hidden)")
        p.add_argument("--out", type=Path, required=True)
        if fit:
            p.add_argument("--manifest", type=Path, required=True)
            p.add_argument("--hidden-dim", type=int, default=2)
            p.add_argument("--lambda", dest="lam", type=float, default=1.0)

    def clustering(p):
        p.add_argument("--clusters", type=int, required=True)
        p.add_argument("--beta", type=float, default=0.5)
        p.add_argument("--eta", type=float, default=1.0)
        p.add_argument("--nmf-max-iter", type=int, default=200)
        p.add_argument("--init", choices=["kmeans++", "random"], default="kmeans++")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("synth", help="generate a planted multi-view dataset")
    common(p, fit=False)
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--views", type=int, default=2)
    p.add_argument("--dims", default="10,12")
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--noise", default="1.0", help="one value, or one per view")
    p.add_argument("--name", default="synthetic")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract-hidden", help="run SHD-NMF and export H, W^k, q")
    common(p)
    p.set_defaults(func=cmd_extract_hidden)

    p = sub.add_parser("fit", help="full pipeline on one seed")
    common(p)
    clustering(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="score an assignment, or run seeded repeats")
    common(p)
    clustering(p)
    p.add_argument("--assignment", type=Path, default=None)
    p.add_argument("--repeats", type=int, default=10)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep-beta", help="metric curve over beta")
    common(p)
    clustering(p)
    p.add_argument("--beta-grid", default=None)
    p.add_argument("--repeats", type=int, default=10)
    p.set_defaults(func=cmd_sweep_beta)

    p = sub.add_parser("grid", help="grid search over eta, beta, r, lambda")
    common(p)
    clustering(p)
    p.add_argument("--eta-grid", default=None)
    p.add_argument("--beta-grid", default=None)
    p.add_argument("--r-grid", default=None)
    p.add_argument("--lambda-grid", default=None)
    p.add_argument("--repeats", type=int, default=10)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("ablate", help="with vs without the hidden view")
    common(p)
    clustering(p)
    p.add_argument("--repeats", type=int, default=10)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(json.dumps({"error": "UsageError", "message": str(exc)}), file=sys.stderr)
        return 2
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        report = args.func(args, args.out)
        _write_report(args.out, report, started)
    except Exception as exc:  # noqa: BLE001 - reported as JSON
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
