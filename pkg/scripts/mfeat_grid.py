"""Grid search on the UCI Multiple Features data (Fourier + Zernike views).

Expects a manifest with the two views as row-per-sample CSVs, e.g. built from
mfeat-fou (76 columns) and mfeat-zer (47 columns) with labels 0..9 in blocks of
200. The default grid is reduced; ``--full`` runs every eta, beta, r, lambda.

    python scripts/mfeat_grid.py path/to/manifest.json --workers 8
"""
import argparse
import json
import os

from mvcovh import HyperParams
from mvcovh.harness import GridSpec, grid_search
from mvcovh.mvdata import load_manifest


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("manifest")
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    ds = load_manifest(args.manifest)
    if args.full:
        grid = GridSpec(repeats=args.repeats)
    else:
        grid = GridSpec(eta_grid=(0.25, 1.0, 4.0), lambda_grid=(1.0,), r_grid=(8, 24, 47),
                        repeats=args.repeats)
    rep = grid_search(ds, grid, HyperParams(C=ds.n_classes), workers=args.workers)
    print(json.dumps({"best_cell": rep.best_cell, "metrics": rep.metrics}, indent=2))


if __name__ == "__main__":
    main()
