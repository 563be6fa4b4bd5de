"""NMI against beta on the noisy two-view benchmark (one clean view, one heavily
noised). Prints CSV rows: data_seed, beta, metric means and SDs.

    python scripts/beta_sweep.py --data-seeds 0 1 2 3
"""
import argparse

from mvcovh import HyperParams
from mvcovh.harness import BETA_GRID, beta_sweep, synth_multiview


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data-seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--separation", type=float, default=6.0)
    ap.add_argument("--noise", type=float, nargs=2, default=[1.0, 8.0])
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    header = None
    for s in args.data_seeds:
        ds = synth_multiview(3, 300, 2, [10, 12], args.separation, args.noise, seed=s)
        rows = beta_sweep(ds, HyperParams(C=3, r=3), BETA_GRID, args.repeats, args.workers)
        if header is None:
            header = ["data_seed", *rows[0]]
            print(",".join(header))
        for row in rows:
            print(",".join([str(s)] + [f"{row[c]:.6g}" for c in header[1:]]))


if __name__ == "__main__":
    main()
