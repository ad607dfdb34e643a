#!/usr/bin/env python3
"""Reproduce the fidelity trend studies on seeded phantoms.

Writes three CSVs (format sweep, block-size sweep, image-size sweep) plus a
forward-vs-roundtrip comparison, then prints the aggregate rows.  Expect a
few minutes at the default N<=256 with 10 seeds.
"""

import argparse
from pathlib import Path

from mxfft.cli import ExperimentSpec, run_experiment, write_csv

MX_MODES = ["e4m3", "e5m2", "e2m3", "e3m2"]


def study(name, outdir, seeds, **kw):
    spec = ExperimentSpec(seeds=list(range(seeds)), **kw)
    rows = run_experiment(spec)
    path = outdir / f"{name}.csv"
    write_csv(rows, path)
    print(f"\n== {name} -> {path}")
    hdr = ("mode", "size", "block", "pipeline", "psnr", "ssim", "nmse")
    print("  " + "  ".join(f"{h:>13}" for h in hdr))
    for r in rows:
        if r["seed"] == "mean":
            print("  " + "  ".join(f"{r[h]:>13.13s}" for h in hdr))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results", help="CSV output directory")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--coils", type=int, default=4)
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    common = dict(seeds=args.seeds, coils=args.coils)

    study(
        "format_sweep",
        outdir,
        modes=["fp16"] + MX_MODES,
        sizes=[128],
        blocks=[32],
        pipeline="forward",
        **common,
    )
    study(
        "block_sweep",
        outdir,
        modes=["e4m3"],
        sizes=[128],
        blocks=[2, 8, 32],
        pipeline="forward",
        **common,
    )
    study(
        "size_sweep",
        outdir,
        modes=["e4m3", "e5m2"],
        sizes=[64, 128, 256],
        blocks=[32],
        pipeline="forward",
        **common,
    )
    study(
        "roundtrip",
        outdir,
        modes=["fp16"] + MX_MODES,
        sizes=[128],
        blocks=[32],
        pipeline="roundtrip",
        **common,
    )


if __name__ == "__main__":
    main()
