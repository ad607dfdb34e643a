"""Experiment harness: format / size / block sweeps with CSV output.

Every cell (input, size, mode, block, pipeline) is scored against the
FP64 reference pipeline run on the identical input.  All randomness flows
from explicit seeds, so two runs of the same spec produce identical CSV
output except for the runtime column.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
import time
from pathlib import Path

from . import metrics
from .errors import ConfigError, MxfftError
from .fftcore import ModeSpec, make_plan
from .minifloat import FORMATS
from .mri import IMAGE, KSPACE, ComplexGrid, forward_pipeline, gen_phantom, read_grid, write_grid
from .prescale import PrescaleConfig, compute_prescale
from .mri import roundtrip_pipeline

CSV_COLUMNS = [
    "dataset_id",
    "seed",
    "size",
    "mode",
    "block",
    "pipeline",
    "psnr",
    "ssim",
    "nmse",
    "psnr_std",
    "ssim_std",
    "nmse_std",
    "prescale_k",
    "runtime_ms",
]

MODE_NAMES = ("reference", "fp16") + tuple(sorted(k for k in FORMATS if k != "fp16"))


@dataclasses.dataclass
class ExperimentSpec:
    modes: list
    sizes: list
    blocks: list
    seeds: list
    pipeline: str = "forward"
    coils: int = 4
    kind: str = "blobs"
    tail: float = 0.2
    noise: float = 0.1
    prescale: PrescaleConfig = dataclasses.field(default_factory=PrescaleConfig)
    input_path: str = None  # MXCG file instead of phantoms
    out: str = None

    def validate(self):
        if not self.modes:
            raise ConfigError("modes", "need at least one mode")
        for m in self.modes:
            if m not in MODE_NAMES:
                raise ConfigError("modes", f"unknown mode {m!r}; known: {', '.join(MODE_NAMES)}")
        if not self.sizes:
            raise ConfigError("sizes", "need at least one size")
        for n in self.sizes:
            if n < 2 or n & (n - 1):
                raise ConfigError("sizes", f"{n} is not a power of two >= 2")
        if not self.blocks:
            raise ConfigError("blocks", "need at least one block size")
        for b in self.blocks:
            if b < 2 or b % 2:
                raise ConfigError("blocks", f"{b} is not an even integer >= 2")
        if not self.seeds:
            raise ConfigError("seeds", "need at least one seed")
        if self.pipeline not in ("forward", "roundtrip"):
            raise ConfigError("pipeline", "must be 'forward' or 'roundtrip'")
        if self.coils < 1:
            raise ConfigError("coils", "must be >= 1")


def _fmt(v: float) -> str:
    if v == math.inf:
        return "inf"
    return f"{v:.10g}"


def _run_pipeline(grid, plan, cfg, pipeline):
    if pipeline == "forward":
        return forward_pipeline(grid, plan, cfg)
    return roundtrip_pipeline(grid, plan, cfg)


def _mean_std(vals):
    if all(v == vals[0] for v in vals):  # also covers all-inf reference cells
        return vals[0], 0.0
    m = sum(vals) / len(vals)
    var = sum((v - m) ** 2 for v in vals) / len(vals)
    return m, math.sqrt(var)


def run_experiment(spec: ExperimentSpec):
    """Run the full experiment matrix; returns a list of CSV row dicts.

    Detail rows carry per-seed metrics; each cell is followed by one
    aggregate row (seed == "mean") with mean values and std columns filled.
    """
    spec.validate()
    cfg = spec.prescale
    rows = []
    for size in sorted(spec.sizes):
        ref_plan = make_plan(size, ModeSpec.reference())
        inputs = []  # (dataset_id, seed, grid, reference RSS)
        if spec.input_path is not None:
            grid = read_grid(spec.input_path)
            if grid.n != size:
                raise ConfigError("sizes", f"input grid is {grid.n}, not {size}")
            want = KSPACE if spec.pipeline == "forward" else IMAGE
            if grid.domain != want:
                raise ConfigError("input", f"pipeline {spec.pipeline} needs a {want} grid")
            ref_out = _run_pipeline(grid, ref_plan, cfg, spec.pipeline)
            inputs.append((Path(spec.input_path).stem, 0, grid, ref_out))
        else:
            for seed in spec.seeds:
                image, kspace = gen_phantom(size, spec.coils, seed, spec.kind, spec.tail, spec.noise)
                grid = kspace if spec.pipeline == "forward" else image
                ref_out = _run_pipeline(grid, ref_plan, cfg, spec.pipeline)
                inputs.append((f"phantom-{spec.kind}", seed, grid, ref_out))
        for mode in sorted(spec.modes, key=MODE_NAMES.index):
            blocks = sorted(spec.blocks) if mode not in ("reference", "fp16") else [None]
            for block in blocks:
                plan = (
                    ref_plan
                    if mode == "reference"
                    else make_plan(size, ModeSpec.from_name(mode, block or 32))
                )
                cell = []
                for dataset_id, seed, grid, ref_out in inputs:
                    t0 = time.perf_counter()
                    out = _run_pipeline(grid, plan, cfg, spec.pipeline)
                    ms = (time.perf_counter() - t0) * 1e3
                    rep = metrics.report(ref_out, out)
                    k = compute_prescale(grid, cfg).k
                    cell.append((rep, k, ms))
                    rows.append(
                        {
                            "dataset_id": dataset_id,
                            "seed": str(seed),
                            "size": str(size),
                            "mode": mode,
                            "block": "" if block is None else str(block),
                            "pipeline": spec.pipeline,
                            "psnr": _fmt(rep.psnr_db),
                            "ssim": _fmt(rep.ssim),
                            "nmse": _fmt(rep.nmse),
                            "psnr_std": "",
                            "ssim_std": "",
                            "nmse_std": "",
                            "prescale_k": str(k),
                            "runtime_ms": f"{ms:.3f}",
                        }
                    )
                psnr_m, psnr_s = _mean_std([c[0].psnr_db for c in cell])
                ssim_m, ssim_s = _mean_std([c[0].ssim for c in cell])
                nmse_m, nmse_s = _mean_std([c[0].nmse for c in cell])
                rows.append(
                    {
                        "dataset_id": inputs[0][0],
                        "seed": "mean",
                        "size": str(size),
                        "mode": mode,
                        "block": "" if block is None else str(block),
                        "pipeline": spec.pipeline,
                        "psnr": _fmt(psnr_m),
                        "ssim": _fmt(ssim_m),
                        "nmse": _fmt(nmse_m),
                        "psnr_std": _fmt(psnr_s),
                        "ssim_std": _fmt(ssim_s),
                        "nmse_std": _fmt(nmse_s),
                        "prescale_k": "",
                        "runtime_ms": f"{sum(c[2] for c in cell) / len(cell):.3f}",
                    }
                )
    if spec.out:
        write_csv(rows, spec.out)
    return rows


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# argparse front end
# ---------------------------------------------------------------------------


def _add_prescale_flags(p):
    p.add_argument("--target", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--tau-min", type=float, default=2.0**-20)
    p.add_argument("--k-min", type=int, default=-40)
    p.add_argument("--k-max", type=int, default=40)


def _prescale_of(args) -> PrescaleConfig:
    return PrescaleConfig(
        target=args.target,
        tau=args.tau,
        tau_min=args.tau_min,
        k_min=args.k_min,
        k_max=args.k_max,
    )


def _add_common_flags(p):
    p.add_argument("--size", default="128", help="comma-separated grid sizes")
    p.add_argument("--coils", type=int, default=4)
    p.add_argument("--seeds", type=int, default=10, help="number of phantom seeds (0..S-1)")
    p.add_argument("--kind", default="blobs", choices=["blobs", "bars"])
    p.add_argument("--tail", type=float, default=0.2, help="low-magnitude texture weight")
    p.add_argument("--noise", type=float, default=0.1, help="complex noise floor amplitude")
    p.add_argument("--input", default=None, help="MXCG input file (overrides phantoms)")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    _add_prescale_flags(p)


def _ints(csv_str) -> list:
    return [int(s) for s in str(csv_str).split(",") if s]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mxfft", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-phantom", help="write phantom image/k-space MXCG files")
    g.add_argument("--size", type=int, default=128)
    g.add_argument("--coils", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--kind", default="blobs", choices=["blobs", "bars"])
    g.add_argument("--tail", type=float, default=0.2)
    g.add_argument("--noise", type=float, default=0.1)
    g.add_argument("--out-image", default=None)
    g.add_argument("--out-kspace", default=None)

    for name in ("forward", "roundtrip"):
        c = sub.add_parser(name, help=f"run one {name} cell")
        c.add_argument("--mode", default="e4m3", help="one of: " + ", ".join(MODE_NAMES))
        c.add_argument("--block", type=int, default=32)
        _add_common_flags(c)

    s = sub.add_parser("sweep", help="run the cross product of modes/sizes/blocks")
    s.add_argument("--mode", default="e4m3,e5m2", help="comma-separated modes")
    s.add_argument("--block", default="32", help="comma-separated block sizes")
    s.add_argument("--pipeline", default="forward", choices=["forward", "roundtrip"])
    _add_common_flags(s)

    return p


def _spec_of(args, modes, blocks, pipeline) -> ExperimentSpec:
    return ExperimentSpec(
        modes=modes,
        sizes=_ints(args.size),
        blocks=blocks,
        seeds=list(range(args.seeds)),
        pipeline=pipeline,
        coils=args.coils,
        kind=args.kind,
        tail=args.tail,
        noise=args.noise,
        prescale=_prescale_of(args),
        input_path=args.input,
        out=args.out,
    )


def _emit(rows, out):
    if out:
        return
    writer = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-phantom":
            image, kspace = gen_phantom(args.size, args.coils, args.seed, args.kind, args.tail, args.noise)
            if not args.out_image and not args.out_kspace:
                raise ConfigError("out", "need --out-image and/or --out-kspace")
            if args.out_image:
                write_grid(image, args.out_image)
            if args.out_kspace:
                write_grid(kspace, args.out_kspace)
            return 0
        if args.command in ("forward", "roundtrip"):
            spec = _spec_of(args, [args.mode], [args.block], args.command)
        else:
            spec = _spec_of(args, args.mode.split(","), _ints(args.block), args.pipeline)
        rows = run_experiment(spec)
        _emit(rows, spec.out)
        return 0
    except MxfftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
