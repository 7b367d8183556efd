"""Command-line front end: beam-selection dumps and figure-oriented sweep runs.

``fdlink show-beams`` prints the quantized beam grid, the angular supports,
and the selected beams of both nodes as a flat CSV for plotting.
``fdlink sweep KIND`` runs one of the canned Monte Carlo experiments and
writes long-format CSV files into the output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .arrays import quantized_angle_grid
from .channel import angular_support
from .config import (
    SimConfig,
    default_config,
    load_config,
    with_square_arrays,
    with_stream_counts,
)
from .harness import SweepResult, count_failures, run_sweep, write_csv
from .rfstage import select_grid_cells
from .supports import AngularSupport, support_boundary_polyline

__all__ = ["main"]

SWEEP_KINDS = (
    "sic-rf",
    "sic-stream",
    "sic-array",
    "rate",
    "gain-ratio",
    "energy",
    "angle-error",
)

_P_T_GRID = [float(v) for v in range(0, 45, 5)]
_P_IS_GRID = [float(v) for v in range(0, 121, 10)]
_ARRAY_GRID = [64, 144, 256, 400, 576, 784, 1024]
_STREAM_GRID = [1, 2, 3, 4, 5, 6]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdlink",
        description="Full-duplex mmWave link simulator: beam dumps and Monte Carlo sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    beams = sub.add_parser(
        "show-beams",
        help="dump grid pairs, angular supports, and selected beams as CSV",
    )
    beams.add_argument("--config", metavar="PATH", help="JSON config (default: built-in scenario)")
    beams.add_argument("--out", metavar="FILE", help="output file (default: stdout)")
    beams.add_argument("--seed", type=int, metavar="U64", help="override the master seed")

    sweep = sub.add_parser("sweep", help="run a canned Monte Carlo sweep and write CSV files")
    sweep.add_argument("kind", choices=SWEEP_KINDS, help="which experiment to run")
    sweep.add_argument("--config", metavar="PATH", help="JSON config (default: built-in scenario)")
    sweep.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    sweep.add_argument("--seed", type=int, metavar="U64", help="override the master seed")
    sweep.add_argument(
        "--realizations", type=int, metavar="N", help="override the per-point realization count"
    )
    sweep.add_argument("--workers", type=int, metavar="N", help="process-pool size (default: serial)")
    return parser


def _load_base(args: argparse.Namespace) -> SimConfig:
    config = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        if args.seed < 0:
            raise ValueError("--seed must be nonnegative")
        config = replace(config, master_seed=args.seed)
    return config


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _cmd_show_beams(args: argparse.Namespace) -> int:
    config = _load_base(args)
    rule = "literal" if config.literal_pair_rule else "strict"
    empty = AngularSupport(())
    lines = ["record,node,role,i,j,gamma_x,gamma_y,selected"]
    for tag, node in (("node1", config.node1), ("node2", config.node2)):
        aod = angular_support(node.intended_departure_clusters)
        aoa = angular_support(node.intended_arrival_clusters)
        si_aod = angular_support(node.si_departure_clusters)
        si_aoa = angular_support(node.si_arrival_clusters)
        exclude_tx = empty if config.architecture == "abhpc_hd" else si_aod
        exclude_rx = empty if config.architecture == "abhpc_hd" else si_aoa
        for side, geom, cover, exclude in (
            ("transmit", node.tx_geometry, aod, exclude_tx),
            ("receive", node.rx_geometry, aoa, exclude_rx),
        ):
            grid = quantized_angle_grid(geom)
            chosen = {
                (c.x_index, c.y_index) for c in select_grid_cells(grid, cover, exclude, rule)
            }
            for cell in grid:
                flag = 1 if (cell.x_index, cell.y_index) in chosen else 0
                lines.append(
                    f"grid,{tag},{side},{cell.x_index},{cell.y_index},"
                    f"{_fmt(cell.pair.gamma_x)},{_fmt(cell.pair.gamma_y)},{flag}"
                )
        for role, sup in (
            ("intended_aod", aod),
            ("intended_aoa", aoa),
            ("si_aod", si_aod),
            ("si_aoa", si_aoa),
        ):
            for rect_idx, rect in enumerate(sup.rectangles):
                for vert_idx, (gx, gy) in enumerate(support_boundary_polyline(rect)):
                    lines.append(
                        f"support,{tag},{role},{rect_idx},{vert_idx},{_fmt(gx)},{_fmt(gy)},"
                    )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _sweep_plan(
    kind: str, base: SimConfig
) -> list[tuple[str, list[tuple[str, SimConfig, str, list[float]]]]]:
    """(filename, [(scenario, config, sweep param, values), ...]) pairs for one kind."""

    def arch(name: str, **kw) -> SimConfig:
        return replace(base, architecture=name, **kw)

    if kind == "sic-rf":
        return [("sic_rf.csv", [("abjhpc_smmse", arch("abjhpc_smmse"), "p_is_db", _P_IS_GRID)])]
    if kind == "sic-stream":
        return [
            (
                "sic_stream.csv",
                [
                    ("abjhpc_smmse", arch("abjhpc_smmse"), "p_is_db", _P_IS_GRID),
                    ("abjhpc_svd", arch("abjhpc_svd"), "p_is_db", _P_IS_GRID),
                ],
            )
        ]
    if kind == "sic-array":
        return [
            (
                "sic_array.csv",
                [("abjhpc_smmse", arch("abjhpc_smmse"), "array_size", _ARRAY_GRID)],
            )
        ]
    if kind == "rate":
        scenarios = [
            (f"abjhpc_smmse_pis{int(p)}", arch("abjhpc_smmse", p_is_db=p), "p_t_dbm", _P_T_GRID)
            for p in (40.0, 60.0, 80.0, 100.0)
        ]
        scenarios.append(("abhpc_hd", arch("abhpc_hd"), "p_t_dbm", _P_T_GRID))
        return [("rate.csv", scenarios)]
    if kind == "gain-ratio":
        scenarios = []
        for m in (64, 144, 256):
            for arch_name, suffix in (
                ("abjhpc_smmse", "smmse"),
                ("abjhpc_svd", "svd"),
                ("abhpc_hd", "hd"),
            ):
                cfg = with_square_arrays(arch(arch_name, p_is_db=74.0), m)
                scenarios.append((f"m{m}_{suffix}", cfg, "stream_count", _STREAM_GRID))
        return [("gain_ratio.csv", scenarios)]
    if kind == "energy":
        pt_scenarios = [
            ("abjhpc_smmse", arch("abjhpc_smmse"), "p_t_dbm", _P_T_GRID),
            ("fdpc_fd", arch("fdpc_fd"), "p_t_dbm", _P_T_GRID),
        ]
        pis_scenarios = [
            ("abjhpc_smmse", arch("abjhpc_smmse"), "p_is_db", _P_IS_GRID),
            ("fdpc_fd", arch("fdpc_fd"), "p_is_db", _P_IS_GRID),
        ]
        return [("energy_pt.csv", pt_scenarios), ("energy_pis.csv", pis_scenarios)]
    if kind == "angle-error":
        scenarios = []
        for m, s in ((256, 4), (144, 3)):
            shaped = with_stream_counts(
                with_square_arrays(arch("abjhpc_smmse", p_is_db=74.0), m), s
            )
            scenarios.append(
                (f"m{m}_s{s}_perfect", replace(shaped, imperfect_angles=False), "p_t_dbm", _P_T_GRID)
            )
            scenarios.append(
                (f"m{m}_s{s}_imperfect", replace(shaped, imperfect_angles=True), "p_t_dbm", _P_T_GRID)
            )
        return [("angle_error.csv", scenarios)]
    raise ValueError(f"unknown sweep kind {kind!r}")


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _load_base(args)
    plan = _sweep_plan(args.kind, base)
    os.makedirs(args.out, exist_ok=True)
    bad_points: list[str] = []
    for filename, scenarios in plan:
        merged = SweepResult(())
        for name, cfg, param, values in scenarios:
            count = args.realizations if args.realizations is not None else cfg.realizations
            print(
                f"running {name}: {len(values)} x {count} realizations ({param})",
                file=sys.stderr,
            )
            result = run_sweep(
                cfg,
                param,
                values,
                realizations=args.realizations,
                workers=args.workers,
                scenario=name,
            )
            merged = merged.merged_with(result)
            for key, failed in count_failures(result).items():
                if count > 0 and failed / count > 0.01:
                    bad_points.append(
                        f"{key[0]} {key[1]}={key[2]:g}: {failed}/{count} failed"
                    )
        path = os.path.join(args.out, filename)
        write_csv(merged, path)
        print(f"wrote {path} ({len(merged.records)} records)")
    if bad_points:
        print("sweep points with >1% failed realizations:", file=sys.stderr)
        for line in bad_points:
            print(f"  {line}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "show-beams":
            return _cmd_show_beams(args)
        return _cmd_sweep(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
