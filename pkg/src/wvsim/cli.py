"""Command-line entry point.

Subcommands:
  simulate <config>     run an experiment and write its artifact directory
  spectrum <config>     grid diagonalization, spectrum and coherence traces
  weakvalues <config>   like simulate, with the weak-value sampling points
                        overridden from the command line
  report <dir>          re-render the SVG figures from the CSVs in <dir>

<config> is either a JSON file path or a preset name.  Scalar config fields
can be overridden one-for-one with flags (e.g. --seed, --gamma-d).

Exit codes: 0 success, 1 physics error, 2 usage/schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as configmod
from . import experiment, report
from .errors import SchemaViolationError, SimulationError

_OVERRIDABLE = {
    "n_particles": int,
    "points_per_axis": int,
    "half_width": float,
    "omega": float,
    "alpha": float,
    "gamma_d": float,
    "sigma_d": float,
    "seed": int,
    "dt": float,
    "t_final": float,
    "record_stride": int,
    "mode": str,
    "outputs": str,
}


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    for name, kind in _OVERRIDABLE.items():
        flag = "--" + name.replace("_", "-")
        if name == "mode":
            parser.add_argument(flag, choices=configmod.MODES, default=None)
        else:
            parser.add_argument(flag, type=kind, default=None)
    parser.add_argument(
        "--orbitals",
        default=None,
        help='JSON list, e.g. \'[{"center": -4.0, "boost": 20.0, "width": 1.0}]\'',
    )
    parser.add_argument(
        "--snapshot-times", default=None, help="comma-separated times"
    )


def _load_config(args) -> configmod.ExperimentConfig:
    source = args.config
    if source in configmod.PRESET_NAMES:
        document = json.loads(
            configmod.serialize_config(configmod.preset(source))
        )
    else:
        path = Path(source)
        if not path.exists():
            raise SchemaViolationError(
                "<config>", f"{source!r} is neither a preset nor an existing file"
            )
        document = json.loads(configmod.serialize_config(
            configmod.parse_config(path.read_text())
        ))
    for name in _OVERRIDABLE:
        value = getattr(args, name, None)
        if value is not None:
            document[name] = value
    if getattr(args, "orbitals", None) is not None:
        document["orbitals"] = json.loads(args.orbitals)
    if getattr(args, "snapshot_times", None) is not None:
        document["snapshot_times"] = [
            float(v) for v in args.snapshot_times.split(",") if v.strip()
        ]
    if getattr(args, "points", None):
        document["weakvalue_eval_points"] = [float(v) for v in args.points]
    return configmod.parse_config(json.dumps(document))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wvsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run an experiment")
    p_sim.add_argument("config", help="JSON config path or preset name")
    _add_override_flags(p_sim)

    p_spec = sub.add_parser("spectrum", help="diagonalize and export spectrum")
    p_spec.add_argument("config", help="JSON config path or preset name")
    p_spec.add_argument("--n-states", type=int, default=experiment.DEFAULT_N_STATES)
    _add_override_flags(p_spec)

    p_wv = sub.add_parser("weakvalues", help="simulate with explicit eval points")
    p_wv.add_argument("config", help="JSON config path or preset name")
    p_wv.add_argument(
        "--points", type=float, nargs="+", required=True, help="physical-axis points"
    )
    _add_override_flags(p_wv)

    p_rep = sub.add_parser("report", help="re-render figures from CSVs")
    p_rep.add_argument("directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            outdir = Path(args.directory)
            if not outdir.is_dir():
                print(f"error: {outdir} is not a directory", file=sys.stderr)
                return 2
            written = report.render_all(outdir)
            for path in written:
                print(path)
            return 0
        cfg = _load_config(args)
        if args.command == "spectrum":
            outdir = experiment.run_spectrum(cfg, n_states=args.n_states)
            print(outdir)
            return 0
        result = experiment.run_experiment(cfg)
        print(result.output_dir)
        return 0
    except SchemaViolationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SimulationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
