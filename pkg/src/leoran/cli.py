"""Command-line interface: feasibility, cho, and grid subcommands.

Configuration precedence is flags > config file (--config, JSON) > built-in
defaults.  The defaults reproduce the reference configuration (600 km
orbit, service link at 30 deg, feeder link at 10 deg) with the reference
delay table; overriding any geometry value switches the link delays to the
ones recomputed from orbit geometry.

Exit codes: 0 on success, 1 on usage/configuration errors, 2 when the grid
command finds a qualitative ordering check that does not strictly pass.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .cho import TimingConfig, message_counts, phase_durations
from .geometry import REFERENCE_DELAYS, GeometryConfig, LinkDelays, link_delays, slant_range
from .metrics import (check_orderings, default_grid, evaluate_deployment,
                      plot_data_csv, report_to_csv, report_to_json, run_grid)
from .splits import CATALOG, check_feasibility, feasible_set
from .topology import AMF_SITES, Deployment, build_topology, select_procedure

_SPLIT_FLAGS = {"lls": "LLS", "cu-du": "CU_DU", "gnb": "GNB"}
_AMF_FLAGS = {"source": "source_gs", "target": "target_gs"}

_GEOMETRY_KEYS = ("altitude_km", "sl_elevation_deg", "fl_elevation_deg",
                  "sats_per_plane", "igsl_inflation", "earth_radius_km")
_TIMING_KEYS = ("per_message_processing_ms", "ssb_acquisition_ms",
                "cn_api_total_ms", "trigger_offset_ms", "processing_at_relays")
_TOP_LEVEL_KEYS = ("geometry", "timing", "relax_ntn", "antennas", "beams",
                   "scenario", "split", "amf_site", "format", "out")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    geometry: GeometryConfig
    timing: TimingConfig
    geometry_overridden: bool = False
    relax_ntn: bool = True
    antennas: int = 2
    beams: int = 1
    scenario: str | None = None
    split: str | None = None
    amf_site: str = "source_gs"
    fmt: str = "json"
    out: Path | None = None
    figures_dir: Path | None = None
    render_figures: bool = True

    @property
    def delays(self) -> LinkDelays:
        """Reference delay table by default; recomputed once geometry moves."""
        if self.geometry_overridden:
            return link_delays(self.geometry)
        return REFERENCE_DELAYS


def _load_config_file(path: Path) -> dict:
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config file must hold a single JSON object")
    for key in payload:
        if key not in _TOP_LEVEL_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    for section, allowed in (("geometry", _GEOMETRY_KEYS), ("timing", _TIMING_KEYS)):
        sub = payload.get(section, {})
        if not isinstance(sub, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        for key in sub:
            if key not in allowed:
                raise ConfigError(f"unknown config key {section}.{key!r}")
    return payload


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = _load_config_file(Path(args.config)) if args.config else {}

    geo_kwargs = dict(file_cfg.get("geometry", {}))
    flag_geo = {
        "altitude_km": args.altitude,
        "sl_elevation_deg": args.sl_elevation,
        "fl_elevation_deg": args.fl_elevation,
        "sats_per_plane": args.sats_per_plane,
    }
    for key, value in flag_geo.items():
        if value is not None:
            geo_kwargs[key] = value
    try:
        geometry = GeometryConfig(**geo_kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid geometry: {exc}") from exc

    timing_kwargs = dict(file_cfg.get("timing", {}))
    if getattr(args, "trigger_offset", None) is not None:
        timing_kwargs["trigger_offset_ms"] = args.trigger_offset
    try:
        timing = TimingConfig(**timing_kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid timing: {exc}") from exc

    cfg = RunConfig(geometry=geometry, timing=timing,
                    geometry_overridden=bool(geo_kwargs))

    if "relax_ntn" in file_cfg:
        cfg.relax_ntn = bool(file_cfg["relax_ntn"])
    if args.relax_ntn is not None:
        cfg.relax_ntn = args.relax_ntn

    for attr, key, flag in (("antennas", "antennas", args.antennas),
                            ("beams", "beams", args.beams)):
        if key in file_cfg:
            setattr(cfg, attr, int(file_cfg[key]))
        if flag is not None:
            setattr(cfg, attr, flag)
    if cfg.antennas not in (2, 64):
        raise ConfigError(f"antennas must be 2 or 64, got {cfg.antennas}")
    if cfg.beams < 1:
        raise ConfigError("beams must be a positive integer")

    scenario = file_cfg.get("scenario")
    if getattr(args, "scenario", None) is not None:
        scenario = args.scenario
    cfg.scenario = scenario.upper() if isinstance(scenario, str) else scenario

    split = file_cfg.get("split")
    if getattr(args, "split", None) is not None:
        split = args.split
    if split is not None:
        key = str(split).lower().replace("_", "-")
        if key not in _SPLIT_FLAGS:
            raise ConfigError(f"unknown split {split!r}; expected lls, cu-du or gnb")
        cfg.split = _SPLIT_FLAGS[key]

    amf = file_cfg.get("amf_site")
    if getattr(args, "amf_site", None) is not None:
        amf = args.amf_site
    if amf is not None:
        amf = _AMF_FLAGS.get(str(amf), str(amf))
        if amf not in AMF_SITES:
            raise ConfigError(f"unknown amf_site {amf!r}; expected source or target")
        cfg.amf_site = amf

    fmt = file_cfg.get("format")
    if args.format is not None:
        fmt = args.format
    if fmt is not None:
        if fmt not in ("json", "csv"):
            raise ConfigError(f"unknown format {fmt!r}; expected json or csv")
        cfg.fmt = fmt

    out = file_cfg.get("out")
    if args.out is not None:
        out = args.out
    cfg.out = Path(out) if out else None

    if getattr(args, "figures", None) is not None:
        cfg.figures_dir = Path(args.figures)
    cfg.render_figures = getattr(args, "no_figures", False) is False
    return cfg


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is not None:
        cfg.out.parent.mkdir(parents=True, exist_ok=True)
        cfg.out.write_text(text if text.endswith("\n") else text + "\n")
        print(f"wrote {cfg.out}", file=sys.stderr)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def _cmd_feasibility(cfg: RunConfig) -> int:
    separation = slant_range(cfg.geometry, cfg.geometry.fl_elevation_deg)
    verdicts = []
    for spec in CATALOG:
        judged = spec.latency_classes[0] if cfg.relax_ntn else spec.latency_classes[-1]
        verdicts.append(check_feasibility(
            spec.id, judged, separation,
            antenna_count=cfg.antennas, beams=cfg.beams))
    ids = feasible_set(separation, relax_ntn=cfg.relax_ntn)

    if cfg.fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("split_id", "name", "use_case", "budget_km",
                         "separation_km", "feasible", "margin_km",
                         "bw_dl_mbps", "bw_ul_mbps",
                         "sat_gops", "sat_gops_qualifier"))
        for spec, v in zip(CATALOG, verdicts):
            writer.writerow((v.split_id, spec.name, v.use_case,
                             f"{v.budget_km:.0f}", f"{v.separation_km:.1f}",
                             v.feasible, f"{v.margin_km:.1f}",
                             f"{v.bw_required_mbps['DL']:g}",
                             f"{v.bw_required_mbps['UL']:g}",
                             f"{v.satellite_gops_required.value:g}",
                             v.satellite_gops_required.qualifier))
        _emit(cfg, out.getvalue())
    else:
        payload = {
            "separation_km": separation,
            "fl_elevation_deg": cfg.geometry.fl_elevation_deg,
            "altitude_km": cfg.geometry.altitude_km,
            "relax_ntn": cfg.relax_ntn,
            "antennas": cfg.antennas,
            "beams": cfg.beams,
            "feasible_split_ids": list(ids),
            "verdicts": [v.as_dict() for v in verdicts],
        }
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _single_deployment(cfg: RunConfig) -> Deployment:
    if cfg.scenario is None or cfg.split is None:
        raise ConfigError("cho requires --scenario and --split")
    if cfg.scenario == "B":
        raise ConfigError("scenario B is ambiguous here; use B1 or B2")
    try:
        return Deployment(cfg.scenario, cfg.split,
                          cfg.amf_site if cfg.scenario == "C" else "source_gs")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_cho(cfg: RunConfig) -> int:
    dep = _single_deployment(cfg)
    topo = build_topology(dep, cfg.delays)
    cell, trace = evaluate_deployment(dep, cfg.delays, cfg.timing)
    durations = phase_durations(trace)
    counts = message_counts(trace)

    if cfg.fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("name", "phase", "start_ms", "arrival_ms", "links"))
        for e in trace.events:
            writer.writerow((e.name, e.phase, f"{e.start_ms:.2f}",
                             f"{e.arrival_ms:.2f}", "+".join(e.links)))
        _emit(cfg, out.getvalue())
    else:
        payload = {
            "deployment": {"scenario": dep.scenario, "split": dep.split,
                           "amf_site": dep.amf_site},
            "procedure": select_procedure(dep),
            "durations_ms": {
                "setup": durations.setup_ms,
                "buffer": durations.buffer_ms,
                "execution": durations.execution_ms,
                "total": durations.total_ms,
            },
            "counts": dict(counts.total),
            "counts_by_phase": {p: dict(v) for p, v in counts.by_phase.items()},
            "trace": trace.as_dict(),
            "topology": topo.as_dict(),
        }
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _grid_deployments(cfg: RunConfig) -> tuple[Deployment, ...]:
    grid = default_grid(amf_site=cfg.amf_site)
    if cfg.scenario is None:
        return grid
    wanted = {"A": ("A",), "B": ("B1", "B2"), "B1": ("B1",),
              "B2": ("B2",), "C": ("C",)}.get(cfg.scenario)
    if wanted is None:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}")
    deployments = tuple(d for d in grid if d.scenario in wanted)
    if cfg.split is not None:
        deployments = tuple(d for d in deployments if d.split == cfg.split)
    return deployments


def _cmd_grid(cfg: RunConfig) -> int:
    report = run_grid(delays=cfg.delays, timing=cfg.timing,
                      deployments=_grid_deployments(cfg))
    checks = check_orderings(report)

    if cfg.fmt == "csv":
        _emit(cfg, report_to_csv(report))
    else:
        payload = {
            "report": json.loads(report_to_json(report)),
            "ordering_checks": [c.as_dict() for c in checks],
        }
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))

    for check in checks:
        print(f"[{check.status.upper():7s}] {check.claim_id}", file=sys.stderr)

    figures_dir = cfg.figures_dir
    if figures_dir is None and cfg.out is not None and cfg.render_figures:
        figures_dir = cfg.out.parent
    if figures_dir is not None and cfg.render_figures:
        from .figures import render_report_figures  # matplotlib import is lazy

        prefix = cfg.out.stem if cfg.out is not None else "cho"
        paths = render_report_figures(report, figures_dir, prefix=prefix)
        (figures_dir / f"{prefix}_plot_data.csv").write_text(plot_data_csv(report))
        for p in paths:
            print(f"wrote {p}", file=sys.stderr)

    evaluated = [c for c in checks if c.status != "skipped"]
    return 0 if all(c.status == "pass" for c in evaluated) else 2


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser, *, deployment: bool) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    geo = parser.add_argument_group("geometry")
    geo.add_argument("--altitude", type=float, metavar="KM",
                     help="orbit altitude (default 600)")
    geo.add_argument("--sl-elevation", type=float, metavar="DEG",
                     help="service-link elevation angle (default 30)")
    geo.add_argument("--fl-elevation", type=float, metavar="DEG",
                     help="feeder-link elevation angle (default 10)")
    geo.add_argument("--sats-per-plane", type=int, metavar="N",
                     help="satellites per orbital plane (default 20)")
    relax = parser.add_mutually_exclusive_group()
    relax.add_argument("--relax-ntn", dest="relax_ntn", action="store_true",
                       default=None,
                       help="judge dual-class splits at their relaxed class (default)")
    relax.add_argument("--no-relax", dest="relax_ntn", action="store_false",
                       help="hold dual-class splits to their strictest class")
    parser.add_argument("--antennas", type=int, choices=(2, 64),
                        help="antenna count for bandwidth lookups (default 2)")
    parser.add_argument("--beams", type=int, metavar="N",
                        help="beams per satellite; scales bandwidth (default 1)")
    if deployment:
        parser.add_argument("--scenario", choices=("A", "B", "B1", "B2", "C"),
                            help="scenario variant")
        parser.add_argument("--split", choices=tuple(_SPLIT_FLAGS),
                            help="function placement")
        parser.add_argument("--amf-site", choices=tuple(_AMF_FLAGS),
                            help="which ground station co-hosts the core (scenario C)")
        parser.add_argument("--trigger-offset", type=float, metavar="MS",
                            help="gap between setup end and the handover trigger")
    parser.add_argument("--format", choices=("json", "csv"),
                        help="output format (default json)")
    parser.add_argument("--out", metavar="PATH", help="write output to a file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="leoran",
        description="Function-split feasibility and conditional-handover "
                    "timing analysis for LEO satellite RAN deployments.")
    sub = parser.add_subparsers(dest="command", required=True)

    feas = sub.add_parser(
        "feasibility",
        help="judge every split option against the feeder-link separation")
    _add_common(feas, deployment=False)

    chop = sub.add_parser(
        "cho", help="evaluate one (scenario, split) handover timeline")
    _add_common(chop, deployment=True)

    grid = sub.add_parser(
        "grid",
        help="evaluate the scenario x split grid and the ordering checks")
    _add_common(grid, deployment=True)
    grid.add_argument("--figures", metavar="DIR",
                      help="directory for rendered figures "
                           "(default: alongside --out)")
    grid.add_argument("--no-figures", action="store_true",
                      help="skip figure rendering")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "feasibility":
            return _cmd_feasibility(cfg)
        if args.command == "cho":
            return _cmd_cho(cfg)
        return _cmd_grid(cfg)
    except ConfigError as exc:
        print(f"leoran: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"leoran: I/O error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
