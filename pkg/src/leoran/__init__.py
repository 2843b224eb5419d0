"""Feasibility analysis of RAN function splits over LEO satellites and
deterministic timing of the conditional-handover procedures they imply."""

from .cho import (MessageCounts, MessageSpec, PhaseDurations, ProcedureCatalog,
                  TimelineTrace, TimingConfig, TraceEvent, evaluate_timeline,
                  message_counts, phase_durations, procedure_catalog)
from .geometry import (LIGHT_SPEED_KM_PER_MS, MAX_DISTANCE_KM_PER_MS,
                       REFERENCE_DELAYS, REFERENCE_DELAYS_ZENITH, GeometryConfig,
                       LinkDelays, igsl_distance, isl_distance, link_delays,
                       propagation_delay, slant_range)
from .metrics import (CellMetrics, MetricsReport, OrderingCheck, check_orderings,
                      default_grid, evaluate_deployment, plot_data_csv,
                      report_from_json, report_to_csv, report_to_json, run_grid,
                      serialize)
from .splits import (CATALOG, FeasibilityVerdict, FunctionSplitSpec, GopsBound,
                     bw_ratio, check_feasibility, export_catalog_json, feasible_set,
                     get_split, max_fh_distance, parse_catalog_json)
from .topology import (INTER_DU, INTER_GNB, INTRA_DU, Deployment, Link, Node,
                       Topology, build_topology, resolve_path, select_procedure)

__version__ = "0.1.0"

__all__ = [
    "CATALOG", "CellMetrics", "Deployment", "FeasibilityVerdict",
    "FunctionSplitSpec", "GeometryConfig", "GopsBound", "INTER_DU", "INTER_GNB",
    "INTRA_DU", "LIGHT_SPEED_KM_PER_MS", "Link", "LinkDelays",
    "MAX_DISTANCE_KM_PER_MS", "MessageCounts", "MessageSpec", "MetricsReport",
    "Node", "OrderingCheck", "PhaseDurations", "ProcedureCatalog",
    "REFERENCE_DELAYS", "REFERENCE_DELAYS_ZENITH", "TimelineTrace",
    "TimingConfig", "Topology", "TraceEvent", "bw_ratio", "check_feasibility",
    "check_orderings", "default_grid", "evaluate_deployment", "evaluate_timeline",
    "export_catalog_json", "feasible_set", "get_split", "igsl_distance",
    "isl_distance", "link_delays", "max_fh_distance", "message_counts",
    "parse_catalog_json", "phase_durations", "plot_data_csv", "procedure_catalog",
    "propagation_delay", "report_from_json", "report_to_csv", "report_to_json",
    "resolve_path", "run_grid", "select_procedure", "serialize", "slant_range",
]
