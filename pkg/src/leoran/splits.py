"""Function-split catalog: latency budgets, fronthaul bandwidth, compute load.

The catalog is versioned static data; one entry per split option 1..10.
Bandwidth figures are per beam and per antenna configuration (2 or 64
antennas), in Mbps, for a single served user.  Compute load is expressed in
GOPS on each side of the split; entries carry a qualifier because some are
published only as bounds ("<8", ">36.5").

All operations are pure reads of the immutable catalog.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .geometry import MAX_DISTANCE_KM_PER_MS

CATALOG_VERSION = "1"

#: Latency classes, most relaxed first.
LATENCY_CLASSES = ("non-ideal", "sub-ideal", "near-ideal", "ideal")

ANTENNA_COUNTS = (2, 64)
DIRECTIONS = ("DL", "UL")

EXACT = "exact"
LESS_THAN = "less-than"
GREATER_THAN = "greater-than"


@dataclass(frozen=True)
class GopsBound:
    """A compute requirement in GOPS, possibly known only as a bound."""

    value: float
    qualifier: str = EXACT  # exact | less-than | greater-than

    def __post_init__(self) -> None:
        if self.qualifier not in (EXACT, LESS_THAN, GREATER_THAN):
            raise ValueError(f"unknown qualifier {self.qualifier!r}")

    def satisfied_by(self, capacity: float) -> bool:
        """Whether a platform offering ``capacity`` GOPS covers this bound.

        A ">x" requirement needs strictly more than x; "<x" is treated
        conservatively (capacity >= x always suffices).
        """
        if self.qualifier == GREATER_THAN:
            return capacity > self.value
        return capacity >= self.value

    def as_dict(self) -> dict:
        return {"value": self.value, "qualifier": self.qualifier}


@dataclass(frozen=True)
class FunctionSplitSpec:
    """One split option: latency class(es), budgets, bandwidth, GOPS."""

    id: int
    name: str
    latency_budget_ms: dict[str, float] = field(hash=False)
    fh_bw_mbps: dict[int, dict[str, float]] = field(hash=False)
    gops_gs: GopsBound = field(hash=False)
    gops_satellite: GopsBound = field(hash=False)

    @property
    def latency_classes(self) -> tuple[str, ...]:
        """Published classes, most relaxed first."""
        return tuple(c for c in LATENCY_CLASSES if c in self.latency_budget_ms)

    @property
    def max_fh_distance_km(self) -> dict[str, float]:
        """Per-class maximum fronthaul distance implied by the budget."""
        return {c: max_fh_distance(ms) for c, ms in self.latency_budget_ms.items()}

    def bandwidth_mbps(self, antenna_count: int, direction: str) -> float:
        if antenna_count not in ANTENNA_COUNTS:
            raise ValueError(f"antenna_count must be one of {ANTENNA_COUNTS}")
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        return self.fh_bw_mbps[antenna_count][direction]

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "latency_budget_ms": dict(self.latency_budget_ms),
            "max_fh_distance_km": self.max_fh_distance_km,
            "fh_bw_mbps": {str(n): dict(self.fh_bw_mbps[n]) for n in ANTENNA_COUNTS},
            "gops_gs": self.gops_gs.as_dict(),
            "gops_satellite": self.gops_satellite.as_dict(),
        }


def _split(sid, name, budgets, bw2, bw64, gs, sat):
    dl2, ul2 = bw2
    dl64, ul64 = bw64
    return FunctionSplitSpec(
        id=sid,
        name=name,
        latency_budget_ms=budgets,
        fh_bw_mbps={2: {"DL": dl2, "UL": ul2}, 64: {"DL": dl64, "UL": ul64}},
        gops_gs=gs,
        gops_satellite=sat,
    )


# Split catalog, v1.  Bandwidths for options 1-6 do not depend on the
# antenna count (higher-layer rates are antenna-independent); options 7-9
# publish two latency classes.
CATALOG: tuple[FunctionSplitSpec, ...] = (
    _split(1, "RRC - PDCP", {"non-ideal": 30.0},
           (149.9, 48.6), (149.9, 48.6),
           GopsBound(8.0, LESS_THAN), GopsBound(36.5, GREATER_THAN)),
    _split(2, "PDCP - RLC", {"non-ideal": 30.0},
           (150.0, 48.7), (150.0, 48.7),
           GopsBound(8.0, LESS_THAN), GopsBound(36.5, GREATER_THAN)),
    _split(3, "RLC - MAC", {"non-ideal": 30.0},
           (150.6, 48.9), (150.6, 48.9),
           GopsBound(8.0, LESS_THAN), GopsBound(36.5, GREATER_THAN)),
    _split(4, "hMAC - lMAC", {"sub-ideal": 6.0},
           (151.3, 49.4), (151.3, 49.4),
           GopsBound(8.0, LESS_THAN), GopsBound(36.5, GREATER_THAN)),
    _split(5, "MAC - PHY", {"sub-ideal": 6.0},
           (152.3, 49.9), (152.3, 49.9),
           GopsBound(8.0, LESS_THAN), GopsBound(36.5, GREATER_THAN)),
    _split(6, "PHY Split I", {"near-ideal": 2.0},
           (173.1, 451.6), (173.1, 451.6),
           GopsBound(8.0), GopsBound(36.5)),
    _split(7, "PHY Split II", {"near-ideal": 2.0, "ideal": 0.25},
           (932.6, 903.2), (29843.0, 28901.0),
           GopsBound(15.9), GopsBound(28.6)),
    _split(8, "PHY Split III", {"near-ideal": 2.0, "ideal": 0.25},
           (1075.2, 921.6), (34406.0, 29491.0),
           GopsBound(18.5), GopsBound(26.0)),
    _split(9, "PHY Split IIIb", {"near-ideal": 2.0, "ideal": 0.25},
           (1966.1, 1966.1), (62915.0, 62915.0),
           GopsBound(19.8), GopsBound(24.7)),
    _split(10, "PHY Split IV / PHY - RF", {"ideal": 0.25},
           (2457.6, 2457.6), (78643.0, 78643.0),
           GopsBound(23.8), GopsBound(20.7)),
)

SPLIT_IDS = tuple(s.id for s in CATALOG)


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of judging one split option against a separation distance."""

    split_id: int
    use_case: str
    separation_km: float
    budget_km: float
    feasible: bool
    margin_km: float
    bw_required_mbps: dict[str, float] = field(hash=False)
    satellite_gops_required: GopsBound = field(hash=False)
    compute_feasible: bool | None = None
    notes: str = ""

    def as_dict(self) -> dict:
        return {
            "split_id": self.split_id,
            "use_case": self.use_case,
            "separation_km": self.separation_km,
            "budget_km": self.budget_km,
            "feasible": self.feasible,
            "margin_km": self.margin_km,
            "bw_required_mbps": dict(self.bw_required_mbps),
            "satellite_gops_required": self.satellite_gops_required.as_dict(),
            "compute_feasible": self.compute_feasible,
            "notes": self.notes,
        }


def get_split(split_id: int) -> FunctionSplitSpec:
    """Return the catalog entry for a split id (1..10)."""
    for spec in CATALOG:
        if spec.id == split_id:
            return spec
    raise ValueError(f"unknown split id {split_id!r}; expected 1..10")


def max_fh_distance(latency_ms: float, km_per_ms: float = MAX_DISTANCE_KM_PER_MS) -> float:
    """Maximum one-way fronthaul distance (km) allowed by a latency budget."""
    if latency_ms < 0:
        raise ValueError("latency must be non-negative")
    return latency_ms * km_per_ms


def _judged_class(spec: FunctionSplitSpec, relax_ntn: bool) -> str:
    """Class a split is judged at when the caller does not pin one.

    With relaxation the most relaxed published class applies; without it,
    splits publishing several classes are held to the strictest one.
    """
    classes = spec.latency_classes
    return classes[0] if relax_ntn else classes[-1]


def check_feasibility(split_id: int,
                      use_case: str,
                      total_path_km: float,
                      antenna_count: int = 2,
                      beams: int = 1,
                      satellite_gops_capacity: float | None = None,
                      relax_ntn: bool = False) -> FeasibilityVerdict:
    """Judge one split at one latency class against a separation distance.

    ``total_path_km`` may span several hops; only the total matters.  A tie
    (separation exactly equal to the budget) counts as feasible: budgets are
    round numbers and the boundary case is the interesting one.  Required
    bandwidth scales linearly with the beam count.

    If ``use_case`` is not among the split's published classes, the call
    fails unless ``relax_ntn`` is set, in which case the split is judged at
    its most relaxed published class and the substitution is noted.
    """
    spec = get_split(split_id)
    if use_case not in LATENCY_CLASSES:
        raise ValueError(f"unknown use case {use_case!r}; expected one of {LATENCY_CLASSES}")
    if beams < 1:
        raise ValueError("beams must be a positive integer")
    if total_path_km < 0:
        raise ValueError("total_path_km must be non-negative")

    notes = ""
    judged = use_case
    if use_case not in spec.latency_budget_ms:
        if not relax_ntn:
            raise ValueError(
                f"split {split_id} does not publish a {use_case!r} class and "
                f"relaxation is off (published: {spec.latency_classes})")
        judged = _judged_class(spec, relax_ntn=True)
        notes = f"relaxation applied: judged at {judged} instead of {use_case}"

    budget_km = max_fh_distance(spec.latency_budget_ms[judged])
    feasible = total_path_km <= budget_km
    bw = {d: spec.bandwidth_mbps(antenna_count, d) * beams for d in DIRECTIONS}

    compute_feasible = None
    if satellite_gops_capacity is not None:
        compute_feasible = spec.gops_satellite.satisfied_by(satellite_gops_capacity)

    return FeasibilityVerdict(
        split_id=split_id,
        use_case=judged,
        separation_km=total_path_km,
        budget_km=budget_km,
        feasible=feasible,
        margin_km=budget_km - total_path_km,
        bw_required_mbps=bw,
        satellite_gops_required=spec.gops_satellite,
        compute_feasible=compute_feasible,
        notes=notes,
    )


def feasible_set(separation_km: float, relax_ntn: bool = False) -> tuple[int, ...]:
    """Split ids whose latency budget covers the given separation.

    Splits publishing both a near-ideal and an ideal class are judged at
    near-ideal when ``relax_ntn`` is set and at ideal otherwise; split 10
    publishes only the ideal class, so relaxation never rescues it.
    """
    if separation_km <= 0:
        raise ValueError("separation must be positive")
    ids = []
    for spec in CATALOG:
        judged = _judged_class(spec, relax_ntn)
        if separation_km <= max_fh_distance(spec.latency_budget_ms[judged]):
            ids.append(spec.id)
    return tuple(ids)


def bw_ratio(from_split: int, to_split: int, antenna_count: int, direction: str) -> float:
    """Ratio of required fronthaul bandwidth between two split options."""
    return (get_split(to_split).bandwidth_mbps(antenna_count, direction)
            / get_split(from_split).bandwidth_mbps(antenna_count, direction))


def export_catalog_json() -> str:
    """Serialize the catalog, one object per split, in canonical key order."""
    payload = {
        "catalog_version": CATALOG_VERSION,
        "splits": [spec.as_dict() for spec in CATALOG],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def parse_catalog_json(text: str) -> tuple[FunctionSplitSpec, ...]:
    """Rebuild split specs from :func:`export_catalog_json` output."""
    payload = json.loads(text)
    specs = []
    for obj in payload["splits"]:
        specs.append(FunctionSplitSpec(
            id=obj["id"],
            name=obj["name"],
            latency_budget_ms=dict(obj["latency_budget_ms"]),
            fh_bw_mbps={int(n): dict(v) for n, v in obj["fh_bw_mbps"].items()},
            gops_gs=GopsBound(**obj["gops_gs"]),
            gops_satellite=GopsBound(**obj["gops_satellite"]),
        ))
    return tuple(specs)
