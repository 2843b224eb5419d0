"""Conditional-handover procedures as message DAGs, and their evaluation.

Each procedure is a catalog of messages.  A message either travels between
two logical functions (and then costs its path's propagation delay plus a
fixed per-message processing delay at the receiver) or is a purely local
step with a fixed duration (downlink synchronization, the block of core
API calls during a path switch).

Three phases:

* setup     - the source side configures the UE with a trigger condition;
* buffer    - from the trigger until Msg4 of the random access completes;
  the UE cannot move data in this window, so its length is the headline
  quality metric;
* execution - post-access cleanup (context release, path switch).

Evaluation is an earliest-start schedule over the dependency DAG: a message
starts when all its dependencies have arrived, and the trigger condition
(an exogenous event) separates setup from the buffer phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .topology import INTER_DU, INTER_GNB, INTRA_DU, PROCEDURES, Topology, resolve_path

CATALOG_VERSION = "1"

PHASES = ("setup", "buffer", "execution")

#: Keys into TimingConfig used by local (non-transmitted) steps.
LOCAL_DELAY_KEYS = ("ssb_acquisition_ms", "cn_api_total_ms")


@dataclass(frozen=True)
class TimingConfig:
    """Fixed, link-independent delays of the signaling model."""

    per_message_processing_ms: float = 1.0
    ssb_acquisition_ms: float = 20.0
    cn_api_total_ms: float = 50.0
    trigger_offset_ms: float = 0.0
    processing_at_relays: bool = False

    def __post_init__(self) -> None:
        for name in ("per_message_processing_ms", "ssb_acquisition_ms",
                     "cn_api_total_ms", "trigger_offset_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class MessageSpec:
    """One step of a procedure: a transmitted message or a local delay.

    Transmitted messages name both endpoint functions; UE-anchored ones
    also carry the chain (source/target) whose service link they use.
    Local steps have no endpoints and take their duration from the named
    TimingConfig field.
    """

    name: str
    phase: str
    from_fn: str | None = None
    to_fn: str | None = None
    deps: tuple[str, ...] = ()
    uu_chain: str | None = None
    local_delay_key: str | None = None
    after_trigger: bool = False

    def __post_init__(self) -> None:
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase {self.phase!r}")
        if self.is_local:
            if self.from_fn or self.to_fn:
                raise ValueError(f"{self.name}: local steps have no endpoints")
            if self.local_delay_key not in LOCAL_DELAY_KEYS:
                raise ValueError(f"{self.name}: unknown local delay {self.local_delay_key!r}")
        elif not (self.from_fn and self.to_fn):
            raise ValueError(f"{self.name}: transmitted messages need both endpoints")

    @property
    def is_local(self) -> bool:
        return self.local_delay_key is not None


@dataclass(frozen=True)
class ProcedureCatalog:
    """Ordered, dependency-closed message list for one procedure variant."""

    variant: str
    messages: tuple[MessageSpec, ...]

    def __post_init__(self) -> None:
        names = [m.name for m in self.messages]
        if len(names) != len(set(names)):
            raise ValueError("duplicate message names in catalog")
        byname = {m.name: m for m in self.messages}
        order = {p: i for i, p in enumerate(PHASES)}
        for m in self.messages:
            for dep in m.deps:
                if dep not in byname:
                    raise ValueError(f"{m.name} depends on unknown message {dep!r}")
                if order[byname[dep].phase] > order[m.phase]:
                    raise ValueError(f"{m.name} ({m.phase}) depends on later-phase {dep}")
        _topological_order(self.messages)  # raises on cycles

    def message(self, name: str) -> MessageSpec:
        for m in self.messages:
            if m.name == name:
                return m
        raise ValueError(f"no message named {name!r}")

    def transmitted(self) -> tuple[MessageSpec, ...]:
        return tuple(m for m in self.messages if not m.is_local)


def _topological_order(messages: tuple[MessageSpec, ...]) -> list[MessageSpec]:
    byname = {m.name: m for m in messages}
    remaining = {m.name: set(m.deps) for m in messages}
    order: list[MessageSpec] = []
    while remaining:
        ready = sorted(name for name, deps in remaining.items() if not deps)
        if not ready:
            raise ValueError("cyclic dependencies in message catalog")
        for name in ready:
            order.append(byname[name])
            del remaining[name]
        for deps in remaining.values():
            deps.difference_update(ready)
    return order


def _rrc_anchor_fn(variant: str, rrc_anchor: str) -> str:
    """Function terminating Msg3/Msg4 (RRC anchor of the target chain)."""
    if rrc_anchor not in ("cu", "du"):
        raise ValueError("rrc_anchor must be 'cu' or 'du'")
    if variant == INTRA_DU:
        return "CU" if rrc_anchor == "cu" else "DU"
    if variant == INTER_DU:
        return "CU" if rrc_anchor == "cu" else "tDU"
    return "tCU" if rrc_anchor == "cu" else "tDU"


def _random_access(variant: str, rrc_anchor: str) -> list[MessageSpec]:
    """The four-step random access plus the preceding SSB acquisition."""
    ra_du = {INTRA_DU: "DU", INTER_DU: "tDU", INTER_GNB: "tDU"}[variant]
    anchor = _rrc_anchor_fn(variant, rrc_anchor)
    return [
        MessageSpec("SSB_ACQ", "buffer", local_delay_key="ssb_acquisition_ms",
                    after_trigger=True),
        MessageSpec("MSG1", "buffer", "UE", ra_du, deps=("SSB_ACQ",), uu_chain="target"),
        MessageSpec("MSG2", "buffer", ra_du, "UE", deps=("MSG1",), uu_chain="target"),
        MessageSpec("MSG3", "buffer", "UE", anchor, deps=("MSG2",), uu_chain="target"),
        MessageSpec("MSG4", "buffer", anchor, "UE", deps=("MSG3",), uu_chain="target"),
    ]


def _candidate_pairs(base_req: MessageSpec, base_resp: MessageSpec,
                     candidate_count: int) -> tuple[list[MessageSpec], tuple[str, ...]]:
    """Fan the admission request/response pair out to N candidate targets."""
    if candidate_count < 1:
        raise ValueError("candidate_count must be a positive integer")
    if candidate_count == 1:
        return [base_req, base_resp], (base_resp.name,)
    msgs: list[MessageSpec] = []
    resp_names = []
    for i in range(1, candidate_count + 1):
        req = replace(base_req, name=f"{base_req.name}_{i}")
        resp = replace(base_resp, name=f"{base_resp.name}_{i}", deps=(req.name,))
        msgs.extend([req, resp])
        resp_names.append(resp.name)
    return msgs, tuple(resp_names)


def procedure_catalog(variant: str, candidate_count: int = 1,
                      rrc_anchor: str = "cu") -> ProcedureCatalog:
    """Build the message catalog for a procedure variant.

    ``candidate_count`` multiplies the admission request/response pair of
    the setup phase (one pair per candidate target).  ``rrc_anchor``
    selects where Msg3/Msg4 terminate: at the CU (RRC terminates there in
    every split considered; the default) or at the DU.
    """
    if variant not in PROCEDURES:
        raise ValueError(f"unknown procedure {variant!r}; expected one of {PROCEDURES}")

    msgs: list[MessageSpec] = []
    if variant == INTRA_DU:
        config_deps: tuple[str, ...] = ()
    elif variant == INTER_DU:
        pair, resp_names = _candidate_pairs(
            MessageSpec("UE_CTX_SETUP_REQ", "setup", "CU", "tDU"),
            MessageSpec("UE_CTX_SETUP_RESP", "setup", "tDU", "CU",
                        deps=("UE_CTX_SETUP_REQ",)),
            candidate_count)
        msgs.extend(pair)
        config_deps = resp_names
    else:
        pair, resp_names = _candidate_pairs(
            MessageSpec("HO_REQUEST", "setup", "sCU", "tCU"),
            MessageSpec("HO_REQUEST_ACK", "setup", "tCU", "sCU",
                        deps=("HO_REQUEST",)),
            candidate_count)
        msgs.extend(pair)
        config_deps = resp_names

    src_cu = "sCU" if variant == INTER_GNB else "CU"
    msgs.append(MessageSpec("CHO_CONFIG", "setup", src_cu, "UE",
                            deps=config_deps, uu_chain="source"))
    msgs.append(MessageSpec("CHO_CONFIG_COMPLETE", "setup", "UE", src_cu,
                            deps=("CHO_CONFIG",), uu_chain="source"))

    msgs.extend(_random_access(variant, rrc_anchor))

    if variant == INTER_DU:
        # The target DU observes the UE's uplink (Msg3) and reports upward;
        # the CU then quiesces and releases the source DU in sequence.
        msgs.append(MessageSpec("ACCESS_SUCCESS", "buffer", "tDU", "CU", deps=("MSG3",)))
        msgs.append(MessageSpec("STOP_DATA", "buffer", "CU", "sDU",
                                deps=("ACCESS_SUCCESS",)))
        msgs.append(MessageSpec("UE_CTX_RELEASE", "execution", "CU", "sDU",
                                deps=("STOP_DATA",)))
    elif variant == INTER_GNB:
        msgs.append(MessageSpec("HO_SUCCESS", "buffer", "tCU", "sCU", deps=("MSG4",)))
        msgs.append(MessageSpec("PATH_SWITCH_REQ", "execution", "tCU", "AMF_UPF",
                                deps=("MSG4",)))
        msgs.append(MessageSpec("CN_API", "execution", local_delay_key="cn_api_total_ms",
                                deps=("PATH_SWITCH_REQ",)))
        msgs.append(MessageSpec("END_MARKER", "execution", "AMF_UPF", "sCU",
                                deps=("CN_API",)))
        msgs.append(MessageSpec("END_MARKER_FWD", "execution", "sCU", "tCU",
                                deps=("END_MARKER",)))
        msgs.append(MessageSpec("PATH_SWITCH_ACK", "execution", "AMF_UPF", "tCU",
                                deps=("CN_API",)))
        msgs.append(MessageSpec("UE_CTX_RELEASE", "execution", "tCU", "sCU",
                                deps=("PATH_SWITCH_ACK",)))

    return ProcedureCatalog(variant=variant, messages=tuple(msgs))


@dataclass(frozen=True)
class TraceEvent:
    """Evaluated timing of one catalog entry."""

    name: str
    phase: str
    start_ms: float
    arrival_ms: float
    links: tuple[str, ...]       # labels of crossed links, in order
    link_kinds: tuple[str, ...]  # same path, link classes only
    elided: bool = False         # endpoints co-located: zero cost, not counted

    def as_dict(self) -> dict:
        return {"name": self.name, "phase": self.phase,
                "start_ms": self.start_ms, "arrival_ms": self.arrival_ms,
                "links": list(self.links), "elided": self.elided}


@dataclass(frozen=True)
class TimelineTrace:
    """Earliest-start schedule of a catalog over one topology."""

    variant: str
    events: tuple[TraceEvent, ...]
    setup_end_ms: float
    trigger_ms: float
    buffer_end_ms: float
    completion_ms: float
    notes: tuple[str, ...] = ()

    def event(self, name: str) -> TraceEvent:
        for e in self.events:
            if e.name == name:
                return e
        raise ValueError(f"no event named {name!r}")

    def as_dict(self) -> dict:
        return {
            "variant": self.variant,
            "setup_end_ms": self.setup_end_ms,
            "trigger_ms": self.trigger_ms,
            "buffer_end_ms": self.buffer_end_ms,
            "completion_ms": self.completion_ms,
            "events": [e.as_dict() for e in self.events],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class PhaseDurations:
    setup_ms: float
    buffer_ms: float
    execution_ms: float
    total_ms: float


@dataclass(frozen=True)
class MessageCounts:
    """Link crossings per link class, in total and per phase.

    Every transmitted message adds one crossing to each link class on its
    path; elided messages add nothing.
    """

    total: dict[str, int] = field(hash=False)
    by_phase: dict[str, dict[str, int]] = field(hash=False)

    @property
    def crossings(self) -> int:
        return sum(self.total.values())


def _round_ms(value: float) -> float:
    # Sub-nanosecond residue from float addition only clutters reports.
    return round(value, 9)


def evaluate_timeline(catalog: ProcedureCatalog, topo: Topology,
                      timing: TimingConfig) -> TimelineTrace:
    """Earliest-start schedule of the catalog over the topology.

    A message starts at the latest arrival among its dependencies; steps
    marked ``after_trigger`` additionally wait for the trigger, which fires
    ``trigger_offset_ms`` after the last setup message arrives.  Arrival is
    start plus path delay plus receiver processing (optionally also charged
    at every relay node).  Messages whose endpoints share a node are elided:
    they take no time and are excluded from the counts.
    """
    if not catalog.messages:
        return TimelineTrace(catalog.variant, (), 0.0, 0.0, 0.0, 0.0)

    paths: dict[str, tuple[tuple, float]] = {}
    for m in catalog.transmitted():
        paths[m.name] = resolve_path(topo, m.from_fn, m.to_fn, uu_chain=m.uu_chain)

    arrival: dict[str, float] = {}

    def arrive(m: MessageSpec, start: float) -> float:
        if m.is_local:
            return start + getattr(timing, m.local_delay_key)
        links, delay = paths[m.name]
        if not links:
            return start  # co-located endpoints
        processing = timing.per_message_processing_ms
        if timing.processing_at_relays:
            processing *= len(links)  # one charge per traversed node
        return start + delay + processing

    order = _topological_order(catalog.messages)
    setup = [m for m in order if m.phase == "setup"]
    rest = [m for m in order if m.phase != "setup"]

    for m in setup:
        start = max((arrival[d] for d in m.deps), default=0.0)
        arrival[m.name] = arrive(m, start)
    setup_end = max((arrival[m.name] for m in setup), default=0.0)
    trigger = setup_end + timing.trigger_offset_ms

    for m in rest:
        start = max((arrival[d] for d in m.deps), default=0.0)
        if m.after_trigger:
            start = max(start, trigger)
        arrival[m.name] = arrive(m, start)

    events = []
    for m in catalog.messages:
        if m.is_local:
            links: tuple[str, ...] = ()
            kinds: tuple[str, ...] = ()
            elided = False
        else:
            path_links, _ = paths[m.name]
            links = tuple(l.label for l in path_links)
            kinds = tuple(l.kind for l in path_links)
            elided = not path_links
        end = arrival[m.name]
        start = max((arrival[d] for d in m.deps), default=0.0)
        if m.after_trigger:
            start = max(start, trigger)
        events.append(TraceEvent(m.name, m.phase, _round_ms(start), _round_ms(end),
                                 links, kinds, elided))

    buffer_end = arrival.get("MSG4", trigger)
    completion = max(arrival.values())

    notes = ()
    if catalog.variant == INTER_GNB:
        notes = ("until the path switch completes, downlink user data detours "
                 "via the source gNB (not counted as control traffic)",)

    return TimelineTrace(
        variant=catalog.variant,
        events=tuple(events),
        setup_end_ms=_round_ms(setup_end),
        trigger_ms=_round_ms(trigger),
        buffer_end_ms=_round_ms(buffer_end),
        completion_ms=_round_ms(completion),
        notes=notes,
    )


def phase_durations(trace: TimelineTrace) -> PhaseDurations:
    """Setup/buffer/execution durations and the end-to-end total.

    The buffer ends when Msg4 arrives at the UE; later buffer-phase traffic
    counts as buffer messages but does not stretch the buffer duration.
    """
    if not trace.events:
        return PhaseDurations(0.0, 0.0, 0.0, 0.0)
    return PhaseDurations(
        setup_ms=trace.setup_end_ms,
        buffer_ms=_round_ms(trace.buffer_end_ms - trace.trigger_ms),
        execution_ms=_round_ms(trace.completion_ms - trace.buffer_end_ms),
        total_ms=trace.completion_ms,
    )


def message_counts(trace: TimelineTrace) -> MessageCounts:
    """Per-link-class crossing counts, in total and per phase."""
    kinds = ("SL", "FL", "ISL", "IGSL")
    total = {k: 0 for k in kinds}
    by_phase = {p: {k: 0 for k in kinds} for p in PHASES}
    for event in trace.events:
        for kind in event.link_kinds:
            total[kind] += 1
            by_phase[event.phase][kind] += 1
    return MessageCounts(total=total, by_phase=by_phase)
