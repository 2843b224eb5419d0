"""CHO engine: catalogs, earliest-start scheduling, counts, properties.

Duration oracles are hand-summed sequential walks over the reference delay
table (SL 3.59, FL 6.45, ISL 7.28, IGSL 7.99; 1 ms processing per received
message; 20 ms synchronization; 50 ms of core API calls), written out as
explicit arithmetic so the expected values are independent of the engine.
"""

import pytest

from leoran.cho import (MessageSpec, ProcedureCatalog, TimingConfig,
                        evaluate_timeline, message_counts, phase_durations,
                        procedure_catalog)
from leoran.geometry import REFERENCE_DELAYS, LinkDelays
from leoran.topology import (INTER_DU, INTER_GNB, INTRA_DU, Deployment,
                             build_topology)

SL, FL, ISL, IGSL = 3.59, 6.45, 7.28, 7.99
P = 1.0  # per-message processing

TIMING = TimingConfig()


def trace_for(scenario, split, variant, timing=TIMING, delays=REFERENCE_DELAYS,
              **catalog_kwargs):
    topo = build_topology(Deployment(scenario, split), delays)
    catalog = procedure_catalog(variant, **catalog_kwargs)
    return evaluate_timeline(catalog, topo, timing)


class TestCatalogs:
    def test_intra_du_shape(self):
        cat = procedure_catalog(INTRA_DU)
        assert len(cat.transmitted()) == 6
        assert sum(m.is_local for m in cat.messages) == 1  # SSB only

    def test_inter_du_shape(self):
        cat = procedure_catalog(INTER_DU)
        assert len(cat.messages) == 12
        assert len(cat.transmitted()) == 11

    def test_inter_gnb_has_one_cn_api_block(self):
        cat = procedure_catalog(INTER_GNB)
        locals_ = [m for m in cat.messages if m.is_local]
        assert sorted(m.name for m in locals_) == ["CN_API", "SSB_ACQ"]
        assert cat.message("CN_API").local_delay_key == "cn_api_total_ms"

    @pytest.mark.parametrize("variant", [INTRA_DU, INTER_DU, INTER_GNB])
    def test_buffer_phase_contains_random_access(self, variant):
        cat = procedure_catalog(variant)
        buffer_names = {m.name for m in cat.messages if m.phase == "buffer"}
        assert {"MSG1", "MSG2", "MSG3", "MSG4"} <= buffer_names

    def test_candidate_fanout_multiplies_setup_pair(self):
        cat = procedure_catalog(INTER_DU, candidate_count=3)
        setup = [m.name for m in cat.messages if m.phase == "setup"]
        assert setup.count("CHO_CONFIG") == 1
        assert len([n for n in setup if n.startswith("UE_CTX_SETUP_REQ")]) == 3
        assert len([n for n in setup if n.startswith("UE_CTX_SETUP_RESP")]) == 3
        assert set(cat.message("CHO_CONFIG").deps) == {
            "UE_CTX_SETUP_RESP_1", "UE_CTX_SETUP_RESP_2", "UE_CTX_SETUP_RESP_3"}

    def test_du_anchored_random_access_switch(self):
        cat = procedure_catalog(INTER_DU, rrc_anchor="du")
        assert cat.message("MSG3").to_fn == "tDU"
        assert cat.message("MSG4").from_fn == "tDU"

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            procedure_catalog("Intra-CU")

    def test_cycle_detection(self):
        with pytest.raises(ValueError):
            ProcedureCatalog("Intra-DU", (
                MessageSpec("A", "setup", "CU", "UE", deps=("B",), uu_chain="source"),
                MessageSpec("B", "setup", "UE", "CU", deps=("A",), uu_chain="source"),
            ))

    def test_phase_order_enforced(self):
        with pytest.raises(ValueError):
            ProcedureCatalog("Intra-DU", (
                MessageSpec("LATE", "execution", "CU", "sDU"),
                MessageSpec("EARLY", "setup", "CU", "UE", deps=("LATE",),
                            uu_chain="source"),
            ))

    def test_local_steps_have_no_endpoints(self):
        with pytest.raises(ValueError):
            MessageSpec("X", "buffer", "UE", None, local_delay_key="ssb_acquisition_ms")
        with pytest.raises(ValueError):
            MessageSpec("X", "buffer", "UE", None)


class TestTimelineOracles:
    def test_a_gnb_hand_summed(self):
        # all six messages ride the service link only:
        #   setup  = 2 * (SL + P)                      =  9.18
        #   buffer = 20 + 4 * (SL + P)                 = 38.36
        #   total  = 47.54
        trace = trace_for("A", "GNB", INTRA_DU)
        d = phase_durations(trace)
        assert d.setup_ms == pytest.approx(2 * (SL + P), abs=1e-9)
        assert d.buffer_ms == pytest.approx(20 + 4 * (SL + P), abs=1e-9)
        assert d.execution_ms == 0.0
        assert d.total_ms == pytest.approx(47.54, abs=1e-6)

    def test_a_lls_hand_summed(self):
        # every message crosses SL+FL: per-message cost SL+FL+P = 11.04
        trace = trace_for("A", "LLS", INTRA_DU)
        d = phase_durations(trace)
        assert d.setup_ms == pytest.approx(2 * (SL + FL + P), abs=1e-9)   # 22.08
        assert d.buffer_ms == pytest.approx(20 + 4 * (SL + FL + P), abs=1e-9)  # 64.16
        assert d.total_ms == pytest.approx(86.24, abs=1e-6)

    def test_trigger_offset_shifts_buffer_and_completion_only(self):
        base = trace_for("A", "LLS", INTRA_DU)
        shifted = trace_for("A", "LLS", INTRA_DU,
                            timing=TimingConfig(trigger_offset_ms=10.0))
        assert shifted.setup_end_ms == base.setup_end_ms
        assert shifted.trigger_ms == pytest.approx(base.trigger_ms + 10.0)
        assert shifted.buffer_end_ms == pytest.approx(base.buffer_end_ms + 10.0)
        assert shifted.completion_ms == pytest.approx(base.completion_ms + 10.0)
        # buffer *duration* is unchanged; total stretches by the offset
        assert phase_durations(shifted).buffer_ms == pytest.approx(
            phase_durations(base).buffer_ms)
        assert phase_durations(shifted).total_ms == pytest.approx(96.24, abs=1e-6)

    def test_b2_inter_du_walk(self):
        # setup: REQ/RESP over FL (7.45 each), CONFIG/COMPLETE over
        # FL+ISL+SL (18.32 each) -> 51.54
        # buffer: 20 + MSG1/2 over SL (4.59) + MSG3/4 over SL+FL (11.04)
        #   -> 51.26; ACCESS (FL) and STOP (FL+ISL) trail MSG3
        # execution: RELEASE (FL+ISL) after STOP -> completion 77.13 past
        #   trigger, 25.87 past MSG4
        trace = trace_for("B2", "CU_DU", INTER_DU)
        d = phase_durations(trace)
        assert d.setup_ms == pytest.approx(2 * (FL + P) + 2 * (FL + ISL + SL + P), abs=1e-9)
        assert d.buffer_ms == pytest.approx(20 + 2 * (SL + P) + 2 * (SL + FL + P), abs=1e-9)
        msg3 = trace.event("MSG3").arrival_ms
        assert trace.event("ACCESS_SUCCESS").arrival_ms == pytest.approx(
            msg3 + FL + P, abs=1e-9)
        assert trace.event("STOP_DATA").arrival_ms == pytest.approx(
            msg3 + (FL + P) + (FL + ISL + P), abs=1e-9)
        assert d.execution_ms == pytest.approx(25.87, abs=1e-6)
        assert d.total_ms == pytest.approx(128.67, abs=1e-6)

    def test_b1_gnb_inter_gnb_walk(self):
        # Xn rides the ISL (8.28); NG from SAT2 has no own feeder in B1 and
        # descends ISL+FL (14.73); the core block is 50 ms
        trace = trace_for("B1", "GNB", INTER_GNB)
        d = phase_durations(trace)
        assert d.setup_ms == pytest.approx(2 * (ISL + P) + 2 * (SL + P), abs=1e-9)  # 25.74
        assert d.buffer_ms == pytest.approx(20 + 4 * (SL + P), abs=1e-9)            # 38.36
        m4 = trace.event("MSG4").arrival_ms
        ps_req = m4 + (ISL + FL + P)
        cn = ps_req + 50
        release = cn + (FL + ISL + P) + (ISL + P)       # PATH_SWITCH_ACK then RELEASE
        end_marker_fwd = cn + (FL + P) + (ISL + P)      # END_MARKER then its forward
        assert trace.event("UE_CTX_RELEASE").arrival_ms == pytest.approx(release, abs=1e-9)
        assert trace.event("END_MARKER_FWD").arrival_ms == pytest.approx(
            end_marker_fwd, abs=1e-9)
        assert trace.completion_ms == pytest.approx(max(release, end_marker_fwd), abs=1e-9)
        assert d.total_ms == pytest.approx(151.84, abs=1e-6)

    def test_c_lls_elides_co_located_end_marker(self):
        trace = trace_for("C", "LLS", INTER_GNB)
        em = trace.event("END_MARKER")  # AMF and sCU share GS1
        assert em.elided
        assert em.arrival_ms == em.start_ms
        assert phase_durations(trace).total_ms == pytest.approx(181.19, abs=1e-6)

    def test_empty_catalog_is_all_zero(self):
        topo = build_topology(Deployment("A", "LLS"), REFERENCE_DELAYS)
        trace = evaluate_timeline(ProcedureCatalog(INTRA_DU, ()), topo, TIMING)
        d = phase_durations(trace)
        assert (d.setup_ms, d.buffer_ms, d.execution_ms, d.total_ms) == (0, 0, 0, 0)

    def test_processing_at_relays(self):
        # A-LLS paths are SL+FL: one relay (the satellite) adds one charge
        relayed = trace_for("A", "LLS", INTRA_DU,
                            timing=TimingConfig(processing_at_relays=True))
        d = phase_durations(relayed)
        assert d.setup_ms == pytest.approx(2 * (SL + FL + 2 * P), abs=1e-9)

    def test_unplaced_endpoint_raises(self):
        topo = build_topology(Deployment("A", "LLS"), REFERENCE_DELAYS)
        with pytest.raises(ValueError):
            evaluate_timeline(procedure_catalog(INTER_GNB), topo, TIMING)


class TestMessageCounts:
    def test_a_gnb(self):
        counts = message_counts(trace_for("A", "GNB", INTRA_DU))
        assert counts.total == {"SL": 6, "FL": 0, "ISL": 0, "IGSL": 0}

    def test_a_lls(self):
        counts = message_counts(trace_for("A", "LLS", INTRA_DU))
        assert counts.total == {"SL": 6, "FL": 6, "ISL": 0, "IGSL": 0}

    def test_b2_inter_du_manual_path_walk(self):
        # per-message link classes, walked by hand over the B2 graph
        expected = {
            "UE_CTX_SETUP_REQ": ("FL",),
            "UE_CTX_SETUP_RESP": ("FL",),
            "CHO_CONFIG": ("FL", "ISL", "SL"),
            "CHO_CONFIG_COMPLETE": ("SL", "ISL", "FL"),
            "SSB_ACQ": (),
            "MSG1": ("SL",),
            "MSG2": ("SL",),
            "MSG3": ("SL", "FL"),
            "MSG4": ("FL", "SL"),
            "ACCESS_SUCCESS": ("FL",),
            "STOP_DATA": ("FL", "ISL"),
            "UE_CTX_RELEASE": ("FL", "ISL"),
        }
        trace = trace_for("B2", "CU_DU", INTER_DU)
        assert {e.name: e.link_kinds for e in trace.events} == expected
        counts = message_counts(trace)
        assert counts.total == {"SL": 6, "FL": 9, "ISL": 4, "IGSL": 0}

    def test_phase_breakdown_sums_to_total(self):
        for scenario, split, variant in (("A", "LLS", INTRA_DU),
                                         ("B1", "CU_DU", INTER_DU),
                                         ("C", "GNB", INTER_GNB)):
            counts = message_counts(trace_for(scenario, split, variant))
            for kind in ("SL", "FL", "ISL", "IGSL"):
                assert counts.total[kind] == sum(
                    counts.by_phase[p][kind] for p in ("setup", "buffer", "execution"))

    def test_conservation_against_trace_paths(self):
        trace = trace_for("C", "GNB", INTER_GNB)
        assert message_counts(trace).crossings == sum(
            len(e.link_kinds) for e in trace.events)

    def test_elided_messages_not_counted(self):
        trace = trace_for("C", "LLS", INTER_GNB)
        counts = message_counts(trace)
        assert trace.event("END_MARKER").elided
        # 7 IGSL crossings: HO_REQUEST/ACK, HO_SUCCESS, PATH_SWITCH_REQ/ACK,
        # END_MARKER_FWD, UE_CTX_RELEASE; the elided END_MARKER adds none
        assert counts.total["IGSL"] == 7


def _all_topological_orders(catalog):
    """Every linear extension of the dependency DAG (setup precedes the
    trigger, so trigger-gated steps implicitly depend on all setup)."""
    setup_names = tuple(m.name for m in catalog.messages if m.phase == "setup")
    deps = {}
    for m in catalog.messages:
        extra = setup_names if m.after_trigger else ()
        deps[m.name] = set(m.deps) | set(extra)

    def extend(placed, remaining):
        if not remaining:
            yield placed
            return
        for name in sorted(remaining):
            if deps[name] <= set(placed):
                yield from extend(placed + [name], remaining - {name})

    yield from extend([], set(deps))


def _evaluate_in_order(catalog, topo, timing, order):
    """Order-by-order reference scheduler (no Kahn pass, no phases)."""
    from leoran.topology import resolve_path

    byname = {m.name: m for m in catalog.messages}
    setup_names = [m.name for m in catalog.messages if m.phase == "setup"]
    arrival = {}
    for name in order:
        m = byname[name]
        start = max((arrival[d] for d in m.deps), default=0.0)
        if m.after_trigger:
            setup_end = max((arrival[n] for n in setup_names), default=0.0)
            start = max(start, setup_end + timing.trigger_offset_ms)
        if m.is_local:
            arrival[name] = start + getattr(timing, m.local_delay_key)
        else:
            links, delay = resolve_path(topo, m.from_fn, m.to_fn, uu_chain=m.uu_chain)
            if not links:
                arrival[name] = start
            else:
                proc = timing.per_message_processing_ms
                if timing.processing_at_relays:
                    proc *= len(links)
                arrival[name] = start + delay + proc
    return arrival


ORACLE_CASES = [
    (INTRA_DU, "A", "LLS"),
    (INTRA_DU, "A", "GNB"),
    (INTRA_DU, "B2", "LLS"),
    (INTER_DU, "B1", "CU_DU"),
    (INTER_DU, "B2", "CU_DU"),
    (INTER_GNB, "B1", "GNB"),
    (INTER_GNB, "C", "LLS"),
    (INTER_GNB, "C", "GNB"),
]


class TestScheduleOrderIndependence:
    @pytest.mark.parametrize("variant,scenario,split", ORACLE_CASES)
    def test_engine_matches_every_topological_order(self, variant, scenario, split):
        catalog = procedure_catalog(variant)
        topo = build_topology(Deployment(scenario, split), REFERENCE_DELAYS)
        trace = evaluate_timeline(catalog, topo, TIMING)
        engine = {e.name: e.arrival_ms for e in trace.events}
        orders = list(_all_topological_orders(catalog))
        assert orders
        for order in orders:
            reference = _evaluate_in_order(catalog, topo, TIMING, order)
            for name, value in reference.items():
                assert engine[name] == pytest.approx(value, abs=1e-9), (name, order)

    def test_order_counts_are_exhaustive(self):
        # sanity on the enumeration itself: the two-branch execution tail of
        # the inter-gNB procedure admits 42 linear extensions; the linear
        # intra-DU chain admits exactly one
        assert len(list(_all_topological_orders(procedure_catalog(INTRA_DU)))) == 1
        assert len(list(_all_topological_orders(procedure_catalog(INTER_DU)))) == 4
        assert len(list(_all_topological_orders(procedure_catalog(INTER_GNB)))) == 42


class TestScheduleProperties:
    @pytest.mark.parametrize("variant,scenario,split", ORACLE_CASES)
    def test_monotone_in_any_single_link_delay(self, variant, scenario, split):
        # arrivals, setup, buffer and total never decrease when a link slows
        # down; execution is excluded (see the counterexample test below)
        base_delays = REFERENCE_DELAYS
        catalog = procedure_catalog(variant)
        base = evaluate_timeline(catalog, build_topology(Deployment(scenario, split),
                                                         base_delays), TIMING)
        base_arr = {e.name: e.arrival_ms for e in base.events}
        base_dur = phase_durations(base)
        for field in ("sl_ms", "fl_ms", "isl_ms", "igsl_ms"):
            bumped = LinkDelays(**{**base_delays.as_dict(),
                                   field: getattr(base_delays, field) + 5.0})
            topo = build_topology(Deployment(scenario, split), bumped)
            trace = evaluate_timeline(catalog, topo, TIMING)
            for e in trace.events:
                assert e.arrival_ms >= base_arr[e.name] - 1e-9, (field, e.name)
            dur = phase_durations(trace)
            for metric in ("setup_ms", "buffer_ms", "total_ms"):
                assert getattr(dur, metric) >= getattr(base_dur, metric) - 1e-9

    def test_execution_duration_may_shrink_when_buffer_anchor_slows(self):
        # execution is the gap between completion and MSG4; slowing the
        # service link delays MSG4 by more than it delays the release chain
        # (which forks off MSG3), so the gap legitimately narrows
        base = phase_durations(trace_for("B2", "CU_DU", INTER_DU))
        slower_sl = LinkDelays.from_delays(SL + 5.0, FL, ISL, IGSL)
        bumped = phase_durations(trace_for("B2", "CU_DU", INTER_DU, delays=slower_sl))
        assert bumped.total_ms > base.total_ms
        assert bumped.buffer_ms > base.buffer_ms
        assert bumped.execution_ms == pytest.approx(base.execution_ms - 5.0, abs=1e-9)

    @pytest.mark.parametrize("scenario,split,variant", [
        ("A", "LLS", INTRA_DU), ("A", "GNB", INTRA_DU), ("B1", "CU_DU", INTER_DU),
        ("B2", "LLS", INTRA_DU), ("C", "CU_DU", INTER_GNB), ("C", "GNB", INTER_GNB),
    ])
    def test_buffer_lower_bound(self, scenario, split, variant):
        d = phase_durations(trace_for(scenario, split, variant))
        assert d.buffer_ms >= TIMING.ssb_acquisition_ms + 4 * TIMING.per_message_processing_ms

    @pytest.mark.parametrize("scenario", ["A", "B1", "B2", "C"])
    def test_gnb_buffer_ignores_non_service_links(self, scenario):
        variant = INTRA_DU if scenario == "A" else INTER_GNB
        base = phase_durations(trace_for(scenario, "GNB", variant)).buffer_ms
        stretched = LinkDelays.from_delays(SL, FL * 10, ISL * 10, IGSL * 10)
        other = phase_durations(trace_for(scenario, "GNB", variant,
                                          delays=stretched)).buffer_ms
        assert other == pytest.approx(base, abs=1e-9)
        assert base == pytest.approx(20 + 4 * (SL + P), abs=1e-9)
