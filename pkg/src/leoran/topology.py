"""Network topologies: nodes, links, function placement, and path resolution.

A deployment names a scenario and a split placement:

* scenario A  - one satellite serving both cells, one ground station;
* scenario B1 - two satellites, one ground station whose feeder link
  attaches to the *source* satellite (the target satellite is reached over
  the inter-satellite link);
* scenario B2 - as B1 but the feeder link attaches to the *target*
  satellite;
* scenario C  - two satellites, two ground stations, one core network
  co-located with one of the ground stations.

Splits: LLS keeps only the radio unit on the satellite, CU_DU moves the
distributed unit up as well, GNB puts the whole base-station stack onboard.

Function names use the 's'/'t' prefix for source/target-cell chains;
functions shared by both chains are unprefixed (DU, CU).  AMF_UPF stands in
for the co-located core network.  Topologies are immutable once built and
path resolution is a pure read.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import LinkDelays

SCENARIOS = ("A", "B1", "B2", "C")
SPLITS = ("LLS", "CU_DU", "GNB")
AMF_SITES = ("source_gs", "target_gs")

LINK_KINDS = ("SL", "FL", "ISL", "IGSL")

INTRA_DU = "Intra-DU"
INTER_DU = "Inter-DU"
INTER_GNB = "Inter-gNB-Intra-AMF"
PROCEDURES = (INTRA_DU, INTER_DU, INTER_GNB)

CHAINS = ("source", "target")


@dataclass(frozen=True)
class Deployment:
    """A (scenario, split) cell of the evaluation grid."""

    scenario: str
    split: str
    amf_site: str = "source_gs"  # scenario C only

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}; expected one of {SPLITS}")
        if self.amf_site not in AMF_SITES:
            raise ValueError(f"unknown amf_site {self.amf_site!r}; expected one of {AMF_SITES}")
        if self.scenario != "C" and self.amf_site != "source_gs":
            raise ValueError("amf_site is meaningful only for scenario C")

    @property
    def label(self) -> str:
        return f"{self.scenario}/{self.split}"


@dataclass(frozen=True)
class Link:
    """An undirected physical link with a fixed one-way delay."""

    a: str
    b: str
    kind: str
    delay_ms: float

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.a}-{self.b}"

    def other(self, node: str) -> str:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise ValueError(f"{node!r} is not an endpoint of {self.label}")

    def touches(self, node: str) -> bool:
        return node in (self.a, self.b)


@dataclass(frozen=True)
class Node:
    id: str
    hosted_functions: tuple[str, ...]


@dataclass(frozen=True)
class Topology:
    """Physical graph plus logical function placement for one deployment."""

    deployment: Deployment
    placement: dict[str, str] = field(hash=False)  # function -> node id
    links: tuple[Link, ...] = ()
    serving_satellite: dict[str, str] = field(default_factory=dict, hash=False)

    @property
    def nodes(self) -> tuple[Node, ...]:
        hosted: dict[str, list[str]] = {}
        for fn, node in self.placement.items():
            hosted.setdefault(node, []).append(fn)
        link_nodes = {n for link in self.links for n in (link.a, link.b)}
        ids = sorted(set(hosted) | link_nodes)
        return tuple(Node(i, tuple(sorted(hosted.get(i, ())))) for i in ids)

    def node_of(self, fn: str) -> str:
        try:
            return self.placement[fn]
        except KeyError:
            raise ValueError(f"function {fn!r} is not placed in {self.deployment.label}") from None

    def sl_link(self, chain: str) -> Link:
        """The service link the UE uses for the given chain."""
        sat = self.serving_satellite[chain]
        for link in self.links:
            if link.kind == "SL" and link.touches("UE") and link.touches(sat):
                return link
        raise ValueError(f"no service link towards {sat}")

    def as_dict(self) -> dict:
        return {
            "deployment": {"scenario": self.deployment.scenario,
                           "split": self.deployment.split,
                           "amf_site": self.deployment.amf_site},
            "nodes": [{"id": n.id, "hosted_functions": list(n.hosted_functions)}
                      for n in self.nodes],
            "links": [{"a": l.a, "b": l.b, "kind": l.kind, "delay_ms": l.delay_ms}
                      for l in self.links],
            "placement": dict(sorted(self.placement.items())),
        }


def _placement(dep: Deployment) -> dict[str, str]:
    s, split = dep.scenario, dep.split
    p: dict[str, str] = {"UE": "UE"}
    if s == "A":
        p.update({"sRU": "SAT1", "tRU": "SAT1"})
        if split == "LLS":
            p.update({"DU": "GS1", "CU": "GS1"})
        elif split == "CU_DU":
            p.update({"DU": "SAT1", "CU": "GS1"})
        else:  # GNB
            p.update({"DU": "SAT1", "CU": "SAT1"})
        p["AMF_UPF"] = "GS1"
    elif s in ("B1", "B2"):
        p.update({"sRU": "SAT1", "tRU": "SAT2"})
        if split == "LLS":
            p.update({"DU": "GS1", "CU": "GS1"})
        elif split == "CU_DU":
            p.update({"sDU": "SAT1", "tDU": "SAT2", "CU": "GS1"})
        else:  # GNB: a full stack per satellite
            p.update({"sDU": "SAT1", "sCU": "SAT1", "tDU": "SAT2", "tCU": "SAT2"})
        p["AMF_UPF"] = "GS1"
    else:  # C: always two full chains, split across SATi/GSi
        p.update({"sRU": "SAT1", "tRU": "SAT2"})
        if split == "LLS":
            p.update({"sDU": "GS1", "sCU": "GS1", "tDU": "GS2", "tCU": "GS2"})
        elif split == "CU_DU":
            p.update({"sDU": "SAT1", "sCU": "GS1", "tDU": "SAT2", "tCU": "GS2"})
        else:  # GNB
            p.update({"sDU": "SAT1", "sCU": "SAT1", "tDU": "SAT2", "tCU": "SAT2"})
        p["AMF_UPF"] = "GS1" if dep.amf_site == "source_gs" else "GS2"
    return p


def build_topology(dep: Deployment, delays: LinkDelays) -> Topology:
    """Construct the physical graph and placement for a deployment."""
    s = dep.scenario
    if s == "A":
        links = (
            Link("UE", "SAT1", "SL", delays.sl_ms),
            Link("SAT1", "GS1", "FL", delays.fl_ms),
        )
        serving = {"source": "SAT1", "target": "SAT1"}
    elif s == "B1":
        links = (
            Link("UE", "SAT1", "SL", delays.sl_ms),
            Link("UE", "SAT2", "SL", delays.sl_ms),
            Link("SAT1", "GS1", "FL", delays.fl_ms),
            Link("SAT1", "SAT2", "ISL", delays.isl_ms),
        )
        serving = {"source": "SAT1", "target": "SAT2"}
    elif s == "B2":
        links = (
            Link("UE", "SAT1", "SL", delays.sl_ms),
            Link("UE", "SAT2", "SL", delays.sl_ms),
            Link("SAT2", "GS1", "FL", delays.fl_ms),
            Link("SAT1", "SAT2", "ISL", delays.isl_ms),
        )
        serving = {"source": "SAT1", "target": "SAT2"}
    else:  # C
        links = (
            Link("UE", "SAT1", "SL", delays.sl_ms),
            Link("UE", "SAT2", "SL", delays.sl_ms),
            Link("SAT1", "GS1", "FL", delays.fl_ms),
            Link("SAT2", "GS2", "FL", delays.fl_ms),
            Link("SAT1", "SAT2", "ISL", delays.isl_ms),
            Link("GS1", "GS2", "IGSL", delays.igsl_ms),
        )
        serving = {"source": "SAT1", "target": "SAT2"}
    return Topology(deployment=dep, placement=_placement(dep),
                    links=links, serving_satellite=serving)


def select_procedure(dep: Deployment) -> str:
    """Which handover procedure the deployment's shared functions imply.

    A common DU (or RU) keeps the handover inside one DU; a common CU makes
    it inter-DU; two full gNB stacks require the inter-gNB procedure with a
    path switch at the shared core.
    """
    if dep.scenario == "A":
        return INTRA_DU
    if dep.scenario in ("B1", "B2"):
        return {"LLS": INTRA_DU, "CU_DU": INTER_DU, "GNB": INTER_GNB}[dep.split]
    return INTER_GNB


def _simple_paths(topo: Topology, src: str, dst: str) -> list[list[Link]]:
    """All loop-free paths from src to dst; the UE never relays traffic."""
    adjacency: dict[str, list[Link]] = {}
    for link in sorted(topo.links, key=lambda l: (l.kind, l.a, l.b)):
        adjacency.setdefault(link.a, []).append(link)
        adjacency.setdefault(link.b, []).append(link)

    paths: list[list[Link]] = []

    def walk(node: str, seen: set[str], acc: list[Link]) -> None:
        if node == dst:
            paths.append(list(acc))
            return
        for link in adjacency.get(node, ()):
            nxt = link.other(node)
            if nxt in seen or (nxt == "UE" and nxt != dst):
                continue
            seen.add(nxt)
            acc.append(link)
            walk(nxt, seen, acc)
            acc.pop()
            seen.remove(nxt)

    walk(src, {src}, [])
    return paths


def _shortest(topo: Topology, src: str, dst: str) -> list[Link]:
    """Minimum-delay path; ties broken by hop count, then by link labels."""
    if src == dst:
        return []
    paths = _simple_paths(topo, src, dst)
    if not paths:
        raise ValueError(f"no path between {src} and {dst}")
    return min(paths, key=lambda p: (sum(l.delay_ms for l in p), len(p),
                                     tuple(l.label for l in p)))


def _is_satellite(node: str) -> bool:
    return node.startswith("SAT")


def _ng_path(topo: Topology, anchor_node: str, cn_node: str) -> list[Link]:
    """Core-network path from a gNB anchor, anchor-to-core orientation.

    A satellite-hosted anchor always descends over its own feeder link and
    continues over the inter-GS link if the core sits at the other ground
    station; it never detours through the other satellite when it has a
    feeder link of its own.
    """
    if _is_satellite(anchor_node):
        own_fl = [l for l in topo.links if l.kind == "FL" and l.touches(anchor_node)]
        if own_fl:
            fl = own_fl[0]
            gs = fl.other(anchor_node)
            if gs == cn_node:
                return [fl]
            return [fl] + _shortest(topo, gs, cn_node)
    return _shortest(topo, anchor_node, cn_node)


def resolve_path(topo: Topology, from_fn: str, to_fn: str,
                 uu_chain: str | None = None) -> tuple[tuple[Link, ...], float]:
    """Ordered links and total one-way delay between two placed functions.

    Routing rules:

    * same node: empty path, zero delay;
    * UE-anchored (Uu) traffic crosses the service link of its chain and
      then follows the chain up to the peer's host.  ``uu_chain`` selects
      the chain; when omitted it is inferred from the peer's s/t prefix
      (source for unprefixed functions);
    * traffic to or from AMF_UPF (NG) follows :func:`_ng_path`;
    * everything else (F1, Xn) takes the minimum-delay path.

    Intermediate hosts never change endpoints; they only contribute links.
    """
    node_a = topo.node_of(from_fn)
    node_b = topo.node_of(to_fn)
    if node_a == node_b:
        return (), 0.0

    if "UE" in (from_fn, to_fn):
        peer = to_fn if from_fn == "UE" else from_fn
        chain = uu_chain
        if chain is None:
            chain = {"s": "source", "t": "target"}.get(peer[0], "source")
        if chain not in CHAINS:
            raise ValueError(f"unknown chain {chain!r}")
        sat = topo.serving_satellite[chain]
        links = [topo.sl_link(chain)] + _shortest(topo, sat, topo.node_of(peer))
        if to_fn == "UE":
            links.reverse()
    elif "AMF_UPF" in (from_fn, to_fn):
        anchor = to_fn if from_fn == "AMF_UPF" else from_fn
        links = _ng_path(topo, topo.node_of(anchor), topo.node_of("AMF_UPF"))
        if from_fn == "AMF_UPF":
            links.reverse()
    else:
        links = _shortest(topo, node_a, node_b)

    return tuple(links), sum(l.delay_ms for l in links)
