//! Cloud network, service chains, client demands and the cloud-augmented graph.
//!
//! Every physical node `u` is expanded into four augmented nodes: `u` itself,
//! a processing unit `p(u)`, a source unit `s(u)` and a demand unit `q(u)`.
//! Computation then becomes ordinary flow over the edge `(u, p(u))`, and the
//! output of a function re-enters the network over `(p(u), u)` as the next
//! commodity in the chain.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// 1-based physical node identifier.
pub type NodeId = u32;
/// Service identifier.
pub type ServiceId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("node ids must be contiguous starting at 1: expected {expected}, found {found}")]
    NodeIdsNotContiguous { expected: NodeId, found: NodeId },
    #[error("node {0}: {1}")]
    InvalidNode(NodeId, &'static str),
    #[error("link {from}->{to}: {reason}")]
    InvalidLink {
        from: NodeId,
        to: NodeId,
        reason: &'static str,
    },
    #[error("duplicate service id {0}")]
    DuplicateService(ServiceId),
    #[error("service {service}: {reason}")]
    InvalidService {
        service: ServiceId,
        reason: String,
    },
    #[error("service {service} function {function}: no node can host it")]
    EmptyAvailability { service: ServiceId, function: usize },
    #[error("demand ({destination}, {service}): {reason}")]
    InvalidDemand {
        destination: NodeId,
        service: ServiceId,
        reason: String,
    },
    #[error("demand references unknown service {0}")]
    UnknownService(ServiceId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: NodeId,
    /// Cost per cloud resource unit.
    pub cloud_unit_cost: f64,
    /// Maximum number of cloud resource units.
    pub cloud_capacity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub from: NodeId,
    pub to: NodeId,
    /// Cost per network resource unit.
    pub net_unit_cost: f64,
    /// Maximum number of network resource units.
    pub net_capacity: u32,
    /// Network resource units consumed per flow unit.
    pub transport_req: f64,
}

/// Physical network. Links are directed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CloudNetwork {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
}

impl CloudNetwork {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id >= 1 && (id as usize) <= self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &NodeSpec {
        &self.nodes[id as usize - 1]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (idx, node) in self.nodes.iter().enumerate() {
            let expected = idx as NodeId + 1;
            if node.id != expected {
                return Err(ModelError::NodeIdsNotContiguous {
                    expected,
                    found: node.id,
                });
            }
            if !(node.cloud_unit_cost >= 0.0) || !node.cloud_unit_cost.is_finite() {
                return Err(ModelError::InvalidNode(
                    node.id,
                    "cloud_unit_cost must be finite and nonnegative",
                ));
            }
        }
        for link in &self.links {
            let bad = |reason| ModelError::InvalidLink {
                from: link.from,
                to: link.to,
                reason,
            };
            if !self.contains(link.from) || !self.contains(link.to) {
                return Err(bad("endpoint references an unknown node"));
            }
            if link.from == link.to {
                return Err(bad("self-loops are not allowed"));
            }
            if !(link.net_unit_cost >= 0.0) || !link.net_unit_cost.is_finite() {
                return Err(bad("net_unit_cost must be finite and nonnegative"));
            }
            if !(link.transport_req > 0.0) || !link.transport_req.is_finite() {
                return Err(bad("transport_req must be strictly positive"));
            }
        }
        Ok(())
    }
}

/// One VNF of a service chain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    /// Cloud resource units per input flow unit, per hosting node.
    pub proc_req: BTreeMap<NodeId, f64>,
    /// Nodes allowed to host the function.
    pub availability: BTreeSet<NodeId>,
    /// Output flow units per input flow unit.
    pub flow_scaling: f64,
}

impl FunctionSpec {
    /// A function available everywhere in a network of `n` nodes with the
    /// same requirement at every node.
    pub fn uniform(n: usize, req: f64) -> Self {
        let ids = 1..=n as NodeId;
        FunctionSpec {
            proc_req: ids.clone().map(|u| (u, req)).collect(),
            availability: ids.collect(),
            flow_scaling: 1.0,
        }
    }

    pub fn with_scaling(mut self, xi: f64) -> Self {
        self.flow_scaling = xi;
        self
    }

    /// Requirement at `u`, or `None` when the function is not available there.
    pub fn req_at(&self, u: NodeId) -> Option<f64> {
        if self.availability.contains(&u) {
            self.proc_req.get(&u).copied()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceSpec {
    pub id: ServiceId,
    pub functions: Vec<FunctionSpec>,
}

impl ServiceSpec {
    pub fn chain_len(&self) -> u32 {
        self.functions.len() as u32
    }

    fn validate(&self, net: &CloudNetwork) -> Result<(), ModelError> {
        let err = |reason: String| ModelError::InvalidService {
            service: self.id,
            reason,
        };
        if self.functions.is_empty() {
            return Err(err("function chain is empty".into()));
        }
        for (i, f) in self.functions.iter().enumerate() {
            if !(f.flow_scaling > 0.0) || !f.flow_scaling.is_finite() {
                return Err(err(format!("function {} flow_scaling must be > 0", i + 1)));
            }
            if f.availability.is_empty() {
                return Err(ModelError::EmptyAvailability {
                    service: self.id,
                    function: i + 1,
                });
            }
            for &u in &f.availability {
                if !net.contains(u) {
                    return Err(err(format!("function {} available at unknown node {u}", i + 1)));
                }
                match f.proc_req.get(&u) {
                    Some(&r) if r > 0.0 && r.is_finite() => {}
                    Some(_) => {
                        return Err(err(format!(
                            "function {} requirement at node {u} must be > 0",
                            i + 1
                        )))
                    }
                    None => {
                        return Err(err(format!(
                            "function {} has no requirement at available node {u}",
                            i + 1
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

/// Demand of client `destination` for `service`, entering at `sources`.
#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub destination: NodeId,
    pub service: ServiceId,
    pub sources: BTreeMap<NodeId, f64>,
}

impl Demand {
    pub fn total(&self) -> f64 {
        self.sources.values().sum()
    }
}

/// Commodity `(d, φ, i)`: output of function `i` of service `φ` for client `d`.
/// Stage 0 is the raw source flow. Ordering is lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommodityId {
    pub destination: NodeId,
    pub service: ServiceId,
    pub stage: u32,
}

impl fmt::Display for CommodityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.destination, self.service, self.stage)
    }
}

/// Validates services and demands against the network.
pub fn validate_inputs(
    net: &CloudNetwork,
    services: &[ServiceSpec],
    demands: &[Demand],
) -> Result<(), ModelError> {
    net.validate()?;
    let mut seen = BTreeSet::new();
    for s in services {
        if !seen.insert(s.id) {
            return Err(ModelError::DuplicateService(s.id));
        }
        s.validate(net)?;
    }
    let mut pairs = BTreeSet::new();
    for d in demands {
        let err = |reason: String| ModelError::InvalidDemand {
            destination: d.destination,
            service: d.service,
            reason,
        };
        if !seen.contains(&d.service) {
            return Err(ModelError::UnknownService(d.service));
        }
        if !net.contains(d.destination) {
            return Err(ModelError::UnknownNode(d.destination));
        }
        if d.sources.is_empty() {
            return Err(err("no source nodes".into()));
        }
        for (&s, &lambda) in &d.sources {
            if !net.contains(s) {
                return Err(ModelError::UnknownNode(s));
            }
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(err(format!("rate at source {s} must be > 0")));
            }
        }
        if !pairs.insert((d.destination, d.service)) {
            return Err(err("declared more than once".into()));
        }
    }
    Ok(())
}

/// All commodities `(d, φ, i)` for declared demands, `0 ≤ i ≤ M_φ`, in
/// lexicographic order.
pub fn enumerate_commodities(services: &[ServiceSpec], demands: &[Demand]) -> Vec<CommodityId> {
    let mut out = Vec::new();
    for d in demands {
        let Some(svc) = services.iter().find(|s| s.id == d.service) else {
            continue;
        };
        for stage in 0..=svc.chain_len() {
            out.push(CommodityId {
                destination: d.destination,
                service: d.service,
                stage,
            });
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Physical link, index into `CloudNetwork::links`.
    Network(usize),
    /// `(u, p(u))`: processing, consumes cloud resources.
    ComputeIn,
    /// `(p(u), u)`: processed flow returning to `u`.
    ComputeOut,
    /// `(s(u), u)`: ingress of client flows.
    Source,
    /// `(u, q(u))`: egress of final commodities.
    Sink,
}

/// Augmented node. `Original(k)` etc. carry the 0-based physical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugNode {
    Original(usize),
    Processing(usize),
    Source(usize),
    Demand(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugEdge {
    pub kind: EdgeKind,
    pub tail: AugNode,
    pub head: AugNode,
    /// Resource units.
    pub capacity: f64,
    /// Cost per resource unit.
    pub unit_cost: f64,
}

impl AugEdge {
    pub fn is_network(&self) -> bool {
        matches!(self.kind, EdgeKind::Network(_))
    }

    /// Physical node the edge is incident to at the original-node side, as
    /// `(out_of, into)` 0-based indices.
    pub fn original_endpoints(&self) -> (Option<usize>, Option<usize>) {
        let side = |n: AugNode| match n {
            AugNode::Original(k) => Some(k),
            _ => None,
        };
        (side(self.tail), side(self.head))
    }
}

/// Per-commodity chain metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CommodityInfo {
    pub id: CommodityId,
    /// Index of `(d, φ, i+1)`, or `None` for the final stage.
    pub successor: Option<usize>,
    /// Index of `(d, φ, i-1)`, or `None` for stage 0.
    pub predecessor: Option<usize>,
    /// 0-based destination index.
    pub dest: usize,
    pub is_final: bool,
    /// Output/input ratio of the function that consumes this commodity.
    pub next_scaling: f64,
    /// Total amount of this commodity produced when the demand is met.
    pub volume: f64,
}

/// The cloud-augmented graph with per-edge, per-commodity requirements.
#[derive(Debug, Clone)]
pub struct AugmentedGraph {
    n: usize,
    m: usize,
    edges: Vec<AugEdge>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    commodities: Vec<CommodityInfo>,
    index: BTreeMap<CommodityId, usize>,
    /// Dense `edge * K + commodity` table; `None` means the commodity can
    /// not use the edge.
    req: Vec<Option<f64>>,
    /// Dense `node * K + commodity` source injection.
    injection: Vec<f64>,
    c_max: Vec<f64>,
}

impl AugmentedGraph {
    pub fn build(
        net: &CloudNetwork,
        services: &[ServiceSpec],
        demands: &[Demand],
    ) -> Result<Self, ModelError> {
        validate_inputs(net, services, demands)?;
        let n = net.node_count();
        let m = net.links.len();
        let ids = enumerate_commodities(services, demands);
        let k = ids.len();
        let index: BTreeMap<CommodityId, usize> =
            ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let service = |id: ServiceId| services.iter().find(|s| s.id == id).unwrap();
        let demand_of = |c: &CommodityId| {
            demands
                .iter()
                .find(|d| d.destination == c.destination && d.service == c.service)
                .unwrap()
        };

        let mut commodities = Vec::with_capacity(k);
        for (ci, c) in ids.iter().enumerate() {
            let svc = service(c.service);
            let len = svc.chain_len();
            let is_final = c.stage == len;
            let volume = demand_of(c).total()
                * svc.functions[..c.stage as usize]
                    .iter()
                    .map(|f| f.flow_scaling)
                    .product::<f64>();
            commodities.push(CommodityInfo {
                id: *c,
                successor: (!is_final).then_some(ci + 1),
                predecessor: (c.stage > 0).then(|| ci - 1),
                dest: c.destination as usize - 1,
                is_final,
                next_scaling: if is_final {
                    1.0
                } else {
                    svc.functions[c.stage as usize].flow_scaling
                },
                volume,
            });
        }

        // Free gadget edges need room for every unit of processing the node
        // could be asked to perform.
        let mut c_max = vec![0.0; n];
        for (u, cm) in c_max.iter_mut().enumerate() {
            let uid = u as NodeId + 1;
            for d in demands {
                let svc = service(d.service);
                let per_flow: f64 = svc.functions.iter().filter_map(|f| f.req_at(uid)).sum();
                *cm += d.total() * per_flow;
            }
        }

        let mut edges = Vec::with_capacity(m + 4 * n);
        for (li, l) in net.links.iter().enumerate() {
            edges.push(AugEdge {
                kind: EdgeKind::Network(li),
                tail: AugNode::Original(l.from as usize - 1),
                head: AugNode::Original(l.to as usize - 1),
                capacity: l.net_capacity as f64,
                unit_cost: l.net_unit_cost,
            });
        }
        for u in 0..n {
            let node = &net.nodes[u];
            let free = |kind, tail, head| AugEdge {
                kind,
                tail,
                head,
                capacity: c_max[u],
                unit_cost: 0.0,
            };
            edges.push(AugEdge {
                kind: EdgeKind::ComputeIn,
                tail: AugNode::Original(u),
                head: AugNode::Processing(u),
                capacity: node.cloud_capacity as f64,
                unit_cost: node.cloud_unit_cost,
            });
            edges.push(free(
                EdgeKind::ComputeOut,
                AugNode::Processing(u),
                AugNode::Original(u),
            ));
            edges.push(free(EdgeKind::Source, AugNode::Source(u), AugNode::Original(u)));
            edges.push(free(EdgeKind::Sink, AugNode::Original(u), AugNode::Demand(u)));
        }

        let node_slot = |a: AugNode| match a {
            AugNode::Original(u) => u,
            AugNode::Processing(u) => n + u,
            AugNode::Source(u) => 2 * n + u,
            AugNode::Demand(u) => 3 * n + u,
        };
        let mut out_adj = vec![Vec::new(); 4 * n];
        let mut in_adj = vec![Vec::new(); 4 * n];
        for (ei, e) in edges.iter().enumerate() {
            out_adj[node_slot(e.tail)].push(ei);
            in_adj[node_slot(e.head)].push(ei);
        }

        let mut req = vec![None; edges.len() * k];
        for (ei, e) in edges.iter().enumerate() {
            for (ci, info) in commodities.iter().enumerate() {
                let c = info.id;
                let svc = service(c.service);
                let r = match e.kind {
                    EdgeKind::Network(li) => Some(net.links[li].transport_req),
                    EdgeKind::ComputeIn => {
                        let AugNode::Original(u) = e.tail else { unreachable!() };
                        svc.functions
                            .get(c.stage as usize)
                            .and_then(|f| f.req_at(u as NodeId + 1))
                    }
                    EdgeKind::ComputeOut => {
                        let AugNode::Original(u) = e.head else { unreachable!() };
                        (c.stage > 0
                            && svc.functions[c.stage as usize - 1]
                                .req_at(u as NodeId + 1)
                                .is_some())
                        .then_some(0.0)
                    }
                    EdgeKind::Source => (c.stage == 0).then_some(0.0),
                    EdgeKind::Sink => {
                        let AugNode::Original(u) = e.tail else { unreachable!() };
                        (info.is_final && info.dest == u).then_some(0.0)
                    }
                };
                req[ei * k + ci] = r;
            }
        }

        let mut injection = vec![0.0; n * k];
        for d in demands {
            let ci = index[&CommodityId {
                destination: d.destination,
                service: d.service,
                stage: 0,
            }];
            for (&s, &lambda) in &d.sources {
                injection[(s as usize - 1) * k + ci] += lambda;
            }
        }

        Ok(AugmentedGraph {
            n,
            m,
            edges,
            out_adj,
            in_adj,
            commodities,
            index,
            req,
            injection,
            c_max,
        })
    }

    /// Number of physical nodes.
    pub fn physical_nodes(&self) -> usize {
        self.n
    }

    /// Number of physical links.
    pub fn physical_links(&self) -> usize {
        self.m
    }

    pub fn node_count(&self) -> usize {
        4 * self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[AugEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &AugEdge {
        &self.edges[e]
    }

    pub fn commodity_count(&self) -> usize {
        self.commodities.len()
    }

    pub fn commodities(&self) -> &[CommodityInfo] {
        &self.commodities
    }

    pub fn commodity_ids(&self) -> Vec<CommodityId> {
        self.commodities.iter().map(|c| c.id).collect()
    }

    pub fn commodity_index(&self, c: CommodityId) -> Option<usize> {
        self.index.get(&c).copied()
    }

    /// Next commodity in the chain, or `None` at the final stage.
    pub fn successor(&self, c: CommodityId) -> Option<CommodityId> {
        let i = self.commodity_index(c)?;
        self.commodities[i]
            .successor
            .map(|s| self.commodities[s].id)
    }

    /// Resource units per flow unit of commodity `c` on edge `e`; `None`
    /// marks the commodity as unable to use the edge.
    #[inline]
    pub fn req(&self, e: usize, c: usize) -> Option<f64> {
        self.req[e * self.commodities.len() + c]
    }

    /// Source rate of commodity `c` entering at physical node index `u`.
    #[inline]
    pub fn injection(&self, u: usize, c: usize) -> f64 {
        self.injection[u * self.commodities.len() + c]
    }

    pub fn c_max(&self, u: usize) -> f64 {
        self.c_max[u]
    }

    pub fn network_edges(&self) -> std::ops::Range<usize> {
        0..self.m
    }

    pub fn compute_in(&self, u: usize) -> usize {
        self.m + 4 * u
    }

    pub fn compute_out(&self, u: usize) -> usize {
        self.m + 4 * u + 1
    }

    pub fn source_edge(&self, u: usize) -> usize {
        self.m + 4 * u + 2
    }

    pub fn sink_edge(&self, u: usize) -> usize {
        self.m + 4 * u + 3
    }

    /// Edges leaving physical node `u` (network, compute-in, sink).
    pub fn out_edges(&self, u: usize) -> &[usize] {
        &self.out_adj[u]
    }

    /// Edges entering physical node `u` (network, compute-out, source).
    pub fn in_edges(&self, u: usize) -> &[usize] {
        &self.in_adj[u]
    }

    /// Whether `(u, c)` is the final commodity at its own destination, whose
    /// queue is held at zero.
    #[inline]
    pub fn is_pinned(&self, u: usize, c: usize) -> bool {
        let info = &self.commodities[c];
        info.is_final && info.dest == u
    }

    /// Physical index of the node at the far end of a network edge.
    pub fn network_head(&self, e: usize) -> usize {
        match self.edges[e].head {
            AugNode::Original(v) => v,
            _ => panic!("edge {e} is not a network edge"),
        }
    }

    pub fn network_tail(&self, e: usize) -> usize {
        match self.edges[e].tail {
            AugNode::Original(v) => v,
            _ => panic!("edge {e} is not a network edge"),
        }
    }

    pub fn describe_edge(&self, e: usize) -> String {
        let edge = &self.edges[e];
        let name = |a: AugNode| match a {
            AugNode::Original(u) => format!("{}", u + 1),
            AugNode::Processing(u) => format!("p({})", u + 1),
            AugNode::Source(u) => format!("s({})", u + 1),
            AugNode::Demand(u) => format!("q({})", u + 1),
        };
        format!("{}->{}", name(edge.tail), name(edge.head))
    }
}
