//! Dense flow and resource vectors over the augmented graph.

use crate::model::AugmentedGraph;

/// Flow per `(edge, commodity)` and resource units per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment {
    commodities: usize,
    pub flows: Vec<f64>,
    pub resources: Vec<f64>,
}

impl FlowAssignment {
    pub fn zeros(graph: &AugmentedGraph) -> Self {
        Self::with_shape(graph.edge_count(), graph.commodity_count())
    }

    pub fn with_shape(edges: usize, commodities: usize) -> Self {
        FlowAssignment {
            commodities,
            flows: vec![0.0; edges * commodities],
            resources: vec![0.0; edges],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.resources.len()
    }

    pub fn commodity_count(&self) -> usize {
        self.commodities
    }

    #[inline]
    pub fn flow(&self, e: usize, c: usize) -> f64 {
        self.flows[e * self.commodities + c]
    }

    #[inline]
    pub fn set_flow(&mut self, e: usize, c: usize, value: f64) {
        self.flows[e * self.commodities + c] = value;
    }

    #[inline]
    pub fn add_flow(&mut self, e: usize, c: usize, value: f64) {
        self.flows[e * self.commodities + c] += value;
    }

    pub fn edge_flows(&self, e: usize) -> &[f64] {
        &self.flows[e * self.commodities..(e + 1) * self.commodities]
    }

    pub fn clear(&mut self) {
        self.flows.iter_mut().for_each(|x| *x = 0.0);
        self.resources.iter_mut().for_each(|x| *x = 0.0);
    }

    /// `self += other`.
    pub fn accumulate(&mut self, other: &FlowAssignment) {
        for (a, b) in self.flows.iter_mut().zip(&other.flows) {
            *a += b;
        }
        for (a, b) in self.resources.iter_mut().zip(&other.resources) {
            *a += b;
        }
    }

    pub fn scaled(&self, factor: f64) -> FlowAssignment {
        FlowAssignment {
            commodities: self.commodities,
            flows: self.flows.iter().map(|x| x * factor).collect(),
            resources: self.resources.iter().map(|x| x * factor).collect(),
        }
    }

    /// Total inflow of commodity `c` into physical node `u`.
    pub fn inflow(&self, graph: &AugmentedGraph, u: usize, c: usize) -> f64 {
        graph.in_edges(u).iter().map(|&e| self.flow(e, c)).sum()
    }

    /// Total outflow of commodity `c` from physical node `u`.
    pub fn outflow(&self, graph: &AugmentedGraph, u: usize, c: usize) -> f64 {
        graph.out_edges(u).iter().map(|&e| self.flow(e, c)).sum()
    }

    /// Inflow minus outflow, indexed `u * K + c`.
    pub fn surplus(&self, graph: &AugmentedGraph) -> Vec<f64> {
        let k = self.commodities;
        let mut s = vec![0.0; graph.physical_nodes() * k];
        for (e, edge) in graph.edges().iter().enumerate() {
            let (from, to) = edge.original_endpoints();
            for c in 0..k {
                let f = self.flow(e, c);
                if f == 0.0 {
                    continue;
                }
                if let Some(u) = from {
                    s[u * k + c] -= f;
                }
                if let Some(v) = to {
                    s[v * k + c] += f;
                }
            }
        }
        s
    }

    /// Largest positive conservation surplus over all `(u, c)`.
    pub fn max_violation(&self, graph: &AugmentedGraph) -> f64 {
        self.surplus(graph).into_iter().fold(0.0, f64::max)
    }

    /// `Σ w_e y_e`.
    pub fn cost(&self, graph: &AugmentedGraph) -> f64 {
        graph
            .edges()
            .iter()
            .zip(&self.resources)
            .map(|(e, y)| e.unit_cost * y)
            .sum()
    }

    /// Squared norm of the net-flow vector over every queue, i.e. every
    /// `(u, c)` except final commodities at their destination.
    pub fn net_flow_norm_sq(&self, graph: &AugmentedGraph) -> f64 {
        let k = self.commodities;
        self.surplus(graph)
            .iter()
            .enumerate()
            .filter(|(i, _)| !graph.is_pinned(i / k, i % k))
            .map(|(_, s)| s * s)
            .sum()
    }
}
