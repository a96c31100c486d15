//! Constrained variant for integer resource allocation.
//!
//! Queues evolve exactly as in [`crate::qnsd`], but every node may only
//! forward what it received in the previous iteration. Each node fills its
//! outgoing edges one at a time: for every integer resource level it packs
//! the best commodities into the resulting room (a fractional knapsack) and
//! keeps the level with the best net utility. This forces flows to share
//! resource units, and once the per-iteration assignment stops changing it
//! is an integer solution.

use crate::flow::FlowAssignment;
use crate::model::{AugmentedGraph, EdgeKind};
use crate::oracle::{check_solution, FeasibilityReport};
use crate::qnsd::{
    finish_iteration_flows, processing_weight, transport_weight, FrameAverager, QnsdParams, Queues,
    Solution, Trace, TraceRow,
};

/// Consecutive iterations with unchanged assignment and backlogs that count
/// as a fixed point.
pub const STABLE_WINDOW: usize = 50;
/// Componentwise tolerance for "unchanged".
pub const STABLE_TOL: f64 = 1e-9;

/// Flow units of each commodity a node may forward this iteration,
/// indexed `node * K + commodity`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommodityBudget {
    commodities: usize,
    pub available: Vec<f64>,
}

impl CommodityBudget {
    #[inline]
    pub fn get(&self, u: usize, c: usize) -> f64 {
        self.available[u * self.commodities + c]
    }

    #[inline]
    fn take(&mut self, u: usize, c: usize, amount: f64) {
        let slot = &mut self.available[u * self.commodities + c];
        *slot = (*slot - amount).max(0.0);
    }
}

/// Budgets from the previous iteration's inflows, source injection
/// included. Final commodities at their destination leave through the sink
/// and get no budget.
pub fn build_budgets(graph: &AugmentedGraph, prev: &FlowAssignment) -> CommodityBudget {
    let k = graph.commodity_count();
    let mut available = vec![0.0; graph.physical_nodes() * k];
    for u in 0..graph.physical_nodes() {
        for c in 0..k {
            if !graph.is_pinned(u, c) {
                available[u * k + c] = prev.inflow(graph, u, c);
            }
        }
    }
    CommodityBudget {
        commodities: k,
        available,
    }
}

/// Resource level and flows committed on one outgoing edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAssignment {
    pub edge: usize,
    pub level: u32,
    /// `(commodity, flow)` pairs with positive flow.
    pub flows: Vec<(usize, f64)>,
    pub score: f64,
}

/// Candidate commodity for an edge: weight per resource unit and
/// resource units per flow unit.
#[derive(Debug, Clone, Copy)]
struct Item {
    commodity: usize,
    weight: f64,
    req: f64,
}

/// Best level for one edge given current budgets. `items` must be sorted
/// by descending weight.
fn best_level(
    items: &[Item],
    budget: impl Fn(usize) -> f64,
    capacity: u32,
    unit_cost: f64,
    v: f64,
) -> (u32, f64, Vec<(usize, f64)>) {
    let mut best = (0u32, 0.0f64, Vec::new());
    for level in 1..=capacity {
        let mut room = level as f64;
        let mut utility = 0.0;
        let mut flows = Vec::new();
        for it in items {
            if room <= 0.0 {
                break;
            }
            let avail = budget(it.commodity);
            if avail <= 0.0 {
                continue;
            }
            let used = room.min(avail * it.req);
            let flow = if used == avail * it.req { avail } else { used / it.req };
            utility += it.weight * used;
            room -= used;
            flows.push((it.commodity, flow));
        }
        let score = utility - v * unit_cost * level as f64;
        if score > best.1 {
            best = (level, score, flows);
        }
    }
    best
}

/// Joint transport and processing assignment for node `u`. Budgets are
/// consumed in place.
pub fn node_assignment(
    graph: &AugmentedGraph,
    queues: &Queues,
    u: usize,
    budgets: &mut CommodityBudget,
    v: f64,
) -> Vec<EdgeAssignment> {
    let k = graph.commodity_count();
    let mut candidates: Vec<(usize, Vec<Item>)> = Vec::new();
    for &e in graph.out_edges(u) {
        let edge = graph.edge(e);
        let mut items: Vec<Item> = match edge.kind {
            EdgeKind::Network(_) => (0..k)
                .map(|c| Item {
                    commodity: c,
                    weight: transport_weight(graph, queues, e, c),
                    req: graph.req(e, c).unwrap(),
                })
                .collect(),
            EdgeKind::ComputeIn => (0..k)
                .filter_map(|c| {
                    Some(Item {
                        commodity: c,
                        weight: processing_weight(graph, queues, u, c)?,
                        req: graph.req(e, c)?,
                    })
                })
                .collect(),
            _ => continue,
        };
        items.retain(|it| it.weight > 0.0 && budgets.get(u, it.commodity) > 0.0);
        if items.is_empty() {
            continue;
        }
        // Stable sort keeps commodity order on ties.
        items.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        candidates.push((e, items));
    }
    // Edges with the strongest pull go first; ties by edge id.
    candidates.sort_by(|a, b| b.1[0].weight.total_cmp(&a.1[0].weight).then(a.0.cmp(&b.0)));

    let mut out = Vec::new();
    for (e, items) in candidates {
        let edge = graph.edge(e);
        let (level, score, flows) = best_level(
            &items,
            |c| budgets.get(u, c),
            edge.capacity as u32,
            edge.unit_cost,
            v,
        );
        if level == 0 {
            continue;
        }
        for &(c, f) in &flows {
            budgets.take(u, c, f);
        }
        out.push(EdgeAssignment {
            edge: e,
            level,
            flows,
            score,
        });
    }
    out
}

/// Integer result read off the fixed point of the per-iteration assignment.
#[derive(Debug, Clone)]
pub struct IntegerSolution {
    /// Flows and integer resources of the final iteration.
    pub assignment: FlowAssignment,
    pub cost: f64,
    pub report: FeasibilityReport,
    pub feasible: bool,
    /// The assignment was unchanged for [`STABLE_WINDOW`] iterations.
    pub converged: bool,
    pub iterations_used: usize,
    /// Frame-averaged view kept for diagnostics.
    pub average: Solution,
}

impl IntegerSolution {
    /// Resource units at each node's processing edge, indexed by node.
    pub fn processing_allocation(&self, graph: &AugmentedGraph) -> Vec<f64> {
        (0..graph.physical_nodes())
            .map(|u| self.assignment.resources[graph.compute_in(u)])
            .collect()
    }
}

/// Iteration driver with per-step access for invariant checks.
pub struct Cqnsd<'g> {
    graph: &'g AugmentedGraph,
    params: QnsdParams,
    pub t: usize,
    pub queues: Queues,
    /// Decisions of iteration `t`.
    pub decisions: FlowAssignment,
    /// Budgets used in iteration `t`.
    pub budgets: CommodityBudget,
    averager: FrameAverager,
    stable_for: usize,
}

impl<'g> Cqnsd<'g> {
    pub fn new(graph: &'g AugmentedGraph, params: QnsdParams) -> Self {
        let mut decisions = FlowAssignment::zeros(graph);
        finish_iteration_flows(graph, &mut decisions);
        Cqnsd {
            graph,
            params,
            t: 0,
            queues: Queues::new(graph),
            budgets: build_budgets(graph, &FlowAssignment::zeros(graph)),
            decisions,
            averager: FrameAverager::new(graph, params.truncate),
            stable_for: 0,
        }
    }

    pub fn stable_for(&self) -> usize {
        self.stable_for
    }

    pub fn step(&mut self) {
        let g = self.graph;
        self.t += 1;
        let backlog = self.queues.actual.clone();
        self.queues.update(g, &self.decisions, self.params.theta);
        self.budgets = build_budgets(g, &self.decisions);
        let mut budgets = self.budgets.clone();

        let mut next = FlowAssignment::zeros(g);
        for u in 0..g.physical_nodes() {
            for a in node_assignment(g, &self.queues, u, &mut budgets, self.params.v) {
                next.resources[a.edge] = a.level as f64;
                for (c, f) in a.flows {
                    next.set_flow(a.edge, c, f);
                    if a.edge == g.compute_in(u) {
                        let info = &g.commodities()[c];
                        next.set_flow(g.compute_out(u), info.successor.unwrap(), info.next_scaling * f);
                    }
                }
            }
        }
        finish_iteration_flows(g, &mut next);

        let unchanged = next
            .flows
            .iter()
            .zip(&self.decisions.flows)
            .all(|(a, b)| (a - b).abs() <= STABLE_TOL)
            && next.resources == self.decisions.resources
            && backlog
                .iter()
                .zip(&self.queues.actual)
                .all(|(a, b)| (a - b).abs() <= STABLE_TOL);
        self.stable_for = if unchanged { self.stable_for + 1 } else { 0 };
        self.decisions = next;
        self.averager.record(self.t, &self.decisions);
    }

    pub fn converged(&self) -> bool {
        self.stable_for >= STABLE_WINDOW
    }

    fn sample(&self) -> TraceRow {
        let avg = self.averager.average();
        TraceRow {
            iteration: self.t,
            frame: self.averager.frame,
            cost_avg: avg.cost(self.graph),
            max_violation: avg.max_violation(self.graph),
        }
    }

    pub fn solution(&self) -> IntegerSolution {
        let g = self.graph;
        let average = self.averager.average();
        let report = check_solution(g, &self.decisions, 1e-9).expect("shapes match");
        let tol = self.params.convergence.max_violation;
        IntegerSolution {
            cost: self.decisions.cost(g),
            feasible: report.exactly_feasible(tol.min(1e-6)),
            report,
            converged: self.converged(),
            iterations_used: self.t,
            assignment: self.decisions.clone(),
            average: Solution {
                cost: average.cost(g),
                max_violation: average.max_violation(g),
                average,
                iterations_used: self.t,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct CqnsdRun {
    pub solution: IntegerSolution,
    pub trace: Trace,
}

/// Iterates until the assignment reaches a fixed point or `max_iters`.
pub fn run_cqnsd(graph: &AugmentedGraph, params: &QnsdParams) -> CqnsdRun {
    let mut solver = Cqnsd::new(graph, *params);
    let mut trace = Trace::default();
    while solver.t < params.max_iters && !solver.converged() {
        solver.step();
        if solver.t % params.trace_every == 0 {
            trace.rows.push(solver.sample());
        }
    }
    CqnsdRun {
        solution: solver.solution(),
        trace,
    }
}
