//! Independent verification: constraint checks, cost evaluation, an exact
//! LP solve of the fractional problem and exact integer search on small
//! instances.

mod integer;
pub mod simplex;

pub use integer::{solve_integer_bruteforce, solve_integer_exact, IntegerOptimum};

use thiserror::Error;

use crate::flow::FlowAssignment;
use crate::model::{AugmentedGraph, EdgeKind};
use simplex::{Cmp, LinearProgram, LpOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("solution shape {got_edges}x{got_commodities} does not match graph {edges}x{commodities}")]
    DimensionMismatch {
        edges: usize,
        commodities: usize,
        got_edges: usize,
        got_commodities: usize,
    },
    #[error("integer search space of {size:e} assignments exceeds the limit of {limit:e}")]
    InstanceTooLarge { size: f64, limit: f64 },
}

/// Worst offender of one constraint family: a description and its magnitude.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Offender {
    pub location: String,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// Largest `inflow - outflow` over physical nodes and commodities.
    pub max_conservation_violation: f64,
    /// Largest `|inflow - outflow|`.
    pub max_abs_imbalance: f64,
    pub chaining_ok: bool,
    pub capacity_ok: bool,
    pub source_ok: bool,
    pub sink_ok: bool,
    /// No flow on edges a commodity cannot use.
    pub admissible_ok: bool,
    pub worst_conservation: Offender,
    pub worst_chaining: Offender,
    pub worst_capacity: Offender,
    pub worst_source: Offender,
    pub worst_sink: Offender,
}

impl FeasibilityReport {
    /// All exact checks pass and the conservation surplus is within `tol`.
    pub fn feasible(&self, tol: f64) -> bool {
        self.structural_ok() && self.max_conservation_violation <= tol
    }

    /// Feasible in the strict sense: conservation holds in both directions.
    pub fn exactly_feasible(&self, tol: f64) -> bool {
        self.structural_ok() && self.max_abs_imbalance <= tol
    }

    pub fn structural_ok(&self) -> bool {
        self.chaining_ok && self.capacity_ok && self.source_ok && self.sink_ok && self.admissible_ok
    }
}

fn note(worst: &mut Offender, amount: f64, location: impl FnOnce() -> String) {
    if amount > worst.amount {
        *worst = Offender {
            location: location(),
            amount,
        };
    }
}

/// Evaluates every constraint of the flow model. `tol` applies to the exact
/// checks; conservation is reported numerically.
pub fn check_solution(
    graph: &AugmentedGraph,
    solution: &FlowAssignment,
    tol: f64,
) -> Result<FeasibilityReport, OracleError> {
    let k = graph.commodity_count();
    if solution.edge_count() != graph.edge_count() || solution.commodity_count() != k {
        return Err(OracleError::DimensionMismatch {
            edges: graph.edge_count(),
            commodities: k,
            got_edges: solution.edge_count(),
            got_commodities: solution.commodity_count(),
        });
    }
    let infos = graph.commodities();
    let name = |c: usize| infos[c].id.to_string();

    let mut worst_conservation = Offender::default();
    let mut max_surplus = 0.0f64;
    let mut max_abs = 0.0f64;
    let surplus = solution.surplus(graph);
    for (i, &s) in surplus.iter().enumerate() {
        let (u, c) = (i / k, i % k);
        if s > max_surplus {
            max_surplus = s;
            worst_conservation = Offender {
                location: format!("node {} commodity {}", u + 1, name(c)),
                amount: s,
            };
        }
        max_abs = max_abs.max(s.abs());
    }

    let mut worst_chaining = Offender::default();
    let mut worst_capacity = Offender::default();
    let mut worst_source = Offender::default();
    let mut worst_sink = Offender::default();
    let mut admissible_ok = true;

    for (e, edge) in graph.edges().iter().enumerate() {
        let mut load = 0.0;
        for c in 0..k {
            let f = solution.flow(e, c);
            if f < -tol {
                note(&mut worst_capacity, -f, || {
                    format!("negative flow on {} for {}", graph.describe_edge(e), name(c))
                });
            }
            match graph.req(e, c) {
                Some(r) => load += f * r,
                None => {
                    if f.abs() > tol {
                        admissible_ok = false;
                    }
                }
            }
        }
        let y = solution.resources[e];
        let over = (load - y).max(y - edge.capacity).max(-y);
        if over > tol {
            note(&mut worst_capacity, over, || graph.describe_edge(e));
        }
    }

    for u in 0..graph.physical_nodes() {
        let (cin, cout, src, sink) = (
            graph.compute_in(u),
            graph.compute_out(u),
            graph.source_edge(u),
            graph.sink_edge(u),
        );
        for (c, info) in infos.iter().enumerate() {
            // Output of the processing unit must match its scaled input.
            let expected = match info.predecessor {
                Some(p) => infos[p].next_scaling * solution.flow(cin, p),
                None => 0.0,
            };
            let gap = (solution.flow(cout, c) - expected).abs();
            if gap > tol {
                note(&mut worst_chaining, gap, || format!("p({}) {}", u + 1, name(c)));
            }
            let injected = if info.id.stage == 0 {
                graph.injection(u, c)
            } else {
                0.0
            };
            let gap = (solution.flow(src, c) - injected).abs();
            if gap > tol {
                note(&mut worst_source, gap, || format!("s({}) {}", u + 1, name(c)));
            }
            if !(info.is_final && info.dest == u) {
                let f = solution.flow(sink, c).abs();
                if f > tol {
                    note(&mut worst_sink, f, || format!("q({}) {}", u + 1, name(c)));
                }
            }
        }
    }

    Ok(FeasibilityReport {
        max_conservation_violation: max_surplus,
        max_abs_imbalance: max_abs,
        chaining_ok: worst_chaining.amount <= tol,
        capacity_ok: worst_capacity.amount <= tol,
        source_ok: worst_source.amount <= tol,
        sink_ok: worst_sink.amount <= tol,
        admissible_ok,
        worst_conservation,
        worst_chaining,
        worst_capacity,
        worst_source,
        worst_sink,
    })
}

/// `Σ w_e y_e` over the augmented graph.
pub fn evaluate_cost(graph: &AugmentedGraph, resources: &[f64]) -> f64 {
    graph
        .edges()
        .iter()
        .zip(resources)
        .map(|(e, y)| e.unit_cost * y)
        .sum()
}

/// Column layout of the relaxation built by [`Relaxation::new`].
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub lp: LinearProgram,
    /// `(edge, commodity) -> column` for every free flow variable.
    flow_cols: Vec<Option<usize>>,
    /// `edge -> column` for resource variables on cost-bearing edges.
    y_cols: Vec<Option<usize>>,
}

/// Resource bounds applied to an edge while building the relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResourceBound {
    /// `lo ≤ y ≤ hi`, `y` a variable.
    Range(f64, f64),
    /// `y` fixed to a constant.
    Fixed(f64),
}

impl Relaxation {
    /// Builds the linear relaxation with `y_e ∈ [0, c_e]` on every edge.
    pub fn new(graph: &AugmentedGraph) -> Self {
        let bounds: Vec<ResourceBound> = graph
            .edges()
            .iter()
            .map(|e| ResourceBound::Range(0.0, e.capacity))
            .collect();
        Self::with_bounds(graph, &bounds, false)
    }

    /// Builds the relaxation under explicit resource bounds. With
    /// `linking`, adds `f_e^c ≤ volume_c · y_e`, valid for integer `y` and
    /// acyclic flows.
    pub fn with_bounds(graph: &AugmentedGraph, bounds: &[ResourceBound], linking: bool) -> Self {
        let k = graph.commodity_count();
        let e_count = graph.edge_count();
        let infos = graph.commodities();
        let mut flow_cols = vec![None; e_count * k];
        let mut y_cols = vec![None; e_count];
        let mut objective = Vec::new();

        // Free flow columns: network and compute-in edges, plus the sink at
        // each destination for its final commodity. Compute-out flows are
        // substituted through the chaining equality, source flows are fixed.
        for (e, edge) in graph.edges().iter().enumerate() {
            let eligible = match edge.kind {
                EdgeKind::Network(_) | EdgeKind::ComputeIn | EdgeKind::Sink => true,
                EdgeKind::ComputeOut | EdgeKind::Source => false,
            };
            if !eligible {
                continue;
            }
            for c in 0..k {
                if graph.req(e, c).is_some() {
                    flow_cols[e * k + c] = Some(objective.len());
                    objective.push(0.0);
                }
            }
        }
        for (e, edge) in graph.edges().iter().enumerate() {
            let carries_load = matches!(edge.kind, EdgeKind::Network(_) | EdgeKind::ComputeIn);
            if carries_load && matches!(bounds[e], ResourceBound::Range(..)) {
                y_cols[e] = Some(objective.len());
                objective.push(edge.unit_cost);
            }
        }
        let mut lp = LinearProgram {
            objective,
            constraints: Vec::new(),
        };

        // Conservation at every physical node and commodity.
        for u in 0..graph.physical_nodes() {
            let cout = graph.compute_out(u);
            let cin = graph.compute_in(u);
            for (c, info) in infos.iter().enumerate() {
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for &e in graph.in_edges(u) {
                    if let Some(col) = flow_cols[e * k + c] {
                        coeffs.push((col, 1.0));
                    }
                }
                if let Some(p) = info.predecessor {
                    if graph.req(cout, c).is_some() {
                        if let Some(col) = flow_cols[cin * k + p] {
                            coeffs.push((col, infos[p].next_scaling));
                        }
                    }
                }
                for &e in graph.out_edges(u) {
                    if let Some(col) = flow_cols[e * k + c] {
                        coeffs.push((col, -1.0));
                    }
                }
                let injected = if info.id.stage == 0 {
                    graph.injection(u, c)
                } else {
                    0.0
                };
                if coeffs.is_empty() && injected == 0.0 {
                    continue;
                }
                lp.add(coeffs, Cmp::Eq, -injected);
            }
        }

        // Capacity coupling.
        for (e, edge) in graph.edges().iter().enumerate() {
            if !matches!(edge.kind, EdgeKind::Network(_) | EdgeKind::ComputeIn) {
                continue;
            }
            let mut coeffs: Vec<(usize, f64)> = (0..k)
                .filter_map(|c| {
                    let col = flow_cols[e * k + c]?;
                    Some((col, graph.req(e, c)?))
                })
                .collect();
            if coeffs.is_empty() {
                continue;
            }
            match bounds[e] {
                ResourceBound::Fixed(y) => lp.add(coeffs, Cmp::Le, y),
                ResourceBound::Range(lo, hi) => {
                    let yc = y_cols[e].unwrap();
                    if linking {
                        for c in 0..k {
                            if let Some(col) = flow_cols[e * k + c] {
                                lp.add(vec![(col, 1.0), (yc, -infos[c].volume)], Cmp::Le, 0.0);
                            }
                        }
                    }
                    coeffs.push((yc, -1.0));
                    lp.add(coeffs, Cmp::Le, 0.0);
                    lp.add(vec![(yc, 1.0)], Cmp::Le, hi);
                    if lo > 0.0 {
                        lp.add(vec![(yc, 1.0)], Cmp::Ge, lo);
                    }
                }
            }
        }

        Relaxation {
            lp,
            flow_cols,
            y_cols,
        }
    }

    pub fn y_column(&self, e: usize) -> Option<usize> {
        self.y_cols[e]
    }

    /// Expands an LP point into a full assignment on the augmented graph.
    pub fn assignment(
        &self,
        graph: &AugmentedGraph,
        x: &[f64],
        fixed: Option<&[ResourceBound]>,
    ) -> FlowAssignment {
        let mut out = FlowAssignment::zeros(graph);
        for (idx, col) in self.flow_cols.iter().enumerate() {
            if let Some(col) = col {
                out.flows[idx] = x[*col];
            }
        }
        let infos = graph.commodities();
        for u in 0..graph.physical_nodes() {
            let (cin, cout, src) = (graph.compute_in(u), graph.compute_out(u), graph.source_edge(u));
            for (c, info) in infos.iter().enumerate() {
                if let Some(p) = info.predecessor {
                    if graph.req(cout, c).is_some() {
                        let v = infos[p].next_scaling * out.flow(cin, p);
                        out.set_flow(cout, c, v);
                    }
                }
                if info.id.stage == 0 {
                    out.set_flow(src, c, graph.injection(u, c));
                }
            }
        }
        for e in 0..graph.edge_count() {
            out.resources[e] = match (self.y_cols[e], fixed.map(|f| f[e])) {
                (Some(col), _) => x[col],
                (None, Some(ResourceBound::Fixed(y))) => y,
                _ => 0.0,
            };
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub cost: f64,
    pub assignment: Option<FlowAssignment>,
}

/// Exact optimum of the fractional problem.
pub fn solve_fractional_lp(graph: &AugmentedGraph) -> LpSolution {
    let relax = Relaxation::new(graph);
    match relax.lp.solve() {
        LpOutcome::Optimal { objective, x } => LpSolution {
            status: LpStatus::Optimal,
            cost: objective,
            assignment: Some(relax.assignment(graph, &x, None)),
        },
        LpOutcome::Infeasible => LpSolution {
            status: LpStatus::Infeasible,
            cost: f64::INFINITY,
            assignment: None,
        },
        LpOutcome::Unbounded => LpSolution {
            status: LpStatus::Unbounded,
            cost: f64::NEG_INFINITY,
            assignment: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;

    fn two_node(lambda: f64, link_cap: u32) -> AugmentedGraph {
        let net = CloudNetwork {
            nodes: vec![
                NodeSpec {
                    id: 1,
                    cloud_unit_cost: 1.0,
                    cloud_capacity: 10,
                },
                NodeSpec {
                    id: 2,
                    cloud_unit_cost: 3.0,
                    cloud_capacity: 10,
                },
            ],
            links: vec![LinkSpec {
                from: 1,
                to: 2,
                net_unit_cost: 1.0,
                net_capacity: link_cap,
                transport_req: 1.0,
            }],
        };
        let services = vec![ServiceSpec {
            id: 1,
            functions: vec![FunctionSpec::uniform(2, 1.0)],
        }];
        let demands = if lambda > 0.0 {
            vec![Demand {
                destination: 2,
                service: 1,
                sources: [(1, lambda)].into(),
            }]
        } else {
            vec![]
        };
        AugmentedGraph::build(&net, &services, &demands).unwrap()
    }

    /// Process at node 1, ship the result to node 2.
    fn hand_route(g: &AugmentedGraph) -> FlowAssignment {
        let mut a = FlowAssignment::zeros(g);
        a.set_flow(g.source_edge(0), 0, 1.0);
        a.set_flow(g.compute_in(0), 0, 1.0);
        a.set_flow(g.compute_out(0), 1, 1.0);
        a.set_flow(0, 1, 1.0);
        a.set_flow(g.sink_edge(1), 1, 1.0);
        a.resources[g.compute_in(0)] = 1.0;
        a.resources[0] = 1.0;
        a
    }

    #[test]
    fn zero_solution_zero_demand_is_feasible() {
        let g = two_node(0.0, 10);
        let rep = check_solution(&g, &FlowAssignment::zeros(&g), 1e-9).unwrap();
        assert!(rep.exactly_feasible(1e-9));
        assert_eq!(rep.max_conservation_violation, 0.0);
    }

    #[test]
    fn zero_solution_with_demand_violates_conservation_at_source() {
        let g = two_node(1.0, 10);
        let mut a = FlowAssignment::zeros(&g);
        a.set_flow(g.source_edge(0), 0, 1.0);
        let rep = check_solution(&g, &a, 1e-9).unwrap();
        assert!(rep.source_ok);
        assert_eq!(rep.max_conservation_violation, 1.0);
        assert!(rep.worst_conservation.location.starts_with("node 1"));
    }

    #[test]
    fn hand_route_passes_every_check() {
        let g = two_node(1.0, 10);
        let a = hand_route(&g);
        let rep = check_solution(&g, &a, 1e-9).unwrap();
        assert!(rep.exactly_feasible(1e-9), "{rep:?}");
        assert_eq!(evaluate_cost(&g, &a.resources), 2.0);
    }

    #[test]
    fn broken_chaining_and_capacity_are_flagged() {
        let g = two_node(1.0, 10);
        let mut a = hand_route(&g);
        a.set_flow(g.compute_out(0), 1, 0.5);
        a.resources[0] = 0.5;
        let rep = check_solution(&g, &a, 1e-9).unwrap();
        assert!(!rep.chaining_ok);
        assert!(!rep.capacity_ok);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = two_node(1.0, 10);
        let a = FlowAssignment::with_shape(3, 1);
        assert!(matches!(
            check_solution(&g, &a, 1e-9),
            Err(OracleError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lp_two_node_optimum() {
        let g = two_node(1.0, 10);
        let sol = solve_fractional_lp(&g);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.cost - 2.0).abs() < 1e-9);
        let rep = check_solution(&g, sol.assignment.as_ref().unwrap(), 1e-9).unwrap();
        assert!(rep.exactly_feasible(1e-9), "{rep:?}");
    }

    #[test]
    fn lp_zero_demand_and_infeasible() {
        assert_eq!(solve_fractional_lp(&two_node(0.0, 10)).cost, 0.0);
        assert_eq!(
            solve_fractional_lp(&two_node(20.0, 10)).status,
            LpStatus::Infeasible
        );
    }
}
