//! Exact search over integer resource vectors.

use super::simplex::LpOutcome;
use super::{OracleError, Relaxation, ResourceBound};
use crate::flow::FlowAssignment;
use crate::model::{AugmentedGraph, EdgeKind};

#[derive(Debug, Clone)]
pub struct IntegerOptimum {
    pub cost: f64,
    /// Integer resource units per augmented edge.
    pub resources: Vec<u32>,
    /// A flow routing supported by `resources`.
    pub assignment: FlowAssignment,
    /// LP solves performed.
    pub lp_solves: usize,
}

/// Edges whose resource level is a real decision: cost-bearing edges that
/// some commodity may use.
fn decision_edges(graph: &AugmentedGraph) -> Vec<usize> {
    let k = graph.commodity_count();
    graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(e, edge)| {
            matches!(edge.kind, EdgeKind::Network(_) | EdgeKind::ComputeIn)
                && edge.capacity >= 1.0
                && (0..k).any(|c| graph.req(*e, c).is_some())
        })
        .map(|(e, _)| e)
        .collect()
}

fn fixed_bounds(graph: &AugmentedGraph, levels: &[(usize, u32)]) -> Vec<ResourceBound> {
    let mut bounds = vec![ResourceBound::Fixed(0.0); graph.edge_count()];
    for &(e, y) in levels {
        bounds[e] = ResourceBound::Fixed(y as f64);
    }
    bounds
}

/// Enumerates every integer resource vector with `y_e ≤ min(c_e, cap_limit)`
/// in order of increasing cost and returns the first one that admits a
/// feasible flow. Zero-cost edges are opened to their limit. Returns
/// `Ok(None)` when no vector is feasible.
pub fn solve_integer_bruteforce(
    graph: &AugmentedGraph,
    cap_limit: u32,
    max_space: f64,
) -> Result<Option<IntegerOptimum>, OracleError> {
    let edges = decision_edges(graph);
    let mut free = Vec::new();
    let mut searched = Vec::new();
    for &e in &edges {
        let edge = graph.edge(e);
        let top = (edge.capacity as u32).min(cap_limit);
        if edge.unit_cost == 0.0 {
            free.push((e, top));
        } else {
            searched.push((e, top));
        }
    }
    let size: f64 = searched.iter().map(|&(_, top)| top as f64 + 1.0).product();
    if size > max_space {
        return Err(OracleError::InstanceTooLarge {
            size,
            limit: max_space,
        });
    }

    let decode = |mut idx: u64| -> Vec<u32> {
        searched
            .iter()
            .map(|&(_, top)| {
                let radix = top as u64 + 1;
                let digit = (idx % radix) as u32;
                idx /= radix;
                digit
            })
            .collect()
    };
    let mut order: Vec<(f64, u64)> = (0..size as u64)
        .map(|idx| {
            let cost = decode(idx)
                .iter()
                .zip(&searched)
                .map(|(&y, &(e, _))| graph.edge(e).unit_cost * y as f64)
                .sum();
            (cost, idx)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut lp_solves = 0;
    for (cost, idx) in order {
        let mut levels: Vec<(usize, u32)> = free.clone();
        levels.extend(searched.iter().zip(decode(idx)).map(|(&(e, _), y)| (e, y)));
        let bounds = fixed_bounds(graph, &levels);
        let relax = Relaxation::with_bounds(graph, &bounds, false);
        lp_solves += 1;
        if let LpOutcome::Optimal { x, .. } = relax.lp.solve() {
            let mut resources = vec![0u32; graph.edge_count()];
            for &(e, y) in &levels {
                resources[e] = y;
            }
            let mut assignment = relax.assignment(graph, &x, Some(&bounds));
            for (e, &y) in resources.iter().enumerate() {
                assignment.resources[e] = y as f64;
            }
            return Ok(Some(IntegerOptimum {
                cost,
                resources,
                assignment,
                lp_solves,
            }));
        }
    }
    Ok(None)
}

/// Branch and bound over integer resource levels using the linear
/// relaxation strengthened with per-commodity linking rows. Exact, and much
/// faster than enumeration when few edges need to be opened. Fails with
/// `InstanceTooLarge` after `node_limit` subproblems.
pub fn solve_integer_exact(
    graph: &AugmentedGraph,
    node_limit: usize,
) -> Result<Option<IntegerOptimum>, OracleError> {
    let edges = decision_edges(graph);
    let integral_costs = edges
        .iter()
        .all(|&e| graph.edge(e).unit_cost.fract() == 0.0);
    let root: Vec<ResourceBound> = graph
        .edges()
        .iter()
        .map(|e| ResourceBound::Range(0.0, e.capacity.floor()))
        .collect();

    let mut best: Option<IntegerOptimum> = None;
    let mut stack = vec![root];
    let mut lp_solves = 0;
    while let Some(bounds) = stack.pop() {
        if lp_solves >= node_limit {
            return Err(OracleError::InstanceTooLarge {
                size: lp_solves as f64,
                limit: node_limit as f64,
            });
        }
        let relax = Relaxation::with_bounds(graph, &bounds, true);
        lp_solves += 1;
        let LpOutcome::Optimal { objective, x } = relax.lp.solve() else {
            continue;
        };
        let bound = if integral_costs {
            (objective - 1e-6).ceil()
        } else {
            objective
        };
        if let Some(b) = &best {
            if bound >= b.cost - 1e-9 {
                continue;
            }
        }
        let branch = edges
            .iter()
            .filter(|&&e| graph.edge(e).unit_cost > 0.0)
            .filter_map(|&e| {
                let y = x[relax.y_column(e)?];
                let frac = (y - y.round()).abs();
                (frac > 1e-7).then_some((e, y, frac))
            })
            .max_by(|a, b| a.2.total_cmp(&b.2).then(b.0.cmp(&a.0)));
        match branch {
            None => {
                let mut assignment = relax.assignment(graph, &x, None);
                let mut resources = vec![0u32; graph.edge_count()];
                for &e in &edges {
                    let raw = x[relax.y_column(e).unwrap()];
                    let y = if graph.edge(e).unit_cost > 0.0 {
                        raw.round().max(0.0)
                    } else {
                        (raw - 1e-9).ceil().max(0.0)
                    };
                    resources[e] = y as u32;
                    assignment.resources[e] = y;
                }
                let cost = super::evaluate_cost(graph, &assignment.resources);
                if best.as_ref().map_or(true, |b| cost < b.cost - 1e-9) {
                    best = Some(IntegerOptimum {
                        cost,
                        resources,
                        assignment,
                        lp_solves,
                    });
                }
            }
            Some((e, y, _)) => {
                let ResourceBound::Range(lo, hi) = bounds[e] else { unreachable!() };
                let mut down = bounds.clone();
                down[e] = ResourceBound::Range(lo, y.floor());
                let mut up = bounds;
                up[e] = ResourceBound::Range(y.ceil(), hi);
                // Opening the edge is explored first.
                stack.push(down);
                stack.push(up);
            }
        }
    }
    if let Some(b) = &mut best {
        b.lp_solves = lp_solves;
    }
    Ok(best)
}
