//! Queue-length driven iterative solver for the fractional problem.
//!
//! Each iteration mimics one time slot of a cloud network queueing system:
//! actual queues absorb the previous slot's flows, virtual queues add a
//! momentum term, and every link and processing unit then makes an
//! independent max-weight decision against the frozen virtual queues. The
//! fractional solution is the running mean of those decisions over the
//! current frame, which restarts whenever `t` hits a power of two.

use crate::flow::FlowAssignment;
use crate::model::AugmentedGraph;

/// Stopping thresholds applied after a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// Largest conservation surplus accepted, in flow units.
    pub max_violation: f64,
    /// Largest relative cost change between consecutive frame ends.
    pub rel_cost_change: f64,
}

impl Default for Convergence {
    fn default() -> Self {
        Convergence {
            max_violation: 1e-2,
            rel_cost_change: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnsdParams {
    /// Cost weight in every allocation threshold (`V = 1/ε`).
    pub v: f64,
    /// Momentum, in `[0, 1)`.
    pub theta: f64,
    pub max_iters: usize,
    pub trace_every: usize,
    /// Restart averages at powers of two. Disabling gives the plain
    /// long-run average.
    pub truncate: bool,
    pub convergence: Convergence,
}

impl Default for QnsdParams {
    fn default() -> Self {
        QnsdParams {
            v: 40.0,
            theta: 0.0,
            max_iters: 20_000,
            trace_every: 10,
            truncate: true,
            convergence: Convergence::default(),
        }
    }
}

impl QnsdParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.v > 0.0) || !self.v.is_finite() {
            return Err(format!("V must be positive, got {}", self.v));
        }
        if !(0.0..1.0).contains(&self.theta) {
            return Err(format!("theta must lie in [0, 1), got {}", self.theta));
        }
        if self.trace_every == 0 {
            return Err("trace stride must be at least 1".into());
        }
        Ok(())
    }
}

/// One sampled point of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub frame: u32,
    pub cost_avg: f64,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

/// Frame-averaged result.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Mean flows and resources over the current frame.
    pub average: FlowAssignment,
    pub cost: f64,
    pub max_violation: f64,
    pub iterations_used: usize,
}

impl Solution {
    fn from_average(graph: &AugmentedGraph, average: FlowAssignment, iterations_used: usize) -> Self {
        Solution {
            cost: average.cost(graph),
            max_violation: average.max_violation(graph),
            average,
            iterations_used,
        }
    }
}

/// `[q - out + in]⁺` and the resulting change.
#[inline]
pub fn queue_step(q: f64, inflow: f64, outflow: f64) -> (f64, f64) {
    let next = (q - outflow + inflow).max(0.0);
    (next, next - q)
}

/// Virtual queue with momentum: `U(t) = U(t-1) + ΔQ(t) + θ (U(t-1) - U(t-2))`,
/// where `ΔQ(t) = q - q_prev`. Evaluated as `q + (U(t-1) - q_prev) + ...` so
/// that `θ = 0` keeps `U = Q` bit for bit.
#[inline]
pub fn momentum_step(u_prev: f64, u_prev2: f64, q: f64, q_prev: f64, theta: f64) -> f64 {
    q + (u_prev - q_prev) + theta * (u_prev - u_prev2)
}

/// Actual and virtual queues, one entry per `(physical node, commodity)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Queues {
    commodities: usize,
    /// `Q(t)`.
    pub actual: Vec<f64>,
    /// `U(t)`.
    pub virtual_cur: Vec<f64>,
    /// `U(t-1)`.
    pub virtual_prev: Vec<f64>,
}

impl Queues {
    pub fn new(graph: &AugmentedGraph) -> Self {
        let len = graph.physical_nodes() * graph.commodity_count();
        Queues {
            commodities: graph.commodity_count(),
            actual: vec![0.0; len],
            virtual_cur: vec![0.0; len],
            virtual_prev: vec![0.0; len],
        }
    }

    #[inline]
    pub fn q(&self, u: usize, c: usize) -> f64 {
        self.actual[u * self.commodities + c]
    }

    #[inline]
    pub fn u(&self, u: usize, c: usize) -> f64 {
        self.virtual_cur[u * self.commodities + c]
    }

    /// Absorbs the previous iteration's flows and advances both queues.
    /// Final commodities at their destination stay pinned at zero.
    pub fn update(&mut self, graph: &AugmentedGraph, prev: &FlowAssignment, theta: f64) {
        let k = self.commodities;
        for u in 0..graph.physical_nodes() {
            for c in 0..k {
                let i = u * k + c;
                if graph.is_pinned(u, c) {
                    self.actual[i] = 0.0;
                    self.virtual_cur[i] = 0.0;
                    self.virtual_prev[i] = 0.0;
                    continue;
                }
                let q_prev = self.actual[i];
                let (q, _) = queue_step(
                    q_prev,
                    prev.inflow(graph, u, c),
                    prev.outflow(graph, u, c),
                );
                self.actual[i] = q;
                let next = momentum_step(self.virtual_cur[i], self.virtual_prev[i], q, q_prev, theta);
                self.virtual_prev[i] = self.virtual_cur[i];
                self.virtual_cur[i] = next;
            }
        }
    }
}

/// Outcome of one max-weight decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDecision {
    pub resources: f64,
    /// Selected commodity and its flow; `None` when nothing is allocated.
    pub commodity: Option<usize>,
    pub flow: f64,
}

impl EdgeDecision {
    const IDLE: EdgeDecision = EdgeDecision {
        resources: 0.0,
        commodity: None,
        flow: 0.0,
    };
}

/// Transport weight of commodity `c` on network edge `e`.
#[inline]
pub fn transport_weight(graph: &AugmentedGraph, queues: &Queues, e: usize, c: usize) -> f64 {
    let (u, v) = (graph.network_tail(e), graph.network_head(e));
    let r = graph.req(e, c).expect("network edges admit every commodity");
    (queues.u(u, c) - queues.u(v, c)) / r
}

/// Processing weight of commodity `c` at node `u`, or `None` when `c` can
/// not be processed there.
#[inline]
pub fn processing_weight(graph: &AugmentedGraph, queues: &Queues, u: usize, c: usize) -> Option<f64> {
    let r = graph.req(graph.compute_in(u), c)?;
    let next = graph.commodities()[c].successor?;
    Some((queues.u(u, c) - queues.u(u, next)) / r)
}

/// Strict argmax; ties go to the lowest commodity index.
fn argmax(weights: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (c, w) in weights {
        if best.map_or(true, |(_, bw)| w > bw) {
            best = Some((c, w));
        }
    }
    best
}

/// Max-weight transport on network edge `e`: full capacity to the best
/// commodity when its weight beats `V · w_e`.
pub fn transport_decision(graph: &AugmentedGraph, queues: &Queues, e: usize, v: f64) -> EdgeDecision {
    let edge = graph.edge(e);
    let k = graph.commodity_count();
    let Some((c, w)) = argmax((0..k).map(|c| (c, transport_weight(graph, queues, e, c)))) else {
        return EdgeDecision::IDLE;
    };
    if w - v * edge.unit_cost > 0.0 {
        let r = graph.req(e, c).unwrap();
        EdgeDecision {
            resources: edge.capacity,
            commodity: Some(c),
            flow: edge.capacity / r,
        }
    } else {
        EdgeDecision::IDLE
    }
}

/// Max-weight processing at node `u`. The returned flow is the input to
/// the processing unit; its output is `ξ` times that, as the successor.
pub fn processing_decision(graph: &AugmentedGraph, queues: &Queues, u: usize, v: f64) -> EdgeDecision {
    let e = graph.compute_in(u);
    let edge = graph.edge(e);
    let k = graph.commodity_count();
    let weights = (0..k).filter_map(|c| processing_weight(graph, queues, u, c).map(|w| (c, w)));
    let Some((c, w)) = argmax(weights) else {
        return EdgeDecision::IDLE;
    };
    if w - v * edge.unit_cost > 0.0 {
        let r = graph.req(e, c).unwrap();
        EdgeDecision {
            resources: edge.capacity,
            commodity: Some(c),
            flow: edge.capacity / r,
        }
    } else {
        EdgeDecision::IDLE
    }
}

/// Sets source injection and, at every destination, drains arrivals of
/// the final commodity onto the sink edge.
pub(crate) fn finish_iteration_flows(graph: &AugmentedGraph, flows: &mut FlowAssignment) {
    for u in 0..graph.physical_nodes() {
        let src = graph.source_edge(u);
        let sink = graph.sink_edge(u);
        for (c, info) in graph.commodities().iter().enumerate() {
            if info.id.stage == 0 {
                flows.set_flow(src, c, graph.injection(u, c));
            }
            if info.is_final && info.dest == u {
                flows.set_flow(sink, c, 0.0);
                let arrived = flows.inflow(graph, u, c);
                flows.set_flow(sink, c, arrived);
            }
        }
    }
}

/// Running sums of decisions since the start of the current frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameAverager {
    truncate: bool,
    /// Frame index `j`.
    pub frame: u32,
    pub t_start: usize,
    pub t_last: usize,
    sums: FlowAssignment,
}

impl FrameAverager {
    pub fn new(graph: &AugmentedGraph, truncate: bool) -> Self {
        FrameAverager {
            truncate,
            frame: 0,
            t_start: 1,
            t_last: 0,
            sums: FlowAssignment::zeros(graph),
        }
    }

    /// Frames restart at `t = 1, 2, 4, 8, ...`.
    pub fn is_frame_start(t: usize) -> bool {
        t.is_power_of_two()
    }

    /// Adds iteration `t`'s decisions. Returns `true` if a new frame began.
    pub fn record(&mut self, t: usize, decisions: &FlowAssignment) -> bool {
        let reset = self.truncate && Self::is_frame_start(t);
        if reset {
            self.t_start = t;
            self.frame += 1;
            self.sums.clear();
        }
        self.sums.accumulate(decisions);
        self.t_last = t;
        reset
    }

    pub fn samples(&self) -> usize {
        self.t_last + 1 - self.t_start
    }

    pub fn average(&self) -> FlowAssignment {
        if self.t_last < self.t_start {
            return self.sums.clone();
        }
        self.sums.scaled(1.0 / self.samples() as f64)
    }
}

/// Complete solver state between iterations.
#[derive(Debug, Clone)]
pub struct QnsdState {
    pub t: usize,
    pub queues: Queues,
    /// Decisions of iteration `t`.
    pub decisions: FlowAssignment,
    pub averager: FrameAverager,
}

/// All queues and decisions zeroed; iteration-0 flows carry only the
/// source injection.
pub fn init_state(graph: &AugmentedGraph, truncate: bool) -> QnsdState {
    let mut decisions = FlowAssignment::zeros(graph);
    finish_iteration_flows(graph, &mut decisions);
    QnsdState {
        t: 0,
        queues: Queues::new(graph),
        decisions,
        averager: FrameAverager::new(graph, truncate),
    }
}

/// Iteration driver, exposed so callers can inspect every step.
pub struct Qnsd<'g> {
    graph: &'g AugmentedGraph,
    params: QnsdParams,
    state: QnsdState,
}

impl<'g> Qnsd<'g> {
    pub fn new(graph: &'g AugmentedGraph, params: QnsdParams) -> Self {
        Qnsd {
            graph,
            params,
            state: init_state(graph, params.truncate),
        }
    }

    pub fn state(&self) -> &QnsdState {
        &self.state
    }

    /// Runs one iteration: queue update, decisions on the frozen virtual
    /// queues, then accumulation.
    pub fn step(&mut self) {
        let g = self.graph;
        let st = &mut self.state;
        st.t += 1;
        st.queues.update(g, &st.decisions, self.params.theta);

        let flows = &mut st.decisions;
        flows.clear();
        for e in g.network_edges() {
            let d = transport_decision(g, &st.queues, e, self.params.v);
            flows.resources[e] = d.resources;
            if let Some(c) = d.commodity {
                flows.set_flow(e, c, d.flow);
            }
        }
        for u in 0..g.physical_nodes() {
            let d = processing_decision(g, &st.queues, u, self.params.v);
            let cin = g.compute_in(u);
            flows.resources[cin] = d.resources;
            if let Some(c) = d.commodity {
                let info = &g.commodities()[c];
                flows.set_flow(cin, c, d.flow);
                flows.set_flow(g.compute_out(u), info.successor.unwrap(), info.next_scaling * d.flow);
            }
        }
        finish_iteration_flows(g, flows);
        st.averager.record(st.t, flows);
    }

    pub fn solution(&self) -> Solution {
        Solution::from_average(self.graph, self.state.averager.average(), self.state.t)
    }

    fn sample(&self) -> TraceRow {
        let avg = self.state.averager.average();
        TraceRow {
            iteration: self.state.t,
            frame: self.state.averager.frame,
            cost_avg: avg.cost(self.graph),
            max_violation: avg.max_violation(self.graph),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QnsdRun {
    pub solution: Solution,
    pub trace: Trace,
    /// Violation and frame-to-frame cost change within thresholds.
    pub converged: bool,
}

/// Runs `max_iters` iterations, sampling every `trace_every`.
pub fn run_qnsd(graph: &AugmentedGraph, params: &QnsdParams) -> QnsdRun {
    let mut solver = Qnsd::new(graph, *params);
    let mut trace = Trace::default();
    let mut frame_end_costs: Vec<f64> = Vec::new();
    for t in 1..=params.max_iters {
        solver.step();
        // The last iteration of a frame is the one before the next reset.
        if params.truncate && FrameAverager::is_frame_start(t + 1) {
            frame_end_costs.push(solver.solution().cost);
        }
        if t % params.trace_every == 0 {
            trace.rows.push(solver.sample());
        }
    }
    let solution = solver.solution();
    let converged = assess(&solution, &frame_end_costs, &params.convergence);
    QnsdRun {
        solution,
        trace,
        converged,
    }
}

fn assess(solution: &Solution, frame_end_costs: &[f64], conv: &Convergence) -> bool {
    if solution.iterations_used == 0 {
        return false;
    }
    if solution.max_violation > conv.max_violation {
        return false;
    }
    let previous = match frame_end_costs.last() {
        Some(&c) if frame_end_costs.len() >= 2 && c == solution.cost => {
            frame_end_costs[frame_end_costs.len() - 2]
        }
        Some(&c) => c,
        None => return solution.cost == 0.0,
    };
    let scale = solution.cost.abs().max(previous.abs());
    scale == 0.0 || (solution.cost - previous).abs() <= conv.rel_cost_change * scale
}

/// Upper bound on `‖Af‖²`, the squared net flow at all queues in one
/// iteration. Each edge contributes the most flow it can carry in one
/// iteration: `capacity / min requirement` on cost-bearing edges, `ξ c_u / r`
/// on the processing return edge, the injection rate on source edges, and
/// everything that can arrive on sink edges.
pub fn compute_b_bound(graph: &AugmentedGraph) -> f64 {
    let k = graph.commodity_count();
    let infos = graph.commodities();
    let min_req = |e: usize| {
        (0..k)
            .filter_map(|c| graph.req(e, c))
            .fold(f64::INFINITY, f64::min)
    };
    let per_flow = |cap: f64, r: f64| if r.is_finite() { cap / r } else { 0.0 };

    let mut bound = vec![0.0; graph.edge_count()];
    for e in graph.network_edges() {
        bound[e] = per_flow(graph.edge(e).capacity, min_req(e));
    }
    for u in 0..graph.physical_nodes() {
        let cin = graph.compute_in(u);
        let cap = graph.edge(cin).capacity;
        bound[cin] = per_flow(cap, min_req(cin));
        bound[graph.compute_out(u)] = (0..k)
            .filter_map(|c| graph.req(cin, c).map(|r| infos[c].next_scaling * cap / r))
            .fold(0.0, f64::max);
        bound[graph.source_edge(u)] = (0..k).map(|c| graph.injection(u, c)).sum();
    }
    for u in 0..graph.physical_nodes() {
        bound[graph.sink_edge(u)] = graph
            .in_edges(u)
            .iter()
            .map(|&e| bound[e])
            .sum();
    }
    (0..graph.physical_nodes())
        .map(|u| {
            let inbound: f64 = graph.in_edges(u).iter().map(|&e| bound[e]).sum();
            let outbound: f64 = graph.out_edges(u).iter().map(|&e| bound[e]).sum();
            inbound * inbound + outbound * outbound
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;

    fn line(lambda: f64) -> AugmentedGraph {
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
                net_capacity: 10,
                transport_req: 1.0,
            }],
        };
        let services = vec![ServiceSpec {
            id: 1,
            functions: vec![FunctionSpec::uniform(2, 1.0)],
        }];
        let demands = vec![Demand {
            destination: 2,
            service: 1,
            sources: [(1, lambda)].into(),
        }];
        AugmentedGraph::build(&net, &services, &demands).unwrap()
    }

    fn single_node(c_u: u32, r: f64, lambda: f64, functions: usize) -> AugmentedGraph {
        let net = CloudNetwork {
            nodes: vec![NodeSpec {
                id: 1,
                cloud_unit_cost: 3.0,
                cloud_capacity: c_u,
            }],
            links: vec![],
        };
        let services = vec![ServiceSpec {
            id: 1,
            functions: vec![FunctionSpec::uniform(1, r); functions],
        }];
        let demands = vec![Demand {
            destination: 1,
            service: 1,
            sources: [(1, lambda)].into(),
        }];
        AugmentedGraph::build(&net, &services, &demands).unwrap()
    }

    #[test]
    fn queue_dynamics_examples() {
        assert_eq!(queue_step(5.0, 2.0, 3.0), (4.0, -1.0));
        assert_eq!(momentum_step(7.0, 7.0, 6.0, 7.0, 0.0), 6.0);
        assert_eq!(queue_step(1.0, 0.0, 3.0), (0.0, -1.0));
        assert!((momentum_step(10.0, 8.0, 5.0, 5.0, 0.9) - 11.8).abs() < 1e-12);
    }

    #[test]
    fn init_state_injects_and_pins() {
        let g = line(1.0);
        let st = init_state(&g, true);
        assert_eq!(st.decisions.cost(&g), 0.0);
        assert_eq!(st.decisions.flow(g.source_edge(0), 0), 1.0);
        assert_eq!(st.queues.q(1, 1), 0.0);
        let mut solver = Qnsd::new(&g, QnsdParams::default());
        for _ in 0..3 {
            solver.step();
            assert_eq!(solver.state().decisions.flow(g.source_edge(0), 0), 1.0);
            assert_eq!(solver.state().queues.q(1, 1), 0.0);
        }
    }

    #[test]
    fn transport_picks_first_of_larger_backlog() {
        // Two commodities with backlog differentials 10 and 6 across the link.
        let net = CloudNetwork {
            nodes: (1..=2)
                .map(|id| NodeSpec {
                    id,
                    cloud_unit_cost: 1.0,
                    cloud_capacity: 1,
                })
                .collect(),
            links: vec![LinkSpec {
                from: 1,
                to: 2,
                net_unit_cost: 2.0,
                net_capacity: 5,
                transport_req: 1.0,
            }],
        };
        let services = vec![ServiceSpec {
            id: 1,
            functions: vec![FunctionSpec::uniform(2, 1.0)],
        }];
        let demands = vec![Demand {
            destination: 2,
            service: 1,
            sources: [(1, 1.0)].into(),
        }];
        let g = AugmentedGraph::build(&net, &services, &demands).unwrap();
        let mut q = Queues::new(&g);
        q.virtual_cur[0] = 10.0; // node 1, stage 0
        q.virtual_cur[1] = 6.0; // node 1, stage 1
        let d = transport_decision(&g, &q, 0, 1.0);
        assert_eq!(d.commodity, Some(0));
        assert_eq!((d.resources, d.flow), (5.0, 5.0));

        // Differential exactly V·w: no allocation.
        q.virtual_cur[0] = 2.0;
        q.virtual_cur[1] = 0.0;
        assert_eq!(transport_decision(&g, &q, 0, 1.0), EdgeDecision::IDLE);

        let zero = Queues::new(&g);
        assert_eq!(transport_decision(&g, &zero, 0, 1.0), EdgeDecision::IDLE);
    }

    #[test]
    fn processing_rule_example() {
        let g = single_node(10, 2.0, 1.0, 2);
        let mut q = Queues::new(&g);
        q.virtual_cur[0] = 12.0;
        q.virtual_cur[1] = 2.0;
        let d = processing_decision(&g, &q, 0, 1.0);
        assert_eq!(d.commodity, Some(0));
        assert_eq!((d.resources, d.flow), (10.0, 5.0));
        assert_eq!(g.commodities()[0].next_scaling * d.flow, 5.0);
    }

    #[test]
    fn processing_output_scales() {
        let net = CloudNetwork {
            nodes: vec![NodeSpec {
                id: 1,
                cloud_unit_cost: 3.0,
                cloud_capacity: 10,
            }],
            links: vec![],
        };
        let services = vec![ServiceSpec {
            id: 1,
            functions: vec![FunctionSpec::uniform(1, 2.0).with_scaling(2.0)],
        }];
        let demands = vec![Demand {
            destination: 1,
            service: 1,
            sources: [(1, 1.0)].into(),
        }];
        let g = AugmentedGraph::build(&net, &services, &demands).unwrap();
        let mut solver = Qnsd::new(&g, QnsdParams { v: 1.0, ..Default::default() });
        let mut q = Queues::new(&g);
        q.virtual_cur[0] = 12.0;
        let d = processing_decision(&g, &q, 0, 1.0);
        assert_eq!(d.flow, 5.0);
        assert_eq!(g.commodities()[0].next_scaling * d.flow, 10.0);
        // Drive the solver until it processes and check the coupling.
        for _ in 0..50 {
            solver.step();
            let f = &solver.state().decisions;
            assert_eq!(f.flow(g.compute_out(0), 1), 2.0 * f.flow(g.compute_in(0), 0));
        }
    }

    #[test]
    fn final_stage_alone_is_never_processed() {
        let g = single_node(10, 2.0, 1.0, 1);
        let mut q = Queues::new(&g);
        q.virtual_cur[0] = 0.0;
        q.virtual_cur[1] = 100.0;
        assert_eq!(processing_weight(&g, &q, 0, 1), None);
        assert_eq!(processing_decision(&g, &q, 0, 1.0), EdgeDecision::IDLE);
    }

    #[test]
    fn frame_boundaries_and_means() {
        let resets: Vec<usize> = (1..=9).filter(|&t| FrameAverager::is_frame_start(t)).collect();
        assert_eq!(resets, vec![1, 2, 4, 8]);

        let g = single_node(10, 2.0, 1.0, 1);
        let mut avg = FrameAverager::new(&g, true);
        let mut a = FlowAssignment::zeros(&g);
        for t in 1..=7 {
            a.resources[0] = if t % 2 == 0 { 0.0 } else { 10.0 };
            avg.record(t, &a);
        }
        assert_eq!(avg.t_start, 4);
        assert_eq!(avg.samples(), 4);
        assert_eq!(avg.average().resources[0], 5.0);

        let mut avg = FrameAverager::new(&g, true);
        a.resources[0] = 3.0;
        for t in 1..=6 {
            avg.record(t, &a);
        }
        assert_eq!(avg.average().resources[0], 3.0);
    }

    #[test]
    fn two_node_line_converges_to_cost_two() {
        let g = line(1.0);
        let params = QnsdParams {
            v: 50.0,
            max_iters: 8191,
            ..Default::default()
        };
        let run = run_qnsd(&g, &params);
        assert!((run.solution.cost - 2.0).abs() < 0.05, "{}", run.solution.cost);
        assert!(run.solution.max_violation < 0.01);
    }

    #[test]
    fn b_bound_examples() {
        // compute-in 10/2, compute-out 10/2, source 3, sink 5 + 3.
        let g = single_node(10, 2.0, 3.0, 1);
        assert_eq!(compute_b_bound(&g), (5.0f64 + 3.0).powi(2) + (5.0f64 + 8.0).powi(2));

        let g = single_node(0, 2.0, 3.0, 1);
        let zero_net = CloudNetwork {
            nodes: vec![NodeSpec {
                id: 1,
                cloud_unit_cost: 1.0,
                cloud_capacity: 0,
            }],
            links: vec![],
        };
        let g0 = AugmentedGraph::build(&zero_net, &[], &[]).unwrap();
        assert_eq!(compute_b_bound(&g0), 0.0);
        assert!(compute_b_bound(&g) > 0.0);
    }
}
