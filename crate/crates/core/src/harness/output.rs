//! Trace CSV and solution documents.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::cqnsd::IntegerSolution;
use crate::flow::FlowAssignment;
use crate::model::AugmentedGraph;
use crate::oracle::FeasibilityReport;
use crate::qnsd::Trace;

pub const TRACE_HEADER: &str = "iteration,frame,cost_avg,max_violation";

/// Decimal notation with 9 significant digits.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999999999 -> 10.00000000).
    let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
    let leading_zeros = s
        .trim_start_matches('-')
        .chars()
        .take_while(|&c| c == '0' || c == '.')
        .filter(|&c| c == '0')
        .count();
    if digits - leading_zeros > 9 && decimals > 0 {
        let decimals = decimals - 1;
        format!("{x:.decimals$}")
    } else {
        s
    }
}

pub fn write_trace(trace: &Trace, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for row in &trace.rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.iteration,
            row.frame,
            format_sig9(row.cost_avg),
            format_sig9(row.max_violation)
        )?;
    }
    Ok(())
}

pub fn emit_trace(trace: &Trace, path: impl AsRef<Path>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trace(trace, &mut w)?;
    w.flush()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FlowEntry {
    pub edge: String,
    pub commodity: String,
    pub flow: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ResourceEntry {
    pub edge: String,
    pub units: f64,
}

/// Cloud resource units spent on one function at one node.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ProcessingEntry {
    pub node: u32,
    pub service: u32,
    pub function: u32,
    pub units: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FeasibilitySummary {
    pub max_conservation_violation: f64,
    pub max_abs_imbalance: f64,
    pub chaining_ok: bool,
    pub capacity_ok: bool,
    pub source_ok: bool,
    pub sink_ok: bool,
    pub admissible_ok: bool,
}

impl From<&FeasibilityReport> for FeasibilitySummary {
    fn from(r: &FeasibilityReport) -> Self {
        FeasibilitySummary {
            max_conservation_violation: r.max_conservation_violation,
            max_abs_imbalance: r.max_abs_imbalance,
            chaining_ok: r.chaining_ok,
            capacity_ok: r.capacity_ok,
            source_ok: r.source_ok,
            sink_ok: r.sink_ok,
            admissible_ok: r.admissible_ok,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IntegerSection {
    pub cost: f64,
    pub feasible: bool,
    pub converged: bool,
    pub resources: Vec<ResourceEntry>,
    pub flows: Vec<FlowEntry>,
    pub processing_allocation: Vec<ProcessingEntry>,
    pub feasibility: FeasibilitySummary,
}

/// Structured solution file.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SolutionDocument {
    pub scenario: String,
    pub algorithm: String,
    pub cost: f64,
    pub max_violation: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// Nonzero flows by edge and commodity.
    pub flows: Vec<FlowEntry>,
    /// Nonzero resources by edge.
    pub resources: Vec<ResourceEntry>,
    pub processing_allocation: Vec<ProcessingEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer: Option<IntegerSection>,
}

pub fn flow_entries(graph: &AugmentedGraph, a: &FlowAssignment) -> Vec<FlowEntry> {
    let mut out = Vec::new();
    for e in 0..graph.edge_count() {
        for (c, info) in graph.commodities().iter().enumerate() {
            let f = a.flow(e, c);
            if f != 0.0 {
                out.push(FlowEntry {
                    edge: graph.describe_edge(e),
                    commodity: info.id.to_string(),
                    flow: f,
                });
            }
        }
    }
    out
}

pub fn resource_entries(graph: &AugmentedGraph, a: &FlowAssignment) -> Vec<ResourceEntry> {
    a.resources
        .iter()
        .enumerate()
        .filter(|(_, &y)| y != 0.0)
        .map(|(e, &y)| ResourceEntry {
            edge: graph.describe_edge(e),
            units: y,
        })
        .collect()
}

/// Cloud units used by each `(node, function)`: processed flow times the
/// function's requirement at that node.
pub fn processing_allocation(graph: &AugmentedGraph, a: &FlowAssignment) -> Vec<ProcessingEntry> {
    let mut out: Vec<ProcessingEntry> = Vec::new();
    for u in 0..graph.physical_nodes() {
        let e = graph.compute_in(u);
        for (c, info) in graph.commodities().iter().enumerate() {
            let Some(r) = graph.req(e, c) else { continue };
            let units = a.flow(e, c) * r;
            if units == 0.0 {
                continue;
            }
            let (node, service, function) = (u as u32 + 1, info.id.service, info.id.stage + 1);
            match out
                .iter_mut()
                .find(|p| p.node == node && p.service == service && p.function == function)
            {
                Some(p) => p.units += units,
                None => out.push(ProcessingEntry {
                    node,
                    service,
                    function,
                    units,
                }),
            }
        }
    }
    out
}

impl SolutionDocument {
    pub fn fractional(
        scenario: &str,
        algorithm: &str,
        graph: &AugmentedGraph,
        average: &FlowAssignment,
        iterations_used: usize,
        converged: bool,
    ) -> Self {
        SolutionDocument {
            scenario: scenario.to_string(),
            algorithm: algorithm.to_string(),
            cost: average.cost(graph),
            max_violation: average.max_violation(graph),
            iterations_used,
            converged,
            flows: flow_entries(graph, average),
            resources: resource_entries(graph, average),
            processing_allocation: processing_allocation(graph, average),
            integer: None,
        }
    }

    pub fn with_integer(mut self, graph: &AugmentedGraph, sol: &IntegerSolution) -> Self {
        self.integer = Some(IntegerSection {
            cost: sol.cost,
            feasible: sol.feasible,
            converged: sol.converged,
            resources: resource_entries(graph, &sol.assignment),
            flows: flow_entries(graph, &sol.assignment),
            processing_allocation: processing_allocation(graph, &sol.assignment),
            feasibility: (&sol.report).into(),
        });
        self
    }
}

pub fn emit_solution(doc: &SolutionDocument, path: impl AsRef<Path>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnsd::TraceRow;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(149.0), "149.000000");
        assert_eq!(format_sig9(0.0123456789), "0.0123456789");
        assert_eq!(format_sig9(1.0), "1.00000000");
        assert_eq!(format_sig9(0.0), "0.00000000");
        assert_eq!(format_sig9(9.9999999999), "10.0000000");
        assert_eq!(format_sig9(-2.5), "-2.50000000");
        assert_eq!(format_sig9(1234567890.0), "1234567890");
    }

    #[test]
    fn trace_rows_and_header() {
        let mut buf = Vec::new();
        write_trace(&Trace::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{TRACE_HEADER}\n"));

        let trace = Trace {
            rows: (1..=3)
                .map(|t| TraceRow {
                    iteration: t,
                    frame: t as u32,
                    cost_avg: 2.0,
                    max_violation: 0.5,
                })
                .collect(),
        };
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(1), Some("1,1,2.00000000,0.500000000"));
    }
}
