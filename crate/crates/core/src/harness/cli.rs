use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use super::output::{emit_solution, emit_trace, format_sig9, SolutionDocument};
use super::scenario::load_scenario;
use crate::cqnsd::run_cqnsd;
use crate::model::AugmentedGraph;
use crate::oracle::{
    solve_fractional_lp, solve_integer_bruteforce, solve_integer_exact, IntegerOptimum, LpStatus,
    OracleError,
};
use crate::qnsd::{run_qnsd, QnsdParams, Trace};

/// Resource vectors enumerated before switching to branch and bound.
const BRUTEFORCE_SPACE: f64 = 1e6;
const BRANCH_NODE_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Qnsd,
    Cqnsd,
    Lp,
    Ilp,
}

#[derive(Debug, Parser)]
#[command(name = "nsdp", about = "Cloud network service distribution solvers")]
struct Args {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long)]
    scenario: String,
    #[arg(long, value_enum, default_value = "qnsd")]
    algo: Algo,
    #[arg(long = "V")]
    v: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Violation threshold for convergence.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Iterations between trace samples (1 for full resolution).
    #[arg(long)]
    trace_every: Option<usize>,
}

fn params(args: &Args, defaults: QnsdParams) -> Result<QnsdParams, String> {
    let mut p = defaults;
    if let Some(v) = args.v {
        p.v = v;
    }
    if let Some(t) = args.theta {
        p.theta = t;
    }
    if let Some(n) = args.max_iters {
        p.max_iters = n;
    }
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(format!("tol must be positive, got {tol}"));
        }
        p.convergence.max_violation = tol;
    }
    if let Some(s) = args.trace_every {
        p.trace_every = s;
    }
    p.validate()?;
    Ok(p)
}

fn write_artifacts(args: &Args, trace: Option<&Trace>, doc: &SolutionDocument) -> Result<(), String> {
    if let (Some(path), Some(trace)) = (&args.trace, trace) {
        emit_trace(trace, path).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = &args.solution {
        emit_solution(doc, path).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn run(args: &Args) -> Result<i32, String> {
    if args.trace.is_some() && matches!(args.algo, Algo::Lp | Algo::Ilp) {
        return Err("--trace is only meaningful for iterative algorithms".into());
    }
    let scenario = load_scenario(&args.scenario).map_err(|e| e.to_string())?;
    let graph = scenario.graph().map_err(|e| e.to_string())?;
    let p = params(args, scenario.defaults)?;
    let name = scenario.name.as_str();

    match args.algo {
        Algo::Qnsd => {
            let run = run_qnsd(&graph, &p);
            let s = &run.solution;
            println!(
                "cost {} max_violation {} iterations {} converged {}",
                format_sig9(s.cost),
                format_sig9(s.max_violation),
                s.iterations_used,
                run.converged
            );
            let doc = SolutionDocument::fractional(
                name,
                "qnsd",
                &graph,
                &s.average,
                s.iterations_used,
                run.converged,
            );
            write_artifacts(args, Some(&run.trace), &doc)?;
            Ok(if run.converged { 0 } else { 2 })
        }
        Algo::Cqnsd => {
            let run = run_cqnsd(&graph, &p);
            let s = &run.solution;
            println!(
                "cost {} feasible {} iterations {} converged {}",
                format_sig9(s.cost),
                s.feasible,
                s.iterations_used,
                s.converged
            );
            let doc = SolutionDocument::fractional(
                name,
                "cqnsd",
                &graph,
                &s.average.average,
                s.iterations_used,
                s.converged,
            )
            .with_integer(&graph, s);
            write_artifacts(args, Some(&run.trace), &doc)?;
            Ok(if s.converged && s.feasible { 0 } else { 2 })
        }
        Algo::Lp => {
            let lp = solve_fractional_lp(&graph);
            match (lp.status, lp.assignment) {
                (LpStatus::Optimal, Some(a)) => {
                    println!("optimum {}", format_sig9(lp.cost));
                    let doc = SolutionDocument::fractional(name, "lp", &graph, &a, 0, true);
                    write_artifacts(args, None, &doc)?;
                    Ok(0)
                }
                (status, _) => {
                    println!("status {status:?}");
                    Ok(2)
                }
            }
        }
        Algo::Ilp => match integer_optimum(&graph)? {
            Some(opt) => {
                println!("optimum {}", format_sig9(opt.cost));
                let doc = SolutionDocument::fractional(name, "ilp", &graph, &opt.assignment, 0, true);
                write_artifacts(args, None, &doc)?;
                Ok(0)
            }
            None => {
                println!("status Infeasible");
                Ok(2)
            }
        },
    }
}

fn integer_optimum(
    graph: &AugmentedGraph,
) -> Result<Option<IntegerOptimum>, String> {
    match solve_integer_bruteforce(graph, u32::MAX, BRUTEFORCE_SPACE) {
        Err(OracleError::InstanceTooLarge { .. }) => {
            solve_integer_exact(graph, BRANCH_NODE_LIMIT).map_err(|e| e.to_string())
        }
        other => other.map_err(|e| e.to_string()),
    }
}

/// Parses `args` (program name first), runs the chosen algorithm and
/// returns the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
