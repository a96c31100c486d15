//! Scenario files, bundled experiments, output artifacts and the command
//! line driver.

pub mod cli;
pub mod output;
pub mod scenario;

pub use cli::run_cli;
pub use output::{emit_solution, emit_trace, format_sig9, SolutionDocument};
pub use scenario::{bundled, load_scenario, Scenario, ScenarioError, BUNDLED};
