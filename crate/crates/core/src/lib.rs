//! Solvers for NFV service distribution: placing service function chains,
//! routing their flows and allocating cloud and network resources at
//! minimum cost.
//!
//! - [`model`]: networks, services, demands and the cloud-augmented graph.
//! - [`qnsd`]: queue-length based iterative solver for fractional resources.
//! - [`cqnsd`]: its constrained variant for integer resources.
//! - [`oracle`]: constraint checks, exact LP and exact integer search.
//! - [`harness`]: scenario files, bundled experiments and the CLI driver.

pub mod cqnsd;
pub mod flow;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod qnsd;

pub use flow::FlowAssignment;
pub use model::{AugmentedGraph, CloudNetwork, CommodityId, Demand, FunctionSpec, ServiceSpec};
