//! Scenario files.
//!
//! Scenarios are TOML documents whose tables mirror the model types:
//!
//! ```toml
//! name = "line"
//!
//! [defaults]
//! V = 40.0
//! theta = 0.0
//! max_iters = 4000
//! trace_every = 10
//!
//! [[nodes]]
//! id = 1
//! cloud_unit_cost = 1.0
//! cloud_capacity = 10
//!
//! [[links]]
//! from = 1
//! to = 2
//! net_unit_cost = 1.0
//! net_capacity = 10
//! transport_req = 1.0
//!
//! [[services]]
//! id = 1
//! [[services.functions]]
//! uniform_req = 1.0          # or proc_req = [[1, 1.0], [2, 2.5]]
//! availability = [1, 2]      # optional
//! flow_scaling = 1.0         # optional
//!
//! [[demands]]
//! destination = 2
//! service = 1
//! sources = [[1, 1.0]]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_inputs, AugmentedGraph, CloudNetwork, Demand, FunctionSpec, LinkSpec, ModelError,
    NodeId, NodeSpec, ServiceId, ServiceSpec,
};
use crate::qnsd::QnsdParams;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}: parse error: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: {field}: {message}")]
    Field {
        origin: String,
        field: String,
        message: String,
    },
    #[error("{origin}: invalid scenario: {source}")]
    Invalid { origin: String, source: ModelError },
    #[error("unknown bundled scenario '{0}'")]
    UnknownBundled(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub network: CloudNetwork,
    pub services: Vec<ServiceSpec>,
    pub demands: Vec<Demand>,
    pub defaults: QnsdParams,
}

impl Scenario {
    pub fn graph(&self) -> Result<AugmentedGraph, ModelError> {
        AugmentedGraph::build(&self.network, &self.services, &self.demands)
    }

    /// Number of `(source, destination)` pairs over all demands.
    pub fn source_destination_pairs(&self) -> usize {
        self.demands.iter().map(|d| d.sources.len()).sum()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&ScenarioFile::from(self)).expect("scenario serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DefaultsFile {
    #[serde(rename = "V")]
    v: f64,
    theta: f64,
    max_iters: usize,
    #[serde(default = "default_stride")]
    trace_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

fn default_stride() -> usize {
    10
}

impl Default for DefaultsFile {
    fn default() -> Self {
        let p = QnsdParams::default();
        DefaultsFile {
            v: p.v,
            theta: p.theta,
            max_iters: p.max_iters,
            trace_every: p.trace_every,
            tol: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    id: NodeId,
    cloud_unit_cost: f64,
    cloud_capacity: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkFile {
    from: NodeId,
    to: NodeId,
    net_unit_cost: f64,
    net_capacity: u32,
    transport_req: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uniform_req: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    proc_req: Option<Vec<(NodeId, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    availability: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flow_scaling: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceFile {
    id: ServiceId,
    functions: Vec<FunctionFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandFile {
    destination: NodeId,
    service: ServiceId,
    sources: Vec<(NodeId, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    defaults: DefaultsFile,
    nodes: Vec<NodeFile>,
    #[serde(default)]
    links: Vec<LinkFile>,
    #[serde(default)]
    services: Vec<ServiceFile>,
    #[serde(default)]
    demands: Vec<DemandFile>,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            name: s.name.clone(),
            defaults: DefaultsFile {
                v: s.defaults.v,
                theta: s.defaults.theta,
                max_iters: s.defaults.max_iters,
                trace_every: s.defaults.trace_every,
                tol: Some(s.defaults.convergence.max_violation),
            },
            nodes: s
                .network
                .nodes
                .iter()
                .map(|n| NodeFile {
                    id: n.id,
                    cloud_unit_cost: n.cloud_unit_cost,
                    cloud_capacity: n.cloud_capacity,
                })
                .collect(),
            links: s
                .network
                .links
                .iter()
                .map(|l| LinkFile {
                    from: l.from,
                    to: l.to,
                    net_unit_cost: l.net_unit_cost,
                    net_capacity: l.net_capacity,
                    transport_req: l.transport_req,
                })
                .collect(),
            services: s
                .services
                .iter()
                .map(|svc| ServiceFile {
                    id: svc.id,
                    functions: svc
                        .functions
                        .iter()
                        .map(|f| FunctionFile {
                            uniform_req: None,
                            proc_req: Some(f.proc_req.iter().map(|(&u, &r)| (u, r)).collect()),
                            availability: Some(f.availability.iter().copied().collect()),
                            flow_scaling: Some(f.flow_scaling),
                        })
                        .collect(),
                })
                .collect(),
            demands: s
                .demands
                .iter()
                .map(|d| DemandFile {
                    destination: d.destination,
                    service: d.service,
                    sources: d.sources.iter().map(|(&u, &l)| (u, l)).collect(),
                })
                .collect(),
        }
    }
}

fn convert(file: ScenarioFile, origin: &str) -> Result<Scenario, ScenarioError> {
    let field = |field: String, message: String| ScenarioError::Field {
        origin: origin.to_string(),
        field,
        message,
    };
    let network = CloudNetwork {
        nodes: file
            .nodes
            .iter()
            .map(|n| NodeSpec {
                id: n.id,
                cloud_unit_cost: n.cloud_unit_cost,
                cloud_capacity: n.cloud_capacity,
            })
            .collect(),
        links: file
            .links
            .iter()
            .map(|l| LinkSpec {
                from: l.from,
                to: l.to,
                net_unit_cost: l.net_unit_cost,
                net_capacity: l.net_capacity,
                transport_req: l.transport_req,
            })
            .collect(),
    };
    let all_nodes: BTreeSet<NodeId> = network.nodes.iter().map(|n| n.id).collect();

    let mut services = Vec::new();
    for (si, svc) in file.services.iter().enumerate() {
        let mut functions = Vec::new();
        for (fi, f) in svc.functions.iter().enumerate() {
            let path = format!("services[{si}].functions[{fi}]");
            let availability: Option<BTreeSet<NodeId>> =
                f.availability.as_ref().map(|a| a.iter().copied().collect());
            let proc_req: BTreeMap<NodeId, f64> = match (&f.uniform_req, &f.proc_req) {
                (Some(r), None) => availability
                    .as_ref()
                    .unwrap_or(&all_nodes)
                    .iter()
                    .map(|&u| (u, *r))
                    .collect(),
                (None, Some(list)) => {
                    let map: BTreeMap<NodeId, f64> = list.iter().copied().collect();
                    if map.len() != list.len() {
                        return Err(field(path, "proc_req lists a node twice".into()));
                    }
                    map
                }
                _ => {
                    return Err(field(
                        path,
                        "exactly one of uniform_req and proc_req is required".into(),
                    ))
                }
            };
            let availability = availability.unwrap_or_else(|| proc_req.keys().copied().collect());
            functions.push(FunctionSpec {
                proc_req,
                availability,
                flow_scaling: f.flow_scaling.unwrap_or(1.0),
            });
        }
        services.push(ServiceSpec {
            id: svc.id,
            functions,
        });
    }

    let mut demands = Vec::new();
    for (di, d) in file.demands.iter().enumerate() {
        let sources: BTreeMap<NodeId, f64> = d.sources.iter().copied().collect();
        if sources.len() != d.sources.len() {
            return Err(field(
                format!("demands[{di}].sources"),
                "source node listed twice".into(),
            ));
        }
        demands.push(Demand {
            destination: d.destination,
            service: d.service,
            sources,
        });
    }

    validate_inputs(&network, &services, &demands).map_err(|source| ScenarioError::Invalid {
        origin: origin.to_string(),
        source,
    })?;

    let mut defaults = QnsdParams {
        v: file.defaults.v,
        theta: file.defaults.theta,
        max_iters: file.defaults.max_iters,
        trace_every: file.defaults.trace_every,
        ..QnsdParams::default()
    };
    if let Some(tol) = file.defaults.tol {
        defaults.convergence.max_violation = tol;
    }
    defaults
        .validate()
        .map_err(|message| field("defaults".into(), message))?;

    Ok(Scenario {
        name: file.name,
        network,
        services,
        demands,
        defaults,
    })
}

/// Parses scenario text; `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    convert(file, origin)
}

/// Bundled scenarios, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    (
        "abilene-fractional",
        include_str!("../../scenarios/abilene-fractional.toml"),
    ),
    (
        "abilene-integer",
        include_str!("../../scenarios/abilene-integer.toml"),
    ),
    (
        "abilene-integer-half",
        include_str!("../../scenarios/abilene-integer-half.toml"),
    ),
    ("line-2node", include_str!("../../scenarios/line-2node.toml")),
];

pub fn bundled(name: &str) -> Result<Scenario, ScenarioError> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ScenarioError::UnknownBundled(name.to_string()))?;
    parse_scenario(text, name)
}

/// Loads a scenario from a file path, or a bundled scenario by name when
/// no such file exists.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    if !path.exists() {
        if let Some(name) = path.to_str() {
            if BUNDLED.iter().any(|(n, _)| *n == name) {
                return bundled(name);
            }
        }
    }
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_load() {
        for (name, _) in BUNDLED {
            let s = bundled(name).unwrap();
            assert_eq!(&s.name, name);
            s.graph().unwrap();
        }
    }

    #[test]
    fn malformed_text_is_a_parse_error() {
        let err = parse_scenario("name = \n[[nodes]", "bad.toml").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { .. }), "{err}");
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn validation_errors_name_the_invariant() {
        let text = r#"
            name = "bad"
            [[nodes]]
            id = 1
            cloud_unit_cost = 1.0
            cloud_capacity = 1
            [[links]]
            from = 1
            to = 1
            net_unit_cost = 1.0
            net_capacity = 1
            transport_req = 1.0
        "#;
        let err = parse_scenario(text, "bad").unwrap_err();
        assert!(err.to_string().contains("self-loop"), "{err}");
    }

    #[test]
    fn function_needs_exactly_one_requirement_form() {
        let text = r#"
            name = "bad"
            [[nodes]]
            id = 1
            cloud_unit_cost = 1.0
            cloud_capacity = 1
            [[services]]
            id = 1
            [[services.functions]]
            flow_scaling = 1.0
        "#;
        let err = parse_scenario(text, "bad").unwrap_err();
        assert!(matches!(err, ScenarioError::Field { .. }), "{err}");
    }

    #[test]
    fn unknown_bundled_name() {
        assert!(matches!(
            load_scenario("no-such-scenario"),
            Err(ScenarioError::Io { .. })
        ));
        assert!(matches!(bundled("nope"), Err(ScenarioError::UnknownBundled(_))));
    }
}
