mod common;

use nsdp::harness::scenario::parse_scenario;
use nsdp::harness::{load_scenario, Scenario, ScenarioError, BUNDLED};
use nsdp::qnsd::QnsdParams;
use proptest::prelude::*;

fn scenario(seed: u64, v: f64, theta: f64, max_iters: usize, stride: usize, tol: f64) -> Scenario {
    let inst = common::random_instance(seed);
    let mut defaults = QnsdParams {
        v,
        theta,
        max_iters,
        trace_every: stride,
        ..QnsdParams::default()
    };
    defaults.convergence.max_violation = tol;
    Scenario {
        name: format!("random-{seed}"),
        network: inst.network,
        services: inst.services,
        demands: inst.demands,
        defaults,
    }
}

proptest! {
    #[test]
    fn emit_then_load_is_identity(
        seed in any::<u64>(),
        v in 0.1f64..1e4,
        theta in 0.0f64..0.99,
        max_iters in 0usize..100_000,
        stride in 1usize..50,
        tol in 1e-6f64..1.0,
    ) {
        let s = scenario(seed, v, theta, max_iters, stride, tol);
        let text = s.to_toml();
        let back = parse_scenario(&text, "roundtrip").unwrap();
        prop_assert_eq!(back, s);
    }
}

#[test]
fn bundled_scenarios_survive_a_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, _) in BUNDLED {
        let s = load_scenario(name).unwrap();
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, s.to_toml()).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }
}

#[test]
fn malformed_file_reports_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "name = \"x\"\n[[nodes]\nid = 1\n").unwrap();
    match load_scenario(&path) {
        Err(ScenarioError::Parse { message, .. }) => assert!(message.contains("line")),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(
        load_scenario("/nonexistent/scenario.toml"),
        Err(ScenarioError::Io { .. })
    ));
}
