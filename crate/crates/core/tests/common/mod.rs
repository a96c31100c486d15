#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nsdp::model::{CloudNetwork, Demand, FunctionSpec, LinkSpec, NodeSpec, ServiceSpec};
use nsdp::AugmentedGraph;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub struct Instance {
    pub network: CloudNetwork,
    pub services: Vec<ServiceSpec>,
    pub demands: Vec<Demand>,
}

impl Instance {
    pub fn graph(&self) -> AugmentedGraph {
        AugmentedGraph::build(&self.network, &self.services, &self.demands).expect("valid instance")
    }
}

fn bidirectional(links: &mut Vec<LinkSpec>, a: u32, b: u32, cost: f64, cap: u32, req: f64) {
    for (from, to) in [(a, b), (b, a)] {
        links.push(LinkSpec {
            from,
            to,
            net_unit_cost: cost,
            net_capacity: cap,
            transport_req: req,
        });
    }
}

/// Connected network of at most 5 nodes with up to 2 services and random
/// requirements, availability, scaling and demands.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let n: u32 = rng.gen_range(2..=5);
    let nodes = (1..=n)
        .map(|id| NodeSpec {
            id,
            cloud_unit_cost: rng.gen_range(1..=4) as f64,
            cloud_capacity: rng.gen_range(0..=10),
        })
        .collect();
    let mut links = Vec::new();
    for v in 2..=n {
        let u = rng.gen_range(1..v);
        let (cost, cap, req) = (rng.gen_range(1..=3) as f64, rng.gen_range(1..=10), rng.gen_range(0.5..2.0));
        bidirectional(&mut links, u, v, cost, cap, req);
    }
    for _ in 0..rng.gen_range(0..3) {
        let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        if a != b && !links.iter().any(|l: &LinkSpec| l.from == a && l.to == b) {
            links.push(LinkSpec {
                from: a,
                to: b,
                net_unit_cost: rng.gen_range(1..=3) as f64,
                net_capacity: rng.gen_range(1..=10),
                transport_req: rng.gen_range(0.5..2.0),
            });
        }
    }
    let services: Vec<ServiceSpec> = (1..=rng.gen_range(1..=2))
        .map(|id| ServiceSpec {
            id,
            functions: (0..rng.gen_range(1..=2))
                .map(|_| {
                    let mut f = FunctionSpec {
                        proc_req: (1..=n).map(|u| (u, rng.gen_range(0.5..3.0))).collect(),
                        availability: BTreeSet::new(),
                        flow_scaling: if rng.gen_bool(0.3) { rng.gen_range(0.5..2.0) } else { 1.0 },
                    };
                    f.availability = (1..=n).filter(|_| rng.gen_bool(0.7)).collect();
                    if f.availability.is_empty() {
                        f.availability.insert(rng.gen_range(1..=n));
                    }
                    f
                })
                .collect(),
        })
        .collect();
    let mut demands = Vec::new();
    for s in &services {
        for _ in 0..rng.gen_range(1..=2) {
            let destination = rng.gen_range(1..=n);
            if demands
                .iter()
                .any(|d: &Demand| d.destination == destination && d.service == s.id)
            {
                continue;
            }
            let sources: BTreeMap<u32, f64> = (0..rng.gen_range(1..=2))
                .map(|_| (rng.gen_range(1..=n), rng.gen_range(0.1..1.5)))
                .collect();
            demands.push(Demand {
                destination,
                service: s.id,
                sources,
            });
        }
    }
    Instance {
        network: CloudNetwork { nodes, links },
        services,
        demands,
    }
}

/// Line or triangle of 2 or 3 nodes, one service of 1 or 2 functions,
/// one or two sources feeding the last node. Costs are integral.
pub fn tiny_instance(seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let n: u32 = rng.gen_range(2..=3);
    let nodes = (1..=n)
        .map(|id| NodeSpec {
            id,
            cloud_unit_cost: rng.gen_range(1..=4) as f64,
            cloud_capacity: rng.gen_range(2..=6),
        })
        .collect();
    let mut links = Vec::new();
    for v in 2..=n {
        bidirectional(&mut links, v - 1, v, rng.gen_range(1..=3) as f64, 4, 1.0);
    }
    if n == 3 && rng.gen_bool(0.5) {
        bidirectional(&mut links, 1, 3, rng.gen_range(1..=3) as f64, 4, 1.0);
    }
    let functions = (0..rng.gen_range(1..=2))
        .map(|_| FunctionSpec::uniform(n as usize, [0.5, 1.0, 2.0][rng.gen_range(0..3)]))
        .collect();
    let mut sources = BTreeMap::new();
    sources.insert(1, [0.5, 1.0][rng.gen_range(0..2)]);
    if n == 3 && rng.gen_bool(0.5) {
        sources.insert(2, 0.5);
    }
    Instance {
        network: CloudNetwork { nodes, links },
        services: vec![ServiceSpec { id: 1, functions }],
        demands: vec![Demand {
            destination: n,
            service: 1,
            sources,
        }],
    }
}
