//! Seeded generator of small random instances (network plus rate).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::network::{EdgeSpec, Network, NetworkSpec, RateVector};

#[derive(Debug, Clone)]
pub struct InstanceParams {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_sources: usize,
    pub max_sinks: usize,
    pub max_rate: u32,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            max_nodes: 10,
            max_edges: 20,
            max_sources: 3,
            max_sinks: 3,
            max_rate: 2,
        }
    }
}

/// Random DAG (edges go from lower to higher hidden rank, parallel edges
/// allowed) with distinct sources and sinks, nonempty demands and a rate
/// vector with entries in `0..=max_rate`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, p: &InstanceParams) -> (Network, RateVector) {
    let n = rng.gen_range(3..=p.max_nodes.max(3));
    let mut names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    names.shuffle(rng);
    // names[k] has rank k
    let edge_count = rng.gen_range(1..=p.max_edges.max(1));
    let edges = (0..edge_count)
        .map(|k| {
            let a = rng.gen_range(0..n - 1);
            let b = rng.gen_range(a + 1..n);
            EdgeSpec {
                id: format!("e{k}"),
                tail: names[a].clone(),
                head: names[b].clone(),
            }
        })
        .collect();
    let m = rng.gen_range(1..=p.max_sources.min(n - 1).max(1));
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(rng);
    let sources: Vec<String> = pool[..m].iter().map(|&i| names[i].clone()).collect();
    let sink_count = rng.gen_range(1..=p.max_sinks.min(n - m).max(1));
    let sinks: Vec<String> = pool[m..m + sink_count]
        .iter()
        .map(|&i| names[i].clone())
        .collect();
    let demands = sinks
        .iter()
        .map(|t| {
            let mask = rng.gen_range(1..(1u32 << m));
            (
                t.clone(),
                (0..m)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| i + 1)
                    .collect(),
            )
        })
        .collect();
    let rate = RateVector((0..m).map(|_| rng.gen_range(0..=p.max_rate)).collect());
    let spec = NetworkSpec {
        name: None,
        nodes: names,
        edges,
        sources,
        sinks,
        demands,
    };
    let net = spec.validate().expect("generator emits valid networks");
    (net, rate)
}
