//! Reference networks shipped with the crate.
//!
//! * `butterfly`: single source `s`, sinks `t1`, `t2`, both demanding source 1.
//! * `bottleneck`: `s1 -> v`, `s2 -> v`, `v -> t`; `t` demands source 1 only.
//! * `crossing`: two sources and two sinks sharing one middle edge `a -> b`,
//!   each sink also reached directly by the source it does *not* demand.

use crate::network::{EdgeSpec, Network, NetworkSpec, RateVector};

pub const BUTTERFLY_JSON: &str = include_str!("../fixtures/butterfly.json");
pub const BOTTLENECK_JSON: &str = include_str!("../fixtures/bottleneck.json");
pub const CROSSING_JSON: &str = include_str!("../fixtures/crossing.json");

fn load(json: &str) -> Network {
    NetworkSpec::from_json(json)
        .expect("fixture parses")
        .validate()
        .expect("fixture is valid")
}

pub fn butterfly() -> Network {
    load(BUTTERFLY_JSON)
}

pub fn bottleneck() -> Network {
    load(BOTTLENECK_JSON)
}

pub fn crossing() -> Network {
    load(CROSSING_JSON)
}

/// The three fixtures with their reference rates: (2), (1,1), (1,1).
pub fn all_with_rates() -> Vec<(Network, RateVector)> {
    vec![
        (butterfly(), RateVector(vec![2])),
        (bottleneck(), RateVector(vec![1, 1])),
        (crossing(), RateVector(vec![1, 1])),
    ]
}

/// A directed path `n0 -> n1 -> ... -> n{hops}` with source `n0` and sink
/// at the end.
pub fn path(hops: usize) -> Network {
    assert!(hops >= 1);
    let nodes: Vec<String> = (0..=hops).map(|i| format!("n{i}")).collect();
    NetworkSpec {
        name: Some(format!("path{hops}")),
        edges: (0..hops)
            .map(|i| EdgeSpec {
                id: format!("e{i}"),
                tail: nodes[i].clone(),
                head: nodes[i + 1].clone(),
            })
            .collect(),
        sources: vec![nodes[0].clone()],
        sinks: vec![nodes[hops].clone()],
        demands: [(nodes[hops].clone(), vec![1])].into_iter().collect(),
        nodes,
    }
    .validate()
    .expect("path is valid")
}
