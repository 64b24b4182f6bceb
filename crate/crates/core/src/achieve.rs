//! Achievability of a rate vector by random linear coding, decided by a pair
//! of maxflow computations per sink, and enumeration of the achievable region.
//!
//! For sink `t` with demand set `D`:
//!
//! * `d_1 = sum of r_i over i in D`
//! * `d_2 = maxflow(virtual sources not in D, t)`
//! * `total = maxflow(all virtual sources, t)`
//!
//! The rate is achievable iff `d_1 + d_2 == total` at every sink. Both flows
//! are taken on the augmented network, so the rate enters through the number
//! of virtual edges. `d_1 + d_2 >= total` always holds.

use std::fmt::Write as _;

use thiserror::Error;

use crate::maxflow::{maxflow_value, FlowError};
use crate::network::{Network, NodeId, RateError, RateVector};

/// Upper limit on the number of rate vectors `enumerate_region` will visit.
pub const REGION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AchieveError {
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("sink {sink}: d_1 + d_2 = {sum} is below maxflow {total}")]
    FlowInequality {
        sink: String,
        sum: usize,
        total: usize,
    },
    #[error("region with bound {bound} over {sources} sources has more than {REGION_LIMIT} rate vectors")]
    RegionTooLarge { bound: u32, sources: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkCondition {
    pub sink: NodeId,
    pub sink_name: String,
    pub d1: usize,
    pub d2: usize,
    pub total: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateVerdict {
    pub rate: RateVector,
    pub conditions: Vec<SinkCondition>,
    pub achievable: bool,
}

impl RateVerdict {
    /// Plain-text table: sink, d_1, d_2, total, holds.
    pub fn table(&self) -> String {
        let width = self
            .conditions
            .iter()
            .map(|c| c.sink_name.len())
            .max()
            .unwrap_or(0)
            .max(4);
        let mut out = format!(
            "{:<width$}  {:>4}  {:>4}  {:>5}  holds\n",
            "sink", "d_1", "d_2", "total"
        );
        for c in &self.conditions {
            let holds = if c.holds {
                "yes".to_string()
            } else {
                format!("no ({} ≠ {})", c.d1 + c.d2, c.total)
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>4}  {:>4}  {:>5}  {}",
                c.sink_name, c.d1, c.d2, c.total, holds
            );
        }
        let _ = writeln!(
            out,
            "rate {} is {}",
            self.rate,
            if self.achievable {
                "achievable"
            } else {
                "not achievable"
            }
        );
        out
    }
}

pub fn check_rate(net: &Network, rate: &RateVector) -> Result<RateVerdict, AchieveError> {
    let aug = net.augment(rate)?;
    let all = aug.virtual_sources();
    let mut conditions = Vec::with_capacity(aug.sinks().len());
    for (pos, &t) in aug.sinks().iter().enumerate() {
        let dem = aug.demand(pos);
        let d1: usize = dem.iter().map(|&i| rate.get(i) as usize).sum();
        let others: Vec<NodeId> = (0..aug.source_count())
            .filter(|i| !dem.contains(i))
            .map(|i| aug.virtual_source(i))
            .collect();
        let d2 = maxflow_value(&aug, &others, t)?;
        let total = maxflow_value(&aug, &all, t)?;
        if d1 + d2 < total {
            return Err(AchieveError::FlowInequality {
                sink: aug.node_name(t).to_string(),
                sum: d1 + d2,
                total,
            });
        }
        conditions.push(SinkCondition {
            sink: t,
            sink_name: aug.node_name(t).to_string(),
            d1,
            d2,
            total,
            holds: d1 + d2 == total,
        });
    }
    let achievable = conditions.iter().all(|c| c.holds);
    Ok(RateVerdict {
        rate: rate.clone(),
        conditions,
        achievable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    /// Skip the flow computation for any vector with a non-achievable
    /// immediate predecessor.
    Monotone,
    /// Evaluate every vector.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionReport {
    pub bound: u32,
    /// Achievable vectors in `[0, bound]^m`, lexicographically sorted.
    pub achievable: Vec<RateVector>,
    /// Achievable vectors with no achievable `r + e_i` inside the box.
    pub frontier: Vec<RateVector>,
}

impl RegionReport {
    pub fn contains(&self, rate: &RateVector) -> bool {
        self.achievable.binary_search(rate).is_ok()
    }

    /// First (achievable, smaller, not achievable) triple found, if any.
    pub fn downward_closure_violation(&self) -> Option<(RateVector, RateVector)> {
        for r in &self.achievable {
            for i in 0..r.len() {
                if r.get(i) > 0 {
                    let mut lower = r.clone();
                    lower.0[i] -= 1;
                    if !self.contains(&lower) {
                        return Some((r.clone(), lower));
                    }
                }
            }
        }
        None
    }
}

fn region_size(bound: u32, m: usize) -> Option<u64> {
    (0..m).try_fold(1u64, |acc, _| acc.checked_mul(bound as u64 + 1))
}

pub fn enumerate_region(net: &Network, bound: u32) -> Result<RegionReport, AchieveError> {
    enumerate_region_with(net, bound, Pruning::Monotone)
}

/// Visits `[0, bound]^m` in lexicographic order.
pub fn enumerate_region_with(
    net: &Network,
    bound: u32,
    pruning: Pruning,
) -> Result<RegionReport, AchieveError> {
    let m = net.source_count();
    let size = match region_size(bound, m) {
        Some(s) if s <= REGION_LIMIT => s as usize,
        _ => return Err(AchieveError::RegionTooLarge { bound, sources: m }),
    };
    let radix = bound as usize + 1;
    // mixed-radix index with the first source most significant, so index order
    // is lexicographic order and every predecessor has a smaller index
    let stride: Vec<usize> = (0..m).map(|i| radix.pow((m - 1 - i) as u32)).collect();
    let decode = |mut idx: usize| -> RateVector {
        RateVector(
            stride
                .iter()
                .map(|&s| {
                    let d = idx / s;
                    idx %= s;
                    d as u32
                })
                .collect(),
        )
    };
    let mut ok = vec![false; size];
    for idx in 0..size {
        let rate = decode(idx);
        let pruned =
            pruning == Pruning::Monotone && (0..m).any(|i| rate.get(i) > 0 && !ok[idx - stride[i]]);
        ok[idx] = !pruned && check_rate(net, &rate)?.achievable;
    }
    let achievable: Vec<RateVector> = (0..size).filter(|&i| ok[i]).map(decode).collect();
    let frontier = (0..size)
        .filter(|&idx| {
            ok[idx] && {
                let rate = decode(idx);
                (0..m).all(|i| rate.get(i) == bound || !ok[idx + stride[i]])
            }
        })
        .map(decode)
        .collect();
    Ok(RegionReport {
        bound,
        achievable,
        frontier,
    })
}
