//! Monte Carlo and exhaustive estimates of random-coding success.
//!
//! Trial `k` of a run with master seed `s` draws all of its coefficients from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `k`. Streams are
//! independent, so a report depends only on (network, rate, field, trials,
//! seed) and not on how trials are scheduled across threads.
//!
//! The exhaustive oracle enumerates every coefficient tuple. Tuple index `n`
//! maps to slot values by base-q digits with slot 0 the most significant, so
//! tuple order is lexicographic in canonical slot order.

use std::collections::BTreeMap;
use std::io;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::coding::{code_with_slot_values, coefficient_slots, random_code, CodingError, Slot};
use crate::decode::all_sinks_decodable;
use crate::gf::{Field, FieldElement};
use crate::network::{AugmentedNetwork, Network, RateError, RateVector};

/// Largest number of coefficient tuples the exhaustive oracle will visit.
pub const TUPLE_LIMIT: u64 = 10_000_000;

const CHUNK: u64 = 4096;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("{order}^{slots} = {} coefficient tuples exceeds the limit of {TUPLE_LIMIT}", tuple_count_text(*.order, *.slots))]
    TooManyTuples { order: u32, slots: usize },
    #[error("sweep fields must have strictly increasing order ({previous} then {next})")]
    SweepOrder { previous: String, next: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn tuple_count_text(order: u32, slots: usize) -> String {
    match tuple_count(order, slots) {
        Some(n) => n.to_string(),
        None => "more than 2^128".to_string(),
    }
}

/// `order^slots`, if it fits in a u128.
pub fn tuple_count(order: u32, slots: usize) -> Option<u128> {
    (order as u128).checked_pow(u32::try_from(slots).ok()?)
}

/// Independent random stream for one trial.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkCount {
    pub sink: String,
    pub successes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialReport {
    pub network: String,
    pub rate: RateVector,
    pub field: Field,
    pub trials: u64,
    pub seed: u64,
    pub per_sink: Vec<SinkCount>,
    /// Trials in which every sink decoded.
    pub overall: u64,
}

impl TrialReport {
    pub fn overall_rate(&self) -> f64 {
        self.overall as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProbability {
    pub network: String,
    pub rate: RateVector,
    pub field: Field,
    /// Number of coefficient tuples enumerated (the common denominator).
    pub tuples: u64,
    pub per_sink: Vec<SinkCount>,
    pub overall: u64,
}

impl ExactProbability {
    pub fn overall_probability(&self) -> Ratio<u64> {
        Ratio::new(self.overall, self.tuples)
    }

    pub fn sink_probability(&self, k: usize) -> Ratio<u64> {
        Ratio::new(self.per_sink[k].successes, self.tuples)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepTable {
    pub rows: Vec<TrialReport>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Position of the tuple in enumeration order.
    pub tuple_index: u64,
    pub coefficients: BTreeMap<Slot, FieldElement>,
}

fn sink_names(aug: &AugmentedNetwork) -> Vec<String> {
    aug.sinks()
        .iter()
        .map(|&t| aug.node_name(t).to_string())
        .collect()
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Per-sink counts followed by the all-sinks count for one assignment.
fn outcome(aug: &AugmentedNetwork, assignment: &crate::coding::CodingAssignment) -> Vec<u64> {
    let v = all_sinks_decodable(assignment, aug);
    v.per_sink
        .iter()
        .map(|&(_, ok)| ok as u64)
        .chain([v.overall as u64])
        .collect()
}

fn split_counts(names: Vec<String>, counts: &[u64]) -> (Vec<SinkCount>, u64) {
    let per_sink = names
        .into_iter()
        .zip(counts)
        .map(|(sink, &successes)| SinkCount { sink, successes })
        .collect();
    (per_sink, counts[counts.len() - 1])
}

pub fn monte_carlo(
    net: &Network,
    rate: &RateVector,
    field: &Field,
    trials: u64,
    master_seed: u64,
) -> Result<TrialReport, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::ZeroTrials);
    }
    let aug = net.augment(rate)?;
    let width = aug.sinks().len() + 1;
    let counts = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(master_seed, k);
            outcome(&aug, &random_code(&aug, field, &mut rng))
        })
        .reduce(|| vec![0; width], add_counts);
    let (per_sink, overall) = split_counts(sink_names(&aug), &counts);
    Ok(TrialReport {
        network: net.name().to_string(),
        rate: rate.clone(),
        field: field.clone(),
        trials,
        seed: master_seed,
        per_sink,
        overall,
    })
}

fn checked_tuples(aug: &AugmentedNetwork, field: &Field) -> Result<(usize, u64), ExperimentError> {
    let slots = coefficient_slots(aug).len();
    match tuple_count(field.order(), slots) {
        Some(n) if n <= TUPLE_LIMIT as u128 => Ok((slots, n as u64)),
        _ => Err(ExperimentError::TooManyTuples {
            order: field.order(),
            slots,
        }),
    }
}

/// Slot values of tuple `index`.
fn tuple_values(index: u64, q: u64, slots: usize) -> Vec<FieldElement> {
    let mut values = vec![FieldElement::ZERO; slots];
    let mut rest = index;
    for v in values.iter_mut().rev() {
        *v = FieldElement::from_raw((rest % q) as u32);
        rest /= q;
    }
    values
}

/// Advances `values` to the next tuple in enumeration order.
fn next_tuple(values: &mut [FieldElement], q: u32) {
    for v in values.iter_mut().rev() {
        if v.value() + 1 < q {
            *v = FieldElement::from_raw(v.value() + 1);
            return;
        }
        *v = FieldElement::ZERO;
    }
}

/// Exact success probabilities by enumerating every coefficient tuple.
pub fn brute_force(
    net: &Network,
    rate: &RateVector,
    field: &Field,
) -> Result<ExactProbability, ExperimentError> {
    let aug = net.augment(rate)?;
    let (slots, tuples) = checked_tuples(&aug, field)?;
    let width = aug.sinks().len() + 1;
    let q = field.order();
    let chunks = tuples.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Vec<u64>, CodingError> {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(tuples);
            let mut values = tuple_values(start, q as u64, slots);
            let mut acc = vec![0u64; width];
            for _ in start..end {
                let a = code_with_slot_values(&aug, field, &values)?;
                acc = add_counts(acc, outcome(&aug, &a));
                next_tuple(&mut values, q);
            }
            Ok(acc)
        })
        .try_reduce(|| vec![0; width], |a, b| Ok(add_counts(a, b)))?;
    let (per_sink, overall) = split_counts(sink_names(&aug), &counts);
    Ok(ExactProbability {
        network: net.name().to_string(),
        rate: rate.clone(),
        field: field.clone(),
        tuples,
        per_sink,
        overall,
    })
}

/// First tuple, in enumeration order, under which every sink decodes.
pub fn existence_search(
    net: &Network,
    rate: &RateVector,
    field: &Field,
) -> Result<Option<Witness>, ExperimentError> {
    let aug = net.augment(rate)?;
    let (slots, tuples) = checked_tuples(&aug, field)?;
    let q = field.order();
    let chunks = tuples.div_ceil(CHUNK);
    let found = (0..chunks).into_par_iter().find_map_first(|c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(tuples);
        let mut values = tuple_values(start, q as u64, slots);
        for index in start..end {
            let a = code_with_slot_values(&aug, field, &values).expect("slot count matches");
            if all_sinks_decodable(&a, &aug).overall {
                return Some((index, values));
            }
            next_tuple(&mut values, q);
        }
        None
    });
    Ok(found.map(|(tuple_index, values)| Witness {
        tuple_index,
        coefficients: coefficient_slots(&aug).into_iter().zip(values).collect(),
    }))
}

/// One Monte Carlo run per field, all with the same master seed.
pub fn field_sweep(
    net: &Network,
    rate: &RateVector,
    fields: &[Field],
    trials: u64,
    master_seed: u64,
) -> Result<SweepTable, ExperimentError> {
    for w in fields.windows(2) {
        if w[1].order() <= w[0].order() {
            return Err(ExperimentError::SweepOrder {
                previous: w[0].to_string(),
                next: w[1].to_string(),
            });
        }
    }
    let rows = fields
        .iter()
        .map(|f| monte_carlo(net, rate, f, trials, master_seed))
        .collect::<Result<_, _>>()?;
    Ok(SweepTable { rows })
}

pub const TRIAL_CSV_HEADER: [&str; 8] = [
    "network",
    "rate",
    "field",
    "trials",
    "seed",
    "sink",
    "successes",
    "success_rate",
];

fn format_rate(successes: u64, trials: u64) -> String {
    format!("{:.6}", successes as f64 / trials as f64)
}

/// Writes per-sink rows followed by an `ALL` row for each report.
pub fn write_trial_csv<W: io::Write>(
    out: W,
    reports: &[TrialReport],
) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_CSV_HEADER)?;
    for r in reports {
        let rows = r
            .per_sink
            .iter()
            .map(|s| (s.sink.as_str(), s.successes))
            .chain([("ALL", r.overall)]);
        for (sink, successes) in rows {
            w.write_record([
                r.network.clone(),
                r.rate.to_string(),
                r.field.to_string(),
                r.trials.to_string(),
                r.seed.to_string(),
                sink.to_string(),
                successes.to_string(),
                format_rate(successes, r.trials),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Exact-oracle rows: the trial columns (with `trials` = tuple count and an
/// empty seed) plus `numerator,denominator` in lowest terms.
pub fn write_exact_csv<W: io::Write>(
    out: W,
    results: &[ExactProbability],
) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = TRIAL_CSV_HEADER.to_vec();
    header.extend(["numerator", "denominator"]);
    w.write_record(&header)?;
    for r in results {
        let rows = r
            .per_sink
            .iter()
            .map(|s| (s.sink.as_str(), s.successes))
            .chain([("ALL", r.overall)]);
        for (sink, successes) in rows {
            let p = Ratio::new(successes, r.tuples);
            w.write_record([
                r.network.clone(),
                r.rate.to_string(),
                r.field.to_string(),
                r.tuples.to_string(),
                String::new(),
                sink.to_string(),
                successes.to_string(),
                format_rate(successes, r.tuples),
                p.numer().to_string(),
                p.denom().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn trial_csv_string(reports: &[TrialReport]) -> String {
    let mut buf = Vec::new();
    write_trial_csv(&mut buf, reports).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    /// Closed form for the bottleneck fixture at rate (1,1): sink decodes iff
    /// c1*c3 != 0 and c2*c4 == 0.
    fn bottleneck_closed_form(q: u64) -> Ratio<u64> {
        let nz = Ratio::new(q - 1, q) * Ratio::new(q - 1, q);
        nz * (Ratio::from_integer(1) - nz)
    }

    /// Hand enumeration of the same event, independent of the coding code.
    fn bottleneck_by_hand(q: u64) -> Ratio<u64> {
        let mut good = 0;
        for c1 in 0..q {
            for c2 in 0..q {
                for c3 in 0..q {
                    for c4 in 0..q {
                        if c1 * c3 != 0 && c2 * c4 == 0 {
                            good += 1;
                        }
                    }
                }
            }
        }
        Ratio::new(good, q.pow(4))
    }

    #[test]
    fn bottleneck_exact() {
        let net = fixtures::bottleneck();
        let rate = RateVector(vec![1, 1]);
        for q in [2u64, 3, 4, 5] {
            let field = Field::with_order(q).unwrap();
            let exact = brute_force(&net, &rate, &field).unwrap();
            assert_eq!(exact.tuples, q.pow(4));
            assert_eq!(exact.overall_probability(), bottleneck_closed_form(q));
            assert_eq!(exact.overall_probability(), bottleneck_by_hand(q));
        }
        let gf2 = Field::prime(2).unwrap();
        assert_eq!(
            brute_force(&net, &rate, &gf2)
                .unwrap()
                .overall_probability(),
            Ratio::new(3, 16)
        );
    }

    #[test]
    fn no_slots_means_certain_outcome() {
        // sink fed directly by virtual edges is impossible (sinks are not
        // sources), so use a source with no out-edges: zero slots
        let net = crate::network::NetworkSpec::from_json(
            r#"{"nodes":["s","t"],"edges":[],"sources":["s"],"sinks":["t"],"demands":{"t":[1]}}"#,
        )
        .unwrap()
        .validate()
        .unwrap();
        let f = Field::prime(3).unwrap();
        let p = brute_force(&net, &RateVector(vec![1]), &f).unwrap();
        assert_eq!((p.tuples, p.overall), (1, 0));
        let p = brute_force(&net, &RateVector(vec![0]), &f).unwrap();
        assert_eq!((p.tuples, p.overall), (1, 1));
    }

    #[test]
    fn guard_refuses_large_enumerations() {
        let net = fixtures::butterfly();
        let f = Field::binary(16).unwrap();
        let err = brute_force(&net, &RateVector(vec![2]), &f).unwrap_err();
        assert!(matches!(
            err,
            ExperimentError::TooManyTuples {
                order: 65536,
                slots: 12
            }
        ));
        assert!(err.to_string().contains("65536^12"));
        assert!(existence_search(&net, &RateVector(vec![2]), &f).is_err());
    }

    #[test]
    fn single_path_matches_exact() {
        let net = fixtures::path(2);
        let rate = RateVector(vec![1]);
        let f = Field::prime(3).unwrap();
        let exact = brute_force(&net, &rate, &f).unwrap();
        assert_eq!(exact.overall_probability(), Ratio::new(4, 9));
        let trials = 20_000;
        let mc = monte_carlo(&net, &rate, &f, trials, 5).unwrap();
        let p = 4.0 / 9.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (mc.overall_rate() - p).abs() <= 3.0 * sigma,
            "{}",
            mc.overall_rate()
        );
    }

    #[test]
    fn monte_carlo_deterministic() {
        let net = fixtures::crossing();
        let rate = RateVector(vec![1, 1]);
        let f = Field::binary(4).unwrap();
        let a = monte_carlo(&net, &rate, &f, 3000, 77).unwrap();
        let b = monte_carlo(&net, &rate, &f, 3000, 77).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo(&net, &rate, &f, 3000, 78).unwrap();
        assert_ne!(a.overall, c.overall);
        assert!(matches!(
            monte_carlo(&net, &rate, &f, 0, 1),
            Err(ExperimentError::ZeroTrials)
        ));
    }

    #[test]
    fn bottleneck_gf2_monte_carlo() {
        let trials = 100_000;
        let mc = monte_carlo(
            &fixtures::bottleneck(),
            &RateVector(vec![1, 1]),
            &Field::prime(2).unwrap(),
            trials,
            2024,
        )
        .unwrap();
        let p = 3.0 / 16.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (mc.overall_rate() - p).abs() <= 3.0 * sigma,
            "{}",
            mc.overall_rate()
        );
    }

    #[test]
    fn existence() {
        let gf2 = Field::prime(2).unwrap();
        let w = existence_search(&fixtures::butterfly(), &RateVector(vec![2]), &gf2)
            .unwrap()
            .expect("butterfly has a binary solution");
        let aug = fixtures::butterfly().augment(&RateVector(vec![2])).unwrap();
        let a = crate::coding::code_with_coefficients(&aug, &gf2, &w.coefficients).unwrap();
        assert!(all_sinks_decodable(&a, &aug).overall);

        let w = existence_search(&fixtures::bottleneck(), &RateVector(vec![1, 1]), &gf2)
            .unwrap()
            .expect("c4 = 0 works");
        // first in enumeration order: c1=0? no (needs c1 c3 != 0), so 0b1010 = 10
        assert_eq!(w.tuple_index, 0b1010);

        // rate above maxflow cannot be decoded by any code
        assert_eq!(
            existence_search(&fixtures::butterfly(), &RateVector(vec![3]), &gf2).unwrap(),
            None
        );
    }

    #[test]
    fn tuple_enumeration_order() {
        let mut v = tuple_values(0, 3, 3);
        for i in 0..27 {
            assert_eq!(v, tuple_values(i, 3, 3));
            next_tuple(&mut v, 3);
        }
    }

    #[test]
    fn sweep_rows_and_order() {
        let net = fixtures::bottleneck();
        let rate = RateVector(vec![1, 1]);
        let fields: Vec<Field> = ["p:2", "2^4", "2^8", "2^16"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let table = field_sweep(&net, &rate, &fields, 200, 3).unwrap();
        assert_eq!(table.rows.len(), 4);
        let csv = trial_csv_string(&table.rows);
        // header + 4 fields x (1 sink + ALL)
        assert_eq!(csv.lines().count(), 1 + 4 * 2);
        assert!(csv.starts_with("network,rate,field,trials,seed,sink,successes,success_rate\n"));
        assert!(csv.contains("bottleneck,\"1,1\",2^16,200,3,ALL,"));

        assert!(field_sweep(&net, &rate, &[], 10, 1)
            .unwrap()
            .rows
            .is_empty());
        let backwards = [fields[1].clone(), fields[0].clone()];
        assert!(matches!(
            field_sweep(&net, &rate, &backwards, 10, 1),
            Err(ExperimentError::SweepOrder { .. })
        ));
    }

    #[test]
    fn exact_csv_has_fraction_columns() {
        let p = brute_force(
            &fixtures::bottleneck(),
            &RateVector(vec![1, 1]),
            &Field::prime(2).unwrap(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_exact_csv(&mut buf, &[p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "network,rate,field,trials,seed,sink,successes,success_rate,numerator,denominator"
        );
        assert_eq!(
            lines.next().unwrap(),
            "bottleneck,\"1,1\",p:2,16,,t,3,0.187500,3,16"
        );
        assert_eq!(
            lines.next().unwrap(),
            "bottleneck,\"1,1\",p:2,16,,ALL,3,0.187500,3,16"
        );
    }
}
