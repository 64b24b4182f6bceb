//! Random linear network coding on multi-source multi-sink acyclic networks.
//!
//! The crate decides whether a rate vector is achievable by random linear
//! coding from two maxflow values per sink ([`achieve::check_rate`]) and
//! measures the actual success probability, either by seeded Monte Carlo
//! ([`experiment::monte_carlo`]) or by enumerating every coefficient tuple
//! ([`experiment::brute_force`]).
//!
//! ```
//! use netcode_core::{achieve, experiment, fixtures, Field, RateVector};
//!
//! let net = fixtures::bottleneck();
//! let rate = RateVector(vec![1, 1]);
//! assert!(!achieve::check_rate(&net, &rate).unwrap().achievable);
//!
//! let exact = experiment::brute_force(&net, &rate, &Field::prime(2).unwrap()).unwrap();
//! assert_eq!(exact.overall_probability(), num_rational::Ratio::new(3, 16));
//! ```

pub mod achieve;
pub mod coding;
pub mod decode;
pub mod experiment;
pub mod fixtures;
pub mod gf;
pub mod linalg;
pub mod maxflow;
pub mod network;
pub mod random;

pub use achieve::{check_rate, enumerate_region, RateVerdict, RegionReport, SinkCondition};
pub use coding::{CodingAssignment, Slot};
pub use experiment::{ExactProbability, SweepTable, TrialReport, Witness};
pub use gf::{Field, FieldElement, FieldKind};
pub use maxflow::FlowResult;
pub use network::{AugmentedNetwork, Network, NetworkSpec, RateVector};
