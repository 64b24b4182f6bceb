//! Per-sink decodability.
//!
//! A sink decodes when every demanded unit vector b_{i,j} lies in the span of
//! the vectors on all of its in-edges.

use thiserror::Error;

use crate::coding::CodingAssignment;
use crate::linalg::{self, Echelon, LinalgError, Matrix, Vector};
use crate::network::{AugmentedNetwork, EdgeId, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("node {0} is not a declared sink")]
    UnknownSink(NodeId),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// What a sink sees: its in-edge vectors and the unit vectors it must recover.
#[derive(Debug, Clone)]
pub struct SinkView {
    pub sink: NodeId,
    pub in_vectors: Vec<(EdgeId, Vector)>,
    /// Coordinates of the demanded basis vectors; its length is d_1.
    pub demanded: Vec<usize>,
}

impl SinkView {
    pub fn new(
        assignment: &CodingAssignment,
        aug: &AugmentedNetwork,
        sink: NodeId,
    ) -> Result<Self, DecodeError> {
        let pos = aug
            .sink_position(sink)
            .ok_or(DecodeError::UnknownSink(sink))?;
        let in_vectors = aug
            .in_edges(sink)
            .iter()
            .map(|&e| (e, assignment.vector(e).to_vec()))
            .collect();
        let demanded = aug
            .demand(pos)
            .iter()
            .flat_map(|&i| aug.source_coordinates(i))
            .collect();
        Ok(SinkView {
            sink,
            in_vectors,
            demanded,
        })
    }

    pub fn generators(&self) -> Vec<Vector> {
        self.in_vectors.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn demanded_basis(&self, dim: usize) -> Vec<Vector> {
        self.demanded
            .iter()
            .map(|&c| linalg::unit_vector(dim, c))
            .collect()
    }
}

pub fn decodable(
    assignment: &CodingAssignment,
    aug: &AugmentedNetwork,
    sink: NodeId,
) -> Result<bool, DecodeError> {
    let view = SinkView::new(assignment, aug, sink)?;
    let field = assignment.field();
    let dim = aug.dimension();
    if view.demanded.is_empty() {
        return Ok(true);
    }
    let ech = Echelon::new(field, dim, &view.generators())?;
    if ech.rank() < view.demanded.len() {
        return Ok(false);
    }
    for target in view.demanded_basis(dim) {
        if !ech.contains(field, &target)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Matrix `D` with `D . (in-edge vectors as rows) = demanded basis rows`,
/// or `None` when the sink cannot decode.
pub fn decoding_matrix(
    assignment: &CodingAssignment,
    aug: &AugmentedNetwork,
    sink: NodeId,
) -> Result<Option<Matrix>, DecodeError> {
    let view = SinkView::new(assignment, aug, sink)?;
    let dim = aug.dimension();
    let generators = view.generators();
    let targets = view.demanded_basis(dim);
    if targets.is_empty() {
        return Ok(Some(Matrix::zeros(0, generators.len())));
    }
    Ok(linalg::solve_for_targets(
        assignment.field(),
        &generators,
        &targets,
    )?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkVerdicts {
    /// (sink node, decodable), in declared sink order.
    pub per_sink: Vec<(NodeId, bool)>,
    pub overall: bool,
}

pub fn all_sinks_decodable(assignment: &CodingAssignment, aug: &AugmentedNetwork) -> SinkVerdicts {
    let per_sink: Vec<(NodeId, bool)> = aug
        .sinks()
        .iter()
        .map(|&t| {
            (
                t,
                decodable(assignment, aug, t).expect("declared sink with consistent dimensions"),
            )
        })
        .collect();
    let overall = per_sink.iter().all(|&(_, ok)| ok);
    SinkVerdicts { per_sink, overall }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{code_with_slot_values, random_code};
    use crate::fixtures;
    use crate::gf::{Field, FieldElement};
    use crate::maxflow::maxflow_value;
    use crate::network::RateVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(v: u32) -> FieldElement {
        FieldElement::from_raw(v)
    }

    #[test]
    fn zero_demand_is_vacuous() {
        let aug = fixtures::bottleneck()
            .augment(&RateVector(vec![0, 1]))
            .unwrap();
        let f = Field::prime(2).unwrap();
        let a = code_with_slot_values(&aug, &f, &[el(0), el(0), el(0)]).unwrap();
        let t = aug.sinks()[0];
        assert!(decodable(&a, &aug, t).unwrap());
        assert_eq!(decoding_matrix(&a, &aug, t).unwrap().unwrap().rows(), 0);
    }

    #[test]
    fn bottleneck_cases() {
        let aug = fixtures::bottleneck()
            .augment(&RateVector(vec![1, 1]))
            .unwrap();
        let t = aug.sinks()[0];
        let f = Field::prime(2).unwrap();
        // c4 = 0: only b_1 arrives
        let a = code_with_slot_values(&aug, &f, &[el(1), el(1), el(1), el(0)]).unwrap();
        assert!(decodable(&a, &aug, t).unwrap());
        // all ones: b_1 + b_2 arrives, b_1 is not in its span
        let a = code_with_slot_values(&aug, &f, &[el(1); 4]).unwrap();
        assert!(!decodable(&a, &aug, t).unwrap());
        assert_eq!(decoding_matrix(&a, &aug, t).unwrap(), None);
        assert_eq!(decodable(&a, &aug, 0), Err(DecodeError::UnknownSink(0)));
    }

    #[test]
    fn identity_decoder() {
        let aug = fixtures::path(1).augment(&RateVector(vec![1])).unwrap();
        let f = Field::prime(3).unwrap();
        let a = code_with_slot_values(&aug, &f, &[el(1)]).unwrap();
        let d = decoding_matrix(&a, &aug, aug.sinks()[0]).unwrap().unwrap();
        assert_eq!(d, Matrix::identity(1));
    }

    #[test]
    fn butterfly_decoder_multiplies_back() {
        let aug = fixtures::butterfly().augment(&RateVector(vec![2])).unwrap();
        let f = Field::prime(2).unwrap();
        // slot order: sa(*s.1,*s.2) sb(*s.1,*s.2) at1 ac bc bt2 cd(ac,bc) dt1 dt2
        let values = [1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1].map(el);
        let a = code_with_slot_values(&aug, &f, &values).unwrap();
        for &t in aug.sinks() {
            let d = decoding_matrix(&a, &aug, t).unwrap().unwrap();
            assert_eq!((d.rows(), d.cols()), (2, 2));
            let view = SinkView::new(&a, &aug, t).unwrap();
            let g = Matrix::from_rows(2, &view.generators()).unwrap();
            assert_eq!(d.mul(&f, &g).unwrap(), Matrix::identity(2));
        }
        assert!(all_sinks_decodable(&a, &aug).overall);
    }

    #[test]
    fn verdict_map_names_failing_sink() {
        let aug = fixtures::crossing()
            .augment(&RateVector(vec![1, 1]))
            .unwrap();
        let f = Field::prime(2).unwrap();
        // slots: s1a s2a ab(s1a,s2a) bt1 bt2 s1t2 s2t1 in topo order; kill bt1 only
        let slots = crate::coding::coefficient_slots(&aug);
        let bt1 = aug.edge_by_id("bt1").unwrap();
        let values: Vec<_> = slots
            .iter()
            .map(|s| if s.edge == bt1 { el(0) } else { el(1) })
            .collect();
        let a = code_with_slot_values(&aug, &f, &values).unwrap();
        let v = all_sinks_decodable(&a, &aug);
        assert!(!v.overall);
        let t1 = aug.node_by_name("t1").unwrap();
        let t2 = aug.node_by_name("t2").unwrap();
        assert_eq!(v.per_sink, vec![(t1, false), (t2, true)]);
    }

    #[test]
    fn decodability_properties_hold_on_random_trials() {
        for (net, rate) in fixtures::all_with_rates() {
            let aug = net.augment(&rate).unwrap();
            for q in [2u64, 3, 4, 16] {
                let f = Field::with_order(q).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(q);
                for _ in 0..200 {
                    let a = random_code(&aug, &f, &mut rng);
                    for (pos, &t) in aug.sinks().iter().enumerate() {
                        let ok = decodable(&a, &aug, t).unwrap();
                        assert_eq!(ok, decoding_matrix(&a, &aug, t).unwrap().is_some());
                        let view = SinkView::new(&a, &aug, t).unwrap();
                        let rank = linalg::rank(&f, &view.generators()).unwrap();
                        if ok {
                            assert!(rank >= view.demanded.len());
                        }
                        // projection onto the non-demanded coordinates has
                        // rank at most maxflow from the non-demanded virtual sources
                        let dem = aug.demand(pos);
                        let others: Vec<_> = (0..aug.source_count())
                            .filter(|i| !dem.contains(i))
                            .map(|i| aug.virtual_source(i))
                            .collect();
                        let d2 = maxflow_value(&aug, &others, t).unwrap();
                        let u2 = linalg::CoordSubspace::new(
                            aug.dimension(),
                            (0..aug.source_count())
                                .filter(|i| !dem.contains(i))
                                .flat_map(|i| aug.source_coordinates(i)),
                        )
                        .unwrap();
                        let projected: Vec<Vector> = view
                            .generators()
                            .iter()
                            .map(|v| u2.project(v).unwrap())
                            .collect();
                        assert!(linalg::rank(&f, &projected).unwrap() <= d2);
                    }
                }
            }
        }
    }
}
