//! Global coding vectors for every edge of an augmented network.
//!
//! A virtual edge tagged (i, j) carries the unit vector of coordinate (i, j).
//! Every other edge carries a linear combination of the vectors on the
//! in-edges of its tail, one coefficient per (edge, in-edge) pair. Those pairs
//! are the coefficient *slots*; their canonical order is topological edge order,
//! then the tail's in-edges in edge-index order. Random coding draws each slot
//! uniformly from the field in that order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::gf::{Field, FieldElement};
use crate::linalg::{self, Vector};
use crate::network::{AugmentedNetwork, EdgeId, EdgeKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("no coefficient supplied for edge {edge} from in-edge {in_edge}")]
    MissingCoefficient { edge: String, in_edge: String },
    #[error("coefficient key ({edge}, {in_edge}) is not a coefficient slot")]
    ExtraneousCoefficient { edge: EdgeId, in_edge: EdgeId },
    #[error("expected {expected} slot values, got {found}")]
    SlotCount { expected: usize, found: usize },
    #[error("coefficient {value} is not an element of a field of order {order}")]
    ForeignCoefficient { value: u32, order: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingViolation {
    #[error("assignment has {found} vectors for {expected} edges")]
    EdgeCount { expected: usize, found: usize },
    #[error("edge {0}: vector has the wrong dimension")]
    Dimension(String),
    #[error("edge {0}: virtual edge does not carry its unit vector")]
    VirtualVector(String),
    #[error("edge {0}: wrong number of stored coefficients")]
    CoefficientCount(String),
    #[error("edge {0}: vector differs from the combination of its in-edges")]
    Mismatch(String),
}

/// One coefficient slot: `edge` combines the vector of `in_edge`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub edge: EdgeId,
    pub in_edge: EdgeId,
}

/// Coefficient slots of `aug` in canonical order.
pub fn coefficient_slots(aug: &AugmentedNetwork) -> Vec<Slot> {
    let mut slots = Vec::new();
    for &e in aug.topo_edge_order() {
        let edge = aug.edge(e);
        if edge.is_virtual() {
            continue;
        }
        for &in_edge in aug.in_edges(edge.tail) {
            slots.push(Slot { edge: e, in_edge });
        }
    }
    slots
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingAssignment {
    field: Field,
    dimension: usize,
    /// Indexed by edge.
    vectors: Vec<Vector>,
    /// Indexed by edge; entry k multiplies the k-th in-edge of the tail.
    coefficients: Vec<Vec<FieldElement>>,
}

impl CodingAssignment {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vector(&self, e: EdgeId) -> &[FieldElement] {
        &self.vectors[e]
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// Coefficients of edge `e`, aligned with `aug.in_edges(tail(e))`.
    pub fn coefficients(&self, e: EdgeId) -> &[FieldElement] {
        &self.coefficients[e]
    }

    pub fn coefficient(&self, aug: &AugmentedNetwork, slot: Slot) -> Option<FieldElement> {
        let pos = aug
            .in_edges(aug.edge(slot.edge).tail)
            .iter()
            .position(|&k| k == slot.in_edge)?;
        self.coefficients[slot.edge].get(pos).copied()
    }

    /// Slot values in canonical order.
    pub fn slot_values(&self, aug: &AugmentedNetwork) -> Vec<FieldElement> {
        aug.topo_edge_order()
            .iter()
            .filter(|&&e| !aug.edge(e).is_virtual())
            .flat_map(|&e| self.coefficients[e].iter().copied())
            .collect()
    }

    #[doc(hidden)]
    pub fn vectors_mut(&mut self) -> &mut [Vector] {
        &mut self.vectors
    }

    #[doc(hidden)]
    pub fn coefficients_mut(&mut self) -> &mut [Vec<FieldElement>] {
        &mut self.coefficients
    }

    /// Text dump: one line per edge in topological order,
    /// `<edge-id>: <vector entries>; <in-edge-id>=<coefficient> ...`.
    pub fn dump(&self, aug: &AugmentedNetwork) -> String {
        let mut out = String::new();
        for &e in aug.topo_edge_order() {
            let edge = aug.edge(e);
            let _ = write!(out, "{}:", edge.id);
            for x in &self.vectors[e] {
                let _ = write!(out, " {x}");
            }
            out.push(';');
            for (&k, c) in aug.in_edges(edge.tail).iter().zip(&self.coefficients[e]) {
                let _ = write!(out, " {}={c}", aug.edge(k).id);
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the assignment from slot values given in canonical order.
pub fn code_with_slot_values(
    aug: &AugmentedNetwork,
    field: &Field,
    values: &[FieldElement],
) -> Result<CodingAssignment, CodingError> {
    let r = aug.dimension();
    let edge_count = aug.edges().len();
    let mut vectors: Vec<Vector> = vec![Vec::new(); edge_count];
    let mut coefficients: Vec<Vec<FieldElement>> = vec![Vec::new(); edge_count];
    let mut cursor = 0usize;
    for &e in aug.topo_edge_order() {
        let edge = aug.edge(e);
        match edge.kind {
            EdgeKind::Virtual { source, index } => {
                vectors[e] = linalg::unit_vector(r, aug.coordinate(source, index));
            }
            EdgeKind::Base(_) => {
                let ins = aug.in_edges(edge.tail);
                let Some(cs) = values.get(cursor..cursor + ins.len()) else {
                    return Err(CodingError::SlotCount {
                        expected: coefficient_slots(aug).len(),
                        found: values.len(),
                    });
                };
                cursor += ins.len();
                let mut acc = vec![FieldElement::ZERO; r];
                for (&k, &c) in ins.iter().zip(cs) {
                    if !field.contains(c) {
                        return Err(CodingError::ForeignCoefficient {
                            value: c.value(),
                            order: field.order(),
                        });
                    }
                    linalg::axpy(field, &mut acc, c, &vectors[k]);
                }
                vectors[e] = acc;
                coefficients[e] = cs.to_vec();
            }
        }
    }
    if cursor != values.len() {
        return Err(CodingError::SlotCount {
            expected: cursor,
            found: values.len(),
        });
    }
    Ok(CodingAssignment {
        field: field.clone(),
        dimension: r,
        vectors,
        coefficients,
    })
}

/// Deterministic coding from an explicit (edge, in-edge) -> coefficient map.
pub fn code_with_coefficients(
    aug: &AugmentedNetwork,
    field: &Field,
    coefficients: &BTreeMap<Slot, FieldElement>,
) -> Result<CodingAssignment, CodingError> {
    let slots = coefficient_slots(aug);
    let mut values = Vec::with_capacity(slots.len());
    for slot in &slots {
        match coefficients.get(slot) {
            Some(&c) => values.push(c),
            None => {
                return Err(CodingError::MissingCoefficient {
                    edge: aug.edge(slot.edge).id.clone(),
                    in_edge: aug.edge(slot.in_edge).id.clone(),
                })
            }
        }
    }
    if coefficients.len() != slots.len() {
        let extra = coefficients
            .keys()
            .find(|k| !slots.contains(k))
            .expect("a key outside the slot set exists");
        return Err(CodingError::ExtraneousCoefficient {
            edge: extra.edge,
            in_edge: extra.in_edge,
        });
    }
    code_with_slot_values(aug, field, &values)
}

/// Random coding: every slot drawn uniformly (zero included), in canonical order.
pub fn random_code<R: Rng + ?Sized>(
    aug: &AugmentedNetwork,
    field: &Field,
    rng: &mut R,
) -> CodingAssignment {
    let slot_count = coefficient_slots_len(aug);
    let values: Vec<FieldElement> = (0..slot_count).map(|_| field.sample(rng)).collect();
    code_with_slot_values(aug, field, &values).expect("slot count matches by construction")
}

/// Number of coefficient slots without materializing them.
pub fn coefficient_slots_len(aug: &AugmentedNetwork) -> usize {
    aug.edges()
        .iter()
        .filter(|e| !e.is_virtual())
        .map(|e| aug.in_edges(e.tail).len())
        .sum()
}

/// Re-derives every vector from the stored coefficients, in topological
/// order, and reports the first disagreement.
pub fn recheck(
    assignment: &CodingAssignment,
    aug: &AugmentedNetwork,
) -> Result<(), CodingViolation> {
    let r = aug.dimension();
    let field = &assignment.field;
    if assignment.vectors.len() != aug.edges().len()
        || assignment.coefficients.len() != aug.edges().len()
    {
        return Err(CodingViolation::EdgeCount {
            expected: aug.edges().len(),
            found: assignment.vectors.len(),
        });
    }
    for &e in aug.topo_edge_order() {
        let edge = aug.edge(e);
        let v = &assignment.vectors[e];
        if v.len() != r {
            return Err(CodingViolation::Dimension(edge.id.clone()));
        }
        match edge.kind {
            EdgeKind::Virtual { source, index } => {
                if *v != linalg::unit_vector(r, aug.coordinate(source, index)) {
                    return Err(CodingViolation::VirtualVector(edge.id.clone()));
                }
            }
            EdgeKind::Base(_) => {
                let ins = aug.in_edges(edge.tail);
                let cs = &assignment.coefficients[e];
                if cs.len() != ins.len() {
                    return Err(CodingViolation::CoefficientCount(edge.id.clone()));
                }
                let mut acc = vec![FieldElement::ZERO; r];
                for (&k, &c) in ins.iter().zip(cs) {
                    linalg::axpy(field, &mut acc, c, &assignment.vectors[k]);
                }
                if acc != *v {
                    return Err(CodingViolation::Mismatch(edge.id.clone()));
                }
            }
        }
    }
    Ok(())
}
