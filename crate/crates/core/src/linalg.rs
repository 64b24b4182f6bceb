//! Dense vector and matrix algebra over a [`Field`].
//!
//! Everything is exact. Elimination picks the first nonzero entry in a column
//! as pivot, so results are deterministic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::gf::{Field, FieldElement};

/// A dense vector in F^r.
pub type Vector = Vec<FieldElement>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("decoding matrix failed the multiply-back check")]
    MultiplyBack,
}

/// Unit vector with a one at `coord`.
pub fn unit_vector(dim: usize, coord: usize) -> Vector {
    let mut v = vec![FieldElement::ZERO; dim];
    v[coord] = FieldElement::ONE;
    v
}

pub fn is_zero(v: &[FieldElement]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// `acc += scale * v`
#[inline]
pub fn axpy(field: &Field, acc: &mut [FieldElement], scale: FieldElement, v: &[FieldElement]) {
    if scale.is_zero() {
        return;
    }
    for (a, &x) in acc.iter_mut().zip(v) {
        *a = field.add(*a, field.mul(scale, x));
    }
}

pub fn add_vectors(field: &Field, a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

/// A set of coordinates of F^r; projection zeroes everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordSubspace {
    dim: usize,
    coords: BTreeSet<usize>,
}

impl CoordSubspace {
    pub fn new(dim: usize, coords: impl IntoIterator<Item = usize>) -> Result<Self, LinalgError> {
        let coords: BTreeSet<usize> = coords.into_iter().collect();
        if let Some(&index) = coords.iter().find(|&&c| c >= dim) {
            return Err(LinalgError::IndexOutOfRange { index, dim });
        }
        Ok(CoordSubspace { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.iter().copied()
    }

    pub fn contains(&self, coord: usize) -> bool {
        self.coords.contains(&coord)
    }

    pub fn complement(&self) -> CoordSubspace {
        CoordSubspace {
            dim: self.dim,
            coords: (0..self.dim).filter(|c| !self.coords.contains(c)).collect(),
        }
    }

    pub fn project(&self, v: &[FieldElement]) -> Result<Vector, LinalgError> {
        check_dim(self.dim, v)?;
        Ok(v.iter()
            .enumerate()
            .map(|(i, &x)| {
                if self.coords.contains(&i) {
                    x
                } else {
                    FieldElement::ZERO
                }
            })
            .collect())
    }
}

fn check_dim(dim: usize, v: &[FieldElement]) -> Result<(), LinalgError> {
    if v.len() == dim {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch {
            expected: dim,
            found: v.len(),
        })
    }
}

fn common_dim(vectors: &[Vector]) -> Result<Option<usize>, LinalgError> {
    let Some(first) = vectors.first() else {
        return Ok(None);
    };
    for v in vectors {
        check_dim(first.len(), v)?;
    }
    Ok(Some(first.len()))
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElement::ONE;
        }
        m
    }

    /// Builds a matrix with `cols` columns from the given rows.
    pub fn from_rows(cols: usize, rows: &[Vector]) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r)?;
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, field: &Field, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let acc = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                axpy(field, acc, self.get(i, k), rhs.row(k));
            }
        }
        Ok(out)
    }
}

/// Row echelon basis of a span, with each basis row's expression in terms
/// of the original generators.
#[derive(Debug, Clone)]
pub struct Echelon {
    dim: usize,
    generators: usize,
    // (pivot column, reduced row with pivot 1, combination of generators)
    basis: Vec<(usize, Vector, Vector)>,
}

impl Echelon {
    pub fn new(field: &Field, dim: usize, generators: &[Vector]) -> Result<Self, LinalgError> {
        let mut ech = Echelon {
            dim,
            generators: generators.len(),
            basis: Vec::new(),
        };
        for (g, v) in generators.iter().enumerate() {
            check_dim(dim, v)?;
            let mut row = v.clone();
            let mut combo = vec![FieldElement::ZERO; generators.len()];
            combo[g] = FieldElement::ONE;
            ech.reduce_with_combo(field, &mut row, &mut combo);
            if let Some(pivot) = row.iter().position(|x| !x.is_zero()) {
                let scale = field.inv(row[pivot]).expect("pivot is nonzero");
                for x in row.iter_mut().chain(combo.iter_mut()) {
                    *x = field.mul(scale, *x);
                }
                ech.basis.push((pivot, row, combo));
            }
        }
        Ok(ech)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Subtracts basis rows until no basis pivot column is nonzero in `row`,
    /// mirroring the steps in `combo` (negated so that, at the end,
    /// `original - residual = combo . generators` when combo started at 0).
    fn reduce_with_combo(
        &self,
        field: &Field,
        row: &mut [FieldElement],
        combo: &mut [FieldElement],
    ) {
        for (pivot, brow, bcombo) in &self.basis {
            let c = row[*pivot];
            if !c.is_zero() {
                let neg = field.neg(c);
                axpy(field, row, neg, brow);
                axpy(field, combo, neg, bcombo);
            }
        }
    }

    /// Residual of `target` after elimination; zero iff `target` is in the span.
    pub fn residual(&self, field: &Field, target: &[FieldElement]) -> Result<Vector, LinalgError> {
        check_dim(self.dim, target)?;
        let mut row = target.to_vec();
        for (pivot, brow, _) in &self.basis {
            let c = row[*pivot];
            if !c.is_zero() {
                axpy(field, &mut row, field.neg(c), brow);
            }
        }
        Ok(row)
    }

    pub fn contains(&self, field: &Field, target: &[FieldElement]) -> Result<bool, LinalgError> {
        Ok(is_zero(&self.residual(field, target)?))
    }

    /// Coefficients `d` with `d . generators = target`, if any.
    pub fn express(
        &self,
        field: &Field,
        target: &[FieldElement],
    ) -> Result<Option<Vector>, LinalgError> {
        check_dim(self.dim, target)?;
        let mut row = target.to_vec();
        let mut combo = vec![FieldElement::ZERO; self.generators];
        self.reduce_with_combo(field, &mut row, &mut combo);
        if !is_zero(&row) {
            return Ok(None);
        }
        // target - sum(neg-steps) = 0  =>  target = -combo . generators
        Ok(Some(combo.into_iter().map(|x| field.neg(x)).collect()))
    }
}

/// Rank of a collection of equal-length vectors.
pub fn rank(field: &Field, vectors: &[Vector]) -> Result<usize, LinalgError> {
    match common_dim(vectors)? {
        None => Ok(0),
        Some(dim) => Ok(Echelon::new(field, dim, vectors)?.rank()),
    }
}

pub fn in_span(
    field: &Field,
    target: &[FieldElement],
    generators: &[Vector],
) -> Result<bool, LinalgError> {
    if let Some(dim) = common_dim(generators)? {
        check_dim(dim, target)?;
    }
    Echelon::new(field, target.len(), generators)?.contains(field, target)
}

/// Finds `D` with `D . G = T` (G's rows are the generators, T's rows the
/// targets). `Ok(None)` when some target is outside the span. The product is
/// re-multiplied and compared before returning.
pub fn solve_for_targets(
    field: &Field,
    generators: &[Vector],
    targets: &[Vector],
) -> Result<Option<Matrix>, LinalgError> {
    let dim = match (common_dim(generators)?, common_dim(targets)?) {
        (Some(g), Some(t)) if g != t => {
            return Err(LinalgError::DimensionMismatch {
                expected: g,
                found: t,
            })
        }
        (Some(d), _) | (None, Some(d)) => d,
        (None, None) => 0,
    };
    let ech = Echelon::new(field, dim, generators)?;
    let mut rows = Vec::with_capacity(targets.len());
    for t in targets {
        match ech.express(field, t)? {
            Some(d) => rows.push(d),
            None => return Ok(None),
        }
    }
    let d = Matrix::from_rows(generators.len(), &rows)?;
    let g = Matrix::from_rows(dim, generators)?;
    let t = Matrix::from_rows(dim, targets)?;
    if d.mul(field, &g)? != t {
        return Err(LinalgError::MultiplyBack);
    }
    Ok(Some(d))
}
