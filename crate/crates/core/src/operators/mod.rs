//! Sparse complex operators on `l²(X)` for a finite point set `X`.
//!
//! An operator is stored as its nonzero matrix entries
//! `T_xy = <δ_x, T δ_y>`, keyed row-major in point order.

mod block;
mod decompose;
mod norm;
mod support;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::space::{same_points, ExtMetric, PointSet};

pub use block::{block_embedding, BlockAction, BlockRep, FiniteGroup};
pub use decompose::{decompose_banded, DecompTerm, Decomposition};
pub use norm::{op_norm, op_norm_estimate, NormEstimate, NormOptions};
pub use support::{certify_membership, support_metric, MembershipCert};

pub type Scalar = Complex64;

/// A finitely supported matrix over a point set. Stored entries are never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    points: Arc<PointSet>,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseOp {
    pub fn zero(points: Arc<PointSet>) -> Self {
        SparseOp {
            points,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(points: Arc<PointSet>) -> Self {
        Self::diagonal(points.clone(), &vec![Scalar::new(1.0, 0.0); points.len()])
    }

    pub fn diagonal(points: Arc<PointSet>, values: &[Scalar]) -> Self {
        assert_eq!(values.len(), points.len());
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Scalar::ZERO)
            .map(|(i, &v)| ((i, i), v))
            .collect();
        SparseOp { points, entries }
    }

    /// Builds from `(row, column, value)` triples. Repeated positions add up;
    /// zeros are dropped.
    pub fn from_entries<I>(points: Arc<PointSet>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut op = SparseOp::zero(points);
        for (x, y, v) in entries {
            op.points.check_index(x)?;
            op.points.check_index(y)?;
            let sum = op.get(x, y) + v;
            op.set(x, y, sum);
        }
        Ok(op)
    }

    /// Real-valued convenience constructor.
    pub fn from_real<I>(points: Arc<PointSet>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::from_entries(
            points,
            entries
                .into_iter()
                .map(|(x, y, v)| (x, y, Scalar::new(v, 0.0))),
        )
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn get(&self, x: usize, y: usize) -> Scalar {
        self.entries.get(&(x, y)).copied().unwrap_or(Scalar::ZERO)
    }

    /// Sets one entry; setting zero removes it.
    pub fn set(&mut self, x: usize, y: usize, value: Scalar) {
        if value == Scalar::ZERO {
            self.entries.remove(&(x, y));
        } else {
            self.entries.insert((x, y), value);
        }
    }

    /// Nonzero entries `(row, column, value)`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Scalar)> + '_ {
        self.entries.iter().map(|(&(x, y), &v)| (x, y, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries of row `x`.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, Scalar)> + '_ {
        self.entries
            .range((x, 0)..(x + 1, 0))
            .map(|(&(_, y), &v)| (y, v))
    }

    pub fn adjoint(&self) -> SparseOp {
        SparseOp {
            points: Arc::clone(&self.points),
            entries: self
                .entries
                .iter()
                .map(|(&(x, y), v)| ((y, x), v.conj()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &SparseOp) -> Result<SparseOp> {
        same_points(&self.points, &other.points)?;
        let mut out = SparseOp::zero(Arc::clone(&self.points));
        for (&(x, k), &a) in &self.entries {
            for (y, b) in other.row(k) {
                let sum = out.get(x, y) + a * b;
                out.set(x, y, sum);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &SparseOp) -> Result<SparseOp> {
        same_points(&self.points, &other.points)?;
        let mut out = self.clone();
        for (x, y, v) in other.entries() {
            let sum = out.get(x, y) + v;
            out.set(x, y, sum);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparseOp) -> Result<SparseOp> {
        self.add(&other.scale(Scalar::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Scalar) -> SparseOp {
        let mut out = SparseOp::zero(Arc::clone(&self.points));
        for (x, y, v) in self.entries() {
            out.set(x, y, v * factor);
        }
        out
    }

    /// Applies the operator to a dense vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::ZERO; self.dim()];
        for (&(x, y), &a) in &self.entries {
            out[x] += a * v[y];
        }
        out
    }

    /// Applies the adjoint to a dense vector.
    pub fn apply_adjoint(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::ZERO; self.dim()];
        for (&(x, y), &a) in &self.entries {
            out[y] += a.conj() * v[x];
        }
        out
    }

    pub fn diagonal_part(&self) -> SparseOp {
        SparseOp {
            points: Arc::clone(&self.points),
            entries: self
                .entries
                .iter()
                .filter(|((x, y), _)| x == y)
                .map(|(&k, &v)| (k, v))
                .collect(),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Nonzero counts per row and per column.
    pub fn line_counts(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.dim();
        let (mut rows, mut cols) = (vec![0; n], vec![0; n]);
        for &(x, y) in self.entries.keys() {
            rows[x] += 1;
            cols[y] += 1;
        }
        (rows, cols)
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let n = self.dim();
        let mut m = vec![vec![Scalar::ZERO; n]; n];
        for (x, y, v) in self.entries() {
            m[x][y] = v;
        }
        m
    }
}

/// The pair of largest distance carrying a nonzero entry, with that distance.
pub fn propagation_witness(t: &SparseOp, d: &ExtMetric) -> Result<Option<(usize, usize, f64)>> {
    same_points(t.points(), d.points())?;
    let mut best: Option<(usize, usize, f64)> = None;
    for &(x, y) in t.entries.keys() {
        let r = d.get(x, y);
        if best.is_none_or(|(_, _, b)| r > b) {
            best = Some((x, y, r));
        }
    }
    Ok(best)
}

/// `max d(x, y)` over nonzero entries; 0 for the zero operator.
pub fn propagation(t: &SparseOp, d: &ExtMetric) -> Result<f64> {
    Ok(propagation_witness(t, d)?.map_or(0.0, |(_, _, r)| r))
}

/// Largest number of nonzero entries in a row or a column.
pub fn band_sparsity(t: &SparseOp) -> usize {
    let (rows, cols) = t.line_counts();
    rows.into_iter().chain(cols).max().unwrap_or(0)
}
