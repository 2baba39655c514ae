use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_hr1, hr_check, HRFamily};
use crate::error::{Error, Result};
use crate::operators::{op_norm, Scalar, SparseOp};
use crate::space::{same_points, ExtMetric, PointSet};

/// Symmetric real kernel `k(x, y)` with values in `[-1, 1]`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurKernel {
    points: Arc<PointSet>,
    values: Vec<f64>,
    derived: bool,
}

impl SchurKernel {
    /// Kernel from an explicit function; checks symmetry and range.
    pub fn from_fn(points: Arc<PointSet>, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = points.len();
        let mut values = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                values[x * n + y] = f(x, y);
            }
        }
        for x in 0..n {
            for y in 0..n {
                let v = values[x * n + y];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "kernel value {v} at ({}, {}) is outside [-1, 1]",
                        points.id(x),
                        points.id(y)
                    )));
                }
                if v != values[y * n + x] {
                    return Err(Error::InvalidArgument(format!(
                        "kernel is not symmetric at ({}, {})",
                        points.id(x),
                        points.id(y)
                    )));
                }
            }
        }
        Ok(SchurKernel {
            points,
            values,
            derived: false,
        })
    }

    /// `k(x, y) = [x = y]`.
    pub fn identity(points: Arc<PointSet>) -> Self {
        Self::from_fn(points, |x, y| if x == y { 1.0 } else { 0.0 }).expect("valid kernel")
    }

    /// `k ≡ 1`.
    pub fn ones(points: Arc<PointSet>) -> Self {
        Self::from_fn(points, |_, _| 1.0).expect("valid kernel")
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.points.len() + y]
    }

    /// Whether the kernel came from [`gram_kernel`].
    pub fn is_derived(&self) -> bool {
        self.derived
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.points.len();
        if n == 0 {
            return 0.0;
        }
        let m = DMatrix::from_row_slice(n, n, &self.values);
        SymmetricEigen::new(m).eigenvalues.min()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// `k(x, y) = <ξ_x, ξ_y>`.
///
/// Identical vectors get exactly 1, so a family that is constant on a set
/// leaves every entry inside it untouched.
pub fn gram_kernel(xi: &HRFamily) -> Result<SchurKernel> {
    check_hr1(xi)?;
    let n = xi.len();
    let mut values = vec![0.0; n * n];
    for x in 0..n {
        values[x * n + x] = 1.0;
        for y in (x + 1)..n {
            let (a, b) = (xi.vector(x), xi.vector(y));
            let k = if a == b { 1.0 } else { a.dot(b).min(1.0) };
            values[x * n + y] = k;
            values[y * n + x] = k;
        }
    }
    Ok(SchurKernel {
        points: Arc::clone(xi.points()),
        values,
        derived: true,
    })
}

/// Schur product `M_k(T)`: `[M_k(T)]_{xy} = k(x, y) T_{xy}`.
pub fn schur_apply(k: &SchurKernel, t: &SparseOp) -> Result<SparseOp> {
    same_points(k.points(), t.points())?;
    let mut out = SparseOp::zero(Arc::clone(t.points()));
    for (x, y, v) in t.entries() {
        out.set(x, y, v * k.get(x, y));
    }
    Ok(out)
}

/// One multiplication operator `φ_z(x) = ξ_x(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPTerm {
    pub center: usize,
    /// Nonzero values, by point.
    pub phi: BTreeMap<usize, f64>,
}

impl CPTerm {
    fn conjugate(&self, t: &SparseOp, acc: &mut BTreeMap<(usize, usize), Scalar>) {
        for (x, y, v) in t.entries() {
            if let (Some(&a), Some(&b)) = (self.phi.get(&x), self.phi.get(&y)) {
                *acc.entry((x, y)).or_default() += v * (a * b);
            }
        }
    }
}

/// Terms of `M_k(T) = Σ_z φ_z T φ_z`, grouped into classes of pairwise
/// disjoint supports.
#[derive(Debug, Clone, PartialEq)]
pub struct CPTerms {
    points: Arc<PointSet>,
    pub terms: Vec<CPTerm>,
    /// Term indices per class, in first-fit order.
    pub groups: Vec<Vec<usize>>,
    /// Largest conflict degree plus one.
    pub coloring_bound: usize,
}

impl CPTerms {
    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// `Σ_z φ_z T φ_z`.
    pub fn apply(&self, t: &SparseOp) -> Result<SparseOp> {
        same_points(&self.points, t.points())?;
        let mut acc = BTreeMap::new();
        for term in &self.terms {
            term.conjugate(t, &mut acc);
        }
        let mut out = SparseOp::zero(Arc::clone(&self.points));
        for ((x, y), v) in acc {
            out.set(x, y, v);
        }
        Ok(out)
    }

    /// One class summed: `φ T φ` with `φ = Σ_{z ∈ class} φ_z`.
    pub fn apply_group(&self, group: usize, t: &SparseOp) -> Result<SparseOp> {
        same_points(&self.points, t.points())?;
        let mut phi = BTreeMap::new();
        for &i in &self.groups[group] {
            for (&x, &v) in &self.terms[i].phi {
                *phi.entry(x).or_insert(0.0) += v;
            }
        }
        let merged = CPTerm { center: 0, phi };
        let mut acc = BTreeMap::new();
        merged.conjugate(t, &mut acc);
        let mut out = SparseOp::zero(Arc::clone(&self.points));
        for ((x, y), v) in acc {
            out.set(x, y, v);
        }
        Ok(out)
    }

    /// Largest entrywise gap between `Σ φ_z T φ_z` and `M_k(T)` over the tests.
    pub fn certify(&self, k: &SchurKernel, tests: &[SparseOp]) -> Result<f64> {
        let mut worst = 0.0f64;
        for t in tests {
            let diff = self.apply(t)?.sub(&schur_apply(k, t)?)?;
            worst = worst.max(diff.max_abs_entry());
        }
        Ok(worst)
    }
}

/// Splits `M_k` for the Gram kernel of `xi` into the terms `φ_z(x) = ξ_x(z)`,
/// after checking every support lies within `S` of its point.
pub fn cp_decomposition(xi: &HRFamily, d: &ExtMetric, support: f64) -> Result<CPTerms> {
    same_points(xi.points(), d.points())?;
    check_hr1(xi)?;
    let points = Arc::clone(xi.points());
    let (radius, witness) = xi.support_radius(d);
    if let Some((x, z)) = witness.filter(|_| radius > support) {
        return Err(Error::SupportTooWide {
            x: points.id(x).into(),
            z: points.id(z).into(),
            distance: radius,
            radius: support,
        });
    }

    let mut by_center: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
    for (x, v) in xi.vectors().iter().enumerate() {
        for &(z, value) in v.entries() {
            by_center.entry(z).or_default().insert(x, value);
        }
    }
    let terms: Vec<CPTerm> = by_center
        .into_iter()
        .map(|(center, phi)| CPTerm { center, phi })
        .collect();
    let slot: BTreeMap<usize, usize> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.center, i))
        .collect();

    let mut conflicts = vec![BTreeSet::new(); terms.len()];
    for v in xi.vectors() {
        let ids: Vec<usize> = v.support().map(|z| slot[&z]).collect();
        for &a in &ids {
            for &b in &ids {
                if a != b {
                    conflicts[a].insert(b);
                }
            }
        }
    }
    let coloring_bound = conflicts
        .iter()
        .map(BTreeSet::len)
        .max()
        .map_or(0, |m| m + 1);

    let mut color = vec![usize::MAX; terms.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..terms.len() {
        let c = (0..)
            .find(|&c| conflicts[i].iter().all(|&j| color[j] != c))
            .expect("some class is free");
        if c == groups.len() {
            groups.push(Vec::new());
        }
        groups[c].push(i);
        color[i] = c;
    }

    Ok(CPTerms {
        points,
        terms,
        groups,
        coloring_bound,
    })
}

/// One step of a convergence schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub radius: f64,
    pub eps: f64,
    pub family: HRFamily,
}

/// `‖M_{k_n}(T) − T‖` for each stage, after checking each family at its scale.
pub fn convergence_run(
    d: &ExtMetric,
    t: &SparseOp,
    stages: &[Stage],
    tol: f64,
) -> Result<Vec<f64>> {
    same_points(d.points(), t.points())?;
    stages
        .iter()
        .enumerate()
        .map(|(index, stage)| {
            let failed = |reason: String| Error::StageFailed { index, reason };
            let report = hr_check(&stage.family, d, stage.radius, stage.eps)
                .map_err(|e| failed(e.to_string()))?;
            if !report.passes {
                return Err(failed(format!(
                    "deviation {} against eps {}, support radius {} against {}",
                    report.max_deviation, report.eps, report.support_radius, report.support_bound
                )));
            }
            let k = gram_kernel(&stage.family)?;
            op_norm(&schur_apply(&k, t)?.sub(t)?, tol)
        })
        .collect()
}
