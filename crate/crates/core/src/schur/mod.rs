//! Higson–Roe families and the Schur multipliers they induce.
//!
//! A family assigns to every point `x` a nonnegative unit vector `ξ_x` over
//! the point set. It satisfies the Higson–Roe condition at scale `(R, ε, S)`
//! when
//!
//! * (HR1) values lie in `[0, 1]` and `‖ξ_x‖ = 1`,
//! * (HR2) `‖ξ_x − ξ_y‖ < ε` whenever `d(x, y) <= R`,
//! * (HR3) `supp ξ_x ⊆ B(x, S)`.
//!
//! The vectors are real and nonnegative, so the Gram kernel
//! `k(x, y) = <ξ_x, ξ_y>` satisfies `1 − k(x, y) = ½‖ξ_x − ξ_y‖²` exactly.

mod kernel;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{same_points, ExtMetric, NetData, PointSet, INF};

pub use kernel::{
    convergence_run, cp_decomposition, gram_kernel, schur_apply, CPTerm, CPTerms, SchurKernel,
    Stage,
};

/// Tolerance on `‖ξ_x‖ = 1`.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Sparse real vector: `(index, value)` pairs, indices strictly increasing,
/// values nonzero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVec(Vec<(usize, f64)>);

impl SparseVec {
    /// Sorts by index and drops zeros. Repeated indices are rejected.
    pub fn new(mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(i, _)| i);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(format!(
                "index {} given twice",
                w[0].0
            )));
        }
        Ok(SparseVec(entries))
    }

    /// `m^{-1/2}` on each of the given (distinct, increasing) indices.
    pub fn normalized_indicator(indices: &[usize]) -> Self {
        let value = (indices.len() as f64).sqrt().recip();
        SparseVec(indices.iter().map(|&i| (i, value)).collect())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0
            .binary_search_by_key(&i, |&(j, _)| j)
            .map_or(0.0, |k| self.0[k].1)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&(i, _)| i)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        let mut sum = 0.0;
        while let (Some(&&(i, u)), Some(&&(j, v))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    sum += u * v;
                    a.next();
                    b.next();
                }
            }
        }
        sum
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        let mut sum = 0.0;
        loop {
            let diff = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(&&(_, u)), None) => {
                    a.next();
                    u
                }
                (None, Some(&&(_, v))) => {
                    b.next();
                    v
                }
                (Some(&&(i, u)), Some(&&(j, v))) => match i.cmp(&j) {
                    std::cmp::Ordering::Less => {
                        a.next();
                        u
                    }
                    std::cmp::Ordering::Greater => {
                        b.next();
                        v
                    }
                    std::cmp::Ordering::Equal => {
                        a.next();
                        b.next();
                        u - v
                    }
                },
            };
            sum += diff * diff;
        }
        sum.sqrt()
    }
}

/// Declared scale `(R, ε, S)` of a family. Constructors fill in `S` and leave
/// `R = 0`, `ε = ∞` until a caller sets them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HRParams {
    pub radius: f64,
    pub eps: f64,
    pub support: f64,
}

impl HRParams {
    pub fn support_only(support: f64) -> Self {
        HRParams {
            radius: 0.0,
            eps: INF,
            support,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HRFamily {
    points: Arc<PointSet>,
    vectors: Vec<SparseVec>,
    pub params: HRParams,
}

impl HRFamily {
    /// Raw family; (HR1) is checked by [`hr_check`] and [`gram_kernel`], not here.
    pub fn new(points: Arc<PointSet>, vectors: Vec<SparseVec>, params: HRParams) -> Result<Self> {
        if vectors.len() != points.len() {
            return Err(Error::InvalidArgument(format!(
                "{} vectors for {} points",
                vectors.len(),
                points.len()
            )));
        }
        for v in &vectors {
            for i in v.support() {
                points.check_index(i)?;
            }
        }
        Ok(HRFamily {
            points,
            vectors,
            params,
        })
    }

    pub fn with_params(mut self, params: HRParams) -> Self {
        self.params = params;
        self
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, x: usize) -> &SparseVec {
        &self.vectors[x]
    }

    pub fn vectors(&self) -> &[SparseVec] {
        &self.vectors
    }

    /// `max_x max_{z ∈ supp ξ_x} d(x, z)` with the attaining pair.
    pub fn support_radius(&self, d: &ExtMetric) -> (f64, Option<(usize, usize)>) {
        let mut best = (0.0, None);
        for (x, v) in self.vectors.iter().enumerate() {
            for z in v.support() {
                let r = d.get(x, z);
                if best.1.is_none() || r > best.0 {
                    best = (r, Some((x, z)));
                }
            }
        }
        best
    }
}

/// Checks (HR1): nonnegative values in `[0, 1]` and unit norm.
pub fn check_hr1(xi: &HRFamily) -> Result<()> {
    let points = xi.points();
    for (x, v) in xi.vectors.iter().enumerate() {
        for &(z, value) in v.entries() {
            if value < 0.0 || value.is_nan() {
                return Err(Error::NegativeValue {
                    x: points.id(x).into(),
                    z: points.id(z).into(),
                    value,
                });
            }
            if value > 1.0 {
                return Err(Error::Hr1Violation {
                    x: points.id(x).into(),
                    reason: format!("value {value} at `{}` exceeds 1", points.id(z)),
                });
            }
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Hr1Violation {
                x: points.id(x).into(),
                reason: format!("norm {norm} is not 1"),
            });
        }
    }
    Ok(())
}

/// Which pairs (HR2) ranges over: `d <= R` or `d < R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Closed(f64),
    Open(f64),
}

impl Scale {
    fn admits(self, dist: f64) -> bool {
        match self {
            Scale::Closed(r) => dist <= r,
            Scale::Open(r) => dist < r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HRReport {
    pub scale: Scale,
    pub eps: f64,
    pub support_bound: f64,
    /// `ε* = max ‖ξ_x − ξ_y‖` over admitted pairs (0 if only `x = y` qualifies).
    pub max_deviation: f64,
    pub deviation_witness: Option<(usize, usize)>,
    /// `S* = max` support radius.
    pub support_radius: f64,
    pub support_witness: Option<(usize, usize)>,
    pub passes: bool,
}

impl HRReport {
    pub fn hr2_ok(&self) -> bool {
        self.max_deviation < self.eps
    }

    pub fn hr3_ok(&self) -> bool {
        self.support_radius <= self.support_bound
    }
}

/// (HR1)–(HR3) at radius `R` (closed) and bound `eps`, with `S` taken from
/// the family's declared parameters.
pub fn hr_check(xi: &HRFamily, d: &ExtMetric, radius: f64, eps: f64) -> Result<HRReport> {
    hr_check_at(xi, d, Scale::Closed(radius), eps, xi.params.support)
}

/// General form of [`hr_check`].
pub fn hr_check_at(
    xi: &HRFamily,
    d: &ExtMetric,
    scale: Scale,
    eps: f64,
    support_bound: f64,
) -> Result<HRReport> {
    same_points(xi.points(), d.points())?;
    check_hr1(xi)?;
    let n = xi.len();
    let (mut max_deviation, mut deviation_witness) = (0.0f64, None);
    for x in 0..n {
        for y in (x + 1)..n {
            if scale.admits(d.get(x, y)) {
                let dev = xi.vectors[x].distance(&xi.vectors[y]);
                if deviation_witness.is_none() || dev > max_deviation {
                    max_deviation = dev;
                    deviation_witness = Some((x, y));
                }
            }
        }
    }
    let (support_radius, support_witness) = xi.support_radius(d);
    let mut report = HRReport {
        scale,
        eps,
        support_bound,
        max_deviation,
        deviation_witness,
        support_radius,
        support_witness,
        passes: false,
    };
    report.passes = report.hr2_ok() && report.hr3_ok();
    Ok(report)
}

/// `ξ_x = |C(x)|^{-1/2} · 1_{C(x)}` for the coarse component `C(x)` of `x`.
///
/// Constant on components, so (HR2) holds with deviation 0 at every radius.
pub fn uniform_hr_family(d: &ExtMetric) -> HRFamily {
    let mut vectors = vec![SparseVec::default(); d.len()];
    let mut support = 0.0f64;
    for class in d.coarse_components() {
        support = support.max(d.diameter_of(&class));
        let v = SparseVec::normalized_indicator(&class);
        for &x in &class {
            vectors[x] = v.clone();
        }
    }
    HRFamily {
        points: Arc::clone(d.points()),
        vectors,
        params: HRParams::support_only(support),
    }
}

/// `ξ_x` = normalized indicator of `B(x, S) ∩ net`. Requires `S >= l`, so
/// every intersection contains the assigned net point.
pub fn ball_averaging_family(d: &ExtMetric, net: &NetData, support: f64) -> Result<HRFamily> {
    if support < net.l {
        return Err(Error::InvalidArgument(format!(
            "support radius {support} is below the net radius {}",
            net.l
        )));
    }
    let vectors = (0..d.len())
        .map(|x| {
            let hits: Vec<usize> = net
                .net
                .iter()
                .copied()
                .filter(|&u| d.get(x, u) <= support)
                .collect();
            SparseVec::normalized_indicator(&hits)
        })
        .collect();
    Ok(HRFamily {
        points: Arc::clone(d.points()),
        vectors,
        params: HRParams::support_only(support),
    })
}

/// Extends a family living on the net to all points: `η_x = ξ_{p(x)}`.
///
/// Only the vectors of net points are read. If those satisfy the condition
/// at `(R, ε, S)` on the net, then `η` satisfies it at `(R − 2l, ε, S + l)`
/// with the radius comparison strict (`d(x, y) < R − 2l`); the returned
/// parameters record that shifted scale.
pub fn net_transport(
    xi_on_net: &HRFamily,
    net: &NetData,
    radius: f64,
    eps: f64,
    support: f64,
) -> Result<HRFamily> {
    let points = xi_on_net.points();
    for &u in &net.net {
        let v = xi_on_net.vector(u);
        if v.is_empty() {
            return Err(Error::MissingNetVector(points.id(u).into()));
        }
        if let Some(z) = v.support().find(|&z| !net.contains(z)) {
            return Err(Error::InvalidArgument(format!(
                "vector of net point `{}` reaches `{}` outside the net",
                points.id(u),
                points.id(z)
            )));
        }
    }
    let vectors = net
        .assignment
        .iter()
        .map(|&p| xi_on_net.vector(p).clone())
        .collect();
    Ok(HRFamily {
        points: Arc::clone(points),
        vectors,
        params: HRParams {
            radius: radius - 2.0 * net.l,
            eps,
            support: support + net.l,
        },
    })
}
