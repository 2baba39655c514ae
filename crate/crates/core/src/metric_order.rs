//! The directed set of bounded-geometry metrics dominating a base metric.
//!
//! A metric `d` belongs to the set over a base `d0` when
//!
//! * (D1) its discreteness gap is at least 1,
//! * (D2) `d >= d0 / C` for some `C > 0`, and `d0 = ∞` forces `d = ∞`,
//! * (D3) it has bounded geometry. Every finite space does, so the
//!   certificate records the growth profile instead of a verdict.
//!
//! Order: `d1 ⪯ d2` iff `d2 <= d1` pointwise. The join of two members is
//! the geodesic metric of the complete graph with edge lengths
//! `min(d1, d2)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{same_points, ExtMetric, GrowthProfile, PointSet, INF};

/// Default cap on the number of points for the cubic shortest-path step.
pub const DEFAULT_MAX_POINTS: usize = 2048;

/// A domination constant `C = num / den`, kept as the ratio `d0(x,y) / d(x,y)`
/// of the pair that attains it so that `d >= d0 / C` can be checked by
/// cross-multiplication instead of division.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domination {
    pub num: f64,
    pub den: f64,
}

impl Domination {
    /// `C = 0`: nothing to dominate (no pair with both distances finite).
    pub const VACUOUS: Domination = Domination { num: 0.0, den: 1.0 };

    pub fn new(num: f64, den: f64) -> Self {
        debug_assert!(num >= 0.0 && den > 0.0 && num.is_finite() && den.is_finite());
        Domination { num, den }
    }

    pub fn value(&self) -> f64 {
        self.num / self.den
    }

    /// Does `d >= d0 / C` hold for the pair `(d0, d)`? An infinite `d0`
    /// requires an infinite `d`.
    pub fn holds(&self, d0: f64, d: f64) -> bool {
        if d0.is_infinite() {
            return d.is_infinite();
        }
        if d.is_infinite() || d0 == 0.0 {
            return true;
        }
        d * self.num >= d0 * self.den
    }

    /// Exact comparison of the two ratios.
    pub fn cmp_ratio(&self, other: &Domination) -> Ordering {
        (self.num * other.den).total_cmp(&(other.num * self.den))
    }

    pub fn max(self, other: Domination) -> Domination {
        if self.cmp_ratio(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

/// Witness that `candidate` belongs to the directed set over `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCert {
    pub base: ExtMetric,
    pub candidate: ExtMetric,
    /// Discreteness gap of the candidate, at least 1.
    pub gap: f64,
    /// Smallest `C` with `d >= d0 / C`.
    pub domination: Domination,
    /// Pair attaining `C`, if any pair has both distances finite and `d0 > 0`.
    pub domination_witness: Option<(usize, usize)>,
    pub profile: GrowthProfile,
}

impl MetricCert {
    pub fn c(&self) -> f64 {
        self.domination.value()
    }
}

/// Checks (D1) and (D2) and records the growth profile.
///
/// The reported `C` is the smallest valid one: the largest ratio
/// `d0(x,y) / d(x,y)` over pairs where both are finite. When no such pair
/// exists `C` is reported as 0.
pub fn check_membership(base: &ExtMetric, d: &ExtMetric) -> Result<MetricCert> {
    same_points(base.points(), d.points())?;
    let points = d.points();
    if let Some((x, y, gap)) = d.gap_witness() {
        if gap < 1.0 {
            return Err(Error::GapBelowOne {
                x: points.id(x).into(),
                y: points.id(y).into(),
                value: gap,
            });
        }
    }
    let n = d.len();
    let mut domination = Domination::VACUOUS;
    let mut witness = None;
    for x in 0..n {
        for y in (x + 1)..n {
            let (d0, dv) = (base.get(x, y), d.get(x, y));
            if d0.is_infinite() {
                if dv.is_finite() {
                    return Err(Error::FiniteOverInfinite {
                        x: points.id(x).into(),
                        y: points.id(y).into(),
                        value: dv,
                    });
                }
                continue;
            }
            if dv.is_infinite() {
                continue;
            }
            let ratio = Domination::new(d0, dv);
            if ratio.cmp_ratio(&domination) == Ordering::Greater {
                domination = ratio;
                witness = Some((x, y));
            }
        }
    }
    Ok(MetricCert {
        base: base.clone(),
        candidate: d.clone(),
        gap: d.discreteness_gap(),
        domination,
        domination_witness: witness,
        profile: d.growth_profile(),
    })
}

/// `d1 ⪯ d2`: `d2 <= d1` at every pair.
pub fn precedes(d1: &ExtMetric, d2: &ExtMetric) -> Result<bool> {
    same_points(d1.points(), d2.points())?;
    Ok(d1.matrix().iter().zip(d2.matrix()).all(|(a, b)| b <= a))
}

/// Complete graph with edge lengths `l(x, y)`, symmetric and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengthGraph {
    points: Arc<PointSet>,
    lengths: Vec<f64>,
}

impl EdgeLengthGraph {
    /// Edge lengths `min(d1, d2)`.
    pub fn pointwise_min(d1: &ExtMetric, d2: &ExtMetric) -> Result<Self> {
        same_points(d1.points(), d2.points())?;
        let lengths = d1
            .matrix()
            .iter()
            .zip(d2.matrix())
            .map(|(&a, &b)| a.min(b))
            .collect();
        Ok(EdgeLengthGraph {
            points: Arc::clone(d1.points()),
            lengths,
        })
    }

    pub fn length(&self, x: usize, y: usize) -> f64 {
        self.lengths[x * self.points.len() + y]
    }

    /// Shortest-path metric (Floyd–Warshall over all `n^3` relaxations).
    pub fn geodesic(&self, max_points: usize) -> Result<ExtMetric> {
        let n = self.points.len();
        if n > max_points {
            return Err(Error::TooLarge {
                len: n,
                limit: max_points,
            });
        }
        let mut dist = self.lengths.clone();
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik == INF {
                    continue;
                }
                for j in 0..n {
                    let via = dik + dist[k * n + j];
                    if via < dist[i * n + j] {
                        dist[i * n + j] = via;
                    }
                }
            }
        }
        Ok(ExtMetric::from_matrix_unchecked(
            Arc::clone(&self.points),
            dist,
        ))
    }
}

/// An upper bound for `d1` and `d2` in the directed set over `base`.
///
/// Both inputs must pass [`check_membership`]; the join then passes it too,
/// with a constant no larger than the larger of the two.
pub fn join_metric(base: &ExtMetric, d1: &ExtMetric, d2: &ExtMetric) -> Result<ExtMetric> {
    join_metric_with_limit(base, d1, d2, DEFAULT_MAX_POINTS)
}

pub fn join_metric_with_limit(
    base: &ExtMetric,
    d1: &ExtMetric,
    d2: &ExtMetric,
    max_points: usize,
) -> Result<ExtMetric> {
    check_membership(base, d1)?;
    check_membership(base, d2)?;
    EdgeLengthGraph::pointwise_min(d1, d2)?.geodesic(max_points)
}

/// `d0` on `subset × subset`, infinite on every other off-diagonal pair.
pub fn restriction_metric(base: &ExtMetric, subset: &[usize]) -> Result<ExtMetric> {
    let n = base.len();
    let mut inside = vec![false; n];
    for &y in subset {
        base.points().check_index(y)?;
        inside[y] = true;
    }
    let mut dist = vec![INF; n * n];
    for x in 0..n {
        dist[x * n + x] = 0.0;
        if !inside[x] {
            continue;
        }
        for y in 0..n {
            if inside[y] {
                dist[x * n + y] = base.get(x, y);
            }
        }
    }
    Ok(ExtMetric::from_matrix_unchecked(
        Arc::clone(base.points()),
        dist,
    ))
}

/// A pair `(Y, d)`: a subset together with a metric satisfying (D1) and
/// (D2) over the base; (D3) is replaced by the growth profile of `Y` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct EPair {
    pub subset: BTreeSet<usize>,
    pub metric: ExtMetric,
    pub subset_profile: GrowthProfile,
}

impl EPair {
    pub fn new(
        base: &ExtMetric,
        subset: impl IntoIterator<Item = usize>,
        metric: ExtMetric,
    ) -> Result<Self> {
        let subset: BTreeSet<usize> = subset.into_iter().collect();
        for &y in &subset {
            metric.points().check_index(y)?;
        }
        check_membership(base, &metric)?;
        let ys: Vec<usize> = subset.iter().copied().collect();
        let sub_points = Arc::new(PointSet::new(ys.iter().map(|&y| metric.points().id(y)))?);
        let k = ys.len();
        let dist = (0..k * k)
            .map(|i| metric.get(ys[i / k], ys[i % k]))
            .collect();
        let subset_profile = ExtMetric::from_matrix_unchecked(sub_points, dist).growth_profile();
        Ok(EPair {
            subset,
            metric,
            subset_profile,
        })
    }
}

/// `(Y1, d1) ⪯ (Y2, d2)` iff `Y1 ⊆ Y2` and `d1 ⪯ d2`.
pub fn epair_precedes(p1: &EPair, p2: &EPair) -> Result<bool> {
    let by_metric = precedes(&p1.metric, &p2.metric)?;
    Ok(p1.subset.is_subset(&p2.subset) && by_metric)
}
