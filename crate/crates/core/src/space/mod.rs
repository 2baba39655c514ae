//! Finite extended metric spaces.
//!
//! Distances are `f64` values in `[0, ∞]`, with [`INF`] a first-class value.
//! IEEE arithmetic already gives the conventions used throughout the crate:
//! `∞ + a = ∞`, `min(∞, a) = a`, and `∞ / c = ∞` for `c > 0`.
//!
//! Balls are closed: `ball(x, r) = { y : d(x, y) <= r }`.

mod net;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use net::{greedy_clusters, greedy_net, ClusterChain, NetData};

/// The infinite distance.
pub const INF: f64 = f64::INFINITY;

/// An ordered set of distinct point identifiers.
///
/// The order fixed here is the matrix index order of every operator, kernel
/// and metric built over the set, and the scan order of every greedy routine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl PointSet {
    /// Builds a point set. Ids must be non-empty, whitespace-free, and must
    /// not start with `#` (they appear verbatim in the exchange formats).
    pub fn new<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if id.is_empty() || id.starts_with('#') || id.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!("bad point id {id:?}")));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicatePoint(id.clone()));
            }
        }
        Ok(PointSet { ids, index })
    }

    /// Points named `0, 1, ..., n-1`.
    pub fn range(n: usize) -> Self {
        PointSet::new((0..n).map(|i| i.to_string())).expect("numeric ids are valid")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Resolves a list of ids to indices.
    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter().map(|id| self.index_of(id.as_ref())).collect()
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        }
    }
}

pub(crate) fn same_points(a: &PointSet, b: &PointSet) -> Result<()> {
    if a.ids == b.ids {
        Ok(())
    } else {
        Err(Error::PointSetMismatch(format!(
            "[{}] vs [{}]",
            a.ids.join(" "),
            b.ids.join(" ")
        )))
    }
}

/// A raw pair-value table over a point set, before validation.
///
/// Entries are `(x, y, value)` by index, in either order. Pairs that are
/// absent are read as infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub points: Arc<PointSet>,
    pub entries: Vec<(usize, usize, f64)>,
}

/// One violated metric axiom, named by its witness.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    /// Negative or NaN value.
    InvalidValue {
        x: String,
        y: String,
        value: f64,
    },
    NonzeroDiagonal {
        x: String,
        value: f64,
    },
    SymmetryConflict {
        x: String,
        y: String,
        first: f64,
        second: f64,
    },
    ZeroOffDiagonal {
        x: String,
        y: String,
    },
    /// `d(x, y) > d(x, via) + d(via, y)`.
    Triangle {
        x: String,
        y: String,
        via: String,
        direct: f64,
        detour: f64,
    },
}

impl MetricViolation {
    /// Short stable rule name, used in reports.
    pub fn rule(&self) -> &'static str {
        match self {
            MetricViolation::InvalidValue { .. } => "invalid-value",
            MetricViolation::NonzeroDiagonal { .. } => "nonzero-diagonal",
            MetricViolation::SymmetryConflict { .. } => "symmetry",
            MetricViolation::ZeroOffDiagonal { .. } => "zero-off-diagonal",
            MetricViolation::Triangle { .. } => "triangle",
        }
    }
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::InvalidValue { x, y, value } => {
                write!(f, "d({x}, {y}) = {value} is not a distance")
            }
            MetricViolation::NonzeroDiagonal { x, value } => {
                write!(f, "d({x}, {x}) = {value} != 0")
            }
            MetricViolation::SymmetryConflict {
                x,
                y,
                first,
                second,
            } => write!(f, "d({x}, {y}) given as both {first} and {second}"),
            MetricViolation::ZeroOffDiagonal { x, y } => {
                write!(f, "d({x}, {y}) = 0 for distinct points")
            }
            MetricViolation::Triangle {
                x,
                y,
                via,
                direct,
                detour,
            } => write!(
                f,
                "d({x}, {y}) = {direct} > d({x}, {via}) + d({via}, {y}) = {detour}"
            ),
        }
    }
}

/// Checks a pair-value table against the metric axioms.
///
/// Returns every violated axiom, not just the first. Triangle witnesses are
/// reported once per unordered pair `{x, y}` and intermediate point.
pub fn validate_metric(table: &MetricTable) -> Result<ExtMetric> {
    let points = &table.points;
    let n = points.len();
    let mut dist = vec![INF; n * n];
    let mut given = vec![false; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
    }
    let mut violations = Vec::new();
    for &(x, y, value) in &table.entries {
        points.check_index(x)?;
        points.check_index(y)?;
        let (sx, sy) = (points.id(x).to_string(), points.id(y).to_string());
        if value.is_nan() || value < 0.0 {
            violations.push(MetricViolation::InvalidValue {
                x: sx,
                y: sy,
                value,
            });
            continue;
        }
        if x == y {
            if value != 0.0 {
                violations.push(MetricViolation::NonzeroDiagonal { x: sx, value });
            }
            continue;
        }
        if value == 0.0 {
            violations.push(MetricViolation::ZeroOffDiagonal { x: sx, y: sy });
            continue;
        }
        let (a, b) = (x.min(y), x.max(y));
        if given[a * n + b] {
            let first = dist[a * n + b];
            if first != value {
                violations.push(MetricViolation::SymmetryConflict {
                    x: points.id(a).to_string(),
                    y: points.id(b).to_string(),
                    first,
                    second: value,
                });
            }
            continue;
        }
        given[a * n + b] = true;
        dist[a * n + b] = value;
        dist[b * n + a] = value;
    }
    for x in 0..n {
        for y in (x + 1)..n {
            let direct = dist[x * n + y];
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let detour = dist[x * n + z] + dist[z * n + y];
                if direct > detour {
                    violations.push(MetricViolation::Triangle {
                        x: points.id(x).to_string(),
                        y: points.id(y).to_string(),
                        via: points.id(z).to_string(),
                        direct,
                        detour,
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(ExtMetric {
            points: Arc::clone(points),
            dist,
        })
    } else {
        Err(Error::InvalidMetric(violations))
    }
}

/// A validated extended metric over a [`PointSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtMetric {
    points: Arc<PointSet>,
    dist: Vec<f64>,
}

impl ExtMetric {
    /// Validates the metric given by `f` on pairs `x < y`.
    pub fn from_fn(points: Arc<PointSet>, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = points.len();
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for x in 0..n {
            for y in (x + 1)..n {
                entries.push((x, y, f(x, y)));
            }
        }
        validate_metric(&MetricTable { points, entries })
    }

    /// Wraps a full distance matrix that is already known to be a metric
    /// (for instance, the output of a shortest-path computation).
    pub(crate) fn from_matrix_unchecked(points: Arc<PointSet>, dist: Vec<f64>) -> Self {
        debug_assert_eq!(dist.len(), points.len() * points.len());
        ExtMetric { points, dist }
    }

    /// All off-diagonal distances infinite.
    pub fn discrete(points: Arc<PointSet>) -> Self {
        let n = points.len();
        let mut dist = vec![INF; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        ExtMetric { points, dist }
    }

    /// All off-diagonal distances equal to `value` (a clique).
    pub fn uniform(points: Arc<PointSet>, value: f64) -> Result<Self> {
        Self::from_fn(points, |_, _| value)
    }

    /// The path metric `|i - j|` on points `0..n`.
    pub fn line(n: usize) -> Self {
        let points = Arc::new(PointSet::range(n));
        let dist = (0..n * n).map(|k| (k / n).abs_diff(k % n) as f64).collect();
        ExtMetric { points, dist }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `d(x, y)` by index.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.len() + y]
    }

    /// `d(x, y)` by id.
    pub fn dist(&self, x: &str, y: &str) -> Result<f64> {
        Ok(self.get(self.points.index_of(x)?, self.points.index_of(y)?))
    }

    pub(crate) fn matrix(&self) -> &[f64] {
        &self.dist
    }

    /// Finite off-diagonal pairs `x < y`, lexicographic in point order.
    pub fn to_table(&self) -> MetricTable {
        let n = self.len();
        let mut entries = Vec::new();
        for x in 0..n {
            for y in (x + 1)..n {
                let v = self.get(x, y);
                if v.is_finite() {
                    entries.push((x, y, v));
                }
            }
        }
        MetricTable {
            points: Arc::clone(&self.points),
            entries,
        }
    }

    /// Closed ball `{ y : d(x, y) <= radius }`, in point order.
    pub fn ball(&self, x: usize, radius: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| self.get(x, y) <= radius)
            .collect()
    }

    /// Closed ball around the point named `x`, as ids.
    pub fn ball_of(&self, x: &str, radius: f64) -> Result<Vec<&str>> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "radius {radius} is negative"
            )));
        }
        let x = self.points.index_of(x)?;
        Ok(self
            .ball(x, radius)
            .into_iter()
            .map(|y| self.points.id(y))
            .collect())
    }

    pub fn ball_size(&self, x: usize, radius: f64) -> usize {
        (0..self.len())
            .filter(|&y| self.get(x, y) <= radius)
            .count()
    }

    /// `max_x |ball(x, radius)|`; 0 for the empty space.
    pub fn max_ball_size(&self, radius: f64) -> usize {
        (0..self.len())
            .map(|x| self.ball_size(x, radius))
            .max()
            .unwrap_or(0)
    }

    /// Growth profile evaluated at every distinct finite distance.
    pub fn growth_profile(&self) -> GrowthProfile {
        let n = self.len();
        let mut breakpoints: Vec<f64> = self
            .dist
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let mut counts = vec![0usize; breakpoints.len()];
        let mut row = Vec::with_capacity(n);
        for x in 0..n {
            row.clear();
            row.extend((0..n).map(|y| self.get(x, y)).filter(|v| v.is_finite()));
            row.sort_by(f64::total_cmp);
            for (count, &r) in counts.iter_mut().zip(&breakpoints) {
                let inside = row.partition_point(|&v| v <= r);
                *count = (*count).max(inside);
            }
        }
        GrowthProfile {
            breakpoints,
            counts,
        }
    }

    /// `min_{x != y} d(x, y)`; infinite for a singleton or an all-infinite metric.
    pub fn discreteness_gap(&self) -> f64 {
        self.gap_witness().map_or(INF, |(_, _, v)| v)
    }

    /// The first pair (in scan order) attaining the discreteness gap.
    pub fn gap_witness(&self) -> Option<(usize, usize, f64)> {
        let n = self.len();
        let mut best: Option<(usize, usize, f64)> = None;
        for x in 0..n {
            for y in (x + 1)..n {
                let v = self.get(x, y);
                if v.is_finite() && best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((x, y, v));
                }
            }
        }
        best
    }

    /// Classes of points at pairwise finite distance, ordered by first member.
    pub fn coarse_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let class: Vec<usize> = (x..n).filter(|&y| self.get(x, y).is_finite()).collect();
            for &y in &class {
                seen[y] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// The metric on `subset` alone, over a new point set of those ids in the
    /// given order.
    pub fn subspace(&self, subset: &[usize]) -> Result<ExtMetric> {
        for &x in subset {
            self.points.check_index(x)?;
        }
        let points = Arc::new(PointSet::new(subset.iter().map(|&x| self.points.id(x)))?);
        let dist = subset
            .iter()
            .flat_map(|&x| subset.iter().map(move |&y| self.get(x, y)))
            .collect();
        Ok(ExtMetric { points, dist })
    }

    /// Diameter of a subset; 0 for subsets with fewer than two points.
    pub fn diameter_of(&self, subset: &[usize]) -> f64 {
        let mut diam = 0.0f64;
        for (i, &x) in subset.iter().enumerate() {
            for &y in &subset[i + 1..] {
                diam = diam.max(self.get(x, y));
            }
        }
        diam
    }
}

/// `R ↦ max_x |B(x, R)|`, sampled at every distinct finite distance.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    pub breakpoints: Vec<f64>,
    pub counts: Vec<usize>,
}

impl GrowthProfile {
    /// The largest ball size at radius `r`, i.e. the count at the largest
    /// breakpoint `<= r`. Zero below the first breakpoint.
    pub fn count_at(&self, r: f64) -> usize {
        match self.breakpoints.partition_point(|&b| b <= r) {
            0 => 0,
            k => self.counts[k - 1],
        }
    }
}
