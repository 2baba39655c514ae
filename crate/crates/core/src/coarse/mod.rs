//! Coarse maps between finite extended metric spaces, checked at every
//! finite scale the spaces exhibit, and the fiber-counting bijection that
//! turns a coarse equivalence into an isomorphism of stabilized algebras.

mod morita;

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{same_points, ExtMetric, PointSet, INF};

pub use morita::{induced_conjugation, nesting_disagreements, MoritaIndex};

/// A total map between two point sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMap {
    source: Arc<PointSet>,
    target: Arc<PointSet>,
    images: Vec<usize>,
}

impl PointMap {
    pub fn new(source: Arc<PointSet>, target: Arc<PointSet>, images: Vec<usize>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::InvalidArgument(format!(
                "{} images for {} source points",
                images.len(),
                source.len()
            )));
        }
        for &y in &images {
            target.check_index(y)?;
        }
        Ok(PointMap {
            source,
            target,
            images,
        })
    }

    /// Builds a map from `(x, y)` id pairs; every source point must appear
    /// exactly once.
    pub fn from_pairs<S: AsRef<str>>(
        source: Arc<PointSet>,
        target: Arc<PointSet>,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut images = vec![None; source.len()];
        for (x, y) in pairs {
            let (x, y) = (source.index_of(x.as_ref())?, target.index_of(y.as_ref())?);
            if images[x].replace(y).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "`{}` is mapped twice",
                    source.id(x)
                )));
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(x, y)| {
                y.ok_or_else(|| Error::InvalidArgument(format!("`{}` has no image", source.id(x))))
            })
            .collect::<Result<_>>()?;
        Ok(PointMap {
            source,
            target,
            images,
        })
    }

    pub fn identity(points: Arc<PointSet>) -> Self {
        let images = (0..points.len()).collect();
        PointMap {
            source: Arc::clone(&points),
            target: points,
            images,
        }
    }

    pub fn source(&self) -> &Arc<PointSet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PointSet> {
        &self.target
    }

    pub fn image(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Preimages of `y` in point order.
    pub fn preimages(&self, y: usize) -> Vec<usize> {
        (0..self.images.len())
            .filter(|&x| self.images[x] == y)
            .collect()
    }

    /// `f(X)`, in target point order.
    pub fn image_set(&self) -> Vec<usize> {
        self.images
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// First target point outside the image, if any.
    pub fn missed_point(&self) -> Option<usize> {
        let hit: BTreeSet<usize> = self.images.iter().copied().collect();
        (0..self.target.len()).find(|y| !hit.contains(y))
    }

    pub fn is_surjective(&self) -> bool {
        self.missed_point().is_none()
    }

    pub fn compose(&self, after: &PointMap) -> Result<PointMap> {
        same_points(&self.target, &after.source)?;
        Ok(PointMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&after.target),
            images: self.images.iter().map(|&y| after.images[y]).collect(),
        })
    }
}

/// A map `f: X → Y`, optionally with a coarse inverse `g` and closeness
/// bounds `d_X(g f x, x) <= C` and `d_Y(f g y, y) <= C'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseMapData {
    pub f: PointMap,
    pub g: Option<PointMap>,
    pub closeness: Option<f64>,
    pub back_closeness: Option<f64>,
    /// Whether `f` is claimed onto `Y`.
    pub surjective: bool,
}

impl CoarseMapData {
    pub fn new(f: PointMap) -> Self {
        CoarseMapData {
            f,
            g: None,
            closeness: None,
            back_closeness: None,
            surjective: false,
        }
    }

    pub fn with_inverse(mut self, g: PointMap, closeness: Option<f64>) -> Self {
        self.g = Some(g);
        self.closeness = closeness;
        self
    }
}

/// `R ↦ max{d_Y(f x, f x') : d_X(x, x') <= R}` at every distinct finite
/// source distance `R` (including 0).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionProfile {
    pub breakpoints: Vec<f64>,
    pub bounds: Vec<f64>,
    /// A source pair attaining each bound.
    pub witnesses: Vec<Option<(usize, usize)>>,
}

impl ExpansionProfile {
    /// Bound at an arbitrary radius: the value at the largest breakpoint
    /// not above `r`.
    pub fn bound_at(&self, r: f64) -> f64 {
        match self.breakpoints.partition_point(|&b| b <= r) {
            0 => 0.0,
            i => self.bounds[i - 1],
        }
    }

    /// First breakpoint with an infinite bound.
    pub fn first_infinite(&self) -> Option<(f64, (usize, usize))> {
        self.bounds.iter().position(|&s| s == INF).map(|i| {
            (
                self.breakpoints[i],
                self.witnesses[i].expect("infinite bounds have witnesses"),
            )
        })
    }
}

pub fn expansion_profile(f: &PointMap, dx: &ExtMetric, dy: &ExtMetric) -> Result<ExpansionProfile> {
    same_points(f.source(), dx.points())?;
    same_points(f.target(), dy.points())?;
    let n = dx.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let r = dx.get(x, y);
            if r < INF {
                pairs.push((r, dy.get(f.image(x), f.image(y)), (x, y)));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut profile = ExpansionProfile {
        breakpoints: Vec::new(),
        bounds: Vec::new(),
        witnesses: Vec::new(),
    };
    if n == 0 {
        return Ok(profile);
    }
    let (mut bound, mut witness) = (0.0f64, None);
    profile.breakpoints.push(0.0);
    profile.bounds.push(0.0);
    profile.witnesses.push(None);
    for (r, s, pair) in pairs {
        if s > bound {
            bound = s;
            witness = Some(pair);
        }
        if profile.breakpoints.last() == Some(&r) {
            *profile.bounds.last_mut().unwrap() = bound;
            *profile.witnesses.last_mut().unwrap() = witness;
        } else {
            profile.breakpoints.push(r);
            profile.bounds.push(bound);
            profile.witnesses.push(witness);
        }
    }
    Ok(profile)
}

/// One reason a map fails to be a coarse equivalence.
#[derive(Debug, Clone, PartialEq)]
pub enum CoarseViolation {
    /// `f` sends a finite-distance pair to an infinite one.
    ForwardUnbounded {
        radius: f64,
        x: usize,
        x2: usize,
    },
    /// Same for `g`.
    BackwardUnbounded {
        radius: f64,
        y: usize,
        y2: usize,
    },
    MissingInverse,
    /// `d_X(g f x, x)` exceeds the bound (or is infinite when none is given).
    Closeness {
        x: usize,
        distance: f64,
        bound: f64,
    },
    BackCloseness {
        y: usize,
        distance: f64,
        bound: f64,
    },
    NotSurjective {
        y: usize,
    },
}

impl CoarseViolation {
    pub fn rule(&self) -> &'static str {
        match self {
            CoarseViolation::ForwardUnbounded { .. } => "expansion-f",
            CoarseViolation::BackwardUnbounded { .. } => "expansion-g",
            CoarseViolation::MissingInverse => "missing-inverse",
            CoarseViolation::Closeness { .. } => "closeness",
            CoarseViolation::BackCloseness { .. } => "back-closeness",
            CoarseViolation::NotSurjective { .. } => "surjectivity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseReport {
    pub f_profile: ExpansionProfile,
    pub g_profile: Option<ExpansionProfile>,
    /// `max_x d_X(g f x, x)` with the attaining point.
    pub closeness_needed: Option<(f64, usize)>,
    pub back_closeness_needed: Option<(f64, usize)>,
    pub violations: Vec<CoarseViolation>,
}

impl CoarseReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

fn max_displacement(round_trip: &PointMap, d: &ExtMetric) -> Option<(f64, usize)> {
    (0..d.len())
        .map(|x| (d.get(round_trip.image(x), x), x))
        .fold(None, |best, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        })
}

/// Checks that `f` and `g` expand finite distances to finite distances at
/// every breakpoint, that both round trips stay within their bounds, and
/// surjectivity when claimed. A missing bound only requires the round trip
/// to stay at finite distance.
pub fn check_coarse_equivalence(
    data: &CoarseMapData,
    dx: &ExtMetric,
    dy: &ExtMetric,
) -> Result<CoarseReport> {
    let f_profile = expansion_profile(&data.f, dx, dy)?;
    let mut violations = Vec::new();
    if let Some((radius, (x, x2))) = f_profile.first_infinite() {
        violations.push(CoarseViolation::ForwardUnbounded { radius, x, x2 });
    }
    if data.surjective {
        if let Some(y) = data.f.missed_point() {
            violations.push(CoarseViolation::NotSurjective { y });
        }
    }
    let mut report = CoarseReport {
        f_profile,
        g_profile: None,
        closeness_needed: None,
        back_closeness_needed: None,
        violations,
    };
    let Some(g) = &data.g else {
        report.violations.push(CoarseViolation::MissingInverse);
        return Ok(report);
    };
    let g_profile = expansion_profile(g, dy, dx)?;
    if let Some((radius, (y, y2))) = g_profile.first_infinite() {
        report
            .violations
            .push(CoarseViolation::BackwardUnbounded { radius, y, y2 });
    }
    report.g_profile = Some(g_profile);

    report.closeness_needed = max_displacement(&data.f.compose(g)?, dx);
    if let Some((distance, x)) = report.closeness_needed {
        let bound = data.closeness.unwrap_or(f64::MAX);
        if distance > bound {
            report
                .violations
                .push(CoarseViolation::Closeness { x, distance, bound });
        }
    }
    report.back_closeness_needed = max_displacement(&g.compose(&data.f)?, dy);
    if let Some((distance, y)) = report.back_closeness_needed {
        let bound = data.back_closeness.unwrap_or(f64::MAX);
        if distance > bound {
            report
                .violations
                .push(CoarseViolation::BackCloseness { y, distance, bound });
        }
    }
    Ok(report)
}

/// Both sides of `|B_Y(f x, R) ∩ f(A)| <= |B_X(x, ρ_g(R) + 2C) ∩ A|` at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BgRow {
    pub x: usize,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BgReport {
    pub radius: f64,
    /// `ρ_g(R) + 2C`.
    pub source_radius: f64,
    pub rows: Vec<BgRow>,
}

impl BgReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.left <= r.right)
    }
}

/// Counts both sides of the bounded-geometry transfer inequality for every
/// `x ∈ A`. `C` is the declared closeness bound, or the smallest valid one.
pub fn image_bg_bound(
    data: &CoarseMapData,
    subset: &[usize],
    dx: &ExtMetric,
    dy: &ExtMetric,
    radius: f64,
) -> Result<BgReport> {
    let g = data.g.as_ref().ok_or_else(|| {
        Error::InvalidArgument("the transfer bound needs a coarse inverse".into())
    })?;
    for &x in subset {
        dx.points().check_index(x)?;
    }
    let c = match data.closeness {
        Some(c) => c,
        None => max_displacement(&data.f.compose(g)?, dx).map_or(0.0, |(c, _)| c),
    };
    let source_radius = expansion_profile(g, dy, dx)?.bound_at(radius) + 2.0 * c;
    let image: BTreeSet<usize> = subset.iter().map(|&x| data.f.image(x)).collect();
    let rows = subset
        .iter()
        .map(|&x| BgRow {
            x,
            left: image
                .iter()
                .filter(|&&y| dy.get(data.f.image(x), y) <= radius)
                .count(),
            right: subset
                .iter()
                .filter(|&&x2| dx.get(x, x2) <= source_radius)
                .count(),
        })
        .collect();
    Ok(BgReport {
        radius,
        source_radius,
        rows,
    })
}

/// For each `y ∈ B` the first preimage in point order; the result is sorted.
pub fn choose_section(f: &PointMap, subset: &[usize]) -> Result<Vec<usize>> {
    let mut chosen = BTreeSet::new();
    for &y in subset {
        f.target().check_index(y)?;
        let x = f
            .images()
            .iter()
            .position(|&img| img == y)
            .ok_or_else(|| Error::NoPreimage(f.target().id(y).into()))?;
        chosen.insert(x);
    }
    Ok(chosen.into_iter().collect())
}

/// `f` corestricted to its image, with the metric of `Y` restricted to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SurjectiveReduction {
    pub map: PointMap,
    pub image_metric: ExtMetric,
    /// Target points outside the image.
    pub dropped: Vec<usize>,
}

pub fn reduce_to_surjective(f: &PointMap, dy: &ExtMetric) -> Result<SurjectiveReduction> {
    same_points(f.target(), dy.points())?;
    let image = f.image_set();
    let image_metric = dy.subspace(&image)?;
    let mut slot = vec![usize::MAX; f.target().len()];
    for (i, &y) in image.iter().enumerate() {
        slot[y] = i;
    }
    let map = PointMap::new(
        Arc::clone(f.source()),
        Arc::clone(image_metric.points()),
        f.images().iter().map(|&y| slot[y]).collect(),
    )?;
    let dropped = (0..f.target().len())
        .filter(|&y| slot[y] == usize::MAX)
        .collect();
    Ok(SurjectiveReduction {
        map,
        image_metric,
        dropped,
    })
}
