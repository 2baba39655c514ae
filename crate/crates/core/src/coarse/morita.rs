use std::collections::BTreeMap;
use std::sync::Arc;

use super::PointMap;
use crate::error::{Error, Result};
use crate::operators::SparseOp;
use crate::space::{same_points, PointSet};

/// Fiber data of `f` on a subset `A`: `N(y) = |f⁻¹(y) ∩ A|` and the
/// position `π(x)` of `x` in its fiber, both in point order and 0-based.
///
/// `φ_A(x, j) = (f(x), π(x) + j·N(f(x)))` is then a bijection
/// `A × ℕ → f(A) × ℕ`, inverted by Euclidean division.
#[derive(Debug, Clone, PartialEq)]
pub struct MoritaIndex {
    map: PointMap,
    subset: Vec<usize>,
    fibers: BTreeMap<usize, Vec<usize>>,
    pi: Vec<Option<usize>>,
}

impl MoritaIndex {
    pub fn new(map: PointMap, subset: &[usize]) -> Result<Self> {
        let mut subset = subset.to_vec();
        subset.sort_unstable();
        subset.dedup();
        for &x in &subset {
            map.source().check_index(x)?;
        }
        let mut fibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut pi = vec![None; map.source().len()];
        for &x in &subset {
            let fiber = fibers.entry(map.image(x)).or_default();
            pi[x] = Some(fiber.len());
            fiber.push(x);
        }
        Ok(MoritaIndex {
            map,
            subset,
            fibers,
            pi,
        })
    }

    pub fn map(&self) -> &PointMap {
        &self.map
    }

    /// `A`, in point order.
    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    /// `f(A)`, in point order.
    pub fn image(&self) -> Vec<usize> {
        self.fibers.keys().copied().collect()
    }

    /// `f⁻¹(y) ∩ A`, in point order (empty off `f(A)`).
    pub fn fiber(&self, y: usize) -> &[usize] {
        self.fibers.get(&y).map_or(&[], Vec::as_slice)
    }

    pub fn n(&self, y: usize) -> usize {
        self.fiber(y).len()
    }

    pub fn pi(&self, x: usize) -> Option<usize> {
        self.pi.get(x).copied().flatten()
    }

    pub fn max_fiber(&self) -> usize {
        self.fibers.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn forward(&self, x: usize, j: usize) -> Result<(usize, usize)> {
        let p = self
            .pi(x)
            .ok_or_else(|| Error::NotInSubset(self.source_id(x)))?;
        let y = self.map.image(x);
        Ok((y, p + j * self.n(y)))
    }

    pub fn inverse(&self, y: usize, m: usize) -> Result<(usize, usize)> {
        let fiber = self
            .fibers
            .get(&y)
            .ok_or_else(|| Error::NoPreimage(self.target_id(y)))?;
        let n = fiber.len();
        Ok((fiber[m % n], m / n))
    }

    fn source_id(&self, x: usize) -> String {
        self.map
            .source()
            .ids()
            .get(x)
            .cloned()
            .unwrap_or_else(|| x.to_string())
    }

    fn target_id(&self, y: usize) -> String {
        self.map
            .target()
            .ids()
            .get(y)
            .cloned()
            .unwrap_or_else(|| y.to_string())
    }

    /// `A × {0..J−1}` with ids `x#j`, `A`-major.
    pub fn source_points(&self, window: usize) -> Arc<PointSet> {
        let ids = self
            .subset
            .iter()
            .flat_map(|&x| (0..window).map(move |j| format!("{}#{j}", self.map.source().id(x))));
        Arc::new(PointSet::new(ids).expect("suffixed ids stay distinct"))
    }

    /// `f(A) × {0..W−1}` with ids `y#m`, `f(A)`-major.
    pub fn target_points(&self, window: usize) -> Arc<PointSet> {
        let ids = self
            .fibers
            .keys()
            .flat_map(|&y| (0..window).map(move |m| format!("{}#{m}", self.map.target().id(y))));
        Arc::new(PointSet::new(ids).expect("suffixed ids stay distinct"))
    }

    /// Position of `(x, j)` in [`source_points`](Self::source_points).
    pub fn source_slot(&self, x: usize, j: usize, window: usize) -> Option<usize> {
        let pos = self.subset.binary_search(&x).ok()?;
        (j < window).then_some(pos * window + j)
    }

    /// Position of `(y, m)` in [`target_points`](Self::target_points).
    pub fn target_slot(&self, y: usize, m: usize, window: usize) -> Option<usize> {
        let pos = self.fibers.keys().position(|&k| k == y)?;
        (m < window).then_some(pos * window + m)
    }
}

/// `U T U*` for the 0/1 operator `U: δ_(x,j) ↦ δ_φ(x,j)`, from the window
/// `A × {0..J−1}` into `f(A) × {0..W−1}`.
///
/// `W` defaults to `J · max N`, which contains every image. A smaller
/// explicit `W` that some image misses is an error, not a truncation.
pub fn induced_conjugation(
    idx: &MoritaIndex,
    t: &SparseOp,
    window: usize,
    out_window: Option<usize>,
) -> Result<SparseOp> {
    same_points(&idx.source_points(window), t.points())?;
    let out = out_window.unwrap_or(window * idx.max_fiber());
    let target_pos: BTreeMap<usize, usize> = idx
        .fibers
        .keys()
        .enumerate()
        .map(|(i, &y)| (y, i))
        .collect();
    let slot = |s: usize| -> Result<usize> {
        let (x, j) = (idx.subset[s / window], s % window);
        let (y, m) = idx.forward(x, j)?;
        if m >= out {
            return Err(Error::OutsideWindow {
                y: idx.map.target().id(y).into(),
                m,
                window: out,
            });
        }
        Ok(target_pos[&y] * out + m)
    };
    let mut result = SparseOp::zero(idx.target_points(out));
    for (a, b, v) in t.entries() {
        result.set(slot(a)?, slot(b)?, v);
    }
    Ok(result)
}

/// Points `(x, j)` of `A × {0..J−1}` where `φ_{A'}` and `φ_A` differ.
/// Both indices must use the same map and `A ⊆ A'`.
pub fn nesting_disagreements(
    small: &MoritaIndex,
    large: &MoritaIndex,
    window: usize,
) -> Result<Vec<(usize, usize)>> {
    if small.map != large.map {
        return Err(Error::InvalidArgument(
            "nested indices use different maps".into(),
        ));
    }
    if let Some(&x) = small
        .subset
        .iter()
        .find(|x| large.subset.binary_search(x).is_err())
    {
        return Err(Error::NotInSubset(small.source_id(x)));
    }
    let mut out = Vec::new();
    for &x in &small.subset {
        for j in 0..window {
            if small.forward(x, j)? != large.forward(x, j)? {
                out.push((x, j));
            }
        }
    }
    Ok(out)
}

impl MoritaIndex {
    /// Whether every fiber of `self` is an initial segment of the
    /// corresponding fiber of `larger`, so that `π` agrees on `self`.
    pub fn is_prefix_of(&self, larger: &MoritaIndex) -> bool {
        self.fibers
            .iter()
            .all(|(y, fiber)| larger.fiber(*y).starts_with(fiber))
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn pts(n: usize) -> Arc<PointSet> {
        Arc::new(PointSet::range(n))
    }

    /// `a1, a2 ↦ y`.
    fn two_fiber() -> MoritaIndex {
        let f = PointMap::from_pairs(
            Arc::new(PointSet::new(["a1", "a2"]).unwrap()),
            Arc::new(PointSet::new(["y"]).unwrap()),
            &[("a1", "y"), ("a2", "y")],
        )
        .unwrap();
        MoritaIndex::new(f, &[0, 1]).unwrap()
    }

    #[test]
    fn injective_case() {
        let f = PointMap::new(pts(3), pts(5), vec![4, 0, 2]).unwrap();
        let idx = MoritaIndex::new(f, &[0, 1, 2]).unwrap();
        assert_eq!(idx.forward(0, 3).unwrap(), (4, 3));
        assert_eq!(idx.forward(2, 0).unwrap(), (2, 0));
        assert_eq!(idx.inverse(0, 5).unwrap(), (1, 5));
        assert!(idx.inverse(1, 0).is_err());
    }

    #[test]
    fn two_fiber_formula() {
        let idx = two_fiber();
        assert_eq!(idx.forward(0, 1).unwrap(), (0, 2));
        assert_eq!(idx.forward(1, 1).unwrap(), (0, 3));
        assert_eq!(idx.forward(1, 0).unwrap(), (0, 1));
        assert_eq!(idx.inverse(0, 3).unwrap(), (1, 1));
        assert_eq!(idx.inverse(0, 1).unwrap(), (1, 0));
    }

    #[test]
    fn outside_subset() {
        let f = PointMap::new(pts(3), pts(1), vec![0; 3]).unwrap();
        let idx = MoritaIndex::new(f, &[2, 0]).unwrap();
        assert_eq!(idx.subset(), &[0, 2]);
        assert_eq!(idx.pi(2), Some(1));
        assert_eq!(
            idx.forward(1, 0).unwrap_err(),
            Error::NotInSubset("1".into())
        );
    }

    #[test]
    fn matrix_unit_is_traced() {
        let idx = two_fiber();
        let src = idx.source_points(2);
        assert_eq!(src.ids(), &["a1#0", "a1#1", "a2#0", "a2#1"]);
        let e = SparseOp::from_real(src, [(0, 2, 1.0)]).unwrap();
        let out = induced_conjugation(&idx, &e, 2, None).unwrap();
        assert_eq!(out.points().len(), 4);
        let entries: Vec<_> = out.entries().collect();
        assert_eq!(entries, vec![(0, 1, Complex64::new(1.0, 0.0))]);
        assert_eq!(out.points().id(1), "y#1");
    }

    #[test]
    fn identity_goes_to_identity_on_images() {
        let idx = two_fiber();
        let id = SparseOp::identity(idx.source_points(3));
        let out = induced_conjugation(&idx, &id, 3, None).unwrap();
        assert_eq!(out, SparseOp::identity(idx.target_points(6)));
    }

    #[test]
    fn explicit_window_too_small() {
        let idx = two_fiber();
        let id = SparseOp::identity(idx.source_points(2));
        assert!(matches!(
            induced_conjugation(&idx, &id, 2, Some(3)),
            Err(Error::OutsideWindow {
                m: 3,
                window: 3,
                ..
            })
        ));
    }

    #[test]
    fn nesting_holds_only_for_equal_fibers() {
        let f = PointMap::new(pts(4), pts(2), vec![0, 0, 1, 0]).unwrap();
        let small = MoritaIndex::new(f.clone(), &[0, 2]).unwrap();
        let late = MoritaIndex::new(f.clone(), &[2, 3]).unwrap();
        let grown = MoritaIndex::new(f, &[0, 1, 2, 3]).unwrap();
        assert!(small.is_prefix_of(&grown));
        assert!(!late.is_prefix_of(&grown));
        // the fiber over 0 grows from 1 to 3 points, so j >= 1 moves
        assert_eq!(
            nesting_disagreements(&small, &grown, 3).unwrap(),
            vec![(0, 1), (0, 2)]
        );

        let g = PointMap::new(pts(4), pts(3), vec![0, 0, 1, 2]).unwrap();
        let small = MoritaIndex::new(g.clone(), &[0, 1]).unwrap();
        let large = MoritaIndex::new(g, &[0, 1, 3]).unwrap();
        assert!(small.is_prefix_of(&large));
        assert!(nesting_disagreements(&small, &large, 6).unwrap().is_empty());
    }
}
