//! Splitting a banded operator into diagonal-times-partial-permutation terms.
//!
//! The support of `T` is a bipartite graph (rows on one side, columns on the
//! other) of maximum degree `N = band_sparsity(T)`. By König's edge-coloring
//! theorem it splits into exactly `N` matchings; each matching is the support
//! of one term `f_i v_i`.
//!
//! The matchings are extracted one at a time. The support graph is first
//! padded with dummy edges until every vertex has degree `N`; a perfect
//! matching of the padded graph then covers every vertex of maximum degree in
//! the real one, and removing it leaves a regular graph of degree `N - 1`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{band_sparsity, Scalar, SparseOp};
use crate::space::PointSet;

/// One term `f · v`: entry `f(x)` at `(x, y)` whenever `v(y) = x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompTerm {
    /// Partial permutation, column ↦ row. Injective.
    pub v: BTreeMap<usize, usize>,
    /// Diagonal function on rows, defined on the image of `v`.
    pub f: BTreeMap<usize, Scalar>,
}

impl DecompTerm {
    pub fn to_op(&self, points: &Arc<PointSet>) -> SparseOp {
        let mut op = SparseOp::zero(Arc::clone(points));
        for (&y, &x) in &self.v {
            op.set(x, y, self.f[&x]);
        }
        op
    }

    /// `‖f‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.f.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `v` is injective and `f` lives exactly on its image.
    pub fn is_partial_isometry_term(&self) -> bool {
        let mut rows: Vec<usize> = self.v.values().copied().collect();
        rows.sort_unstable();
        let distinct = rows.windows(2).all(|w| w[0] != w[1]);
        distinct && rows.len() == self.f.len() && rows.iter().all(|x| self.f.contains_key(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub points: Arc<PointSet>,
    pub terms: Vec<DecompTerm>,
}

impl Decomposition {
    /// `Σ f_i v_i`. Entries are copied, never recomputed, so this equals the
    /// decomposed operator exactly.
    pub fn reconstruct(&self) -> SparseOp {
        let mut op = SparseOp::zero(Arc::clone(&self.points));
        for term in &self.terms {
            for (&y, &x) in &term.v {
                let sum = op.get(x, y) + term.f[&x];
                op.set(x, y, sum);
            }
        }
        op
    }

    /// `Σ_i ‖f_i‖_∞`.
    pub fn sup_norm_sum(&self) -> f64 {
        self.terms.iter().map(DecompTerm::sup_norm).sum()
    }
}

/// Exactly `band_sparsity(T)` terms; the zero operator gives none.
pub fn decompose_banded(t: &SparseOp) -> Decomposition {
    let n = t.dim();
    let degree = band_sparsity(t);
    let mut graph = RegularBipartite::pad(n, degree, t.entries().map(|(x, y, _)| (x, y)));
    let mut terms = Vec::with_capacity(degree);
    for _ in 0..degree {
        let matching = graph.take_perfect_matching();
        let mut term = DecompTerm {
            v: BTreeMap::new(),
            f: BTreeMap::new(),
        };
        for edge in matching {
            let Edge { row, col, real } = graph.edges[edge];
            if real {
                term.v.insert(col, row);
                term.f.insert(row, t.get(row, col));
            }
        }
        terms.push(term);
    }
    Decomposition {
        points: Arc::clone(t.points()),
        terms,
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    row: usize,
    col: usize,
    real: bool,
}

/// A regular bipartite multigraph, rows on the left, columns on the right.
struct RegularBipartite {
    edges: Vec<Edge>,
    /// Live edge ids per row.
    by_row: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl RegularBipartite {
    fn pad(n: usize, degree: usize, support: impl Iterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<Edge> = support
            .map(|(row, col)| Edge {
                row,
                col,
                real: true,
            })
            .collect();
        let (mut row_deg, mut col_deg) = (vec![0usize; n], vec![0usize; n]);
        for e in &edges {
            row_deg[e.row] += 1;
            col_deg[e.col] += 1;
        }
        // Both sides miss n·degree − |E| edge ends; pair them off in order.
        let mut col = 0;
        for row in 0..n {
            while row_deg[row] < degree {
                while col_deg[col] == degree {
                    col += 1;
                }
                let k = (degree - row_deg[row]).min(degree - col_deg[col]);
                for _ in 0..k {
                    edges.push(Edge {
                        row,
                        col,
                        real: false,
                    });
                }
                row_deg[row] += k;
                col_deg[col] += k;
            }
        }
        let mut by_row = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            by_row[e.row].push(id);
        }
        let alive = vec![true; edges.len()];
        RegularBipartite {
            edges,
            by_row,
            alive,
        }
    }

    /// Kuhn's augmenting-path matching; removes and returns the matched edges.
    fn take_perfect_matching(&mut self) -> Vec<usize> {
        let n = self.by_row.len();
        let mut col_match: Vec<Option<usize>> = vec![None; n];
        for row in 0..n {
            if self.by_row[row].is_empty() {
                continue;
            }
            let mut visited = vec![false; n];
            let found = self.augment(row, &mut visited, &mut col_match);
            debug_assert!(found, "regular bipartite graphs have perfect matchings");
        }
        let matched: Vec<usize> = col_match.into_iter().flatten().collect();
        for &id in &matched {
            self.alive[id] = false;
        }
        for list in &mut self.by_row {
            list.retain(|&id| self.alive[id]);
        }
        matched
    }

    fn augment(&self, row: usize, visited: &mut [bool], col_match: &mut [Option<usize>]) -> bool {
        for &id in &self.by_row[row] {
            let col = self.edges[id].col;
            if visited[col] {
                continue;
            }
            visited[col] = true;
            let free = match col_match[col] {
                None => true,
                Some(other) => self.augment(self.edges[other].row, visited, col_match),
            };
            if free {
                col_match[col] = Some(id);
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Scalar {
        Scalar::new(re, 0.0)
    }

    #[test]
    fn two_by_two() {
        let p = Arc::new(PointSet::range(2));
        let t =
            SparseOp::from_real(p, [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)]).unwrap();
        let dec = decompose_banded(&t);
        assert_eq!(dec.terms.len(), 2);
        assert_eq!(dec.reconstruct(), t);
        // König matchings of K_{2,2}: the diagonal and the antidiagonal
        let diag = dec
            .terms
            .iter()
            .find(|term| term.v.get(&0) == Some(&0))
            .unwrap();
        assert_eq!(diag.f, BTreeMap::from([(0, c(1.0)), (1, c(4.0))]));
        let anti = dec
            .terms
            .iter()
            .find(|term| term.v.get(&0) == Some(&1))
            .unwrap();
        assert_eq!(anti.v, BTreeMap::from([(0, 1), (1, 0)]));
        assert_eq!(anti.f, BTreeMap::from([(0, c(2.0)), (1, c(3.0))]));
    }

    #[test]
    fn permutation_is_one_term() {
        let p = Arc::new(PointSet::range(3));
        let t = SparseOp::from_real(p, [(1, 0, 5.0), (2, 1, 6.0), (0, 2, 7.0)]).unwrap();
        let dec = decompose_banded(&t);
        assert_eq!(dec.terms.len(), 1);
        assert_eq!(dec.terms[0].v, BTreeMap::from([(0, 1), (1, 2), (2, 0)]));
        assert_eq!(dec.terms[0].f[&0], c(7.0));
    }

    #[test]
    fn diagonal_is_one_term_on_its_support() {
        let p = Arc::new(PointSet::range(4));
        let t = SparseOp::diagonal(p, &[c(1.0), c(0.0), c(-2.0), c(0.0)]);
        let dec = decompose_banded(&t);
        assert_eq!(dec.terms.len(), 1);
        assert_eq!(dec.terms[0].v, BTreeMap::from([(0, 0), (2, 2)]));
        assert!(dec.terms[0].is_partial_isometry_term());
    }

    #[test]
    fn zero_gives_nothing() {
        let dec = decompose_banded(&SparseOp::zero(Arc::new(PointSet::range(3))));
        assert!(dec.terms.is_empty());
    }

    #[test]
    fn irregular_support() {
        // row 0 has three entries, other rows fewer
        let p = Arc::new(PointSet::range(5));
        let t = SparseOp::from_real(
            p,
            [
                (0, 0, 1.0),
                (0, 1, 2.0),
                (0, 4, 3.0),
                (1, 1, 4.0),
                (2, 4, 5.0),
                (3, 1, 6.0),
                (4, 2, 7.0),
            ],
        )
        .unwrap();
        let dec = decompose_banded(&t);
        assert_eq!(dec.terms.len(), 3);
        assert_eq!(dec.reconstruct(), t);
        assert!(dec.terms.iter().all(DecompTerm::is_partial_isometry_term));
    }
}
