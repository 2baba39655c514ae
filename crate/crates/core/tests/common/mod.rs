#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use uroe::operators::SparseOp;
use uroe::space::{ExtMetric, PointSet, INF};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shortest paths by Dijkstra from every source over a weighted edge list.
pub fn dijkstra_all(n: usize, edges: &[(usize, usize, u64)]) -> Vec<Vec<Option<u64>>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, w) in edges {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
            while let Some(Reverse((du, u))) = heap.pop() {
                if dist[u].is_some() {
                    continue;
                }
                dist[u] = Some(du);
                for &(v, w) in &adj[u] {
                    if dist[v].is_none() {
                        heap.push(Reverse((du + w, v)));
                    }
                }
            }
            dist
        })
        .collect()
}

pub fn metric_from_paths(points: Arc<PointSet>, paths: &[Vec<Option<u64>>]) -> ExtMetric {
    ExtMetric::from_fn(points, |x, y| paths[x][y].map_or(INF, |v| v as f64))
        .expect("path metrics are metrics")
}

/// Integer-valued metric: a few components, each a random connected graph
/// with edge weights in `1..=max_weight`; distances across components are
/// infinite.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize, max_weight: u64) -> ExtMetric {
    let components = rng.gen_range(1..=3.min(n.max(1)));
    let label: Vec<usize> = (0..n).map(|_| rng.gen_range(0..components)).collect();
    let mut edges = Vec::new();
    for x in 0..n {
        // tie to an earlier point of the same component
        if let Some(y) = (0..x).rev().find(|&y| label[y] == label[x]) {
            edges.push((y, x, rng.gen_range(1..=max_weight)));
        }
        for y in 0..x {
            if label[x] == label[y] && rng.gen_bool(0.15) {
                edges.push((y, x, rng.gen_range(1..=max_weight)));
            }
        }
    }
    metric_from_paths(Arc::new(PointSet::range(n)), &dijkstra_all(n, &edges))
}

pub fn random_scalar(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(
            rng.gen_range(-4i32..=4) as f64 / 2.0,
            rng.gen_range(-2i32..=2) as f64 / 2.0,
        );
        if z != Complex64::new(0.0, 0.0) {
            return z;
        }
    }
}

/// Random operator with at most `k` nonzeros per row and column, every
/// entry on a pair at `d`-distance at most `s`.
pub fn random_banded(rng: &mut ChaCha8Rng, d: &ExtMetric, k: usize, s: f64) -> SparseOp {
    let n = d.len();
    let mut rows = vec![0usize; n];
    let mut cols = vec![0usize; n];
    let mut t = SparseOp::zero(Arc::clone(d.points()));
    for x in 0..n {
        let candidates = d.ball(x, s);
        for _ in 0..k {
            let y = candidates[rng.gen_range(0..candidates.len())];
            if rows[x] < k
                && cols[y] < k
                && t.get(x, y) == Complex64::new(0.0, 0.0)
                && rng.gen_bool(0.7)
            {
                t.set(x, y, random_scalar(rng));
                rows[x] += 1;
                cols[y] += 1;
            }
        }
    }
    t
}

pub fn dense(t: &SparseOp) -> DMatrix<Complex64> {
    let n = t.dim();
    let mut m = DMatrix::zeros(n, n);
    for (x, y, v) in t.entries() {
        m[(x, y)] = v;
    }
    m
}

/// Largest singular value by dense SVD.
pub fn svd_norm(t: &SparseOp) -> f64 {
    if t.dim() == 0 {
        return 0.0;
    }
    dense(t).singular_values().max()
}

/// Prints the criterion line and fails the test if needed.
pub fn verdict(number: u32, name: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {number} [{status}] {name}");
    for f in failures.iter().take(10) {
        println!("    {f}");
    }
    if failures.len() > 10 {
        println!("    ... {} more", failures.len() - 10);
    }
    assert!(
        failures.is_empty(),
        "criterion {number} failed: {}",
        failures[0]
    );
}
