use std::collections::VecDeque;
use std::sync::Arc;

use super::{band_sparsity, propagation_witness, SparseOp};
use crate::error::{Error, Result};
use crate::metric_order::{check_membership, MetricCert};
use crate::space::{ExtMetric, INF};

/// Geodesic metric of the graph joining `x` and `y` by a unit edge whenever
/// `T_xy != 0` or `T_yx != 0`.
///
/// The result is integer-valued (or infinite), `T` has propagation at most 1
/// in it, and it dominates `base / S`.
pub fn support_metric(t: &SparseOp, base: &ExtMetric, radius: f64) -> Result<ExtMetric> {
    if let Some((x, y, r)) = propagation_witness(t, base)? {
        if r > radius {
            let points = t.points();
            return Err(Error::PropagationExceeds {
                x: points.id(x).into(),
                y: points.id(y).into(),
                distance: r,
                radius,
            });
        }
    }
    Ok(unit_graph_metric(t))
}

fn unit_graph_metric(t: &SparseOp) -> ExtMetric {
    let n = t.dim();
    let mut adj = vec![Vec::new(); n];
    for (x, y, _) in t.entries() {
        if x != y {
            adj[x].push(y);
            adj[y].push(x);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mut dist = vec![INF; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = 0.0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let next = row[u] + 1.0;
            for &v in &adj[u] {
                if row[v] == INF {
                    row[v] = next;
                    queue.push_back(v);
                }
            }
        }
    }
    ExtMetric::from_matrix_unchecked(Arc::clone(t.points()), dist)
}

/// Two-way certificate that `T` lies in `𝔹^(k) ∩ C^S(X, base)`, with `k` and
/// `S` minimal, and that it has propagation 1 for a metric of the directed set.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCert {
    pub k: usize,
    pub s: f64,
    pub metric: ExtMetric,
    pub cert: MetricCert,
}

pub fn certify_membership(t: &SparseOp, base: &ExtMetric) -> Result<MembershipCert> {
    let s = match propagation_witness(t, base)? {
        Some((x, y, r)) if r.is_infinite() => {
            return Err(Error::InfinitePropagation {
                x: t.points().id(x).into(),
                y: t.points().id(y).into(),
            })
        }
        Some((_, _, r)) => r,
        None => 0.0,
    };
    let metric = support_metric(t, base, s)?;
    let cert = check_membership(base, &metric)?;
    Ok(MembershipCert {
        k: band_sparsity(t),
        s,
        metric,
        cert,
    })
}
