use super::ExtMetric;
use crate::error::{Error, Result};

/// A greedy `l`-net with its assignment map.
#[derive(Debug, Clone, PartialEq)]
pub struct NetData {
    pub l: f64,
    /// Net points, in point order.
    pub net: Vec<usize>,
    /// `assignment[x]` is the net point assigned to `x`.
    pub assignment: Vec<usize>,
}

impl NetData {
    pub fn contains(&self, x: usize) -> bool {
        self.net.binary_search(&x).is_ok()
    }
}

/// Maximal `l`-separated subset in scan order, with each point assigned to
/// the first net point within `l`.
pub fn greedy_net(d: &ExtMetric, l: f64) -> Result<NetData> {
    if !(l > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "net radius {l} must be positive"
        )));
    }
    let mut net: Vec<usize> = Vec::new();
    for x in 0..d.len() {
        if net.iter().all(|&u| d.get(x, u) > l) {
            net.push(x);
        }
    }
    let assignment = (0..d.len())
        .map(|x| {
            *net.iter()
                .find(|&&u| d.get(x, u) <= l)
                .expect("maximality puts every point within l of the net")
        })
        .collect();
    Ok(NetData { l, net, assignment })
}

/// Disjoint clusters of diameter at most `2R` with strictly growing sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterChain {
    pub radius: f64,
    pub centers: Vec<usize>,
    /// `clusters[i]` is the closed `R`-ball around `centers[i]`.
    pub clusters: Vec<Vec<usize>>,
}

impl ClusterChain {
    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }
}

/// Greedy chain of disjoint balls with strictly increasing cardinality.
///
/// Each step accepts a center outside the `2R`-balls of all earlier centers
/// whose `R`-ball is strictly larger than the last accepted one. Among the
/// eligible centers the smallest ball is taken (ties broken by point order),
/// so the chain climbs through every available size.
pub fn greedy_clusters(d: &ExtMetric, radius: f64) -> Result<ClusterChain> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cluster radius {radius} must be positive"
        )));
    }
    let n = d.len();
    let sizes: Vec<usize> = (0..n).map(|x| d.ball_size(x, radius)).collect();
    let mut blocked = vec![false; n];
    let mut chain = ClusterChain {
        radius,
        centers: Vec::new(),
        clusters: Vec::new(),
    };
    let mut last = 0usize;
    loop {
        let next = (0..n)
            .filter(|&x| !blocked[x] && sizes[x] > last)
            .min_by_key(|&x| (sizes[x], x));
        let Some(center) = next else { break };
        for y in 0..n {
            if d.get(center, y) <= 2.0 * radius {
                blocked[y] = true;
            }
        }
        last = sizes[center];
        chain.centers.push(center);
        chain.clusters.push(d.ball(center, radius));
    }
    Ok(chain)
}
