use nalgebra::DMatrix;

use super::{band_sparsity, Scalar, SparseOp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Up to this dimension a stalled iteration is settled by a dense SVD.
    pub dense_fallback: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: 1e-10,
            max_iterations: 10_000,
            dense_fallback: 2_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest singular value, or [`Error::NormNotConverged`] carrying the best
/// estimate when the iteration cap is hit.
pub fn op_norm(t: &SparseOp, tol: f64) -> Result<f64> {
    let est = op_norm_estimate(
        t,
        NormOptions {
            tol,
            ..NormOptions::default()
        },
    );
    if est.converged {
        Ok(est.value)
    } else {
        Err(Error::NormNotConverged {
            estimate: est.value,
            iterations: est.iterations,
        })
    }
}

/// Power iteration on `T*T`.
///
/// Nearly equal top singular values make the iteration crawl; if the cap is
/// reached on an operator of dimension at most `dense_fallback` the answer
/// comes from a dense SVD instead.
///
/// Operators with at most one nonzero per row and column are answered
/// exactly (the norm is the largest entry modulus). Otherwise the start
/// vector is a fixed, strictly positive, non-constant vector, and the
/// estimate is never allowed below the largest row or column 2-norm, both of
/// which bound the norm from below.
pub fn op_norm_estimate(t: &SparseOp, opts: NormOptions) -> NormEstimate {
    if band_sparsity(t) <= 1 {
        return NormEstimate {
            value: t.max_abs_entry(),
            iterations: 0,
            converged: true,
        };
    }
    let n = t.dim();
    let floor = line_norm_floor(t);
    let mut v: Vec<Scalar> = (0..n)
        .map(|i| {
            // golden-ratio sequence: deterministic and never orthogonal to a
            // positive vector
            let frac = (i as f64 * 0.618_033_988_749_894_9).fract();
            Scalar::new(1.0 + 0.5 * frac, 0.0)
        })
        .collect();
    normalize(&mut v);
    let mut sigma = 0.0f64;
    for iter in 1..=opts.max_iterations {
        let tv = t.apply(&v);
        let next = norm2(&tv);
        let mut w = t.apply_adjoint(&tv);
        let wn = norm2(&w);
        if wn == 0.0 {
            return NormEstimate {
                value: next.max(floor),
                iterations: iter,
                converged: true,
            };
        }
        w.iter_mut().for_each(|c| *c /= wn);
        v = w;
        let done = (next - sigma).abs() <= opts.tol * next.max(1.0);
        sigma = next;
        if done {
            return NormEstimate {
                value: sigma.max(floor),
                iterations: iter,
                converged: true,
            };
        }
    }
    if n <= opts.dense_fallback {
        return NormEstimate {
            value: dense_norm(t).max(floor),
            iterations: opts.max_iterations,
            converged: true,
        };
    }
    NormEstimate {
        value: sigma.max(floor),
        iterations: opts.max_iterations,
        converged: false,
    }
}

fn dense_norm(t: &SparseOp) -> f64 {
    let n = t.dim();
    let mut m = DMatrix::<Scalar>::zeros(n, n);
    for (x, y, v) in t.entries() {
        m[(x, y)] = v;
    }
    m.singular_values().max()
}

fn line_norm_floor(t: &SparseOp) -> f64 {
    let n = t.dim();
    let (mut rows, mut cols) = (vec![0.0f64; n], vec![0.0f64; n]);
    for (x, y, v) in t.entries() {
        rows[x] += v.norm_sqr();
        cols[y] += v.norm_sqr();
    }
    rows.into_iter().chain(cols).fold(0.0, f64::max).sqrt()
}

fn norm2(v: &[Scalar]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Scalar]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|c| *c /= n);
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::PointSet;

    #[test]
    fn exact_cases() {
        let p = Arc::new(PointSet::range(3));
        let perm = SparseOp::from_real(p.clone(), [(1, 0, 1.0), (2, 1, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(op_norm(&perm, 1e-10).unwrap(), 1.0);
        let p2 = Arc::new(PointSet::range(2));
        let diag = SparseOp::diagonal(p2, &[Scalar::new(3.0, 0.0), Scalar::new(-1.0, 0.0)]);
        assert_eq!(op_norm(&diag, 1e-10).unwrap(), 3.0);
        assert_eq!(op_norm(&SparseOp::zero(p), 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn all_ones_two_by_two() {
        // eigenvalues of [[1,1],[1,1]] are 2 and 0
        let p = Arc::new(PointSet::range(2));
        let t =
            SparseOp::from_real(p, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!((op_norm(&t, 1e-12).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn start_vector_orthogonal_to_constants() {
        // [[1,-1],[-1,1]] kills the all-ones vector; its norm is 2
        let p = Arc::new(PointSet::range(2));
        let t =
            SparseOp::from_real(p, [(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0)]).unwrap();
        assert!((op_norm(&t, 1e-12).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn cap_reports_best_estimate() {
        let p = Arc::new(PointSet::range(3));
        let t =
            SparseOp::from_real(p, [(0, 0, 1.0), (0, 1, 0.5), (1, 1, 0.9), (2, 1, 0.3)]).unwrap();
        let est = op_norm_estimate(
            &t,
            NormOptions {
                tol: 0.0,
                max_iterations: 3,
                dense_fallback: 0,
            },
        );
        assert!(!est.converged);
        assert_eq!(est.iterations, 3);
        assert!(est.value > 0.0);
    }

    #[test]
    fn stalled_iteration_falls_back_to_svd() {
        let p = Arc::new(PointSet::range(2));
        let t = SparseOp::from_real(p, [(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        let est = op_norm_estimate(
            &t,
            NormOptions {
                tol: 0.0,
                max_iterations: 3,
                ..NormOptions::default()
            },
        );
        assert!(est.converged);
        assert_eq!(est.iterations, 3);
        // golden ratio
        assert!((est.value - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }
}
