//! Kraskov–Stögbauer–Grassberger mutual information (algorithm 1).
//!
//! Both columns are standardised and perturbed by seeded jitter of scale
//! 1e-10 so that distance ties have probability zero; the jitter stream is a
//! function of the dataset seed and the column names, so results are
//! reproducible.

use super::{finite_column, EstimateError};
use crate::{rng, Dataset};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

pub const DEFAULT_NEIGHBORS: usize = 3;
const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiResult {
    /// Reported estimate in nats, `max(raw, 0)`.
    pub mi: f64,
    /// Unclipped estimator output; can be slightly negative near independence.
    pub raw: f64,
    pub k_neighbors: usize,
    pub n: usize,
}

/// `I(a; b)` in nats from the dataset's columns.
pub fn mutual_information(data: &Dataset, a: &str, b: &str, k: usize) -> Result<MiResult, EstimateError> {
    let (x, y) = (finite_column(data, a)?, finite_column(data, b)?);
    let seed = rng::mix(data.seed(), rng::label(a), rng::label(b));
    mutual_information_ksg(x, y, k, seed)
}

/// KSG estimate on raw slices; `seed` keys the tie-breaking jitter.
pub fn mutual_information_ksg(x: &[f64], y: &[f64], k: usize, seed: u64) -> Result<MiResult, EstimateError> {
    let n = x.len();
    if k == 0 || n <= k || y.len() != n {
        return Err(EstimateError::InsufficientData { needed: k.max(1), got: n.min(y.len()) });
    }
    let xs = prepare(x, seed, 0);
    let ys = prepare(y, seed, 1);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let sorted_x: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let sorted_y: Vec<f64> = {
        let mut v = ys.clone();
        v.sort_by(f64::total_cmp);
        v
    };

    let mut acc = 0.0;
    let mut best: Vec<f64> = Vec::with_capacity(k + 1);
    for (r, &i) in order.iter().enumerate() {
        // k-th neighbour distance under the max-norm, scanning outward in x.
        best.clear();
        let (mut lo, mut hi) = (r, r + 1);
        loop {
            let left = (lo > 0).then(|| sorted_x[r] - sorted_x[lo - 1]);
            let right = (hi < n).then(|| sorted_x[hi] - sorted_x[r]);
            let (dx, j) = match (left, right) {
                (Some(l), Some(rt)) if l <= rt => {
                    lo -= 1;
                    (l, order[lo])
                }
                (_, Some(rt)) => {
                    hi += 1;
                    (rt, order[hi - 1])
                }
                (Some(l), None) => {
                    lo -= 1;
                    (l, order[lo])
                }
                (None, None) => break,
            };
            if best.len() == k && dx >= best[k - 1] {
                break;
            }
            let d = dx.max((ys[j] - ys[i]).abs());
            if best.len() < k || d < best[k - 1] {
                let at = best.partition_point(|&b| b <= d);
                best.insert(at, d);
                best.truncate(k);
            }
        }
        let eps = best[k - 1];
        let nx = strictly_within(&sorted_x, xs[i], eps) - 1;
        let ny = strictly_within(&sorted_y, ys[i], eps) - 1;
        acc += digamma((nx + 1) as f64) + digamma((ny + 1) as f64);
    }
    let raw = digamma(k as f64) + digamma(n as f64) - acc / n as f64;
    Ok(MiResult { mi: raw.max(0.0), raw, k_neighbors: k, n })
}

/// Standardise and add tie-breaking jitter.
fn prepare(v: &[f64], seed: u64, stream: u64) -> Vec<f64> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
    let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
    v.iter().enumerate().map(|(i, a)| (a - mean) * scale + JITTER * rng::normal(seed, stream, i as u64)).collect()
}

/// Number of sorted values with `|v - c| < eps`. Compared as differences
/// rather than against `c ± eps` so the k-th neighbour itself, at distance
/// exactly `eps`, is never counted through rounding.
fn strictly_within(sorted: &[f64], c: f64, eps: f64) -> usize {
    let lo = sorted.partition_point(|&v| c - v >= eps);
    let hi = sorted.partition_point(|&v| v - c < eps);
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_pair(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..n as u64).map(|i| rng::normal(seed, 10, i)).collect();
        let y = x.iter().enumerate().map(|(i, &a)| rho * a + (1.0 - rho * rho).sqrt() * rng::normal(seed, 11, i as u64)).collect();
        (x, y)
    }

    /// Direct O(n²) evaluation of the same estimator.
    fn brute_force(x: &[f64], y: &[f64], k: usize, seed: u64) -> f64 {
        let (xs, ys) = (prepare(x, seed, 0), prepare(y, seed, 1));
        let n = xs.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| (xs[i] - xs[j]).abs().max((ys[i] - ys[j]).abs())).collect();
            d.sort_by(f64::total_cmp);
            let eps = d[k - 1];
            let nx = (0..n).filter(|&j| j != i && (xs[i] - xs[j]).abs() < eps).count();
            let ny = (0..n).filter(|&j| j != i && (ys[i] - ys[j]).abs() < eps).count();
            acc += digamma((nx + 1) as f64) + digamma((ny + 1) as f64);
        }
        digamma(k as f64) + digamma(n as f64) - acc / n as f64
    }

    #[test]
    fn matches_brute_force() {
        for (seed, k) in [(1, 1), (2, 3), (3, 5)] {
            let (x, y) = gaussian_pair(300, 0.5, seed);
            let fast = mutual_information_ksg(&x, &y, k, seed).unwrap();
            let slow = brute_force(&x, &y, k, seed);
            assert!((fast.raw - slow).abs() < 1e-12, "{} vs {slow}", fast.raw);
        }
    }

    #[test]
    fn gaussian_closed_form() {
        let (x, y) = gaussian_pair(5000, 0.8, 7);
        let est = mutual_information_ksg(&x, &y, DEFAULT_NEIGHBORS, 7).unwrap();
        let truth = -0.5 * (1.0f64 - 0.64).ln();
        assert!((est.mi - truth).abs() < 0.05, "{} vs {truth}", est.mi);
    }

    #[test]
    fn independence_and_clipping() {
        let (x, y) = gaussian_pair(2000, 0.0, 3);
        let est = mutual_information_ksg(&x, &y, 3, 3).unwrap();
        assert!(est.raw.abs() < 0.03);
        assert_eq!(est.mi, est.raw.max(0.0));
    }

    #[test]
    fn quadratic_dependence_is_detected() {
        let n = 2000;
        let x: Vec<f64> = (0..n as u64).map(|i| 2.0 * rng::uniform(5, 0, i) - 1.0).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, a)| a * a + 0.05 * rng::normal(5, 1, i as u64)).collect();
        let est = mutual_information_ksg(&x, &y, 3, 5).unwrap();
        assert!(est.mi > 0.3, "{}", est.mi);
        let r = super::super::pearson::correlation(&x, &y).unwrap();
        assert!(r.abs() < 0.1);
    }

    #[test]
    fn monotone_transform_invariance() {
        let (x, y) = gaussian_pair(3000, 0.6, 11);
        let base = mutual_information_ksg(&x, &y, 3, 11).unwrap().raw;
        let cubed: Vec<f64> = x.iter().map(|v| v.powi(3) + v).collect();
        let exp: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        for (a, b) in [(&cubed, &y), (&x, &exp)] {
            let t = mutual_information_ksg(a, b, 3, 11).unwrap().raw;
            assert!((t - base).abs() < 0.02, "{t} vs {base}");
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(mutual_information_ksg(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 3, 0), Err(EstimateError::InsufficientData { .. })));
        assert!(mutual_information_ksg(&[1.0, 2.0], &[1.0, 2.0], 0, 0).is_err());
    }
}
