use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{squared_distance, RowMatrix};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Restarts per fit. A single k-means++ start occasionally settles with two
/// centroids in one well-separated group, which then shifts the elbow.
pub const DEFAULT_N_INIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this (Euclidean).
    pub tol: f64,
    /// Independent k-means++ starts; the lowest final inertia wins.
    pub n_init: usize,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iter: 300,
            tol: 1e-6,
            n_init: DEFAULT_N_INIT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub centroids: RowMatrix,
    pub labels: Vec<usize>,
    pub inertia: f64,
    /// Inertia after the initial assignment and after every Lloyd iteration.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Nearest centroid per point (ties to the lowest index) and its squared
/// distance.
fn assign(x: &RowMatrix, centroids: &RowMatrix) -> (Vec<usize>, Vec<f64>) {
    (0..x.rows())
        .into_par_iter()
        .map(|i| {
            let p = x.row(i);
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.iter_rows().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Index of the nearest centroid for every row of `x`.
pub fn nearest_centroids(x: &RowMatrix, centroids: &RowMatrix) -> Vec<usize> {
    assign(x, centroids).0
}

fn kmeans_plus_plus(x: &RowMatrix, k: usize, rng: &mut SplitMix64) -> RowMatrix {
    let n = x.rows();
    let mut chosen = Vec::with_capacity(k);
    let mut is_chosen = vec![false; n];
    let first = rng.below(n);
    chosen.push(first);
    is_chosen[first] = true;
    let mut nearest: Vec<f64> = (0..n).map(|i| squared_distance(x.row(i), x.row(first))).collect();

    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    pick = Some(i);
                    break;
                }
            }
            pick.or_else(|| nearest.iter().rposition(|&d| d > 0.0))
        } else {
            None
        };
        // Only duplicates of existing centers remain: take the first unused point.
        let next = next
            .or_else(|| (0..n).find(|&i| !is_chosen[i]))
            .expect("k <= n guarantees an unused point");
        chosen.push(next);
        is_chosen[next] = true;
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(x.row(i), x.row(next)));
        }
    }
    x.select_rows(&chosen)
}

/// K-means with k-means++ seeding and Lloyd iterations. Fully determined by
/// `(x, params)`: the seed drives a [`SplitMix64`] stream and all reductions
/// run in point order.
pub fn kmeans_fit(x: &RowMatrix, params: KMeansParams) -> Result<KMeansFit> {
    let (n, k) = (x.rows(), params.k);
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k-means needs 1 <= K <= N; got K = {k}, N = {n}"
        )));
    }
    if params.n_init == 0 {
        return Err(Error::InvalidArgument("k-means needs n_init >= 1".into()));
    }
    // Start 0 draws from the seed itself, later starts from derived streams.
    let mut best = lloyd(x, &params, SplitMix64::new(params.seed));
    for r in 1..params.n_init {
        let fit = lloyd(x, &params, SplitMix64::derive(params.seed, r as u64));
        if fit.inertia < best.inertia {
            best = fit;
        }
    }
    Ok(best)
}

/// One k-means++ start followed by Lloyd iterations.
fn lloyd(x: &RowMatrix, params: &KMeansParams, mut rng: SplitMix64) -> KMeansFit {
    let (n, dim, k) = (x.rows(), x.cols(), params.k);
    let mut centroids = kmeans_plus_plus(x, k, &mut rng);
    let (mut labels, mut dists) = assign(x, &centroids);
    let mut inertia: f64 = dists.iter().sum();
    let mut history = vec![inertia];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iter {
        iterations += 1;
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, v) in sums[c * dim..(c + 1) * dim].iter_mut().zip(x.row(i)) {
                *s += v;
            }
        }
        // Empty clusters move onto the points farthest from their centroid.
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .fold(None, |best: Option<usize>, i| match best {
                        Some(b) if dists[b] >= dists[i] => Some(b),
                        _ => Some(i),
                    })
                    .expect("k <= n");
                taken[far] = true;
                sums[c * dim..(c + 1) * dim].copy_from_slice(x.row(far));
                counts[c] = 1;
            }
        }
        let mut next = Vec::with_capacity(k * dim);
        let mut shift = 0.0f64;
        for c in 0..k {
            let mean: Vec<f64> = sums[c * dim..(c + 1) * dim]
                .iter()
                .map(|s| s / counts[c] as f64)
                .collect();
            shift = shift.max(squared_distance(&mean, centroids.row(c)).sqrt());
            next.extend(mean);
        }
        centroids = RowMatrix::new(k, dim, next);
        (labels, dists) = assign(x, &centroids);
        let updated: f64 = dists.iter().sum();
        debug_assert!(
            updated <= inertia * (1.0 + 1e-12) + 1e-12,
            "inertia rose from {inertia} to {updated}"
        );
        inertia = updated;
        history.push(inertia);
        if shift < params.tol {
            converged = true;
            break;
        }
    }

    KMeansFit {
        centroids,
        labels,
        inertia,
        inertia_history: history,
        iterations,
        converged,
    }
}

/// Inertia curve over a K range and the elbow picked from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElbowCurve {
    pub k_min: usize,
    pub k_max: usize,
    pub inertia: Vec<f64>,
    /// Perpendicular distance of each normalized point to the chord.
    pub chord_distance: Vec<f64>,
    pub best_k: usize,
}

/// Picks K by the maximum perpendicular distance to the chord joining the
/// first and last points of the inertia curve, after scaling both axes to
/// `[0, 1]`. Every K uses the same seed.
pub fn elbow_select(x: &RowMatrix, k_min: usize, k_max: usize, seed: u64) -> Result<ElbowCurve> {
    elbow_select_with(x, k_min, k_max, KMeansParams::new(k_min, seed))
}

/// [`elbow_select`] with explicit fit settings; `base.k` is ignored.
pub fn elbow_select_with(x: &RowMatrix, k_min: usize, k_max: usize, base: KMeansParams) -> Result<ElbowCurve> {
    if k_min == 0 || k_min >= k_max || k_max >= x.rows() {
        return Err(Error::InvalidArgument(format!(
            "elbow search needs 1 <= k_min < k_max < N; got {k_min}, {k_max}, N = {}",
            x.rows()
        )));
    }
    let inertia = (k_min..=k_max)
        .map(|k| kmeans_fit(x, KMeansParams { k, ..base }).map(|f| f.inertia))
        .collect::<Result<Vec<f64>>>()?;
    let first = inertia[0];
    let last = *inertia.last().expect("non-empty range");
    if !(last < first) {
        return Err(Error::InertiaAnomaly {
            k_min,
            k_max,
            first,
            last,
        });
    }
    let (lo, hi) = inertia
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = (k_max - k_min) as f64;
    let points: Vec<(f64, f64)> = inertia
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as f64 / span, (v - lo) / (hi - lo)))
        .collect();
    let (x0, y0) = points[0];
    let (x1, y1) = points[points.len() - 1];
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = (dx * dx + dy * dy).sqrt();
    let chord_distance: Vec<f64> = points
        .iter()
        .map(|&(px, py)| (dy * (px - x0) - dx * (py - y0)).abs() / len)
        .collect();
    let best = chord_distance
        .iter()
        .enumerate()
        .fold(0, |best, (i, &d)| if d > chord_distance[best] { i } else { best });
    Ok(ElbowCurve {
        k_min,
        k_max,
        inertia,
        chord_distance,
        best_k: k_min + best,
    })
}
