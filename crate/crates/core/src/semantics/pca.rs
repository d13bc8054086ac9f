use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::RowMatrix;
use crate::error::{Error, Result};

/// Cumulative explained variance below which a fit carries a warning.
pub const MIN_EXPLAINED_VARIANCE: f64 = 0.80;

/// Principal components of centered data, ordered by decreasing variance.
#[derive(Debug, Clone, Serialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `target_dim` rows, each a unit-length direction in input space.
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub warning: Option<String>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn cumulative_explained_variance(&self) -> f64 {
        self.explained_variance_ratio.iter().sum()
    }

    pub fn transform(&self, x: &RowMatrix) -> RowMatrix {
        assert_eq!(x.cols(), self.input_dim());
        let mut out = Vec::with_capacity(x.rows() * self.target_dim());
        let mut centered = vec![0.0; self.input_dim()];
        for row in x.iter_rows() {
            for ((c, v), m) in centered.iter_mut().zip(row).zip(&self.mean) {
                *c = v - m;
            }
            for comp in &self.components {
                out.push(comp.iter().zip(&centered).map(|(a, b)| a * b).sum());
            }
        }
        RowMatrix::new(x.rows(), self.target_dim(), out)
    }

    pub fn inverse_transform(&self, z: &RowMatrix) -> RowMatrix {
        assert_eq!(z.cols(), self.target_dim());
        let mut out = Vec::with_capacity(z.rows() * self.input_dim());
        for row in z.iter_rows() {
            let mut x = self.mean.clone();
            for (w, comp) in row.iter().zip(&self.components) {
                for (xi, ci) in x.iter_mut().zip(comp) {
                    *xi += w * ci;
                }
            }
            out.extend(x);
        }
        RowMatrix::new(z.rows(), self.input_dim(), out)
    }
}

/// Fits PCA through the eigendecomposition of the sample covariance. Each
/// component's sign is fixed so its largest-magnitude entry is positive.
pub fn fit_pca(x: &RowMatrix, target_dim: usize) -> Result<PcaModel> {
    let (n, dim) = (x.rows(), x.cols());
    if target_dim == 0 || target_dim >= n || target_dim > dim {
        return Err(Error::InvalidArgument(format!(
            "PCA needs 1 <= target_dim < N and target_dim <= dim; got target_dim = {target_dim}, N = {n}, dim = {dim}"
        )));
    }

    let mut mean = vec![0.0; dim];
    for row in x.iter_rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centered = DMatrix::from_fn(n, dim, |i, j| x.row(i)[j] - mean[j]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let total: f64 = cov.diagonal().iter().sum();
    let scale = mean.iter().chain(x.as_slice()).fold(0.0f64, |a, v| a.max(v.abs()));
    if total <= f64::EPSILON * (scale * scale).max(f64::MIN_POSITIVE) * dim as f64 {
        return Err(Error::Degenerate("all embedding vectors are identical".into()));
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Vec::with_capacity(target_dim);
    let mut explained_variance = Vec::with_capacity(target_dim);
    for &j in order.iter().take(target_dim) {
        let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |best, c| if c.abs() > best.abs() { c } else { best });
        if pivot < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        components.push(v);
        explained_variance.push(eig.eigenvalues[j].max(0.0));
    }
    let explained_variance_ratio: Vec<f64> = explained_variance.iter().map(|v| v / total).collect();
    let cumulative: f64 = explained_variance_ratio.iter().sum();
    let warning = (cumulative < MIN_EXPLAINED_VARIANCE).then(|| {
        format!(
            "{target_dim} components explain {:.1}% of the variance (below {:.0}%)",
            cumulative * 100.0,
            MIN_EXPLAINED_VARIANCE * 100.0
        )
    });

    Ok(PcaModel {
        mean,
        components,
        explained_variance,
        explained_variance_ratio,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> RowMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        RowMatrix::new(rows, cols, data)
    }

    /// Points `a*u + b*w + offset` on a 2-plane inside `dim` dimensions.
    fn plane_data(n: usize, dim: usize, seed: u64) -> RowMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let offset: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
        let mut data = Vec::with_capacity(n * dim);
        for _ in 0..n {
            let a: f64 = rng.random_range(-3.0..3.0);
            let b: f64 = rng.random_range(-3.0..3.0);
            data.extend((0..dim).map(|j| a * u[j] + b * w[j] + offset[j]));
        }
        RowMatrix::new(n, dim, data)
    }

    fn max_orthonormality_error(m: &PcaModel) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in m.components.iter().enumerate() {
            for (j, b) in m.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        worst
    }

    #[test]
    fn rank_two_data_fully_explained() {
        let x = plane_data(60, 10, 3);
        let m = fit_pca(&x, 2).unwrap();
        assert!((m.cumulative_explained_variance() - 1.0).abs() <= 1e-9);
        assert!(m.warning.is_none());
    }

    #[test]
    fn components_are_orthonormal() {
        let x = random_matrix(200, 30, 11);
        let m = fit_pca(&x, 10).unwrap();
        assert!(max_orthonormality_error(&m) < 1e-8);
    }

    #[test]
    fn ratios_sorted_and_bounded() {
        let x = random_matrix(120, 15, 5);
        let m = fit_pca(&x, 15.min(119)).unwrap();
        for w in m.explained_variance_ratio.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(m.explained_variance_ratio.iter().all(|r| (0.0..=1.0).contains(r)));
        assert!(m.cumulative_explained_variance() <= 1.0 + 1e-12);
    }

    #[test]
    fn isotropic_noise_warns() {
        let x = random_matrix(300, 768, 7);
        let m = fit_pca(&x, 50).unwrap();
        assert!(m.cumulative_explained_variance() < MIN_EXPLAINED_VARIANCE);
        assert!(m.warning.is_some());
    }

    #[test]
    fn round_trip_on_low_rank_data() {
        let x = plane_data(40, 8, 9);
        let m = fit_pca(&x, 2).unwrap();
        let back = m.inverse_transform(&m.transform(&x));
        let num: f64 = x.as_slice().iter().zip(back.as_slice()).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = x.as_slice().iter().map(|a| a * a).sum();
        assert!((num / den).sqrt() < 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        let same = RowMatrix::new(5, 3, vec![1.5; 15]);
        assert!(matches!(fit_pca(&same, 1), Err(Error::Degenerate(_))));
        let x = random_matrix(5, 3, 1);
        assert!(fit_pca(&x, 0).is_err());
        assert!(fit_pca(&x, 4).is_err());
        let wide = random_matrix(4, 10, 1);
        assert!(fit_pca(&wide, 4).is_err());
    }

    #[test]
    fn sign_convention_is_deterministic() {
        let x = random_matrix(50, 6, 2);
        let a = fit_pca(&x, 3).unwrap();
        let b = fit_pca(&x, 3).unwrap();
        assert_eq!(a.components, b.components);
        for comp in &a.components {
            let pivot = comp.iter().copied().fold(0.0f64, |m, c| if c.abs() > m.abs() { c } else { m });
            assert!(pivot > 0.0);
        }
    }
}
