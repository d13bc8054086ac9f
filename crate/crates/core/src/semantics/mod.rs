//! Semantic property space: embedding vectors, PCA reduction, k-means
//! clustering, and cluster membership as the masked property.

mod embeddings;
mod kmeans;
mod pca;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::corpus::{CodeSample, Corpus};
use crate::error::{Error, Result};

pub use embeddings::{load_embeddings, parse_embeddings, EmbeddingSet};
pub use kmeans::{
    elbow_select, elbow_select_with, kmeans_fit, nearest_centroids, ElbowCurve, KMeansFit, KMeansParams, DEFAULT_N_INIT,
};
pub use pca::{fit_pca, PcaModel, MIN_EXPLAINED_VARIANCE};

/// Dense row-major matrix of points.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RowMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn select_rows(&self, idx: &[usize]) -> RowMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        RowMatrix::new(idx.len(), self.cols, data)
    }

    pub fn scaled(&self, s: f64) -> RowMatrix {
        RowMatrix::new(self.rows, self.cols, self.data.iter().map(|v| v * s).collect())
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Summary of the reduction a cluster model was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaSummary {
    pub input_dim: usize,
    pub target_dim: usize,
    pub cumulative_explained_variance: f64,
    pub explained_variance_ratio: Vec<f64>,
    pub fit_on: String,
    pub warning: Option<String>,
}

/// K-means result keyed by sample id, as written to the cluster model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub seed: u64,
    pub centroids: Vec<Vec<f64>>,
    pub assignments: IndexMap<String, usize>,
    pub inertia: f64,
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<PcaSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elbow: Option<ElbowCurve>,
}

impl ClusterModel {
    pub fn from_fit(ids: &[String], fit: KMeansFit, seed: u64) -> Self {
        assert_eq!(ids.len(), fit.labels.len());
        Self {
            k: fit.centroids.rows(),
            seed,
            centroids: fit.centroids.iter_rows().map(<[f64]>::to_vec).collect(),
            assignments: ids.iter().cloned().zip(fit.labels).collect(),
            inertia: fit.inertia,
            inertia_history: fit.inertia_history,
            iterations: fit.iterations,
            converged: fit.converged,
            pca: None,
            elbow: None,
        }
    }

    pub fn cluster_of(&self, id: &str) -> Option<usize> {
        self.assignments.get(id).copied()
    }

    /// Checks a deserialized model for internal consistency.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.centroids.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "cluster model has k = {} but {} centroids",
                self.k,
                self.centroids.len()
            )));
        }
        for &c in self.assignments.values() {
            if c >= self.k {
                return Err(Error::ClusterOutOfRange { cluster: c, k: self.k });
            }
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in self.assignments.values() {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Ids assigned to any of `clusters`, in model order.
pub fn cluster_members<'m>(model: &'m ClusterModel, clusters: &[usize]) -> Result<Vec<&'m str>> {
    let mut wanted = vec![false; model.k];
    for &c in clusters {
        if c >= model.k {
            return Err(Error::ClusterOutOfRange { cluster: c, k: model.k });
        }
        wanted[c] = true;
    }
    Ok(model
        .assignments
        .iter()
        .filter(|(_, &c)| wanted[c])
        .map(|(id, _)| id.as_str())
        .collect())
}

/// The first `n` members of a cluster in corpus order, for eyeballing what
/// the cluster is about.
pub fn sample_cluster_examples<'c>(
    model: &ClusterModel,
    corpus: &'c Corpus,
    cluster: usize,
    n: usize,
) -> Result<Vec<&'c CodeSample>> {
    if n == 0 {
        return Err(Error::InvalidArgument("example count must be at least 1".into()));
    }
    if cluster >= model.k {
        return Err(Error::ClusterOutOfRange { cluster, k: model.k });
    }
    Ok(corpus
        .samples()
        .iter()
        .filter(|s| model.cluster_of(&s.id) == Some(cluster))
        .take(n)
        .collect())
}
