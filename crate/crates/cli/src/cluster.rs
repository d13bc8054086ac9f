use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use codeood_core::corpus::{load_corpus, Basis, Partition, TaskKind};
use codeood_core::semantics::{
    elbow_select_with, fit_pca, kmeans_fit, load_embeddings, nearest_centroids, ClusterModel, KMeansParams, PcaSummary,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::require;
use crate::output::{artifact, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitOn {
    /// Every embedded sample.
    All,
    Train,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub corpus: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub task: TaskKind,
    pub basis: Option<Basis>,
    pub seed: u64,
    /// A cluster count, or "auto" for the elbow search.
    pub k: String,
    pub k_min: usize,
    pub k_max: usize,
    /// Target PCA dimension; 0 clusters the raw vectors.
    pub pca_dim: usize,
    pub fit_on: FitOn,
    pub max_iter: usize,
    pub tol: f64,
    /// k-means++ restarts per fit.
    pub n_init: usize,
    pub out: Option<PathBuf>,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            embeddings: None,
            task: TaskKind::Text2code,
            basis: None,
            seed: 0,
            k: "auto".into(),
            k_min: 2,
            k_max: 40,
            pca_dim: 50,
            fit_on: FitOn::All,
            max_iter: 300,
            tol: 1e-6,
            n_init: codeood_core::semantics::DEFAULT_N_INIT,
            out: None,
        }
    }
}

pub fn run(cfg: ClusterConfig, echo: &Value) -> Result<()> {
    let corpus = load_corpus(require(&cfg.corpus, "corpus")?, cfg.task)?;
    let emb = load_embeddings(require(&cfg.embeddings, "embeddings")?, &corpus)?;
    let out = require(&cfg.out, "out")?;

    let fit_rows: Vec<usize> = match cfg.fit_on {
        FitOn::All => (0..emb.len()).collect(),
        FitOn::Train => emb.partition_rows(&corpus, &[Partition::Train]),
    };
    let fit_raw = emb.vectors.select_rows(&fit_rows);

    let (space, fit_x, pca) = if cfg.pca_dim == 0 {
        (emb.vectors.clone(), fit_raw, None)
    } else {
        if cfg.pca_dim > emb.dim() {
            bail!(
                "--pca-dim {} exceeds the embedding dimension {}; pass --pca-dim 0 to cluster raw vectors",
                cfg.pca_dim,
                emb.dim()
            );
        }
        let model = fit_pca(&fit_raw, cfg.pca_dim)?;
        if let Some(w) = &model.warning {
            eprintln!("warning: {w}");
        }
        let summary = PcaSummary {
            input_dim: model.input_dim(),
            target_dim: model.target_dim(),
            cumulative_explained_variance: model.cumulative_explained_variance(),
            explained_variance_ratio: model.explained_variance_ratio.clone(),
            fit_on: serde_json::to_value(cfg.fit_on)?.as_str().unwrap_or_default().to_string(),
            warning: model.warning.clone(),
        };
        (model.transform(&emb.vectors), model.transform(&fit_raw), Some(summary))
    };

    let base = KMeansParams {
        k: 1,
        seed: cfg.seed,
        max_iter: cfg.max_iter,
        tol: cfg.tol,
        n_init: cfg.n_init,
    };
    let (k, elbow) = if cfg.k == "auto" {
        let k_max = cfg.k_max.min(fit_x.rows().saturating_sub(1));
        let curve = elbow_select_with(&fit_x, cfg.k_min, k_max, base)?;
        (curve.best_k, Some(curve))
    } else {
        let k: usize = cfg
            .k
            .parse()
            .with_context(|| format!("--k must be a positive integer or \"auto\", got {:?}", cfg.k))?;
        (k, None)
    };
    let fit = kmeans_fit(&fit_x, KMeansParams { k, ..base })?;
    if !fit.converged {
        eprintln!("warning: k-means stopped after {} iterations without converging", fit.iterations);
    }
    let labels = nearest_centroids(&space, &fit.centroids);
    let mut model = ClusterModel::from_fit(&emb.ids, codeood_core::semantics::KMeansFit { labels, ..fit }, cfg.seed);
    model.pca = pca;
    model.elbow = elbow;
    model.validate()?;
    write_json(out, &artifact("cluster_model", echo, &model)?)?;
    eprintln!("wrote {} (K = {})", out.display(), model.k);
    Ok(())
}

/// Reads a cluster model artifact written by [`run`].
pub fn load_model(path: &std::path::Path) -> Result<ClusterModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let model: ClusterModel =
        serde_json::from_str(&text).with_context(|| format!("parsing cluster model {}", path.display()))?;
    model.validate()?;
    Ok(model)
}
