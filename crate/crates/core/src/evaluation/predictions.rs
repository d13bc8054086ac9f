use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Partition};
use crate::error::{Error, Result};

/// One model output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub prediction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_logprobs: Option<Vec<f64>>,
}

/// Model outputs keyed by sample id, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionSet {
    pub items: IndexMap<String, Prediction>,
}

#[derive(Deserialize)]
struct Record {
    id: String,
    prediction: String,
    #[serde(default)]
    token_logprobs: Option<Vec<f64>>,
}

impl PredictionSet {
    pub fn get(&self, id: &str) -> Option<&Prediction> {
        self.items.get(id)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn insert(&mut self, id: impl Into<String>, prediction: impl Into<String>, logprobs: Option<Vec<f64>>) {
        self.items.insert(
            id.into(),
            Prediction {
                prediction: prediction.into(),
                token_logprobs: logprobs,
            },
        );
    }

    /// Parses `{"id", "prediction", "token_logprobs"?}` lines. Every id must be
    /// a test sample of `corpus`; log-probabilities, when given, must be
    /// non-empty, finite and at most 0.
    pub fn parse(bytes: &[u8], corpus: &Corpus) -> Result<Self> {
        let mut items = IndexMap::new();
        for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
            let line = i + 1;
            let text = std::str::from_utf8(raw).map_err(|_| Error::InvalidUtf8 { line })?;
            if text.trim().is_empty() {
                continue;
            }
            let r: Record = serde_json::from_str(text).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            match corpus.get(&r.id) {
                Some(s) if s.partition == Partition::Test => {}
                Some(_) => {
                    return Err(Error::Parse {
                        line,
                        message: format!("prediction for {:?}, which is not a test sample", r.id),
                    })
                }
                None => return Err(Error::UnknownId(r.id)),
            }
            if let Some(lp) = &r.token_logprobs {
                if lp.is_empty() || lp.iter().any(|v| !v.is_finite() || *v > 0.0) {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "token_logprobs for {:?} must be a non-empty list of finite values <= 0",
                            r.id
                        ),
                    });
                }
            }
            let pred = Prediction {
                prediction: r.prediction,
                token_logprobs: r.token_logprobs,
            };
            if items.insert(r.id.clone(), pred).is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate prediction for id {:?}", r.id),
                });
            }
        }
        Ok(Self { items })
    }

    pub fn load(path: impl AsRef<Path>, corpus: &Corpus) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&bytes, corpus)
    }

    /// Predictions that copy the reference target of every test sample.
    pub fn self_predictions(corpus: &Corpus) -> Self {
        let mut set = Self::default();
        for (_, s) in corpus.iter_partition(Partition::Test) {
            set.insert(s.id.clone(), s.target.clone(), None);
        }
        set
    }

    pub fn write_jsonl<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (id, p) in &self.items {
            let mut obj = serde_json::Map::new();
            obj.insert("id".into(), id.clone().into());
            obj.insert("prediction".into(), p.prediction.clone().into());
            if let Some(lp) = &p.token_logprobs {
                obj.insert("token_logprobs".into(), serde_json::to_value(lp)?);
            }
            serde_json::to_writer(&mut *w, &obj)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
