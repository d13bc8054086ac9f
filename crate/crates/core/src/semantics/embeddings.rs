use std::borrow::Cow;
use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use super::RowMatrix;
use crate::corpus::{Corpus, Partition};
use crate::error::{Error, Result};

/// Embedding vectors for corpus samples, rows in corpus order.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    pub ids: Vec<String>,
    pub vectors: RowMatrix,
}

impl EmbeddingSet {
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Rows whose sample is in one of `partitions`.
    pub fn partition_rows(&self, corpus: &Corpus, partitions: &[Partition]) -> Vec<usize> {
        self.ids
            .iter()
            .enumerate()
            .filter(|(_, id)| corpus.get(id).is_some_and(|s| partitions.contains(&s.partition)))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Deserialize)]
struct Record {
    id: String,
    vec: Vec<Option<f64>>,
}

/// Python's json module writes `NaN` and `Infinity` for non-finite floats.
/// They are mapped to `null` outside string literals so the record still
/// parses and the offending id can be named.
fn nullify_non_finite(line: &str) -> Cow<'_, str> {
    if !(line.contains("NaN") || line.contains("Infinity")) {
        return Cow::Borrowed(line);
    }
    let mut out = String::with_capacity(line.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut rest = line;
    while let Some(c) = rest.chars().next() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '"' {
            in_string = true;
        }
        let word = ["-Infinity", "Infinity", "NaN"]
            .into_iter()
            .find(|w| rest.starts_with(w));
        match word {
            Some(w) => {
                out.push_str("null");
                rest = &rest[w.len()..];
            }
            None => {
                out.push(c);
                rest = &rest[c.len_utf8()..];
            }
        }
    }
    Cow::Owned(out)
}

/// Parses line-delimited `{"id": str, "vec": [num]}` records. Every train and
/// test sample of `corpus` must have a vector; valid samples may.
pub fn parse_embeddings(bytes: &[u8], corpus: &Corpus) -> Result<EmbeddingSet> {
    let mut rows: HashMap<String, Vec<f64>> = HashMap::new();
    let mut dim: Option<(usize, String)> = None;

    for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = i + 1;
        let text = std::str::from_utf8(raw).map_err(|_| Error::InvalidUtf8 { line })?;
        if text.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&nullify_non_finite(text)).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        if corpus.get(&record.id).is_none() {
            return Err(Error::UnknownId(record.id));
        }
        let values: Option<Vec<f64>> = record
            .vec
            .iter()
            .map(|v| v.filter(|x| x.is_finite()))
            .collect();
        let values = values.ok_or_else(|| Error::NonFinite { id: record.id.clone() })?;
        match &dim {
            None => dim = Some((values.len(), record.id.clone())),
            Some((d, _)) if *d != values.len() => {
                return Err(Error::DimensionMismatch {
                    id: record.id,
                    expected: *d,
                    found: values.len(),
                });
            }
            _ => {}
        }
        if rows.contains_key(&record.id) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate embedding for id {:?}", record.id),
            });
        }
        rows.insert(record.id, values);
    }

    let dim = dim.map_or(0, |(d, _)| d);
    if dim == 0 && !rows.is_empty() {
        return Err(Error::InvalidArgument("embedding vectors are empty".into()));
    }
    let missing: Vec<String> = corpus
        .samples()
        .iter()
        .filter(|s| s.partition != Partition::Valid && !rows.contains_key(&s.id))
        .map(|s| s.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingIds {
            what: "embeddings",
            ids: missing,
        });
    }

    let mut ids = Vec::with_capacity(rows.len());
    let mut data = Vec::with_capacity(rows.len() * dim);
    for s in corpus.samples() {
        if let Some(v) = rows.remove(&s.id) {
            ids.push(s.id.clone());
            data.extend(v);
        }
    }
    Ok(EmbeddingSet {
        vectors: RowMatrix::new(ids.len(), dim, data),
        ids,
    })
}

pub fn load_embeddings(path: impl AsRef<Path>, corpus: &Corpus) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&bytes, corpus)
}
