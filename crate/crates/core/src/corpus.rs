//! Paired code datasets: loading, validation and the basis-text rule.
//!
//! A corpus file is line-delimited JSON with one object per line:
//! `{"id": str, "partition": "train"|"valid"|"test", "input": str, "target": str}`.
//! Extra fields are kept and written back out, but never interpreted.
//!
//! The `valid` partition is loaded and carried through emitted files; the
//! splitters only read it when explicitly asked to filter it.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Text2code,
    Refinement,
    Translation,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Text2code => "text2code",
            TaskKind::Refinement => "refinement",
            TaskKind::Translation => "translation",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text2code" => Ok(TaskKind::Text2code),
            "refinement" => Ok(TaskKind::Refinement),
            "translation" => Ok(TaskKind::Translation),
            other => Err(Error::InvalidArgument(format!(
                "unknown task {other:?} (expected text2code, refinement or translation)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Valid,
    Test,
}

impl Partition {
    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Valid => "valid",
            Partition::Test => "test",
        }
    }

    fn parse(label: &str) -> Option<Self> {
        match label {
            "train" => Some(Partition::Train),
            "valid" => Some(Partition::Valid),
            "test" => Some(Partition::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which text field of a sample carries the properties that get masked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Input,
    Target,
}

impl Basis {
    /// Text-to-code masks on the generated code; the code-to-code tasks mask
    /// on their input program.
    pub fn default_for(task: TaskKind) -> Self {
        match task {
            TaskKind::Text2code => Basis::Target,
            TaskKind::Refinement | TaskKind::Translation => Basis::Input,
        }
    }

    pub fn resolve(task: TaskKind, override_basis: Option<Basis>) -> Self {
        override_basis.unwrap_or_else(|| Basis::default_for(task))
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "input" => Ok(Basis::Input),
            "target" => Ok(Basis::Target),
            other => Err(Error::InvalidArgument(format!(
                "unknown basis {other:?} (expected input or target)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSample {
    pub id: String,
    pub partition: Partition,
    pub input: String,
    pub target: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl CodeSample {
    pub fn new(
        id: impl Into<String>,
        partition: Partition,
        input: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            partition,
            input: input.into(),
            target: target.into(),
            extra: Map::new(),
        }
    }

    pub fn text(&self, basis: Basis) -> &str {
        match basis {
            Basis::Input => &self.input,
            Basis::Target => &self.target,
        }
    }
}

/// The text whose properties decide whether `sample` is masked.
pub fn basis_text<'a>(sample: &'a CodeSample, task: TaskKind, override_basis: Option<Basis>) -> &'a str {
    sample.text(Basis::resolve(task, override_basis))
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    partition: String,
    input: String,
    target: String,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

/// A validated, immutable dataset. Sample order is file order.
#[derive(Debug, Clone)]
pub struct Corpus {
    task: TaskKind,
    samples: Vec<CodeSample>,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus from samples already in memory, applying the same
    /// validation as [`load_corpus`].
    pub fn from_samples(task: TaskKind, samples: Vec<CodeSample>) -> Result<Self> {
        let mut index = HashMap::with_capacity(samples.len());
        for (pos, sample) in samples.iter().enumerate() {
            let line = pos + 1;
            if sample.id.is_empty() {
                return Err(Error::EmptyId { line });
            }
            if sample.target.is_empty() {
                return Err(Error::EmptyTarget {
                    id: sample.id.clone(),
                    line,
                });
            }
            if let Some(first) = index.insert(sample.id.clone(), pos) {
                return Err(Error::DuplicateId {
                    id: sample.id.clone(),
                    first_line: first + 1,
                    second_line: line,
                });
            }
        }
        let corpus = Self {
            task,
            samples,
            index,
        };
        if corpus.count(Partition::Train) == 0 {
            return Err(Error::MissingPartition("train"));
        }
        if corpus.count(Partition::Test) == 0 {
            return Err(Error::MissingPartition("test"));
        }
        Ok(corpus)
    }

    /// Parses line-delimited JSON. Blank lines are skipped but still counted
    /// for line numbers in error messages.
    pub fn parse(task: TaskKind, bytes: &[u8]) -> Result<Self> {
        let mut samples = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();

        for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
            let line = i + 1;
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            let text = std::str::from_utf8(raw).map_err(|_| Error::InvalidUtf8 { line })?;
            if text.trim().is_empty() {
                continue;
            }
            let record: RawRecord = serde_json::from_str(text).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            let partition =
                Partition::parse(&record.partition).ok_or_else(|| Error::UnknownPartition {
                    line,
                    label: record.partition.clone(),
                })?;
            if record.id.is_empty() {
                return Err(Error::EmptyId { line });
            }
            if record.target.is_empty() {
                return Err(Error::EmptyTarget { id: record.id, line });
            }
            if let Some(&first_line) = seen.get(&record.id) {
                return Err(Error::DuplicateId {
                    id: record.id,
                    first_line,
                    second_line: line,
                });
            }
            seen.insert(record.id.clone(), line);
            samples.push(CodeSample {
                id: record.id,
                partition,
                input: record.input,
                target: record.target,
                extra: record.extra,
            });
        }
        Self::from_samples(task, samples)
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn samples(&self) -> &[CodeSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CodeSample> {
        self.index.get(id).map(|&i| &self.samples[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn count(&self, partition: Partition) -> usize {
        self.samples
            .iter()
            .filter(|s| s.partition == partition)
            .count()
    }

    pub fn iter_partition(&self, partition: Partition) -> impl Iterator<Item = (usize, &CodeSample)> {
        self.samples
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.partition == partition)
    }

    /// Writes the given samples in corpus order, one JSON object per line.
    pub fn write_jsonl<'a, W: Write>(
        writer: &mut W,
        samples: impl IntoIterator<Item = &'a CodeSample>,
    ) -> std::io::Result<()> {
        for sample in samples {
            serde_json::to_writer(&mut *writer, sample)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn load_corpus(path: impl AsRef<Path>, task: TaskKind) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Corpus::parse(task, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, partition: &str, target: &str) -> String {
        format!(r#"{{"id":"{id}","partition":"{partition}","input":"nl {id}","target":"{target}"}}"#)
    }

    #[test]
    fn loads_in_file_order() {
        let text = [
            line("c", "train", "return 1;"),
            line("a", "test", "return 2;"),
            line("b", "train", "return 3;"),
        ]
        .join("\n");
        let corpus = Corpus::parse(TaskKind::Text2code, text.as_bytes()).unwrap();
        let ids: Vec<_> = corpus.samples().iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
        assert_eq!(corpus.position("b"), Some(2));
        assert_eq!(corpus.count(Partition::Train), 2);
    }

    #[test]
    fn duplicate_id_names_both_lines() {
        let text = [
            line("a", "train", "x;"),
            line("b", "test", "y;"),
            line("a", "train", "z;"),
        ]
        .join("\n");
        let err = Corpus::parse(TaskKind::Text2code, text.as_bytes()).unwrap_err();
        match &err {
            Error::DuplicateId {
                id,
                first_line,
                second_line,
            } => {
                assert_eq!(id, "a");
                assert_eq!((*first_line, *second_line), (1, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("\"a\""));
    }

    #[test]
    fn unknown_partition_rejected() {
        let text = [line("a", "train", "x;"), line("b", "dev", "y;")].join("\n");
        let err = Corpus::parse(TaskKind::Text2code, text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::UnknownPartition { line: 2, .. }));
        assert!(err.to_string().contains("unknown partition"));
    }

    #[test]
    fn empty_target_rejected() {
        let text = [line("a", "train", ""), line("b", "test", "y;")].join("\n");
        let err = Corpus::parse(TaskKind::Text2code, text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::EmptyTarget { line: 1, .. }));
    }

    #[test]
    fn parse_error_reports_line() {
        let text = format!("{}\n{{not json\n", line("a", "train", "x;"));
        let err = Corpus::parse(TaskKind::Text2code, text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn invalid_utf8_is_an_error() {
        let mut bytes = line("a", "train", "x;").into_bytes();
        bytes.push(b'\n');
        bytes.extend_from_slice(b"{\"id\":\"b\",\"partition\":\"test\",\"input\":\"\xff\",\"target\":\"y\"}");
        let err = Corpus::parse(TaskKind::Text2code, &bytes).unwrap_err();
        assert!(matches!(err, Error::InvalidUtf8 { line: 2 }));
    }

    #[test]
    fn needs_train_and_test() {
        let text = line("a", "train", "x;");
        let err = Corpus::parse(TaskKind::Text2code, text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingPartition("test")));
    }

    #[test]
    fn extra_fields_survive_round_trip() {
        let text = r#"{"id":"a","partition":"train","input":"i","target":"t","lang":"java","n":3}
{"id":"b","partition":"test","input":"i2","target":"t2"}
"#;
        let corpus = Corpus::parse(TaskKind::Refinement, text.as_bytes()).unwrap();
        let mut out = Vec::new();
        Corpus::write_jsonl(&mut out, corpus.samples()).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn basis_rules() {
        let s = CodeSample::new("a", Partition::Train, "fix me", "int x;");
        assert_eq!(basis_text(&s, TaskKind::Text2code, None), "int x;");
        assert_eq!(basis_text(&s, TaskKind::Refinement, None), "fix me");
        assert_eq!(basis_text(&s, TaskKind::Translation, None), "fix me");
        assert_eq!(
            basis_text(&s, TaskKind::Translation, Some(Basis::Target)),
            "int x;"
        );
        assert_eq!(
            basis_text(&s, TaskKind::Text2code, Some(Basis::Input)),
            "fix me"
        );
    }
}
