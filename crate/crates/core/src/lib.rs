//! Out-of-distribution scenario construction for source-code datasets.
//!
//! A corpus is filtered along one property dimension at a time (program
//! size, language elements, or embedding clusters) so that the training
//! split lacks the property and the test split keeps only samples that
//! have it. A separate module scores model predictions on such
//! splits.

pub mod corpus;
pub mod distribution;
pub mod elements;
pub mod error;
pub mod evaluation;
pub mod lexer;
pub mod rng;
pub mod semantics;
pub mod splitter;
pub mod synth;

pub use corpus::{basis_text, load_corpus, Basis, CodeSample, Corpus, Partition, TaskKind};
pub use elements::{ElementHistogram, ElementKind};
pub use error::{Error, Result};
pub use rng::SplitMix64;
