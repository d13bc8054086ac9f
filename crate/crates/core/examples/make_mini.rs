//! Regenerates the bundled mini dataset under `data/mini/`.
//!
//! ```text
//! cargo run -p codeood-core --example make_mini -- [out_dir]
//! ```

use std::fs;
use std::path::PathBuf;

use codeood_core::corpus::Corpus;
use codeood_core::synth::{embeddings_jsonl, synth_corpus, synth_embeddings, SynthConfig};

/// Embedding width of the bundled vectors; above the default PCA target.
const DIM: usize = 64;

fn main() -> std::io::Result<()> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/mini")));
    fs::create_dir_all(&out)?;
    let config = SynthConfig::default();
    let samples = synth_corpus(&config);

    let mut corpus = Vec::new();
    Corpus::write_jsonl(&mut corpus, samples.iter().map(|s| &s.sample))?;
    fs::write(out.join("corpus.jsonl"), corpus)?;
    fs::write(
        out.join("embeddings.jsonl"),
        embeddings_jsonl(&synth_embeddings(&samples, DIM, config.seed)),
    )?;
    eprintln!("wrote {} samples to {}", samples.len(), out.display());
    Ok(())
}
