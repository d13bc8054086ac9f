//! Helpers shared by the integration tests of the `codeood` binary.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use codeood_core::elements::{elements_of, ElementKind};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn mini_corpus() -> PathBuf {
    workspace_root().join("data/mini/corpus.jsonl")
}

pub fn mini_embeddings() -> PathBuf {
    workspace_root().join("data/mini/embeddings.jsonl")
}

pub fn codeood(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codeood"))
        .args(args)
        .output()
        .expect("spawn codeood")
}

/// Runs the binary and panics with its stderr unless it exits with 0.
pub fn codeood_ok(args: &[&str]) -> Output {
    let out = codeood(args);
    assert!(
        out.status.success(),
        "codeood {:?} failed ({:?}):\n{}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// The Java functions of the element fixture, one string per function.
pub fn fixture_functions() -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut out = Vec::new();
    for file in ["handwritten.java", "generated.java"] {
        let text = std::fs::read_to_string(dir.join(file)).expect("fixture");
        out.extend(text.split("\n\n").map(str::trim).filter(|f| !f.is_empty()).map(String::from));
    }
    out
}

/// Element counts of one method according to the tree-sitter Java grammar.
/// The method is wrapped in a class so it parses as a member.
pub fn reference_counts(method: &str) -> [usize; ElementKind::COUNT] {
    let src = format!("class Fixture {{\n{method}\n}}\n");
    let mut parser = tree_sitter::Parser::new();
    parser
        .set_language(&tree_sitter_java::LANGUAGE.into())
        .expect("java grammar");
    let tree = parser.parse(&src, None).expect("parse");
    assert!(!tree.root_node().has_error(), "fixture does not parse:\n{method}");

    let mut counts = [0usize; ElementKind::COUNT];
    let mut cursor = tree.walk();
    let mut done = false;
    while !done {
        let node = cursor.node();
        let kind = match (node.kind(), node.is_named()) {
            ("else", false) => Some(ElementKind::Else),
            ("true", true) => Some(ElementKind::True),
            ("floating_point_type", true) => Some(ElementKind::FloatingPointType),
            ("unary_expression", true) => Some(ElementKind::UnaryExpression),
            ("array_access", true) => Some(ElementKind::ArrayAccess),
            ("while_statement", true) => Some(ElementKind::WhileStatement),
            ("long", false) => Some(ElementKind::Long),
            ("array_creation_expression", true) => Some(ElementKind::ArrayCreationExpression),
            ("break", false) => Some(ElementKind::Break),
            (">=", false) => Some(ElementKind::GeOperator),
            ("for", false) => Some(ElementKind::For),
            ("||", false) => Some(ElementKind::OrOperator),
            ("ternary_expression", true) => Some(ElementKind::ConditionalExpression),
            _ => None,
        };
        if let Some(k) = kind {
            counts[k.index()] += 1;
        }
        if cursor.goto_first_child() || cursor.goto_next_sibling() {
            continue;
        }
        loop {
            if !cursor.goto_parent() {
                done = true;
                break;
            }
            if cursor.goto_next_sibling() {
                break;
            }
        }
    }
    counts
}

/// Agreement of the rule-based extractor with the grammar-based counts.
#[derive(Debug, Default)]
pub struct Fidelity {
    pub functions: usize,
    /// Functions containing each kind, by the reference.
    pub kind_support: [usize; ElementKind::COUNT],
    pub presence_cells: usize,
    pub presence_agree: usize,
    /// Sum over cells of min(ours, reference) and of max(ours, reference).
    pub occurrence_min: usize,
    pub occurrence_max: usize,
    pub mismatches: Vec<String>,
}

impl Fidelity {
    pub fn presence_rate(&self) -> f64 {
        self.presence_agree as f64 / self.presence_cells as f64
    }

    /// Matched occurrences over the occurrences seen by either side.
    pub fn occurrence_rate(&self) -> f64 {
        self.occurrence_min as f64 / self.occurrence_max as f64
    }
}

pub fn element_fidelity() -> Fidelity {
    let mut f = Fidelity::default();
    for method in fixture_functions() {
        let reference = reference_counts(&method);
        let ours = elements_of(&method).expect("fixture lexes");
        f.functions += 1;
        for kind in ElementKind::ALL {
            let (r, o) = (reference[kind.index()], ours.get(kind));
            f.kind_support[kind.index()] += usize::from(r > 0);
            f.presence_cells += 1;
            if (r > 0) == (o > 0) {
                f.presence_agree += 1;
            }
            f.occurrence_min += r.min(o);
            f.occurrence_max += r.max(o);
            if r != o {
                let head = method.lines().next().unwrap_or_default();
                f.mismatches.push(format!("{}: ours {o}, reference {r} in `{head}`", kind.name()));
            }
        }
    }
    f
}

#[derive(Debug, serde::Deserialize)]
pub struct BleuPair {
    pub prediction: Vec<String>,
    pub reference: Vec<String>,
    pub sentence_bleu: f64,
}

/// Token pairs with scores frozen from an external BLEU implementation.
#[derive(Debug, serde::Deserialize)]
pub struct BleuFixture {
    pub oracle: String,
    pub corpus_bleu: f64,
    pub first5_corpus_bleu: f64,
    pub pairs: Vec<BleuPair>,
}

pub fn bleu_fixture() -> BleuFixture {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bleu_pairs.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("fixture")).expect("fixture json")
}

/// Straight-line BLEU-4 with add-one smoothing above unigrams, counting
/// n-grams by pairwise comparison.
pub fn naive_bleu(pairs: &[(Vec<String>, Vec<String>)]) -> f64 {
    let mut matched = [0usize; 4];
    let mut total = [0usize; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (cand, reference) in pairs {
        c += cand.len();
        r += reference.len();
        for n in 1..=4 {
            let grams = |s: &[String]| -> Vec<Vec<String>> { s.windows(n).map(|w| w.to_vec()).collect() };
            let cg = grams(cand);
            let rg = grams(reference);
            total[n - 1] += cg.len();
            let mut seen: Vec<&Vec<String>> = Vec::new();
            for g in &cg {
                if seen.contains(&g) {
                    continue;
                }
                seen.push(g);
                let in_cand = cg.iter().filter(|x| *x == g).count();
                let in_ref = rg.iter().filter(|x| *x == g).count();
                matched[n - 1] += in_cand.min(in_ref);
            }
        }
    }
    if c == 0 || matched[0] == 0 {
        return 0.0;
    }
    let mut log_p = (matched[0] as f64 / total[0] as f64).ln();
    for n in 1..4 {
        log_p += ((matched[n] + 1) as f64 / (total[n] + 1) as f64).ln();
    }
    let bp = if c < r { (1.0 - r as f64 / c as f64).exp() } else { 1.0 };
    bp * (log_p / 4.0).exp()
}

/// Reference SplitMix64, written from the published algorithm and kept
/// separate from the library generator.
pub struct RefSplitMix {
    state: u64,
}

impl RefSplitMix {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index below `n` by multiply-shift.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next() as u128 * n as u128) >> 64) as usize
    }

    /// Fisher-Yates, walking down from the last slot.
    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = self.below(i + 1);
            v.swap(i, j);
        }
    }
}

/// The documented masking rule: sort candidate ids, shuffle with the seed,
/// keep the first round-half-up(fraction * n).
pub fn reference_mask(candidates: &[String], fraction: f64, seed: u64) -> std::collections::BTreeSet<String> {
    let mut ids = candidates.to_vec();
    ids.sort();
    RefSplitMix::new(seed).shuffle(&mut ids);
    let n = ids.len();
    let mut take = (fraction * n as f64).floor() as usize;
    if fraction * n as f64 - take as f64 >= 0.5 {
        take += 1;
    }
    ids.into_iter().take(take.min(n)).collect()
}
