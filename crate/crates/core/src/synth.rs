//! Synthetic Java-like text-to-code corpora with controlled properties, used
//! for the bundled mini dataset and for large-scale tests.
//!
//! Every program belongs to one of a few families (getters, loops, string
//! building, validation, updates) whose statements share a vocabulary, so
//! family-level embeddings cluster. A fixed share of samples in each
//! partition additionally carries exactly one of the five text-to-code preset
//! elements. The base templates use none of the taxonomy elements except
//! `for` (loop family only), so preset coverage is exact.

use serde::Serialize;

use crate::corpus::{CodeSample, Partition};
use crate::elements::ElementKind;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    /// Share of each partition carrying each preset element.
    pub element_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_train: 800,
            n_valid: 100,
            n_test: 100,
            element_rate: 0.03,
            seed: 2023,
        }
    }
}

pub const FAMILIES: usize = 5;

/// The injected elements, in the order of the text-to-code preset.
pub const INJECTED: [ElementKind; 5] = [
    ElementKind::Else,
    ElementKind::FloatingPointType,
    ElementKind::UnaryExpression,
    ElementKind::ArrayAccess,
    ElementKind::True,
];

const NOUNS: [&str; 12] = [
    "count", "total", "name", "size", "index", "limit", "offset", "value", "width", "height", "score", "level",
];
const TYPES: [&str; 4] = ["int", "String", "Object", "Item"];

/// One generated sample with its ground truth.
#[derive(Debug, Clone, Serialize)]
pub struct SynthSample {
    pub sample: CodeSample,
    pub family: usize,
    pub injected: Option<ElementKind>,
}

fn pick<'a>(rng: &mut SplitMix64, items: &[&'a str]) -> &'a str {
    items[rng.below(items.len())]
}

fn base_statement(rng: &mut SplitMix64, family: usize) -> String {
    let a = pick(rng, &NOUNS);
    let b = pick(rng, &NOUNS);
    let k = rng.below(9) + 1;
    match family {
        0 => match rng.below(3) {
            0 => format!("int {a}{k} = this.{b};"),
            1 => format!("{a} = get{}();", capitalize(b)),
            _ => format!("this.{a} = {b} + {k};"),
        },
        1 => match rng.below(3) {
            0 => format!("for (int i = 0; i < {b}; i++) {{ {a} += i; }}"),
            1 => format!("{a} = {a} * {k};"),
            _ => format!("{a} += {b} % {k};"),
        },
        2 => match rng.below(3) {
            0 => format!("sb.append(\"{a}\");"),
            1 => format!("sb.append({b}).append(\",\");"),
            _ => format!("String s{k} = {a}.toString();"),
        },
        3 => match rng.below(3) {
            0 => format!("if ({a} > {b}) {{ return false; }}"),
            1 => format!("if ({a} == null) {{ throw new IllegalArgumentException(\"{a}\"); }}"),
            _ => format!("check({a}, {k});"),
        },
        _ => match rng.below(3) {
            0 => format!("this.{a} = {b};"),
            1 => format!("notify{}({k});", capitalize(a)),
            _ => format!("{a}.set{}({b});", capitalize(b)),
        },
    }
}

fn injected_statement(rng: &mut SplitMix64, kind: ElementKind) -> String {
    let a = pick(rng, &NOUNS);
    let b = pick(rng, &NOUNS);
    match kind {
        ElementKind::Else => format!("if ({a} > {b}) {{ {a} = {b}; }} else {{ {b} = {a}; }}"),
        ElementKind::FloatingPointType => format!("double ratio = {a} * 0.5;"),
        ElementKind::UnaryExpression => format!("if (!{a}Ready) {{ {b} += 1; }}"),
        ElementKind::ArrayAccess => format!("{a} += items[{b}];"),
        ElementKind::True => format!("boolean {a}Flag = true;"),
        other => unreachable!("{other:?} is not injected"),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map_or_else(String::new, |f| f.to_uppercase().chain(c).collect())
}

const FAMILY_VERBS: [&str; FAMILIES] = ["get", "sum", "format", "validate", "update"];
const FAMILY_RETURNS: [&str; FAMILIES] = ["int", "int", "String", "boolean", "void"];

fn program(rng: &mut SplitMix64, family: usize, injected: Option<ElementKind>) -> (String, String) {
    let noun = pick(rng, &NOUNS);
    let ty = pick(rng, &TYPES);
    let method = format!("{}{}", FAMILY_VERBS[family], capitalize(noun));
    let n = 1 + rng.below(10);
    let mut body: Vec<String> = (0..n).map(|_| base_statement(rng, family)).collect();
    if family == 2 {
        body.insert(0, "StringBuilder sb = new StringBuilder();".into());
    }
    if let Some(kind) = injected {
        let at = rng.below(body.len() + 1);
        body.insert(at, injected_statement(rng, kind));
    }
    let ret = match FAMILY_RETURNS[family] {
        "int" => format!("return {noun};"),
        "String" => "return sb.toString();".to_string(),
        "boolean" => format!("return {noun} != null;"),
        _ => String::new(),
    };
    if !ret.is_empty() {
        body.push(ret);
    }
    let code = format!(
        "{} {method}({ty} {noun}) {{ {} }}",
        FAMILY_RETURNS[family],
        body.join(" ")
    );
    let nl = format!(
        "{} the {noun} of the given {} . concode_field_sep {ty} {noun} concode_elem_sep {} {method}",
        FAMILY_VERBS[family],
        ty.to_lowercase(),
        FAMILY_RETURNS[family]
    );
    (nl, code)
}

/// Generates `n_train + n_valid + n_test` samples, partitions interleaved in
/// a seeded order. Within each partition exactly
/// `max(1, round(element_rate * n))` samples carry each injected element.
pub fn synth_corpus(config: &SynthConfig) -> Vec<SynthSample> {
    let mut rng = SplitMix64::new(config.seed);
    let mut partitions: Vec<Partition> = std::iter::repeat_n(Partition::Train, config.n_train)
        .chain(std::iter::repeat_n(Partition::Valid, config.n_valid))
        .chain(std::iter::repeat_n(Partition::Test, config.n_test))
        .collect();
    rng.shuffle(&mut partitions);

    let mut injected: Vec<Option<ElementKind>> = vec![None; partitions.len()];
    for p in [Partition::Train, Partition::Valid, Partition::Test] {
        let mut slots: Vec<usize> = (0..partitions.len()).filter(|&i| partitions[i] == p).collect();
        if slots.is_empty() {
            continue;
        }
        rng.shuffle(&mut slots);
        let per = ((config.element_rate * slots.len() as f64).round() as usize).max(1);
        for (k, chunk) in INJECTED.iter().zip(slots.chunks(per)) {
            for &i in chunk {
                injected[i] = Some(*k);
            }
        }
    }

    partitions
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let family = rng.below(FAMILIES);
            let (nl, code) = program(&mut rng, family, injected[i]);
            SynthSample {
                sample: CodeSample::new(format!("s{i:05}"), p, nl, code),
                family,
                injected: injected[i],
            }
        })
        .collect()
}

/// Embedding rows `{id, vec}` for synthetic samples: each family sits at its
/// own well-separated center and every sample adds small Gaussian noise.
pub fn synth_embeddings(samples: &[SynthSample], dim: usize, seed: u64) -> Vec<(String, Vec<f64>)> {
    let mut rng = SplitMix64::derive(seed, 7);
    let centers: Vec<Vec<f64>> = (0..FAMILIES)
        .map(|_| (0..dim).map(|_| 10.0 * (2.0 * rng.next_f64() - 1.0)).collect())
        .collect();
    samples
        .iter()
        .map(|s| {
            let v = centers[s.family].iter().map(|c| c + gaussian(&mut rng)).collect();
            (s.sample.id.clone(), v)
        })
        .collect()
}

/// Standard normal draw (Box-Muller).
fn gaussian(rng: &mut SplitMix64) -> f64 {
    let u1 = 1.0 - rng.next_f64();
    let u2 = rng.next_f64();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Serializes embeddings in the line format read by
/// [`crate::semantics::load_embeddings`]. Values are rounded to 6 decimals
/// to keep files small.
pub fn embeddings_jsonl(rows: &[(String, Vec<f64>)]) -> String {
    let mut out = String::new();
    for (id, v) in rows {
        let vals: Vec<String> = v.iter().map(|x| format!("{:.6}", x)).collect();
        out.push_str(&format!("{{\"id\":{},\"vec\":[{}]}}\n", serde_json::to_string(id).unwrap(), vals.join(",")));
    }
    out
}
