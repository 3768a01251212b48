//! Text-overlap evaluation and unit scoring.
//!
//! ROUGE-L here is the sentence-level variant: longest common subsequence
//! over word tokens, reported as precision/recall/F1. Unit scoring is a
//! pluggable interface; the bundled baseline scores a unit against each
//! reference profile by term-frequency cosine similarity.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// LCS-based precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Lowercases, splits on Unicode whitespace and strips leading/trailing
/// ASCII punctuation from each token. Tokens that strip to nothing vanish.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()))
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

/// Length of the longest common subsequence, by dynamic programming.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            row[j + 1] = if x == y {
                prev[j] + 1
            } else {
                row[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}

/// Sentence-level ROUGE-L between a candidate and a reference text.
///
/// Precision divides the LCS length by the candidate length, recall by the
/// reference length; either is 0 when its denominator is 0.
pub fn rouge_l_f1(candidate: &str, reference: &str) -> RougeScore {
    let cand = tokenize(candidate);
    let reft = tokenize(reference);
    let lcs = lcs_length(&cand, &reft) as f64;
    let precision = if cand.is_empty() {
        0.0
    } else {
        lcs / cand.len() as f64
    };
    let recall = if reft.is_empty() {
        0.0
    } else {
        lcs / reft.len() as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    RougeScore {
        precision,
        recall,
        f1,
    }
}

/// Scores one unit text against k reference profiles, returning exactly k
/// finite scores. Implementations must be deterministic.
pub trait UnitScorer {
    fn name(&self) -> &str;
    fn score(&self, unit: &str, profiles: &[&str]) -> Result<Vec<f64>>;
}

/// Term-frequency cosine similarity against each profile.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalScorer;

impl UnitScorer for LexicalScorer {
    fn name(&self) -> &str {
        "lexical"
    }

    fn score(&self, unit: &str, profiles: &[&str]) -> Result<Vec<f64>> {
        if profiles.is_empty() {
            return Err(Error::ScorerFailure("no profiles to score against".into()));
        }
        Ok(lexical_unit_scorer(unit, profiles))
    }
}

/// Cosine similarity between term-frequency vectors of the unit and each
/// profile, over their union vocabulary; 0 when either side has no tokens.
pub fn lexical_unit_scorer(unit: &str, profiles: &[&str]) -> Vec<f64> {
    let unit_tf = term_frequencies(unit);
    profiles
        .iter()
        .map(|p| cosine(&unit_tf, &term_frequencies(p)))
        .collect()
}

fn term_frequencies(text: &str) -> BTreeMap<String, f64> {
    let mut tf = BTreeMap::new();
    for token in tokenize(text) {
        *tf.entry(token).or_insert(0.0) += 1.0;
    }
    tf
}

fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(token, x)| b.get(token).map(|y| x * y))
        .sum();
    if dot == 0.0 {
        return 0.0;
    }
    let norm_a: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let norm_b: f64 = b.values().map(|y| y * y).sum::<f64>().sqrt();
    dot / (norm_a * norm_b)
}
