//! Scoring systems, tie-aware rank derivation and rank-score functions.
//!
//! A scoring system assigns one real score per item; its rank function is
//! derived by sorting on decreasing score, and its rank-score function (RSF)
//! is the normalized score profile read off in rank order. These are the
//! primitives every other module builds on.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// One candidate item: an opaque id plus optional unit text and source label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub text: Option<String>,
    pub source: Option<String>,
}

impl Item {
    pub fn new(id: impl Into<String>) -> Self {
        Item {
            id: id.into(),
            text: None,
            source: None,
        }
    }

    pub fn with_text(id: impl Into<String>, text: impl Into<String>) -> Self {
        Item {
            id: id.into(),
            text: Some(text.into()),
            source: None,
        }
    }
}

/// How tied scores are turned into rank values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Tied items share the mean of the rank positions they span, so the
    /// multiset of ranks always sums to n(n+1)/2.
    #[default]
    Fractional,
    /// Tied items receive consecutive integer ranks in item-list order.
    FirstOccurrence,
}

/// A named score function over a fixed, ordered item list.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringSystem {
    system_id: String,
    item_ids: Vec<String>,
    scores: Vec<f64>,
}

impl ScoringSystem {
    /// Builds a system from `(item_id, score)` pairs, keeping their order.
    pub fn new(system_id: impl Into<String>, entries: Vec<(String, f64)>) -> Result<Self> {
        let system_id = system_id.into();
        let mut seen = BTreeSet::new();
        for (id, _) in &entries {
            if !seen.insert(id.clone()) {
                return Err(Error::Validation(format!(
                    "duplicate item id `{id}` in system `{system_id}`"
                )));
            }
        }
        let (item_ids, scores) = entries.into_iter().unzip();
        Ok(ScoringSystem {
            system_id,
            item_ids,
            scores,
        })
    }

    pub fn system_id(&self) -> &str {
        &self.system_id
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn score_of(&self, item_id: &str) -> Option<f64> {
        self.item_ids
            .iter()
            .position(|id| id == item_id)
            .map(|i| self.scores[i])
    }

    fn check_finite(&self) -> Result<()> {
        check_finite(&self.system_id, &self.item_ids, &self.scores)
    }
}

fn check_finite(system_id: &str, item_ids: &[String], scores: &[f64]) -> Result<()> {
    for (id, s) in item_ids.iter().zip(scores) {
        if !s.is_finite() {
            return Err(Error::NonFiniteScore {
                system: system_id.to_string(),
                item: id.clone(),
            });
        }
    }
    Ok(())
}

/// An n-items-by-k-systems grid of scores, the input to diversity and fusion.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    items: Vec<Item>,
    system_ids: Vec<String>,
    /// Row-major: `values[i][j]` is the score of item i under system j.
    values: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(items: Vec<Item>, system_ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Validation("score matrix has no items".into()));
        }
        if system_ids.is_empty() {
            return Err(Error::Validation("score matrix has no systems".into()));
        }
        let mut seen = BTreeSet::new();
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate item id `{}` in score matrix",
                    item.id
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for id in &system_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate system id `{id}` in score matrix"
                )));
            }
        }
        if values.len() != items.len() {
            return Err(Error::Validation(format!(
                "expected {} score rows, got {}",
                items.len(),
                values.len()
            )));
        }
        for (item, row) in items.iter().zip(&values) {
            if row.len() != system_ids.len() {
                return Err(Error::Validation(format!(
                    "row for item `{}` has {} scores, expected {}",
                    item.id,
                    row.len(),
                    system_ids.len()
                )));
            }
            for (sys, v) in system_ids.iter().zip(row) {
                if !v.is_finite() {
                    return Err(Error::NonFiniteScore {
                        system: sys.clone(),
                        item: item.id.clone(),
                    });
                }
            }
        }
        Ok(ScoreMatrix {
            items,
            system_ids,
            values,
        })
    }

    /// Assembles a matrix from complete per-system score functions.
    ///
    /// Every system must score exactly the given items.
    pub fn from_systems(items: Vec<Item>, systems: Vec<ScoringSystem>) -> Result<Self> {
        let system_ids: Vec<String> = systems.iter().map(|s| s.system_id.clone()).collect();
        let mut values = vec![vec![0.0; systems.len()]; items.len()];
        for (j, sys) in systems.iter().enumerate() {
            if sys.len() != items.len() {
                return Err(Error::Validation(format!(
                    "system `{}` scores {} items, matrix has {}",
                    sys.system_id,
                    sys.len(),
                    items.len()
                )));
            }
            for (i, item) in items.iter().enumerate() {
                match sys.score_of(&item.id) {
                    Some(v) => values[i][j] = v,
                    None => {
                        return Err(Error::Validation(format!(
                            "system `{}` has no score for item `{}`",
                            sys.system_id, item.id
                        )))
                    }
                }
            }
        }
        ScoreMatrix::new(items, system_ids, values)
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_systems(&self) -> usize {
        self.system_ids.len()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item_ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|it| it.id.as_str())
    }

    pub fn system_ids(&self) -> &[String] {
        &self.system_ids
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn system_index(&self, system_id: &str) -> Option<usize> {
        self.system_ids.iter().position(|id| id == system_id)
    }

    /// Scores of system `j` in item order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    /// Materializes system `j` as a standalone scoring system.
    pub fn system(&self, j: usize) -> ScoringSystem {
        ScoringSystem {
            system_id: self.system_ids[j].clone(),
            item_ids: self.items.iter().map(|it| it.id.clone()).collect(),
            scores: self.column(j),
        }
    }

    /// Parses the `item_id,<system>,...` CSV format.
    ///
    /// Plain comma separation, no quoting: ids must not contain commas.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            location: "line 1".into(),
            message: "empty score matrix".into(),
        })?;
        let mut cols = header.split(',');
        let first = cols.next().unwrap_or("").trim();
        if first != "item_id" {
            return Err(Error::Parse {
                location: "line 1".into(),
                message: format!("expected header to start with `item_id`, got `{first}`"),
            });
        }
        let system_ids: Vec<String> = cols.map(|c| c.trim().to_string()).collect();
        if system_ids.is_empty() {
            return Err(Error::Parse {
                location: "line 1".into(),
                message: "header names no scoring systems".into(),
            });
        }

        let mut items = Vec::new();
        let mut values = Vec::new();
        for (idx, line) in lines {
            let location = format!("line {}", idx + 1);
            let mut fields = line.split(',');
            let id = fields.next().unwrap_or("").trim();
            if id.is_empty() {
                return Err(Error::Parse {
                    location,
                    message: "missing item id".into(),
                });
            }
            let row: Vec<f64> = fields
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| Error::Parse {
                        location: location.clone(),
                        message: format!("bad score `{}`: {e}", f.trim()),
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != system_ids.len() {
                return Err(Error::Parse {
                    location,
                    message: format!("expected {} scores, got {}", system_ids.len(), row.len()),
                });
            }
            items.push(Item::new(id));
            values.push(row);
        }
        ScoreMatrix::new(items, system_ids, values)
    }

    /// Emits the same CSV format `from_csv` reads. Byte-deterministic.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("item_id");
        for id in &self.system_ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (item, row) in self.items.iter().zip(&self.values) {
            out.push_str(&item.id);
            for v in row {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// A tie-aware assignment of rank values to items; rank 1 is best.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    item_ids: Vec<String>,
    ranks: Vec<f64>,
    tie_policy: TiePolicy,
}

impl Ranking {
    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank_of(&self, item_id: &str) -> Option<f64> {
        self.item_ids
            .iter()
            .position(|id| id == item_id)
            .map(|i| self.ranks[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.item_ids
            .iter()
            .map(String::as_str)
            .zip(self.ranks.iter().copied())
    }

    /// The best-ranked item id; rank ties break to the lexicographically
    /// smallest id.
    pub fn top(&self) -> &str {
        let mut best = 0;
        for i in 1..self.ranks.len() {
            if self.ranks[i] < self.ranks[best]
                || (self.ranks[i] == self.ranks[best] && self.item_ids[i] < self.item_ids[best])
            {
                best = i;
            }
        }
        &self.item_ids[best]
    }

    /// Item ids sorted by (rank, id).
    pub fn order(&self) -> Vec<&str> {
        let mut idx: Vec<usize> = (0..self.ranks.len()).collect();
        idx.sort_by(|&a, &b| {
            self.ranks[a]
                .partial_cmp(&self.ranks[b])
                .unwrap()
                .then_with(|| self.item_ids[a].cmp(&self.item_ids[b]))
        });
        idx.into_iter().map(|i| self.item_ids[i].as_str()).collect()
    }
}

/// The sorted, normalized score profile of a system: `values()[i]` is the
/// normalized score at rank position i+1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankScoreFunction {
    values: Vec<f64>,
}

impl RankScoreFunction {
    /// Validates that `values` is a non-increasing sequence in [0, 1].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for w in values.windows(2) {
            if w[1] > w[0] {
                return Err(Error::Validation(
                    "rank-score function must be non-increasing".into(),
                ));
            }
        }
        if values
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
        {
            return Err(Error::Validation(
                "rank-score function values must lie in [0, 1]".into(),
            ));
        }
        Ok(RankScoreFunction { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Min-max normalizes a slice to [0, 1]; a constant slice maps to all 0.5.
///
/// Callers must have checked finiteness already.
pub(crate) fn normalize_values(scores: &[f64]) -> Vec<f64> {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.5; scores.len()];
    }
    let range = max - min;
    scores.iter().map(|s| (s - min) / range).collect()
}

/// Rank values (1 = best) for `scores` under `policy`.
pub(crate) fn rank_values(scores: &[f64], policy: TiePolicy) -> Vec<f64> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps item-list order within tie groups, which is exactly
    // the FirstOccurrence rule.
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut ranks = vec![0.0; n];
    match policy {
        TiePolicy::FirstOccurrence => {
            for (pos, &i) in order.iter().enumerate() {
                ranks[i] = (pos + 1) as f64;
            }
        }
        TiePolicy::Fractional => {
            let mut start = 0;
            while start < n {
                let mut end = start;
                while end + 1 < n && scores[order[end + 1]] == scores[order[start]] {
                    end += 1;
                }
                // Positions start+1 ..= end+1 share the mean rank.
                let mean = (start + 1 + end + 1) as f64 / 2.0;
                for &i in &order[start..=end] {
                    ranks[i] = mean;
                }
                start = end + 1;
            }
        }
    }
    ranks
}

/// Normalized scores sorted non-increasing: the RSF profile of a score slice.
pub(crate) fn rsf_values(scores: &[f64]) -> Vec<f64> {
    let mut vals = normalize_values(scores);
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Min-max normalization of a system's scores to [0, 1].
///
/// Constant scores all map to 0.5; the relative order of distinct scores is
/// preserved.
pub fn normalize_scores(system: &ScoringSystem) -> Result<ScoringSystem> {
    if system.is_empty() {
        return Err(Error::Validation(format!(
            "system `{}` has no scores",
            system.system_id
        )));
    }
    system.check_finite()?;
    Ok(ScoringSystem {
        system_id: system.system_id.clone(),
        item_ids: system.item_ids.clone(),
        scores: normalize_values(&system.scores),
    })
}

/// Derives the rank function of a system by sorting on decreasing score.
pub fn derive_ranking(system: &ScoringSystem, policy: TiePolicy) -> Result<Ranking> {
    if system.is_empty() {
        return Err(Error::Validation(format!(
            "system `{}` has no scores",
            system.system_id
        )));
    }
    system.check_finite()?;
    Ok(Ranking {
        item_ids: system.item_ids.clone(),
        ranks: rank_values(&system.scores, policy),
        tie_policy: policy,
    })
}

pub(crate) fn ranking_from_values(
    item_ids: Vec<String>,
    values: &[f64],
    higher_is_better: bool,
    policy: TiePolicy,
) -> Ranking {
    let oriented: Vec<f64> = if higher_is_better {
        values.to_vec()
    } else {
        values.iter().map(|v| -v).collect()
    };
    Ranking {
        item_ids,
        ranks: rank_values(&oriented, policy),
        tie_policy: policy,
    }
}

/// The rank-score function f(i) = normalized score at rank position i.
///
/// Tied ranks contribute their shared score value to every position the tie
/// spans, so this is just the normalized scores sorted non-increasing.
pub fn rank_score_function(system: &ScoringSystem) -> Result<RankScoreFunction> {
    if system.is_empty() {
        return Err(Error::Validation(format!(
            "system `{}` has no scores",
            system.system_id
        )));
    }
    system.check_finite()?;
    Ok(RankScoreFunction {
        values: rsf_values(&system.scores),
    })
}
