//! Per-question unit pooling, scoring, fusion and top-unit selection.
//!
//! Each corpus record carries a question, a reference answer, a pool of
//! candidate units and k named value profiles. Units are scored against
//! every profile (or carry precomputed scores), the resulting matrix feeds
//! the CFA step, and the best unit per configuration is evaluated by ROUGE-L
//! against the reference answer. There is no paraphrase stage: the selected
//! unit text is the pipeline's answer.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::Deserialize;

use crate::diversity::{diversity_matrix, DiversityMatrix};
use crate::error::{Error, Result};
use crate::fusion::{run_all_with, FuseOptions, FusionMethod};
use crate::metrics::{rouge_l_f1, UnitScorer};
use crate::scoring::{derive_ranking, rank_score_function, Item, ScoreMatrix, TiePolicy};

/// A named reference text; each profile becomes one scoring system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub name: String,
    pub text: String,
}

/// One pipeline instance: a question, its reference answer, the pooled
/// candidate units and the value profiles to score them against.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionRecord {
    pub question_id: String,
    pub question: String,
    pub reference_answer: String,
    pub profiles: Vec<Profile>,
    pub units: Vec<Item>,
    /// Optional precomputed unit-id -> k-vector score table.
    pub scores: Option<BTreeMap<String, Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawUnit {
    id: String,
    text: String,
    #[serde(default)]
    source: Option<String>,
}

#[derive(Deserialize)]
struct RawRecord {
    question_id: String,
    question: String,
    reference_answer: String,
    profiles: IndexMap<String, String>,
    units: Vec<RawUnit>,
    #[serde(default)]
    scores: Option<BTreeMap<String, Vec<f64>>>,
}

impl QuestionRecord {
    fn from_raw(raw: RawRecord) -> Result<Self> {
        let record = QuestionRecord {
            question_id: raw.question_id,
            question: raw.question,
            reference_answer: raw.reference_answer,
            profiles: raw
                .profiles
                .into_iter()
                .map(|(name, text)| Profile { name, text })
                .collect(),
            units: raw
                .units
                .into_iter()
                .map(|u| Item {
                    id: u.id,
                    text: Some(u.text),
                    source: u.source,
                })
                .collect(),
            scores: raw.scores,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        let qid = &self.question_id;
        if qid.is_empty() {
            return Err(Error::Validation("empty question_id".into()));
        }
        if self.units.is_empty() {
            return Err(Error::Validation(format!("question `{qid}` has no units")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for unit in &self.units {
            if !seen.insert(unit.id.as_str()) {
                return Err(Error::Validation(format!(
                    "question `{qid}` has duplicate unit id `{}`",
                    unit.id
                )));
            }
        }
        if self.profiles.len() < 2 {
            return Err(Error::Validation(format!(
                "question `{qid}` needs at least 2 profiles, has {}",
                self.profiles.len()
            )));
        }
        let mut names = std::collections::BTreeSet::new();
        for p in &self.profiles {
            if !names.insert(p.name.as_str()) {
                return Err(Error::Validation(format!(
                    "question `{qid}` has duplicate profile `{}`",
                    p.name
                )));
            }
        }
        if let Some(scores) = &self.scores {
            let k = self.profiles.len();
            for unit in &self.units {
                match scores.get(&unit.id) {
                    None => {
                        return Err(Error::Validation(format!(
                            "question `{qid}` precomputed scores miss unit `{}`",
                            unit.id
                        )))
                    }
                    Some(row) if row.len() != k => {
                        return Err(Error::Validation(format!(
                            "question `{qid}` unit `{}` has {} scores, expected {k}",
                            unit.id,
                            row.len()
                        )))
                    }
                    Some(row) if row.iter().any(|v| !v.is_finite()) => {
                        return Err(Error::Validation(format!(
                            "question `{qid}` unit `{}` has a non-finite score",
                            unit.id
                        )))
                    }
                    _ => {}
                }
            }
            if scores.len() != self.units.len() {
                return Err(Error::Validation(format!(
                    "question `{qid}` precomputed scores name {} units, pool has {}",
                    scores.len(),
                    self.units.len()
                )));
            }
        }
        Ok(())
    }

    pub fn profile_names(&self) -> Vec<String> {
        self.profiles.iter().map(|p| p.name.clone()).collect()
    }

    pub fn unit_text(&self, unit_id: &str) -> Option<&str> {
        self.units
            .iter()
            .find(|u| u.id == unit_id)
            .and_then(|u| u.text.as_deref())
    }
}

/// Parses a line-delimited corpus; every non-blank line is one JSON record.
pub fn parse_corpus(text: &str) -> Result<Vec<QuestionRecord>> {
    let mut records = Vec::new();
    let mut ids = std::collections::BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            location: format!("line {}", idx + 1),
            message: e.to_string(),
        })?;
        let record = QuestionRecord::from_raw(raw)?;
        if !ids.insert(record.question_id.clone()) {
            return Err(Error::Validation(format!(
                "duplicate question id `{}`",
                record.question_id
            )));
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::Parse {
            location: "end of input".into(),
            message: "corpus contains no records".into(),
        });
    }
    Ok(records)
}

/// Loads and validates a corpus file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<QuestionRecord>> {
    let text = fs::read_to_string(path)?;
    parse_corpus(&text)
}

/// Scores every unit against every profile, or returns the precomputed
/// table. Rows are ordered by unit id, columns by profile order.
pub fn score_units(q: &QuestionRecord, scorer: &dyn UnitScorer) -> Result<ScoreMatrix> {
    let mut units: Vec<&Item> = q.units.iter().collect();
    units.sort_by(|a, b| a.id.cmp(&b.id));
    let system_ids = q.profile_names();

    let values: Vec<Vec<f64>> = if let Some(scores) = &q.scores {
        units
            .iter()
            .map(|u| {
                scores.get(&u.id).cloned().ok_or_else(|| {
                    Error::Validation(format!(
                        "question `{}` precomputed scores miss unit `{}`",
                        q.question_id, u.id
                    ))
                })
            })
            .collect::<Result<_>>()?
    } else {
        let profile_texts: Vec<&str> = q.profiles.iter().map(|p| p.text.as_str()).collect();
        let k = profile_texts.len();
        units
            .iter()
            .map(|u| {
                let text = u.text.as_deref().unwrap_or("");
                let row = scorer
                    .score(text, &profile_texts)
                    .map_err(|e| Error::ScorerFailure(e.to_string()))?;
                if row.len() != k {
                    return Err(Error::ScorerFailure(format!(
                        "scorer returned {} scores for {k} profiles",
                        row.len()
                    )));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::ScorerFailure(format!(
                        "scorer returned a non-finite score for unit `{}`",
                        u.id
                    )));
                }
                Ok(row)
            })
            .collect::<Result<_>>()?
    };
    ScoreMatrix::new(units.into_iter().cloned().collect(), system_ids, values)
}

/// One fused configuration evaluated against the reference answer.
#[derive(Debug, Clone, PartialEq)]
pub struct ComboOutcome {
    pub subset: Vec<String>,
    pub method: FusionMethod,
    pub top_unit: String,
    pub f1: f64,
    pub fallback: bool,
}

impl ComboOutcome {
    pub fn subset_label(&self) -> String {
        self.subset.join("+")
    }
}

/// The best configuration for one method on one question.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSelection {
    pub method: FusionMethod,
    pub subset: Vec<String>,
    pub unit_id: String,
    pub f1: f64,
}

/// A single system's own top unit and its score against the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    pub system: String,
    pub unit_id: String,
    pub f1: f64,
}

/// Everything the pipeline derives from one question.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionResult {
    pub question_id: String,
    pub matrix: ScoreMatrix,
    pub diversity: DiversityMatrix,
    /// Every (subset, method) outcome in enumeration order.
    pub combos: Vec<ComboOutcome>,
    /// Best configuration per method, one entry per method.
    pub selections: Vec<MethodSelection>,
    /// Per-system argmax baselines.
    pub baselines: Vec<BaselineOutcome>,
    /// Normalized rank-score curve per system, in system order.
    pub rsf_curves: Vec<(String, Vec<f64>)>,
}

/// Scores, fuses and evaluates a single question.
pub fn run_question(
    q: &QuestionRecord,
    scorer: &dyn UnitScorer,
    opts: &FuseOptions,
) -> Result<QuestionResult> {
    let matrix = score_units(q, scorer)?;
    let diversity = diversity_matrix(&matrix)?;
    let results = run_all_with(&matrix, opts)?;

    let combos: Vec<ComboOutcome> = results
        .iter()
        .map(|r| {
            let top_unit = r.top_item().to_string();
            let text = q.unit_text(&top_unit).unwrap_or("");
            ComboOutcome {
                subset: r.config().subset.clone(),
                method: r.config().method,
                top_unit,
                f1: rouge_l_f1(text, &q.reference_answer).f1,
                fallback: r.fell_back(),
            }
        })
        .collect();

    let selections = FusionMethod::ALL
        .iter()
        .map(|&method| {
            let mut best: Option<&ComboOutcome> = None;
            for combo in combos.iter().filter(|c| c.method == method) {
                if best.is_none_or(|b| combo.f1 > b.f1) {
                    best = Some(combo);
                }
            }
            let best = best.expect("run_all yields at least one subset per method");
            MethodSelection {
                method,
                subset: best.subset.clone(),
                unit_id: best.top_unit.clone(),
                f1: best.f1,
            }
        })
        .collect();

    let baselines = (0..matrix.n_systems())
        .map(|j| {
            let system = matrix.system(j);
            let ranking = derive_ranking(&system, TiePolicy::Fractional)?;
            let unit_id = ranking.top().to_string();
            let text = q.unit_text(&unit_id).unwrap_or("");
            Ok(BaselineOutcome {
                system: system.system_id().to_string(),
                unit_id,
                f1: rouge_l_f1(text, &q.reference_answer).f1,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rsf_curves = (0..matrix.n_systems())
        .map(|j| {
            let rsf = rank_score_function(&matrix.system(j))?;
            Ok((matrix.system_ids()[j].clone(), rsf.values().to_vec()))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(QuestionResult {
        question_id: q.question_id.clone(),
        matrix,
        diversity,
        combos,
        selections,
        baselines,
        rsf_curves,
    })
}

/// Per-question results plus corpus-level mean F1 per method and baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub questions: Vec<QuestionResult>,
    pub method_means: Vec<(FusionMethod, f64)>,
    pub baseline_means: Vec<(String, f64)>,
}

/// Runs every question and aggregates. Question order does not affect the
/// aggregates beyond their (deterministic) row order.
pub fn run_corpus(
    corpus: &[QuestionRecord],
    scorer: &dyn UnitScorer,
    opts: &FuseOptions,
) -> Result<PipelineReport> {
    if corpus.is_empty() {
        return Err(Error::Validation("corpus contains no questions".into()));
    }
    let system_names = corpus[0].profile_names();
    for q in corpus {
        if q.profile_names() != system_names {
            return Err(Error::Validation(format!(
                "question `{}` names different profiles than the first question",
                q.question_id
            )));
        }
    }

    let questions = corpus
        .iter()
        .map(|q| {
            run_question(q, scorer, opts).map_err(|e| Error::Question {
                id: q.question_id.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = questions.len() as f64;
    let method_means = FusionMethod::ALL
        .iter()
        .map(|&method| {
            let sum: f64 = questions
                .iter()
                .map(|qr| {
                    qr.selections
                        .iter()
                        .find(|s| s.method == method)
                        .expect("every method is selected")
                        .f1
                })
                .sum();
            (method, sum / n)
        })
        .collect();

    let baseline_means = system_names
        .iter()
        .map(|name| {
            let sum: f64 = questions
                .iter()
                .map(|qr| {
                    qr.baselines
                        .iter()
                        .find(|b| &b.system == name)
                        .expect("uniform profile set")
                        .f1
                })
                .sum();
            (name.clone(), sum / n)
        })
        .collect();

    Ok(PipelineReport {
        questions,
        method_means,
        baseline_means,
    })
}

/// Writes `summary.csv` plus per-question `curves/<qid>_rsf.csv` and
/// `curves/<qid>_combos.csv`. Byte-deterministic; returns the paths written.
pub fn emit_reports(report: &PipelineReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    let curves = out_dir.join("curves");
    fs::create_dir_all(&curves)?;

    let mut written = Vec::new();

    let mut summary = String::from("group,name,mean_rouge_l_f1\n");
    for (name, mean) in &report.baseline_means {
        summary.push_str(&format!("individual,{name},{mean}\n"));
    }
    for (method, mean) in &report.method_means {
        summary.push_str(&format!("fusion,{method},{mean}\n"));
    }
    let summary_path = out_dir.join("summary.csv");
    fs::write(&summary_path, summary)?;
    written.push(summary_path);

    for qr in &report.questions {
        let mut rsf = String::from("rank");
        for (system, _) in &qr.rsf_curves {
            rsf.push(',');
            rsf.push_str(system);
        }
        rsf.push('\n');
        let n = qr.matrix.n_items();
        for i in 0..n {
            rsf.push_str(&format!("{}", i + 1));
            for (_, curve) in &qr.rsf_curves {
                rsf.push(',');
                rsf.push_str(&format!("{}", curve[i]));
            }
            rsf.push('\n');
        }
        let rsf_path = curves.join(format!("{}_rsf.csv", qr.question_id));
        fs::write(&rsf_path, rsf)?;
        written.push(rsf_path);

        let mut combos = String::from("subset,method,f1\n");
        for combo in &qr.combos {
            combos.push_str(&format!(
                "{},{},{}\n",
                combo.subset_label(),
                combo.method,
                combo.f1
            ));
        }
        let combos_path = curves.join(format!("{}_combos.csv", qr.question_id));
        fs::write(&combos_path, combos)?;
        written.push(combos_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::LexicalScorer;

    fn record_json(qid: &str) -> String {
        format!(
            r#"{{"question_id":"{qid}","question":"What should I do?","reference_answer":"be kind to others","profiles":{{"care":"care for others with kindness","rules":"follow the rules and obey the law"}},"units":[{{"id":"u1","text":"be kind to others","source":"agent_a"}},{{"id":"u2","text":"obey the law","source":"agent_b"}},{{"id":"u3","text":"share your things","source":"agent_a"}}]}}"#
        )
    }

    fn sample_record() -> QuestionRecord {
        parse_corpus(&record_json("q1")).unwrap().pop().unwrap()
    }

    #[test]
    fn parses_a_valid_corpus() {
        let text = format!("{}\n{}\n", record_json("q1"), record_json("q2"));
        let records = parse_corpus(&text).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].profiles.len(), 2);
        assert_eq!(records[0].profiles[0].name, "care");
        assert_eq!(records[0].units.len(), 3);
        assert_eq!(records[0].units[0].source.as_deref(), Some("agent_a"));
    }

    #[test]
    fn empty_corpus_is_a_parse_error() {
        assert!(matches!(parse_corpus(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_corpus("\n\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn duplicate_question_ids_are_rejected() {
        let text = format!("{}\n{}\n", record_json("q1"), record_json("q1"));
        assert!(matches!(parse_corpus(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn duplicate_unit_ids_are_rejected() {
        let bad = r#"{"question_id":"q1","question":"?","reference_answer":"x","profiles":{"a":"t1","b":"t2"},"units":[{"id":"u1","text":"x"},{"id":"u1","text":"y"}]}"#;
        let err = parse_corpus(bad).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("duplicate unit id"));
    }

    #[test]
    fn single_profile_is_rejected() {
        let bad = r#"{"question_id":"q1","question":"?","reference_answer":"x","profiles":{"a":"t1"},"units":[{"id":"u1","text":"x"}]}"#;
        assert!(matches!(parse_corpus(bad), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_json_reports_its_line() {
        let text = format!("{}\nnot json\n", record_json("q1"));
        match parse_corpus(&text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 2"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn scoring_orders_rows_by_unit_id_and_columns_by_profile() {
        let q = sample_record();
        let matrix = score_units(&q, &LexicalScorer).unwrap();
        let ids: Vec<&str> = matrix.item_ids().collect();
        assert_eq!(ids, vec!["u1", "u2", "u3"]);
        assert_eq!(
            matrix.system_ids(),
            &["care".to_string(), "rules".to_string()]
        );
    }

    #[test]
    fn unit_matching_a_profile_scores_one_in_that_column() {
        let json = r#"{"question_id":"q1","question":"?","reference_answer":"x","profiles":{"a":"first profile text","b":"second profile text"},"units":[{"id":"u1","text":"second profile text"},{"id":"u2","text":"unrelated words entirely"}]}"#;
        let q = parse_corpus(json).unwrap().pop().unwrap();
        let matrix = score_units(&q, &LexicalScorer).unwrap();
        // Row u1, column b.
        assert!((matrix.values()[0][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn precomputed_scores_are_returned_verbatim() {
        let json = r#"{"question_id":"q1","question":"?","reference_answer":"x","profiles":{"a":"t1","b":"t2"},"units":[{"id":"u1","text":"x"},{"id":"u2","text":"y"}],"scores":{"u1":[0.25,0.75],"u2":[0.5,0.125]}}"#;
        let q = parse_corpus(json).unwrap().pop().unwrap();
        let matrix = score_units(&q, &LexicalScorer).unwrap();
        assert_eq!(matrix.values(), &[vec![0.25, 0.75], vec![0.5, 0.125]]);
    }

    #[test]
    fn precomputed_scores_must_cover_the_pool() {
        let json = r#"{"question_id":"q1","question":"?","reference_answer":"x","profiles":{"a":"t1","b":"t2"},"units":[{"id":"u1","text":"x"},{"id":"u2","text":"y"}],"scores":{"u1":[0.25,0.75]}}"#;
        assert!(matches!(parse_corpus(json), Err(Error::Validation(_))));
    }

    #[test]
    fn verbatim_reference_unit_scores_perfectly_when_selected() {
        let q = sample_record();
        let result = run_question(&q, &LexicalScorer, &FuseOptions::default()).unwrap();
        for combo in &result.combos {
            if combo.top_unit == "u1" {
                assert_eq!(combo.f1, 1.0);
            }
        }
        // u1 matches the care profile exactly enough to win somewhere.
        assert!(result.selections.iter().any(|s| s.unit_id == "u1"));
    }

    #[test]
    fn question_produces_combos_for_every_subset_and_method() {
        let q = sample_record();
        let result = run_question(&q, &LexicalScorer, &FuseOptions::default()).unwrap();
        // k = 2 systems: one subset, four methods.
        assert_eq!(result.combos.len(), 4);
        assert_eq!(result.selections.len(), 4);
        assert_eq!(result.baselines.len(), 2);
        assert_eq!(result.rsf_curves.len(), 2);
        assert_eq!(result.rsf_curves[0].1.len(), 3);
    }

    #[test]
    fn selected_units_come_from_the_pool() {
        let q = sample_record();
        let result = run_question(&q, &LexicalScorer, &FuseOptions::default()).unwrap();
        let pool: Vec<&str> = q.units.iter().map(|u| u.id.as_str()).collect();
        for combo in &result.combos {
            assert!(pool.contains(&combo.top_unit.as_str()));
        }
        for sel in &result.selections {
            assert!(pool.contains(&sel.unit_id.as_str()));
        }
    }

    #[test]
    fn single_question_aggregates_equal_that_question() {
        let corpus = vec![sample_record()];
        let report = run_corpus(&corpus, &LexicalScorer, &FuseOptions::default()).unwrap();
        let qr = &report.questions[0];
        for (method, mean) in &report.method_means {
            let sel = qr.selections.iter().find(|s| s.method == *method).unwrap();
            assert_eq!(*mean, sel.f1);
        }
        for (system, mean) in &report.baseline_means {
            let base = qr.baselines.iter().find(|b| &b.system == system).unwrap();
            assert_eq!(*mean, base.f1);
        }
    }

    #[test]
    fn question_order_does_not_change_aggregates() {
        let text = format!("{}\n{}\n", record_json("q1"), record_json("q2"));
        let mut corpus = parse_corpus(&text).unwrap();
        let forward = run_corpus(&corpus, &LexicalScorer, &FuseOptions::default()).unwrap();
        corpus.reverse();
        let backward = run_corpus(&corpus, &LexicalScorer, &FuseOptions::default()).unwrap();
        assert_eq!(forward.method_means, backward.method_means);
        assert_eq!(forward.baseline_means, backward.baseline_means);
    }

    #[test]
    fn baselines_are_per_system_argmax() {
        let q = sample_record();
        let matrix = score_units(&q, &LexicalScorer).unwrap();
        let result = run_question(&q, &LexicalScorer, &FuseOptions::default()).unwrap();
        for (j, baseline) in result.baselines.iter().enumerate() {
            let col = matrix.column(j);
            let best = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ids: Vec<&str> = matrix.item_ids().collect();
            let expected = ids
                .iter()
                .zip(&col)
                .filter(|(_, &v)| v == best)
                .map(|(id, _)| *id)
                .min()
                .unwrap();
            assert_eq!(baseline.unit_id, expected);
        }
    }

    #[test]
    fn reports_are_byte_deterministic() {
        let corpus = vec![sample_record()];
        let report = run_corpus(&corpus, &LexicalScorer, &FuseOptions::default()).unwrap();
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let files1 = emit_reports(&report, dir1.path()).unwrap();
        let files2 = emit_reports(&report, dir2.path()).unwrap();
        assert_eq!(files1.len(), files2.len());
        assert_eq!(files1.len(), 3);
        for (a, b) in files1.iter().zip(&files2) {
            assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
        }
    }

    #[test]
    fn emit_fails_cleanly_on_an_unwritable_target() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("occupied");
        fs::write(&blocker, b"file, not a directory").unwrap();
        let corpus = vec![sample_record()];
        let report = run_corpus(&corpus, &LexicalScorer, &FuseOptions::default()).unwrap();
        assert!(matches!(emit_reports(&report, &blocker), Err(Error::Io(_))));
    }
}
