//! The CFA combination step: subset enumeration and the four fusion methods.
//!
//! Every subset of at least two scoring systems can be fused four ways:
//! average score combination (ASC), diversity-strength-weighted score
//! combination (WSCDS), average rank combination (ARC), and inverse-
//! diversity-strength-weighted rank combination (WRCDS). Score methods rank
//! fused values descending; rank methods rank fused rank values ascending.

use crate::diversity::{diversity_matrix, DiversityMatrix};
use crate::error::{Error, Result};
use crate::scoring::{
    normalize_values, rank_values, ranking_from_values, Ranking, ScoreMatrix, TiePolicy,
};

/// The four combination methods, in the order they are always enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionMethod {
    /// Unweighted mean of scores.
    Asc,
    /// Mean of scores weighted by diversity strength.
    Wscds,
    /// Unweighted mean of fractional ranks.
    Arc,
    /// Mean of fractional ranks weighted by inverse diversity strength.
    Wrcds,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 4] = [
        FusionMethod::Asc,
        FusionMethod::Wscds,
        FusionMethod::Arc,
        FusionMethod::Wrcds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FusionMethod::Asc => "ASC",
            FusionMethod::Wscds => "WSCDS",
            FusionMethod::Arc => "ARC",
            FusionMethod::Wrcds => "WRCDS",
        }
    }

    /// Rank methods combine rank values, so lower fused values are better.
    pub fn is_rank_based(self) -> bool {
        matches!(self, FusionMethod::Arc | FusionMethod::Wrcds)
    }

    pub fn parse(name: &str) -> Option<FusionMethod> {
        match name.to_ascii_uppercase().as_str() {
            "ASC" => Some(FusionMethod::Asc),
            "WSCDS" => Some(FusionMethod::Wscds),
            "ARC" => Some(FusionMethod::Arc),
            "WRCDS" => Some(FusionMethod::Wrcds),
            _ => None,
        }
    }
}

impl std::fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One (subset, method) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionConfig {
    pub subset: Vec<String>,
    pub method: FusionMethod,
}

impl FusionConfig {
    pub fn new(subset: Vec<String>, method: FusionMethod) -> Self {
        FusionConfig { subset, method }
    }

    /// Subset label used in reports: system ids joined by `+`.
    pub fn subset_label(&self) -> String {
        self.subset.join("+")
    }
}

/// Knobs shared by all fusion entry points.
#[derive(Debug, Clone, Copy)]
pub struct FuseOptions {
    /// Min-max normalize each system's scores before score combination.
    /// Rank-score functions, and hence the diversity-strength weights, are
    /// always computed on normalized profiles.
    pub normalize: bool,
    /// Tie policy for rankings derived from fused values. The fractional
    /// ranks consumed by the rank methods are unaffected.
    pub tie_policy: TiePolicy,
    /// Weights below this threshold trigger the unweighted fallback.
    pub weight_epsilon: f64,
}

impl Default for FuseOptions {
    fn default() -> Self {
        FuseOptions {
            normalize: true,
            tie_policy: TiePolicy::Fractional,
            weight_epsilon: 1e-12,
        }
    }
}

/// The outcome of fusing one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    config: FusionConfig,
    item_ids: Vec<String>,
    fused: Vec<f64>,
    higher_is_better: bool,
    ranking: Ranking,
    top_item: String,
    fallback: bool,
    baseline: bool,
}

impl FusionResult {
    pub fn config(&self) -> &FusionConfig {
        &self.config
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    /// Fused values in item order: mean scores for score methods (higher is
    /// better), combined rank values for rank methods (lower is better).
    pub fn fused_values(&self) -> &[f64] {
        &self.fused
    }

    pub fn fused_of(&self, item_id: &str) -> Option<f64> {
        self.item_ids
            .iter()
            .position(|id| id == item_id)
            .map(|i| self.fused[i])
    }

    pub fn higher_is_better(&self) -> bool {
        self.higher_is_better
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }

    pub fn top_item(&self) -> &str {
        &self.top_item
    }

    /// True when a weighted method fell back to its unweighted sibling
    /// because the diversity-strength weights degenerated.
    pub fn fell_back(&self) -> bool {
        self.fallback
    }

    /// True for singleton pass-through results.
    pub fn is_baseline(&self) -> bool {
        self.baseline
    }
}

/// All system subsets of size at least `min_size`, as sorted index vectors,
/// ordered by size then lexicographically.
pub fn enumerate_configs(k: usize, min_size: usize) -> Result<Vec<Vec<usize>>> {
    if min_size < 1 || min_size > k {
        return Err(Error::InvalidMinSize { min_size, k });
    }
    let mut subsets = Vec::new();
    for size in min_size..=k {
        let mut current: Vec<usize> = (0..size).collect();
        loop {
            subsets.push(current.clone());
            // Advance to the next combination in lexicographic order: bump
            // the rightmost index with room to grow, then reset the suffix.
            let mut i = size;
            while i > 0 && current[i - 1] == i - 1 + k - size {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            current[i - 1] += 1;
            for j in i..size {
                current[j] = current[j - 1] + 1;
            }
        }
    }
    Ok(subsets)
}

struct Prepared {
    item_ids: Vec<String>,
    /// Per-system score columns, normalized when requested.
    score_cols: Vec<Vec<f64>>,
    /// Per-system fractional-rank columns.
    rank_cols: Vec<Vec<f64>>,
}

fn prepare(matrix: &ScoreMatrix, normalize: bool) -> Prepared {
    let k = matrix.n_systems();
    let mut score_cols = Vec::with_capacity(k);
    let mut rank_cols = Vec::with_capacity(k);
    for j in 0..k {
        let col = matrix.column(j);
        rank_cols.push(rank_values(&col, TiePolicy::Fractional));
        score_cols.push(if normalize {
            normalize_values(&col)
        } else {
            col
        });
    }
    Prepared {
        item_ids: matrix.items().iter().map(|it| it.id.clone()).collect(),
        score_cols,
        rank_cols,
    }
}

fn resolve_subset<S: AsRef<str>>(matrix: &ScoreMatrix, subset: &[S]) -> Result<Vec<usize>> {
    let mut idxs = Vec::with_capacity(subset.len());
    for id in subset {
        let id = id.as_ref();
        let j = matrix
            .system_index(id)
            .ok_or_else(|| Error::UnknownSystem(id.to_string()))?;
        if idxs.contains(&j) {
            return Err(Error::Validation(format!(
                "system `{id}` appears twice in the fusion subset"
            )));
        }
        idxs.push(j);
    }
    Ok(idxs)
}

fn weighted_mean_columns(cols: &[Vec<f64>], idxs: &[usize], weights: Option<&[f64]>) -> Vec<f64> {
    let n = cols[0].len();
    let mut fused = vec![0.0; n];
    match weights {
        None => {
            for &j in idxs {
                for (f, v) in fused.iter_mut().zip(&cols[j]) {
                    *f += v;
                }
            }
            let t = idxs.len() as f64;
            for f in &mut fused {
                *f /= t;
            }
        }
        Some(w) => {
            let total: f64 = w.iter().sum();
            for (&j, &wj) in idxs.iter().zip(w) {
                for (f, v) in fused.iter_mut().zip(&cols[j]) {
                    *f += v * wj;
                }
            }
            for f in &mut fused {
                *f /= total;
            }
        }
    }
    fused
}

fn finish(
    prepared: &Prepared,
    config: FusionConfig,
    fused: Vec<f64>,
    higher_is_better: bool,
    fallback: bool,
    baseline: bool,
    opts: &FuseOptions,
) -> FusionResult {
    let ranking = ranking_from_values(
        prepared.item_ids.clone(),
        &fused,
        higher_is_better,
        opts.tie_policy,
    );
    let top_item = ranking.top().to_string();
    FusionResult {
        config,
        item_ids: prepared.item_ids.clone(),
        fused,
        higher_is_better,
        ranking,
        top_item,
        fallback,
        baseline,
    }
}

fn check_subset_size(len: usize) -> Result<()> {
    if len < 2 {
        return Err(Error::SubsetTooSmall(len));
    }
    Ok(())
}

fn check_weights(subset_ids: &[String], ds: &[f64]) -> Result<()> {
    if ds.len() != subset_ids.len() {
        return Err(Error::Validation(format!(
            "{} diversity-strength weights for a subset of {} systems",
            ds.len(),
            subset_ids.len()
        )));
    }
    for (id, &w) in subset_ids.iter().zip(ds) {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight {
                system: id.clone(),
                weight: w,
            });
        }
    }
    Ok(())
}

/// Average score combination over a subset of at least two systems.
pub fn asc<S: AsRef<str>>(
    matrix: &ScoreMatrix,
    subset: &[S],
    opts: &FuseOptions,
) -> Result<FusionResult> {
    let idxs = resolve_subset(matrix, subset)?;
    check_subset_size(idxs.len())?;
    let prepared = prepare(matrix, opts.normalize);
    Ok(asc_prepared(&prepared, matrix, &idxs, opts))
}

fn asc_prepared(
    prepared: &Prepared,
    matrix: &ScoreMatrix,
    idxs: &[usize],
    opts: &FuseOptions,
) -> FusionResult {
    let fused = weighted_mean_columns(&prepared.score_cols, idxs, None);
    let config = FusionConfig::new(subset_ids(matrix, idxs), FusionMethod::Asc);
    finish(prepared, config, fused, true, false, false, opts)
}

/// Average rank combination over a subset of at least two systems.
pub fn arc<S: AsRef<str>>(
    matrix: &ScoreMatrix,
    subset: &[S],
    opts: &FuseOptions,
) -> Result<FusionResult> {
    let idxs = resolve_subset(matrix, subset)?;
    check_subset_size(idxs.len())?;
    let prepared = prepare(matrix, opts.normalize);
    Ok(arc_prepared(&prepared, matrix, &idxs, opts))
}

fn arc_prepared(
    prepared: &Prepared,
    matrix: &ScoreMatrix,
    idxs: &[usize],
    opts: &FuseOptions,
) -> FusionResult {
    let fused = weighted_mean_columns(&prepared.rank_cols, idxs, None);
    let config = FusionConfig::new(subset_ids(matrix, idxs), FusionMethod::Arc);
    finish(prepared, config, fused, false, false, false, opts)
}

/// Score combination weighted by diversity strength.
///
/// `ds` is aligned with `subset`. When the weights sum below
/// `opts.weight_epsilon` the result falls back to ASC and is flagged.
pub fn wscds<S: AsRef<str>>(
    matrix: &ScoreMatrix,
    subset: &[S],
    ds: &[f64],
    opts: &FuseOptions,
) -> Result<FusionResult> {
    let idxs = resolve_subset(matrix, subset)?;
    check_subset_size(idxs.len())?;
    let prepared = prepare(matrix, opts.normalize);
    wscds_prepared(&prepared, matrix, &idxs, ds, opts)
}

fn wscds_prepared(
    prepared: &Prepared,
    matrix: &ScoreMatrix,
    idxs: &[usize],
    ds: &[f64],
    opts: &FuseOptions,
) -> Result<FusionResult> {
    let ids = subset_ids(matrix, idxs);
    check_weights(&ids, ds)?;
    let total: f64 = ds.iter().sum();
    if total < opts.weight_epsilon {
        let mut result = asc_prepared(prepared, matrix, idxs, opts);
        result.config.method = FusionMethod::Wscds;
        result.fallback = true;
        return Ok(result);
    }
    let fused = weighted_mean_columns(&prepared.score_cols, idxs, Some(ds));
    let config = FusionConfig::new(ids, FusionMethod::Wscds);
    Ok(finish(prepared, config, fused, true, false, false, opts))
}

/// Rank combination weighted by inverse diversity strength.
///
/// Note the inversion: the most diverse systems get the smallest rank
/// weights here, the mirror image of how WSCDS weights scores.
///
/// Any weight below `opts.weight_epsilon` makes the inverse blow up, so the
/// result falls back to ARC and is flagged.
pub fn wrcds<S: AsRef<str>>(
    matrix: &ScoreMatrix,
    subset: &[S],
    ds: &[f64],
    opts: &FuseOptions,
) -> Result<FusionResult> {
    let idxs = resolve_subset(matrix, subset)?;
    check_subset_size(idxs.len())?;
    let prepared = prepare(matrix, opts.normalize);
    wrcds_prepared(&prepared, matrix, &idxs, ds, opts)
}

fn wrcds_prepared(
    prepared: &Prepared,
    matrix: &ScoreMatrix,
    idxs: &[usize],
    ds: &[f64],
    opts: &FuseOptions,
) -> Result<FusionResult> {
    let ids = subset_ids(matrix, idxs);
    check_weights(&ids, ds)?;
    if ds.iter().any(|&w| w < opts.weight_epsilon) {
        let mut result = arc_prepared(prepared, matrix, idxs, opts);
        result.config.method = FusionMethod::Wrcds;
        result.fallback = true;
        return Ok(result);
    }
    let inverse: Vec<f64> = ds.iter().map(|w| 1.0 / w).collect();
    let fused = weighted_mean_columns(&prepared.rank_cols, idxs, Some(&inverse));
    let config = FusionConfig::new(ids, FusionMethod::Wrcds);
    Ok(finish(prepared, config, fused, false, false, false, opts))
}

fn subset_ids(matrix: &ScoreMatrix, idxs: &[usize]) -> Vec<String> {
    idxs.iter()
        .map(|&j| matrix.system_ids()[j].clone())
        .collect()
}

/// Fuses one configuration with default options.
pub fn fuse(matrix: &ScoreMatrix, config: &FusionConfig) -> Result<FusionResult> {
    fuse_with(matrix, config, &FuseOptions::default())
}

/// Fuses one configuration, computing diversity strengths internally for the
/// weighted methods. Singleton subsets pass the system through as a baseline.
pub fn fuse_with(
    matrix: &ScoreMatrix,
    config: &FusionConfig,
    opts: &FuseOptions,
) -> Result<FusionResult> {
    let idxs = resolve_subset(matrix, &config.subset)?;
    if idxs.is_empty() {
        return Err(Error::SubsetTooSmall(0));
    }
    let prepared = prepare(matrix, opts.normalize);
    if idxs.len() == 1 {
        let fused = prepared.score_cols[idxs[0]].clone();
        return Ok(finish(
            &prepared,
            config.clone(),
            fused,
            true,
            false,
            true,
            opts,
        ));
    }
    match config.method {
        FusionMethod::Asc => Ok(asc_prepared(&prepared, matrix, &idxs, opts)),
        FusionMethod::Arc => Ok(arc_prepared(&prepared, matrix, &idxs, opts)),
        FusionMethod::Wscds | FusionMethod::Wrcds => {
            let dm = diversity_matrix(matrix)?;
            let ds = subset_ds(&dm, matrix, &idxs);
            if config.method == FusionMethod::Wscds {
                wscds_prepared(&prepared, matrix, &idxs, &ds, opts)
            } else {
                wrcds_prepared(&prepared, matrix, &idxs, &ds, opts)
            }
        }
    }
}

fn subset_ds(dm: &DiversityMatrix, matrix: &ScoreMatrix, idxs: &[usize]) -> Vec<f64> {
    idxs.iter()
        .map(|&j| dm.ds(&matrix.system_ids()[j]).unwrap_or(0.0))
        .collect()
}

/// Every subset of size >= 2 fused by every method, in enumeration order
/// (subsets outer, the four methods inner).
pub fn run_all(matrix: &ScoreMatrix) -> Result<Vec<FusionResult>> {
    run_all_with(matrix, &FuseOptions::default())
}

pub fn run_all_with(matrix: &ScoreMatrix, opts: &FuseOptions) -> Result<Vec<FusionResult>> {
    let k = matrix.n_systems();
    if k < 2 {
        return Err(Error::NeedTwoSystems(k));
    }
    run_subsets_with(matrix, 2, opts)
}

/// Like [`run_all_with`] but enumerating subsets down to `min_size`.
/// Singleton subsets come out as pass-through baselines under each method
/// label.
pub fn run_subsets_with(
    matrix: &ScoreMatrix,
    min_size: usize,
    opts: &FuseOptions,
) -> Result<Vec<FusionResult>> {
    let k = matrix.n_systems();
    let subsets = enumerate_configs(k, min_size)?;
    let prepared = prepare(matrix, opts.normalize);
    let needs_diversity = k >= 2 && subsets.iter().any(|s| s.len() >= 2);
    let dm = if needs_diversity {
        Some(diversity_matrix(matrix)?)
    } else {
        None
    };
    let mut results = Vec::with_capacity(subsets.len() * FusionMethod::ALL.len());
    for idxs in &subsets {
        if idxs.len() == 1 {
            for method in FusionMethod::ALL {
                let fused = prepared.score_cols[idxs[0]].clone();
                let config = FusionConfig::new(subset_ids(matrix, idxs), method);
                results.push(finish(&prepared, config, fused, true, false, true, opts));
            }
            continue;
        }
        let dm = dm.as_ref().expect("diversity matrix exists for k >= 2");
        let ds = subset_ds(dm, matrix, idxs);
        for method in FusionMethod::ALL {
            let result = match method {
                FusionMethod::Asc => asc_prepared(&prepared, matrix, idxs, opts),
                FusionMethod::Wscds => wscds_prepared(&prepared, matrix, idxs, &ds, opts)?,
                FusionMethod::Arc => arc_prepared(&prepared, matrix, idxs, opts),
                FusionMethod::Wrcds => wrcds_prepared(&prepared, matrix, idxs, &ds, opts)?,
            };
            results.push(result);
        }
    }
    Ok(results)
}

/// `subset,method,top_item,fused_value_of_top,fallback_flag` rows in result
/// order. Byte-deterministic.
pub fn fusion_report_csv(results: &[FusionResult]) -> String {
    let mut out = String::from("subset,method,top_item,fused_value_of_top,fallback_flag\n");
    for r in results {
        let top_value = r.fused_of(&r.top_item).unwrap();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.config.subset_label(),
            r.config.method,
            r.top_item,
            top_value,
            r.fallback
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::Item;
    use proptest::prelude::*;

    fn matrix(ids: &[&str], items: &[(&str, &[f64])]) -> ScoreMatrix {
        ScoreMatrix::new(
            items.iter().map(|(id, _)| Item::new(*id)).collect(),
            ids.iter().map(|s| s.to_string()).collect(),
            items.iter().map(|(_, row)| row.to_vec()).collect(),
        )
        .unwrap()
    }

    fn raw() -> FuseOptions {
        FuseOptions {
            normalize: false,
            ..FuseOptions::default()
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn enumerates_the_twenty_six_subsets_of_five_systems() {
        let subsets = enumerate_configs(5, 2).unwrap();
        assert_eq!(subsets.len(), 26);
        // By size, then lexicographic.
        assert_eq!(subsets[0], vec![0, 1]);
        assert_eq!(subsets[1], vec![0, 2]);
        assert_eq!(subsets[9], vec![3, 4]);
        assert_eq!(subsets[10], vec![0, 1, 2]);
        assert_eq!(subsets[25], vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn enumerates_small_system_counts() {
        let subsets = enumerate_configs(3, 2).unwrap();
        assert_eq!(
            subsets,
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
        assert_eq!(enumerate_configs(2, 2).unwrap(), vec![vec![0, 1]]);
        assert_eq!(enumerate_configs(3, 1).unwrap().len(), 7);
    }

    #[test]
    fn rejects_invalid_min_size() {
        assert!(matches!(
            enumerate_configs(3, 0),
            Err(Error::InvalidMinSize { .. })
        ));
        assert!(matches!(
            enumerate_configs(3, 4),
            Err(Error::InvalidMinSize { .. })
        ));
    }

    #[test]
    fn asc_is_the_plain_mean_without_normalization() {
        let m = matrix(&["A", "B"], &[("d1", &[1.0, 0.6]), ("d2", &[0.0, 0.2])]);
        let r = asc(&m, &["A", "B"], &raw()).unwrap();
        assert!(close(r.fused_of("d1").unwrap(), 0.8, 1e-12));
    }

    #[test]
    fn asc_of_identical_systems_reproduces_the_scores() {
        let m = matrix(
            &["A", "B", "C"],
            &[("d1", &[0.7, 0.7, 0.7]), ("d2", &[0.3, 0.3, 0.3])],
        );
        let r = asc(&m, &["A", "B", "C"], &raw()).unwrap();
        for (got, want) in r.fused_values().iter().zip([0.7, 0.3]) {
            assert!(close(*got, want, 1e-12));
        }
        assert_eq!(r.ranking().rank_of("d1"), Some(1.0));
        assert_eq!(r.ranking().rank_of("d2"), Some(2.0));
    }

    #[test]
    fn asc_picks_the_best_mean() {
        let m = matrix(&["A", "B"], &[("d1", &[1.0, 0.6]), ("d2", &[0.8, 0.9])]);
        let r = asc(&m, &["A", "B"], &raw()).unwrap();
        assert!(close(r.fused_of("d2").unwrap(), 0.85, 1e-12));
        assert_eq!(r.top_item(), "d2");
    }

    #[test]
    fn arc_of_identical_systems_reproduces_the_ranking() {
        let m = matrix(
            &["A", "B"],
            &[
                ("d1", &[0.9, 0.9]),
                ("d2", &[0.5, 0.5]),
                ("d3", &[0.1, 0.1]),
            ],
        );
        let r = arc(&m, &["A", "B"], &raw()).unwrap();
        assert_eq!(r.ranking().rank_of("d1"), Some(1.0));
        assert_eq!(r.ranking().rank_of("d2"), Some(2.0));
        assert_eq!(r.ranking().rank_of("d3"), Some(3.0));
    }

    #[test]
    fn arc_averages_ranks_and_breaks_top_ties_lexicographically() {
        // A ranks d1..d4 as 1,2,3,4; B swaps the leaders.
        let m = matrix(
            &["A", "B"],
            &[
                ("d1", &[4.0, 3.0]),
                ("d2", &[3.0, 4.0]),
                ("d3", &[2.0, 2.0]),
                ("d4", &[1.0, 1.0]),
            ],
        );
        let r = arc(&m, &["A", "B"], &raw()).unwrap();
        assert_eq!(r.fused_of("d1").unwrap(), 1.5);
        assert_eq!(r.fused_of("d2").unwrap(), 1.5);
        assert_eq!(r.fused_of("d3").unwrap(), 3.0);
        assert_eq!(r.fused_of("d4").unwrap(), 4.0);
        assert_eq!(r.top_item(), "d1");
    }

    #[test]
    fn reversing_both_systems_reverses_the_arc_ranking() {
        // Fused rank values 1.5, 2.5, 2.0, 4.0 are distinct, so the reversal
        // is not muddied by tie-breaks.
        let m = matrix(
            &["A", "B"],
            &[
                ("d1", &[4.0, 3.0]),
                ("d2", &[3.0, 2.0]),
                ("d3", &[2.0, 4.0]),
                ("d4", &[1.0, 1.0]),
            ],
        );
        let reversed = matrix(
            &["A", "B"],
            &[
                ("d1", &[-4.0, -3.0]),
                ("d2", &[-3.0, -2.0]),
                ("d3", &[-2.0, -4.0]),
                ("d4", &[-1.0, -1.0]),
            ],
        );
        let fwd = arc(&m, &["A", "B"], &raw()).unwrap();
        let rev = arc(&reversed, &["A", "B"], &raw()).unwrap();
        assert_eq!(fwd.ranking().order(), vec!["d1", "d3", "d2", "d4"]);
        let mut fwd_order = fwd.ranking().order();
        fwd_order.reverse();
        assert_eq!(fwd_order, rev.ranking().order());
    }

    #[test]
    fn wscds_with_equal_weights_matches_asc() {
        let m = matrix(
            &["A", "B", "C"],
            &[
                ("d1", &[0.9, 0.2, 0.5]),
                ("d2", &[0.1, 0.8, 0.4]),
                ("d3", &[0.5, 0.5, 0.9]),
            ],
        );
        let plain = asc(&m, &["A", "B", "C"], &raw()).unwrap();
        let weighted = wscds(&m, &["A", "B", "C"], &[0.3, 0.3, 0.3], &raw()).unwrap();
        assert_eq!(plain.ranking(), weighted.ranking());
        for (a, b) in plain.fused_values().iter().zip(weighted.fused_values()) {
            assert!(close(*a, *b, 1e-9));
        }
        assert!(!weighted.fell_back());
    }

    #[test]
    fn wscds_worked_example() {
        let m = matrix(
            &["A", "B", "C"],
            &[("d1", &[1.0, 0.6, 0.3]), ("d2", &[0.5, 0.4, 0.2])],
        );
        let ds = [0.117201, 0.162978, 0.127427];
        let r = wscds(&m, &["A", "B", "C"], &ds, &raw()).unwrap();
        assert!(close(r.fused_of("d1").unwrap(), 0.621228, 1e-5));
    }

    #[test]
    fn wscds_zero_weights_fall_back_to_asc() {
        let m = matrix(&["A", "B"], &[("d1", &[0.9, 0.9]), ("d2", &[0.1, 0.1])]);
        let r = wscds(&m, &["A", "B"], &[0.0, 0.0], &raw()).unwrap();
        assert!(r.fell_back());
        assert_eq!(r.config().method, FusionMethod::Wscds);
        let plain = asc(&m, &["A", "B"], &raw()).unwrap();
        assert_eq!(r.fused_values(), plain.fused_values());
    }

    #[test]
    fn wscds_rejects_negative_weights() {
        let m = matrix(&["A", "B"], &[("d1", &[0.9, 0.9]), ("d2", &[0.1, 0.1])]);
        assert!(matches!(
            wscds(&m, &["A", "B"], &[0.1, -0.2], &raw()),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn wrcds_with_equal_weights_matches_arc() {
        let m = matrix(
            &["A", "B", "C"],
            &[
                ("d1", &[0.9, 0.2, 0.5]),
                ("d2", &[0.1, 0.8, 0.4]),
                ("d3", &[0.5, 0.5, 0.9]),
            ],
        );
        let plain = arc(&m, &["A", "B", "C"], &raw()).unwrap();
        let weighted = wrcds(&m, &["A", "B", "C"], &[0.2, 0.2, 0.2], &raw()).unwrap();
        assert_eq!(plain.ranking(), weighted.ranking());
        for (a, b) in plain.fused_values().iter().zip(weighted.fused_values()) {
            assert!(close(*a, *b, 1e-9));
        }
    }

    #[test]
    fn wrcds_worked_example() {
        // d has rank 1 under A and rank 3 under B.
        let m = matrix(
            &["A", "B"],
            &[("d", &[3.0, 1.0]), ("e", &[2.0, 3.0]), ("f", &[1.0, 2.0])],
        );
        let r = wrcds(&m, &["A", "B"], &[0.1, 0.3], &raw()).unwrap();
        assert!(close(r.fused_of("d").unwrap(), 1.5, 1e-12));
    }

    #[test]
    fn wrcds_zero_weight_falls_back_to_arc() {
        let m = matrix(&["A", "B"], &[("d1", &[0.9, 0.8]), ("d2", &[0.1, 0.2])]);
        let r = wrcds(&m, &["A", "B"], &[0.0, 0.5], &raw()).unwrap();
        assert!(r.fell_back());
        assert_eq!(r.config().method, FusionMethod::Wrcds);
        let plain = arc(&m, &["A", "B"], &raw()).unwrap();
        assert_eq!(r.fused_values(), plain.fused_values());
    }

    #[test]
    fn singleton_subsets_pass_the_system_through() {
        let m = matrix(&["A", "B"], &[("d1", &[0.9, 0.1]), ("d2", &[0.1, 0.9])]);
        let config = FusionConfig::new(vec!["A".into()], FusionMethod::Wrcds);
        let r = fuse(&m, &config).unwrap();
        assert!(r.is_baseline());
        assert_eq!(r.top_item(), "d1");
        assert_eq!(r.ranking().rank_of("d1"), Some(1.0));
        assert_eq!(r.ranking().rank_of("d2"), Some(2.0));
    }

    #[test]
    fn fuse_is_deterministic() {
        let m = matrix(
            &["A", "B", "C"],
            &[
                ("d1", &[0.9, 0.2, 0.5]),
                ("d2", &[0.1, 0.8, 0.4]),
                ("d3", &[0.5, 0.5, 0.9]),
            ],
        );
        let config = FusionConfig::new(
            vec!["A".into(), "B".into(), "C".into()],
            FusionMethod::Wrcds,
        );
        let first = fuse(&m, &config).unwrap();
        let second = fuse(&m, &config).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn fuse_rejects_unknown_systems() {
        let m = matrix(&["A", "B"], &[("d1", &[0.9, 0.1]), ("d2", &[0.1, 0.9])]);
        let config = FusionConfig::new(vec!["A".into(), "Z".into()], FusionMethod::Asc);
        assert!(matches!(fuse(&m, &config), Err(Error::UnknownSystem(_))));
    }

    #[test]
    fn run_all_produces_every_subset_method_pair() {
        let m5 = matrix(
            &["A", "B", "C", "D", "E"],
            &[
                ("d1", &[0.9, 0.2, 0.5, 0.3, 0.8]),
                ("d2", &[0.1, 0.8, 0.4, 0.9, 0.2]),
                ("d3", &[0.5, 0.5, 0.9, 0.1, 0.4]),
            ],
        );
        let results = run_all(&m5).unwrap();
        assert_eq!(results.len(), 104);

        let m2 = matrix(&["A", "B"], &[("d1", &[0.9, 0.2]), ("d2", &[0.1, 0.8])]);
        assert_eq!(run_all(&m2).unwrap().len(), 4);

        let m3 = matrix(
            &["A", "B", "C"],
            &[("d1", &[0.9, 0.2, 0.5]), ("d2", &[0.1, 0.8, 0.4])],
        );
        let results = run_all(&m3).unwrap();
        assert_eq!(results.len(), 16);
        // Subsets outer, methods inner, in the documented order.
        assert_eq!(results[0].config().subset, vec!["A", "B"]);
        assert_eq!(results[0].config().method, FusionMethod::Asc);
        assert_eq!(results[1].config().method, FusionMethod::Wscds);
        assert_eq!(results[2].config().method, FusionMethod::Arc);
        assert_eq!(results[3].config().method, FusionMethod::Wrcds);
        assert_eq!(results[4].config().subset, vec!["A", "C"]);
        assert_eq!(results[15].config().subset, vec!["A", "B", "C"]);
    }

    #[test]
    fn fused_values_stay_in_their_documented_ranges() {
        let m = matrix(
            &["A", "B", "C"],
            &[
                ("d1", &[10.0, 0.2, 5.0]),
                ("d2", &[-3.0, 0.8, 4.0]),
                ("d3", &[5.0, 0.5, 9.0]),
                ("d4", &[1.0, 0.1, 2.0]),
            ],
        );
        let opts = FuseOptions::default();
        let n = m.n_items() as f64;
        for r in run_all_with(&m, &opts).unwrap() {
            for &v in r.fused_values() {
                if r.config().method.is_rank_based() {
                    assert!(v >= 1.0 && v <= n, "{v} out of rank range");
                } else {
                    assert!((0.0..=1.0).contains(&v), "{v} out of score range");
                }
            }
        }
    }

    #[test]
    fn report_lists_rows_in_enumeration_order() {
        let m = matrix(&["A", "B"], &[("d1", &[0.9, 0.2]), ("d2", &[0.1, 0.8])]);
        let results = run_all(&m).unwrap();
        let csv = fusion_report_csv(&results);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "subset,method,top_item,fused_value_of_top,fallback_flag"
        );
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("A+B,ASC,"));
        assert!(lines[2].starts_with("A+B,WSCDS,"));
        assert!(lines[3].starts_with("A+B,ARC,"));
        assert!(lines[4].starts_with("A+B,WRCDS,"));
    }

    proptest! {
        #[test]
        fn rank_methods_ignore_monotone_transforms(
            rows in proptest::collection::vec(
                proptest::collection::vec(-1e2..1e2f64, 3),
                2..12
            ),
            scale in 0.1..5.0f64,
            shift in -5.0..5.0f64,
        ) {
            let items: Vec<(String, Vec<f64>)> = rows
                .iter()
                .enumerate()
                .map(|(i, row)| (format!("d{i:02}"), row.clone()))
                .collect();
            let ids = vec!["A".to_string(), "B".to_string(), "C".to_string()];
            let m = ScoreMatrix::new(
                items.iter().map(|(id, _)| Item::new(id.clone())).collect(),
                ids.clone(),
                items.iter().map(|(_, row)| row.clone()).collect(),
            ).unwrap();
            // Strictly increasing per-system transform (exp then affine).
            let transformed = ScoreMatrix::new(
                items.iter().map(|(id, _)| Item::new(id.clone())).collect(),
                ids,
                items
                    .iter()
                    .map(|(_, row)| {
                        row.iter().map(|v| scale * (v / 100.0).exp() + shift).collect()
                    })
                    .collect(),
            ).unwrap();
            let opts = FuseOptions { normalize: false, ..FuseOptions::default() };
            // ARC consumes only ranks, which no strictly increasing
            // transform can move.
            let base = arc(&m, &["A", "B", "C"], &opts).unwrap();
            let moved = arc(&transformed, &["A", "B", "C"], &opts).unwrap();
            prop_assert_eq!(base.fused_values(), moved.fused_values());
            prop_assert_eq!(base.top_item(), moved.top_item());
            // So does WRCDS once its weights are held fixed; with internally
            // computed weights only affine transforms leave the diversity
            // strengths (hence the result) untouched.
            let ds = [0.2, 0.5, 0.3];
            let base = wrcds(&m, &["A", "B", "C"], &ds, &opts).unwrap();
            let moved = wrcds(&transformed, &["A", "B", "C"], &ds, &opts).unwrap();
            prop_assert_eq!(base.fused_values(), moved.fused_values());
            prop_assert_eq!(base.top_item(), moved.top_item());
        }

        #[test]
        fn normalized_score_methods_ignore_positive_affine_transforms(
            rows in proptest::collection::vec(
                proptest::collection::vec(-1e2..1e2f64, 2),
                2..12
            ),
            scale in 0.1..5.0f64,
            shift in -5.0..5.0f64,
        ) {
            let ids = vec!["A".to_string(), "B".to_string()];
            let items: Vec<Item> = (0..rows.len()).map(|i| Item::new(format!("d{i:02}"))).collect();
            let m = ScoreMatrix::new(items.clone(), ids.clone(), rows.clone()).unwrap();
            let transformed = ScoreMatrix::new(
                items,
                ids,
                rows.iter()
                    .map(|row| row.iter().map(|v| scale * v + shift).collect())
                    .collect(),
            ).unwrap();
            let opts = FuseOptions::default();
            let base = run_all_with(&m, &opts).unwrap();
            let moved = run_all_with(&transformed, &opts).unwrap();
            for (a, b) in base.iter().zip(&moved) {
                // Min-max normalization absorbs positive affine transforms,
                // so every method's fused values survive within rounding.
                for (x, y) in a.fused_values().iter().zip(b.fused_values()) {
                    prop_assert!((x - y).abs() < 1e-9);
                }
                if !a.config().method.is_rank_based() {
                    prop_assert_eq!(a.top_item(), b.top_item());
                }
            }
        }
    }
}
