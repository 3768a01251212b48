//! Seeded synthetic scoring systems and the diversity-vs-accuracy study.
//!
//! Each synthetic item has a latent quality drawn uniformly from [0, 1); a
//! system's score is its scale times (signal * quality + noise), with
//! zero-centered uniform noise in [-1, 1) times the per-system noise scale.
//! Heterogeneous noise induces cognitive diversity between systems and
//! heterogeneous scale separates score-based from rank-based fusion. The
//! study fuses the full system set per trial and records whether each method
//! ranks the ground-truth best item first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diversity::diversity_matrix;
use crate::error::{Error, Result};
use crate::fusion::{fuse_with, FuseOptions, FusionConfig, FusionMethod};
use crate::scoring::{Item, ScoreMatrix};

/// Parameters of one synthetic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_items: usize,
    pub k_systems: usize,
    /// Multiplier on the latent quality shared by all systems.
    pub signal_strength: f64,
    /// Per-system noise magnitude; zero means the system ranks perfectly.
    pub noise_scales: Vec<f64>,
    /// Per-system positive multiplicative scale.
    pub score_scales: Vec<f64>,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_items < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 items, got {}",
                self.n_items
            )));
        }
        if self.k_systems < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 systems, got {}",
                self.k_systems
            )));
        }
        if self.noise_scales.len() != self.k_systems {
            return Err(Error::InvalidSpec(format!(
                "{} noise scales for {} systems",
                self.noise_scales.len(),
                self.k_systems
            )));
        }
        if self.score_scales.len() != self.k_systems {
            return Err(Error::InvalidSpec(format!(
                "{} score scales for {} systems",
                self.score_scales.len(),
                self.k_systems
            )));
        }
        if !self.signal_strength.is_finite() || self.signal_strength < 0.0 {
            return Err(Error::InvalidSpec(
                "signal strength must be finite and >= 0".into(),
            ));
        }
        if self.noise_scales.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidSpec(
                "noise scales must be finite and >= 0".into(),
            ));
        }
        if self
            .score_scales
            .iter()
            .any(|v| !v.is_finite() || *v <= 0.0)
        {
            return Err(Error::InvalidSpec(
                "score scales must be finite and > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Generates the score matrix and the id of the ground-truth best item.
///
/// Deterministic per seed: qualities are drawn first, then noise row by row.
pub fn generate(spec: &SyntheticSpec) -> Result<(ScoreMatrix, String)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_items;
    let k = spec.k_systems;

    let qualities: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let width = n.to_string().len();
    let items: Vec<Item> = (0..n)
        .map(|i| Item::new(format!("d{:0width$}", i + 1)))
        .collect();
    let system_ids: Vec<String> = (0..k).map(|j| format!("s{}", j + 1)).collect();

    let mut values = vec![vec![0.0; k]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let noise = 2.0 * rng.gen::<f64>() - 1.0;
            *cell = spec.score_scales[j]
                * (spec.signal_strength * qualities[i] + spec.noise_scales[j] * noise);
        }
    }

    let mut truth = 0;
    for i in 1..n {
        if qualities[i] > qualities[truth] {
            truth = i;
        }
    }
    let truth_id = items[truth].id.clone();
    Ok((ScoreMatrix::new(items, system_ids, values)?, truth_id))
}

/// One trial: whether each method's fused top item hit the ground truth,
/// plus the mean pairwise cognitive diversity of the trial's systems.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub mean_cd: f64,
    /// Indexed like [`FusionMethod::ALL`].
    pub hits: [bool; 4],
}

/// Accuracy within one diversity bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct CdBucket {
    pub index: usize,
    pub trials: usize,
    pub mean_cd: f64,
    /// Indexed like [`FusionMethod::ALL`].
    pub accuracy: [f64; 4],
}

/// Full study output: per-trial records, per-method top-1 accuracy and the
/// accuracy-vs-diversity relationship bucketed by CD quantiles.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub trials: Vec<TrialOutcome>,
    /// Indexed like [`FusionMethod::ALL`].
    pub accuracy: [f64; 4],
    pub buckets: Vec<CdBucket>,
}

impl StudyReport {
    pub fn accuracy_of(&self, method: FusionMethod) -> f64 {
        let idx = FusionMethod::ALL.iter().position(|&m| m == method).unwrap();
        self.accuracy[idx]
    }

    /// `trial,method,hit,mean_cd` rows, a blank line, then an aggregate
    /// block with overall and per-CD-quartile accuracy. Byte-deterministic.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,method,hit,mean_cd\n");
        for t in &self.trials {
            for (idx, method) in FusionMethod::ALL.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    t.trial,
                    method,
                    u8::from(t.hits[idx]),
                    t.mean_cd
                ));
            }
        }
        out.push_str("\nblock,method,bucket,trials,accuracy,mean_cd\n");
        for (idx, method) in FusionMethod::ALL.iter().enumerate() {
            out.push_str(&format!(
                "overall,{},,{},{},\n",
                method,
                self.trials.len(),
                self.accuracy[idx]
            ));
        }
        for bucket in &self.buckets {
            for (idx, method) in FusionMethod::ALL.iter().enumerate() {
                out.push_str(&format!(
                    "cd_quantile,{},{},{},{},{}\n",
                    method, bucket.index, bucket.trials, bucket.accuracy[idx], bucket.mean_cd
                ));
            }
        }
        out
    }
}

/// Runs `trials` generate-fuse-evaluate rounds. Trial t reuses the template
/// with seed `template.seed + t`, so the whole study is reproducible.
pub fn diversity_study(
    template: &SyntheticSpec,
    trials: usize,
    opts: &FuseOptions,
) -> Result<StudyReport> {
    if trials < 1 {
        return Err(Error::InvalidSpec("need at least 1 trial".into()));
    }
    template.validate()?;

    let full_subset: Vec<String> = (0..template.k_systems)
        .map(|j| format!("s{}", j + 1))
        .collect();
    let mut outcomes = Vec::with_capacity(trials);
    for t in 0..trials {
        let spec = SyntheticSpec {
            seed: template.seed.wrapping_add(t as u64),
            ..template.clone()
        };
        let (matrix, truth) = generate(&spec)?;
        let mean_cd = diversity_matrix(&matrix)?.mean_pairwise_cd();
        let mut hits = [false; 4];
        for (idx, &method) in FusionMethod::ALL.iter().enumerate() {
            let config = FusionConfig::new(full_subset.clone(), method);
            let result = fuse_with(&matrix, &config, opts)?;
            hits[idx] = result.top_item() == truth;
        }
        outcomes.push(TrialOutcome {
            trial: t,
            mean_cd,
            hits,
        });
    }

    let mut accuracy = [0.0; 4];
    for outcome in &outcomes {
        for (idx, hit) in outcome.hits.iter().enumerate() {
            if *hit {
                accuracy[idx] += 1.0;
            }
        }
    }
    for a in &mut accuracy {
        *a /= trials as f64;
    }

    let buckets = bucket_by_cd(&outcomes);
    Ok(StudyReport {
        trials: outcomes,
        accuracy,
        buckets,
    })
}

/// Splits trials into up to four equal-size buckets of increasing mean CD.
fn bucket_by_cd(outcomes: &[TrialOutcome]) -> Vec<CdBucket> {
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&a, &b| {
        outcomes[a]
            .mean_cd
            .partial_cmp(&outcomes[b].mean_cd)
            .unwrap()
            .then(a.cmp(&b))
    });
    let n_buckets = 4.min(outcomes.len());
    let mut buckets = Vec::with_capacity(n_buckets);
    for b in 0..n_buckets {
        let start = b * outcomes.len() / n_buckets;
        let end = (b + 1) * outcomes.len() / n_buckets;
        let members = &order[start..end];
        let mut accuracy = [0.0; 4];
        let mut cd_sum = 0.0;
        for &m in members {
            cd_sum += outcomes[m].mean_cd;
            for (idx, hit) in outcomes[m].hits.iter().enumerate() {
                if *hit {
                    accuracy[idx] += 1.0;
                }
            }
        }
        for a in &mut accuracy {
            *a /= members.len() as f64;
        }
        buckets.push(CdBucket {
            index: b + 1,
            trials: members.len(),
            mean_cd: cd_sum / members.len() as f64,
            accuracy,
        });
    }
    buckets
}
