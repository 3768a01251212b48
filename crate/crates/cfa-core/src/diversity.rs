//! Cognitive diversity between scoring systems.
//!
//! The diversity of two systems is the distance between their rank-score
//! functions; a system's diversity strength is its mean distance to the other
//! systems under consideration. Diversity strengths are the weights used by
//! the WSCDS and WRCDS fusion methods.

use crate::error::{Error, Result};
use crate::scoring::{rsf_values, RankScoreFunction, ScoreMatrix};

/// Pairwise cognitive diversity plus per-system diversity strength.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityMatrix {
    systems: Vec<String>,
    cd: Vec<Vec<f64>>,
    ds: Vec<f64>,
}

impl DiversityMatrix {
    /// Builds the full symmetric CD grid and DS vector from one RSF per
    /// system.
    pub fn from_rsfs(systems: Vec<String>, rsfs: &[RankScoreFunction]) -> Result<Self> {
        let k = systems.len();
        if k < 2 {
            return Err(Error::NeedTwoSystems(k));
        }
        if rsfs.len() != k {
            return Err(Error::Validation(format!(
                "{k} system ids but {} rank-score functions",
                rsfs.len()
            )));
        }
        let mut cd = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in (i + 1)..k {
                let d = cognitive_diversity(&rsfs[i], &rsfs[j])?;
                cd[i][j] = d;
                cd[j][i] = d;
            }
        }
        let ds = (0..k)
            .map(|i| {
                let sum: f64 = (0..k).filter(|&j| j != i).map(|j| cd[i][j]).sum();
                sum / (k - 1) as f64
            })
            .collect();
        Ok(DiversityMatrix { systems, cd, ds })
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn cd_grid(&self) -> &[Vec<f64>] {
        &self.cd
    }

    pub fn ds_vector(&self) -> &[f64] {
        &self.ds
    }

    pub fn cd(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.systems.iter().position(|s| s == a)?;
        let j = self.systems.iter().position(|s| s == b)?;
        Some(self.cd[i][j])
    }

    pub fn ds(&self, system: &str) -> Option<f64> {
        let i = self.systems.iter().position(|s| s == system)?;
        Some(self.ds[i])
    }

    /// Mean CD over unordered system pairs.
    pub fn mean_pairwise_cd(&self) -> f64 {
        let k = self.systems.len();
        let mut sum = 0.0;
        for i in 0..k {
            for j in (i + 1)..k {
                sum += self.cd[i][j];
            }
        }
        sum / (k * (k - 1) / 2) as f64
    }

    /// `system_a,system_b,cd` rows for every unordered pair, a blank line,
    /// then `system,ds` rows. Byte-deterministic.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("system_a,system_b,cd\n");
        let k = self.systems.len();
        for i in 0..k {
            for j in (i + 1)..k {
                out.push_str(&format!(
                    "{},{},{}\n",
                    self.systems[i], self.systems[j], self.cd[i][j]
                ));
            }
        }
        out.push_str("\nsystem,ds\n");
        for (sys, ds) in self.systems.iter().zip(&self.ds) {
            out.push_str(&format!("{sys},{ds}\n"));
        }
        out
    }
}

/// CD(A,B): the root of the mean (divisor n-1) squared pointwise difference
/// between two rank-score functions.
pub fn cognitive_diversity(a: &RankScoreFunction, b: &RankScoreFunction) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::DegenerateLength(n));
    }
    let sum_sq: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((sum_sq / (n - 1) as f64).sqrt())
}

/// DS(target): the mean CD between `target` and every other system.
///
/// `systems` pairs each system id with its rank-score function.
pub fn diversity_strength(target: &str, systems: &[(String, RankScoreFunction)]) -> Result<f64> {
    if systems.len() < 2 {
        return Err(Error::NeedTwoSystems(systems.len()));
    }
    let (_, target_rsf) = systems
        .iter()
        .find(|(id, _)| id == target)
        .ok_or_else(|| Error::UnknownSystem(target.to_string()))?;
    let mut sum = 0.0;
    let mut count = 0;
    for (id, rsf) in systems {
        if id != target {
            sum += cognitive_diversity(target_rsf, rsf)?;
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// The full diversity matrix of a score matrix, with RSFs derived from
/// normalized per-system scores.
pub fn diversity_matrix(matrix: &ScoreMatrix) -> Result<DiversityMatrix> {
    let k = matrix.n_systems();
    if k < 2 {
        return Err(Error::NeedTwoSystems(k));
    }
    let rsfs: Vec<RankScoreFunction> = (0..k)
        .map(|j| RankScoreFunction::new(rsf_values(&matrix.column(j))))
        .collect::<Result<_>>()?;
    DiversityMatrix::from_rsfs(matrix.system_ids().to_vec(), &rsfs)
}
