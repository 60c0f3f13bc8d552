//! Monte Carlo study of the kernel REX / PEX estimators: bias and RMSE over
//! a grid of sample sizes, ages and bandwidths.
//!
//! Every replication draws its sample from a ChaCha8 stream whose seed is a
//! pure function of `(master seed, n, t index, h index, replication)`, and
//! estimates are reduced in replication order, so results do not depend on
//! how rayon schedules the work.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::functionals::{past_extropy, residual_extropy, CurveKind};
use crate::kde::{IntegrationLimits, KdeModel};

/// Share of dropped replications above which a cell is flagged.
pub const DROP_FLAG_SHARE: f64 = 0.01;

/// Replications used by the reference study.
pub const DEFAULT_REPLICATIONS: usize = 5000;

/// Sample sizes, ages and bandwidths of the reference REX study.
pub const REX_T_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
/// Ages of the reference PEX study.
pub const PEX_T_GRID: [f64; 5] = [0.3, 0.5, 0.7, 0.9, 1.2];
pub const SAMPLE_SIZES: [usize; 3] = [40, 50, 100];
pub const BANDWIDTHS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// How the true value each estimate is scored against is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truth {
    /// `-1/4` for REX and `-1/(2t)` for PEX, as used for the reference
    /// tables (exact for exponential(1) and for uniform(0,1) with `t <= 1`).
    #[default]
    ClosedForm,
    /// REX / PEX of the truth model by quadrature.
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kind: CurveKind,
    pub model: Distribution,
    pub sample_sizes: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub limits: IntegrationLimits,
    pub truth: Truth,
}

impl StudyConfig {
    /// The reference design: exponential(1) for REX, uniform(0,1) for PEX,
    /// sample-range integration limits.
    pub fn canned(kind: CurveKind, replications: usize, seed: u64) -> Self {
        let (model, t_grid) = match kind {
            CurveKind::Residual => (
                Distribution::exponential(1.0).expect("valid rate"),
                REX_T_GRID.to_vec(),
            ),
            CurveKind::Past => (
                Distribution::uniform(0.0, 1.0).expect("valid bounds"),
                PEX_T_GRID.to_vec(),
            ),
        };
        StudyConfig {
            kind,
            model,
            sample_sizes: SAMPLE_SIZES.to_vec(),
            t_grid,
            bandwidths: BANDWIDTHS.to_vec(),
            replications,
            seed,
            limits: IntegrationLimits::SampleRange,
            truth: Truth::ClosedForm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be >= 1".into()));
        }
        if self.sample_sizes.is_empty() || self.t_grid.is_empty() || self.bandwidths.is_empty() {
            return Err(Error::InvalidParameter(
                "sample sizes, t grid and bandwidths must be non-empty".into(),
            ));
        }
        if let Some(h) = self
            .bandwidths
            .iter()
            .find(|h| !(**h > 0.0 && h.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        if let Some(n) = self.sample_sizes.iter().find(|n| **n < 2) {
            return Err(Error::InvalidParameter(format!(
                "sample size must be >= 2, got {n}"
            )));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t must be finite, got {t}"
            )));
        }
        Ok(())
    }

    pub fn truth_at(&self, t: f64) -> Result<f64> {
        match (self.truth, self.kind) {
            (Truth::ClosedForm, CurveKind::Residual) => Ok(-0.25),
            (Truth::ClosedForm, CurveKind::Past) => {
                if t > 0.0 {
                    Ok(-1.0 / (2.0 * t))
                } else {
                    Err(Error::InvalidParameter(format!(
                        "PEX truth needs t > 0, got {t}"
                    )))
                }
            }
            (Truth::Numeric, CurveKind::Residual) => residual_extropy(&self.model, t),
            (Truth::Numeric, CurveKind::Past) => past_extropy(&self.model, t),
        }
    }
}

/// JSON form of a [`StudyConfig`]. Omitted fields take the canned values.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub kind: String,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub sample_sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub bandwidths: Option<Vec<f64>>,
    #[serde(default)]
    pub replications: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub limits: Option<String>,
    #[serde(default)]
    pub numeric_truth: Option<bool>,
}

impl StudySpec {
    pub fn into_config(self) -> Result<StudyConfig> {
        let kind: CurveKind = self.kind.parse()?;
        let mut cfg = StudyConfig::canned(
            kind,
            self.replications.unwrap_or(DEFAULT_REPLICATIONS),
            self.seed.unwrap_or(1),
        );
        if let Some(m) = self.model {
            cfg.model = m.parse()?;
        }
        if let Some(v) = self.sample_sizes {
            cfg.sample_sizes = v;
        }
        if let Some(v) = self.t_grid {
            cfg.t_grid = v;
        }
        if let Some(v) = self.bandwidths {
            cfg.bandwidths = v;
        }
        if let Some(l) = self.limits {
            cfg.limits = l.parse()?;
        }
        if self.numeric_truth == Some(true) {
            cfg.truth = Truth::Numeric;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub kind: CurveKind,
    pub n: usize,
    pub t: f64,
    pub h: f64,
    pub truth: f64,
    pub bias: f64,
    pub rmse: f64,
    pub used: usize,
    pub drops: usize,
}

impl StudyRow {
    pub const CSV_HEADER: &'static str = "kind,n,t,h,bias,rmse,drops";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{}",
            self.kind, self.n, self.t, self.h, self.bias, self.rmse, self.drops
        )
    }

    /// More than [`DROP_FLAG_SHARE`] of the replications were dropped.
    pub fn flagged(&self) -> bool {
        self.drops as f64 > DROP_FLAG_SHARE * (self.used + self.drops) as f64
    }
}

/// `(mean(e) - truth, sqrt(mean((e - truth)²)))`.
pub fn bias_rmse(estimates: &[f64], truth: f64) -> Result<(f64, f64)> {
    if estimates.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let m = estimates.len() as f64;
    let bias = estimates.iter().map(|e| e - truth).sum::<f64>() / m;
    let mse = estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / m;
    Ok((bias, mse.sqrt()))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one replication.
pub fn replication_seed(master: u64, n: usize, t_index: usize, h_index: usize, rep: usize) -> u64 {
    [n as u64, t_index as u64, h_index as u64, rep as u64]
        .into_iter()
        .fold(splitmix64(master), |acc, v| splitmix64(acc ^ v))
}

/// One estimate per replication (`None` where the estimator hit a domain
/// error), in replication order.
pub fn replicate(cfg: &StudyConfig, n: usize, t_index: usize, h_index: usize) -> Vec<Option<f64>> {
    let t = cfg.t_grid[t_index];
    let h = cfg.bandwidths[h_index];
    (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let seed = replication_seed(cfg.seed, n, t_index, h_index, rep);
            let sample = cfg.model.sample_iid(n, seed);
            KdeModel::new(sample, h)
                .ok()?
                .with_limits(cfg.limits)
                .estimate(cfg.kind, t)
                .ok()
        })
        .collect()
}

pub fn run_cell(cfg: &StudyConfig, n: usize, t_index: usize, h_index: usize) -> Result<StudyRow> {
    let t = cfg.t_grid[t_index];
    let h = cfg.bandwidths[h_index];
    let truth = cfg.truth_at(t)?;
    let results = replicate(cfg, n, t_index, h_index);
    let estimates: Vec<f64> = results.iter().flatten().copied().collect();
    let drops = results.len() - estimates.len();
    let (bias, rmse) = bias_rmse(&estimates, truth).map_err(|_| Error::Domain {
        t,
        reason: format!("every replication failed for n = {n}, h = {h}"),
    })?;
    Ok(StudyRow {
        kind: cfg.kind,
        n,
        t,
        h,
        truth,
        bias,
        rmse,
        used: estimates.len(),
        drops,
    })
}

/// All cells, ordered by n, then t, then h.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    cfg.validate()?;
    let mut rows =
        Vec::with_capacity(cfg.sample_sizes.len() * cfg.t_grid.len() * cfg.bandwidths.len());
    for &n in &cfg.sample_sizes {
        for ti in 0..cfg.t_grid.len() {
            for hi in 0..cfg.bandwidths.len() {
                rows.push(run_cell(cfg, n, ti, hi)?);
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bias_rmse_examples() {
        let (b, r) = bias_rmse(&[-0.3, -0.2], -0.25).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r, 0.05, epsilon = 1e-15);
        assert_eq!(bias_rmse(&[-0.25], -0.25).unwrap(), (0.0, 0.0));
        let (b, r) = bias_rmse(&[-0.20, -0.20, -0.35], -0.25).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r, (0.015f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r, 0.07071, epsilon = 1e-5);
        assert!(bias_rmse(&[], 0.0).is_err());
    }

    #[test]
    fn seeds_differ_per_coordinate() {
        let base = replication_seed(1, 40, 0, 0, 0);
        assert_ne!(base, replication_seed(2, 40, 0, 0, 0));
        assert_ne!(base, replication_seed(1, 50, 0, 0, 0));
        assert_ne!(base, replication_seed(1, 40, 1, 0, 0));
        assert_ne!(base, replication_seed(1, 40, 0, 1, 0));
        assert_ne!(base, replication_seed(1, 40, 0, 0, 1));
        assert_eq!(base, replication_seed(1, 40, 0, 0, 0));
    }

    #[test]
    fn single_replication_rmse_is_abs_bias() {
        let mut cfg = StudyConfig::canned(CurveKind::Residual, 1, 9);
        cfg.sample_sizes = vec![40];
        cfg.t_grid = vec![0.5];
        cfg.bandwidths = vec![0.3];
        let rows = run_study(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].rmse, rows[0].bias.abs());
    }

    #[test]
    fn config_validation() {
        let mut cfg = StudyConfig::canned(CurveKind::Past, 0, 1);
        assert!(cfg.validate().is_err());
        cfg.replications = 10;
        cfg.bandwidths = vec![0.0];
        assert!(cfg.validate().is_err());
        cfg.bandwidths = vec![];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn truth_values() {
        let cfg = StudyConfig::canned(CurveKind::Past, 1, 1);
        assert_abs_diff_eq!(cfg.truth_at(0.5).unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cfg.truth_at(1.2).unwrap(), -1.0 / 2.4, epsilon = 1e-15);
        let mut numeric = cfg.clone();
        numeric.truth = Truth::Numeric;
        assert_abs_diff_eq!(numeric.truth_at(0.5).unwrap(), -1.0, epsilon = 1e-9);
        // past the end of the support the inactivity time is the whole law
        assert_abs_diff_eq!(numeric.truth_at(1.2).unwrap(), -0.5, epsilon = 1e-9);
    }

    #[test]
    fn spec_fills_defaults() {
        let spec: StudySpec = serde_json::from_str(
            r#"{"kind": "pex", "sample_sizes": [40], "t_grid": [0.5], "replications": 20, "seed": 3}"#,
        )
        .unwrap();
        let cfg = spec.into_config().unwrap();
        assert_eq!(cfg.kind, CurveKind::Past);
        assert_eq!(cfg.bandwidths, BANDWIDTHS.to_vec());
        assert_eq!(cfg.limits, IntegrationLimits::SampleRange);
        assert_eq!(cfg.model, Distribution::uniform(0.0, 1.0).unwrap());
        let bad: std::result::Result<StudySpec, _> =
            serde_json::from_str(r#"{"kind": "rex", "bogus": 1}"#);
        assert!(bad.is_err());
    }
}
