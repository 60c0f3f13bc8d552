//! Gaussian kernel density estimation and plug-in REX / PEX estimators.
//!
//! `f_n(x) = 1/(n h) Σ φ((x - X_i) / h)` with the standard normal kernel.
//! The distribution estimates are integrals of `f_n`, evaluated exactly as
//! differences of normal CDFs:
//!
//! * [`IntegrationLimits::Displayed`]: `F_n(t) = ∫_0^t f_n`, `S_n(t) = ∫_t^∞ f_n`.
//!   Kernel mass below zero is lost, so `F_n + S_n < 1` in general.
//! * [`IntegrationLimits::SampleRange`]: the open ends `0` and `∞` are
//!   replaced by the sample minimum and maximum, both in the distribution
//!   estimates and in the `∫ f_n²` of the extropy estimators. This is the
//!   convention under which the reference simulation and COVID-19 results
//!   are reproduced.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use statrs::function::erf::erfc;

use crate::distributions::Distribution;
use crate::error::{Curve, Error, Result};
use crate::functionals::CurveKind;
use crate::quadrature::{Simpson, Tolerance};

/// `∫ K²` for the standard normal kernel, `1 / (2√π)`.
pub const KERNEL_ROUGHNESS: f64 = 0.282_094_791_773_878_14;

/// Distribution estimates at or below this are treated as vanishing.
pub const MIN_MASS: f64 = 1e-12;

/// Kernels further than this many bandwidths away contribute nothing
/// measurable to `f_n`.
const KERNEL_REACH: f64 = 9.0;

/// Extra bandwidths added above the sample maximum when integrating `f_n²`
/// to infinity.
const TAIL_BANDWIDTHS: f64 = 8.0;

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `Φ(b) - Φ(a)` for `a <= b`, without cancellation in either tail.
fn normal_mass(a: f64, b: f64) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    if a >= 0.0 {
        0.5 * (erfc(a * r) - erfc(b * r))
    } else {
        0.5 * (erfc(-b * r) - erfc(-a * r))
    }
}

/// Observations of a lifetime, stored sorted. At least two are required.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    obs: Vec<f64>,
}

impl Sample {
    pub fn new(mut obs: Vec<f64>) -> Result<Self> {
        if obs.len() < 2 {
            return Err(Error::TooFewValues {
                needed: 2,
                got: obs.len(),
            });
        }
        if let Some(bad) = obs.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite observation {bad}"
            )));
        }
        obs.sort_by(|a, b| a.total_cmp(b));
        Ok(Sample { obs })
    }

    /// One observation per line; for CSV input the first column is used.
    /// Blank lines, `#` comments and a non-numeric header line are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut obs = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let field = line.split(',').next().unwrap_or("").trim();
            match field.parse::<f64>() {
                Ok(v) => obs.push(v),
                Err(_) if obs.is_empty() && k == 0 => continue,
                Err(_) => {
                    return Err(Error::Parse(format!(
                        "line {}: `{field}` is not a number",
                        k + 1
                    )))
                }
            }
        }
        Sample::new(obs)
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.obs
    }

    pub fn mean(&self) -> f64 {
        self.obs.iter().sum::<f64>() / self.obs.len() as f64
    }
}

/// Where the open ends of the estimator integrals are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegrationLimits {
    /// `0` and `+∞`.
    #[default]
    Displayed,
    /// Sample minimum and maximum.
    SampleRange,
}

impl FromStr for IntegrationLimits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "displayed" => Ok(IntegrationLimits::Displayed),
            "sample-range" => Ok(IntegrationLimits::SampleRange),
            other => Err(Error::Parse(format!(
                "unknown integration limits `{other}` (expected displayed or sample-range)"
            ))),
        }
    }
}

impl fmt::Display for IntegrationLimits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegrationLimits::Displayed => "displayed",
            IntegrationLimits::SampleRange => "sample-range",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdeCurve {
    Pdf,
    Cdf,
    Survival,
}

/// Gaussian KDE over a fixed set of points. Unlike [`Sample`] a single
/// observation is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeModel {
    obs: Vec<f64>,
    bandwidth: f64,
    limits: IntegrationLimits,
}

impl KdeModel {
    pub fn new(mut obs: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::TooFewValues { needed: 1, got: 0 });
        }
        if obs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite observation".into()));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        obs.sort_by(|a, b| a.total_cmp(b));
        Ok(KdeModel {
            obs,
            bandwidth,
            limits: IntegrationLimits::Displayed,
        })
    }

    pub fn from_sample(sample: &Sample, bandwidth: f64) -> Result<Self> {
        Self::new(sample.obs.clone(), bandwidth)
    }

    pub fn with_limits(mut self, limits: IntegrationLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn limits(&self) -> IntegrationLimits {
        self.limits
    }

    pub fn observations(&self) -> &[f64] {
        &self.obs
    }

    fn min(&self) -> f64 {
        self.obs[0]
    }

    fn max(&self) -> f64 {
        self.obs[self.obs.len() - 1]
    }

    pub fn lower_limit(&self) -> f64 {
        match self.limits {
            IntegrationLimits::Displayed => 0.0,
            IntegrationLimits::SampleRange => self.min(),
        }
    }

    /// Upper end of `S_n`; infinite for displayed limits.
    pub fn upper_limit(&self) -> f64 {
        match self.limits {
            IntegrationLimits::Displayed => f64::INFINITY,
            IntegrationLimits::SampleRange => self.max(),
        }
    }

    /// Finite upper end used when integrating `f_n²`.
    fn square_upper_limit(&self) -> f64 {
        match self.limits {
            IntegrationLimits::Displayed => self.max() + TAIL_BANDWIDTHS * self.bandwidth,
            IntegrationLimits::SampleRange => self.max(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let lo = self.obs.partition_point(|&v| v < x - KERNEL_REACH * h);
        let hi = self.obs.partition_point(|&v| v <= x + KERNEL_REACH * h);
        let sum: f64 = self.obs[lo..hi]
            .iter()
            .map(|&xi| std_normal_pdf((x - xi) / h))
            .sum();
        sum / (self.obs.len() as f64 * h)
    }

    /// `∫_a^b f_n` in closed form.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let h = self.bandwidth;
        let total: f64 = self
            .obs
            .iter()
            .map(|&xi| normal_mass((a - xi) / h, (b - xi) / h))
            .sum();
        total / self.obs.len() as f64
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.mass(self.lower_limit(), t)
    }

    pub fn survival(&self, t: f64) -> f64 {
        self.mass(t, self.upper_limit())
    }

    pub fn eval(&self, t: f64, which: KdeCurve) -> f64 {
        match which {
            KdeCurve::Pdf => self.pdf(t),
            KdeCurve::Cdf => self.cdf(t),
            KdeCurve::Survival => self.survival(t),
        }
    }

    fn integrate_square(&self, a: f64, b: f64, scale: f64) -> Result<f64> {
        if !(b > a) {
            return Ok(0.0);
        }
        let panels = (((b - a) / (0.5 * self.bandwidth)).ceil() as usize).clamp(4, 20_000);
        Simpson::new()
            .tolerance(Tolerance::DEFAULT)
            .panels(panels)
            .integrate(|u| (self.pdf(u) / scale).powi(2), a, b)
    }

    /// Plug-in residual extropy `-1/2 ∫_t^U (f_n / S_n(t))²`.
    pub fn estimate_rex(&self, t: f64) -> Result<f64> {
        let s = self.survival(t);
        if !(s > MIN_MASS) {
            return Err(Error::Vanishing {
                curve: Curve::Survival,
                t,
            });
        }
        Ok(-0.5 * self.integrate_square(t, self.square_upper_limit(), s)?)
    }

    /// Plug-in past extropy `-1/2 ∫_L^t (f_n / F_n(t))²`.
    pub fn estimate_pex(&self, t: f64) -> Result<f64> {
        let c = self.cdf(t);
        if !(c > MIN_MASS) {
            return Err(Error::Vanishing {
                curve: Curve::Cdf,
                t,
            });
        }
        Ok(-0.5 * self.integrate_square(self.lower_limit(), t, c)?)
    }

    pub fn estimate(&self, kind: CurveKind, t: f64) -> Result<f64> {
        match kind {
            CurveKind::Residual => self.estimate_rex(t),
            CurveKind::Past => self.estimate_pex(t),
        }
    }
}

pub fn estimate_rex(sample: &Sample, h: f64, t: f64, limits: IntegrationLimits) -> Result<f64> {
    KdeModel::from_sample(sample, h)?
        .with_limits(limits)
        .estimate_rex(t)
}

pub fn estimate_pex(sample: &Sample, h: f64, t: f64, limits: IntegrationLimits) -> Result<f64> {
    KdeModel::from_sample(sample, h)?
        .with_limits(limits)
        .estimate_pex(t)
}

/// Leading-order bias and variance of `f_n(u)` and `S_n(u)` for a
/// second-order kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdeApproximation {
    pub bias_f: f64,
    pub var_f: f64,
    pub bias_s: f64,
    pub var_s: f64,
}

/// Step for the density derivatives in [`kde_bias_variance`].
const DERIVATIVE_STEP: f64 = 1e-3;

/// `bias f_n ≈ h²/2 f''(u)`, `var f_n ≈ C_k f(u) / (n h)`,
/// `bias S_n ≈ h²/2 ∫_u^∞ f'' = -h²/2 f'(u)`, `var S_n ≈ C_k S(u) / (n h)`.
/// Derivatives are central differences.
pub fn kde_bias_variance(d: &Distribution, h: f64, n: usize, u: f64) -> Result<KdeApproximation> {
    if !(h > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need h > 0 and n >= 1, got h = {h}, n = {n}"
        )));
    }
    let dx = DERIVATIVE_STEP;
    let (fm, f0, fp) = (d.pdf(u - dx), d.pdf(u), d.pdf(u + dx));
    let second = (fp - 2.0 * f0 + fm) / (dx * dx);
    let first = (fp - fm) / (2.0 * dx);
    let nh = n as f64 * h;
    Ok(KdeApproximation {
        bias_f: 0.5 * h * h * second,
        var_f: KERNEL_ROUGHNESS * f0 / nh,
        bias_s: -0.5 * h * h * first,
        var_s: KERNEL_ROUGHNESS * d.survival(u) / nh,
    })
}

/// Asymptotic variance of `√(n h) (J_n - J)`:
///
/// ```text
/// rex: C_k / S⁴ [∫_t^∞ f³ + (∫_t^∞ f²)² / S]
/// pex: C_k / F⁴ [∫_0^t f³ + (∫_0^t f²)² / F]
/// ```
pub fn asymptotic_variance(d: &Distribution, t: f64, kind: CurveKind) -> Result<f64> {
    let (lo, hi) = d.support();
    let (norm, a, b) = match kind {
        CurveKind::Residual => {
            let s = d.survival(t);
            if !(s > 0.0) {
                return Err(Error::Vanishing {
                    curve: Curve::Survival,
                    t,
                });
            }
            let upper = if hi.is_finite() { hi } else { d.tail_limit(t) };
            (s, t.max(lo), upper)
        }
        CurveKind::Past => {
            let c = d.cdf(t);
            if !(c > 0.0) {
                return Err(Error::Vanishing {
                    curve: Curve::Cdf,
                    t,
                });
            }
            let upper = t.min(hi);
            (c, lo, upper)
        }
    };
    let quad = Simpson::new().breaks(d.breakpoints());
    // work with f / norm to keep magnitudes O(1)
    let cube = quad.integrate(|u| (d.pdf(u) / norm).powi(3), a, b)?;
    let square = quad.integrate(|u| (d.pdf(u) / norm).powi(2), a, b)?;
    Ok(KERNEL_ROUGHNESS / norm * (cube + square * square))
}

/// Exponential rate MLE `1 / mean`; observations must be positive.
pub fn mle_exponential(sample: &Sample) -> Result<f64> {
    if let Some(bad) = sample.obs.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "exponential MLE needs positive observations, found {bad}"
        )));
    }
    Ok(1.0 / sample.mean())
}
