//! COVID-19 infected-case percentages for 40 countries (up to 26 March
//! 2020) and the REX comparison built on them.

use crate::distributions::Distribution;
use crate::error::Result;
use crate::functionals::residual_extropy;
use crate::kde::{mle_exponential, IntegrationLimits, KdeModel, Sample};

/// Values in their source order.
pub const COVID_PERCENTAGES: [f64; 40] = [
    1.56, 8.51, 2.17, 0.37, 1.09, 9.84, 4.95, 3.18, 11.37, 2.81, 6.22, 1.87, 9.05, 2.44, 1.38,
    4.17, 3.74, 1.37, 2.33, 7.80, 2.10, 0.47, 2.54, 4.92, 0.09, 0.18, 1.72, 1.02, 0.62, 2.34, 0.50,
    2.37, 3.65, 0.59, 5.76, 2.14, 0.88, 0.95, 4.17, 2.25,
];

pub const DEFAULT_T: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const DEFAULT_H: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

pub fn covid_sample() -> Sample {
    Sample::new(COVID_PERCENTAGES.to_vec()).expect("embedded data is valid")
}

/// Exponential fit as reported: the MLE and its two-decimal rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub rate: f64,
    pub reported_rate: f64,
}

impl ExponentialFit {
    pub fn of(sample: &Sample) -> Result<Self> {
        let rate = mle_exponential(sample)?;
        Ok(ExponentialFit {
            rate,
            reported_rate: (rate * 100.0).round() / 100.0,
        })
    }

    /// REX of the fitted law at the reported rate, `-reported_rate / 4`.
    pub fn theoretical_rex(&self, t: f64) -> Result<f64> {
        residual_extropy(&Distribution::exponential(self.reported_rate)?, t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    pub h: f64,
    pub theoretical: f64,
    pub estimate: Result<f64>,
}

impl ComparisonRow {
    pub const CSV_HEADER: &'static str = "t,h,theoretical,estimate";

    pub fn csv_line(&self) -> String {
        let est = match &self.estimate {
            Ok(v) => format!("{v:.6}"),
            Err(_) => "NaN".to_string(),
        };
        format!(
            "{:.6},{:.6},{:.6},{}",
            self.t, self.h, self.theoretical, est
        )
    }
}

/// One row per `(t, h)`, t-major. Estimates use sample-range limits.
pub fn rex_comparison(
    sample: &Sample,
    ts: &[f64],
    hs: &[f64],
) -> Result<(ExponentialFit, Vec<ComparisonRow>)> {
    let fit = ExponentialFit::of(sample)?;
    let mut rows = Vec::with_capacity(ts.len() * hs.len());
    for &t in ts {
        let theoretical = fit.theoretical_rex(t)?;
        for &h in hs {
            let estimate = KdeModel::from_sample(sample, h).and_then(|m| {
                m.with_limits(IntegrationLimits::SampleRange)
                    .estimate_rex(t)
            });
            rows.push(ComparisonRow {
                t,
                h,
                theoretical,
                estimate,
            });
        }
    }
    Ok((fit, rows))
}
