//! Extropy, residual extropy (REX) and past extropy (PEX) of a lifetime law.
//!
//! ```text
//! J(X)      = -1/2 ∫ f²(x) dx
//! J(X; t)   = -1/2 ∫_t^∞ (f(u) / S(t))² du      residual life at age t
//! J̃(X; t)   = -1/2 ∫_0^t (f(u) / F(t))² du      inactivity time at t
//! ```
//!
//! Both dynamic measures also have hazard-weighted forms built from the
//! minimum `X_{1:2}` and maximum `X_{2:2}` of two copies, and REX obeys
//! `J'(t) = 2 λ(t) J(t) + λ(t)² / 2`, which lets the hazard be recovered
//! from a REX curve and its slope.

use std::fmt;
use std::str::FromStr;

use crate::distributions::Distribution;
use crate::error::{Curve, Error, Result};
use crate::order::order_statistic_distribution;
use crate::quadrature::Simpson;

/// Default tolerance for classifying analytic curves.
pub const DEFAULT_MONOTONE_TOL: f64 = 1e-9;

/// Default number of grid points for a curve sweep.
pub const DEFAULT_GRID_POINTS: usize = 200;

/// Step used for central-difference slopes of a REX curve.
pub const SLOPE_STEP: f64 = 1e-4;

/// Relative size below which a negative discriminant is read as zero.
const DOUBLE_ROOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    NonMonotone,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Constant => "constant",
            Monotonicity::Increasing => "increasing",
            Monotonicity::Decreasing => "decreasing",
            Monotonicity::NonMonotone => "non-monotone",
        })
    }
}

/// `constant` if the spread is within `tol`; `decreasing` / `increasing`
/// if every successive step is `<= tol` / `>= -tol`; otherwise
/// `non-monotone`.
pub fn classify_monotonicity(values: &[f64], tol: f64) -> Result<Monotonicity> {
    if values.len() < 3 {
        return Err(Error::TooFewValues {
            needed: 3,
            got: values.len(),
        });
    }
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if max - min <= tol {
        return Ok(Monotonicity::Constant);
    }
    let steps = || values.windows(2).map(|w| w[1] - w[0]);
    if steps().all(|d| d <= tol) {
        Ok(Monotonicity::Decreasing)
    } else if steps().all(|d| d >= -tol) {
        Ok(Monotonicity::Increasing)
    } else {
        Ok(Monotonicity::NonMonotone)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Residual,
    Past,
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rex" | "residual" => Ok(CurveKind::Residual),
            "pex" | "past" => Ok(CurveKind::Past),
            other => Err(Error::Parse(format!(
                "unknown curve kind `{other}` (expected rex or pex)"
            ))),
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Residual => "rex",
            CurveKind::Past => "pex",
        })
    }
}

/// Sampled REX or PEX curve with its monotonicity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtropyCurve {
    pub kind: CurveKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub classification: Monotonicity,
}

/// Right end of a bounded support pulled in slightly, so integrands see the
/// left limit of a density that jumps to zero at the end of its support.
fn quadrature(d: &Distribution) -> Simpson {
    Simpson::new().breaks(d.breakpoints())
}

fn upper_limit(d: &Distribution, t: f64) -> f64 {
    let (_, hi) = d.support();
    if hi.is_finite() {
        hi
    } else {
        d.tail_limit(t)
    }
}

/// `-1/2 ∫ f²` over the whole support.
pub fn extropy(d: &Distribution) -> Result<f64> {
    let (lo, _) = d.support();
    let upper = upper_limit(d, lo);
    let int = quadrature(d).integrate(|u| d.pdf(u).powi(2), lo, upper)?;
    Ok(-0.5 * int)
}

fn survival_at(d: &Distribution, t: f64) -> Result<f64> {
    let s = d.survival(t);
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::Vanishing {
            curve: Curve::Survival,
            t,
        })
    }
}

fn cdf_at(d: &Distribution, t: f64) -> Result<f64> {
    let c = d.cdf(t);
    if c > 0.0 {
        Ok(c)
    } else {
        Err(Error::Vanishing {
            curve: Curve::Cdf,
            t,
        })
    }
}

/// Residual extropy `J(X; t)`.
pub fn residual_extropy(d: &Distribution, t: f64) -> Result<f64> {
    let st = survival_at(d, t)?;
    let lo = t.max(d.support().0);
    let upper = upper_limit(d, t);
    let int = quadrature(d).integrate(|u| (d.pdf(u) / st).powi(2), lo, upper)?;
    Ok(-0.5 * int)
}

/// Past extropy `J̃(X; t)`.
pub fn past_extropy(d: &Distribution, t: f64) -> Result<f64> {
    let ft = cdf_at(d, t)?;
    let (lo, hi) = d.support();
    let upper = t.min(hi);
    let int = quadrature(d).integrate(|u| (d.pdf(u) / ft).powi(2), lo, upper)?;
    Ok(-0.5 * int)
}

/// REX as `-1/4 E[λ(X_{1:2}) | X_{1:2} > t]`.
pub fn residual_extropy_hazard_form(d: &Distribution, t: f64) -> Result<f64> {
    survival_at(d, t)?;
    let min2 = order_statistic_distribution(d, 1, 2)?;
    let s12 = min2.survival(t);
    let lo = t.max(d.support().0);
    let upper = upper_limit(d, t);
    let int = quadrature(d).integrate(
        |u| {
            let w = min2.pdf(u) / s12;
            match d.hazard(u) {
                Ok(l) => l * w,
                // λ · f_{1:2} = 2 f², its limit where S vanishes
                Err(_) => 2.0 * d.pdf(u).powi(2) / s12,
            }
        },
        lo,
        upper,
    )?;
    Ok(-0.25 * int)
}

/// PEX as `-1/4 E[τ(X_{2:2}) | X_{2:2} <= t]`, integrated over `[0, t]`.
pub fn past_extropy_reversed_form(d: &Distribution, t: f64) -> Result<f64> {
    cdf_at(d, t)?;
    let max2 = order_statistic_distribution(d, 2, 2)?;
    let f22 = max2.cdf(t);
    let (lo, hi) = d.support();
    let upper = t.min(hi);
    let int = quadrature(d).integrate(
        |u| {
            let w = max2.pdf(u) / f22;
            match d.reversed_hazard(u) {
                Ok(r) => r * w,
                // τ · f_{2:2} = 2 f², its limit where F vanishes
                Err(_) => 2.0 * d.pdf(u).powi(2) / f22,
            }
        },
        lo,
        upper,
    )?;
    Ok(-0.25 * int)
}

/// `count` equally spaced points over `[from, to]`.
pub fn uniform_grid(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..count)
            .map(|k| from + (to - from) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

pub fn extropy_curve(d: &Distribution, kind: CurveKind, grid: &[f64]) -> Result<ExtropyCurve> {
    extropy_curve_with_tol(d, kind, grid, DEFAULT_MONOTONE_TOL)
}

pub fn extropy_curve_with_tol(
    d: &Distribution,
    kind: CurveKind,
    grid: &[f64],
    tol: f64,
) -> Result<ExtropyCurve> {
    if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!(
            "grid must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    let values = grid
        .iter()
        .map(|&t| {
            match kind {
                CurveKind::Residual => residual_extropy(d, t),
                CurveKind::Past => past_extropy(d, t),
            }
            .map_err(|e| e.at(t))
        })
        .collect::<Result<Vec<_>>>()?;
    let classification = classify_monotonicity(&values, tol)?;
    Ok(ExtropyCurve {
        kind,
        grid: grid.to_vec(),
        values,
        classification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCheck {
    /// REX of the residual life `X_s` at `t`.
    pub left: f64,
    /// REX of `X` at `s + t`.
    pub right: f64,
    pub diff: f64,
}

/// Evaluates both sides of `J(X_s; t) = J(X; s + t)`.
pub fn shift_residual_check(d: &Distribution, s: f64, t: f64) -> Result<ShiftCheck> {
    survival_at(d, s + t)?;
    let left = residual_extropy(&d.residual(s)?, t)?;
    let right = residual_extropy(d, s + t)?;
    Ok(ShiftCheck {
        left,
        right,
        diff: (left - right).abs(),
    })
}

/// Central-difference slope of the REX curve at `t`.
pub fn residual_extropy_slope(d: &Distribution, t: f64, step: f64) -> Result<f64> {
    let up = residual_extropy(d, t + step)?;
    let down = residual_extropy(d, t - step)?;
    Ok((up - down) / (2.0 * step))
}

/// Both roots of `x²/2 + 2 J x - J' = 0`, smaller first. The hazard at `t`
/// is one of them.
pub fn hazard_roots(j: f64, j_prime: f64) -> Result<(f64, f64)> {
    if !(j < 0.0) || !j_prime.is_finite() {
        return Err(Error::Inconsistent(format!(
            "REX value must be negative and its slope finite, got J = {j}, J' = {j_prime}"
        )));
    }
    let mut disc = 4.0 * j * j + 2.0 * j_prime;
    // a double root (uniform laws) comes out slightly negative from a
    // finite-difference slope
    if disc < 0.0 && -disc <= DOUBLE_ROOT_TOL * (4.0 * j * j + 2.0 * j_prime.abs()) {
        disc = 0.0;
    }
    if disc < 0.0 {
        return Err(Error::Inconsistent(format!(
            "negative discriminant {disc} for J = {j}, J' = {j_prime}"
        )));
    }
    Ok((-2.0 * j - disc.sqrt(), -2.0 * j + disc.sqrt()))
}

/// Hazard rate recovered from a REX value and its slope.
///
/// For `J' >= 0` the quadratic has exactly one positive root. For `J' < 0`
/// both roots are positive, either can be the hazard depending on the law,
/// and the call fails; use [`hazard_roots`] there.
pub fn hazard_from_rex(j: f64, j_prime: f64) -> Result<f64> {
    let (lower, upper) = hazard_roots(j, j_prime)?;
    if lower > 0.0 {
        return Err(Error::Inconsistent(format!(
            "J' = {j_prime} < 0 leaves two positive roots {lower} and {upper}"
        )));
    }
    Ok(upper)
}
