//! Order statistics and coherent systems of i.i.d. components.
//!
//! A coherent system with signature `s` has lifetime law
//! `S_T = Σ s_i S_{i:n}`, so every system quantity reduces to the order
//! statistic curves below. Its hazard and reversed hazard factor through
//! the odds `x = F/S` of a component:
//!
//! ```text
//! λ_T(t) = ψ(F/S) · λ(t),    τ_T(t) = ψ̃(F/S) · τ(t)
//! ```
//!
//! with ψ and ψ̃ the rational functions returned by [`psi_rational`] and
//! [`psi_tilde_rational`].

use std::fmt;
use std::str::FromStr;

use crate::distributions::{Distribution, Family};
use crate::error::{Curve, Error, Result};
use crate::functionals::{classify_monotonicity, Monotonicity};

/// Largest component count accepted; binomials stay exact in `u64`.
pub const MAX_COMPONENTS: usize = 60;

/// Tolerance used for every monotonicity verdict in this module.
pub const VERDICT_TOL: f64 = 1e-9;

/// Exact binomial coefficient for `n <= MAX_COMPONENTS`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for j in 0..k {
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    c as u64
}

fn check_components(n: usize) -> Result<()> {
    if n == 0 || n > MAX_COMPONENTS {
        return Err(Error::InvalidParameter(format!(
            "component count must be in 1..={MAX_COMPONENTS}, got {n}"
        )));
    }
    Ok(())
}

pub(crate) fn order_statistic_cdf(f: f64, s: f64, i: usize, n: usize) -> f64 {
    (i..=n)
        .map(|k| binomial(n, k) as f64 * f.powi(k as i32) * s.powi((n - k) as i32))
        .sum()
}

pub(crate) fn order_statistic_survival(f: f64, s: f64, i: usize, n: usize) -> f64 {
    (0..i)
        .map(|k| binomial(n, k) as f64 * f.powi(k as i32) * s.powi((n - k) as i32))
        .sum()
}

pub(crate) fn order_statistic_pdf(f: f64, s: f64, density: f64, i: usize, n: usize) -> f64 {
    i as f64 * binomial(n, i) as f64 * f.powi(i as i32 - 1) * s.powi((n - i) as i32) * density
}

/// Law of the `i`-th smallest of `n` i.i.d. copies of `d`.
pub fn order_statistic_distribution(d: &Distribution, i: usize, n: usize) -> Result<Distribution> {
    check_components(n)?;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { i, n });
    }
    Ok(Distribution::from_family(Family::OrderStatistic {
        base: Box::new(d.clone()),
        i,
        n,
    }))
}

/// Lifetime law of a coherent system with i.i.d. components distributed as `d`.
pub fn system_distribution(d: &Distribution, signature: &Signature) -> Distribution {
    Distribution::from_family(Family::System {
        base: Box::new(d.clone()),
        signature: signature.clone(),
    })
}

/// Probability vector `s_i = P(T = X_{i:n})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature(Vec<f64>);

impl Signature {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_COMPONENTS {
            return Err(Error::InvalidSignature(format!(
                "length must be in 1..={MAX_COMPONENTS}, got {}",
                s.len()
            )));
        }
        if let Some(bad) = s.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidSignature(format!(
                "entries must be non-negative, found {bad}"
            )));
        }
        let total: f64 = s.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSignature(format!(
                "entries must sum to 1, sum is {total}"
            )));
        }
        Ok(Signature(s))
    }

    /// `(1, 0, ..., 0)`: fails at the first component failure.
    pub fn series(n: usize) -> Result<Self> {
        check_components(n)?;
        let mut s = vec![0.0; n];
        s[0] = 1.0;
        Signature::new(s)
    }

    /// `(0, ..., 0, 1)`: fails at the last component failure.
    pub fn parallel(n: usize) -> Result<Self> {
        check_components(n)?;
        let mut s = vec![0.0; n];
        s[n - 1] = 1.0;
        Signature::new(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `(i, s_i)` with 1-based `i`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.iter().enumerate().map(|(k, &w)| (k + 1, w))
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_non_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Comma list, e.g. `0,0,0.25,0.75`.
impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let weights = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("`{x}` is not a number in signature `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Signature::new(weights)
    }
}

/// Ratio of two polynomials with non-negative coefficients, in ascending
/// powers. Evaluated so that large `x` neither overflows nor loses the
/// leading behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn degree(c: &[f64]) -> Option<usize> {
    c.iter().rposition(|&v| v != 0.0)
}

fn lowest(c: &[f64]) -> Option<usize> {
    c.iter().position(|&v| v != 0.0)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

impl Rational {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if degree(&den).is_none() {
            return Err(Error::Vanishing {
                curve: Curve::Denominator,
                t: f64::NAN,
            });
        }
        if degree(&num).unwrap_or(0) > degree(&den).unwrap_or(0) {
            return Err(Error::InvalidParameter(
                "numerator degree exceeds denominator degree".into(),
            ));
        }
        Ok(Rational { num, den })
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    /// Limit as `x → 0+`.
    pub fn limit_at_zero(&self) -> Result<f64> {
        let d0 = lowest(&self.den).expect("denominator is non-zero");
        match lowest(&self.num) {
            None => Ok(0.0),
            Some(k) if k > d0 => Ok(0.0),
            Some(k) if k == d0 => Ok(self.num[k] / self.den[k]),
            Some(_) => Err(Error::Vanishing {
                curve: Curve::Denominator,
                t: 0.0,
            }),
        }
    }

    /// Limit as `x → ∞`: ratio of the leading coefficients.
    pub fn limit_at_infinity(&self) -> f64 {
        let d = degree(&self.den).expect("denominator is non-zero");
        self.num.get(d).copied().unwrap_or(0.0) / self.den[d]
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rational function argument must be non-negative, got {x}"
            )));
        }
        if x == 0.0 {
            return self.limit_at_zero();
        }
        if x.is_infinite() {
            return Ok(self.limit_at_infinity());
        }
        let (p, q) = if x <= 1.0 {
            (horner(&self.num, x), horner(&self.den, x))
        } else {
            // divide through by x^deg(den) and evaluate in y = 1/x
            let d = degree(&self.den).expect("denominator is non-zero");
            let y = 1.0 / x;
            let reversed =
                |c: &[f64]| (0..=d).fold(0.0, |acc, i| acc * y + c.get(i).copied().unwrap_or(0.0));
            (reversed(&self.num), reversed(&self.den))
        };
        if !(q > 0.0) {
            return Err(Error::Vanishing {
                curve: Curve::Denominator,
                t: x,
            });
        }
        Ok(p / q)
    }
}

/// ψ: `λ_T / λ = ψ(F/S)`.
pub fn psi_rational(sig: &Signature) -> Rational {
    let s = sig.as_slice();
    let n = s.len();
    let mut tail = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] + s[j];
    }
    let num = (0..n)
        .map(|i| (n - i) as f64 * s[i] * binomial(n, i) as f64)
        .collect();
    // tail[i] = s_{i+1} + ... + s_n in 1-based terms
    let den = (0..n).map(|i| tail[i] * binomial(n, i) as f64).collect();
    Rational::new(num, den).expect("a signature leaves positive mass in the constant term")
}

/// ψ̃: `τ_T / τ = ψ̃(F/S)`.
pub fn psi_tilde_rational(sig: &Signature) -> Rational {
    let s = sig.as_slice();
    let n = s.len();
    let mut num = vec![0.0; n + 1];
    let mut den = vec![0.0; n + 1];
    let mut head = 0.0;
    for i in 1..=n {
        head += s[i - 1];
        let c = binomial(n, i) as f64;
        num[i] = i as f64 * s[i - 1] * c;
        den[i] = head * c;
    }
    Rational::new(num, den).expect("a signature leaves positive mass in the leading term")
}

pub fn psi(sig: &Signature, x: f64) -> Result<f64> {
    psi_rational(sig).eval(x)
}

pub fn psi_tilde(sig: &Signature, x: f64) -> Result<f64> {
    psi_tilde_rational(sig).eval(x)
}

/// `count` log-spaced points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| {
            if count == 1 {
                lo
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// The 400-point grid over `[1e-4, 1e4]` used for rational-function verdicts.
pub fn default_odds_grid() -> Vec<f64> {
    log_grid(1e-4, 1e4, 400)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    Density,
    Hazard,
    ReversedHazard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Grid points skipped because a curve vanished there.
    pub dropped: usize,
    pub verdict: Monotonicity,
}

/// Ratio `g_Y / g_X` of density, hazard or reversed hazard over `grid`. An
/// increasing density ratio attests `X ≤_lr Y`.
pub fn check_ratio_monotone(
    dx: &Distribution,
    dy: &Distribution,
    which: RatioKind,
    grid: &[f64],
) -> Result<RatioReport> {
    let curve = |d: &Distribution, t: f64| -> Option<f64> {
        match which {
            RatioKind::Density => Some(d.pdf(t)),
            RatioKind::Hazard => d.hazard(t).ok(),
            RatioKind::ReversedHazard => d.reversed_hazard(t).ok(),
        }
    };
    let mut kept = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    let mut dropped = 0;
    for &t in grid {
        match (curve(dy, t), curve(dx, t)) {
            (Some(num), Some(den)) if den > 0.0 && num.is_finite() => {
                kept.push(t);
                values.push(num / den);
            }
            _ => dropped += 1,
        }
    }
    if kept.is_empty() {
        return Err(Error::Domain {
            t: grid.first().copied().unwrap_or(f64::NAN),
            reason: "ratio denominator vanishes at every grid point".into(),
        });
    }
    let verdict = classify_monotonicity(&values, VERDICT_TOL)?;
    Ok(RatioReport {
        grid: kept,
        values,
        dropped,
        verdict,
    })
}

/// Which preservation result the premises are checked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreservationMode {
    /// Signature non-decreasing and ψ increasing.
    Drex,
    /// Signature non-increasing and ψ̃ decreasing.
    Ipex,
}

impl FromStr for PreservationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "drex" => Ok(PreservationMode::Drex),
            "ipex" => Ok(PreservationMode::Ipex),
            other => Err(Error::Parse(format!(
                "unknown check `{other}` (expected drex or ipex)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PremiseReport {
    pub ordered: bool,
    pub rational_monotone: bool,
    /// Verdict of the rational function over the grid plus both limits.
    pub verdict: Monotonicity,
}

/// Checks the two premises of the signature preservation results on `grid`
/// (odds values `x > 0`), with the limits at `0+` and `∞` appended.
/// A constant rational function counts as monotone in the weak sense.
pub fn preservation_premises(
    sig: &Signature,
    mode: PreservationMode,
    grid: &[f64],
) -> Result<PremiseReport> {
    let (ordered, rational) = match mode {
        PreservationMode::Drex => (sig.is_non_decreasing(), psi_rational(sig)),
        PreservationMode::Ipex => (sig.is_non_increasing(), psi_tilde_rational(sig)),
    };
    let mut values = Vec::with_capacity(grid.len() + 2);
    values.push(rational.limit_at_zero()?);
    for &x in grid {
        values.push(rational.eval(x)?);
    }
    values.push(rational.limit_at_infinity());
    let verdict = classify_monotonicity(&values, VERDICT_TOL)?;
    let rational_monotone = match mode {
        PreservationMode::Drex => {
            matches!(verdict, Monotonicity::Increasing | Monotonicity::Constant)
        }
        PreservationMode::Ipex => {
            matches!(verdict, Monotonicity::Decreasing | Monotonicity::Constant)
        }
    };
    Ok(PremiseReport {
        ordered,
        rational_monotone,
        verdict,
    })
}
