//! Lifetime distributions.
//!
//! A [`Distribution`] exposes the five evaluable curves used throughout the
//! crate: density `f`, CDF `F`, survival `S = 1 - F`, hazard `f / S` and
//! reversed hazard `f / F`. Besides the three base families there are
//! derived laws (order statistics, coherent systems, k-records, residual
//! lives) built on top of another distribution; their curves are computed
//! from the base curves on every call.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Curve, Error, Result};
use crate::order::{self, Signature};
use crate::records;

/// Survival level at which infinite supports are truncated for quadrature.
pub const TAIL_MASS: f64 = 1e-12;

/// Family tag plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Exponential {
        rate: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    /// `S(x) = 1 - x²/2` on `[0, 1)`, `2/3 - x²/6` on `[1, 2)`, `0` beyond.
    PiecewiseExample,
    OrderStatistic {
        base: Box<Distribution>,
        i: usize,
        n: usize,
    },
    System {
        base: Box<Distribution>,
        signature: Signature,
    },
    KRecord {
        base: Box<Distribution>,
        n: usize,
        k: usize,
    },
    /// Law of `X - age` given `X > age`.
    Residual {
        base: Box<Distribution>,
        age: f64,
    },
}

/// Immutable lifetime law. Construct through the validated constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    family: Family,
}

impl Distribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponential rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self {
            family: Family::Exponential { rate },
        })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "uniform bounds need a < b (finite), got a = {a}, b = {b}"
            )));
        }
        Ok(Self {
            family: Family::Uniform { a, b },
        })
    }

    pub fn piecewise_example() -> Self {
        Self {
            family: Family::PiecewiseExample,
        }
    }

    pub(crate) fn from_family(family: Family) -> Self {
        Self { family }
    }

    /// Residual life `X_s = [X - s | X > s]`.
    pub fn residual(&self, age: f64) -> Result<Self> {
        let s = self.survival(age);
        if !(age >= 0.0) || s <= 0.0 {
            return Err(Error::Vanishing {
                curve: Curve::Survival,
                t: age,
            });
        }
        Ok(Self {
            family: Family::Residual {
                base: Box::new(self.clone()),
                age,
            },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Support `[lower, upper)`; `upper` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match &self.family {
            Family::Exponential { .. } => (0.0, f64::INFINITY),
            Family::Uniform { a, b } => (*a, *b),
            Family::PiecewiseExample => (0.0, 2.0),
            Family::OrderStatistic { base, .. }
            | Family::System { base, .. }
            | Family::KRecord { base, .. } => base.support(),
            Family::Residual { base, age } => {
                let (_, hi) = base.support();
                (0.0, hi - age)
            }
        }
    }

    /// Points inside the support where the density is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.family {
            Family::Exponential { .. } | Family::Uniform { .. } => Vec::new(),
            Family::PiecewiseExample => vec![1.0],
            Family::OrderStatistic { base, .. }
            | Family::System { base, .. }
            | Family::KRecord { base, .. } => base.breakpoints(),
            Family::Residual { base, age } => base
                .breakpoints()
                .into_iter()
                .map(|x| x - age)
                .filter(|&x| x > 0.0)
                .collect(),
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t < lo || t >= hi || t.is_nan() {
            return 0.0;
        }
        match &self.family {
            Family::Exponential { rate } => rate * (-rate * t).exp(),
            Family::Uniform { a, b } => 1.0 / (b - a),
            Family::PiecewiseExample => {
                if t < 1.0 {
                    t
                } else {
                    t / 3.0
                }
            }
            Family::OrderStatistic { base, i, n } => {
                order::order_statistic_pdf(base.cdf(t), base.survival(t), base.pdf(t), *i, *n)
            }
            Family::System { base, signature } => {
                let (f, s, d) = (base.cdf(t), base.survival(t), base.pdf(t));
                signature
                    .iter()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(i, w)| w * order::order_statistic_pdf(f, s, d, i, signature.len()))
                    .sum()
            }
            Family::KRecord { base, n, k } => {
                records::record_pdf(base.survival(t), base.pdf(t), *n, *k)
            }
            Family::Residual { base, age } => base.pdf(t + age) / base.survival(*age),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            return 0.0;
        }
        if t >= hi {
            return 1.0;
        }
        match &self.family {
            Family::Exponential { rate } => -(-rate * t).exp_m1(),
            Family::Uniform { a, b } => (t - a) / (b - a),
            Family::PiecewiseExample => {
                if t < 1.0 {
                    t * t / 2.0
                } else {
                    1.0 / 3.0 + t * t / 6.0
                }
            }
            Family::OrderStatistic { base, i, n } => {
                order::order_statistic_cdf(base.cdf(t), base.survival(t), *i, *n)
            }
            Family::System { base, signature } => {
                let (f, s) = (base.cdf(t), base.survival(t));
                signature
                    .iter()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(i, w)| w * order::order_statistic_cdf(f, s, i, signature.len()))
                    .sum()
            }
            Family::KRecord { .. } => 1.0 - self.survival(t),
            Family::Residual { base, age } => {
                let s0 = base.survival(*age);
                (s0 - base.survival(t + age)) / s0
            }
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            return 1.0;
        }
        if t >= hi {
            return 0.0;
        }
        match &self.family {
            Family::Exponential { rate } => (-rate * t).exp(),
            Family::Uniform { a, b } => (b - t) / (b - a),
            Family::PiecewiseExample => {
                if t < 1.0 {
                    1.0 - t * t / 2.0
                } else {
                    2.0 / 3.0 - t * t / 6.0
                }
            }
            Family::OrderStatistic { base, i, n } => {
                order::order_statistic_survival(base.cdf(t), base.survival(t), *i, *n)
            }
            Family::System { base, signature } => {
                let (f, s) = (base.cdf(t), base.survival(t));
                signature
                    .iter()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(i, w)| w * order::order_statistic_survival(f, s, i, signature.len()))
                    .sum()
            }
            Family::KRecord { base, n, k } => records::record_survival(base.survival(t), *n, *k),
            Family::Residual { base, age } => base.survival(t + age) / base.survival(*age),
        }
    }

    /// `f(t) / S(t)`; a vanishing survival is a domain error.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        let s = self.survival(t);
        if !(s > 0.0) {
            return Err(Error::Vanishing {
                curve: Curve::Survival,
                t,
            });
        }
        Ok(self.pdf(t) / s)
    }

    /// `f(t) / F(t)`; a vanishing CDF is a domain error.
    pub fn reversed_hazard(&self, t: f64) -> Result<f64> {
        let c = self.cdf(t);
        if !(c > 0.0) {
            return Err(Error::Vanishing {
                curve: Curve::Cdf,
                t,
            });
        }
        Ok(self.pdf(t) / c)
    }

    /// Inverse CDF on `[0, 1)`; `p = 1` is accepted for bounded supports.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if !(0.0..=1.0).contains(&p) || (p == 1.0 && hi.is_infinite()) {
            return Err(Error::InvalidParameter(format!(
                "quantile level must lie in [0, 1), got {p}"
            )));
        }
        if p == 0.0 {
            return Ok(lo);
        }
        if p == 1.0 {
            return Ok(hi);
        }
        match &self.family {
            Family::Exponential { rate } => Ok(-(-p).ln_1p() / rate),
            Family::Uniform { a, b } => Ok(a + p * (b - a)),
            Family::PiecewiseExample => {
                if p <= 0.5 {
                    Ok((2.0 * p).sqrt())
                } else {
                    Ok((6.0 * p - 2.0).sqrt())
                }
            }
            _ => {
                if p <= 0.5 {
                    Ok(self.bisect(|x| self.cdf(x) < p))
                } else {
                    Ok(self.inverse_survival(1.0 - p))
                }
            }
        }
    }

    /// Smallest `t` with `S(t) <= q`, for `q` in `(0, 1]`.
    pub fn inverse_survival(&self, q: f64) -> f64 {
        let (lo, hi) = self.support();
        if q >= 1.0 {
            return lo;
        }
        if q <= 0.0 {
            return hi;
        }
        match &self.family {
            Family::Exponential { rate } => -q.ln() / rate,
            Family::Uniform { a, b } => b - q * (b - a),
            Family::PiecewiseExample => {
                if q >= 0.5 {
                    (2.0 * (1.0 - q)).sqrt()
                } else {
                    (4.0 - 6.0 * q).sqrt()
                }
            }
            _ => self.bisect(|x| self.survival(x) > q),
        }
    }

    /// Largest point of the support where `below(x)` still holds, found by
    /// bracketing then bisection. `below` must be monotone (true then false).
    fn bisect<P: Fn(f64) -> bool>(&self, below: P) -> f64 {
        let (mut lo, hi) = self.support();
        let mut hi = if hi.is_finite() {
            hi
        } else {
            let mut x = lo + 1.0;
            while below(x) {
                lo = x;
                x = lo + 2.0 * (x - self.support().0).max(1.0);
            }
            x
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Upper end used for integrals over the support. Infinite supports are
    /// cut where the underlying base law leaves `TAIL_MASS` of survival.
    pub fn integration_upper(&self) -> f64 {
        let (_, hi) = self.support();
        if hi.is_finite() {
            return hi;
        }
        match &self.family {
            Family::OrderStatistic { base, .. }
            | Family::System { base, .. }
            | Family::KRecord { base, .. } => base.integration_upper(),
            Family::Residual { base, age } => base.integration_upper() - age,
            _ => self.inverse_survival(TAIL_MASS),
        }
    }

    /// Upper limit for an integral of `(f / S(t))^2` over `[t, upper)`: the
    /// default truncation, pushed further out when `S(t)` is itself so small
    /// that the truncated tail is no longer negligible relative to it.
    pub(crate) fn tail_limit(&self, t: f64) -> f64 {
        let upper = self.integration_upper();
        let (_, hi) = self.support();
        if hi.is_finite() {
            return upper;
        }
        let st = self.survival(t);
        if self.survival(upper) <= TAIL_MASS * st {
            upper
        } else {
            self.inverse_survival(TAIL_MASS * st).max(upper)
        }
    }

    /// `n` i.i.d. draws by inverse-CDF sampling from a ChaCha8 stream seeded
    /// with `seed`, in draw order.
    pub fn sample_iid(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                self.quantile(u).expect("uniform draws lie in [0, 1)")
            })
            .collect()
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Exponential { rate } => write!(f, "exp:{rate}"),
            Family::Uniform { a, b } => write!(f, "unif:{a}:{b}"),
            Family::PiecewiseExample => write!(f, "example1"),
            Family::OrderStatistic { base, i, n } => write!(f, "order({base}, {i}:{n})"),
            Family::System { base, signature } => write!(f, "system({base}, {signature})"),
            Family::KRecord { base, n, k } => write!(f, "record({base}, n={n}, k={k})"),
            Family::Residual { base, age } => write!(f, "residual({base}, age={age})"),
        }
    }
}

/// Parses `exp:RATE`, `unif:A:B` and `example1`.
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{x}` is not a number in distribution `{s}`")))
        };
        match parts.as_slice() {
            ["exp", rate] => Distribution::exponential(num(rate)?),
            ["unif", a, b] => Distribution::uniform(num(a)?, num(b)?),
            ["example1"] => Ok(Distribution::piecewise_example()),
            _ => Err(Error::Parse(format!(
                "unknown distribution `{s}` (expected exp:RATE, unif:A:B or example1)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn families() -> Vec<Distribution> {
        vec![
            Distribution::exponential(1.0).unwrap(),
            Distribution::exponential(0.32).unwrap(),
            Distribution::uniform(0.0, 1.0).unwrap(),
            Distribution::uniform(0.0, 2.0).unwrap(),
            Distribution::piecewise_example(),
        ]
    }

    #[test]
    fn constructor_examples() {
        let e1 = Distribution::exponential(1.0).unwrap();
        assert_eq!(e1.pdf(0.0), 1.0);
        let e = Distribution::exponential(0.32).unwrap();
        assert_abs_diff_eq!(e.survival(1.0), (-0.32f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(e.survival(1.0), 0.72615, epsilon = 1e-5);
        let e2 = Distribution::exponential(2.0).unwrap();
        assert_abs_diff_eq!(e2.quantile(0.5).unwrap(), 0.34657, epsilon = 1e-5);

        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.cdf(0.5), 0.5);
        assert_eq!(u.survival(0.25), 0.75);
        let u2 = Distribution::uniform(0.0, 2.0).unwrap();
        assert_eq!(u2.quantile(0.25).unwrap(), 0.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Distribution::exponential(0.0).is_err());
        assert!(Distribution::exponential(-1.0).is_err());
        assert!(Distribution::uniform(1.0, 1.0).is_err());
        assert!(Distribution::uniform(2.0, 1.0).is_err());
    }

    #[test]
    fn piecewise_example_values() {
        let d = Distribution::piecewise_example();
        assert_abs_diff_eq!(d.survival(1.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.survival(1.0 - 1e-12), 0.5, epsilon = 1e-11);
        assert_abs_diff_eq!(d.pdf(1.5), 0.5, epsilon = 1e-15);
        assert_eq!(d.survival(2.0), 0.0);
        assert_eq!(d.survival(3.0), 0.0);
        assert_abs_diff_eq!(d.hazard(0.5).unwrap(), 0.5 / 0.875, epsilon = 1e-15);
        assert_abs_diff_eq!(d.hazard(0.5).unwrap(), 0.57143, epsilon = 1e-5);
        let mut prev = 1.0;
        for k in 0..=400 {
            let s = d.survival(k as f64 * 0.005);
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn hazard_examples_and_domain_errors() {
        let e = Distribution::exponential(2.0).unwrap();
        for t in [0.0, 0.3, 1.7, 5.0] {
            assert_abs_diff_eq!(e.hazard(t).unwrap(), 2.0, epsilon = 1e-12);
        }
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(u.reversed_hazard(0.5).unwrap(), 2.0, epsilon = 1e-15);
        let d = Distribution::piecewise_example();
        assert_eq!(
            d.hazard(2.0),
            Err(Error::Vanishing {
                curve: Curve::Survival,
                t: 2.0
            })
        );
        assert!(matches!(
            u.reversed_hazard(0.0),
            Err(Error::Vanishing {
                curve: Curve::Cdf,
                ..
            })
        ));
    }

    #[test]
    fn curve_identities_on_grid() {
        for d in families() {
            let (lo, _) = d.support();
            let hi = d.integration_upper().min(5.0);
            for k in 1..50 {
                let t = lo + (hi - lo) * k as f64 / 50.0;
                assert_abs_diff_eq!(d.cdf(t) + d.survival(t), 1.0, epsilon = 1e-12);
                let f = d.pdf(t);
                assert!(f >= 0.0);
                if d.survival(t) > 0.0 {
                    assert_abs_diff_eq!(d.hazard(t).unwrap() * d.survival(t), f, epsilon = 1e-10);
                }
                assert_abs_diff_eq!(d.reversed_hazard(t).unwrap() * d.cdf(t), f, epsilon = 1e-10);
                let q = d.quantile(d.cdf(t)).unwrap();
                assert_abs_diff_eq!(q, t, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn cdf_matches_integrated_density() {
        use crate::quadrature::Simpson;
        for d in families() {
            let (lo, _) = d.support();
            let hi = d.integration_upper().min(5.0);
            for k in 1..=10 {
                let t = lo + (hi - lo) * k as f64 / 10.0;
                let int = Simpson::new()
                    .breaks(d.breakpoints())
                    .integrate(|x| d.pdf(x), lo, t)
                    .unwrap();
                assert_abs_diff_eq!(int, d.cdf(t), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_in_support() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.sample_iid(3, 7), u.sample_iid(3, 7));
        assert_ne!(u.sample_iid(3, 7), u.sample_iid(3, 8));
        for d in families() {
            let (lo, hi) = d.support();
            let x = d.sample_iid(1, 42)[0];
            assert!(x >= lo && x < hi);
        }
    }

    #[test]
    fn exponential_sampler_mean_and_ks_distance() {
        let d = Distribution::exponential(1.0).unwrap();
        let mut x = d.sample_iid(100_000, 1);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
        x.sort_by(|a, b| a.total_cmp(b));
        let n = x.len() as f64;
        let ks = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let c = d.cdf(v);
                (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "ks {ks}");
    }

    #[test]
    fn residual_life_survival() {
        let d = Distribution::piecewise_example();
        let r = d.residual(0.3).unwrap();
        assert_abs_diff_eq!(
            r.survival(0.4),
            d.survival(0.7) / d.survival(0.3),
            epsilon = 1e-15
        );
        assert_eq!(r.support(), (0.0, 1.7));
        assert_eq!(r.breakpoints(), vec![0.7]);
        assert!(d.residual(2.0).is_err());
    }

    #[test]
    fn parses_cli_grammar() {
        assert_eq!(
            "exp:0.32".parse::<Distribution>().unwrap(),
            Distribution::exponential(0.32).unwrap()
        );
        assert_eq!(
            "unif:0:2".parse::<Distribution>().unwrap(),
            Distribution::uniform(0.0, 2.0).unwrap()
        );
        assert_eq!(
            "example1".parse::<Distribution>().unwrap(),
            Distribution::piecewise_example()
        );
        assert!("exp:-1".parse::<Distribution>().is_err());
        assert!("gamma:2".parse::<Distribution>().is_err());
        assert!("exp:x".parse::<Distribution>().is_err());
    }
}
