//! n-th upper k-record values `U_{n(k)}`.
//!
//! With `φ(t) = -ln S(t)` the record law is
//!
//! ```text
//! f_{n(k)}(x) = kⁿ / Γ(n) · S^{k-1}(x) · φ^{n-1}(x) · f(x)
//! S_{n(k)}(x) = S^k(x) · Σ_{i<n} (k φ(x))^i / i!  =  Γ(n, k φ(x)) / Γ(n)
//! ```
//!
//! Only integer `n` is supported, so every incomplete gamma is a finite sum.

use crate::distributions::{Distribution, Family};
use crate::error::{Error, Result};

/// Survival is clamped to this before taking logs.
const MIN_SURVIVAL: f64 = 1e-300;

/// Largest record index accepted (keeps `(n-1)!` finite).
pub const MAX_RECORD_INDEX: usize = 170;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `Σ_{i<n} x^i / i!`
fn truncated_exp_series(x: f64, n: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for i in 0..n {
        if i > 0 {
            term *= x / i as f64;
        }
        sum += term;
    }
    sum
}

/// Upper incomplete gamma `Γ(a, x) = ∫_x^∞ u^{a-1} e^{-u} du` for positive
/// integer `a`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || a.fract() != 0.0 || a > MAX_RECORD_INDEX as f64 {
        return Err(Error::InvalidParameter(format!(
            "incomplete gamma supports integer a in 1..={MAX_RECORD_INDEX}, got {a}"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "incomplete gamma needs x >= 0, got {x}"
        )));
    }
    let n = a as usize;
    Ok(factorial(n - 1) * (-x).exp() * truncated_exp_series(x, n))
}

fn phi(survival: f64) -> f64 {
    -survival.max(MIN_SURVIVAL).ln()
}

pub(crate) fn record_survival(survival: f64, n: usize, k: usize) -> f64 {
    let kphi = k as f64 * phi(survival);
    survival.powi(k as i32) * truncated_exp_series(kphi, n)
}

pub(crate) fn record_pdf(survival: f64, density: f64, n: usize, k: usize) -> f64 {
    let kf = k as f64;
    kf.powi(n as i32) / factorial(n - 1)
        * survival.powi(k as i32 - 1)
        * phi(survival).powi(n as i32 - 1)
        * density
}

fn check_indices(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || n > MAX_RECORD_INDEX {
        return Err(Error::InvalidParameter(format!(
            "record index n must be in 1..={MAX_RECORD_INDEX} and order k >= 1, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Law of the n-th upper k-record of an i.i.d. sequence from `base`.
pub fn k_record_distribution(base: &Distribution, n: usize, k: usize) -> Result<Distribution> {
    check_indices(n, k)?;
    Ok(Distribution::from_family(Family::KRecord {
        base: Box::new(base.clone()),
        n,
        k,
    }))
}

/// Record hazard written as a multiple of the base hazard:
/// `kⁿ φ^{n-1} / (Γ(n) Σ_{i<n} (kφ)^i / i!) · λ(t)`.
pub fn record_hazard_factored(base: &Distribution, n: usize, k: usize, t: f64) -> Result<f64> {
    check_indices(n, k)?;
    let lambda = base.hazard(t)?;
    let p = phi(base.survival(t));
    let kf = k as f64;
    Ok(kf.powi(n as i32) * p.powi(n as i32 - 1)
        / (factorial(n - 1) * truncated_exp_series(kf * p, n))
        * lambda)
}

fn open_support_survival(base: &Distribution, t: f64) -> Result<f64> {
    let s = base.survival(t);
    if s > 0.0 && s < 1.0 {
        Ok(s)
    } else {
        Err(Error::Domain {
            t,
            reason: format!("base survival {s} is outside (0, 1)"),
        })
    }
}

/// `Π(t) = λ_{n(k₂)}(t) / λ_{n(k₁)}(t)
///       = (k₂/k₁)ⁿ · Σ_{i<n} (k₁φ)^i/i! / Σ_{i<n} (k₂φ)^i/i!`.
pub fn record_hazard_ratio_pi(
    base: &Distribution,
    n: usize,
    k1: usize,
    k2: usize,
    t: f64,
) -> Result<f64> {
    check_indices(n, k1)?;
    check_indices(n, k2)?;
    let p = phi(open_support_survival(base, t)?);
    let (k1, k2) = (k1 as f64, k2 as f64);
    Ok(
        (k2 / k1).powi(n as i32) * truncated_exp_series(k1 * p, n)
            / truncated_exp_series(k2 * p, n),
    )
}

/// `f_{n(k)}(t) / f(t) = kⁿ / Γ(n) · S^{k-1} φ^{n-1}`.
pub fn record_density_ratio(base: &Distribution, n: usize, k: usize, t: f64) -> Result<f64> {
    check_indices(n, k)?;
    let s = open_support_survival(base, t)?;
    let kf = k as f64;
    Ok(kf.powi(n as i32) / factorial(n - 1) * s.powi(k as i32 - 1) * phi(s).powi(n as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn exp1() -> Distribution {
        Distribution::exponential(1.0).unwrap()
    }

    #[test]
    fn incomplete_gamma_examples() {
        assert_abs_diff_eq!(
            upper_incomplete_gamma(1.0, 0.7).unwrap(),
            (-0.7f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            upper_incomplete_gamma(1.0, 0.7).unwrap(),
            0.49659,
            epsilon = 1e-5
        );
        assert_abs_diff_eq!(
            upper_incomplete_gamma(2.0, 1.0).unwrap(),
            0.73576,
            epsilon = 1e-5
        );
        assert_eq!(upper_incomplete_gamma(3.0, 0.0).unwrap(), 2.0);
        assert!(upper_incomplete_gamma(2.5, 1.0).is_err());
        assert!(upper_incomplete_gamma(2.0, -1.0).is_err());
    }

    #[test]
    fn incomplete_gamma_matches_quadrature() {
        use crate::quadrature::integrate;
        for a in 1..=5 {
            for x in [0.0, 0.5, 2.0, 6.0] {
                let oracle = integrate(|u: f64| u.powi(a - 1) * (-u).exp(), x, 80.0).unwrap();
                let v = upper_incomplete_gamma(a as f64, x).unwrap();
                assert_relative_eq!(v, oracle, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn first_record_is_the_base_law() {
        for base in [exp1(), Distribution::piecewise_example()] {
            let r = k_record_distribution(&base, 1, 1).unwrap();
            for t in [0.2, 0.7, 1.3] {
                assert_abs_diff_eq!(r.pdf(t), base.pdf(t), epsilon = 1e-15);
                assert_abs_diff_eq!(r.survival(t), base.survival(t), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn second_record_of_exponential() {
        let r = k_record_distribution(&exp1(), 2, 1).unwrap();
        assert_abs_diff_eq!(r.survival(1.0), 2.0 * (-1.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.hazard(1.0).unwrap(), 0.5, epsilon = 1e-12);
        for t in [0.1, 0.5, 2.0, 4.0] {
            assert_abs_diff_eq!(r.hazard(t).unwrap(), t / (1.0 + t), epsilon = 1e-12);
        }
        assert_eq!(r.survival(0.0), 1.0);
    }

    #[test]
    fn survival_matches_incomplete_gamma() {
        let base = Distribution::piecewise_example();
        for (n, k) in [(1, 1), (2, 1), (3, 2), (4, 3)] {
            let r = k_record_distribution(&base, n, k).unwrap();
            for t in [0.1, 0.6, 1.2, 1.8] {
                let g = upper_incomplete_gamma(n as f64, -(k as f64) * base.survival(t).ln())
                    .unwrap()
                    / factorial(n - 1);
                assert_abs_diff_eq!(r.survival(t), g, epsilon = 1e-10);
                assert_abs_diff_eq!(
                    r.hazard(t).unwrap(),
                    record_hazard_factored(&base, n, k, t).unwrap(),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn pi_examples() {
        for t in [0.1, 1.0, 3.0] {
            assert_abs_diff_eq!(
                record_hazard_ratio_pi(&exp1(), 1, 2, 1, t).unwrap(),
                0.5,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                record_hazard_ratio_pi(&exp1(), 2, 1, 1, t).unwrap(),
                1.0,
                epsilon = 1e-15
            );
            let closed = 0.25 * (1.0 + 2.0 * t) / (1.0 + t);
            assert_abs_diff_eq!(
                record_hazard_ratio_pi(&exp1(), 2, 2, 1, t).unwrap(),
                closed,
                epsilon = 1e-14
            );
        }
        assert_abs_diff_eq!(
            record_hazard_ratio_pi(&exp1(), 2, 2, 1, 1.0).unwrap(),
            0.375,
            epsilon = 1e-15
        );
        assert!(record_hazard_ratio_pi(&exp1(), 2, 2, 1, 0.0).is_err());
        let pw = Distribution::piecewise_example();
        assert!(record_hazard_ratio_pi(&pw, 2, 2, 1, 2.5).is_err());
    }

    #[test]
    fn pi_is_the_hazard_ratio() {
        let base = Distribution::piecewise_example();
        for (n, k1, k2) in [(2, 2, 1), (3, 3, 1), (3, 2, 1)] {
            let r1 = k_record_distribution(&base, n, k1).unwrap();
            let r2 = k_record_distribution(&base, n, k2).unwrap();
            for t in [0.2, 0.9, 1.5] {
                let ratio = r2.hazard(t).unwrap() / r1.hazard(t).unwrap();
                assert_abs_diff_eq!(
                    record_hazard_ratio_pi(&base, n, k1, k2, t).unwrap(),
                    ratio,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn density_ratio_is_increasing_for_k_one() {
        for n in 1..=4 {
            let v: Vec<f64> = (1..60)
                .map(|i| record_density_ratio(&exp1(), n, 1, i as f64 * 0.1).unwrap())
                .collect();
            assert!(v.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn record_pdf_integrates_to_one() {
        use crate::quadrature::integrate;
        for (n, k) in [(2, 1), (3, 2), (2, 3)] {
            let r = k_record_distribution(&exp1(), n, k).unwrap();
            let total = integrate(|x| r.pdf(x), 0.0, 80.0).unwrap();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
        }
        assert!(k_record_distribution(&exp1(), 0, 1).is_err());
        assert!(k_record_distribution(&exp1(), 1, 0).is_err());
    }
}
