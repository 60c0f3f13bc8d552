//! Adaptive Simpson quadrature.
//!
//! The interval is first cut at caller-supplied breakpoints (kinks, jumps)
//! and then into equal panels, so the adaptive refinement never has to
//! discover a non-smooth point on its own. Each panel is refined with the
//! Lyness error estimate `|S(left) + S(right) - S(whole)| / 15`.

use crate::error::{Error, Result};

/// Absolute and relative stopping tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        abs: 1e-10,
        rel: 1e-9,
    };
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

const MAX_DEPTH: u32 = 48;

/// Integration options: tolerance, breakpoints and the number of initial
/// equal panels per smooth segment.
#[derive(Debug, Clone)]
pub struct Simpson {
    pub tol: Tolerance,
    pub panels: usize,
    breaks: Vec<f64>,
}

impl Default for Simpson {
    fn default() -> Self {
        Simpson {
            tol: Tolerance::DEFAULT,
            panels: 8,
            breaks: Vec::new(),
        }
    }
}

impl Simpson {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    /// Points where the integrand is not smooth. Points outside the
    /// integration interval are ignored.
    pub fn breaks(mut self, breaks: impl IntoIterator<Item = f64>) -> Self {
        self.breaks.extend(breaks);
        self
    }

    /// Integrate `f` over `[a, b]`. Returns 0 for an empty interval and the
    /// negated integral when `b < a`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return self.integrate(f, b, a).map(|v| -v);
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "quadrature limits must be finite, got [{a}, {b}]"
            )));
        }

        let mut cuts = vec![a];
        let mut inner: Vec<f64> = self
            .breaks
            .iter()
            .copied()
            .filter(|&x| x > a && x < b)
            .collect();
        inner.sort_by(|x, y| x.total_cmp(y));
        inner.dedup();
        cuts.extend(inner);
        cuts.push(b);

        let mut panels = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let step = (hi - lo) / self.panels as f64;
            for k in 0..self.panels {
                let p_lo = lo + step * k as f64;
                let p_hi = if k + 1 == self.panels {
                    hi
                } else {
                    lo + step * (k + 1) as f64
                };
                let mid = 0.5 * (p_lo + p_hi);
                // segment ends are read from inside, so a jump sitting on a
                // breakpoint is seen as a one-sided limit
                let fa = if k == 0 { f(nudge(lo, hi)) } else { f(p_lo) };
                let fb = if k + 1 == self.panels {
                    f(nudge(hi, lo))
                } else {
                    f(p_hi)
                };
                let fm = f(mid);
                let whole = (p_hi - p_lo) / 6.0 * (fa + 4.0 * fm + fb);
                panels.push(Panel {
                    a: p_lo,
                    b: p_hi,
                    fa,
                    fm,
                    fb,
                    whole,
                });
            }
        }

        let coarse: f64 = panels.iter().map(|p| p.whole).sum();
        if !coarse.is_finite() {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: coarse,
            });
        }
        let eps_total = self.tol.abs.max(self.tol.rel * coarse.abs());
        let width = b - a;

        let mut total = 0.0;
        let mut converged = true;
        for p in &panels {
            let eps = eps_total * (p.b - p.a) / width;
            let (v, ok) = refine(&f, p, eps, MAX_DEPTH);
            total += v;
            converged &= ok;
        }
        if !converged || !total.is_finite() {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: total,
            });
        }
        Ok(total)
    }
}

/// `x` moved a relative 1e-13 towards `toward`.
fn nudge(x: f64, toward: f64) -> f64 {
    let step = 1e-13 * x.abs().max(1.0);
    if toward > x {
        (x + step).min(toward)
    } else {
        (x - step).max(toward)
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn refine<F: Fn(f64) -> f64>(f: &F, p: &Panel, eps: f64, depth: u32) -> (f64, bool) {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    let delta = left + right - p.whole;
    if !delta.is_finite() {
        return (left + right, false);
    }
    if delta.abs() <= 15.0 * eps {
        return (left + right + delta / 15.0, true);
    }
    if depth == 0 {
        return (left + right + delta / 15.0, false);
    }
    let lp = Panel {
        a: p.a,
        b: m,
        fa: p.fa,
        fm: flm,
        fb: p.fm,
        whole: left,
    };
    let rp = Panel {
        a: m,
        b: p.b,
        fa: p.fm,
        fm: frm,
        fb: p.fb,
        whole: right,
    };
    let (lv, lok) = refine(f, &lp, 0.5 * eps, depth - 1);
    let (rv, rok) = refine(f, &rp, 0.5 * eps, depth - 1);
    (lv + rv, lok && rok)
}

/// Adaptive Simpson with default options.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    Simpson::default().integrate(f, a, b)
}
