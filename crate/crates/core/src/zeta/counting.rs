use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::orbit::OrbitDatabase;

/// Number of primitive classes with weight `≤ t`.
pub fn count_pi(db: &OrbitDatabase, t: f64) -> Result<u64> {
    if t > db.complete_weight() {
        return Err(Error::Completeness { requested: t, limit: db.complete_weight() });
    }
    Ok((0..db.len()).filter(|&i| db.weight(i) <= t).count() as u64)
}

/// Offset logarithmic integral `∫_2^x du / ln u`.
pub fn li(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::Domain(alloc::format!("li needs a finite x ≥ 2, got {x}")));
    }
    if x == 2.0 {
        return Ok(0.0);
    }
    // u = e^t
    let f = |t: f64| t.exp() / t;
    let (a, b) = (2f64.ln(), x.ln());
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = 1e-13 * whole.abs().max(1.0);
    Ok(simpson(&f, a, b, fa, fm, fb, whole, tol, 50))
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// One row of a counting report.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingRow {
    pub t: f64,
    pub pi: u64,
    pub li: f64,
    pub ratio: f64,
}

/// `π(T)`, `li(e^{hT})` and their ratio for each `T`.
pub fn counting_report(db: &OrbitDatabase, ts: &[f64], h: f64) -> Result<Vec<CountingRow>> {
    if !(h > 0.0) {
        return Err(Error::Domain(alloc::format!("entropy must be positive, got {h}")));
    }
    ts.iter()
        .map(|&t| {
            let pi = count_pi(db, t)?;
            let x = (h * t).exp();
            let l = if x <= 2.0 { 0.0 } else { li(x)? };
            Ok(CountingRow { t, pi, li: l, ratio: pi as f64 / l })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `li(x) = Li(x) - Li(2)` with `Li(x) = γ + ln ln x + Σ_k (ln x)^k / (k·k!)`.
    fn li_series(x: f64) -> f64 {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let big = |x: f64| {
            let l = x.ln();
            let (mut term, mut sum) = (1.0, 0.0);
            for k in 1..400 {
                term *= l / k as f64;
                sum += term / k as f64;
                if term < 1e-18 * sum {
                    break;
                }
            }
            EULER_GAMMA + l.ln() + sum
        };
        big(x) - big(2.0)
    }

    #[test]
    fn li_matches_series() {
        for x in [2.5, 10.0, 1e3, 1e6, 1e10] {
            let (a, b) = (li(x).unwrap(), li_series(x));
            assert!((a - b).abs() <= 1e-10 * b.abs(), "{x}: {a} {b}");
        }
        assert_eq!(li(2.0).unwrap(), 0.0);
        assert!(li(1.5).is_err());
    }

    #[test]
    fn li_known_value() {
        // Li(10^6) = 78627.5491594622, Li(2) = 1.0451637801174928
        assert!((li(1e6).unwrap() - (78_627.549_159_462_2 - 1.045_163_780_117_493)).abs() < 1e-6);
    }
}
