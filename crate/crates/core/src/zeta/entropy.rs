use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::orbit::OrbitDatabase;

const MAX_BISECTIONS: usize = 200;
const MAX_DOUBLINGS: usize = 60;
const MERGE_TOL: f64 = 1e-13;
const GRID: usize = 64;

/// Entropy estimate with its bracket and per-length roots.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    /// `(min, max)` of the roots at the two largest lengths.
    pub bracket: (f64, f64),
    pub n_used: usize,
    /// `(n, root)` for `n = 2..=n_used`.
    pub per_length: Vec<(usize, f64)>,
    /// `log F_n - log F_{n-1}` at `value`.
    pub residual: f64,
}

/// `(ln coefficient, exponent)` pairs of `F_n(s) = Σ_{p|n} p e^{-s (n/p) w}`.
struct OrbitSum {
    terms: Vec<(f64, f64)>,
}

impl OrbitSum {
    fn new(db: &OrbitDatabase, n: usize) -> Self {
        let mut raw: Vec<(f64, f64)> = (0..db.len())
            .filter(|&i| n.is_multiple_of(db.p(i)))
            .map(|i| ((db.p(i)) as f64, (n / db.p(i)) as f64 * db.weight(i)))
            .collect();
        raw.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (c, e) in raw {
            match merged.last_mut() {
                Some(last) if (e - last.1).abs() <= MERGE_TOL * e.abs() => last.0 += c,
                _ => merged.push((c, e)),
            }
        }
        OrbitSum { terms: merged.into_iter().map(|(c, e)| (c.ln(), e)).collect() }
    }

    /// `ln F_n(s)` by log-sum-exp.
    fn log_value(&self, s: f64) -> f64 {
        let m = self.terms.iter().map(|&(lc, e)| lc - s * e).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + self.terms.iter().map(|&(lc, e)| (lc - s * e - m).exp()).sum::<f64>().ln()
    }
}

/// Smallest positive root of `s ↦ ln F_n(s) - ln F_{n-1}(s)`, located on
/// a grid and refined by bisection to full precision.
fn root(db: &OrbitDatabase, n: usize) -> Result<(f64, f64)> {
    let (fa, fb) = (OrbitSum::new(db, n), OrbitSum::new(db, n - 1));
    if fa.terms.is_empty() || fb.terms.is_empty() {
        return Err(Error::Bracketing(alloc::format!("no classes contribute at length {n}")));
    }
    let g = |s: f64| fa.log_value(s) - fb.log_value(s);
    let mut lo = 0.0;
    if !(g(lo) > 0.0) {
        return Err(Error::Bracketing(alloc::format!("orbit sums do not grow from length {} to {n}", n - 1)));
    }
    let w_max = (0..db.len()).map(|i| db.weight(i)).fold(0.0f64, f64::max);
    let mut top = 2.0 * (db.len().max(2) as f64).ln() / w_max;
    let mut hi = f64::NAN;
    'outer: for _ in 0..MAX_DOUBLINGS {
        // first sign change from the left; G may turn positive again far out
        for k in 1..=GRID {
            let s = lo + (top - lo) * k as f64 / GRID as f64;
            if g(s) <= 0.0 {
                hi = s;
                lo = lo + (top - lo) * (k - 1) as f64 / GRID as f64;
                break 'outer;
            }
        }
        lo = top;
        top *= 2.0;
        if !top.is_finite() {
            break;
        }
    }
    if hi.is_nan() {
        return Err(Error::Bracketing(alloc::format!("no sign change at length {n}")));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok((s, g(s)))
}

/// Estimates the critical exponent from growth of the weighted orbit sums
/// `F_n(s)`: the root of `F_n(s) = F_{n-1}(s)` at the largest complete length.
pub fn entropy(db: &OrbitDatabase) -> Result<EntropyEstimate> {
    let n_used = db.complete_length().unwrap_or_else(|| db.max_length());
    if n_used < 3 {
        return Err(Error::Input("entropy needs classes up to length at least 3".into()));
    }
    let mut per_length = Vec::new();
    let mut value = 0.0;
    let mut residual = 0.0;
    for n in 2..=n_used {
        let (s, r) = root(db, n)?;
        per_length.push((n, s));
        value = s;
        residual = r;
    }
    let prev = per_length[per_length.len() - 2].1;
    Ok(EntropyEstimate { value, bracket: (prev.min(value), prev.max(value)), n_used, per_length, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{Cutoff, PrimitiveClassRecord, WeightMode};
    use num_complex::Complex64;

    /// `k` classes per length `n`, each of weight `n`.
    fn synthetic(counts: &[usize]) -> OrbitDatabase {
        let mut db = OrbitDatabase::new(2, 2, Cutoff::Length(counts.len()), WeightMode::Top, "t".into());
        let mut fp = 0;
        for (i, &c) in counts.iter().enumerate() {
            let n = i + 1;
            for _ in 0..c {
                fp += 1;
                db.push(&PrimitiveClassRecord {
                    word: (0..n).map(|k| if k == 0 { 2 } else { 0 }).collect(),
                    d_top: n as f64,
                    d_spread: 2.0 * n as f64,
                    mu: alloc::vec![Complex64::new((-2.0 * n as f64).exp(), 0.0)],
                    ab: alloc::vec![0; 4],
                    fp,
                })
                .unwrap();
            }
        }
        db
    }

    #[test]
    fn shift_like_counts_give_log_of_growth() {
        // primitive necklaces over 3 letters: F_n(s) = 3^n e^{-ns}
        let db = synthetic(&[3, 3, 8, 18, 48]);
        let e = entropy(&db).unwrap();
        for &(_, s) in &e.per_length {
            assert!((s - 3f64.ln()).abs() < 1e-12, "{s}");
        }
        assert!(e.residual.abs() < 1e-12);
        assert!(e.bracket.0 <= e.value && e.value <= e.bracket.1);
    }

    #[test]
    fn scaling_divides_entropy() {
        let db = synthetic(&[2, 1, 2, 3, 6, 9]);
        let a = entropy(&db).unwrap().value;
        let b = entropy(&db.scaled(2.0)).unwrap().value;
        assert!((a - 2.0 * b).abs() < 1e-12 * a);
    }

    #[test]
    fn too_short_rejected() {
        assert!(entropy(&synthetic(&[3, 3])).is_err());
    }
}
