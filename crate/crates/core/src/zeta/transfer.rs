use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::orbit::OrbitDatabase;

const DEGENERATE_TOL: f64 = 1e-13;
/// Terms below this modulus are dropped once weights are sorted.
const NEGLIGIBLE: f64 = 1e-22;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Longest word length for which the database holds every class.
pub(crate) fn trace_cutoff(db: &OrbitDatabase) -> Result<usize> {
    db.complete_length()
        .ok_or_else(|| Error::Input("determinant evaluation needs a length-cut database".into()))
}

/// `m`-th powers of the multipliers (principal powers of moduli, continuous phase).
fn powers(mu: &[Complex64], m: usize) -> Vec<Complex64> {
    mu.iter().map(|z| Complex64::from_polar(z.norm().powi(m as i32), z.arg() * m as f64)).collect()
}

/// `e_0 .. e_k` of the given values.
fn elementary(xs: &[Complex64]) -> Vec<Complex64> {
    let mut e = alloc::vec![zero(); xs.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, &x) in xs.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] = e[k] + e[k - 1] * x;
        }
    }
    e
}

/// Coefficients `p·e_j(μ^m)/Π(1-μ_i^m)` for `j = 0..d`, indexed by `j`.
fn term_coefficients(p: usize, mu: &[Complex64], m: usize) -> Result<Vec<Complex64>> {
    let mm = powers(mu, m);
    let mut den = Complex64::new(1.0, 0.0);
    for &z in &mm {
        let f = Complex64::new(1.0, 0.0) - z;
        if f.norm() < DEGENERATE_TOL {
            return Err(Error::DegenerateMultiplier(f.norm()));
        }
        den *= f;
    }
    Ok(elementary(&mm).into_iter().map(|e| e * p as f64 / den).collect())
}

/// Trace of the `n`-th power of the `j`-th transfer operator at `s`:
/// `Σ_{p | n} p · e_j(μ^{n/p}) e^{-s (n/p) w} / Π_i (1 - μ_i^{n/p})`.
pub fn trace(db: &OrbitDatabase, s: Complex64, j: usize, n: usize) -> Result<Complex64> {
    if j >= db.dim() || n == 0 {
        return Err(Error::Input(alloc::format!("trace index out of range: j={j}, n={n}")));
    }
    let cut = trace_cutoff(db)?;
    if n > cut {
        return Err(Error::Completeness { requested: n as f64, limit: cut as f64 });
    }
    let mut acc = zero();
    for i in 0..db.len() {
        let p = db.p(i);
        if !n.is_multiple_of(p) {
            continue;
        }
        let m = n / p;
        let c = term_coefficients(p, db.record(i).mu, m)?;
        acc += c[j] * (-s * (m as f64 * db.weight(i))).exp();
    }
    Ok(acc)
}

/// Exponential sums `Σ c_{j,t} e^{-s E_t}` for all `j < d` and `n ≤ n_max`,
/// with terms sorted by exponent.
#[derive(Clone, Debug)]
pub struct TermTable {
    d: usize,
    n_max: usize,
    n: Vec<u32>,
    e: Vec<f64>,
    coef: Vec<Complex64>,
    /// `p` summed over the merged term (coefficient of the untwisted count).
    count: Vec<f64>,
}

impl TermTable {
    /// Builds the table for lengths `≤ n_max`. Terms of the same length whose
    /// exponents agree to relative `merge_tol` are summed (`0` keeps them all).
    pub fn build(db: &OrbitDatabase, n_max: usize, merge_tol: f64) -> Result<Self> {
        let cut = trace_cutoff(db)?;
        if n_max > cut {
            return Err(Error::Completeness { requested: n_max as f64, limit: cut as f64 });
        }
        let d = db.dim();
        let mut raw: Vec<(u32, f64, Vec<Complex64>, f64)> = Vec::new();
        for i in 0..db.len() {
            let p = db.p(i);
            if p > n_max {
                continue;
            }
            for m in 1..=n_max / p {
                let c = term_coefficients(p, db.record(i).mu, m)?;
                raw.push(((p * m) as u32, m as f64 * db.weight(i), c, p as f64));
            }
        }
        raw.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut t = TermTable { d, n_max, n: Vec::new(), e: Vec::new(), coef: Vec::new(), count: Vec::new() };
        // latest term of each length
        let mut last: Vec<Option<usize>> = alloc::vec![None; n_max + 1];
        for (n, e, c, p) in raw {
            if let Some(k) = last[n as usize] {
                if (e - t.e[k]).abs() <= merge_tol * e.abs() && merge_tol > 0.0 {
                    for (j, cj) in c.iter().enumerate().take(d) {
                        t.coef[k * d + j] += cj;
                    }
                    t.count[k] += p;
                    continue;
                }
            }
            last[n as usize] = Some(t.n.len());
            t.n.push(n);
            t.e.push(e);
            t.coef.extend_from_slice(&c);
            t.count.push(p);
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Trace table at `s`.
    pub fn traces(&self, s: Complex64) -> TraceTable {
        let mut tt = TraceTable::zeros(s, self.d, self.n_max);
        for k in 0..self.len() {
            let z = (-s * self.e[k]).exp();
            tt.add(self, k, z);
        }
        tt
    }

    /// Trace tables at `s, s+1, ..., s+shifts`, dropping terms whose factor
    /// has fallen below `1e-22` (exponents are sorted, so the rest follow).
    pub fn shifted_traces(&self, s: Complex64, shifts: usize) -> Vec<TraceTable> {
        let mut cur: Vec<Complex64> = self.e.iter().map(|&e| (-s * e).exp()).collect();
        let r: Vec<f64> = self.e.iter().map(|&e| (-e).exp()).collect();
        let mut active = cur.len();
        let mut out = Vec::with_capacity(shifts + 1);
        for k in 0..=shifts {
            let mut tt = TraceTable::zeros(s + k as f64, self.d, self.n_max);
            let mut last_big = 0;
            for t in 0..active {
                if k > 0 {
                    cur[t] *= r[t];
                }
                if cur[t].norm() >= NEGLIGIBLE {
                    last_big = t + 1;
                }
                tt.add(self, t, cur[t]);
            }
            if k > 0 {
                active = last_big;
            }
            out.push(tt);
        }
        out
    }
}

/// Traces `tr_j(n)` for `j < d`, `1 ≤ n ≤ n_max` at one `s`, together with
/// the weighted orbit sums `Σ_{p|n} p e^{-s (n/p) w}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub s: Complex64,
    pub dim: usize,
    pub n_max: usize,
    /// `tr[j][n - 1]`.
    pub tr: Vec<Vec<Complex64>>,
    /// `orbit_sum[n - 1]`.
    pub orbit_sum: Vec<Complex64>,
}

impl TraceTable {
    fn zeros(s: Complex64, d: usize, n_max: usize) -> Self {
        TraceTable {
            s,
            dim: d,
            n_max,
            tr: alloc::vec![alloc::vec![zero(); n_max]; d],
            orbit_sum: alloc::vec![zero(); n_max],
        }
    }

    fn add(&mut self, t: &TermTable, k: usize, z: Complex64) {
        let n = t.n[k] as usize - 1;
        for j in 0..t.d {
            self.tr[j][n] += t.coef[k * t.d + j] * z;
        }
        self.orbit_sum[n] += z * t.count[k];
    }

    /// Computes the table from every record (no merging).
    pub fn compute(db: &OrbitDatabase, s: Complex64, n_max: usize) -> Result<Self> {
        Ok(TermTable::build(db, n_max, 0.0)?.traces(s))
    }

    /// `max_n |Σ_j (-1)^j tr_j(n) - orbit_sum(n)|`.
    pub fn alternating_residual(&self) -> f64 {
        (0..self.n_max)
            .map(|n| {
                let alt: Complex64 = (0..self.dim).map(|j| if j % 2 == 0 { self.tr[j][n] } else { -self.tr[j][n] }).sum();
                (alt - self.orbit_sum[n]).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Truncated Fredholm determinant `det(1 - L_j)` and its power-series coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FredholmDet {
    pub value: Complex64,
    /// `c_0 = 1, c_1, ..., c_N`.
    pub coeffs: Vec<Complex64>,
}

/// Coefficients from `c_m = -(1/m) Σ_{k=1}^m c_{m-k} tr_k`; traces beyond
/// the table are taken as zero.
pub fn fredholm_det(table: &TraceTable, j: usize, n_terms: usize) -> Result<FredholmDet> {
    if j >= table.dim {
        return Err(Error::Input(alloc::format!("determinant index {j} out of range")));
    }
    let tr = &table.tr[j];
    let mut c = alloc::vec![zero(); n_terms + 1];
    c[0] = Complex64::new(1.0, 0.0);
    for m in 1..=n_terms {
        let mut acc = zero();
        for k in 1..=m.min(tr.len()) {
            acc += c[m - k] * tr[k - 1];
        }
        c[m] = -acc / m as f64;
    }
    let value = c.iter().sum();
    Ok(FredholmDet { value, coeffs: c })
}

/// `exp(-Σ_{n ≤ N} tr_n / n)`, the unexpanded form of the same determinant.
pub fn fredholm_det_exp(table: &TraceTable, j: usize, n_terms: usize) -> Result<Complex64> {
    if j >= table.dim {
        return Err(Error::Input(alloc::format!("determinant index {j} out of range")));
    }
    let s: Complex64 = table.tr[j].iter().take(n_terms).enumerate().map(|(k, &t)| t / (k + 1) as f64).sum();
    Ok((-s).exp())
}

/// `Π_{j odd} det(1 - L_j) / Π_{j even} det(1 - L_j)` from one trace table.
pub fn zeta_from_table(table: &TraceTable, n_terms: usize) -> Result<Complex64> {
    let (mut num, mut den) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    for j in 0..table.dim {
        let v = fredholm_det(table, j, n_terms)?.value;
        if j % 2 == 0 {
            den *= v;
        } else {
            num *= v;
        }
    }
    if den.norm() < 1e-300 {
        return Err(Error::PoleProximity(den.norm()));
    }
    Ok(num / den)
}

/// The zeta function as an alternating product of Fredholm determinants
/// with `n_terms` coefficients each.
pub fn zeta_via_determinants(db: &OrbitDatabase, s: Complex64, n_terms: usize) -> Result<Complex64> {
    let table = TraceTable::compute(db, s, trace_cutoff(db)?)?;
    zeta_from_table(&table, n_terms)
}

/// `log` of `Π_{k=0}^{shifts} ζ_det(s+k)^{-1}` from precomputed shifted tables;
/// the real part is `log|Z|`.
pub fn log_selberg_from_tables(tables: &[TraceTable], n_terms: usize) -> Result<Complex64> {
    let mut acc = zero();
    for t in tables {
        for j in 0..t.dim {
            let v = fredholm_det(t, j, n_terms)?.value;
            let l = v.ln();
            if j % 2 == 0 {
                acc += l;
            } else {
                acc -= l;
            }
        }
    }
    Ok(acc)
}

/// The Selberg-type product `Π_{k=0}^{shifts} ζ_det(s+k)^{-1}`.
pub fn selberg_via_determinants(db: &OrbitDatabase, s: Complex64, n_terms: usize, shifts: usize) -> Result<Complex64> {
    let terms = TermTable::build(db, trace_cutoff(db)?, 0.0)?;
    Ok(log_selberg_from_tables(&terms.shifted_traces(s, shifts), n_terms)?.exp())
}
