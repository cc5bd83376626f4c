use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::orbit::OrbitDatabase;

use super::transfer::{fredholm_det, log_selberg_from_tables, trace_cutoff, zeta_from_table, TermTable};

/// Relative tolerance for merging equal exponents in scans.
pub const SCAN_MERGE_TOL: f64 = 1e-12;

/// Function evaluated by [`scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanTarget {
    Zeta,
    Selberg,
    Det(usize),
}

impl ScanTarget {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zeta" => Ok(ScanTarget::Zeta),
            "selberg" => Ok(ScanTarget::Selberg),
            _ => match s.strip_prefix("det") {
                Some(j) => j
                    .trim_matches(|c| c == '(' || c == ')' || c == ':')
                    .parse()
                    .map(ScanTarget::Det)
                    .map_err(|_| Error::Input(alloc::format!("bad scan target {s:?}"))),
                None => Err(Error::Input(alloc::format!("bad scan target {s:?}"))),
            },
        }
    }

    pub fn name(self) -> String {
        match self {
            ScanTarget::Zeta => "zeta".into(),
            ScanTarget::Selberg => "selberg".into(),
            ScanTarget::Det(j) => alloc::format!("det{j}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanFlag {
    Ok,
    NonFinite,
    LocalMin,
    LocalMax,
}

impl ScanFlag {
    pub fn name(self) -> &'static str {
        match self {
            ScanFlag::Ok => "ok",
            ScanFlag::NonFinite => "nonfinite",
            ScanFlag::LocalMin => "local_min",
            ScanFlag::LocalMax => "local_max",
        }
    }
}

/// Rectangular grid of values, row-major with the imaginary part as the row.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub target: ScanTarget,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub values: Vec<Complex64>,
    pub log_abs: Vec<f64>,
    pub flags: Vec<ScanFlag>,
}

impl ScanGrid {
    pub fn at(&self, ix: usize, iy: usize) -> (Complex64, f64, ScanFlag) {
        let k = iy * self.re.len() + ix;
        (self.values[k], self.log_abs[k], self.flags[k])
    }

    /// Node with the smallest finite `log|F|`.
    pub fn minimum(&self) -> Option<(Complex64, f64)> {
        let nx = self.re.len();
        (0..self.log_abs.len())
            .filter(|&k| self.log_abs[k].is_finite())
            .min_by(|&a, &b| self.log_abs[a].total_cmp(&self.log_abs[b]))
            .map(|k| (Complex64::new(self.re[k % nx], self.im[k / nx]), self.log_abs[k]))
    }

    fn mark_extrema(&mut self) {
        let (nx, ny) = (self.re.len(), self.im.len());
        for iy in 0..ny {
            for ix in 0..nx {
                let k = iy * nx + ix;
                let v = self.log_abs[k];
                if !v.is_finite() {
                    self.flags[k] = ScanFlag::NonFinite;
                    continue;
                }
                let mut nb = Vec::with_capacity(8);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (x, y) = (ix as i64 + dx, iy as i64 + dy);
                        if (dx, dy) != (0, 0) && x >= 0 && y >= 0 && (x as usize) < nx && (y as usize) < ny {
                            nb.push(self.log_abs[y as usize * nx + x as usize]);
                        }
                    }
                }
                if nb.is_empty() || nb.iter().any(|x| !x.is_finite()) {
                    continue;
                }
                if nb.iter().all(|&x| v < x) {
                    self.flags[k] = ScanFlag::LocalMin;
                } else if nb.iter().all(|&x| v > x) {
                    self.flags[k] = ScanFlag::LocalMax;
                }
            }
        }
    }
}

/// Evenly spaced nodes `lo, ..., hi`; a single node sits at `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Pointwise evaluator behind [`scan`], sharing one merged term table.
///
/// `n_terms` is the number of Fredholm coefficients and `shifts` the number
/// of extra shifts `s+1, ..., s+shifts` in the Selberg-type product.
pub struct Scanner {
    target: ScanTarget,
    terms: TermTable,
    n_terms: usize,
    shifts: usize,
}

impl Scanner {
    pub fn new(db: &OrbitDatabase, target: ScanTarget, n_terms: usize, shifts: usize) -> Result<Self> {
        if let ScanTarget::Det(j) = target {
            if j >= db.dim() {
                return Err(Error::Input(alloc::format!("determinant index {j} out of range")));
            }
        }
        let terms = TermTable::build(db, trace_cutoff(db)?, SCAN_MERGE_TOL)?;
        Ok(Scanner { target, terms, n_terms, shifts })
    }

    pub fn target(&self) -> ScanTarget {
        self.target
    }

    /// `(F(s), log|F(s)|)`; poles of the zeta target come back as infinities.
    pub fn eval(&self, s: Complex64) -> Result<(Complex64, f64)> {
        match self.target {
            ScanTarget::Zeta => match zeta_from_table(&self.terms.traces(s), self.n_terms) {
                Ok(v) => Ok((v, v.norm().ln())),
                Err(Error::PoleProximity(_)) => Ok((Complex64::new(f64::INFINITY, 0.0), f64::INFINITY)),
                Err(e) => Err(e),
            },
            ScanTarget::Selberg => {
                let lz = log_selberg_from_tables(&self.terms.shifted_traces(s, self.shifts), self.n_terms)?;
                Ok((lz.exp(), lz.re))
            }
            ScanTarget::Det(j) => {
                let v = fredholm_det(&self.terms.traces(s), j, self.n_terms)?.value;
                Ok((v, v.norm().ln()))
            }
        }
    }
}

impl ScanGrid {
    /// Assembles a grid from row-major node values and flags its extrema.
    pub fn from_values(target: ScanTarget, re: Vec<f64>, im: Vec<f64>, values: Vec<(Complex64, f64)>) -> Result<Self> {
        if values.len() != re.len() * im.len() {
            return Err(Error::Input("grid values do not match the axes".into()));
        }
        let (values, log_abs): (Vec<_>, Vec<_>) = values.into_iter().unzip();
        let n = values.len();
        let mut g = ScanGrid { target, re, im, values, log_abs, flags: alloc::vec![ScanFlag::Ok; n] };
        g.mark_extrema();
        Ok(g)
    }
}

/// Evaluates a determinant-based function on a grid.
pub fn scan(
    db: &OrbitDatabase,
    target: ScanTarget,
    re: (f64, f64, usize),
    im: (f64, f64, usize),
    n_terms: usize,
    shifts: usize,
) -> Result<ScanGrid> {
    if re.2 == 0 || im.2 == 0 {
        return Err(Error::Input("scan grid needs at least one node per axis".into()));
    }
    let sc = Scanner::new(db, target, n_terms, shifts)?;
    let (xs, ys) = (linspace(re.0, re.1, re.2), linspace(im.0, im.1, im.2));
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            values.push(sc.eval(Complex64::new(x, y))?);
        }
    }
    ScanGrid::from_values(target, xs, ys, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{Cutoff, PrimitiveClassRecord, WeightMode};

    #[test]
    fn parse_targets() {
        assert_eq!(ScanTarget::parse("selberg").unwrap(), ScanTarget::Selberg);
        assert_eq!(ScanTarget::parse("det1").unwrap(), ScanTarget::Det(1));
        assert_eq!(ScanTarget::parse("det(0)").unwrap(), ScanTarget::Det(0));
        assert!(ScanTarget::parse("foo").is_err());
    }

    #[test]
    fn single_class_zero_located() {
        // det_0(s) = 1 - e^{-s}/(1-μ) vanishes at s = -ln(1-μ)
        let mut db = OrbitDatabase::new(2, 2, Cutoff::Length(1), WeightMode::Top, "t".into());
        let mu = 0.2;
        db.push(&PrimitiveClassRecord {
            word: alloc::vec![0],
            d_top: 1.0,
            d_spread: 2.0,
            mu: alloc::vec![Complex64::new(mu, 0.0)],
            ab: alloc::vec![1, 0, 0, 0],
            fp: 1,
        })
        .unwrap();
        let s0 = -(1.0f64 - mu).ln();
        let g = scan(&db, ScanTarget::Det(0), (s0 - 0.097, s0 + 0.103, 21), (-0.1, 0.1, 21), 1, 0).unwrap();
        let (s, _) = g.minimum().unwrap();
        assert!((s.re - s0).abs() < 0.006 && s.im.abs() < 0.006);
        assert_eq!(g.at(10, 10).2, ScanFlag::LocalMin);
    }
}
