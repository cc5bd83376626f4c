use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, LogEigen, Mat};

/// Default relative proximality gap.
pub const DEFAULT_PROXIMALITY_TOL: f64 = 1e-6;

/// Eigenvalues in log-polar form, sorted by descending modulus with ties
/// broken by descending real part, then imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigen: Vec<LogEigen>,
}

impl Spectrum {
    pub fn from_log_eigen(mut eigen: Vec<LogEigen>) -> Self {
        eigen.sort_by(|a, b| {
            let (za, zb) = (a.value(), b.value());
            b.log_abs
                .total_cmp(&a.log_abs)
                .then(zb.re.total_cmp(&za.re))
                .then(zb.im.total_cmp(&za.im))
        });
        Spectrum { eigen }
    }

    pub fn of_matrix(m: &Mat) -> Result<Self> {
        let ev = eigenvalues(m)?;
        Ok(Spectrum::from_log_eigen(ev.into_iter().map(LogEigen::from_complex).collect()))
    }

    pub fn dim(&self) -> usize {
        self.eigen.len()
    }

    pub fn log_eigen(&self) -> &[LogEigen] {
        &self.eigen
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigen.iter().map(LogEigen::value).collect()
    }

    /// `log(|λ₁| / |λ₂|)`; zero in dimension one.
    pub fn log_gap(&self) -> f64 {
        match self.eigen.len() {
            0 | 1 => 0.0,
            _ => self.eigen[0].log_abs - self.eigen[1].log_abs,
        }
    }

    /// `|λ₁| / |λ₂|`.
    pub fn proximality_gap(&self) -> f64 {
        self.log_gap().exp()
    }

    pub fn top_is_real(&self, tol: f64) -> bool {
        self.eigen.first().is_some_and(|e| arg_is_real(e.arg, tol))
    }
}

fn arg_is_real(arg: f64, tol: f64) -> bool {
    let pi = core::f64::consts::PI;
    arg.abs() <= tol || (pi - arg.abs()) <= tol
}

/// Returns the gap `|λ₁|/|λ₂|` when the top eigenvalue is real and strictly
/// dominant by the relative margin `tol`.
pub fn proximality_check(s: &Spectrum, tol: f64) -> Result<f64> {
    if s.dim() < 2 {
        return Err(Error::Domain("proximality needs dimension at least 2".into()));
    }
    let (l1, l2) = (s.eigen[0].value(), s.eigen[1].value());
    if s.log_gap() < (1.0 + tol).ln() {
        return Err(Error::Domain(alloc::format!(
            "not proximal: |λ1| = {:e} and |λ2| = {:e} within relative {tol:e}",
            l1.norm(),
            l2.norm()
        )));
    }
    if !s.top_is_real(tol) {
        return Err(Error::Domain(alloc::format!(
            "not proximal: top eigenvalue {l1} is not real (next {l2})"
        )));
    }
    Ok(s.proximality_gap())
}

/// `log |λ₁|`.
pub fn weight_top(s: &Spectrum) -> Result<f64> {
    proximality_check(s, DEFAULT_PROXIMALITY_TOL)?;
    Ok(s.eigen[0].log_abs)
}

/// `log(|λ₁| / |λ_d|)`.
pub fn weight_spread(s: &Spectrum) -> Result<f64> {
    proximality_check(s, DEFAULT_PROXIMALITY_TOL)?;
    Ok(s.eigen[0].log_abs - s.eigen[s.dim() - 1].log_abs)
}

/// `μ_j = λ_{j+1} / λ₁` for `j = 1..d-1`: the derivative spectrum of the
/// projective action at the attracting fixed point.
pub fn projective_multipliers(s: &Spectrum) -> Result<Vec<Complex64>> {
    proximality_check(s, DEFAULT_PROXIMALITY_TOL)?;
    let top = s.eigen[0];
    Ok(s.eigen[1..]
        .iter()
        .map(|e| Complex64::from_polar((e.log_abs - top.log_abs).exp(), e.arg - top.arg))
        .collect())
}

/// Unit top eigenvector, first nonzero coordinate positive.
pub fn projective_fixed_point(m: &Mat) -> Result<Vec<f64>> {
    let s = Spectrum::of_matrix(m)?;
    proximality_check(&s, DEFAULT_PROXIMALITY_TOL)?;
    let lambda = s.eigenvalues()[0].re;
    let n = m.dim();
    // inverse iteration with a slightly perturbed shift
    let shift = lambda * (1.0 + 1e-10) + 1e-300;
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    let inv = a.inverse().or_else(|_| {
        let mut b = m.clone();
        for i in 0..n {
            b[(i, i)] -= lambda * (1.0 + 1e-7);
        }
        b.inverse()
    })?;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
    for _ in 0..8 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| inv[(i, j)] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numeric("fixed-point iteration degenerated".into()));
        }
        v = w.iter().map(|x| x / norm).collect();
    }
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-300) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(v)
}

/// `v ↦ m v / ‖m v‖`.
pub fn projective_map(m: &Mat, v: &[f64]) -> Vec<f64> {
    let n = m.dim();
    let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] * v[j]).sum()).collect();
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.iter().map(|x| x / norm).collect()
}
