//! Small dense real matrices, eigenvalues and spectra of long products.

use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Square real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: alloc::vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Input(alloc::format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Mat { n, data })
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut r = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    r.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        r
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut r = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                r[(j, i)] = self[(i, j)];
            }
        }
        r
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// LU factorisation with partial pivoting: `(lu, perm, sign)`, or `None` if singular.
    fn lu(&self) -> Option<(Mat, Vec<usize>, f64)> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))?;
            if a[(p, k)] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                a[(i, k)] = f;
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn det(&self) -> f64 {
        match self.lu() {
            None => 0.0,
            Some((a, _, s)) => (0..self.n).fold(s, |d, i| d * a[(i, i)]),
        }
    }

    pub fn inverse(&self) -> Result<Mat> {
        let n = self.n;
        let (a, perm, _) =
            self.lu().ok_or_else(|| Error::Numeric("singular matrix".into()))?;
        let mut inv = Mat::zeros(n);
        for c in 0..n {
            let mut x: Vec<f64> = (0..n).map(|i| if perm[i] == c { 1.0 } else { 0.0 }).collect();
            for i in 0..n {
                for k in 0..i {
                    x[i] -= a[(i, k)] * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    x[i] -= a[(i, k)] * x[k];
                }
                x[i] /= a[(i, i)];
            }
            for i in 0..n {
                inv[(i, c)] = x[i];
            }
        }
        if !inv.is_finite() {
            return Err(Error::Numeric("inverse not finite".into()));
        }
        Ok(inv)
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    pub fn expm(&self) -> Mat {
        let n = self.n;
        let norm = self.max_abs() * n as f64;
        let k = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let a = self.scale(0.5f64.powi(k));
        let mut term = Mat::identity(n);
        let mut sum = Mat::identity(n);
        for j in 1..=20 {
            term = term.mul(&a).scale(1.0 / j as f64);
            sum = sum.add(&term);
        }
        for _ in 0..k {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Householder QR with a non-negative diagonal in `R`.
    pub fn qr(&self) -> (Mat, Mat) {
        let n = self.n;
        let mut r = self.clone();
        let mut q = Mat::identity(n);
        for k in 0..n.saturating_sub(1) {
            let norm: f64 = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (0..n).map(|i| if i < k { 0.0 } else { r[(i, k)] }).collect();
            v[k] -= alpha;
            let vv: f64 = v.iter().map(|x| x * x).sum();
            if vv == 0.0 {
                continue;
            }
            for j in 0..n {
                let s: f64 = (k..n).map(|i| v[i] * r[(i, j)]).sum::<f64>() * 2.0 / vv;
                for i in k..n {
                    r[(i, j)] -= s * v[i];
                }
            }
            for i in 0..n {
                let s: f64 = (k..n).map(|j| q[(i, j)] * v[j]).sum::<f64>() * 2.0 / vv;
                for j in k..n {
                    q[(i, j)] -= s * v[j];
                }
            }
        }
        for k in 0..n {
            if r[(k, k)] < 0.0 {
                for j in 0..n {
                    r[(k, j)] = -r[(k, j)];
                    q[(j, k)] = -q[(j, k)];
                }
            }
            for i in k + 1..n {
                r[(i, k)] = 0.0;
            }
        }
        (q, r)
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}

/// Eigenvalues of a general real matrix, sorted by decreasing modulus.
pub fn eigenvalues(m: &Mat) -> Result<Vec<Complex64>> {
    if !m.is_finite() {
        return Err(Error::Numeric("non-finite matrix entries".into()));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 2 {
        return Ok(eig2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]));
    }
    let schur = m
        .to_nalgebra()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("eigenvalue iteration did not converge".into()))?;
    let ev = schur.complex_eigenvalues();
    let mut out: Vec<Complex64> = ev.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    sort_by_modulus(&mut out);
    Ok(out)
}

/// 2x2 eigenvalues without cancellation in the smaller root.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> Vec<Complex64> {
    eig2_det(a, d, a * d - b * c)
}

fn eig2_det(a: f64, d: f64, det: f64) -> Vec<Complex64> {
    let t = a + d;
    let disc = 0.25 * t * t - det;
    let mut v = if disc >= 0.0 {
        let s = disc.sqrt();
        let big = if t >= 0.0 { 0.5 * t + s } else { 0.5 * t - s };
        let small = if big != 0.0 { det / big } else { 0.0 };
        alloc::vec![Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let s = (-disc).sqrt();
        alloc::vec![Complex64::new(0.5 * t, s), Complex64::new(0.5 * t, -s)]
    };
    sort_by_modulus(&mut v);
    v
}

fn sort_by_modulus(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
}

/// An eigenvalue stored as `exp(log_abs + i arg)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogEigen {
    pub log_abs: f64,
    pub arg: f64,
}

impl LogEigen {
    pub fn from_complex(z: Complex64) -> Self {
        LogEigen { log_abs: z.norm().ln(), arg: z.arg() }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.log_abs.exp(), self.arg)
    }
}

const PRODUCT_SWEEPS: usize = 200;

/// Eigenvalues of `F_0 F_1 ... F_{k-1}` without forming the product.
///
/// Uses periodic orthogonal iteration, keeping every factor's triangular part
/// in log form, so eigenvalues far below the spectral radius keep their
/// relative accuracy. Falls back to the eigenvalues of the scaled product
/// when two moduli coincide and the iteration cannot separate them.
pub fn product_log_eigen(factors: &[&Mat]) -> Result<Vec<LogEigen>> {
    let n = match factors.first() {
        Some(f) => f.dim(),
        None => return Err(Error::Input("empty matrix product".into())),
    };
    if factors.iter().any(|f| f.dim() != n || !f.is_finite()) {
        return Err(Error::Input("factors must be finite and of equal size".into()));
    }
    if n == 1 {
        let p: f64 = factors.iter().map(|f| f[(0, 0)]).product();
        let log_abs = factors.iter().map(|f| f[(0, 0)].abs().ln()).sum();
        return Ok(alloc::vec![LogEigen { log_abs, arg: if p < 0.0 { core::f64::consts::PI } else { 0.0 } }]);
    }
    if n == 2 {
        return Ok(product_eigen2(factors));
    }
    match orthogonal_iteration(factors, n) {
        Some(v) => Ok(v),
        None => scaled_product_eigen(factors),
    }
}

/// 2x2 products: the determinant comes from the factors, which keeps the
/// small eigenvalue accurate.
fn product_eigen2(factors: &[&Mat]) -> Vec<LogEigen> {
    let mut p = [1.0, 0.0, 0.0, 1.0];
    let mut log_scale = 0.0;
    let mut log_det = 0.0;
    let mut det_sign = 1.0;
    for f in factors {
        let fm = [f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)]];
        let d = fm[0] * fm[3] - fm[1] * fm[2];
        log_det += d.abs().ln();
        det_sign *= d.signum();
        p = mul2(&p, &fm);
        let m = p.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if m > 1e100 || (m < 1e-100 && m > 0.0) {
            p = [p[0] / m, p[1] / m, p[2] / m, p[3] / m];
            log_scale += m.ln();
        }
    }
    // determinant of the rescaled product
    let det = det_sign * (log_det - 2.0 * log_scale).exp();
    let mut out: Vec<LogEigen> = eig2_det(p[0], p[3], det)
        .into_iter()
        .map(|z| LogEigen { log_abs: z.norm().ln() + log_scale, arg: z.arg() })
        .collect();
    out.sort_by(|a, b| b.log_abs.total_cmp(&a.log_abs));
    out
}

fn orthogonal_iteration(factors: &[&Mat], n: usize) -> Option<Vec<LogEigen>> {
    let mut q0 = Mat::identity(n);
    let mut prev: Option<Vec<f64>> = None;
    for sweep in 0..PRODUCT_SWEEPS {
        let mut q = q0.clone();
        let mut logd = alloc::vec![0.0; n];
        // diagonal 2x2 blocks of the accumulated triangular product, scaled
        let mut blocks: Vec<([f64; 4], f64)> = alloc::vec![([1.0, 0.0, 0.0, 1.0], 0.0); n - 1];
        for f in factors.iter().rev() {
            let (qn, r) = f.mul(&q).qr();
            for k in 0..n {
                logd[k] += r[(k, k)].ln();
            }
            for k in 0..n - 1 {
                let rb = [r[(k, k)], r[(k, k + 1)], 0.0, r[(k + 1, k + 1)]];
                let (b, s) = &mut blocks[k];
                // R_i block is applied on the left of the accumulated block
                let nb = mul2(&rb, b);
                let m = nb.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                if m > 0.0 && m.is_finite() {
                    *b = [nb[0] / m, nb[1] / m, nb[2] / m, nb[3] / m];
                    *s += m.ln();
                } else {
                    return None;
                }
            }
            q = qn;
        }
        if logd.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let s = q0.transpose().mul(&q);
        q0 = q;
        // identify 2x2 rotation blocks from S's subdiagonal
        let mut out = Vec::with_capacity(n);
        let mut off = 0.0f64;
        let mut k = 0;
        while k < n {
            let sub = if k + 1 < n { s[(k + 1, k)].abs() } else { 0.0 };
            if k + 1 < n && sub > 1e-6 {
                let sb = [s[(k, k)], s[(k, k + 1)], s[(k + 1, k)], s[(k + 1, k + 1)]];
                let (b, sc) = blocks[k];
                let t = mul2(&sb, &b);
                for z in eig2(t[0], t[1], t[2], t[3]) {
                    out.push(LogEigen { log_abs: z.norm().ln() + sc, arg: z.arg() });
                }
                for i in 0..n {
                    for j in 0..n {
                        if (i < k || i > k + 1 || j < k || j > k + 1) && i > j {
                            off = off.max(s[(i, j)].abs());
                        }
                    }
                }
                k += 2;
            } else {
                let sign = s[(k, k)];
                out.push(LogEigen {
                    log_abs: logd[k],
                    arg: if sign < 0.0 { core::f64::consts::PI } else { 0.0 },
                });
                for i in k + 1..n {
                    if !(i == k + 1 && sub > 1e-6) {
                        off = off.max(s[(i, k)].abs());
                    }
                }
                k += 1;
            }
        }
        let key: Vec<f64> = out.iter().map(|e| e.log_abs).collect();
        // sums of per-factor logs jitter by a few ulps of their size
        let stable = match &prev {
            Some(p) => p
                .iter()
                .zip(&key)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs())),
            None => false,
        };
        if off < 1e-12 && (stable || sweep + 1 == PRODUCT_SWEEPS) {
            out.sort_by(|a, b| b.log_abs.total_cmp(&a.log_abs));
            return Some(out);
        }
        prev = Some(key);
    }
    None
}

fn mul2(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn scaled_product_eigen(factors: &[&Mat]) -> Result<Vec<LogEigen>> {
    let n = factors[0].dim();
    let mut p = Mat::identity(n);
    let mut log_scale = 0.0;
    for f in factors {
        p = p.mul(f);
        let m = p.max_abs();
        if m == 0.0 || !m.is_finite() {
            return Err(Error::Numeric("degenerate matrix product".into()));
        }
        if !(1e-100..=1e100).contains(&m) {
            p = p.scale(1.0 / m);
            log_scale += m.ln();
        }
    }
    let mut out: Vec<LogEigen> = eigenvalues(&p)?
        .into_iter()
        .map(|z| LogEigen { log_abs: z.norm().ln() + log_scale, arg: z.arg() })
        .collect();
    out.sort_by(|a, b| b.log_abs.total_cmp(&a.log_abs));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, v: &[f64]) -> Mat {
        Mat::from_row_major(n, v.to_vec()).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let a = m(3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        assert!((a.det() - 18.0).abs() < 1e-12);
        let i = a.mul(&a.inverse().unwrap());
        assert!(i.sub(&Mat::identity(3)).max_abs() < 1e-14);
        assert!(m(2, &[1.0, 2.0, 2.0, 4.0]).inverse().is_err());
    }

    #[test]
    fn qr_reconstructs() {
        let a = m(3, &[1.0, -2.0, 3.0, 0.5, 4.0, -1.0, 2.0, 0.0, 1.0]);
        let (q, r) = a.qr();
        assert!(q.mul(&r).sub(&a).max_abs() < 1e-13);
        assert!(q.transpose().mul(&q).sub(&Mat::identity(3)).max_abs() < 1e-14);
        for k in 0..3 {
            assert!(r[(k, k)] >= 0.0);
        }
    }

    #[test]
    fn eigenvalues_of_companion_matrix() {
        // roots 1, 2, 3
        let c = m(3, &[6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let e = eigenvalues(&c).unwrap();
        for (z, want) in e.iter().zip([3.0, 2.0, 1.0]) {
            assert!((z.re - want).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_block_eigenvalues() {
        let r = m(2, &[0.0, -1.0, 1.0, 0.0]);
        let e = eigenvalues(&r).unwrap();
        assert!((e[0].im.abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_keeps_small_eigenvalues() {
        let a = m(3, &[3.0, 1.0, 0.2, 0.5, 1.0, 0.1, 0.1, 0.3, 0.4]);
        let fs: Vec<&Mat> = core::iter::repeat_n(&a, 40).collect();
        let single = eigenvalues(&a).unwrap();
        let prod = product_log_eigen(&fs).unwrap();
        for (e, z) in prod.iter().zip(&single) {
            assert!((e.log_abs - 40.0 * z.norm().ln()).abs() < 1e-9 * 40.0);
        }
    }

    #[test]
    fn product_with_complex_pair() {
        let c = 0.6f64.cos();
        let s = 0.6f64.sin();
        let a = m(3, &[2.0 * c, -2.0 * s, 0.0, 2.0 * s, 2.0 * c, 0.0, 0.0, 0.0, 0.5]);
        let b = m(3, &[1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let fs = [&a, &b, &a];
        let direct = eigenvalues(&a.mul(&b).mul(&a)).unwrap();
        let prod = product_log_eigen(&fs).unwrap();
        for (e, z) in prod.iter().zip(&direct) {
            assert!((e.value() - z).norm() < 1e-10 * (1.0 + z.norm()));
        }
    }
}
