//! Linear representations of the surface group and their spectral data.

mod character;
mod spectrum;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use character::{det_one_minus, CMat, UnitaryCharacter};
pub use spectrum::{
    projective_fixed_point, projective_map, projective_multipliers, proximality_check, weight_spread,
    weight_top, Spectrum, DEFAULT_PROXIMALITY_TOL,
};

use crate::error::{Error, Result};
use crate::group::{Gen, GroupPresentation};
use crate::hyperbolic::octagon_generators;
use crate::linalg::{product_log_eigen, Mat};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
const RESCALE_ABOVE: f64 = 1e100;
const DEFORMATION_STEPS: usize = 20;

/// A representation into `SL(d, R)` given on generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    genus: usize,
    dim: usize,
    /// One matrix per generator index, inverses included.
    mats: Vec<Mat>,
    relator_sign: i8,
    tolerance: f64,
}

/// A matrix times `exp(log_scale)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMat {
    pub mat: Mat,
    pub log_scale: f64,
}

impl Representation {
    /// Validates generator matrices. `mats` holds either one matrix per
    /// generator pair in the order `a1, b1, a2, b2, ...` (inverses computed)
    /// or all `4g` matrices in generator-index order.
    pub fn load(p: &GroupPresentation, dim: usize, mats: Vec<Mat>, tolerance: f64) -> Result<Self> {
        let ngen = p.num_generators();
        if dim < 2 {
            return Err(Error::Input(alloc::format!("dimension must be at least 2, got {dim}")));
        }
        if !(tolerance > 0.0) {
            return Err(Error::Input("tolerance must be positive".into()));
        }
        if let Some(m) = mats.iter().find(|m| m.dim() != dim) {
            return Err(Error::Input(alloc::format!("matrix of size {} in a dimension-{dim} representation", m.dim())));
        }
        let full = if mats.len() == ngen / 2 {
            let mut v = Vec::with_capacity(ngen);
            for m in mats {
                check_det(&m, v.len(), tolerance)?;
                let inv = m.inverse()?;
                v.push(m);
                v.push(inv);
            }
            v
        } else if mats.len() == ngen {
            mats
        } else {
            return Err(Error::Input(alloc::format!(
                "expected {} or {ngen} generator matrices, got {}",
                ngen / 2,
                mats.len()
            )));
        };
        let id = Mat::identity(dim);
        for (x, m) in full.iter().enumerate() {
            if !m.is_finite() {
                return Err(Error::Input(alloc::format!("generator {x} has non-finite entries")));
            }
            check_det(m, x, tolerance)?;
            let r = m.mul(&full[x ^ 1]).sub(&id).max_abs();
            if r > tolerance {
                return Err(Error::Validation {
                    check: alloc::format!("inverse consistency of generator {x}"),
                    residual: r,
                });
            }
        }
        let rel = p
            .relator()
            .letters()
            .iter()
            .fold(Mat::identity(dim), |acc, &x| acc.mul(&full[x as usize]));
        let plus = rel.sub(&id).max_abs();
        let minus = rel.add(&id).max_abs();
        let relator_sign = if plus <= tolerance {
            1
        } else if minus <= tolerance {
            -1
        } else {
            return Err(Error::Validation { check: "relator evaluates to ±I".into(), residual: plus.min(minus) });
        };
        Ok(Representation { genus: p.genus(), dim, mats: full, relator_sign, tolerance })
    }

    /// Side pairings of the regular `4g`-gon.
    pub fn fuchsian_octagon(genus: usize) -> Result<Self> {
        let p = GroupPresentation::surface(genus)?;
        let mats = octagon_generators(genus)?;
        for (x, m) in mats.iter().enumerate() {
            if m.trace().abs() <= 2.0 {
                return Err(Error::Construction(alloc::format!("generator {x} is not hyperbolic")));
            }
        }
        Self::load(&p, 2, mats, DEFAULT_TOLERANCE).map_err(|e| match e {
            Error::Validation { check, residual } => {
                Error::Construction(alloc::format!("octagon construction failed {check}: residual {residual:e}"))
            }
            e => e,
        })
    }

    /// Composition with the irreducible representation of `SL(2,R)` on
    /// homogeneous polynomials of degree `d-1`.
    pub fn symmetric_power_lift(&self, d: usize) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::Input("symmetric power lift needs a 2-dimensional representation".into()));
        }
        if d < 2 {
            return Err(Error::Input("lift dimension must be at least 2".into()));
        }
        let mats: Vec<Mat> = self.mats.iter().map(|m| symmetric_power(m, d)).collect();
        let p = GroupPresentation::surface(self.genus)?;
        let tol = self.tolerance * (d * d) as f64 * self.mats.iter().map(Mat::max_abs).fold(1.0, f64::max).powi(d as i32);
        Self::load(&p, d, mats, tol.max(self.tolerance))
    }

    /// A nearby point of the representation variety in general position.
    /// Each positive generator is multiplied by `exp(X)` with `X` traceless;
    /// `X` follows a seeded random walk of total step size `amp` per
    /// coordinate, and after every step the generators are projected back
    /// onto the relator constraint by minimum-norm Gauss-Newton steps.
    pub fn deformed(&self, seed: u64, amp: f64) -> Result<Self> {
        let (d, g) = (self.dim, self.genus);
        let basis = traceless_basis(d);
        let nb = basis.len();
        let base: Vec<Mat> = (0..2 * g).map(|k| self.mats[2 * k].clone()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eps: Vec<f64> = alloc::vec![0.0; 2 * g * nb];
        let target = Mat::identity(d).scale(self.relator_sign as f64);
        let gens = |eps: &[f64]| -> Vec<Mat> {
            (0..2 * g)
                .map(|k| {
                    let mut x = Mat::zeros(d);
                    for (b, e) in basis.iter().zip(&eps[k * nb..(k + 1) * nb]) {
                        x = x.add(&b.scale(*e));
                    }
                    base[k].mul(&x.expm())
                })
                .collect()
        };
        // relator residual without the last diagonal entry
        let residual = |eps: &[f64]| -> Result<Vec<f64>> {
            let m = gens(eps);
            let mut full = Vec::with_capacity(4 * g);
            for a in &m {
                full.push(a.clone());
                full.push(a.inverse()?);
            }
            let mut prod = Mat::identity(d);
            for k in 0..g {
                for x in [4 * k, 4 * k + 2, 4 * k + 1, 4 * k + 3] {
                    prod = prod.mul(&full[x]);
                }
            }
            let r = prod.sub(&target);
            Ok(r.as_slice()[..d * d - 1].to_vec())
        };
        let jacobian = |eps: &[f64]| -> Result<(Vec<f64>, usize)> {
            let h = 1e-6;
            let n = eps.len();
            let mut jac = Vec::new();
            let mut m = 0;
            for c in 0..n {
                let mut e = eps.to_vec();
                e[c] += h;
                let rp = residual(&e)?;
                e[c] -= 2.0 * h;
                let rm = residual(&e)?;
                if c == 0 {
                    m = rp.len();
                    jac = alloc::vec![0.0; m * n];
                }
                for i in 0..m {
                    jac[i * n + c] = (rp[i] - rm[i]) / (2.0 * h);
                }
            }
            Ok((jac, m))
        };
        // J^T (J J^T)^{-1} r
        let min_norm = |jac: &[f64], m: usize, r: &[f64]| -> Result<Vec<f64>> {
            let n = jac.len() / m;
            let mut jjt = Mat::zeros(m);
            for i in 0..m {
                for j in 0..m {
                    jjt[(i, j)] = (0..n).map(|c| jac[i * n + c] * jac[j * n + c]).sum();
                }
            }
            let inv = jjt.inverse()?;
            let y: Vec<f64> = (0..m).map(|i| (0..m).map(|j| inv[(i, j)] * r[j]).sum()).collect();
            Ok((0..n).map(|c| (0..m).map(|i| jac[i * n + c] * y[i]).sum()).collect())
        };
        let size = |r: &[f64]| r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut converged = false;
        for _ in 0..DEFORMATION_STEPS {
            let (jac, m) = jacobian(&eps)?;
            let n = eps.len();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let jv: Vec<f64> = (0..m).map(|i| (0..n).map(|c| jac[i * n + c] * v[c]).sum()).collect();
            let corr = min_norm(&jac, m, &jv)?;
            let delta = amp / DEFORMATION_STEPS as f64;
            for c in 0..n {
                eps[c] += delta * (v[c] - corr[c]);
            }
            converged = false;
            let mut r = residual(&eps)?;
            for _ in 0..40 {
                let cur = size(&r);
                if cur < 1e-12 {
                    converged = true;
                    break;
                }
                let (jac, m) = jacobian(&eps)?;
                let step = min_norm(&jac, m, &r)?;
                let mut t = 1.0;
                let mut improved = false;
                for _ in 0..30 {
                    let trial: Vec<f64> = eps.iter().zip(&step).map(|(e, s)| e - t * s).collect();
                    let rt = residual(&trial)?;
                    if size(&rt) < cur {
                        eps = trial;
                        r = rt;
                        improved = true;
                        break;
                    }
                    t *= 0.5;
                }
                if !improved {
                    converged = cur < 1e-9;
                    break;
                }
            }
            if !converged {
                break;
            }
        }
        if !converged {
            return Err(Error::Construction("deformation did not return to the representation variety".into()));
        }
        let p = GroupPresentation::surface(g)?;
        Self::load(&p, d, gens(&eps), self.tolerance.max(1e-9))
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn relator_sign(&self) -> i8 {
        self.relator_sign
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn generator(&self, x: Gen) -> &Mat {
        &self.mats[x as usize]
    }

    pub fn generators(&self) -> &[Mat] {
        &self.mats
    }

    /// Product of generator matrices, renormalised whenever an entry exceeds `1e100`.
    pub fn evaluate(&self, w: &[Gen]) -> ScaledMat {
        let mut mat = Mat::identity(self.dim);
        let mut log_scale = 0.0;
        for &x in w {
            mat = mat.mul(&self.mats[x as usize]);
            let m = mat.max_abs();
            if m > RESCALE_ABOVE {
                mat = mat.scale(1.0 / m);
                log_scale += m.ln();
            }
        }
        ScaledMat { mat, log_scale }
    }

    /// Spectrum of `ρ(w)` computed from the factors.
    pub fn spectrum(&self, w: &[Gen]) -> Result<Spectrum> {
        if w.is_empty() {
            return Spectrum::of_matrix(&Mat::identity(self.dim));
        }
        let factors: Vec<&Mat> = w.iter().map(|&x| &self.mats[x as usize]).collect();
        Ok(Spectrum::from_log_eigen(product_log_eigen(&factors)?))
    }
}

fn check_det(m: &Mat, x: usize, tol: f64) -> Result<()> {
    let r = (m.det() - 1.0).abs();
    if r > tol {
        return Err(Error::Validation { check: alloc::format!("determinant of generator {x}"), residual: r });
    }
    Ok(())
}

/// Matrix of `g = [[a, b], [c, d]]` on the basis `x^{n-1}, x^{n-2} y, ..., y^{n-1}`;
/// column `i` holds the coefficients of `(a x + c y)^{n-1-i} (b x + d y)^i`.
pub fn symmetric_power(g: &Mat, n: usize) -> Mat {
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let mut out = Mat::zeros(n);
    for i in 0..n {
        let p1 = binomial_poly(a, c, n - 1 - i);
        let p2 = binomial_poly(b, d, i);
        // coefficient index = power of y
        for (k1, v1) in p1.iter().enumerate() {
            for (k2, v2) in p2.iter().enumerate() {
                out[(k1 + k2, i)] += v1 * v2;
            }
        }
    }
    out
}

/// Coefficients of `(u x + v y)^m` indexed by the power of `y`.
fn binomial_poly(u: f64, v: f64, m: usize) -> Vec<f64> {
    let mut c = alloc::vec![0.0; m + 1];
    let mut binom = 1.0;
    for (k, ck) in c.iter_mut().enumerate() {
        *ck = binom * u.powi((m - k) as i32) * v.powi(k as i32);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    c
}

/// Basis of the traceless `d x d` matrices.
fn traceless_basis(d: usize) -> Vec<Mat> {
    let mut out = Vec::with_capacity(d * d - 1);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let mut m = Mat::zeros(d);
                m[(i, j)] = 1.0;
                out.push(m);
            }
        }
    }
    for i in 0..d - 1 {
        let mut m = Mat::zeros(d);
        m[(i, i)] = 1.0;
        m[(i + 1, i + 1)] = -1.0;
        out.push(m);
    }
    out
}
