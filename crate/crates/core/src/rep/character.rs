use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::group::{Gen, GroupPresentation};

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn identity(n: usize) -> Self {
        let mut data = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        CMat { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Input(alloc::format!("expected {} complex entries, got {}", n * n, data.len())));
        }
        Ok(CMat { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        let n = self.n;
        let mut data = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        CMat { n, data }
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut data = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        CMat { n, data }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn dist(&self, o: &CMat) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues via a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        if self.n == 1 {
            return Ok(alloc::vec![self.data[0]]);
        }
        let m = nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.data);
        let schur = m
            .try_schur(f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numeric("complex Schur decomposition did not converge".into()))?;
        let ev = schur
            .eigenvalues()
            .ok_or_else(|| Error::Numeric("complex Schur form not triangular".into()))?;
        Ok(ev.iter().copied().collect())
    }

    /// Coefficients `e_0 .. e_n` of `det(I + tM) = Σ e_k t^k`
    /// (elementary symmetric functions of the eigenvalues), by Faddeev-LeVerrier.
    pub fn elementary_symmetric(&self) -> Vec<Complex64> {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        // char poly det(xI - M) = x^n + c_1 x^{n-1} + ... + c_n, e_k = (-1)^k c_k
        let mut c = alloc::vec![zero; n + 1];
        c[0] = Complex64::new(1.0, 0.0);
        let mut mk = CMat { n, data: alloc::vec![zero; n * n] };
        for k in 1..=n {
            let mut prev = mk.clone();
            for i in 0..n {
                prev.data[i * n + i] += c[k - 1];
            }
            mk = self.mul(&prev);
            c[k] = -mk.trace() / k as f64;
        }
        c.iter().enumerate().map(|(k, &ck)| if k % 2 == 0 { ck } else { -ck }).collect()
    }
}

/// Unitary representation of the surface group used to twist zeta functions.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitaryCharacter {
    /// One-dimensional character `exp(2πi Σ θ_k ab_k)` of the abelianisation.
    Abelian { theta: Vec<f64> },
    /// `N`-dimensional unitary matrices for every generator, inverses included.
    Explicit { mats: Vec<CMat>, tolerance: f64 },
}

impl UnitaryCharacter {
    pub fn trivial(genus: usize) -> Self {
        UnitaryCharacter::Abelian { theta: alloc::vec![0.0; 2 * genus] }
    }

    pub fn abelian(p: &GroupPresentation, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != 2 * p.genus() {
            return Err(Error::Input(alloc::format!(
                "theta needs {} entries, got {}",
                2 * p.genus(),
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Input("theta entries must be finite".into()));
        }
        Ok(UnitaryCharacter::Abelian { theta })
    }

    /// `mats` holds either one matrix per generator pair (`a1, b1, a2, ...`,
    /// inverses derived as adjoints) or all `4g` matrices in index order.
    pub fn explicit(p: &GroupPresentation, mats: Vec<CMat>, tolerance: f64) -> Result<Self> {
        let ngen = p.num_generators();
        let n = mats.first().map(CMat::dim).ok_or_else(|| Error::Input("no matrices".into()))?;
        if mats.iter().any(|m| m.dim() != n) {
            return Err(Error::Input("character matrices differ in size".into()));
        }
        let full: Vec<CMat> = if mats.len() == ngen / 2 {
            mats.iter().flat_map(|m| [m.clone(), m.adjoint()]).collect()
        } else if mats.len() == ngen {
            mats
        } else {
            return Err(Error::Input(alloc::format!(
                "expected {} or {ngen} character matrices, got {}",
                ngen / 2,
                mats.len()
            )));
        };
        let id = CMat::identity(n);
        for (x, m) in full.iter().enumerate() {
            let r = m.mul(&m.adjoint()).dist(&id);
            if r > tolerance {
                return Err(Error::Validation { check: alloc::format!("generator {x} not unitary"), residual: r });
            }
            let r = m.mul(&full[x ^ 1]).dist(&id);
            if r > tolerance {
                return Err(Error::Validation { check: alloc::format!("generator {x} inverse inconsistent"), residual: r });
            }
        }
        let c = UnitaryCharacter::Explicit { mats: full, tolerance };
        let r = c.matrix(p.relator().letters()).dist(&id);
        if r > tolerance {
            return Err(Error::Validation { check: "character relator".into(), residual: r });
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        match self {
            UnitaryCharacter::Abelian { .. } => 1,
            UnitaryCharacter::Explicit { mats, .. } => mats[0].dim(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            UnitaryCharacter::Abelian { theta } => theta.iter().all(|&t| t == t.round()),
            UnitaryCharacter::Explicit { mats, .. } => {
                let id = CMat::identity(mats[0].dim());
                mats.iter().all(|m| m.dist(&id) == 0.0)
            }
        }
    }

    /// Value on an abelianisation vector (abelian mode only).
    pub fn phase(&self, ab: &[i32]) -> Result<Complex64> {
        match self {
            UnitaryCharacter::Abelian { theta } => {
                if ab.len() != theta.len() {
                    return Err(Error::Input("abelianisation vector has the wrong length".into()));
                }
                let t: f64 = theta.iter().zip(ab).map(|(t, &a)| t * a as f64).sum();
                let t = t - t.floor();
                Ok(Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * t))
            }
            UnitaryCharacter::Explicit { .. } => {
                Err(Error::Input("explicit characters are evaluated on words".into()))
            }
        }
    }

    /// The unitary matrix of a word.
    pub fn matrix(&self, w: &[Gen]) -> CMat {
        match self {
            UnitaryCharacter::Abelian { theta } => {
                let mut ab = alloc::vec![0i32; theta.len()];
                for &x in w {
                    ab[(x / 2) as usize] += if x & 1 == 0 { 1 } else { -1 };
                }
                let z = self.phase(&ab).unwrap_or(Complex64::new(1.0, 0.0));
                CMat { n: 1, data: alloc::vec![z] }
            }
            UnitaryCharacter::Explicit { mats, .. } => {
                w.iter().fold(CMat::identity(mats[0].dim()), |acc, &x| acc.mul(&mats[x as usize]))
            }
        }
    }

    /// Elementary symmetric functions of the eigenvalues of `R_χ(w)`.
    pub fn class_coefficients(&self, w: &[Gen], ab: &[i32]) -> Result<Vec<Complex64>> {
        match self {
            UnitaryCharacter::Abelian { .. } => Ok(alloc::vec![Complex64::new(1.0, 0.0), self.phase(ab)?]),
            UnitaryCharacter::Explicit { .. } => Ok(self.matrix(w).elementary_symmetric()),
        }
    }
}

/// `det(I - q R)` from the elementary symmetric functions of `R`.
pub fn det_one_minus(e: &[Complex64], q: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    for (k, &ek) in e.iter().enumerate() {
        acc += if k % 2 == 0 { ek * qk } else { -ek * qk };
        qk *= q;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_word;

    #[test]
    fn zero_theta_is_one() {
        let c = UnitaryCharacter::trivial(2);
        assert_eq!(c.phase(&[3, -1, 2, 5]).unwrap(), Complex64::new(1.0, 0.0));
        assert!(c.is_trivial());
    }

    #[test]
    fn relator_maps_to_one() {
        let p = GroupPresentation::surface(2).unwrap();
        let c = UnitaryCharacter::abelian(&p, alloc::vec![0.13, 0.71, 0.29, 0.5]).unwrap();
        let m = c.matrix(p.relator().letters());
        assert!((m.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn explicit_permutation_character() {
        let p = GroupPresentation::surface(2).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let swap = CMat::from_row_major(2, alloc::vec![z, one, one, z]).unwrap();
        let id = CMat::identity(2);
        let c = UnitaryCharacter::explicit(&p, alloc::vec![swap.clone(), id.clone(), id, swap], 1e-12).unwrap();
        let w = parse_word("a1b2").unwrap();
        let e = c.class_coefficients(w.letters(), &w.exponent_sums(2)).unwrap();
        // swap·swap = I: eigenvalues 1, 1
        assert!((e[1] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((det_one_minus(&e, Complex64::new(0.5, 0.0)) - Complex64::new(0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn non_unitary_rejected() {
        let p = GroupPresentation::surface(2).unwrap();
        let m = CMat::from_row_major(1, alloc::vec![Complex64::new(2.0, 0.0)]).unwrap();
        let id = CMat::identity(1);
        assert!(UnitaryCharacter::explicit(&p, alloc::vec![m, id.clone(), id.clone(), id], 1e-9).is_err());
    }

    #[test]
    fn elementary_symmetric_of_diagonal() {
        let d = |a: f64| Complex64::new(a, 0.0);
        let z = d(0.0);
        let m = CMat::from_row_major(3, alloc::vec![d(1.0), z, z, z, d(2.0), z, z, z, d(3.0)]).unwrap();
        let e = m.elementary_symmetric();
        for (a, b) in e.iter().zip([1.0, 6.0, 11.0, 6.0]) {
            assert!((a - d(b)).norm() < 1e-12);
        }
    }
}
