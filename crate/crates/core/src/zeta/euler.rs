use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::orbit::OrbitDatabase;
use crate::rep::UnitaryCharacter;

const POLE_TOL: f64 = 1e-14;

/// Record indices with weight `≤ t` (all records when `t` is `None`),
/// sorted by weight. Fails if `t` lies beyond the completeness region.
pub(crate) fn selected(db: &OrbitDatabase, t: Option<f64>) -> Result<Vec<usize>> {
    if let Some(t) = t {
        if t > db.complete_weight() {
            return Err(Error::Completeness { requested: t, limit: db.complete_weight() });
        }
    }
    let mut idx: Vec<usize> = (0..db.len()).filter(|&i| t.is_none_or(|t| db.weight(i) <= t)).collect();
    idx.sort_by(|&a, &b| db.weight(a).total_cmp(&db.weight(b)).then(a.cmp(&b)));
    Ok(idx)
}

/// `log(1 - q)`, rejecting factors too close to zero. Small `q` uses the
/// series, which keeps the bits that `1 - q` would round away.
fn log_one_minus(q: Complex64) -> Result<Complex64> {
    if q.norm() < 1e-3 {
        let c = |k: f64| Complex64::new(1.0 / k, 0.0);
        return Ok(-q * (c(1.0) + q * (c(2.0) + q * (c(3.0) + q * (c(4.0) + q * (c(5.0) + q * c(6.0)))))));
    }
    let f = Complex64::new(1.0, 0.0) - q;
    if f.norm() < POLE_TOL {
        return Err(Error::PoleProximity(f.norm()));
    }
    Ok(f.ln())
}

/// Per-record eigenvalues of the character on the class.
fn character_eigenvalues(db: &OrbitDatabase, chi: &UnitaryCharacter, idx: &[usize]) -> Result<Vec<Vec<Complex64>>> {
    if let UnitaryCharacter::Abelian { theta } = chi {
        if theta.len() != 2 * db.genus() {
            return Err(Error::Input("character genus does not match the database".into()));
        }
    }
    idx.iter()
        .map(|&i| {
            let r = db.record(i);
            match chi {
                UnitaryCharacter::Abelian { .. } => Ok(alloc::vec![chi.phase(r.ab)?]),
                UnitaryCharacter::Explicit { .. } => chi.matrix(r.word).eigenvalues(),
            }
        })
        .collect()
}

/// `Σ_g Σ_{n=0}^{n_n} Σ_i log(1 - e^{-(s+n) w_g} λ_i)` over the selected
/// classes, summed in weight order.
fn log_product(
    db: &OrbitDatabase,
    idx: &[usize],
    eig: Option<&[Vec<Complex64>]>,
    s: Complex64,
    n_n: usize,
) -> Result<Complex64> {
    let one = [Complex64::new(1.0, 0.0)];
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &i) in idx.iter().enumerate() {
        let w = db.weight(i);
        let step = (-w).exp();
        let mut q = (-s * w).exp();
        let lams: &[Complex64] = match eig {
            Some(e) => &e[k],
            None => &one,
        };
        let mut local = Complex64::new(0.0, 0.0);
        for _ in 0..=n_n {
            for &l in lams {
                local += log_one_minus(q * l)?;
            }
            q *= step;
        }
        acc += local;
    }
    Ok(acc)
}

/// `Π_g (1 - e^{-s w_g})^{-1}` over classes with weight `≤ t`.
pub fn euler_zeta(db: &OrbitDatabase, s: Complex64, t: Option<f64>) -> Result<Complex64> {
    let idx = selected(db, t)?;
    Ok((-log_product(db, &idx, None, s, 0)?).exp())
}

/// `Π_{n=0}^{n_n} Π_g (1 - e^{-(s+n) w_g})`.
pub fn euler_selberg(db: &OrbitDatabase, s: Complex64, t: Option<f64>, n_n: usize) -> Result<Complex64> {
    let idx = selected(db, t)?;
    Ok(log_product(db, &idx, None, s, n_n)?.exp())
}

/// `Π_g det(I - e^{-s w_g} R_χ(g))^{-1}`.
pub fn l_euler_zeta(db: &OrbitDatabase, chi: &UnitaryCharacter, s: Complex64, t: Option<f64>) -> Result<Complex64> {
    let idx = selected(db, t)?;
    let eig = character_eigenvalues(db, chi, &idx)?;
    Ok((-log_product(db, &idx, Some(&eig), s, 0)?).exp())
}

/// `Π_{n=0}^{n_n} Π_g det(I - e^{-(s+n) w_g} R_χ(g))`.
pub fn l_euler_selberg(
    db: &OrbitDatabase,
    chi: &UnitaryCharacter,
    s: Complex64,
    t: Option<f64>,
    n_n: usize,
) -> Result<Complex64> {
    let idx = selected(db, t)?;
    let eig = character_eigenvalues(db, chi, &idx)?;
    Ok(log_product(db, &idx, Some(&eig), s, n_n)?.exp())
}

/// Bound on `|log|` of the factor by which a matched Selberg ratio with
/// `n_n` shifts differs from the zeta product: `Σ_g e^{-(Re s + n_n + 1) w_g}`.
pub fn selberg_truncation_bound(db: &OrbitDatabase, s: Complex64, n_n: usize, t: Option<f64>) -> Result<f64> {
    let idx = selected(db, t)?;
    Ok(idx.iter().map(|&i| (-(s.re + n_n as f64 + 1.0) * db.weight(i)).exp()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{Cutoff, PrimitiveClassRecord, WeightMode};

    fn single(d: f64) -> OrbitDatabase {
        let mut db = OrbitDatabase::new(2, 2, Cutoff::Length(1), WeightMode::Top, "t".into());
        db.push(&PrimitiveClassRecord {
            word: alloc::vec![0],
            d_top: d,
            d_spread: 2.0 * d,
            mu: alloc::vec![Complex64::new((-2.0 * d).exp(), 0.0)],
            ab: alloc::vec![1, 0, 0, 0],
            fp: 1,
        })
        .unwrap();
        db
    }

    #[test]
    fn empty_products_are_one() {
        let db = OrbitDatabase::new(2, 2, Cutoff::Length(0), WeightMode::Top, "t".into());
        let s = Complex64::new(2.0, 0.3);
        assert_eq!(euler_zeta(&db, s, None).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(euler_selberg(&db, s, None, 3).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn single_class_values() {
        let db = single(2f64.ln());
        let s = Complex64::new(2.0, 0.0);
        assert!((euler_zeta(&db, s, None).unwrap() - Complex64::new(4.0 / 3.0, 0.0)).norm() < 1e-15);
        let z = euler_selberg(&db, s, None, 1).unwrap();
        assert!((z - Complex64::new(21.0 / 32.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn abelian_single_class_factor() {
        let db = single(2f64.ln());
        let p = crate::group::GroupPresentation::surface(2).unwrap();
        let chi = UnitaryCharacter::abelian(&p, alloc::vec![0.25, 0.0, 0.0, 0.0]).unwrap();
        let s = Complex64::new(2.0, 0.0);
        let want = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - Complex64::new(0.0, 0.25));
        assert!((l_euler_zeta(&db, &chi, s, None).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn small_factor_series_matches_logarithm() {
        for x in [9e-4, -8e-4, 3e-7] {
            let exact = (-x).ln_1p();
            assert!((log_one_minus(Complex64::new(x, 0.0)).unwrap().re - exact).abs() <= 1e-15 * exact.abs());
        }
        let q = Complex64::new(-3e-4, -8e-4);
        let direct = (Complex64::new(1.0, 0.0) - q).ln();
        assert!((log_one_minus(q).unwrap() - direct).norm() <= 1e-12 * direct.norm());
        let tiny = Complex64::new(1e-20, 0.0);
        assert_eq!(log_one_minus(tiny).unwrap(), -tiny);
    }

    #[test]
    fn pole_proximity_detected() {
        let db = single(1e-16);
        assert!(matches!(euler_zeta(&db, Complex64::new(1.0, 0.0), None), Err(Error::PoleProximity(_))));
    }

    #[test]
    fn completeness_enforced() {
        let mut db = single(1.0);
        db.set_complete_weight(1.0);
        assert!(matches!(euler_zeta(&db, Complex64::new(3.0, 0.0), Some(2.0)), Err(Error::Completeness { .. })));
    }
}
