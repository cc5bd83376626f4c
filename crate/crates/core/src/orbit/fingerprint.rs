use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{format_word, Gen, Word};
use crate::rep::{projective_multipliers, proximality_check, Representation, Spectrum};

/// Amplitude of the random deformation behind the auxiliary representation.
pub const AUX_TWIST_AMPLITUDE: f64 = 0.15;
/// Relative tolerance under which two classes are considered equal.
pub const MATCH_TOL: f64 = 1e-11;

/// Conjugation invariants of one class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassInvariants {
    pub d_top: f64,
    pub d_spread: f64,
    pub mu: Vec<Complex64>,
    /// `log|tr|` of the class and of its inverse under the auxiliary representation.
    pub aux: [f64; 2],
}

impl ClassInvariants {
    /// Whether two invariant sets agree to [`MATCH_TOL`].
    pub fn matches(&self, o: &ClassInvariants) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= MATCH_TOL * a.abs().max(b.abs()).max(1.0);
        close(self.d_top, o.d_top)
            && close(self.d_spread, o.d_spread)
            && close(self.aux[0], o.aux[0])
            && close(self.aux[1], o.aux[1])
    }
}

/// Computes class invariants under the main representation and a seeded
/// auxiliary 3-dimensional representation: a random point of the
/// representation variety near the symmetric-square lift of the octagon group.
///
/// The auxiliary representation separates classes that every
/// 2-dimensional representation confuses, such as a class and its inverse
/// or a word and its reverse.
pub struct Fingerprinter<'a> {
    rep: &'a Representation,
    aux: Vec<[f64; 9]>,
    tol: f64,
}

impl<'a> Fingerprinter<'a> {
    pub fn new(rep: &'a Representation, seed: u64, proximality_tol: f64) -> Result<Self> {
        let aux_rep = Representation::fuchsian_octagon(rep.genus())?.symmetric_power_lift(3)?.deformed(seed, AUX_TWIST_AMPLITUDE)?;
        let aux = aux_rep
            .generators()
            .iter()
            .map(|m| {
                let mut a = [0.0; 9];
                a.copy_from_slice(m.as_slice());
                a
            })
            .collect();
        Ok(Fingerprinter { rep, aux, tol: proximality_tol })
    }

    pub fn representation(&self) -> &Representation {
        self.rep
    }

    pub fn invariants(&self, w: &[Gen]) -> Result<ClassInvariants> {
        let s: Spectrum = self.rep.spectrum(w)?;
        if let Err(e) = proximality_check(&s, self.tol) {
            return Err(Error::Domain(alloc::format!("class {}: {e}", format_word(&Word::new(w.to_vec())))));
        }
        let le = s.log_eigen();
        let d_top = le[0].log_abs;
        let d_spread = le[0].log_abs - le[le.len() - 1].log_abs;
        let mu = projective_multipliers(&s)?;
        Ok(ClassInvariants { d_top, d_spread, mu, aux: self.aux_invariants(w) })
    }

    fn aux_invariants(&self, w: &[Gen]) -> [f64; 2] {
        let (mut f, mut fs) = ([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 0.0);
        let (mut b, mut bs) = (f, 0.0);
        for &x in w {
            f = mul3(&f, &self.aux[x as usize]);
            fs += renorm(&mut f);
        }
        for &x in w.iter().rev() {
            b = mul3(&b, &self.aux[(x ^ 1) as usize]);
            bs += renorm(&mut b);
        }
        let tr = |m: &[f64; 9]| m[0] + m[4] + m[8];
        [tr(&f).abs().ln() + fs, tr(&b).abs().ln() + bs]
    }
}

fn mul3(a: &[f64; 9], b: &[f64; 9]) -> [f64; 9] {
    let mut r = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            r[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
        }
    }
    r
}

fn renorm(m: &mut [f64; 9]) -> f64 {
    let s = m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if s > 1e100 {
        m.iter_mut().for_each(|x| *x /= s);
        s.ln()
    } else {
        0.0
    }
}

/// 64-bit fingerprint: SHA-256 over the minimal length, abelianisation and
/// invariants rounded on a `1e-9` grid.
pub fn fingerprint(p: usize, ab: &[i32], inv: &ClassInvariants) -> u64 {
    let mut h = Sha256::new();
    h.update((p as u64).to_le_bytes());
    for &a in ab {
        h.update(a.to_le_bytes());
    }
    for x in [inv.d_top, inv.d_spread, inv.aux[0], inv.aux[1]] {
        h.update(((x * 1e9).round() as i64).to_le_bytes());
    }
    let d = h.finalize();
    u64::from_be_bytes([d[0], d[1], d[2], d[3], d[4], d[5], d[6], d[7]])
}

/// Lower-case hex of a SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in d {
        let _ = core::fmt::Write::write_fmt(&mut s, format_args!("{b:02x}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_word;

    #[test]
    fn conjugates_share_invariants() {
        let rep = Representation::fuchsian_octagon(2).unwrap();
        let f = Fingerprinter::new(&rep, 11, 1e-6).unwrap();
        let w = parse_word("a1b1a2B1").unwrap();
        let c = parse_word("b2A1").unwrap();
        let conj = c.concat(&w).concat(&c.inverse()).cyclically_reduced();
        let (i1, i2) = (f.invariants(w.letters()).unwrap(), f.invariants(conj.letters()).unwrap());
        assert!(i1.matches(&i2));
        let ab = w.exponent_sums(2);
        assert_eq!(fingerprint(4, &ab, &i1), fingerprint(4, &ab, &i1));
    }

    #[test]
    fn inverse_class_separated() {
        let rep = Representation::fuchsian_octagon(2).unwrap();
        let f = Fingerprinter::new(&rep, 11, 1e-6).unwrap();
        let w = parse_word("a1b1A1B1").unwrap();
        let a = f.invariants(w.letters()).unwrap();
        let b = f.invariants(w.inverse().letters()).unwrap();
        assert!((a.d_top - b.d_top).abs() < 1e-12);
        assert!(!a.matches(&b));
    }
}
