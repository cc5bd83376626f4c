//! Primitive conjugacy classes with their spectral data.

mod brute;
mod enumerate;
mod fingerprint;

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use brute::brute_force_classes;
pub use enumerate::{enumerate_primitive_classes, enumerate_with_sink, EnumerationOptions, EnumerationStats};
pub use fingerprint::{fingerprint, sha256_hex, ClassInvariants, Fingerprinter, AUX_TWIST_AMPLITUDE, MATCH_TOL};
pub use brute::BRUTE_FORCE_MAX_LENGTH;

use crate::error::{Error, Result};
use crate::group::Gen;

/// Tolerance for the identity `Π|μ_j| = e^{-d·d_top}`.
pub const MULTIPLIER_IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    /// Every primitive class of minimal length at most `n`.
    Length(usize),
    /// Every primitive class of weight at most `T`.
    Weight(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// `log |λ₁|`
    #[default]
    Top,
    /// `log(|λ₁| / |λ_d|)`
    Spread,
}

impl WeightMode {
    pub fn name(self) -> &'static str {
        match self {
            WeightMode::Top => "top",
            WeightMode::Spread => "spread",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "top" => Ok(WeightMode::Top),
            "spread" => Ok(WeightMode::Spread),
            _ => Err(Error::Input(alloc::format!("unknown weight mode {s:?}"))),
        }
    }
}

/// One primitive conjugacy class.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveClassRecord {
    /// Least rotation of a minimal-length cyclic word.
    pub word: Vec<Gen>,
    pub d_top: f64,
    pub d_spread: f64,
    /// `λ_{j+1}/λ₁`, `j = 1..d-1`.
    pub mu: Vec<Complex64>,
    pub ab: Vec<i32>,
    pub fp: u64,
}

impl PrimitiveClassRecord {
    pub fn p(&self) -> usize {
        self.word.len()
    }

    pub fn as_ref(&self) -> RecordRef<'_> {
        RecordRef {
            word: &self.word,
            d_top: self.d_top,
            d_spread: self.d_spread,
            mu: &self.mu,
            ab: &self.ab,
            fp: self.fp,
        }
    }
}

/// Borrowed view of a record inside an [`OrbitDatabase`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordRef<'a> {
    pub word: &'a [Gen],
    pub d_top: f64,
    pub d_spread: f64,
    pub mu: &'a [Complex64],
    pub ab: &'a [i32],
    pub fp: u64,
}

impl RecordRef<'_> {
    pub fn p(&self) -> usize {
        self.word.len()
    }

    pub fn to_owned(&self) -> PrimitiveClassRecord {
        PrimitiveClassRecord {
            word: self.word.to_vec(),
            d_top: self.d_top,
            d_spread: self.d_spread,
            mu: self.mu.to_vec(),
            ab: self.ab.to_vec(),
            fp: self.fp,
        }
    }

    /// Relative residual of `Π|μ_j| = e^{-d·d_top}`.
    pub fn multiplier_residual(&self) -> f64 {
        let d = self.mu.len() + 1;
        let log_prod: f64 = self.mu.iter().map(|z| z.norm().ln()).sum();
        let want = -(d as f64) * self.d_top;
        (log_prod - want).exp_m1().abs()
    }
}

/// Column-oriented store of primitive class records.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitDatabase {
    genus: usize,
    dim: usize,
    cutoff: Cutoff,
    weight_mode: WeightMode,
    rep_digest: String,
    complete_weight: f64,
    offsets: Vec<u32>,
    words: Vec<Gen>,
    d_top: Vec<f64>,
    d_spread: Vec<f64>,
    mu: Vec<Complex64>,
    ab: Vec<i32>,
    fp: Vec<u64>,
}

impl OrbitDatabase {
    pub fn new(genus: usize, dim: usize, cutoff: Cutoff, weight_mode: WeightMode, rep_digest: String) -> Self {
        OrbitDatabase {
            genus,
            dim,
            cutoff,
            weight_mode,
            rep_digest,
            complete_weight: f64::INFINITY,
            offsets: alloc::vec![0],
            words: Vec::new(),
            d_top: Vec::new(),
            d_spread: Vec::new(),
            mu: Vec::new(),
            ab: Vec::new(),
            fp: Vec::new(),
        }
    }

    pub fn push(&mut self, r: &PrimitiveClassRecord) -> Result<()> {
        if r.mu.len() + 1 != self.dim || r.ab.len() != 2 * self.genus {
            return Err(Error::Input("record shape does not match the database".into()));
        }
        self.words.extend_from_slice(&r.word);
        self.offsets.push(self.words.len() as u32);
        self.d_top.push(r.d_top);
        self.d_spread.push(r.d_spread);
        self.mu.extend_from_slice(&r.mu);
        self.ab.extend_from_slice(&r.ab);
        self.fp.push(r.fp);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.d_top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_top.is_empty()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.weight_mode
    }

    pub fn set_weight_mode(&mut self, m: WeightMode) {
        self.weight_mode = m;
    }

    pub fn rep_digest(&self) -> &str {
        &self.rep_digest
    }

    /// Weight up to which every primitive class is present.
    pub fn complete_weight(&self) -> f64 {
        self.complete_weight
    }

    pub fn set_complete_weight(&mut self, t: f64) {
        self.complete_weight = t;
    }

    /// Derives the completeness weight from the cutoff and the records.
    pub fn infer_complete_weight(&mut self) {
        self.complete_weight = match self.cutoff {
            Cutoff::Length(n) => self.length_cut_completeness(n),
            Cutoff::Weight(t) => t,
        };
    }

    /// Largest `n` such that every class of minimal length `≤ n` is present.
    pub fn complete_length(&self) -> Option<usize> {
        match self.cutoff {
            Cutoff::Length(n) => Some(n),
            Cutoff::Weight(_) => None,
        }
    }

    pub fn record(&self, i: usize) -> RecordRef<'_> {
        let (a, b) = (self.offsets[i] as usize, self.offsets[i + 1] as usize);
        let m = self.dim - 1;
        let g = 2 * self.genus;
        RecordRef {
            word: &self.words[a..b],
            d_top: self.d_top[i],
            d_spread: self.d_spread[i],
            mu: &self.mu[i * m..(i + 1) * m],
            ab: &self.ab[i * g..(i + 1) * g],
            fp: self.fp[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = RecordRef<'_>> + '_ {
        (0..self.len()).map(move |i| self.record(i))
    }

    pub fn p(&self, i: usize) -> usize {
        (self.offsets[i + 1] - self.offsets[i]) as usize
    }

    /// Weight of record `i` under the database's weight mode.
    pub fn weight(&self, i: usize) -> f64 {
        match self.weight_mode {
            WeightMode::Top => self.d_top[i],
            WeightMode::Spread => self.d_spread[i],
        }
    }

    pub fn max_length(&self) -> usize {
        (0..self.len()).map(|i| self.p(i)).max().unwrap_or(0)
    }

    /// Number of records with minimal length `1..=n_max`.
    pub fn counts_by_length(&self, n_max: usize) -> Vec<u64> {
        let mut c = alloc::vec![0u64; n_max];
        for i in 0..self.len() {
            let p = self.p(i);
            if (1..=n_max).contains(&p) {
                c[p - 1] += 1;
            }
        }
        c
    }

    /// Records with minimal length at most `n`, as a length-cut database.
    pub fn truncate_length(&self, n: usize) -> OrbitDatabase {
        let mut out = OrbitDatabase::new(self.genus, self.dim, Cutoff::Length(n), self.weight_mode, self.rep_digest.clone());
        for r in self.iter().filter(|r| r.p() <= n) {
            out.push(&r.to_owned()).expect("same shape");
        }
        out.complete_weight = out.length_cut_completeness(n);
        out
    }

    /// Multiplies every weight (and the log-moduli of multipliers) by `c`.
    pub fn scaled(&self, c: f64) -> OrbitDatabase {
        let mut out = self.clone();
        out.d_top.iter_mut().for_each(|x| *x *= c);
        out.d_spread.iter_mut().for_each(|x| *x *= c);
        out.mu.iter_mut().for_each(|z| *z = Complex64::from_polar(z.norm().powf(c), z.arg()));
        out.complete_weight *= c;
        out
    }

    /// Smallest weight among records of the two longest lengths. Minimal
    /// weights per length need not increase (genus 2 octagon: 3.28 at
    /// length 5, 2.91 at length 6), so one length alone overstates it.
    pub(crate) fn length_cut_completeness(&self, n: usize) -> f64 {
        (0..self.len())
            .filter(|&i| self.p(i) == n || self.p(i) + 1 == n)
            .map(|i| self.weight(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks `Π|μ_j| = e^{-d·d_top}`, `|μ_j| < 1`, cyclic reducedness,
    /// primitivity as a cyclic word and fingerprint distinctness.
    pub fn verify(&self) -> Result<()> {
        let mut fps: Vec<u64> = self.fp.clone();
        fps.sort_unstable();
        if fps.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Corrupt("duplicate fingerprints".into()));
        }
        for (i, r) in self.iter().enumerate() {
            let res = r.multiplier_residual();
            if !(res <= MULTIPLIER_IDENTITY_TOL) {
                return Err(Error::Corrupt(alloc::format!(
                    "record {i}: multiplier identity residual {res:e}"
                )));
            }
            if r.mu.iter().any(|z| !(z.norm() < 1.0)) || !(r.d_top > 0.0) {
                return Err(Error::Corrupt(alloc::format!("record {i}: weight or multiplier out of range")));
            }
            let w = crate::group::Word::new(r.word.to_vec());
            if w.is_empty() || !w.is_cyclically_reduced() || w.is_proper_power() {
                return Err(Error::Corrupt(alloc::format!("record {i}: word not a primitive cyclic word")));
            }
            if w.exponent_sums(self.genus) != r.ab {
                return Err(Error::Corrupt(alloc::format!("record {i}: abelianisation mismatch")));
            }
        }
        Ok(())
    }
}

/// Outcome of the non-lattice heuristic.
#[derive(Clone, Debug, PartialEq)]
pub struct NonLatticeReport {
    /// `(d_i, d_j, first convergent denominator reaching the ratio)`.
    pub pairs: Vec<(f64, f64, u64)>,
    pub passed: bool,
}

/// Draws random weight pairs and expands their ratios as continued
/// fractions. A ratio counts as rational-looking if a convergent with
/// denominator at most `10^4` matches it to `1e-12` relative; weights are
/// accurate to about `1e-14`, while generic ratios already come within
/// `1e-8` of some convergent with denominator near `10^4`.
pub fn non_lattice_check(db: &OrbitDatabase, pairs: usize, seed: u64) -> NonLatticeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if db.len() < 2 {
        return NonLatticeReport { pairs: out, passed: false };
    }
    let mut tries = 0;
    while out.len() < pairs && tries < 100 * pairs {
        tries += 1;
        let (i, j) = (rng.gen_range(0..db.len()), rng.gen_range(0..db.len()));
        let (a, b) = (db.weight(i), db.weight(j));
        if (a - b).abs() <= 1e-9 * a.max(b) {
            continue;
        }
        out.push((a, b, convergent_denominator(a / b, 1e-12, 10_000)));
    }
    let passed = out.len() == pairs && out.iter().all(|&(_, _, q)| q > 10_000);
    NonLatticeReport { pairs: out, passed }
}

/// Denominator of the first convergent within `tol` (relative) of `x`,
/// or `limit + 1` if none with denominator `≤ limit` exists.
fn convergent_denominator(x: f64, tol: f64, limit: u64) -> u64 {
    let (mut h0, mut h1) = (0.0f64, 1.0f64);
    let (mut k0, mut k1) = (1.0f64, 0.0f64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > limit as f64 {
            return limit + 1;
        }
        if (h2 / k2 - x).abs() <= tol * x.abs() {
            return k2 as u64;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = r - a;
        if f == 0.0 {
            return k2 as u64;
        }
        r = 1.0 / f;
    }
    limit + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(word: Vec<Gen>, d_top: f64) -> PrimitiveClassRecord {
        let mu = alloc::vec![Complex64::new((-2.0 * d_top).exp(), 0.0)];
        let ab = crate::group::Word::new(word.clone()).exponent_sums(2);
        PrimitiveClassRecord { word, d_top, d_spread: 2.0 * d_top, mu, ab, fp: (d_top * 1e6) as u64 }
    }

    #[test]
    fn columnar_roundtrip() {
        let mut db = OrbitDatabase::new(2, 2, Cutoff::Length(2), WeightMode::Top, "x".into());
        let a = rec(alloc::vec![0], 1.5);
        let b = rec(alloc::vec![0, 2], 2.25);
        db.push(&a).unwrap();
        db.push(&b).unwrap();
        assert_eq!(db.record(1).to_owned(), b);
        assert_eq!(db.counts_by_length(3), alloc::vec![1, 1, 0]);
        db.verify().unwrap();
        assert_eq!(db.truncate_length(1).len(), 1);
    }

    #[test]
    fn tampered_weight_is_corrupt() {
        let mut db = OrbitDatabase::new(2, 2, Cutoff::Length(1), WeightMode::Top, "x".into());
        let mut a = rec(alloc::vec![0], 1.5);
        a.d_top += 1e-6;
        db.push(&a).unwrap();
        assert!(matches!(db.verify(), Err(Error::Corrupt(_))));
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(convergent_denominator(0.75, 1e-9, 10_000), 4);
        assert!(convergent_denominator(2f64.sqrt(), 1e-9, 10_000) > 10_000);
    }
}
