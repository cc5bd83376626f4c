//! Uniformisation of the genus-`g` surface by the regular `4g`-gon with
//! angles `2π/4g`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::group::GroupPresentation;
use crate::linalg::Mat;

type C2 = [Complex64; 4];

fn c2_mul(a: &C2, b: &C2) -> C2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn c2_inv(a: &C2) -> C2 {
    let det = a[0] * a[3] - a[1] * a[2];
    [a[3] / det, -a[1] / det, -a[2] / det, a[0] / det]
}

/// Disk rotation by angle `t` about the origin, as an element of SU(1,1).
fn rot(t: f64) -> C2 {
    let z = Complex64::from_polar(1.0, t / 2.0);
    [z, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), z.conj()]
}

/// Disk isometry taking 0 to `p`.
fn translate_to(p: Complex64) -> C2 {
    let s = 1.0 / (1.0 - p.norm_sqr()).sqrt();
    [Complex64::new(s, 0.0), p * s, p.conj() * s, Complex64::new(s, 0.0)]
}

/// Half-turn about `p`.
fn half_turn(p: Complex64) -> C2 {
    let t = translate_to(p);
    c2_mul(&c2_mul(&t, &rot(core::f64::consts::PI)), &c2_inv(&t))
}

/// Conjugates SU(1,1) to SL(2,R) via the Cayley transform.
fn to_real(m: &C2) -> Result<Mat> {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let c = [one, -i, one, i];
    let x = c2_mul(&c2_mul(&c2_inv(&c), m), &c);
    let imag = x.iter().fold(0.0f64, |s, z| s.max(z.im.abs()));
    if imag > 1e-9 {
        return Err(Error::Construction("octagon side pairing not real after conjugation".into()));
    }
    Mat::from_row_major(2, x.iter().map(|z| z.re).collect())
}

/// Side-pairing geometry of the regular `4g`-gon.
struct Polygon {
    sides: usize,
    mid_radius: f64,
}

impl Polygon {
    fn new(genus: usize) -> Self {
        let n = 4 * genus;
        let pi = core::f64::consts::PI;
        let alpha = 2.0 * pi / n as f64;
        let cosh_rho = (alpha / 2.0).cos() / (pi / n as f64).sin();
        let rho = cosh_rho.acosh();
        Polygon { sides: n, mid_radius: (rho / 2.0).tanh() }
    }

    fn theta(&self, k: usize) -> f64 {
        2.0 * core::f64::consts::PI * k as f64 / self.sides as f64
    }

    /// Isometry carrying side `j` onto side `i` with the polygon landing on the far side.
    fn pairing(&self, i: usize, j: usize) -> C2 {
        let p = Complex64::from_polar(self.mid_radius, self.theta(i));
        c2_mul(&half_turn(p), &rot(self.theta(i) - self.theta(j)))
    }
}

/// Generator matrices in SL(2,R) for the presentation `a1 b1 A1 B1 ...`,
/// indexed like the generators (inverses included).
///
/// Sides of the polygon are labelled by the relator letters in order. The
/// orientation of each pairing is chosen so that the relator evaluates to
/// the identity.
pub fn octagon_generators(genus: usize) -> Result<Vec<Mat>> {
    let pres = GroupPresentation::surface(genus)?;
    let rel = pres.relator().letters().to_vec();
    let poly = Polygon::new(genus);
    let ngen = pres.num_generators();
    let pos = |x: u8| rel.iter().position(|&y| y == x).unwrap();
    let base: Vec<C2> = (0..ngen as u8)
        .step_by(2)
        .map(|x| poly.pairing(pos(x), pos(x ^ 1)))
        .collect();

    // a-letters forward, b-letters reversed; other patterns are tried if that fails
    let preferred: u64 = (0..2 * genus).filter(|k| k % 2 == 1).fold(0, |m, k| m | (1 << k));
    let mut candidates = alloc::vec![preferred];
    if 2 * genus < 20 {
        candidates.extend((0..1u64 << (2 * genus)).filter(|&f| f != preferred));
    }
    for flips in candidates {
        let gens: Vec<C2> = base
            .iter()
            .enumerate()
            .map(|(k, m)| if flips >> k & 1 == 1 { c2_inv(m) } else { *m })
            .collect();
        let mut p = rot(0.0);
        for &x in &rel {
            let g = gens[(x / 2) as usize];
            p = c2_mul(&p, &if x & 1 == 0 { g } else { c2_inv(&g) });
        }
        let id = rot(0.0);
        let err = p.iter().zip(&id).fold(0.0f64, |s, (a, b)| s.max((a - b).norm()));
        if err < 1e-9 {
            let mut out = Vec::with_capacity(ngen);
            for g in &gens {
                let m = to_real(g)?;
                out.push(m.clone());
                out.push(m.inverse()?);
            }
            return Ok(out);
        }
    }
    Err(Error::Construction("no side-pairing orientation satisfies the relator".into()))
}

/// Translation length of a hyperbolic element of SL(2,R): `2 arccosh(|tr|/2)`.
pub fn translation_length(m: &Mat) -> f64 {
    let t = m.trace().abs() / 2.0;
    if t <= 1.0 {
        0.0
    } else {
        2.0 * t.acosh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(gens: &[Mat], w: &[u8]) -> Mat {
        w.iter().fold(Mat::identity(2), |p, &x| p.mul(&gens[x as usize]))
    }

    #[test]
    fn relator_holds_and_traces_match() {
        for g in 2..=3 {
            let gens = octagon_generators(g).unwrap();
            let p = GroupPresentation::surface(g).unwrap();
            let r = eval(&gens, p.relator().letters());
            assert!(r.sub(&Mat::identity(2)).max_abs() < 1e-10);
            for m in &gens {
                assert!((m.det() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn genus_two_generator_trace() {
        // |tr| = 2 + sqrt 2 for every side pairing of the regular octagon
        let gens = octagon_generators(2).unwrap();
        for m in &gens {
            assert!((m.trace().abs() - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_is_hyperbolic() {
        let gens = octagon_generators(2).unwrap();
        let c = eval(&gens, &[0, 2, 1, 3]);
        assert!(c.trace().abs() > 2.0);
    }
}
